# Copyright 2024 The nvgate Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Interface to output files.

This module writes result tables as CSV or JSON lines and the metadata
sidecar that sits next to every output file.
"""

import collections
import contextlib
import csv
import json
import sys

import numpy as np

from nvgate.nvlib import errors

SIDECAR_SUFFIX = '.meta.json'

# 12 significant digits.
NUMBER_FORMAT = '%.11e'

KEY_VALUE_HEADER = ('quantity', 'value', 'unit', 'value_hz')


def SidecarPath(filename):
  return filename + SIDECAR_SUFFIX


def FormatNumber(value):
  return NUMBER_FORMAT % value


@contextlib.contextmanager
def _OpenOutput(filename):
  """Yield a text stream for filename, or stdout when filename is None."""
  if filename is None:
    yield sys.stdout
    return
  try:
    fd = open(filename, 'w', newline='', encoding='utf-8')
  except (IOError, OSError) as e:
    raise errors.OutputError('cannot open "%s" for writing: %s' % (filename, e))
  try:
    with fd:
      yield fd
  except (IOError, OSError) as e:
    raise errors.OutputError('cannot write "%s": %s' % (filename, e))


def _WriteRows(header, rows, filename, fmt):
  if fmt == 'csv':
    with _OpenOutput(filename) as fd:
      writer = csv.writer(fd, lineterminator='\n')
      writer.writerow(header)
      writer.writerows(rows)
  elif fmt == 'jsonl':
    with _OpenOutput(filename) as fd:
      for row in rows:
        record = collections.OrderedDict(
            (name, _JsonValue(value)) for name, value in zip(header, row))
        fd.write(json.dumps(record) + '\n')
  else:
    raise errors.OutputError('unknown output format %r' % (fmt,))


def _JsonValue(value):
  """Numbers go through NUMBER_FORMAT so both formats carry the same digits."""
  if value == '':
    return None
  try:
    return float(value)
  except ValueError:
    return value


def WriteSeries(result, filename=None, fmt='csv'):
  """Write a TimeSeries or SweepResult.

  Arguments:
    result: anything with AsTable() -> (axis name, axis, {column: values}).
    filename: (unicode) Output path; None writes to stdout.
    fmt: (unicode) 'csv' or 'jsonl'.

  Raises:
    OutputError: for an empty result or any I/O failure.
  """
  axis_name, axis, columns = result.AsTable()
  if not len(axis):
    raise errors.OutputError('refusing to write an empty series')
  header = [axis_name] + list(columns)
  data = [np.asarray(axis)] + [np.asarray(v) for v in columns.values()]
  rows = [[FormatNumber(value) for value in row] for row in zip(*data)]
  _WriteRows(header, rows, filename, fmt)


def WriteKeyValueTable(rows, filename=None, fmt='csv'):
  """Write (quantity, value, unit, value_hz) rows; value_hz may be None."""
  if not rows:
    raise errors.OutputError('refusing to write an empty table')
  formatted = []
  for quantity, value, unit, value_hz in rows:
    formatted.append([
        quantity,
        FormatNumber(value), unit, '' if value_hz is None else
        FormatNumber(value_hz)
    ])
  _WriteRows(KEY_VALUE_HEADER, formatted, filename, fmt)


def _JsonDefault(value):
  if isinstance(value, np.generic):
    return value.item()
  if isinstance(value, np.ndarray):
    return value.tolist()
  if isinstance(value, tuple) and hasattr(value, '_asdict'):
    return value._asdict()
  raise TypeError('%r is not JSON serializable' % (value,))


def WriteSidecar(filename, metadata):
  """Write metadata to <filename>.meta.json and return that path."""
  path = SidecarPath(filename)
  with _OpenOutput(path) as fd:
    json.dump(metadata, fd, indent=2, default=_JsonDefault)
    fd.write('\n')
  return path

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
"""nvgate.

nvgate simulates a heteronuclear two-qubit gate mediated by a microwave-dressed
NV electron spin that is reset periodically. The electron is only virtually
excited; the resets keep it polarized, so the nuclei see an effective ZZ
coupling plus a weak dephasing channel.

Each run is described by a configuration (a preset name or an INI file) and
produces a CSV or JSON-lines table plus a <output>.meta.json sidecar from which
the run can be repeated exactly.
"""
import argparse
import collections
import json
import logging
import sys

from nvgate.nvlib import errors
from nvgate.nvlib import nvgate_api
from nvgate.nvlib import run_config

__version__ = '0.1.0'


def main(argv):
  """Main program.

  Arguments:
    argv: command-line arguments, such as sys.argv (including the program name
      in argv[0]).

  Returns:
    Zero on successful program termination, non-zero otherwise.

  Raises:
    NvGateError: if the configuration is invalid or the run fails.
  """
  parser = argparse.ArgumentParser(
      description='Simulator of dissipatively stabilized nuclear spin gates.')
  parser.add_argument(
      '-v',
      '--version',
      action='store_true',
      help='show version number and exit')
  parser.add_argument(
      '--config',
      action='store',
      help=('specify the run: either a preset name (%s) or the name of a file '
            'with run settings. The default is the preset of the experiment.'
            % ', '.join(sorted(run_config.DEFAULT_PRESETS.values()))))
  parser.add_argument(
      '--config-help',
      action='store_true',
      help=('show run settings and exit; this output can be saved to a file '
            'and edited'))
  parser.add_argument(
      '--out', action='store', help='output file; stdout when omitted')
  parser.add_argument(
      '--format', choices=run_config.FORMATS, help='output format')
  parser.add_argument(
      '--threads',
      action='store',
      metavar='N|auto',
      help='worker processes for sweeps')
  parser.add_argument(
      '-vv',
      '--verbose',
      action='store_true',
      help='log progress while running')
  parser.add_argument(
      'experiment',
      nargs='?',
      choices=run_config.EXPERIMENTS,
      help='experiment to run; overrides [run] experiment')
  args = parser.parse_args(argv[1:])

  if args.version:
    print('nvgate {}'.format(__version__))
    return 0

  logging.basicConfig(
      level=logging.INFO if args.verbose else logging.WARNING,
      format='%(levelname)s: %(message)s')

  config_name = args.config
  if config_name is None:
    if args.experiment is None and not args.config_help:
      parser.error('name an experiment or pass --config')
    config_name = run_config.DEFAULT_PRESETS[args.experiment or 'transfer']
  config = run_config.CreateConfig(
      config_name,
      overrides={
          ('run', 'experiment'): args.experiment,
          ('run', 'output'): args.out,
          ('run', 'format'): args.format,
          ('run', 'threads'): args.threads,
      })

  if args.config_help:
    _PrintConfigHelp(config)
    return 0

  nvgate_api.Execute(config, version=__version__)
  return 0


def _PrintConfigHelp(config):
  for section, options in run_config.Help().items():
    if section.startswith(run_config.SPIN_PREFIX):
      names = [name for name in config.raw
               if name.startswith(run_config.SPIN_PREFIX)]
    else:
      names = [section]
    for name in names:
      print('[%s]' % name)
      values = config.raw.get(name, {})
      for option, docstring in options.items():
        for line in docstring.splitlines():
          print('#', line and ' ' or '', line, sep='')
        if option in values:
          print(option, '=', values[option], sep='')
        else:
          print('#', option, '=', sep='')
      print()


def ErrorRecord(error):
  """The machine-readable record run_main writes to stderr."""
  return collections.OrderedDict([
      ('error', type(error).__name__),
      ('message', str(error)),
      ('exit_code', getattr(error, 'exit_code', 1)),
  ])


def run_main():  # pylint: disable=invalid-name
  try:
    sys.exit(main(sys.argv))
  except errors.NvGateError as e:
    sys.stderr.write(json.dumps(ErrorRecord(e)) + '\n')
    sys.exit(e.exit_code)
  except (ArithmeticError, ValueError, MemoryError) as e:
    sys.stderr.write(json.dumps(ErrorRecord(e)) + '\n')
    sys.exit(1)


if __name__ == '__main__':
  run_main()

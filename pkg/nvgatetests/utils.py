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
"""Utilities for tests."""

import contextlib
import io
import os
import sys
import tempfile

import numpy as np

from nvgate.nvlib import experiments
from nvgate.nvlib import model_builder

KHZ = 2 * np.pi * 1e3
MHZ = 2 * np.pi * 1e6


def Spin(label, larmor, a_par, rf_rabi=1 * KHZ, **kwargs):
  return model_builder.NuclearSpinSpec(label, larmor, a_par, rf_rabi=rf_rabi,
                                       **kwargs)


def TwoSpinRegister(mw_rabi=400 * KHZ, a_par=(9 * KHZ, 11 * KHZ), **drive):
  """The two-spin gate register with RF on both spins' resonances."""
  spins = [
      Spin('29Si', 4 * MHZ, a_par[0]),
      Spin('13C', 5.06 * MHZ, a_par[1]),
  ]
  return model_builder.SpinRegister(
      spins, model_builder.DriveSpec(mw_rabi, **drive))


def ResetDissipation(t_reset=20e-6, t1rho=200e-6, **kwargs):
  return model_builder.DissipationSpec(t1rho, t_reset=t_reset, **kwargs)


def TwoSpinSpec(register=None, dissipation=None, **kwargs):
  return experiments.ExperimentSpec(
      register if register is not None else TwoSpinRegister(),
      dissipation if dissipation is not None else ResetDissipation(),
      **kwargs)


class IO(object):
  """A StringIO that also supplies a "buffer" attribute."""

  def __init__(self):
    self.buffer = io.BytesIO()
    self._text = io.StringIO()

  def write(self, s):
    self._text.write(s)

  def flush(self):
    pass

  def getvalue(self):
    return self._text.getvalue()


@contextlib.contextmanager
def captured_output():  # pylint: disable=invalid-name
  new_out, new_err = IO(), IO()
  old_out, old_err = sys.stdout, sys.stderr
  try:
    sys.stdout, sys.stderr = new_out, new_err
    yield sys.stdout, sys.stderr
  finally:
    sys.stdout, sys.stderr = old_out, old_err


@contextlib.contextmanager
def TempFileContents(dirname, contents, suffix='.cfg'):
  """Write contents to a new file in dirname and yield its name."""
  fd, fname = tempfile.mkstemp(suffix=suffix, dir=dirname, text=True)
  try:
    with io.open(fd, mode='w', encoding='utf-8', newline='') as f:
      f.write(contents)
    yield fname
  finally:
    os.remove(fname)

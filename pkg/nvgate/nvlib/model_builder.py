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
"""Hamiltonians and jump operators of the NV-mediated register.

Three levels of description are built here:

  * the lab frame, with a spin-1 electron driven at the MW frequency
    (LabFrameHamiltonian, used only at scaled D and gamma_e B);
  * the MW rotating frame, before the nuclear rotation and the RWA
    (RfFrameHamiltonian);
  * the RWA frame on the dressed electron qubit, the level every exact
    experiment runs at (BuildRwaHamiltonian).

All frequencies are angular (rad/s) and all times in seconds.
"""

import collections
import logging

import numpy as np
import scipy.linalg

from nvgate.nvlib import errors
from nvgate.nvlib import spin_algebra as sa

ROLES = ('target', 'sensor', 'spectator', 'none')
RELAXATION_MODELS = ('thermal', 'decay')

# Above this ratio the hierarchy a_par << Omega << omega_rf is flagged.
VALIDITY_THRESHOLD = 0.1

_RESONANCE_TOLERANCE = 1e-9


class _Spec(object):
  """Small immutable record with keyword replacement."""

  _FIELDS = ()

  def Replace(self, **changes):
    values = dict((name, getattr(self, '_' + name)) for name in self._FIELDS)
    for name in changes:
      if name not in self._FIELDS:
        raise errors.ModelError('%s has no field %r' %
                                (type(self).__name__, name))
    values.update(changes)
    return type(self)(**values)

  def AsDict(self):
    return dict((name, getattr(self, name)) for name in self._FIELDS)

  def __eq__(self, other):
    return type(self) is type(other) and self.AsDict() == other.AsDict()

  def __ne__(self, other):
    return not self == other

  def __repr__(self):
    return '%s(%s)' % (type(self).__name__, ', '.join(
        '%s=%r' % (name, getattr(self, name)) for name in self._FIELDS))


class NuclearSpinSpec(_Spec):
  """One spin-1/2 nucleus of the register.

  When rf_freq is omitted the RF drive sits on the hyperfine-shifted resonance
  larmor + a_par/2 and follows a_par under Replace.
  """

  _FIELDS = ('label', 'larmor', 'a_par', 'a_perp', 'rf_rabi', 'rf_freq',
             'rf_enabled', 'role', 'resonant')

  def __init__(self,
               label,
               larmor,
               a_par,
               a_perp=0.0,
               rf_rabi=0.0,
               rf_freq=None,
               rf_enabled=True,
               role='target',
               resonant=None):
    if a_perp < 0:
      raise errors.ModelError('%s: a_perp must be >= 0' % label)
    if rf_rabi < 0:
      raise errors.ModelError('%s: rf_rabi must be >= 0' % label)
    if role not in ROLES:
      raise errors.ModelError('%s: unknown role %r; expected one of %s' %
                              (label, role, ', '.join(ROLES)))
    self._label = label
    self._larmor = float(larmor)
    self._a_par = float(a_par)
    self._a_perp = float(a_perp)
    self._rf_rabi = float(rf_rabi)
    self._rf_freq = None if rf_freq is None else float(rf_freq)
    self._rf_enabled = bool(rf_enabled)
    self._role = role
    self._resonant = rf_freq is None if resonant is None else bool(resonant)
    if self._rf_enabled and self._resonant and self._rf_freq is not None:
      expected = self.ResonantFrequency()
      if abs(self._rf_freq - expected) > _RESONANCE_TOLERANCE * abs(expected):
        raise errors.ModelError(
            '%s: rf_freq is marked resonant but differs from larmor + a_par/2 '
            'by %.6g rad/s' % (label, self._rf_freq - expected))

  label = property(lambda self: self._label)
  larmor = property(lambda self: self._larmor)
  a_par = property(lambda self: self._a_par)
  a_perp = property(lambda self: self._a_perp)
  rf_rabi = property(lambda self: self._rf_rabi)
  rf_enabled = property(lambda self: self._rf_enabled)
  role = property(lambda self: self._role)
  resonant = property(lambda self: self._resonant)

  @property
  def rf_freq(self):
    if self._rf_freq is None:
      return self.ResonantFrequency()
    return self._rf_freq

  def ResonantFrequency(self):
    return self._larmor + self._a_par / 2

  def Detuning(self):
    """RF detuning larmor + a_par/2 - rf_freq; zero when RF is off."""
    if not self._rf_enabled:
      return 0.0
    return self.ResonantFrequency() - self.rf_freq

  def DriveRabi(self):
    return self._rf_rabi if self._rf_enabled else 0.0

  def Replace(self, **changes):
    if 'rf_freq' in changes and 'resonant' not in changes:
      changes['resonant'] = None
    return super(NuclearSpinSpec, self).Replace(**changes)


class DriveSpec(_Spec):
  """MW drive of the NV electron and the lab-frame electron constants."""

  _FIELDS = ('mw_rabi', 'mw_detuning', 'mw_rabi_error', 'zero_field_d',
             'electron_zeeman')

  def __init__(self,
               mw_rabi,
               mw_detuning=0.0,
               mw_rabi_error=0.0,
               zero_field_d=2 * np.pi * 2.87e9,
               electron_zeeman=2 * np.pi * 1.0e9):
    if mw_rabi < 0:
      raise errors.ModelError('mw_rabi must be >= 0')
    self._mw_rabi = float(mw_rabi)
    self._mw_detuning = float(mw_detuning)
    self._mw_rabi_error = float(mw_rabi_error)
    self._zero_field_d = float(zero_field_d)
    self._electron_zeeman = float(electron_zeeman)

  mw_rabi = property(lambda self: self._mw_rabi)
  mw_detuning = property(lambda self: self._mw_detuning)
  mw_rabi_error = property(lambda self: self._mw_rabi_error)
  zero_field_d = property(lambda self: self._zero_field_d)
  electron_zeeman = property(lambda self: self._electron_zeeman)

  @property
  def effective_rabi(self):
    return self._mw_rabi * (1.0 + self._mw_rabi_error)


class DissipationSpec(_Spec):
  """Electron T_1rho relaxation, the reset period and nuclear dephasing.

  Arguments:
    t1rho: (float) Dressed-frame electron lifetime, s.
    t_reset: (float or None) Reset period, s.
    target_t2: (tuple) Per-nucleus T_2 in s, None where no dephasing applies.
    relaxation: (str) 'thermal' relaxes towards the unpolarized dressed state
      with jumps in both directions; 'decay' is the one-way |-><+| jump.
  """

  _FIELDS = ('t1rho', 't_reset', 'target_t2', 'relaxation')

  def __init__(self, t1rho, t_reset=None, target_t2=(), relaxation='thermal'):
    if not t1rho > 0:
      raise errors.ModelError('t1rho must be positive')
    if t_reset is not None and not 0 < t_reset < 10 * t1rho:
      raise errors.ModelError('t_reset must satisfy 0 < t_reset < 10*t1rho '
                              '(got %g s for t1rho = %g s)' % (t_reset, t1rho))
    for t2 in target_t2:
      if t2 is not None and not t2 > 0:
        raise errors.ModelError('target_t2 values must be positive')
    if relaxation not in RELAXATION_MODELS:
      raise errors.ModelError('unknown relaxation model %r' % (relaxation,))
    self._t1rho = float(t1rho)
    self._t_reset = None if t_reset is None else float(t_reset)
    self._target_t2 = tuple(None if t2 is None else float(t2)
                            for t2 in target_t2)
    self._relaxation = relaxation

  t1rho = property(lambda self: self._t1rho)
  t_reset = property(lambda self: self._t_reset)
  target_t2 = property(lambda self: self._target_t2)
  relaxation = property(lambda self: self._relaxation)

  @property
  def gamma_e(self):
    return 1.0 / self._t1rho

  @property
  def gamma_r(self):
    """1/T_1rho + 1/t_re with resets, else 1/T_1rho."""
    if self._t_reset is None:
      return self.gamma_e
    return 1.0 / self._t1rho + 1.0 / self._t_reset

  def T2(self, index):
    if index < len(self._target_t2):
      return self._target_t2[index]
    return None


class SpinRegister(object):
  """The dressed NV qubit and its nuclear spins.

  Gate targets are the first two spins whose role is 'target' or 'sensor'.
  """

  def __init__(self, spins, drive):
    spins = tuple(spins)
    if not spins:
      raise errors.ModelError('the register has no nuclear spins')
    self._spins = spins
    self._drive = drive

  @property
  def spins(self):
    return self._spins

  @property
  def drive(self):
    return self._drive

  @property
  def num_nuclei(self):
    return len(self._spins)

  @property
  def layout(self):
    return sa.RegisterLayout(len(self._spins))

  @property
  def nuclear_layout(self):
    return sa.NuclearLayout(len(self._spins))

  @property
  def targets(self):
    return tuple(i for i, spin in enumerate(self._spins)
                 if spin.role in ('target', 'sensor'))[:2]

  def TargetPair(self):
    targets = self.targets
    if len(targets) < 2:
      raise errors.ModelError('two gate-target spins are required; the '
                              'register designates %d' % len(targets))
    return targets

  def Sensor(self):
    for i, spin in enumerate(self._spins):
      if spin.role == 'sensor':
        return i
    return self.TargetPair()[0]

  def Replace(self, spins=None, drive=None):
    return SpinRegister(self._spins if spins is None else spins,
                        self._drive if drive is None else drive)

  def ReplaceSpin(self, index, **changes):
    spins = list(self._spins)
    spins[index] = spins[index].Replace(**changes)
    return self.Replace(spins=spins)

  def __eq__(self, other):
    return (isinstance(other, SpinRegister) and
            self._spins == other._spins and self._drive == other._drive)

  def __ne__(self, other):
    return not self == other

  def __repr__(self):
    return 'SpinRegister(%r, %r)' % (list(self._spins), self._drive)


def ValidityRatios(register, logger=logging.warning):
  """Return (max a_par / Omega, Omega / min omega_rf) and warn above 0.1.

  The second ratio is None when no nucleus is driven.
  """
  omega = register.drive.mw_rabi
  hyperfine = max(abs(spin.a_par) for spin in register.spins)
  hyperfine_ratio = hyperfine / omega if omega else float('inf')
  rf_freqs = [abs(spin.rf_freq) for spin in register.spins if spin.rf_enabled]
  drive_ratio = omega / min(rf_freqs) if rf_freqs else None
  if hyperfine_ratio > VALIDITY_THRESHOLD and logger:
    logger('max a_par / Omega = %.3g is outside the perturbative regime' %
           hyperfine_ratio)
  if drive_ratio is not None and drive_ratio > VALIDITY_THRESHOLD and logger:
    logger('Omega / min omega_rf = %.3g; the RF rotating-wave approximation '
           'is doubtful' % drive_ratio)
  return hyperfine_ratio, drive_ratio


def _CheckDriven(drive):
  if not drive.mw_rabi > 0:
    raise errors.ModelError('mw_rabi must be positive for a driven simulation')


def _DressedElectronTerms(register):
  drive = register.drive
  dims = register.layout.dims
  return (drive.effective_rabi * sa.EmbedMatrix(sa.SIGMA_Z, 0, dims) +
          drive.mw_detuning * sa.EmbedMatrix(sa.SIGMA_X, 0, dims))


def BuildRwaHamiltonian(register):
  """The time-independent RWA-frame Hamiltonian.

  Omega(1+eps) sigma_z + delta_mw sigma_x
    + sum_i [Omega_rf,i I^x_i + delta_i I^z_i + a_par,i sigma_x I^z_i]

  Arguments:
    register: (SpinRegister) The register; delta_i is each spin's RF detuning.

  Returns:
    A Hermitian Operator on the register layout.

  Raises:
    ModelError: if the MW drive is off.
  """
  _CheckDriven(register.drive)
  ValidityRatios(register)
  dims = register.layout.dims
  hamiltonian = _DressedElectronTerms(register)
  for i, spin in enumerate(register.spins):
    slot = i + 1
    hamiltonian = hamiltonian + (
        spin.DriveRabi() * sa.EmbedMatrix(sa.IX, slot, dims) +
        spin.Detuning() * sa.EmbedMatrix(sa.IZ, slot, dims) +
        spin.a_par * sa.ProductMatrix({0: sa.SIGMA_X, slot: sa.IZ}, dims))
  return sa.Operator(hamiltonian, register.layout).CheckHermitian()


def _RfFields(register, crosstalk, dims):
  """Distinct RF fields as (rabi, frequency, sum of I^x over driven spins).

  Nucleus i sits in slot i + 1 of dims.
  """
  fields = collections.OrderedDict()
  for i, spin in enumerate(register.spins):
    if spin.rf_enabled and spin.rf_rabi:
      fields.setdefault((spin.rf_rabi, spin.rf_freq), []).append(i + 1)
  result = []
  for (rabi, freq), slots in fields.items():
    if crosstalk:
      slots = range(1, len(dims))
    matrix = sum(sa.EmbedMatrix(sa.IX, slot, dims) for slot in slots)
    result.append((rabi, freq, matrix))
  return result


class _TimeDependentSource(object):
  """H(t) = static + sum_f 2 rabi_f cos(freq_f t) X_f, evaluated on demand."""

  def __init__(self, layout, static, drives):
    self.layout = layout
    self._static = static
    self._drives = drives
    spread = np.ptp(np.linalg.eigvalsh(static))
    self.max_frequency = max([spread] + [abs(freq) for _, freq, _ in drives])

  def __call__(self, t):
    hamiltonian = self._static.copy()
    for amplitude, freq, matrix in self._drives:
      hamiltonian += amplitude * np.cos(freq * t) * matrix
    return hamiltonian

  def Operator(self, t):
    return sa.Operator(self(t), self.layout).CheckHermitian()


class RfFrameHamiltonian(_TimeDependentSource):
  """H(t) in the MW rotating frame, before the nuclear rotation and the RWA.

  Keeps the nuclear Zeeman terms (larmor + a_par/2) I^z, the transverse
  hyperfine a_perp sigma_x I^x and the full 2 Omega_rf cos(omega_rf t) drive.
  With crosstalk every RF field acts on every nucleus.
  """

  def __init__(self, register, crosstalk=True):
    _CheckDriven(register.drive)
    dims = register.layout.dims
    static = _DressedElectronTerms(register)
    for i, spin in enumerate(register.spins):
      slot = i + 1
      static = static + (
          spin.ResonantFrequency() * sa.EmbedMatrix(sa.IZ, slot, dims) +
          spin.a_par * sa.ProductMatrix({0: sa.SIGMA_X, slot: sa.IZ}, dims) +
          spin.a_perp * sa.ProductMatrix({0: sa.SIGMA_X, slot: sa.IX}, dims))
    drives = [(2 * rabi, freq, matrix)
              for rabi, freq, matrix in _RfFields(register, crosstalk, dims)]
    super(RfFrameHamiltonian, self).__init__(register.layout, static, drives)


def BuildRfFrameHamiltonian(register, t, crosstalk=True):
  if t < 0:
    raise errors.ModelError('time must be >= 0')
  return RfFrameHamiltonian(register, crosstalk).Operator(t)


def RwaFrameGenerator(register):
  """H'_0 = sum_i omega_rf,i I^z_i, the nuclear rotation into the RWA frame.

  Undriven spins rotate at their own hyperfine-shifted frequency.
  """
  dims = register.layout.dims
  generator = np.zeros((register.layout.total_dim,) * 2, dtype=complex)
  for i, spin in enumerate(register.spins):
    freq = spin.rf_freq if spin.rf_enabled else spin.ResonantFrequency()
    generator += freq * sa.EmbedMatrix(sa.IZ, i + 1, dims)
  return generator


def RwaFrameUnitary(register, t):
  """U_0(t) = exp(-i H'_0 t); rho_rwa = U_0^dagger rho U_0."""
  generator = RwaFrameGenerator(register)
  return np.diag(np.exp(-1j * np.diag(generator) * t))


def ToRwaFrame(register, hamiltonian, t):
  """Return U_0^dagger H U_0 - H'_0 for a MW-frame matrix at time t."""
  unitary = RwaFrameUnitary(register, t)
  return (unitary.conj().T.dot(hamiltonian).dot(unitary) -
          RwaFrameGenerator(register))


class LabFrameHamiltonian(_TimeDependentSource):
  """Lab-frame H(t) with a spin-1 electron at scaled D and gamma_e B.

  Arguments:
    register: (SpinRegister) The register.
    scale: (float) Factor in (0, 1] applied to D and gamma_e B.
    include_nuclei: (bool) When False the layout is the bare electron.
    crosstalk: (bool) Every RF field acts on every nucleus.
  """

  def __init__(self, register, scale=1e-2, include_nuclei=True,
               crosstalk=True):
    if not 0 < scale <= 1:
      raise errors.ModelError('scale must lie in (0, 1]')
    drive = register.drive
    self.zero_field_d = scale * drive.zero_field_d
    self.electron_zeeman = scale * drive.electron_zeeman
    self.mw_freq = self.zero_field_d - self.electron_zeeman + drive.mw_detuning
    if include_nuclei:
      layout = sa.RegisterLayout(register.num_nuclei, electron_dim=3)
    else:
      layout = sa.HilbertLayout([(sa.ELECTRON, 3)])
    dims = layout.dims
    static = (self.zero_field_d * sa.EmbedMatrix(sa.S1Z.dot(sa.S1Z), 0, dims) +
              self.electron_zeeman * sa.EmbedMatrix(sa.S1Z, 0, dims))
    drives = [(np.sqrt(2) * drive.effective_rabi, self.mw_freq,
               sa.EmbedMatrix(sa.S1X, 0, dims))]
    if include_nuclei:
      for i, spin in enumerate(register.spins):
        slot = i + 1
        static = static + (
            spin.larmor * sa.EmbedMatrix(sa.IZ, slot, dims) +
            spin.a_par * sa.ProductMatrix({0: sa.S1Z, slot: sa.IZ}, dims) +
            spin.a_perp * sa.ProductMatrix({0: sa.S1Z, slot: sa.IX}, dims))
      fields = _RfFields(register, crosstalk, dims)
      drives.extend((2 * rabi, freq, matrix) for rabi, freq, matrix in fields)
    super(LabFrameHamiltonian, self).__init__(layout, static, drives)

  def MwFrameUnitary(self, t):
    """exp(-i omega t |-1><-1|) on the electron, identity elsewhere."""
    phases = np.exp(-1j * self.mw_freq * t * np.array([0, 0, 1]))
    return sa.EmbedMatrix(np.diag(phases), 0, self.layout.dims)


def BuildLabHamiltonian(register, t, scale=1e-2, include_nuclei=True):
  return LabFrameHamiltonian(register, scale, include_nuclei).Operator(t)


def DressedRabi(rf_rabi, delta):
  return float(np.hypot(rf_rabi, delta))


def TiltAngle(rf_rabi, delta):
  """theta of the dressed drive axis x', cos(theta) = Omega_rf / Omega_bar."""
  return float(np.arctan2(delta, rf_rabi))


def BuildDetunedEffective(register, deltas=None, model=None):
  """Nuclear-only Hamiltonian with per-spin RF detunings.

  sum_i Omega_bar_i I^x'_i + sign p g'_ij I^z_i I^z_j, where
  Omega_bar_i I^x'_i = Omega_rf,i I^x_i + delta_i I^z_i.

  Arguments:
    register: (SpinRegister) The register.
    deltas: (list of float) RF detunings; defaults to the register's own.
    model: (EffectiveModel) Provides p, channel_sign and pair couplings.

  Returns:
    A Hermitian Operator on the nuclear layout.

  Raises:
    ModelError: without an effective model or with the wrong number of
      detunings.
  """
  if model is None:
    raise errors.ModelError('an effective model is required')
  if deltas is None:
    deltas = [spin.Detuning() for spin in register.spins]
  if len(deltas) != register.num_nuclei:
    raise errors.ModelError('expected %d detunings, got %d' %
                            (register.num_nuclei, len(deltas)))
  layout = register.nuclear_layout
  dims = layout.dims
  hamiltonian = np.zeros((layout.total_dim,) * 2, dtype=complex)
  for i, (spin, delta) in enumerate(zip(register.spins, deltas)):
    hamiltonian += (spin.DriveRabi() * sa.EmbedMatrix(sa.IX, i, dims) +
                    delta * sa.EmbedMatrix(sa.IZ, i, dims))
  hamiltonian += model.ZzCouplingMatrix(dims)
  return sa.Operator(hamiltonian, layout).CheckHermitian()


def _ElectronRates(dspec, reset_augmented):
  """(|-><+| rate, |+><-| rate) of the electron relaxation channel."""
  reset_rate = 0.0
  if reset_augmented:
    if dspec.t_reset is None:
      raise errors.ModelError('the reset-augmented rate needs t_reset')
    reset_rate = 1.0 / dspec.t_reset
  if dspec.relaxation == 'decay':
    return dspec.gamma_e + reset_rate, 0.0
  return dspec.gamma_e / 2 + reset_rate, dspec.gamma_e / 2


def BuildDissipators(register, dspec, reset_augmented=False):
  """Jump operators of the full register.

  Arguments:
    register: (SpinRegister) The register.
    dspec: (DissipationSpec) Rates and the relaxation model.
    reset_augmented: (bool) Fold the resets into a continuous |-><+| channel
      so the total electron rate is gamma_r = 1/T_1rho + 1/t_re.

  Returns:
    A list of Operators: electron relaxation, then sqrt(2/T_2) I^z for every
    nucleus with a T_2.
  """
  layout = register.layout
  dims = layout.dims
  if len(dspec.target_t2) > register.num_nuclei:
    raise errors.ModelError('target_t2 lists %d nuclei; the register has %d' %
                            (len(dspec.target_t2), register.num_nuclei))
  down, up = _ElectronRates(dspec, reset_augmented)
  jumps = [
      sa.Operator(np.sqrt(down) * sa.EmbedMatrix(sa.LOWER_DRESSED, 0, dims),
                  layout)
  ]
  if up:
    jumps.append(
        sa.Operator(np.sqrt(up) * sa.EmbedMatrix(sa.RAISE_DRESSED, 0, dims),
                    layout))
  jumps.extend(DephasingJumps(dspec, dims, first_nuclear_slot=1, layout=layout))
  return jumps


def DephasingJumps(dspec, dims, first_nuclear_slot, layout):
  jumps = []
  for i, t2 in enumerate(dspec.target_t2):
    if t2 is not None:
      matrix = np.sqrt(2.0 / t2) * sa.EmbedMatrix(sa.IZ, first_nuclear_slot + i,
                                                  dims)
      jumps.append(sa.Operator(matrix, layout))
  return jumps


def ExpmHermitian(hamiltonian, t):
  """exp(-i H t) for a Hermitian matrix."""
  return scipy.linalg.expm(-1j * np.asarray(hamiltonian) * t)

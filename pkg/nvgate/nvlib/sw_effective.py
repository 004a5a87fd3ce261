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
"""Second-order effective models of the electron-mediated coupling.

The dressed electron is eliminated with a second-order Schrieffer-Wolff
reduction. With periodic resets the electron's complex energy splitting
Omega - i gamma_r/2 turns the virtual-flip coupling g_e into g'_e, and the
quasi-steady polarization p weights what survives on the nuclei.
"""

import collections
import itertools
import logging

import numpy as np

from nvgate.nvlib import errors
from nvgate.nvlib import model_builder
from nvgate.nvlib import spin_algebra as sa

JUMP_CONVENTIONS = ('as-printed', 'spin-half')

# Warn, don't fail, when ||V|| / Omega exceeds this.
PERTURBATION_THRESHOLD = 0.1


class SwBlocks(
    collections.namedtuple(
        'SwBlocks',
        ['labels', 'energies', 'first_order', 'second_order', 'ratio'])):
  """Electron-conditioned nuclear blocks of the effective Hamiltonian.

  first_order and second_order map a dressed-state label to a nuclear matrix;
  ratio is ||V|| divided by the smallest electron gap.
  """

  def Block(self, label):
    first = self.first_order[label]
    return (self.energies[label] * np.eye(first.shape[0]) + first +
            self.second_order[label])

  def Spectrum(self):
    return np.sort(
        np.concatenate(
            [np.linalg.eigvalsh(self.Block(label)) for label in self.labels]))


def SwSecondOrder(h0, v, basis=None, logger=logging.warning):
  """Second-order Schrieffer-Wolff reduction over electron states.

  <a|H_e|a> = E_a + P_a V P_a + sum_{b != a} V_ab V_ba / (E_a - E_b)

  Arguments:
    h0: (array or Operator) Electron Hamiltonian kron identity; must be
      diagonal in basis.
    v: (array or Operator) The perturbation on the same space.
    basis: (list of (label, vector)) Electron states; defaults to the dressed
      states '+' and '-'.
    logger: (callable) Receives the warning when ||V||/gap exceeds 0.1.

  Returns:
    SwBlocks.

  Raises:
    ModelError: if h0 isn't electron-diagonal or two energies coincide.
  """
  if basis is None:
    basis = [('+', sa.DRESSED_PLUS), ('-', sa.DRESSED_MINUS)]
  h0 = np.asarray(getattr(h0, 'matrix', h0), dtype=complex)
  v = np.asarray(getattr(v, 'matrix', v), dtype=complex)
  if h0.shape != v.shape:
    raise errors.ModelError('H0 and V have different shapes')
  electron_dim = len(basis)
  nuclear_dim = h0.shape[0] // electron_dim
  identity = np.eye(nuclear_dim)
  isometries = {}
  energies = {}
  for label, state in basis:
    isometry = np.kron(np.asarray(state, dtype=complex).reshape(-1, 1),
                       identity)
    block = isometry.conj().T.dot(h0).dot(isometry)
    energy = np.trace(block).real / nuclear_dim
    if np.max(np.abs(block - energy * identity)) > 1e-12 * max(
        1.0, abs(energy)):
      raise errors.ModelError('H0 is not proportional to the identity on the '
                              'nuclei in electron state %r' % label)
    isometries[label] = isometry
    energies[label] = energy
  labels = [label for label, _ in basis]
  gap = min(abs(energies[a] - energies[b])
            for a, b in itertools.combinations(labels, 2))
  if gap <= 1e-12 * max(abs(e) for e in energies.values()):
    raise errors.ModelError('degenerate electron energies; the second-order '
                            'reduction is undefined')

  def Coupling(a, b):
    return isometries[a].conj().T.dot(v).dot(isometries[b])

  first_order = {}
  second_order = {}
  for a in labels:
    first_order[a] = Coupling(a, a)
    second = np.zeros((nuclear_dim, nuclear_dim), dtype=complex)
    for b in labels:
      if b != a:
        second += Coupling(a, b).dot(Coupling(b, a)) / (energies[a] -
                                                        energies[b])
    second_order[a] = second
  ratio = np.linalg.norm(v, 2) / gap
  if ratio > PERTURBATION_THRESHOLD and logger:
    logger('||V|| / Omega = %.3g; second-order reduction may be inaccurate' %
           ratio)
  return SwBlocks(labels, energies, first_order, second_order, ratio)


def DressedPerturbation(register):
  """H0 = Omega sigma_z and V = sum_i Omega_rf,i I^x_i + a_par,i sigma_x I^z_i.

  Returns (h0, v) as matrices on the register layout.
  """
  dims = register.layout.dims
  h0 = register.drive.mw_rabi * sa.EmbedMatrix(sa.SIGMA_Z, 0, dims)
  v = np.zeros_like(h0)
  for i, spin in enumerate(register.spins):
    v += (spin.DriveRabi() * sa.EmbedMatrix(sa.IX, i + 1, dims) +
          spin.a_par * sa.ProductMatrix({0: sa.SIGMA_X, i + 1: sa.IZ}, dims))
  return h0, v


def ThreeBodyHamiltonian(register):
  """Closed effective Hamiltonian on the full register.

  sum_i Omega_rf,i I^x_i + g_e I^z_1 I^z_2 (|+><+| - |-><-|)
  """
  i, j = register.TargetPair()
  g_e = CouplingsFromRates(register.spins[i].a_par, register.spins[j].a_par,
                           register.drive.mw_rabi, 0.0)[0]
  dims = register.layout.dims
  hamiltonian = 2 * g_e * sa.ProductMatrix(
      {0: sa.SIGMA_Z, i + 1: sa.IZ, j + 1: sa.IZ}, dims)
  for k, spin in enumerate(register.spins):
    hamiltonian = hamiltonian + spin.DriveRabi() * sa.EmbedMatrix(
        sa.IX, k + 1, dims)
  return sa.Operator(hamiltonian, register.layout).CheckHermitian()


def CouplingsFromRates(a1, a2, omega, gamma_r):
  """Return (a1 a2 / 2 Omega, Omega a1 a2 / 2 (Omega^2 + gamma_r^2 / 4))."""
  if not omega > 0:
    raise errors.ModelError('the MW Rabi frequency must be positive')
  g_e = a1 * a2 / (2 * omega)
  g_e_prime = omega * a1 * a2 / (2 * (omega**2 + gamma_r**2 / 4))
  return g_e, g_e_prime


def EffectiveCouplings(register, dissipation):
  """(g_e, g'_e) of the register's gate-target pair.

  Raises:
    ModelError: if fewer than two targets are designated.
  """
  i, j = register.TargetPair()
  return CouplingsFromRates(register.spins[i].a_par, register.spins[j].a_par,
                            register.drive.mw_rabi, dissipation.gamma_r)


def QuasiSteadyPolarization(t_re, t1rho):
  """<2 sigma_z> averaged over the reset cycle, exp(-t_re / T_1rho)."""
  if not (t_re > 0 and t1rho > 0):
    raise errors.ModelError('t_re and t1rho must be positive')
  return float(np.exp(-t_re / t1rho))


class EffectiveModel(object):
  """Derived quantities and operators of the effective nuclear dynamics.

  H_N = sum_i (Omega_rf,i I^x_i + delta_i I^z_i)
        + channel_sign * p * sum_{i<j} g'_ij I^z_i I^z_j
  L_N = sum_k sqrt(p gamma_r) a_par,k / (Omega - i gamma_r / 2) I^z_k

  channel_sign is -1 when the electron is reset into |->.
  """

  def __init__(self, g_e, g_e_prime, p, gamma_r, gamma_n, hamiltonian,
               jump, channel_sign, pair_couplings, targets, dephasing=()):
    self.g_e = g_e
    self.g_e_prime = g_e_prime
    self.p = p
    self.gamma_r = gamma_r
    self.gamma_N = gamma_n
    self.H_N = hamiltonian
    self.L_N = jump
    self.channel_sign = channel_sign
    self.pair_couplings = pair_couplings
    self.targets = targets
    self.dephasing = tuple(dephasing)
    if p * g_e_prime:
      self.validity_ratio = gamma_n / (p * abs(g_e_prime))
    else:
      self.validity_ratio = float('inf')

  @property
  def gate_capable(self):
    return self.validity_ratio < 1

  @property
  def layout(self):
    return self.H_N.layout

  @property
  def zz_rate(self):
    """p g'_e, the coupling that sets the gate speed."""
    return self.p * self.g_e_prime

  def TransferTime(self):
    """t* = 2 pi / (p g'_e), full flip-flop transfer at rate p g'_e / 4."""
    return 2 * np.pi / self.zz_rate

  def ZzGateTime(self):
    """pi / (p g'_e), the time of the calibrated ZZ gate."""
    return np.pi / self.zz_rate

  def ZzCouplingMatrix(self, dims, p=None):
    """channel_sign * p * sum g'_ij I^z_i I^z_j on nuclear dims."""
    p = self.p if p is None else p
    return _ZzMatrix(self.pair_couplings, self.channel_sign * p, dims)

  def Jumps(self, convention='spin-half'):
    """L_N (optionally halved) followed by the nuclear dephasing jumps."""
    if convention not in JUMP_CONVENTIONS:
      raise errors.ModelError('unknown jump convention %r' % (convention,))
    scale = 0.5 if convention == 'spin-half' else 1.0
    return [self.L_N * scale] + list(self.dephasing)

  def Scalars(self):
    return collections.OrderedDict([
        ('g_e', self.g_e),
        ('g_e_prime', self.g_e_prime),
        ('p', self.p),
        ('gamma_r', self.gamma_r),
        ('gamma_N', self.gamma_N),
        ('validity_ratio', self.validity_ratio),
    ])


def EffectiveNuclearModel(register, dissipation, reset_state='-'):
  """Build the effective nuclear model of the reset protocol.

  Arguments:
    register: (SpinRegister) The register; a pair of targets is required.
    dissipation: (DissipationSpec) Must carry t_reset.
    reset_state: (str) '-' or '+', the dressed state the electron is reset to.

  Returns:
    An EffectiveModel on the nuclear layout.

  Raises:
    ModelError: without t_reset or gate targets.
  """
  if dissipation.t_reset is None:
    raise errors.ModelError('the effective nuclear model is defined for the '
                            'reset protocol; t_reset is missing')
  if reset_state not in ('-', '+'):
    raise errors.ModelError('reset_state must be "-" or "+"')
  targets = register.TargetPair()
  omega = register.drive.mw_rabi
  gamma_r = dissipation.gamma_r
  p = QuasiSteadyPolarization(dissipation.t_reset, dissipation.t1rho)
  g_e, g_e_prime = EffectiveCouplings(register, dissipation)
  denominator = omega**2 + gamma_r**2 / 4
  a_par = np.array([spin.a_par for spin in register.spins])

  pair_couplings = {}
  for i, j in itertools.combinations(range(register.num_nuclei), 2):
    if a_par[i] and a_par[j]:
      pair_couplings[(i, j)] = omega * a_par[i] * a_par[j] / (2 * denominator)
  channel_sign = -1 if reset_state == '-' else 1

  layout = register.nuclear_layout
  dims = layout.dims
  hamiltonian = np.zeros((layout.total_dim,) * 2, dtype=complex)
  for i, spin in enumerate(register.spins):
    hamiltonian += (spin.DriveRabi() * sa.EmbedMatrix(sa.IX, i, dims) +
                    spin.Detuning() * sa.EmbedMatrix(sa.IZ, i, dims))
  jump = np.zeros_like(hamiltonian)
  for k in range(register.num_nuclei):
    coefficient = np.sqrt(p * gamma_r) * a_par[k] / (omega - 0.5j * gamma_r)
    jump += coefficient * sa.EmbedMatrix(sa.IZ, k, dims)
  gamma_n = p * gamma_r * np.sum(np.outer(a_par, a_par)) / denominator

  dephasing = model_builder.DephasingJumps(
      dissipation, dims, first_nuclear_slot=0, layout=layout)
  hamiltonian += _ZzMatrix(pair_couplings, channel_sign * p, dims)
  return EffectiveModel(
      g_e=g_e,
      g_e_prime=g_e_prime,
      p=p,
      gamma_r=gamma_r,
      gamma_n=float(gamma_n),
      hamiltonian=sa.Operator(hamiltonian, layout).CheckHermitian(),
      jump=sa.Operator(jump, layout),
      channel_sign=channel_sign,
      pair_couplings=pair_couplings,
      targets=targets,
      dephasing=dephasing)


Sensitivity = collections.namedtuple('Sensitivity',
                                     ['scaled', 'proxy', 'ratio'])


def SensitivityEstimate(model, a_par_target, t1rho, logger=logging.info):
  """Sensitivity per unit time, in rad/s per sqrt(s).

  Returns:
    Sensitivity(scaled=p g'_e sqrt(gamma_N), proxy=(a_par/4)/sqrt(T_1rho),
    ratio=scaled/proxy). gamma_N stands in for the dissipation rate of the
    sensing transition.
  """
  scaled = model.p * abs(model.g_e_prime) * np.sqrt(model.gamma_N)
  proxy = abs(a_par_target) / 4 / np.sqrt(t1rho)
  ratio = scaled / proxy if proxy else float('inf')
  if logger:
    logger('sensitivity: p g\'_e sqrt(gamma_N) = %.4g, (a/4)/sqrt(T1rho) = '
           '%.4g, ratio %.4g' % (scaled, proxy, ratio))
  return Sensitivity(float(scaled), float(proxy), float(ratio))


def _ZzMatrix(pair_couplings, weight, dims):
  matrix = np.zeros((int(np.prod(dims)),) * 2, dtype=complex)
  for (i, j), coupling in sorted(pair_couplings.items()):
    matrix += weight * coupling * sa.ProductMatrix({i: sa.IZ, j: sa.IZ}, dims)
  return matrix

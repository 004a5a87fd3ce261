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
"""Propagation of Lindblad master equations.

Static generators are exponentiated once per distinct step with
scipy.linalg.expm (Pade scaling and squaring). Time-dependent Hamiltonians run
through a fixed-step fourth-order Runge-Kutta integrator. The periodic reset
of the electron is a linear map on the nuclei alone: the segment
superoperator is contracted with the reset state and the electron trace into
a nuclear transfer matrix that is reused for every cycle.
"""

import collections

import numpy as np
import scipy.linalg

from nvgate.nvlib import errors
from nvgate.nvlib import spin_algebra as sa

# Superoperators are dense; 64 keeps them at 4096^2.
MAX_DIM = 64

CP_TOLERANCE = -1e-8
TP_TOLERANCE = 1e-9
TRACE_DRIFT_TOLERANCE = 1e-8

# dt must resolve the fastest frequency with this many steps per period.
STEPS_PER_PERIOD = 50

ChannelReport = collections.namedtuple('ChannelReport', [
    'trace_deviation', 'choi_min_eigenvalue', 'hermiticity_deviation',
    'completely_positive', 'trace_preserving'
])


class LindbladGenerator(object):
  """d rho/dt = -i[H, rho] + sum_k L_k rho L_k^+ - 1/2 {L_k^+ L_k, rho}."""

  def __init__(self, hamiltonian, jumps=()):
    hamiltonian.CheckHermitian()
    jumps = tuple(jumps)
    for jump in jumps:
      if jump.layout != hamiltonian.layout:
        raise errors.ModelError('jump operator layout %r differs from the '
                                'Hamiltonian layout %r' %
                                (jump.layout.labels, hamiltonian.layout.labels))
    self.hamiltonian = hamiltonian
    self.jumps = jumps
    self.dim = hamiltonian.layout.total_dim

  @property
  def layout(self):
    return self.hamiltonian.layout

  def RightHandSide(self, rho):
    """Direct evaluation of the master equation on a matrix."""
    h = self.hamiltonian.matrix
    result = -1j * (h.dot(rho) - rho.dot(h))
    for jump in self.jumps:
      l = jump.matrix
      ldl = l.conj().T.dot(l)
      result += l.dot(rho).dot(l.conj().T) - 0.5 * (ldl.dot(rho) + rho.dot(ldl))
    return result


def Liouvillian(gen):
  """Column-stacked superoperator of a LindbladGenerator.

  Raises:
    PropagationError: above MAX_DIM.
  """
  if gen.dim > MAX_DIM:
    raise errors.PropagationError(
        'Hilbert dimension %d exceeds the dense limit of %d; reduce the '
        'number of spins in the register' % (gen.dim, MAX_DIM))
  identity = np.eye(gen.dim)
  h = gen.hamiltonian.matrix
  superoperator = -1j * (np.kron(identity, h) - np.kron(h.T, identity))
  for jump in gen.jumps:
    l = jump.matrix
    ldl = l.conj().T.dot(l)
    superoperator += (np.kron(l.conj(), l) - 0.5 * np.kron(identity, ldl) -
                      0.5 * np.kron(ldl.T, identity))
  return superoperator


class Propagator(object):
  """A superoperator and the time it spans."""

  def __init__(self, matrix, duration):
    matrix = np.array(matrix, dtype=complex)
    matrix.setflags(write=False)
    self.matrix = matrix
    self.duration = duration

  @classmethod
  def FromGenerator(cls, gen, duration):
    return cls(scipy.linalg.expm(Liouvillian(gen) * duration), duration)

  @property
  def dim(self):
    return int(round(np.sqrt(self.matrix.shape[0])))

  def Apply(self, rho):
    return sa.Unvec(self.matrix.dot(sa.Vec(rho)), self.dim)


class ResetSchedule(object):
  """Reset the electron into reset_state every t_reset, n_cycles times."""

  def __init__(self, t_reset, n_cycles=1, reset_state=None):
    if not t_reset > 0:
      raise errors.ModelError('t_reset must be positive')
    if n_cycles < 1:
      raise errors.ModelError('n_cycles must be >= 1')
    if reset_state is None:
      reset_state = sa.DRESSED_MINUS
    self.t_reset = float(t_reset)
    self.n_cycles = int(n_cycles)
    self.reset_state = np.asarray(reset_state, dtype=complex)

  @property
  def duration(self):
    return self.t_reset * self.n_cycles

  def ResetProjector(self):
    return np.outer(self.reset_state, self.reset_state.conj())

  def PostResetState(self, rho_n, layout):
    """The register right after a reset: reset_state kron rho_n."""
    return sa.DensityOperator(
        np.kron(self.ResetProjector(), sa.MatrixOf(rho_n)), layout)


class TimeSeries(object):
  """Sampled states plus named observables on a uniform time grid."""

  def __init__(self, times, states, layout):
    self.times = np.asarray(times, dtype=float)
    self.states = list(states)
    self.layout = layout
    self.observables = collections.OrderedDict()
    self.metadata = collections.OrderedDict()

  def __len__(self):
    return len(self.times)

  def Expectations(self, observable):
    observable = sa.MatrixOf(observable)
    return np.array([
        np.real(np.trace(state.matrix.dot(observable)))
        for state in self.states
    ])

  def Observe(self, name, observable):
    self.observables[name] = self.Expectations(observable)
    return self.observables[name]

  def Diagnostics(self):
    """Worst StateDiagnostics over every sample."""
    diagnostics = [state.Diagnostics() for state in self.states]
    return sa.StateDiagnostics(
        trace_deviation=max(d.trace_deviation for d in diagnostics),
        hermiticity=max(d.hermiticity for d in diagnostics),
        min_eigenvalue=min(d.min_eigenvalue for d in diagnostics))

  def AsTable(self):
    return 'time_ms', self.times * 1e3, self.observables


def _SampleGrid(t, sample_every, step):
  """Return (number of steps, steps per sample) for a run of length t."""
  if t < 0:
    raise errors.PropagationError('propagation time must be >= 0, got %g s' % t)
  steps = int(round(t / step))
  if abs(steps * step - t) > 1e-9 * max(t, step):
    raise errors.PropagationError('duration %g s is not a multiple of the '
                                  'step %g s' % (t, step))
  if sample_every is None:
    return steps, max(steps, 1)
  stride = int(round(sample_every / step))
  if stride < 1 or abs(stride * step - sample_every) > 1e-9 * sample_every:
    raise errors.PropagationError('sampling interval %g s is not a multiple '
                                  'of the step %g s' % (sample_every, step))
  return steps, stride


def _CheckState(rho0, layout):
  if not isinstance(rho0, sa.DensityOperator):
    rho0 = sa.DensityOperator(rho0, layout)
  if rho0.layout != layout:
    raise errors.ModelError('initial state layout %r does not match %r' %
                            (rho0.layout.labels, layout.labels))
  return rho0


def PropagateStatic(gen, rho0, t, sample_every=None):
  """Propagate a time-independent generator.

  Arguments:
    gen: (LindbladGenerator) The generator.
    rho0: (DensityOperator) Initial state on gen.layout.
    t: (float) Duration, s. t = 0 returns rho0 alone.
    sample_every: (float) Sampling interval; t must be a multiple of it.
      Defaults to a single sample at t.

  Returns:
    A TimeSeries whose samples all satisfy the DensityOperator invariants.

  Raises:
    PropagationError: for t < 0 or an incommensurate sampling interval.
    ValidationError: if a sample breaks a state invariant.
  """
  rho0 = _CheckState(rho0, gen.layout)
  if t == 0:
    return TimeSeries([0.0], [rho0], gen.layout)
  step = t if sample_every is None else sample_every
  steps, _ = _SampleGrid(t, sample_every, step)
  propagator = Propagator.FromGenerator(gen, step).matrix
  vector = sa.Vec(rho0.matrix)
  states = [rho0]
  for _ in range(steps):
    vector = propagator.dot(vector)
    states.append(sa.DensityOperator(sa.Unvec(vector, gen.dim), gen.layout))
  return TimeSeries(step * np.arange(steps + 1), states, gen.layout)


class ConstantSource(object):
  """Time-dependent source interface for a constant Hamiltonian."""

  def __init__(self, hamiltonian):
    self.layout = hamiltonian.layout
    self._matrix = np.asarray(hamiltonian.matrix)
    self.max_frequency = float(np.ptp(np.linalg.eigvalsh(self._matrix)))

  def __call__(self, t):
    return self._matrix


def MaxTimeStep(source):
  return 2 * np.pi / (STEPS_PER_PERIOD * source.max_frequency)


def PropagateTimeDependent(source, rho0, t, dt, jumps=(), sample_every=None):
  """Fourth-order Runge-Kutta propagation with H(t) from source.

  Arguments:
    source: callable t -> matrix with .layout and .max_frequency.
    rho0: (DensityOperator) Initial state.
    t: (float) Duration, s; a multiple of dt.
    dt: (float) Step, at most 2 pi / (50 max_frequency).
    jumps: (list of Operator) Optional time-independent jump operators.
    sample_every: (float) Sampling interval, a multiple of dt.

  Returns:
    A TimeSeries; states are recorded without positivity checks, the trace
    drift is checked at the end.

  Raises:
    PropagationError: if dt is too coarse.
    ValidationError: if the trace drifts by more than 1e-8.
  """
  rho0 = _CheckState(rho0, source.layout)
  limit = MaxTimeStep(source) if source.max_frequency else float('inf')
  if dt > limit * (1 + 1e-9):
    raise errors.PropagationError(
        'dt = %.4e s is too coarse; the fastest frequency %.4e rad/s needs '
        'dt <= %.4e s' % (dt, source.max_frequency, limit))
  steps, stride = _SampleGrid(t, sample_every, dt)
  dissipators = [(l.matrix, l.matrix.conj().T,
                  l.matrix.conj().T.dot(l.matrix)) for l in jumps]

  def Derivative(time, rho):
    h = source(time)
    result = -1j * (h.dot(rho) - rho.dot(h))
    for l, l_dagger, ldl in dissipators:
      result += l.dot(rho).dot(l_dagger) - 0.5 * (ldl.dot(rho) + rho.dot(ldl))
    return result

  rho = np.array(rho0.matrix)
  times = [0.0]
  states = [rho0]
  for n in range(steps):
    time = n * dt
    k1 = Derivative(time, rho)
    k2 = Derivative(time + dt / 2, rho + dt / 2 * k1)
    k3 = Derivative(time + dt / 2, rho + dt / 2 * k2)
    k4 = Derivative(time + dt, rho + dt * k3)
    rho = rho + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    if (n + 1) % stride == 0:
      times.append((n + 1) * dt)
      states.append(sa.DensityOperator(rho, source.layout, validate=False))
  drift = abs(np.trace(rho) - 1)
  if drift > TRACE_DRIFT_TOLERANCE:
    raise errors.ValidationError('trace drifted by %.3e during time-dependent '
                                 'propagation' % drift)
  return TimeSeries(times, states, source.layout)


def _ResetEmbedding(reset_projector, nuclear_dim):
  """Matrix of vec(rho_n) -> vec(reset_projector kron rho_n)."""
  electron_dim = reset_projector.shape[0]
  dim = electron_dim * nuclear_dim
  identity = np.eye(nuclear_dim)
  tensor = np.einsum('ab,ik,jl->aibjkl', reset_projector, identity, identity)
  return tensor.reshape(dim, dim, nuclear_dim, nuclear_dim).reshape(
      dim * dim, nuclear_dim * nuclear_dim, order='F')


def _TraceElectron(columns, electron_dim, nuclear_dim):
  """Apply vec(rho) -> vec(Tr_e rho) to every column."""
  dim = electron_dim * nuclear_dim
  count = columns.shape[1]
  tensor = columns.reshape(dim, dim, count, order='F').reshape(
      electron_dim, nuclear_dim, electron_dim, nuclear_dim, count)
  return np.einsum('aiajk->ijk', tensor).reshape(
      nuclear_dim * nuclear_dim, count, order='F')


def SegmentMaps(gen, schedule, substeps=1):
  """Nuclear transfer matrices after k/substeps of a reset period.

  Returns a list of `substeps` matrices; the last one maps vec(rho_n) at the
  start of a cycle to vec(rho_n) at its end, just before the next reset.
  """
  layout = gen.layout
  if not layout.HasElectron():
    raise errors.ModelError('reset evolution needs the electron in slot 0')
  electron_dim = layout.dims[0]
  nuclear_dim = layout.total_dim // electron_dim
  if schedule.reset_state.shape[0] != electron_dim:
    raise errors.ModelError('reset state does not match the electron')
  step = Propagator.FromGenerator(gen, schedule.t_reset / substeps).matrix
  columns = _ResetEmbedding(schedule.ResetProjector(), nuclear_dim)
  maps = []
  for _ in range(substeps):
    columns = step.dot(columns)
    maps.append(_TraceElectron(columns, electron_dim, nuclear_dim))
  return maps


def ResetEvolve(gen,
                rho_n0,
                schedule,
                sample_every=None,
                recompute_each_cycle=False):
  """Periodic-reset evolution of the nuclei.

  Each cycle evolves reset_state kron rho_n under gen for t_reset, then
  traces out the electron. The segment map is computed once.

  Arguments:
    gen: (LindbladGenerator) Full-register generator, electron in slot 0.
    rho_n0: (DensityOperator) Initial nuclear state.
    schedule: (ResetSchedule) Reset period, cycle count and reset state.
    sample_every: (float) A multiple of t_reset, or t_reset/m to sample inside
      segments. Defaults to every cycle boundary.
    recompute_each_cycle: (bool) Rebuild the segment map every cycle.

  Returns:
    A TimeSeries of nuclear states.

  Raises:
    PropagationError: without a schedule or with an incommensurate interval.
  """
  if schedule is None:
    raise errors.PropagationError('reset evolution needs a reset schedule')
  nuclear_layout = gen.layout.Restrict(range(1, len(gen.layout)))
  rho_n0 = _CheckState(rho_n0, nuclear_layout)
  t_reset = schedule.t_reset
  substeps, stride = 1, 1
  if sample_every is not None:
    if sample_every < t_reset * (1 - 1e-9):
      substeps = int(round(t_reset / sample_every))
      if abs(substeps * sample_every - t_reset) > 1e-9 * t_reset:
        raise errors.PropagationError('t_reset %g s is not a multiple of the '
                                      'sampling interval %g s' %
                                      (t_reset, sample_every))
    else:
      _, stride = _SampleGrid(schedule.duration, sample_every, t_reset)
  maps = SegmentMaps(gen, schedule, substeps)
  nuclear_dim = nuclear_layout.total_dim
  vector = sa.Vec(rho_n0.matrix)
  times = [0.0]
  states = [rho_n0]
  for cycle in range(schedule.n_cycles):
    if recompute_each_cycle and cycle:
      maps = SegmentMaps(gen, schedule, substeps)
    start = cycle * t_reset
    for k in range(substeps - 1):
      times.append(start + (k + 1) * t_reset / substeps)
      states.append(
          sa.DensityOperator(
              sa.Unvec(maps[k].dot(vector), nuclear_dim), nuclear_layout))
    vector = maps[-1].dot(vector)
    if (cycle + 1) % stride == 0:
      times.append(start + t_reset)
      states.append(
          sa.DensityOperator(sa.Unvec(vector, nuclear_dim), nuclear_layout))
  return TimeSeries(times, states, nuclear_layout)


def ResetChannel(gen, schedule):
  """Nuclear superoperator of schedule.n_cycles reset cycles."""
  segment = SegmentMaps(gen, schedule)[-1]
  return Propagator(
      np.linalg.matrix_power(segment, schedule.n_cycles), schedule.duration)


def ValidateChannel(prop):
  """Trace preservation, complete positivity and Hermiticity preservation."""
  matrix = sa.MatrixOf(prop)
  choi = sa.ChoiMatrix(matrix)
  trace_deviation = sa.TracePreservationDeviation(matrix)
  min_eigenvalue = float(
      np.linalg.eigvalsh(0.5 * (choi + choi.conj().T))[0])
  return ChannelReport(
      trace_deviation=trace_deviation,
      choi_min_eigenvalue=min_eigenvalue,
      hermiticity_deviation=float(np.max(np.abs(choi - choi.conj().T))),
      completely_positive=min_eigenvalue >= CP_TOLERANCE,
      trace_preserving=trace_deviation <= TP_TOLERANCE)

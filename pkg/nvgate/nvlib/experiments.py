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
"""Numerical experiments on the dissipatively stabilized register.

Every run takes an ExperimentSpec and returns a TimeSeries or a SweepResult.
Sweeps are lists of independent jobs handed to a `mapper` (the serial builtin
by default; the command line passes a process pool) and reassembled in input
order.
"""

import collections
import functools
import itertools
import logging

import numpy as np
import scipy.optimize
import scipy.signal

from nvgate.nvlib import errors
from nvgate.nvlib import model_builder
from nvgate.nvlib import propagation
from nvgate.nvlib import spin_algebra as sa
from nvgate.nvlib import sw_effective

TRANSFER_MODES = ('ideal', 'ideal-effective', 'decay-no-reset', 'reset-exact',
                  'reset-continuous', 'reset-effective')
RESET_MODELS = ('physical', 'augmented')
PIPELINE_MODES = ('ideal', 'reset-exact', 'reset-effective')
ANALYTIC_VARIANTS = ('as-printed', 'secular')

# Flip-flop observables of the gate targets.
TRANSFER_OBSERVABLES = collections.OrderedDict([
    ('P_pm', '+-'),
    ('P_mp', '-+'),
    ('P_pp', '++'),
    ('P_mm', '--'),
])

_KHZ = 2 * np.pi * 1e3

Dip = collections.namedtuple('Dip', ['center', 'depth', 'fwhm', 'index'])
PipelineResult = collections.namedtuple('PipelineResult',
                                        ['final_state', 'record'])
RwaReport = collections.namedtuple('RwaReport', [
    'rwa_fidelity', 'lab_rabi_frequency', 'lab_rabi_error',
    'lab_min_fidelity', 'passed'
])


def _SerialMap(function, jobs):
  return [function(job) for job in jobs]


class ExperimentSpec(object):
  """Everything a run needs.

  Arguments:
    register: (SpinRegister) Spins and the MW drive.
    dissipation: (DissipationSpec) Relaxation, reset period and T_2.
    initial_state: (str) One token per nucleus out of '+-udm'; the electron
      always starts in the reset state |->.
    duration: (float) Run length, s.
    sample_every: (float) Sampling interval, s.
    params: (dict) Experiment-specific settings, see Param().
  """

  def __init__(self,
               register,
               dissipation,
               initial_state=None,
               duration=None,
               sample_every=None,
               params=None):
    self.register = register
    self.dissipation = dissipation
    if initial_state is None:
      initial_state = '+-' + '-' * (register.num_nuclei - 2)
    if len(initial_state) != register.num_nuclei:
      raise errors.ModelError('initial_state %r needs one token per nucleus '
                              '(%d)' % (initial_state, register.num_nuclei))
    self.initial_state = initial_state
    self.duration = duration
    self.sample_every = sample_every
    self.params = dict(params or {})

  @property
  def drive(self):
    return self.register.drive

  def Param(self, name, default=None):
    return self.params.get(name, default)

  def Schedule(self, duration):
    """ResetSchedule covering duration with whole reset periods."""
    t_reset = self.dissipation.t_reset
    if t_reset is None:
      raise errors.ModelError('this run needs a reset period (t_reset)')
    n_cycles = CycleCount(duration, t_reset)
    if n_cycles < 1:
      raise errors.ModelError('duration %g s is shorter than half a reset '
                              'period' % duration)
    return propagation.ResetSchedule(t_reset, n_cycles)

  def Replace(self, **changes):
    values = dict(
        register=self.register,
        dissipation=self.dissipation,
        initial_state=self.initial_state,
        duration=self.duration,
        sample_every=self.sample_every,
        params=self.params)
    values.update(changes)
    return ExperimentSpec(**values)


class SweepResult(object):
  """Swept axis plus equally long named series."""

  def __init__(self, axis_name, axis, metadata=None):
    self.axis_name = axis_name
    self.axis = np.asarray(axis, dtype=float)
    self.series = collections.OrderedDict()
    self.metadata = collections.OrderedDict(metadata or {})

  def __len__(self):
    return len(self.axis)

  def AddSeries(self, name, values):
    values = np.asarray(values, dtype=float)
    if values.shape != self.axis.shape:
      raise errors.ModelError('series %r has %d points; the axis has %d' %
                              (name, values.size, self.axis.size))
    self.series[name] = values
    return values

  def AsTable(self):
    return self.axis_name, self.axis, self.series


def CycleCount(duration, t_reset):
  """Number of whole reset periods closest to duration."""
  if duration < 0:
    raise errors.ModelError('duration must be >= 0')
  return int(round(duration / t_reset))


def NuclearState(spec, tokens=None):
  tokens = spec.initial_state if tokens is None else tokens
  return sa.DensityOperator(
      sa.ProductStateMatrix(tokens), spec.register.nuclear_layout)


def RegisterState(register, rho_n, reset_state=sa.DRESSED_MINUS):
  electron = np.outer(reset_state, reset_state.conj())
  return sa.DensityOperator(
      np.kron(electron, sa.MatrixOf(rho_n)), register.layout)


def PhysicalGenerator(register, dissipation, reset_augmented=False):
  return propagation.LindbladGenerator(
      model_builder.BuildRwaHamiltonian(register),
      model_builder.BuildDissipators(register, dissipation, reset_augmented))


def _ResetGenerator(spec, register=None):
  """Generator used between resets; 'augmented' folds 1/t_re into the rate."""
  register = spec.register if register is None else register
  reset_model = spec.Param('reset_model', 'physical')
  if reset_model not in RESET_MODELS:
    raise errors.ModelError('unknown reset model %r' % (reset_model,))
  return PhysicalGenerator(register, spec.dissipation,
                           reset_augmented=reset_model == 'augmented')


def _TargetProjector(register, tokens):
  """Projector fixing the two gate targets to tokens, others free."""
  pattern = ['*'] * register.num_nuclei
  for index, token in zip(register.TargetPair(), tokens):
    pattern[index] = token
  return sa.ProductProjector(''.join(pattern))


def _ReduceToNuclei(series):
  keep = range(1, len(series.layout))
  states = [sa.PartialTrace(state, keep) for state in series.states]
  return propagation.TimeSeries(series.times, states,
                                series.layout.Restrict(keep))


def _CheckSegment(gen, t_reset):
  """Raise ValidationError unless one reset cycle is a CPTP map."""
  report = propagation.ValidateChannel(
      propagation.ResetChannel(gen, propagation.ResetSchedule(t_reset)))
  if not (report.completely_positive and report.trace_preserving):
    raise errors.ValidationError(
        'reset segment is not CPTP: Choi min eigenvalue %.3e, trace '
        'deviation %.3e' % (report.choi_min_eigenvalue, report.trace_deviation))
  return report


def RunStateTransfer(spec, mode):
  """Flip-flop transfer |+1 -2> -> |-1 +2> of the gate targets.

  Arguments:
    spec: (ExperimentSpec) duration and sample_every set the grid.
    mode: (str) One of TRANSFER_MODES:
      ideal            closed RWA register
      ideal-effective  closed three-body effective Hamiltonian
      decay-no-reset   RWA register with electron relaxation, no resets
      reset-exact      relaxation between resets plus the reset map
      reset-continuous continuous gamma_r channel, no reset map
      reset-effective  effective nuclear master equation

  Returns:
    A TimeSeries of nuclear states with P_pm, P_mp, P_pp and P_mm.

  Raises:
    ModelError: for an unknown mode, or a reset mode without t_reset.
  """
  if mode not in TRANSFER_MODES:
    raise errors.ModelError('unknown transfer mode %r; expected one of %s' %
                            (mode, ', '.join(TRANSFER_MODES)))
  register = spec.register
  dissipation = spec.dissipation
  register.TargetPair()
  if mode.startswith('reset') and dissipation.t_reset is None:
    raise errors.ModelError('mode %s needs a reset period (t_reset)' % mode)
  rho_n = NuclearState(spec)
  duration = spec.duration
  sample_every = spec.sample_every

  if mode == 'reset-exact':
    gen = _ResetGenerator(spec)
    _CheckSegment(gen, dissipation.t_reset)
    series = propagation.ResetEvolve(gen, rho_n, spec.Schedule(duration),
                                     sample_every)
  elif mode == 'reset-effective':
    model = sw_effective.EffectiveNuclearModel(register, dissipation)
    convention = spec.Param('effective_jumps', 'spin-half')
    gen = propagation.LindbladGenerator(model.H_N, model.Jumps(convention))
    series = propagation.PropagateStatic(gen, rho_n, duration, sample_every)
  else:
    if mode == 'ideal':
      gen = propagation.LindbladGenerator(
          model_builder.BuildRwaHamiltonian(register))
    elif mode == 'ideal-effective':
      gen = propagation.LindbladGenerator(
          sw_effective.ThreeBodyHamiltonian(register))
    else:
      gen = PhysicalGenerator(
          register, dissipation, reset_augmented=mode == 'reset-continuous')
    series = _ReduceToNuclei(
        propagation.PropagateStatic(gen, RegisterState(register, rho_n),
                                    duration, sample_every))

  for name, tokens in TRANSFER_OBSERVABLES.items():
    series.Observe(name, _TargetProjector(register, tokens))
  peak = int(np.argmax(series.observables['P_mp']))
  series.metadata['mode'] = mode
  series.metadata['diagnostics'] = series.Diagnostics()._asdict()
  series.metadata['peak_P_mp'] = float(series.observables['P_mp'][peak])
  series.metadata['peak_time_ms'] = float(series.times[peak] * 1e3)
  return series


def RmsDifference(first, second):
  first = np.asarray(first, dtype=float)
  second = np.asarray(second, dtype=float)
  return float(np.sqrt(np.mean((first - second)**2)))


def TargetUnitary(register, model, t):
  """exp(-i H t), H = sum Omega_rf I^x + delta I^z + sign p g'_e I^z_1 I^z_2.

  The ideal gate: the effective Hamiltonian of the two gate targets with the
  nuclear dephasing switched off.
  """
  layout = sa.NuclearLayout(2)
  dims = layout.dims
  hamiltonian = np.zeros((4, 4), dtype=complex)
  for slot, index in enumerate(register.TargetPair()):
    spin = register.spins[index]
    hamiltonian += (spin.DriveRabi() * sa.EmbedMatrix(sa.IX, slot, dims) +
                    spin.Detuning() * sa.EmbedMatrix(sa.IZ, slot, dims))
  hamiltonian += model.channel_sign * model.zz_rate * sa.ProductMatrix(
      {0: sa.IZ, 1: sa.IZ}, dims)
  return sa.Operator(model_builder.ExpmHermitian(hamiltonian, t), layout)


def GateChannel(spec, n_cycles, register=None):
  """Reset-exact superoperator on the two gate targets.

  The targets must be nuclei 0 and 1; any further nuclei start in their
  initial_state tokens and are traced out at the end.
  """
  register = spec.register if register is None else register
  if register.TargetPair() != (0, 1):
    raise errors.ModelError('gate channels need the targets in slots 0 and 1')
  if n_cycles:
    schedule = propagation.ResetSchedule(spec.dissipation.t_reset, n_cycles)
    channel = propagation.ResetChannel(_ResetGenerator(spec, register),
                                       schedule).matrix
  else:
    channel = np.eye(4**register.num_nuclei, dtype=complex)
  if register.num_nuclei == 2:
    return channel
  spectators = sa.ProductStateMatrix(spec.initial_state[2:])
  nuclear_dim = 2**register.num_nuclei
  dims = register.nuclear_layout.dims
  reduced = np.zeros((16, 16), dtype=complex)
  for column in range(16):
    unit = np.zeros(16, dtype=complex)
    unit[column] = 1.0
    full = np.kron(sa.Unvec(unit, 4), spectators)
    evolved = sa.Unvec(channel.dot(sa.Vec(full)), nuclear_dim)
    reduced[:, column] = sa.Vec(sa.PartialTraceMatrix(evolved, dims, [0, 1]))
  return reduced


def PairSpec(spec):
  """spec restricted to its two gate targets."""
  pair = spec.register.TargetPair()
  return spec.Replace(
      register=spec.register.Replace(
          spins=[spec.register.spins[i] for i in pair]),
      dissipation=spec.dissipation.Replace(
          target_t2=[spec.dissipation.T2(i) for i in pair]),
      initial_state=''.join(spec.initial_state[i] for i in pair))


def _GateSetup(spec, gate_time):
  """(model, n_cycles, target unitary) of the calibrated ZZ gate."""
  pair_spec = PairSpec(spec)
  two_spin = pair_spec.register
  model = sw_effective.EffectiveNuclearModel(two_spin, pair_spec.dissipation)
  if gate_time is None:
    gate_time = model.ZzGateTime()
  n_cycles = CycleCount(gate_time, spec.dissipation.t_reset)
  target = TargetUnitary(two_spin, model, n_cycles * spec.dissipation.t_reset)
  return model, n_cycles, target


def GateFidelity(spec, gate_time=None):
  """Choi fidelity of the reset-exact gate against the ideal ZZ gate."""
  _, n_cycles, target = _GateSetup(spec, gate_time)
  return sa.ChoiProcessFidelity(GateChannel(spec, n_cycles), target)


def _FidelityPoint(job):
  spec, n_cycles, target = job
  return 1.0 - sa.ChoiProcessFidelity(GateChannel(spec, n_cycles), target)


def RunFidelityMap(spec, detunings, rabi_errors, gate_time=None,
                   mapper=_SerialMap):
  """Process infidelity over a grid of MW detunings and Rabi errors.

  Arguments:
    spec: (ExperimentSpec) Two-target register with a reset period.
    detunings: (list of float) delta_mw values, rad/s.
    rabi_errors: (list of float) Fractional Rabi errors.
    gate_time: (float) Defaults to the calibrated ZZ gate time pi/(p g'_e).
    mapper: (callable) map(function, jobs) replacement.

  Returns:
    A SweepResult with axis mw_detuning_kHz and columns rabi_error and
    infidelity, detuning-major.
  """
  if not len(detunings) or not len(rabi_errors):
    raise errors.ModelError('the fidelity map needs nonempty grids')
  model, n_cycles, target = _GateSetup(spec, gate_time)
  grid = list(itertools.product(detunings, rabi_errors))
  jobs = []
  for detuning, rabi_error in grid:
    drive = spec.drive.Replace(mw_detuning=detuning, mw_rabi_error=rabi_error)
    jobs.append((spec.Replace(register=spec.register.Replace(drive=drive)),
                 n_cycles, target))
  logging.info('fidelity map: %d points, %d reset cycles', len(jobs), n_cycles)
  infidelity = mapper(_FidelityPoint, jobs)
  result = SweepResult('mw_detuning_kHz',
                       [detuning / _KHZ for detuning, _ in grid])
  result.AddSeries('rabi_error', [rabi_error for _, rabi_error in grid])
  result.AddSeries('infidelity', infidelity)
  result.metadata['gate_time_ms'] = n_cycles * spec.dissipation.t_reset * 1e3
  result.metadata['n_cycles'] = n_cycles
  return result


def AnalyticPopulation(delta, theta, g, t, variant):
  """P_+ of the sensor after time t in the detuned flip-flop picture.

  Arguments:
    delta: (float or array) Splitting Omega_bar_2 - Omega_rf1, rad/s.
    theta: (float or array) Tilt of the detuned drive axis.
    g: (float) p g'_e, rad/s.
    t: (float) Evolution time, s.
    variant: (str) 'as-printed' uses the coupling g cos(theta) against the
      full splitting; 'secular' uses the flip-flop element g cos(theta)/4
      against half the splitting.

  Returns:
    P_+ in [0, 1], a float for scalar inputs.
  """
  if variant not in ANALYTIC_VARIANTS:
    raise errors.ModelError('unknown variant %r' % (variant,))
  coupling = g * np.cos(theta)
  splitting = np.asarray(delta, dtype=float)
  if variant == 'secular':
    coupling = coupling / 4
    splitting = splitting / 2
    phase_scale = 1.0
  else:
    phase_scale = 0.5
  squared = coupling**2 + splitting**2
  safe = np.where(squared > 0, squared, 1.0)
  transfer = np.where(
      squared > 0,
      coupling**2 * np.sin(phase_scale * t * np.sqrt(safe))**2 / safe, 0.0)
  population = np.clip(1.0 - transfer, 0.0, 1.0)
  if np.ndim(population) == 0:
    return float(population)
  return population


def _SensorPopulation(spec, register, duration):
  """P_+ of the sensor after reset-exact evolution of spec's initial state."""
  projector = ['*'] * register.num_nuclei
  projector[register.Sensor()] = '+'
  if CycleCount(duration, spec.dissipation.t_reset) == 0:
    final = NuclearState(spec)
  else:
    schedule = spec.Schedule(duration)
    series = propagation.ResetEvolve(
        _ResetGenerator(spec, register), NuclearState(spec), schedule,
        sample_every=schedule.duration)
    final = series.states[-1]
  return final.Expectation(sa.ProductProjector(''.join(projector)))


def _RfSweepPoint(job):
  spec, register, duration, model = job
  exact = _SensorPopulation(spec, register, duration)
  hamiltonian = model_builder.BuildDetunedEffective(register, model=model)
  series = propagation.PropagateStatic(
      propagation.LindbladGenerator(hamiltonian), NuclearState(spec),
      duration)
  projector = ['*'] * register.num_nuclei
  projector[register.Sensor()] = '+'
  detuned = series.states[-1].Expectation(
      sa.ProductProjector(''.join(projector)))
  return exact, detuned


def RunRfSweep(spec, rf_freqs, duration, mapper=_SerialMap):
  """Sweep the RF frequency of the second target; read P_+ of the first.

  Returns:
    A SweepResult with axis omega_rf2_kHz and columns P_plus_exact,
    P_plus_analytic_secular, P_plus_analytic_printed and P_plus_detuned_model.
  """
  register = spec.register
  sensor, swept = register.TargetPair()
  index = spec.Param('swept_spin', swept)
  model = sw_effective.EffectiveNuclearModel(register, spec.dissipation)
  jobs = []
  deltas = []
  thetas = []
  for rf_freq in rf_freqs:
    point = register.ReplaceSpin(index, rf_freq=rf_freq)
    spin = point.spins[index]
    delta = spin.Detuning()
    deltas.append(
        model_builder.DressedRabi(spin.rf_rabi, delta) -
        register.spins[sensor].DriveRabi())
    thetas.append(model_builder.TiltAngle(spin.rf_rabi, delta))
    jobs.append((spec, point, duration, model))
  logging.info('rf sweep: %d points', len(jobs))
  values = mapper(_RfSweepPoint, jobs)
  result = SweepResult('omega_rf2_kHz', np.asarray(rf_freqs) / _KHZ)
  exact = result.AddSeries('P_plus_exact', [value[0] for value in values])
  secular = result.AddSeries(
      'P_plus_analytic_secular',
      AnalyticPopulation(deltas, thetas, model.zz_rate, duration, 'secular'))
  printed = result.AddSeries(
      'P_plus_analytic_printed',
      AnalyticPopulation(deltas, thetas, model.zz_rate, duration,
                         'as-printed'))
  detuned = result.AddSeries('P_plus_detuned_model',
                             [value[1] for value in values])
  resonance = register.spins[index].ResonantFrequency()
  result.metadata['resonance_kHz'] = resonance / _KHZ
  result.metadata['dip_center_kHz'] = float(result.axis[np.argmin(exact)])
  result.metadata['dip_depth'] = float(1.0 - np.min(exact))
  dips = FindDips(result.axis, exact, min_depth=0.5)
  if dips:
    result.metadata['dip_fwhm_kHz'] = float(dips[0].fwhm)
  result.metadata['max_deviation_secular'] = float(np.max(np.abs(secular -
                                                                 detuned)))
  result.metadata['max_deviation_printed'] = float(np.max(np.abs(printed -
                                                                 detuned)))
  return result


def _SpectatorSpec(spec, delta3):
  """Detune the spectator (nucleus 2) from target 1 by delta3.

  a_par,3 = a_par,2 - 2 delta3; it shares target 1's RF field, so it sits
  delta3 off that field's resonance.
  """
  target = spec.register.spins[1]
  register = spec.register.ReplaceSpin(
      2,
      a_par=target.a_par - 2 * delta3,
      rf_rabi=target.rf_rabi,
      rf_freq=target.rf_freq,
      rf_enabled=target.rf_enabled)
  return spec.Replace(register=register)


def _SelectivityPoint(job):
  spec, n_cycles, target = job
  return sa.ChoiProcessFidelity(GateChannel(spec, n_cycles), target)


def RunSelectivity(spec, delta3s, gate_time=None, mapper=_SerialMap):
  """Gate fidelity of the two targets next to a detuned spectator.

  Arguments:
    spec: (ExperimentSpec) Three nuclei; targets 0 and 1, spectator 2.
    delta3s: (list of float) Spectator detunings, rad/s.
    gate_time: (float) Defaults to the calibrated ZZ gate time.
    mapper: (callable) map(function, jobs) replacement.

  Returns:
    A SweepResult with axis delta3_kHz and columns fidelity and infidelity.
  """
  if spec.register.num_nuclei != 3:
    raise errors.ModelError('selectivity runs need exactly three nuclei')
  _, n_cycles, target = _GateSetup(spec, gate_time)
  jobs = [(_SpectatorSpec(spec, delta3), n_cycles, target)
          for delta3 in delta3s]
  fidelity = np.asarray(mapper(_SelectivityPoint, jobs))
  result = SweepResult('delta3_kHz', np.asarray(delta3s) / _KHZ)
  result.AddSeries('fidelity', fidelity)
  result.AddSeries('infidelity', 1.0 - fidelity)
  result.metadata['two_spin_fidelity'] = sa.ChoiProcessFidelity(
      GateChannel(PairSpec(spec), n_cycles), target)
  result.metadata['n_cycles'] = n_cycles
  return result


def _SensingSpec(spec, target_state):
  tokens = []
  sensor = spec.register.Sensor()
  for i in range(spec.register.num_nuclei):
    if i == sensor:
      tokens.append('+')
    elif target_state == 'polarized':
      tokens.append('-')
    else:
      tokens.append('m')
  return spec.Replace(initial_state=''.join(tokens))


def _SensingPoint(job):
  spec, register, duration = job
  return _SensorPopulation(spec, register, duration)


def RunSensing(spec, rf_freqs, duration, mapper=_SerialMap):
  """Sweep one RF field over every non-sensor nucleus; read the sensor.

  The sensor starts in |+>, targets are maximally mixed unless
  params['target_state'] is 'polarized'. Dephasing follows target_t2.

  Returns:
    A SweepResult with axis omega_rf_kHz and columns offset_kHz and P_plus;
    metadata lists the detected dips.
  """
  register = spec.register
  sensor = register.Sensor()
  target_state = spec.Param('target_state', 'mixed')
  if target_state not in ('mixed', 'polarized'):
    raise errors.ModelError('target_state must be mixed or polarized')
  spec = _SensingSpec(spec, target_state)
  others = [i for i in range(register.num_nuclei) if i != sensor]
  if not others:
    raise errors.ModelError('sensing needs at least one target nucleus')
  jobs = []
  for rf_freq in rf_freqs:
    point = register
    for index in others:
      point = point.ReplaceSpin(index, rf_freq=rf_freq)
    jobs.append((spec, point, duration))
  logging.info('sensing sweep: %d points at dimension %d', len(jobs),
               register.layout.total_dim)
  population = mapper(_SensingPoint, jobs)
  reference = spec.Param('reference_larmor', register.spins[others[0]].larmor)
  axis = np.asarray(rf_freqs) / _KHZ
  result = SweepResult('omega_rf_kHz', axis)
  offsets = result.AddSeries('offset_kHz', axis - reference / _KHZ)
  result.AddSeries('P_plus', population)
  dips = FindDips(offsets, population, min_depth=spec.Param('min_depth', 0.1))
  result.metadata['dips'] = [dip._asdict() for dip in dips]
  result.metadata['expected_offsets_kHz'] = sorted(
      set(register.spins[i].a_par / 2 / _KHZ for i in others))
  return result


def FindDips(axis, values, min_depth=0.1, baseline=1.0):
  """Local minima deeper than min_depth below baseline.

  Returns:
    A list of Dip(center, depth, fwhm, index) in axis order; fwhm is the full
    width at half the dip's prominence, in axis units, on a uniform axis.
  """
  axis = np.asarray(axis, dtype=float)
  inverted = -np.asarray(values, dtype=float)
  if axis.size < 3:
    return []
  peaks, _ = scipy.signal.find_peaks(
      inverted, height=min_depth - baseline, prominence=min_depth / 2)
  if not len(peaks):
    return []
  widths = scipy.signal.peak_widths(inverted, peaks, rel_height=0.5)[0]
  step = (axis[-1] - axis[0]) / (axis.size - 1)
  return [
      Dip(center=float(axis[peak]),
          depth=float(baseline + inverted[peak]),
          fwhm=float(width * abs(step)),
          index=int(peak)) for peak, width in zip(peaks, widths)
  ]


def _Rotations(thetas, count):
  thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
  if thetas.size == 1:
    thetas = np.repeat(thetas, count)
  if thetas.size != count:
    raise errors.ModelError('expected %d rotation angles, got %d' %
                            (count, thetas.size))
  return functools.reduce(np.kron, [sa.RotationY(theta) for theta in thetas])


def RunGatePipeline(spec,
                    theta_prep,
                    theta_read,
                    gate_time,
                    mode='reset-exact'):
  """Polarize, rotate, run the gate, rotate back and read out.

  Initialization and readout are ideal: the nuclei start in |up ... up>, the
  electron in |->, and the record holds z-basis populations keyed by 'u'/'d'
  strings.

  Arguments:
    spec: (ExperimentSpec) The register and dissipation.
    theta_prep: (float or list) Y rotation angle per nucleus before the gate.
    theta_read: (float or list) Y rotation angle per nucleus before readout.
    gate_time: (float) Gate duration, s; rounded to whole reset periods for
      reset modes.
    mode: (str) One of PIPELINE_MODES.

  Returns:
    PipelineResult(final_state, record).
  """
  if mode not in PIPELINE_MODES:
    raise errors.ModelError('unknown pipeline mode %r' % (mode,))
  register = spec.register
  count = register.num_nuclei
  layout = register.nuclear_layout
  polarized = sa.ProductStateMatrix('u' * count)
  prep = _Rotations(theta_prep, count)
  rho = sa.DensityOperator(prep.dot(polarized).dot(prep.conj().T), layout)
  if gate_time:
    if mode == 'ideal':
      gen = propagation.LindbladGenerator(
          model_builder.BuildRwaHamiltonian(register))
      full = propagation.PropagateStatic(gen, RegisterState(register, rho),
                                         gate_time)
      rho = sa.PartialTrace(full.states[-1], range(1, count + 1))
    elif mode == 'reset-effective':
      model = sw_effective.EffectiveNuclearModel(register, spec.dissipation)
      gen = propagation.LindbladGenerator(
          model.H_N, model.Jumps(spec.Param('effective_jumps', 'spin-half')))
      rho = propagation.PropagateStatic(gen, rho, gate_time).states[-1]
    else:
      schedule = spec.Schedule(gate_time)
      series = propagation.ResetEvolve(
          _ResetGenerator(spec), rho, schedule, sample_every=schedule.duration)
      rho = series.states[-1]
  read = _Rotations(theta_read, count)
  final = sa.DensityOperator(read.dot(rho.matrix).dot(read.conj().T), layout)
  record = collections.OrderedDict()
  for bits in itertools.product('ud', repeat=count):
    label = ''.join(bits)
    record[label] = final.Expectation(sa.ProductStateMatrix(label))
  return PipelineResult(final, record)


def ValidateRwa(spec, duration=200e-6, lab_scale=1e-2, lab_periods=5,
                samples_per_period=40):
  """Check the frame chain lab -> MW frame -> RWA numerically.

  The MW-frame Hamiltonian (full RF drive, cross-talk, a_perp) is integrated
  with Runge-Kutta and rotated into the RWA frame, then compared with the
  static RWA evolution of the same pure initial state. Separately the bare
  spin-1 electron is driven in the lab frame at scaled D and gamma_e B and its
  Rabi frequency is fitted.

  Returns:
    RwaReport; passed requires rwa_fidelity >= 0.99, lab_min_fidelity >= 0.99
    and a Rabi frequency within 1%.
  """
  register = spec.register
  if 'm' in spec.initial_state:
    raise errors.ModelError('RWA validation needs a pure initial state')
  rho_n = NuclearState(spec)
  rho0 = RegisterState(register, rho_n)
  source = model_builder.RfFrameHamiltonian(register)
  steps = int(np.ceil(duration / propagation.MaxTimeStep(source) - 1e-9))
  rotating = propagation.PropagateTimeDependent(source, rho0, duration,
                                                duration / steps)
  frame = model_builder.RwaFrameUnitary(register, duration)
  rotated = sa.DensityOperator(
      frame.conj().T.dot(rotating.states[-1].matrix).dot(frame),
      register.layout,
      validate=False)
  psi0 = np.linalg.eigh(rho0.matrix)[1][:, -1]
  psi = model_builder.ExpmHermitian(
      model_builder.BuildRwaHamiltonian(register).matrix, duration).dot(psi0)
  rwa_fidelity = sa.StateFidelity(rotated, psi / np.linalg.norm(psi))

  lab = model_builder.LabFrameHamiltonian(register, lab_scale,
                                          include_nuclei=False)
  omega = register.drive.effective_rabi
  period = 2 * np.pi / omega
  sample_every = period / samples_per_period
  substeps = int(np.ceil(sample_every / propagation.MaxTimeStep(lab) - 1e-9))
  zero = sa.DensityOperator(np.diag([0, 1, 0]), lab.layout)
  series = propagation.PropagateTimeDependent(
      lab, zero, lab_periods * period, sample_every / substeps,
      sample_every=sample_every)
  populations = []
  fidelities = []
  for t, state in zip(series.times, series.states):
    unitary = lab.MwFrameUnitary(t)
    rho = unitary.conj().T.dot(state.matrix).dot(unitary)
    populations.append(rho[2, 2].real)
    dressed = np.array([0, np.cos(omega * t / 2), -1j * np.sin(omega * t / 2)])
    fidelities.append(np.vdot(dressed, rho.dot(dressed)).real)
  fitted, _ = scipy.optimize.curve_fit(
      lambda t, w, amplitude: amplitude * np.sin(w * t / 2)**2,
      series.times,
      populations,
      p0=(omega, 1.0))
  rabi_error = abs(fitted[0] - omega) / omega
  lab_min_fidelity = float(min(fidelities))
  return RwaReport(
      rwa_fidelity=rwa_fidelity,
      lab_rabi_frequency=float(fitted[0]),
      lab_rabi_error=float(rabi_error),
      lab_min_fidelity=lab_min_fidelity,
      passed=bool(rwa_fidelity >= 0.99 and lab_min_fidelity >= 0.99 and
                  rabi_error <= 0.01))


def EffectiveModelSummary(spec):
  """EffectiveModel scalars plus the transfer time and sensitivity."""
  model = sw_effective.EffectiveNuclearModel(spec.register, spec.dissipation)
  summary = model.Scalars()
  summary['zz_rate'] = model.zz_rate
  summary['transfer_time'] = model.TransferTime()
  sensor = spec.register.spins[model.targets[0]]
  sensitivity = sw_effective.SensitivityEstimate(model, sensor.a_par,
                                                 spec.dissipation.t1rho)
  summary['sensitivity'] = sensitivity.scaled
  summary['sensitivity_proxy'] = sensitivity.proxy
  return model, summary

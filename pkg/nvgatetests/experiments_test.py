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
"""Tests for nvgate.nvlib.experiments."""

import unittest

import numpy as np

from nvgate.nvlib import errors
from nvgate.nvlib import experiments
from nvgate.nvlib import model_builder
from nvgate.nvlib import run_config
from nvgate.nvlib import spin_algebra as sa
from nvgate.nvlib import sw_effective

from nvgatetests import utils

KHZ = utils.KHZ
MHZ = utils.MHZ


def _ThreeSpinSpec():
  register = utils.TwoSpinRegister()
  spins = list(register.spins) + [
      utils.Spin('13Cb', 5.06 * MHZ, 11 * KHZ, role='spectator')
  ]
  return utils.TwoSpinSpec(register.Replace(spins=spins),
                           initial_state='+--')


def _SensingSpec():
  spins = [
      utils.Spin('13C', 5.06 * MHZ, 11 * KHZ, role='sensor'),
      utils.Spin('1Ha', 15.92 * MHZ, 4 * KHZ),
      utils.Spin('1Hb', 15.92 * MHZ, 9 * KHZ),
  ]
  register = model_builder.SpinRegister(spins,
                                        model_builder.DriveSpec(400 * KHZ))
  return utils.TwoSpinSpec(
      register, utils.ResetDissipation(target_t2=(None, 0.2, 0.2)))


class ExperimentSpecTest(unittest.TestCase):

  def testDefaults(self):
    spec = utils.TwoSpinSpec()
    self.assertEqual(spec.initial_state, '+-')
    self.assertEqual(_ThreeSpinSpec().initial_state, '+--')
    self.assertEqual(spec.Param('missing', 3), 3)
    self.assertEqual(spec.drive, spec.register.drive)

  def testRejectsStateOfWrongLength(self):
    with self.assertRaises(errors.ModelError):
      utils.TwoSpinSpec(initial_state='+')

  def testSchedule(self):
    spec = utils.TwoSpinSpec()
    schedule = spec.Schedule(1e-3)
    self.assertEqual(schedule.n_cycles, 50)
    self.assertAlmostEqual(schedule.t_reset, 20e-6)
    with self.assertRaises(errors.ModelError):
      spec.Schedule(5e-6)
    no_reset = spec.Replace(dissipation=model_builder.DissipationSpec(200e-6))
    with self.assertRaises(errors.ModelError):
      no_reset.Schedule(1e-3)

  def testCycleCount(self):
    self.assertEqual(experiments.CycleCount(4.46e-3, 20e-6), 223)
    self.assertEqual(experiments.CycleCount(0.0, 20e-6), 0)
    with self.assertRaises(errors.ModelError):
      experiments.CycleCount(-1.0, 20e-6)


class SweepResultTest(unittest.TestCase):

  def testSeries(self):
    result = experiments.SweepResult('x', [1.0, 2.0, 3.0])
    result.AddSeries('y', [4, 5, 6])
    self.assertEqual(len(result), 3)
    name, axis, series = result.AsTable()
    self.assertEqual(name, 'x')
    self.assertEqual(list(axis), [1.0, 2.0, 3.0])
    self.assertEqual(list(series), ['y'])

  def testRejectsShortSeries(self):
    result = experiments.SweepResult('x', [1.0, 2.0, 3.0])
    with self.assertRaises(errors.ModelError):
      result.AddSeries('y', [4, 5])


class StateTransferTest(unittest.TestCase):

  @classmethod
  def setUpClass(cls):
    cls.spec = utils.TwoSpinSpec(duration=10e-3, sample_every=1e-4)
    cls.runs = dict((mode, experiments.RunStateTransfer(cls.spec, mode))
                    for mode in ('ideal', 'decay-no-reset', 'reset-exact',
                                 'reset-effective'))

  def testObservables(self):
    series = self.runs['ideal']
    self.assertEqual(list(series.observables), ['P_pm', 'P_mp', 'P_pp', 'P_mm'])
    self.assertEqual(len(series), 101)
    self.assertAlmostEqual(series.observables['P_pm'][0], 1.0)
    self.assertEqual(series.layout, sa.NuclearLayout(2))
    self.assertEqual(series.metadata['mode'], 'ideal')

  def testIdealTransfer(self):
    self.assertGreaterEqual(self.runs['ideal'].metadata['peak_P_mp'], 0.99)

  def testRelaxationWithoutResetsStopsTransfer(self):
    self.assertLessEqual(self.runs['decay-no-reset'].metadata['peak_P_mp'],
                         0.65)

  def testResetsRestoreTransfer(self):
    metadata = self.runs['reset-exact'].metadata
    self.assertGreaterEqual(metadata['peak_P_mp'], 0.99)
    self.assertGreater(metadata['peak_time_ms'], 8.0)
    self.assertLess(metadata['peak_time_ms'], 10.0)

  def testEffectiveModelTracksExact(self):
    exact = self.runs['reset-exact']
    effective = self.runs['reset-effective']
    self.assertTrue(np.allclose(exact.times, effective.times))
    self.assertLessEqual(
        experiments.RmsDifference(exact.observables['P_mp'],
                                  effective.observables['P_mp']), 0.05)

  def testPrintedJumpsOverdamp(self):
    exact = self.runs['reset-exact'].observables['P_mp']
    halved = self.runs['reset-effective'].observables['P_mp']
    printed = experiments.RunStateTransfer(
        self.spec.Replace(params={'effective_jumps': 'as-printed'}),
        'reset-effective').observables['P_mp']
    self.assertGreater(
        experiments.RmsDifference(exact, printed),
        experiments.RmsDifference(exact, halved))
    self.assertLess(np.max(printed), np.max(halved))

  def testStatesStayPhysical(self):
    for series in self.runs.values():
      diagnostics = series.Diagnostics()
      self.assertLess(diagnostics.trace_deviation, 1e-8)
      self.assertGreater(diagnostics.min_eigenvalue, -1e-8)

  def testPopulationsSumToOne(self):
    observables = self.runs['reset-exact'].observables
    total = sum(observables[name] for name in experiments.TRANSFER_OBSERVABLES)
    self.assertTrue(np.allclose(total, 1.0))

  def testRejectsUnknownMode(self):
    with self.assertRaises(errors.ModelError):
      experiments.RunStateTransfer(self.spec, 'teleport')

  def testResetModesNeedResetPeriod(self):
    spec = self.spec.Replace(
        dissipation=model_builder.DissipationSpec(200e-6))
    with self.assertRaises(errors.ModelError):
      experiments.RunStateTransfer(spec, 'reset-exact')

  def testAugmentedResetModel(self):
    spec = self.spec.Replace(duration=1e-3, params={'reset_model': 'augmented'})
    series = experiments.RunStateTransfer(spec, 'reset-exact')
    self.assertEqual(len(series), 11)
    with self.assertRaises(errors.ModelError):
      experiments.RunStateTransfer(
          spec.Replace(params={'reset_model': 'stochastic'}), 'reset-exact')


class GateFidelityTest(unittest.TestCase):

  def testTargetUnitaryIsUnitary(self):
    register = utils.TwoSpinRegister()
    model = sw_effective.EffectiveNuclearModel(register,
                                               utils.ResetDissipation())
    target = experiments.TargetUnitary(register, model, model.ZzGateTime())
    product = target.matrix.dot(target.matrix.conj().T)
    self.assertTrue(np.allclose(product, np.eye(4)))

  def testCalibratedGate(self):
    self.assertGreater(experiments.GateFidelity(utils.TwoSpinSpec()), 0.99)

  def testGateChannelNeedsLeadingTargets(self):
    spec = utils.TwoSpinSpec()
    register = spec.register.ReplaceSpin(0, role='none')
    with self.assertRaises(errors.ModelError):
      experiments.GateChannel(spec, 1, register)

  def testZeroCyclesIsIdentity(self):
    channel = experiments.GateChannel(_ThreeSpinSpec(), 0)
    self.assertTrue(np.allclose(channel, np.eye(16)))

  def testFidelityMap(self):
    spec = utils.TwoSpinSpec()
    result = experiments.RunFidelityMap(spec, [0.0, 10 * KHZ], [0.0, 0.05])
    self.assertEqual(result.axis_name, 'mw_detuning_kHz')
    self.assertTrue(np.allclose(result.axis, [0.0, 0.0, 10.0, 10.0]))
    self.assertEqual(list(result.series['rabi_error']), [0.0, 0.05, 0.0, 0.05])
    infidelity = result.series['infidelity']
    self.assertLess(infidelity[0], 0.01)
    self.assertTrue(np.all(infidelity >= -1e-9))
    self.assertTrue(np.all(infidelity <= 1.0))
    self.assertEqual(result.metadata['n_cycles'], 223)

  def testFidelityMapNeedsGrid(self):
    with self.assertRaises(errors.ModelError):
      experiments.RunFidelityMap(utils.TwoSpinSpec(), [], [0.0])


class FidelityMapTest(unittest.TestCase):

  @classmethod
  def setUpClass(cls):
    result = experiments.RunFidelityMap(utils.TwoSpinSpec(),
                                        [-10 * KHZ, 0.0, 10 * KHZ],
                                        [0.0, 0.05])
    cls.infidelity = np.reshape(result.series['infidelity'], (3, 2))

  def testSymmetricInDetuning(self):
    for column in range(2):
      self.assertLess(
          abs(self.infidelity[0, column] - self.infidelity[2, column]), 0.01)

  def testDetuningCostsFidelity(self):
    self.assertGreater(self.infidelity[2, 0], self.infidelity[1, 0])

  def testRabiErrorCost(self):
    # A 5% Rabi error breaks the commensurate MW phase over each reset period.
    cost = self.infidelity[1, 1] - self.infidelity[1, 0]
    self.assertGreater(cost, 0.0)
    self.assertLess(cost, 0.06)


class SelectivityTest(unittest.TestCase):

  DELTAS = (0.0, -3.0, -2.0, -1.0, -0.5, 0.5, 1.0, 2.0, 3.0)

  @classmethod
  def setUpClass(cls):
    cls.result = experiments.RunSelectivity(
        _ThreeSpinSpec(), [delta * KHZ for delta in cls.DELTAS])
    cls.fidelity = dict(zip(cls.DELTAS, cls.result.series['fidelity']))

  def testDetunedSpectatorKeepsGate(self):
    for delta in (-3.0, -2.0, -1.0, 1.0, 2.0, 3.0):
      self.assertGreaterEqual(self.fidelity[delta], 0.95, delta)

  def testDegenerateSpectatorSpoilsGate(self):
    self.assertLess(self.fidelity[0.0], 0.95)

  def testHalfKilohertzSpectatorIsOnlyPartlyResolved(self):
    for delta in (-0.5, 0.5):
      self.assertGreater(self.fidelity[delta], 0.7, delta)
      self.assertLess(self.fidelity[delta], 0.9, delta)
      self.assertGreater(self.fidelity[delta], self.fidelity[0.0])
    self.assertLess(self.fidelity[0.5], self.fidelity[1.0])
    self.assertLess(self.fidelity[-0.5], self.fidelity[-1.0])

  def testStrongerSpectatorCouplingCostsFidelity(self):
    # Negative detunings raise the spectator's a_par and its reset damping.
    self.assertLess(self.fidelity[-3.0], self.fidelity[3.0])
    self.assertLess(self.fidelity[-3.0], self.fidelity[-1.0])
    self.assertLess(self.fidelity[1.0], self.fidelity[3.0])

  def testColumns(self):
    self.assertTrue(np.allclose(self.result.axis, self.DELTAS))
    self.assertTrue(
        np.allclose(self.result.series['infidelity'],
                    1.0 - self.result.series['fidelity']))
    self.assertGreater(self.result.metadata['two_spin_fidelity'], 0.99)

  def testNeedsThreeNuclei(self):
    with self.assertRaises(errors.ModelError):
      experiments.RunSelectivity(utils.TwoSpinSpec(), [0.0])


class AnalyticPopulationTest(unittest.TestCase):

  def testResonantTransfer(self):
    g = 700.0
    t = 2 * np.pi / g
    self.assertAlmostEqual(
        experiments.AnalyticPopulation(0.0, 0.0, g, t, 'secular'), 0.0)
    self.assertAlmostEqual(
        experiments.AnalyticPopulation(0.0, 0.0, g, t / 2, 'as-printed'), 0.0)

  def testFarDetuned(self):
    population = experiments.AnalyticPopulation(1e5, 0.0, 700.0, 1e-2,
                                                'secular')
    self.assertGreater(population, 0.999)

  def testArrays(self):
    population = experiments.AnalyticPopulation([0.0, 1e5], [0.0, 0.0], 700.0,
                                                1e-2, 'as-printed')
    self.assertEqual(population.shape, (2,))
    self.assertTrue(np.all((population >= 0) & (population <= 1)))

  def testRejectsUnknownVariant(self):
    with self.assertRaises(errors.ModelError):
      experiments.AnalyticPopulation(0.0, 0.0, 700.0, 1e-2, 'exact')


class RfSweepTest(unittest.TestCase):

  @classmethod
  def setUpClass(cls):
    spec = utils.TwoSpinSpec()
    cls.resonance = spec.register.spins[1].ResonantFrequency()
    offsets = np.linspace(-2.5, 2.5, 101) * KHZ
    cls.long = experiments.RunRfSweep(spec, cls.resonance + offsets, 8.8e-3)
    cls.short = experiments.RunRfSweep(spec, cls.resonance + offsets, 4.4e-3)
    weak = utils.TwoSpinSpec(utils.TwoSpinRegister(mw_rabi=200 * KHZ))
    cls.weak = experiments.RunRfSweep(weak, cls.resonance + offsets, 4.4e-3)

  def _CentralDip(self, result, min_depth):
    dips = experiments.FindDips(result.axis, result.series['P_plus_exact'],
                                min_depth=min_depth)
    center = self.resonance / KHZ
    return min(dips, key=lambda dip: abs(dip.center - center))

  def testDipAtResonance(self):
    metadata = self.long.metadata
    self.assertAlmostEqual(metadata['resonance_kHz'], self.resonance / KHZ)
    self.assertLess(abs(metadata['dip_center_kHz'] - metadata['resonance_kHz']),
                    0.06)
    self.assertLessEqual(np.min(self.long.series['P_plus_exact']), 0.05)
    self.assertIn('dip_fwhm_kHz', metadata)

  def testLongerEvolutionNarrowsDip(self):
    ratio = (self._CentralDip(self.short, 0.3).fwhm /
             self._CentralDip(self.long, 0.5).fwhm)
    self.assertGreaterEqual(ratio, 1.25)
    self.assertLessEqual(ratio, 1.65)

  def testWeakerDriveWidensDip(self):
    # Detuning enters the dressed RF frequency quadratically, so doubling the
    # ZZ rate widens the dip by sqrt(2).
    weak = self._CentralDip(self.weak, 0.5)
    strong = self._CentralDip(self.long, 0.5)
    self.assertLess(abs(weak.center - strong.center), 0.06)
    self.assertGreaterEqual(weak.fwhm / strong.fwhm, 1.3)
    self.assertLessEqual(weak.fwhm / strong.fwhm, 1.55)

  def testSecularFormulaMatchesDetunedModel(self):
    self.assertLessEqual(self.long.metadata['max_deviation_secular'], 0.02)
    self.assertLessEqual(self.weak.metadata['max_deviation_secular'], 0.025)
    self.assertLess(self.long.metadata['max_deviation_secular'],
                    self.weak.metadata['max_deviation_secular'])

  def testFarDetunedSensorStays(self):
    spec = utils.TwoSpinSpec()
    result = experiments.RunRfSweep(spec, [self.resonance + 8 * KHZ], 8.8e-3)
    self.assertGreaterEqual(result.series['P_plus_exact'][0], 0.98)

  def testColumns(self):
    self.assertEqual(self.long.axis_name, 'omega_rf2_kHz')
    self.assertEqual(list(self.long.series), [
        'P_plus_exact', 'P_plus_analytic_secular', 'P_plus_analytic_printed',
        'P_plus_detuned_model'
    ])


class SensingTest(unittest.TestCase):

  def testDipsAtHalfHyperfine(self):
    spec = _SensingSpec()
    larmor = spec.register.spins[1].larmor
    rf_freqs = larmor + np.linspace(0.0, 6.0, 121) * KHZ
    result = experiments.RunSensing(spec, rf_freqs, 8e-3)
    self.assertTrue(
        np.allclose(result.metadata['expected_offsets_kHz'], [2.0, 4.5]))
    centers = [dip['center'] for dip in result.metadata['dips']]
    self.assertEqual(len(centers), 2)
    self.assertLess(abs(centers[0] - 2.0), 0.2)
    self.assertLess(abs(centers[1] - 4.5), 0.2)
    self.assertTrue(np.all(result.series['P_plus'] <= 1.0 + 1e-9))

  def testPolarizedTargetsDipTwiceAsDeep(self):
    spec = _SensingSpec()
    rf_freqs = spec.register.spins[1].larmor + np.linspace(0.0, 6.0, 121) * KHZ
    mixed = experiments.RunSensing(spec, rf_freqs, 8e-3).metadata['dips']
    polarized = experiments.RunSensing(
        spec.Replace(params={'target_state': 'polarized'}), rf_freqs,
        8e-3).metadata['dips']
    for expected in (2.0, 4.5):
      weak = min(mixed, key=lambda dip: abs(dip['center'] - expected))
      strong = min(polarized, key=lambda dip: abs(dip['center'] - expected))
      self.assertLess(abs(weak['center'] - expected), 0.2)
      self.assertLess(abs(strong['center'] - expected), 0.2)
      self.assertGreater(weak['depth'] / strong['depth'], 0.4)
      self.assertLess(weak['depth'] / strong['depth'], 0.6)

  def testLongerCoherenceDeepensDip(self):
    spec = _SensingSpec()
    rf_freq = spec.register.spins[1].larmor + 4.5 * KHZ
    depths = []
    for t2 in (5e-3, 50e-3, None):
      dissipation = utils.ResetDissipation(target_t2=(None, t2, t2))
      result = experiments.RunSensing(
          spec.Replace(dissipation=dissipation), [rf_freq], 8e-3)
      depths.append(1.0 - result.series['P_plus'][0])
    self.assertLess(depths[0], depths[1])
    self.assertLessEqual(depths[1], depths[2] + 1e-9)
    self.assertGreater(depths[2], 0.4)

  def testProtonSensingPresetShowsThreeDips(self):
    config = run_config.CreateConfig('proton-sensing')
    larmor = config.spec.register.spins[1].larmor
    rf_freqs = larmor + np.linspace(0.0, 6.5, 66) * KHZ
    result = experiments.RunSensing(config.spec, rf_freqs,
                                    config.Get('duration'))
    self.assertTrue(
        np.allclose(result.metadata['expected_offsets_kHz'], [2.0, 4.5, 5.5]))
    centers = [dip['center'] for dip in result.metadata['dips']]
    self.assertEqual(len(centers), 3)
    for center, expected in zip(centers, (2.0, 4.5, 5.5)):
      self.assertLess(abs(center - expected), 0.15)

  def testRejectsUnknownTargetState(self):
    spec = _SensingSpec().Replace(params={'target_state': 'entangled'})
    with self.assertRaises(errors.ModelError):
      experiments.RunSensing(spec, [15.92 * MHZ], 8e-3)


class FindDipsTest(unittest.TestCase):

  def testTwoDips(self):
    axis = np.linspace(0.0, 10.0, 201)
    values = (1.0 - 0.6 * np.exp(-(axis - 3.0)**2 / 0.1) -
              0.3 * np.exp(-(axis - 7.0)**2 / 0.1))
    dips = experiments.FindDips(axis, values, min_depth=0.2)
    self.assertEqual(len(dips), 2)
    self.assertAlmostEqual(dips[0].center, 3.0)
    self.assertAlmostEqual(dips[1].center, 7.0)
    self.assertAlmostEqual(dips[0].depth, 0.6, places=3)
    expected_fwhm = 2 * np.sqrt(0.1 * np.log(2))
    self.assertLess(abs(dips[0].fwhm - expected_fwhm), 0.05)

  def testShallowDipsIgnored(self):
    axis = np.linspace(0.0, 10.0, 201)
    values = 1.0 - 0.05 * np.exp(-(axis - 5.0)**2)
    self.assertEqual(experiments.FindDips(axis, values), [])
    self.assertEqual(experiments.FindDips([0.0, 1.0], [1.0, 0.0]), [])


class GatePipelineTest(unittest.TestCase):

  def testRotationsUndoEachOther(self):
    result = experiments.RunGatePipeline(utils.TwoSpinSpec(),
                                         [np.pi / 2, -np.pi / 2],
                                         [-np.pi / 2, np.pi / 2], 0.0)
    self.assertEqual(list(result.record), ['uu', 'ud', 'du', 'dd'])
    self.assertAlmostEqual(result.record['uu'], 1.0)

  def testTransferReadsOutFlipped(self):
    spec = utils.TwoSpinSpec()
    _, summary = experiments.EffectiveModelSummary(spec)
    result = experiments.RunGatePipeline(spec, [np.pi / 2, -np.pi / 2],
                                         [-np.pi / 2, np.pi / 2],
                                         summary['transfer_time'])
    self.assertGreaterEqual(result.record['dd'], 0.95)
    self.assertAlmostEqual(sum(result.record.values()), 1.0)

  def testTransferMatchesStateTransferRun(self):
    spec = utils.TwoSpinSpec()
    result = experiments.RunGatePipeline(spec, [np.pi / 2, -np.pi / 2],
                                         [-np.pi / 2, np.pi / 2], 4e-3)
    series = experiments.RunStateTransfer(
        spec.Replace(duration=4e-3, sample_every=1e-3), 'reset-exact')
    self.assertLess(abs(result.record['dd'] - series.observables['P_mp'][-1]),
                    1e-9)
    self.assertLess(abs(result.record['uu'] - series.observables['P_pm'][-1]),
                    1e-9)

  def testTransferKeepsParityContrast(self):
    spec = utils.TwoSpinSpec()
    _, summary = experiments.EffectiveModelSummary(spec)
    parity = []
    for read in (-np.pi / 2, np.pi / 2):
      record = experiments.RunGatePipeline(spec, [np.pi / 2, -np.pi / 2],
                                           [read, np.pi / 2],
                                           summary['transfer_time'],
                                           mode='ideal').record
      parity.append(record['uu'] + record['dd'] - record['ud'] - record['du'])
    self.assertGreaterEqual(abs(parity[0] - parity[1]) / 2, 0.98)

  def testRejectsUnknownMode(self):
    with self.assertRaises(errors.ModelError):
      experiments.RunGatePipeline(utils.TwoSpinSpec(), 0.0, 0.0, 0.0,
                                  mode='lab')
    with self.assertRaises(errors.ModelError):
      experiments.RunGatePipeline(utils.TwoSpinSpec(), [0.0] * 3, 0.0, 0.0)


class SummaryTest(unittest.TestCase):

  def testEffectiveModelSummary(self):
    model, summary = experiments.EffectiveModelSummary(utils.TwoSpinSpec())
    self.assertAlmostEqual(summary['zz_rate'], model.zz_rate)
    self.assertGreater(summary['transfer_time'], 8.5e-3)
    self.assertLess(summary['transfer_time'], 9.5e-3)
    self.assertIn('sensitivity', summary)
    self.assertIn('sensitivity_proxy', summary)

  def testValidateRwa(self):
    report = experiments.ValidateRwa(utils.TwoSpinSpec(), duration=200e-6)
    self.assertGreaterEqual(report.rwa_fidelity, 0.999)
    self.assertLess(report.lab_rabi_error, 1e-3)
    self.assertTrue(report.passed)

  def testValidateRwaNeedsPureState(self):
    with self.assertRaises(errors.ModelError):
      experiments.ValidateRwa(utils.TwoSpinSpec(initial_state='+m'))


if __name__ == '__main__':
  unittest.main()

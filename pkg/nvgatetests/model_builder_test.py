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
"""Tests for nvgate.nvlib.model_builder."""

import unittest

import numpy as np

from nvgate.nvlib import errors
from nvgate.nvlib import model_builder
from nvgate.nvlib import spin_algebra as sa
from nvgate.nvlib import sw_effective

from nvgatetests import utils

KHZ = utils.KHZ
MHZ = utils.MHZ


class SpecTest(unittest.TestCase):

  def testResonantRfFrequency(self):
    spin = utils.Spin('13C', 5.06 * MHZ, 11 * KHZ)
    self.assertAlmostEqual(spin.rf_freq / KHZ, 5065.5)
    self.assertEqual(spin.Detuning(), 0.0)
    self.assertTrue(spin.resonant)

  def testDetuningFollowsRfFrequency(self):
    spin = utils.Spin('13C', 5.06 * MHZ, 11 * KHZ)
    detuned = spin.Replace(rf_freq=5066.5 * KHZ)
    self.assertAlmostEqual(detuned.Detuning() / KHZ, -1.0)
    self.assertFalse(detuned.resonant)
    self.assertEqual(detuned.Replace(rf_enabled=False).Detuning(), 0.0)

  def testResonantSpinFollowsHyperfine(self):
    spin = utils.Spin('13C', 5.06 * MHZ, 11 * KHZ).Replace(a_par=9 * KHZ)
    self.assertAlmostEqual(spin.rf_freq / KHZ, 5064.5)

  def testRejectsInvalidSpins(self):
    with self.assertRaises(errors.ModelError):
      utils.Spin('13C', 5.06 * MHZ, 11 * KHZ, rf_rabi=-1.0)
    with self.assertRaises(errors.ModelError):
      utils.Spin('13C', 5.06 * MHZ, 11 * KHZ, role='bystander')
    with self.assertRaises(errors.ModelError):
      utils.Spin('13C', 5.06 * MHZ, 11 * KHZ, rf_freq=5 * MHZ, resonant=True)
    with self.assertRaises(errors.ModelError):
      utils.Spin('13C', 5.06 * MHZ, 11 * KHZ).Replace(spin=1)

  def testDissipationRates(self):
    dissipation = utils.ResetDissipation()
    self.assertAlmostEqual(dissipation.gamma_e, 5000.0)
    self.assertAlmostEqual(dissipation.gamma_r, 55000.0)
    self.assertAlmostEqual(
        model_builder.DissipationSpec(200e-6).gamma_r, 5000.0)

  def testRejectsInvalidDissipation(self):
    with self.assertRaises(errors.ModelError):
      model_builder.DissipationSpec(200e-6, t_reset=2.5e-3)
    with self.assertRaises(errors.ModelError):
      model_builder.DissipationSpec(0.0)
    with self.assertRaises(errors.ModelError):
      model_builder.DissipationSpec(200e-6, target_t2=[-1.0])
    with self.assertRaises(errors.ModelError):
      model_builder.DissipationSpec(200e-6, relaxation='pure')

  def testRabiError(self):
    drive = model_builder.DriveSpec(400 * KHZ, mw_rabi_error=0.05)
    self.assertAlmostEqual(drive.effective_rabi / KHZ, 420.0)


class SpinRegisterTest(unittest.TestCase):

  def testTargets(self):
    register = utils.TwoSpinRegister()
    self.assertEqual(register.TargetPair(), (0, 1))
    self.assertEqual(register.Sensor(), 0)
    self.assertEqual(register.layout.dims, (2, 2, 2))

  def testRejectsEmptyRegister(self):
    with self.assertRaises(errors.ModelError):
      model_builder.SpinRegister([], model_builder.DriveSpec(400 * KHZ))

  def testTargetPairNeedsTwoTargets(self):
    register = utils.TwoSpinRegister().ReplaceSpin(1, role='spectator')
    with self.assertRaises(errors.ModelError):
      register.TargetPair()

  def testValidityRatios(self):
    messages = []
    hyperfine, drive = model_builder.ValidityRatios(
        utils.TwoSpinRegister(), logger=messages.append)
    self.assertAlmostEqual(hyperfine, 11.0 / 400.0)
    self.assertLess(drive, 0.1)
    self.assertEqual(messages, [])
    model_builder.ValidityRatios(
        utils.TwoSpinRegister(mw_rabi=50 * KHZ), logger=messages.append)
    self.assertEqual(len(messages), 1)


class RwaHamiltonianTest(unittest.TestCase):

  def testHermitianOnRegisterLayout(self):
    hamiltonian = model_builder.BuildRwaHamiltonian(utils.TwoSpinRegister())
    self.assertEqual(hamiltonian.layout, sa.RegisterLayout(2))
    self.assertLess(hamiltonian.HermiticityDeviation(), 1e-12)

  def testNuclearZCommutesWithoutRf(self):
    register = utils.TwoSpinRegister()
    for i in range(2):
      register = register.ReplaceSpin(i, rf_rabi=0.0)
    hamiltonian = model_builder.BuildRwaHamiltonian(register).matrix
    for slot in (1, 2):
      iz = sa.EmbedMatrix(sa.IZ, slot, register.layout.dims)
      commutator = hamiltonian.dot(iz) - iz.dot(hamiltonian)
      self.assertLess(np.max(np.abs(commutator)), 1e-9)

  def testSingleNucleusSpectrum(self):
    omega, a_par = 400 * KHZ, 9 * KHZ
    register = model_builder.SpinRegister(
        [utils.Spin('13C', 4 * MHZ, a_par, rf_rabi=0.0)],
        model_builder.DriveSpec(omega))
    energies = np.linalg.eigvalsh(
        model_builder.BuildRwaHamiltonian(register).matrix)
    level = 0.5 * np.sqrt(omega**2 + a_par**2 / 4)
    self.assertTrue(np.allclose(energies, [-level, -level, level, level]))

  def testMwDetuningEntersAsSigmaX(self):
    register = utils.TwoSpinRegister(mw_detuning=10 * KHZ)
    hamiltonian = model_builder.BuildRwaHamiltonian(register).matrix
    reference = model_builder.BuildRwaHamiltonian(
        utils.TwoSpinRegister()).matrix
    difference = hamiltonian - reference
    expected = 10 * KHZ * sa.EmbedMatrix(sa.SIGMA_X, 0, register.layout.dims)
    self.assertTrue(np.allclose(difference, expected))

  def testRejectsUndrivenElectron(self):
    with self.assertRaises(errors.ModelError):
      model_builder.BuildRwaHamiltonian(utils.TwoSpinRegister(mw_rabi=0.0))

  def testRfFrameAveragesToRwa(self):
    register = model_builder.SpinRegister(
        [utils.Spin('13C', 5.06 * MHZ, 11 * KHZ)],
        model_builder.DriveSpec(400 * KHZ))
    source = model_builder.RfFrameHamiltonian(register, crosstalk=False)
    period = 2 * np.pi / register.spins[0].rf_freq
    samples = 16
    average = sum(
        model_builder.ToRwaFrame(register, source(t), t)
        for t in np.arange(samples) * period / samples) / samples
    rwa = model_builder.BuildRwaHamiltonian(register).matrix
    error = np.linalg.norm(average - rwa) / np.linalg.norm(rwa)
    self.assertLess(error, 1e-8)

  def testRfFrameSourceFrequencies(self):
    register = utils.TwoSpinRegister()
    source = model_builder.RfFrameHamiltonian(register)
    self.assertGreaterEqual(source.max_frequency, register.spins[1].rf_freq)
    self.assertLess(
        source.Operator(1e-7).HermiticityDeviation(), 1e-12)
    with self.assertRaises(errors.ModelError):
      model_builder.BuildRfFrameHamiltonian(register, -1.0)


class LabFrameTest(unittest.TestCase):

  def testElectronOnly(self):
    register = utils.TwoSpinRegister()
    lab = model_builder.LabFrameHamiltonian(register, include_nuclei=False)
    self.assertEqual(lab.layout.dims, (3,))
    expected = 1e-2 * 2 * np.pi * (2.87e9 - 1e9)
    self.assertLess(abs(lab.mw_freq - expected) / expected, 1e-12)
    unitary = lab.MwFrameUnitary(1e-6)
    self.assertTrue(np.allclose(unitary.dot(unitary.conj().T), np.eye(3)))

  def testWithNuclei(self):
    lab = model_builder.LabFrameHamiltonian(utils.TwoSpinRegister())
    self.assertEqual(lab.layout.dims, (3, 2, 2))
    self.assertLess(
        model_builder.BuildLabHamiltonian(utils.TwoSpinRegister(),
                                          3e-8).HermiticityDeviation(), 1e-9)

  def testRejectsScale(self):
    with self.assertRaises(errors.ModelError):
      model_builder.LabFrameHamiltonian(utils.TwoSpinRegister(), scale=2.0)


class DetunedEffectiveTest(unittest.TestCase):

  def testDressedAxis(self):
    self.assertAlmostEqual(model_builder.DressedRabi(3.0, 4.0), 5.0)
    self.assertEqual(model_builder.TiltAngle(1.0, 0.0), 0.0)
    self.assertAlmostEqual(model_builder.TiltAngle(1.0, 1.0), np.pi / 4)

  def testResonantLimitIsEffectiveHamiltonian(self):
    register = utils.TwoSpinRegister()
    model = sw_effective.EffectiveNuclearModel(register,
                                               utils.ResetDissipation())
    detuned = model_builder.BuildDetunedEffective(register, model=model)
    self.assertTrue(np.allclose(detuned.matrix, model.H_N.matrix))

  def testRejectsBadInputs(self):
    register = utils.TwoSpinRegister()
    with self.assertRaises(errors.ModelError):
      model_builder.BuildDetunedEffective(register)
    model = sw_effective.EffectiveNuclearModel(register,
                                               utils.ResetDissipation())
    with self.assertRaises(errors.ModelError):
      model_builder.BuildDetunedEffective(register, deltas=[0.0], model=model)


class DissipatorTest(unittest.TestCase):

  def testThermalRelaxation(self):
    register = utils.TwoSpinRegister()
    jumps = model_builder.BuildDissipators(register, utils.ResetDissipation())
    self.assertEqual(len(jumps), 2)
    rates = [np.sum(np.abs(jump.matrix)**2) / 4 for jump in jumps]
    self.assertAlmostEqual(rates[0], 2500.0)
    self.assertAlmostEqual(rates[1], 2500.0)

  def testResetAugmentedDecay(self):
    register = utils.TwoSpinRegister()
    dissipation = utils.ResetDissipation(relaxation='decay')
    jumps = model_builder.BuildDissipators(register, dissipation,
                                           reset_augmented=True)
    self.assertEqual(len(jumps), 1)
    self.assertAlmostEqual(np.sum(np.abs(jumps[0].matrix)**2) / 4, 55000.0)
    with self.assertRaises(errors.ModelError):
      model_builder.BuildDissipators(
          register, model_builder.DissipationSpec(200e-6), reset_augmented=True)

  def testDephasing(self):
    register = utils.TwoSpinRegister()
    dissipation = utils.ResetDissipation(target_t2=(0.2, None))
    jumps = model_builder.BuildDissipators(register, dissipation)
    self.assertEqual(len(jumps), 3)
    expected = np.sqrt(2 / 0.2) * sa.EmbedMatrix(sa.IZ, 1, register.layout.dims)
    self.assertTrue(np.allclose(jumps[2].matrix, expected))
    with self.assertRaises(errors.ModelError):
      model_builder.BuildDissipators(
          register, utils.ResetDissipation(target_t2=(0.2, 0.2, 0.2)))


if __name__ == '__main__':
  unittest.main()

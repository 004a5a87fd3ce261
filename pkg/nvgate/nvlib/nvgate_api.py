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
"""Entry points for nvgate.

The main APIs that nvgate exposes to drive a configured run.

  Execute(): run the configured experiment and write its output files.
  RunJobs(): map a function over independent sweep points.

These APIs have some common arguments:

  config: (RunConfig) A validated run configuration, see run_config.
  threads: (int or 'auto') Worker processes; 1 runs serially in this process.
"""

import collections
import datetime
import functools
import logging

import numpy as np

from nvgate.nvlib import errors
from nvgate.nvlib import experiments
from nvgate.nvlib import file_resources
from nvgate.nvlib import sw_effective

TOOL = 'nvgate'

DEFAULT_TRANSFER_MODES = ('ideal', 'reset-exact', 'reset-effective')

_TWO_PI = 2 * np.pi

# Unit of every key-value quantity and whether it is an angular frequency
# (and so also reported in Hz).
_QUANTITY_UNITS = {
    'g_e': ('rad/s', True),
    'g_e_prime': ('rad/s', True),
    'p': ('', False),
    'gamma_r': ('1/s', False),
    'gamma_N': ('1/s', False),
    'validity_ratio': ('', False),
    'zz_rate': ('rad/s', True),
    'transfer_time': ('s', False),
    'sensitivity': ('rad/s^1.5', True),
    'sensitivity_proxy': ('rad/s^1.5', True),
    'rwa_fidelity': ('', False),
    'lab_rabi_frequency': ('rad/s', True),
    'lab_rabi_error': ('', False),
    'lab_min_fidelity': ('', False),
    'passed': ('', False),
    'gate_time': ('s', False),
}


def RunJobs(function, jobs, threads=1):
  """Apply function to every job; results come back in job order.

  Arguments:
    function: a picklable top-level function of one argument.
    jobs: (list) Picklable job arguments.
    threads: (int or 'auto') More than one worker runs the jobs in a process
      pool.

  Returns:
    A list of results aligned with jobs.
  """
  jobs = list(jobs)
  if threads == 'auto' or threads > 1 and len(jobs) > 1:
    import multiprocessing  # pylint: disable=g-import-not-at-top
    import concurrent.futures  # pylint: disable=g-import-not-at-top
    workers = multiprocessing.cpu_count() if threads == 'auto' else threads
    workers = max(1, min(workers, len(jobs)))
    with concurrent.futures.ProcessPoolExecutor(workers) as executor:
      return list(executor.map(function, jobs))
  return [function(job) for job in jobs]


def _TransferJob(job):
  spec, mode = job
  return experiments.RunStateTransfer(spec, mode)


def _RunTransfer(config, mapper):
  modes = config.Get('modes', DEFAULT_TRANSFER_MODES)
  runs = mapper(_TransferJob, [(config.spec, mode) for mode in modes])
  first = runs[0]
  table = experiments.SweepResult('time_ms', first.times * 1e3)
  for mode, series in zip(modes, runs):
    if (len(series.times) != len(first.times) or
        not np.allclose(series.times, first.times)):
      raise errors.ModelError('transfer mode %s is sampled on a different '
                              'time grid than %s' % (mode, modes[0]))
    for name in ('P_pm', 'P_mp'):
      table.AddSeries('%s_%s' % (name, mode), series.observables[name])
    table.metadata[mode] = series.metadata
  by_mode = dict(zip(modes, runs))
  for exact, effective in (('ideal', 'ideal-effective'),
                           ('reset-exact', 'reset-effective')):
    if exact in by_mode and effective in by_mode:
      table.metadata['rms_%s_vs_%s' % (effective, exact)] = (
          experiments.RmsDifference(by_mode[exact].observables['P_mp'],
                                    by_mode[effective].observables['P_mp']))
  return table


def _RunFidelityMap(config, mapper):
  return experiments.RunFidelityMap(
      config.spec,
      config.Get('mw_detuning_grid'),
      config.Get('rabi_error_grid'),
      gate_time=config.Get('gate_time'),
      mapper=mapper)


def _RunRfSweep(config, mapper):
  return experiments.RunRfSweep(
      config.spec, config.Get('rf_grid'), config.Get('duration'), mapper=mapper)


def _RunSelectivity(config, mapper):
  return experiments.RunSelectivity(
      config.spec,
      config.Get('delta3_grid'),
      gate_time=config.Get('gate_time'),
      mapper=mapper)


def _RunSensing(config, mapper):
  return experiments.RunSensing(
      config.spec, config.Get('rf_grid'), config.Get('duration'), mapper=mapper)


def _Row(quantity, value):
  unit, angular = _QUANTITY_UNITS.get(quantity, ('', False))
  return (quantity, float(value), unit, value / _TWO_PI if angular else None)


def _RunPipeline(config, mapper):
  spec = config.spec
  gate_time = config.Get('gate_time')
  if gate_time is None:
    pair = experiments.PairSpec(spec)
    model = sw_effective.EffectiveNuclearModel(pair.register, pair.dissipation)
    gate_time = model.ZzGateTime()
  result = experiments.RunGatePipeline(
      spec,
      config.Get('theta_prep'),
      config.Get('theta_read'),
      gate_time,
      mode=config.Get('pipeline_mode', 'reset-exact'))
  rows = [_Row('gate_time', gate_time)]
  rows.extend(_Row('P_' + label, value)
              for label, value in result.record.items())
  return rows


def _RunEffectiveModel(config, mapper):
  _, summary = experiments.EffectiveModelSummary(config.spec)
  return [_Row(name, value) for name, value in summary.items()]


def _RunValidateRwa(config, mapper):
  report = experiments.ValidateRwa(
      config.spec,
      duration=config.Get('validation_duration', 200e-6),
      lab_scale=config.Get('lab_scale', 1e-2),
      lab_periods=config.Get('lab_periods', 5))
  return [_Row(name, value) for name, value in report._asdict().items()]


_RUNNERS = {
    'transfer': _RunTransfer,
    'fidelity-map': _RunFidelityMap,
    'sweep-rf': _RunRfSweep,
    'selectivity': _RunSelectivity,
    'sense': _RunSensing,
    'pipeline': _RunPipeline,
    'effective-model': _RunEffectiveModel,
    'validate-rwa': _RunValidateRwa,
}


def _EffectiveScalars(spec):
  """EffectiveModel scalars, or None when the run has no reset protocol."""
  try:
    pair = experiments.PairSpec(spec)
    model = sw_effective.EffectiveNuclearModel(pair.register, pair.dissipation)
  except errors.ModelError:
    return None
  return model.Scalars()


def Metadata(config, result=None, version=None):
  """The sidecar record: enough to re-run config exactly."""
  metadata = collections.OrderedDict([
      ('tool', TOOL),
      ('version', version),
      ('experiment', config.experiment),
      ('config', config.raw),
      ('effective_model', _EffectiveScalars(config.spec)),
      ('results', getattr(result, 'metadata', None)),
      ('timestamp', datetime.datetime.now(datetime.timezone.utc).isoformat()),
  ])
  return metadata


def Execute(config, version=None):
  """Run the configured experiment and write its output.

  Arguments:
    config: (RunConfig) The run.
    version: (unicode) Tool version recorded in the sidecar.

  Returns:
    The result: a SweepResult or a list of key-value rows.

  Raises:
    NvGateError: ValidationError when validate-rwa fails its thresholds (the
      report is written first), OutputError on I/O failures, ModelError for
      inconsistent inputs.
  """
  logging.info('running %s from %s', config.experiment, config.source)
  mapper = functools.partial(RunJobs, threads=config.threads)
  result = _RUNNERS[config.experiment](config, mapper)
  if isinstance(result, list):
    file_resources.WriteKeyValueTable(result, config.output, config.format)
  else:
    file_resources.WriteSeries(result, config.output, config.format)
  if config.output is not None:
    path = file_resources.WriteSidecar(config.output,
                                       Metadata(config, result, version))
    logging.info('wrote %s and %s', config.output, path)
  if config.experiment == 'validate-rwa':
    report = dict((row[0], row[1]) for row in result)
    if not report['passed']:
      raise errors.ValidationError(
          'RWA validation failed: state fidelity %.6f, lab Rabi error %.3e, '
          'lab dressed fidelity %.6f' %
          (report['rwa_fidelity'], report['lab_rabi_error'],
           report['lab_min_fidelity']))
  return result

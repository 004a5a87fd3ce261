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
"""Run configuration settings.

A run is described by an INI file with a [run] section, a [drive] section, a
[dissipation] section and one [spin.<name>] section per nucleus, in register
order. Every dimensioned value carries a unit ("400 kHz", "20 us", "90 deg");
frequencies are converted to angular frequency here and nowhere else.
"""

import collections
import configparser
import copy
import json
import math
import os
import re
import textwrap

import numpy as np

from nvgate.nvlib import errors
from nvgate.nvlib import experiments
from nvgate.nvlib import model_builder
from nvgate.nvlib import sw_effective


class RunConfigError(errors.NvGateError):
  """Raised when there's a problem reading the run configuration."""
  exit_code = 2


EXPERIMENTS = ('transfer', 'fidelity-map', 'sweep-rf', 'selectivity', 'sense',
               'pipeline', 'effective-model', 'validate-rwa')
FORMATS = ('csv', 'jsonl')

RUN = 'run'
DRIVE = 'drive'
DISSIPATION = 'dissipation'
SPIN_PREFIX = 'spin.'
BASED_ON = 'based_on'

_FREQUENCY_UNITS = {'hz': 1.0, 'khz': 1e3, 'mhz': 1e6, 'ghz': 1e9}
_TIME_UNITS = {'s': 1.0, 'ms': 1e-3, 'us': 1e-6, u'µs': 1e-6, 'ns': 1e-9}
_ANGLE_UNITS = {'rad': 1.0, 'deg': math.pi / 180}

_QUANTITY = re.compile(r'^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)'
                       r'\s*([^\s\d.+-]\S*)?\s*$')
_RANGE = re.compile(r'^(.+?)\.\.(.+?)/\s*(\d+)\s*$')


def _Quantity(s, units, kind):
  match = _QUANTITY.match(s)
  if not match:
    raise ValueError('expected a number with a %s unit, got %r' % (kind, s))
  number, unit = match.groups()
  if unit is None:
    raise ValueError('%s %r needs a unit suffix (%s)' %
                     (kind, s.strip(), ', '.join(sorted(units))))
  scale = units.get(unit.lower())
  if scale is None:
    raise ValueError('unknown %s unit %r; expected one of %s' %
                     (kind, unit, ', '.join(sorted(units))))
  return float(number) * scale


def _FrequencyConverter(s):
  """Option value converter for a frequency; returns rad/s."""
  return 2 * math.pi * _Quantity(s, _FREQUENCY_UNITS, 'frequency')


def _DurationConverter(s):
  """Option value converter for a duration in s."""
  return _Quantity(s, _TIME_UNITS, 'duration')


def _OptionalConverter(converter, *empty):
  """Converter that maps the words in empty to None."""

  def Convert(s):
    if s.strip().lower() in empty:
      return None
    return converter(s)

  return Convert


def _AngleConverter(s):
  return _Quantity(s, _ANGLE_UNITS, 'angle')


def _FloatConverter(s):
  return float(s)


def _BoolConverter(s):
  """Option value converter for a boolean."""
  try:
    return configparser.ConfigParser.BOOLEAN_STATES[s.strip().lower()]
  except KeyError:
    raise ValueError('expected a boolean, got %r' % (s,))


def _ThreadsConverter(s):
  s = s.strip().lower()
  if s == 'auto':
    return s
  threads = int(s)
  if threads < 1:
    raise ValueError('threads must be >= 1 or "auto"')
  return threads


def _ChoiceConverter(choices):

  def Convert(s):
    s = s.strip().strip('"\'')
    if s not in choices:
      raise ValueError('%r is not one of %s' % (s, ', '.join(choices)))
    return s

  return Convert


def _ListConverter(converter):
  """Option value converter for a comma-separated list."""

  def Convert(s):
    return [converter(part) for part in s.split(',') if part.strip()]

  return Convert


def _GridConverter(converter):
  """Comma list, or 'start .. stop / points' with the unit on either end."""

  def Convert(s):
    match = _RANGE.match(s)
    if not match:
      values = _ListConverter(converter)(s)
      if not values:
        raise ValueError('empty grid')
      return values
    start, stop, points = [part.strip() for part in match.groups()]
    start_match = _QUANTITY.match(start)
    stop_match = _QUANTITY.match(stop)
    if (start_match and stop_match and start_match.group(2) is None and
        stop_match.group(2) is not None):
      start = '%s %s' % (start, stop_match.group(2))
    points = int(points)
    if points < 1:
      raise ValueError('a grid needs at least one point')
    return [float(value) for value in
            np.linspace(converter(start), converter(stop), points)]

  return Convert


def _StateTokensConverter(s):
  s = s.strip().strip('"\'')
  if not s or set(s) - set('+-udm'):
    raise ValueError('state tokens must be drawn from "+-udm", got %r' % (s,))
  return s


# Converters of every recognized option, per section. Spin sections share one
# table.
_RUN_OPTIONS = collections.OrderedDict([
    ('experiment', _ChoiceConverter(EXPERIMENTS)),
    ('output', str),
    ('format', _ChoiceConverter(FORMATS)),
    ('threads', _ThreadsConverter),
    ('duration', _DurationConverter),
    ('sample_every', _DurationConverter),
    ('initial_state', _StateTokensConverter),
    ('modes', _ListConverter(_ChoiceConverter(experiments.TRANSFER_MODES))),
    ('reset_model', _ChoiceConverter(experiments.RESET_MODELS)),
    ('effective_jumps', _ChoiceConverter(sw_effective.JUMP_CONVENTIONS)),
    ('gate_time', _DurationConverter),
    ('theta_prep', _ListConverter(_AngleConverter)),
    ('theta_read', _ListConverter(_AngleConverter)),
    ('pipeline_mode', _ChoiceConverter(experiments.PIPELINE_MODES)),
    ('mw_detuning_grid', _GridConverter(_FrequencyConverter)),
    ('rabi_error_grid', _GridConverter(_FloatConverter)),
    ('rf_grid', _GridConverter(_FrequencyConverter)),
    ('delta3_grid', _GridConverter(_FrequencyConverter)),
    ('target_state', _ChoiceConverter(('mixed', 'polarized'))),
    ('reference_larmor', _FrequencyConverter),
    ('min_depth', _FloatConverter),
    ('validation_duration', _DurationConverter),
    ('lab_scale', _FloatConverter),
    ('lab_periods', int),
])

_DRIVE_OPTIONS = collections.OrderedDict([
    ('mw_rabi', _FrequencyConverter),
    ('mw_detuning', _FrequencyConverter),
    ('mw_rabi_error', _FloatConverter),
    ('zero_field_d', _FrequencyConverter),
    ('electron_zeeman', _FrequencyConverter),
])

_DISSIPATION_OPTIONS = collections.OrderedDict([
    ('t1rho', _DurationConverter),
    ('t_reset', _OptionalConverter(_DurationConverter, 'none')),
    ('relaxation', _ChoiceConverter(model_builder.RELAXATION_MODELS)),
])

_SPIN_OPTIONS = collections.OrderedDict([
    ('label', str),
    ('larmor', _FrequencyConverter),
    ('a_par', _FrequencyConverter),
    ('a_perp', _FrequencyConverter),
    ('rf_rabi', _FrequencyConverter),
    ('rf_freq', _OptionalConverter(_FrequencyConverter, 'resonant')),
    ('rf_enabled', _BoolConverter),
    ('target_t2', _OptionalConverter(_DurationConverter, 'inf', 'none')),
    ('role', _ChoiceConverter(model_builder.ROLES)),
])

_REQUIRED = {
    RUN: ('experiment',),
    DRIVE: ('mw_rabi',),
    DISSIPATION: ('t1rho',),
    SPIN_PREFIX: ('larmor', 'a_par'),
}

# Run options each experiment cannot do without.
_EXPERIMENT_REQUIRES = {
    'transfer': ('duration',),
    'fidelity-map': ('mw_detuning_grid', 'rabi_error_grid'),
    'sweep-rf': ('rf_grid', 'duration'),
    'selectivity': ('delta3_grid',),
    'sense': ('rf_grid', 'duration'),
    'pipeline': ('theta_prep', 'theta_read'),
    'effective-model': (),
    'validate-rwa': (),
}

_OPTION_HELP = collections.OrderedDict([
    (RUN, collections.OrderedDict([
        (BASED_ON, 'Preset whose sections this file overrides: %s.'),
        ('experiment', 'What to run: ' + ', '.join(EXPERIMENTS) + '.'),
        ('output', 'Output path; the sidecar goes to <output>.meta.json.'),
        ('format', 'Output format: csv or jsonl.'),
        ('threads', 'Worker processes for sweeps, or "auto".'),
        ('duration', 'Evolution time of transfer, sweep-rf and sense runs.'),
        ('sample_every', 'Sampling interval of transfer runs.'),
        ('initial_state', textwrap.dedent("""\
            One token per nucleus: + and - along x, u and d along z, m for
            the maximally mixed state.""")),
        ('modes', 'Transfer modes: ' + ', '.join(experiments.TRANSFER_MODES)),
        ('reset_model', textwrap.dedent("""\
            Electron rate between resets: physical (1/T_1rho) or augmented
            (1/T_1rho + 1/t_reset).""")),
        ('effective_jumps', 'Effective jump operator: spin-half (default) '
         'or as-printed.'),
        ('gate_time', 'Gate time; defaults to pi / (p g\'_e).'),
        ('theta_prep', 'Pipeline Y rotation angles before the gate.'),
        ('theta_read', 'Pipeline Y rotation angles before readout.'),
        ('pipeline_mode', 'Pipeline gate engine: ' +
         ', '.join(experiments.PIPELINE_MODES)),
        ('mw_detuning_grid', 'MW detunings of the fidelity map.'),
        ('rabi_error_grid', 'Fractional Rabi errors of the fidelity map.'),
        ('rf_grid', 'RF frequencies of sweep-rf and sense runs.'),
        ('delta3_grid', 'Spectator detunings of selectivity runs.'),
        ('target_state', 'Sensing targets start mixed or polarized.'),
        ('reference_larmor', 'Larmor frequency sensing offsets refer to.'),
        ('min_depth', 'Smallest dip depth reported by sensing runs.'),
        ('validation_duration', 'Length of the RWA validation run.'),
        ('lab_scale', 'Scale factor applied to D and gamma_e B in the '
         'lab-frame check.'),
        ('lab_periods', 'Rabi periods of the lab-frame check.'),
    ])),
    (DRIVE, collections.OrderedDict([
        ('mw_rabi', 'MW Rabi frequency Omega of the dressed electron.'),
        ('mw_detuning', 'MW detuning.'),
        ('mw_rabi_error', 'Fractional Rabi error epsilon.'),
        ('zero_field_d', 'Zero-field splitting D (lab-frame check only).'),
        ('electron_zeeman', 'Electron Zeeman gamma_e B (lab-frame check '
         'only).'),
    ])),
    (DISSIPATION, collections.OrderedDict([
        ('t1rho', 'Dressed-frame electron lifetime T_1rho.'),
        ('t_reset', 'Electron reset period, or none.'),
        ('relaxation', 'Relaxation model: thermal or decay.'),
    ])),
    (SPIN_PREFIX + '<name>', collections.OrderedDict([
        ('label', 'Species label.'),
        ('larmor', 'Nuclear Larmor frequency gamma_n B.'),
        ('a_par', 'Parallel hyperfine coupling.'),
        ('a_perp', 'Perpendicular hyperfine coupling.'),
        ('rf_rabi', 'RF Rabi frequency.'),
        ('rf_freq', 'RF frequency, or resonant for larmor + a_par/2.'),
        ('rf_enabled', 'Whether the RF drive is on.'),
        ('target_t2', 'Nuclear T_2, or inf.'),
        ('role', 'One of ' + ', '.join(model_builder.ROLES) + '.'),
    ])),
])


def Help():
  """Return an OrderedDict mapping sections to {option: help string}."""
  help_table = copy.deepcopy(_OPTION_HELP)
  help_table[RUN][BASED_ON] %= ', '.join(_PRESETS)
  return help_table


def _Sections(*sections):
  return collections.OrderedDict(
      (name, collections.OrderedDict(options)) for name, options in sections)


def CreateTwoSpinGateConfig():
  """Two-spin gate: transfer curves, fidelity map and gate pipeline."""
  return _Sections(
      (RUN, [
          ('experiment', 'transfer'),
          ('duration', '10 ms'),
          ('sample_every', '100 us'),
          ('initial_state', '+-'),
          ('modes', 'ideal, decay-no-reset, reset-exact, reset-effective'),
          ('mw_detuning_grid', '-10 .. 10 kHz / 21'),
          ('rabi_error_grid', '-0.05 .. 0.05 / 11'),
          ('theta_prep', '90 deg, -90 deg'),
          ('theta_read', '-90 deg, 90 deg'),
          ('pipeline_mode', 'reset-exact'),
      ]),
      (DRIVE, [('mw_rabi', '400 kHz')]),
      (DISSIPATION, [
          ('t1rho', '200 us'),
          ('t_reset', '20 us'),
          ('relaxation', 'thermal'),
      ]),
      (SPIN_PREFIX + 'si29', [
          ('label', '29Si'),
          ('larmor', '4 MHz'),
          ('a_par', '9 kHz'),
          ('rf_rabi', '1 kHz'),
      ]),
      (SPIN_PREFIX + 'c13', [
          ('label', '13C'),
          ('larmor', '5.06 MHz'),
          ('a_par', '11 kHz'),
          ('rf_rabi', '1 kHz'),
      ]),
  )


def CreateRfSpectroscopyConfig():
  """RF spectroscopy of the second spin around its resonance."""
  config = CreateTwoSpinGateConfig()
  config[RUN] = collections.OrderedDict([
      ('experiment', 'sweep-rf'),
      ('duration', '8.8 ms'),
      ('initial_state', '+-'),
      ('rf_grid', '5060 .. 5071 kHz / 221'),
  ])
  return config


def CreateSelectivityConfig():
  """Gate selectivity next to a third spin of the second spin's species."""
  config = CreateTwoSpinGateConfig()
  config[RUN] = collections.OrderedDict([
      ('experiment', 'selectivity'),
      ('initial_state', '+--'),
      ('delta3_grid', '-3 .. 3 kHz / 25'),
  ])
  config[SPIN_PREFIX + 'c13b'] = collections.OrderedDict([
      ('label', '13C'),
      ('larmor', '5.06 MHz'),
      ('a_par', '11 kHz'),
      ('rf_rabi', '1 kHz'),
      ('role', 'spectator'),
  ])
  return config


def CreateProtonSensingConfig():
  """A carbon sensor reading out three mixed hydrogen spins."""
  hydrogen = [('label', '1H'), ('larmor', '15.92 MHz'), ('rf_rabi', '1 kHz'),
              ('target_t2', '200 ms')]
  return _Sections(
      (RUN, [
          ('experiment', 'sense'),
          ('duration', '8 ms'),
          ('initial_state', '+mmm'),
          ('target_state', 'mixed'),
          ('rf_grid', '15920 .. 15928 kHz / 161'),
          ('reference_larmor', '15.92 MHz'),
          ('min_depth', '0.1'),
      ]),
      (DRIVE, [('mw_rabi', '400 kHz')]),
      (DISSIPATION, [('t1rho', '200 us'), ('t_reset', '20 us')]),
      (SPIN_PREFIX + 'c13', [
          ('label', '13C'),
          ('larmor', '5.06 MHz'),
          ('a_par', '11 kHz'),
          ('rf_rabi', '1 kHz'),
          ('role', 'sensor'),
      ]),
      (SPIN_PREFIX + 'h1a', hydrogen[:2] + [('a_par', '4 kHz')] + hydrogen[2:]),
      (SPIN_PREFIX + 'h1b', hydrogen[:2] + [('a_par', '9 kHz')] + hydrogen[2:]),
      (SPIN_PREFIX + 'h1c',
       hydrogen[:2] + [('a_par', '11 kHz')] + hydrogen[2:]),
  )


_PRESETS = collections.OrderedDict([
    ('two-spin-gate', CreateTwoSpinGateConfig),
    ('rf-spectroscopy', CreateRfSpectroscopyConfig),
    ('selectivity', CreateSelectivityConfig),
    ('proton-sensing', CreateProtonSensingConfig),
])

# Preset used when the command line names an experiment but no --config.
DEFAULT_PRESETS = {
    'transfer': 'two-spin-gate',
    'fidelity-map': 'two-spin-gate',
    'sweep-rf': 'rf-spectroscopy',
    'selectivity': 'selectivity',
    'sense': 'proton-sensing',
    'pipeline': 'two-spin-gate',
    'effective-model': 'two-spin-gate',
    'validate-rwa': 'two-spin-gate',
}


class RunConfig(object):
  """A validated run.

  Attributes:
    raw: (OrderedDict) The resolved sections exactly as written, in user
      units; enough to rebuild this RunConfig.
    source: (str) Where the sections came from.
    experiment: (str) One of EXPERIMENTS.
    output: (str or None) Output path; None writes to stdout.
    format: (str) 'csv' or 'jsonl'.
    threads: (int or 'auto') Worker processes for sweeps.
    options: (dict) Converted [run] options.
    spec: (ExperimentSpec) The register, dissipation and run parameters.
  """

  def __init__(self, raw, spec, options, source=None):
    self.raw = raw
    self.source = source
    self.spec = spec
    self.options = options
    self.experiment = options['experiment']
    self.output = options.get('output')
    self.format = options.get('format', 'csv')
    self.threads = options.get('threads', 1)

  def Get(self, name, default=None):
    return self.options.get(name, default)

  def __eq__(self, other):
    return isinstance(other, RunConfig) and self.raw == other.raw

  def __ne__(self, other):
    return not self == other


def CreateConfig(config, overrides=None):
  """Create a RunConfig from a preset name, a file name or a sections dict.

  Arguments:
    config: either a preset name (see Help()), or a file name. The file can
      have a based_on setting in [run] naming the preset it derives from.
      A dict of sections is used as is.
    overrides: (dict) {(section, option): value} applied last, as strings.

  Returns:
    A RunConfig.

  Raises:
    RunConfigError: for unknown options, missing options, values without
      units, or values that violate a model invariant.
  """
  lines = {}
  source = None
  if isinstance(config, dict):
    sections = _CopySections(config)
  elif config.lower() in _PRESETS:
    sections = _PRESETS[config.lower()]()
    source = config.lower()
  else:
    sections, lines = _ReadConfigFile(config)
    source = config
  sections = _ResolveBasedOn(sections, lines, source)
  for (section, option), value in sorted((overrides or {}).items()):
    if value is not None:
      sections.setdefault(section, collections.OrderedDict())[option] = str(
          value)
  return _CreateConfigFromSections(sections, lines, source)


def CreateConfigFromSidecar(filename):
  """Rebuild the RunConfig recorded in a <output>.meta.json sidecar."""
  try:
    with open(filename) as fd:
      metadata = json.load(fd, object_pairs_hook=collections.OrderedDict)
  except (IOError, OSError) as e:
    raise RunConfigError('cannot read sidecar "%s": %s' % (filename, e))
  except ValueError as e:
    raise RunConfigError('"%s" is not a JSON sidecar: %s' % (filename, e))
  if 'config' not in metadata:
    raise RunConfigError('sidecar "%s" has no config record' % filename)
  return _CreateConfigFromSections(metadata['config'], {}, filename)


def _CopySections(sections):
  return collections.OrderedDict(
      (str(name), collections.OrderedDict(
          (str(key), str(value)) for key, value in options.items()))
      for name, options in sections.items())


def _ReadConfigFile(filename):
  """Return (sections, {(section, option): line number})."""
  if not os.path.exists(filename):
    raise RunConfigError(
        '"{0}" is not a valid preset or file path'.format(filename))
  with open(filename, encoding='utf-8') as config_file:
    text = config_file.read()
  parser = configparser.ConfigParser(interpolation=None)
  try:
    parser.read_string(text, source=filename)
  except configparser.Error as e:
    raise RunConfigError('cannot parse "%s": %s' % (filename, e))
  sections = collections.OrderedDict(
      (name, collections.OrderedDict(parser.items(name, raw=True)))
      for name in parser.sections())
  return sections, _OptionLines(text)


def _OptionLines(text):
  lines = {}
  section = None
  for number, line in enumerate(text.splitlines(), 1):
    header = re.match(r'^\s*\[([^\]]+)\]', line)
    if header:
      section = header.group(1).strip()
      continue
    option = re.match(r'^([^\s=:#;][^=:]*?)\s*[=:]', line)
    if option and section is not None:
      lines.setdefault((section, option.group(1).strip().lower()), number)
  return lines


def _ResolveBasedOn(sections, lines, source):
  """Merge the file's sections over the preset named by based_on.

  Spin sections are not merged: a file that has any replaces the preset's.
  """
  run = sections.get(RUN, {})
  if BASED_ON not in run:
    return sections
  based_on = run[BASED_ON].strip().lower()
  if based_on not in _PRESETS:
    raise RunConfigError(
        _Location(RUN, BASED_ON, lines, source,
                  'unknown preset %r; expected one of %s' %
                  (based_on, ', '.join(_PRESETS))))
  base = _PRESETS[based_on]()
  if any(name.startswith(SPIN_PREFIX) for name in sections):
    for name in list(base):
      if name.startswith(SPIN_PREFIX):
        del base[name]
  for name, options in sections.items():
    target = base.setdefault(name, collections.OrderedDict())
    for option, value in options.items():
      if option != BASED_ON:
        target[option] = value
  return base


def _Location(section, option, lines, source, message):
  where = ''
  if (section, option) in lines:
    where = ' (%s, line %d)' % (source, lines[(section, option)])
  elif source:
    where = ' (%s)' % source
  return '[%s] %s: %s%s' % (section, option, message, where)


def _ConvertSection(name, options, table, lines, source):
  values = collections.OrderedDict()
  for option, value in options.items():
    option = option.lower()
    if option not in table:
      raise RunConfigError(
          _Location(name, option, lines, source, 'unknown option'))
    try:
      values[option] = table[option](value)
    except ValueError as e:
      raise RunConfigError(_Location(name, option, lines, source, str(e)))
  kind = SPIN_PREFIX if name.startswith(SPIN_PREFIX) else name
  for option in _REQUIRED.get(kind, ()):
    if option not in values:
      raise RunConfigError(
          _Location(name, option, lines, source, 'missing required option'))
  return values


def _CreateConfigFromSections(sections, lines, source):
  """Validate sections and build the RunConfig.

  Raises:
    RunConfigError: see CreateConfig.
  """
  sections = _CopySections(sections)
  tables = {RUN: _RUN_OPTIONS, DRIVE: _DRIVE_OPTIONS,
            DISSIPATION: _DISSIPATION_OPTIONS}
  converted = collections.OrderedDict()
  spins = []
  for name, options in sections.items():
    if name.startswith(SPIN_PREFIX):
      spins.append((name, _ConvertSection(name, options, _SPIN_OPTIONS, lines,
                                          source)))
    elif name in tables:
      converted[name] = _ConvertSection(name, options, tables[name], lines,
                                        source)
    else:
      raise RunConfigError('unknown section [%s]%s' %
                           (name, ' in %s' % source if source else ''))
  for name in (RUN, DRIVE, DISSIPATION):
    if name not in converted:
      raise RunConfigError('missing section [%s]' % name)
  if not spins:
    raise RunConfigError('the configuration defines no [spin.<name>] '
                         'sections')
  run = converted[RUN]
  for option in _EXPERIMENT_REQUIRES[run['experiment']]:
    if option not in run:
      raise RunConfigError(
          _Location(RUN, option, lines, source,
                    'required by experiment %s' % run['experiment']))

  try:
    spec = _BuildSpec(run, converted[DRIVE], converted[DISSIPATION], spins)
  except errors.ModelError as e:
    raise RunConfigError('invalid model%s: %s' %
                         (' in %s' % source if source else '', e))
  return RunConfig(sections, spec, run, source)


_SPEC_PARAMS = ('modes', 'reset_model', 'effective_jumps', 'gate_time',
                'theta_prep', 'theta_read', 'pipeline_mode', 'target_state',
                'reference_larmor', 'min_depth', 'validation_duration',
                'lab_scale', 'lab_periods')


def _BuildSpec(run, drive, dissipation, spins):
  nuclei = []
  target_t2 = []
  for name, values in spins:
    values = dict(values)
    target_t2.append(values.pop('target_t2', None))
    values.setdefault('label', name[len(SPIN_PREFIX):])
    nuclei.append(model_builder.NuclearSpinSpec(**values))
  register = model_builder.SpinRegister(nuclei,
                                        model_builder.DriveSpec(**drive))
  if not any(t2 is not None for t2 in target_t2):
    target_t2 = []
  dissipation = model_builder.DissipationSpec(
      target_t2=target_t2, **dissipation)
  params = dict((name, run[name]) for name in _SPEC_PARAMS if name in run)
  return experiments.ExperimentSpec(
      register,
      dissipation,
      initial_state=run.get('initial_state'),
      duration=run.get('duration'),
      sample_every=run.get('sample_every'),
      params=params)

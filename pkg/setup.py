#!/usr/bin/env python
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

import codecs
import sys
import unittest

from setuptools import setup, Command

import nvgate


class RunTests(Command):
  user_options = []

  def initialize_options(self):
    pass

  def finalize_options(self):
    pass

  def run(self):
    loader = unittest.TestLoader()
    tests = loader.discover(
        'nvgatetests', pattern='*_test.py', top_level_dir='.')
    runner = unittest.TextTestRunner()
    results = runner.run(tests)
    sys.exit(0 if results.wasSuccessful() else 1)


with codecs.open('README.rst', 'r', 'utf-8') as fd:
  setup(
      name='nvgate',
      version=nvgate.__version__,
      description=('Simulator of dissipatively stabilized heteronuclear spin '
                   'gates mediated by a dressed NV electron.'),
      long_description=fd.read(),
      license='Apache License, Version 2.0',
      author='The nvgate Authors',
      packages=['nvgate', 'nvgate.nvlib', 'nvgatetests'],
      python_requires='>=3.6',
      install_requires=[
          'numpy>=1.15',
          'scipy>=1.1',
      ],
      classifiers=[
          'Development Status :: 3 - Alpha',
          'Environment :: Console',
          'Intended Audience :: Science/Research',
          'License :: OSI Approved :: Apache Software License',
          'Operating System :: OS Independent',
          'Programming Language :: Python',
          'Programming Language :: Python :: 3',
          'Programming Language :: Python :: 3.6',
          'Topic :: Scientific/Engineering :: Physics',
      ],
      entry_points={
          'console_scripts': ['nvgate = nvgate:run_main'],
      },
      cmdclass={
          'test': RunTests,
      },
  )

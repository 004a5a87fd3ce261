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
"""Main entry point."""
# pylint: disable=invalid-name
import sys

import nvgate

# The process pool needs the frozen-executable guard on Windows.
if sys.platform.upper().startswith('WIN'):
  import multiprocessing
  multiprocessing.freeze_support()

nvgate.run_main()

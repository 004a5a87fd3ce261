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
"""nvgate error objects."""


class NvGateError(Exception):
  """Parent class for user errors or input errors.

  Exceptions of this type are handled by the command line tool
  and result in clear error messages, as opposed to backtraces.
  """
  exit_code = 1


class ModelError(NvGateError):
  """Raised when physical inputs do not describe a valid model."""
  pass


class PropagationError(NvGateError):
  """Raised when a propagation request cannot be carried out."""
  pass


class ValidationError(NvGateError):
  """Raised when a numerical invariant is violated."""
  exit_code = 3


class OutputError(NvGateError):
  """Raised when results can't be written."""
  exit_code = 4

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
"""Dense operator algebra for spin registers.

A register is a tensor product of small subsystems described by a
HilbertLayout. Operators and density operators pair a dense numpy matrix with
the layout it lives on; the matrix is frozen after construction so values can
be shared between threads and worker processes.

Superoperators use column-stacking vectorization throughout:
vec(A X B) = (B^T kron A) vec(X).
"""

import collections
import functools
import string

import numpy as np

from nvgate.nvlib import errors

# Hamiltonian-role operators.
HERMITIAN_TOLERANCE = 1e-12

# Density operators.
TRACE_TOLERANCE = 1e-9
STATE_HERMITIAN_TOLERANCE = 1e-10
MIN_EIGENVALUE = -1e-9

# Channels handed to the process fidelity.
CHANNEL_TRACE_TOLERANCE = 1e-6
UNITARY_TOLERANCE = 1e-10

ELECTRON = 'e'

# Spin-1/2 operators, eigenvalues +-1/2.
IX = 0.5 * np.array([[0, 1], [1, 0]], dtype=complex)
IY = 0.5 * np.array([[0, -1j], [1j, 0]], dtype=complex)
IZ = 0.5 * np.array([[1, 0], [0, -1]], dtype=complex)
ID2 = np.eye(2, dtype=complex)

UP = np.array([1, 0], dtype=complex)
DOWN = np.array([0, 1], dtype=complex)
X_PLUS = (UP + DOWN) / np.sqrt(2)
X_MINUS = (UP - DOWN) / np.sqrt(2)

# The dressed electron qubit is stored in the basis (|+>, |->), so the dressed
# sigma_z = 1/2(|+><+| - |-><-|) and sigma_x are the spin-1/2 IZ and IX.
DRESSED_PLUS = UP
DRESSED_MINUS = DOWN
SIGMA_Z = IZ
SIGMA_X = IX
LOWER_DRESSED = np.outer(DRESSED_MINUS, DRESSED_PLUS.conj())  # |-><+|
RAISE_DRESSED = np.outer(DRESSED_PLUS, DRESSED_MINUS.conj())  # |+><-|

# Spin-1 operators in the basis (|+1>, |0>, |-1>).
S1X = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=complex) / np.sqrt(2)
S1Z = np.diag([1, 0, -1]).astype(complex)

StateDiagnostics = collections.namedtuple(
    'StateDiagnostics', ['trace_deviation', 'hermiticity', 'min_eigenvalue'])


class HilbertLayout(object):
  """Ordered tensor-product structure of a register.

  Arguments:
    subsystems: (list of (label, dimension)) The factors, in kron order.

  Raises:
    ModelError: if the layout is empty, a dimension is below two, labels
      repeat, or the electron is not the first factor.
  """

  def __init__(self, subsystems):
    subsystems = tuple((str(label), int(dim)) for label, dim in subsystems)
    if not subsystems:
      raise errors.ModelError('a Hilbert layout needs at least one subsystem')
    labels = [label for label, _ in subsystems]
    if len(set(labels)) != len(labels):
      raise errors.ModelError('duplicate subsystem labels in %r' % (labels,))
    for label, dim in subsystems:
      if dim < 2:
        raise errors.ModelError(
            'subsystem %r has dimension %d; at least 2 is required' %
            (label, dim))
    if ELECTRON in labels[1:]:
      raise errors.ModelError('the electron must be subsystem 0')
    self._subsystems = subsystems

  @property
  def subsystems(self):
    return self._subsystems

  @property
  def labels(self):
    return tuple(label for label, _ in self._subsystems)

  @property
  def dims(self):
    return tuple(dim for _, dim in self._subsystems)

  @property
  def total_dim(self):
    return int(np.prod(self.dims))

  def HasElectron(self):
    return self._subsystems[0][0] == ELECTRON

  def Index(self, label):
    try:
      return self.labels.index(label)
    except ValueError:
      raise errors.ModelError('no subsystem labelled %r in %r' %
                              (label, self.labels))

  def Restrict(self, keep):
    """Return the layout of the kept subsystems, in layout order."""
    return HilbertLayout([self._subsystems[i] for i in sorted(keep)])

  def __len__(self):
    return len(self._subsystems)

  def __eq__(self, other):
    return (isinstance(other, HilbertLayout) and
            self._subsystems == other._subsystems)

  def __ne__(self, other):
    return not self == other

  def __hash__(self):
    return hash(self._subsystems)

  def __repr__(self):
    return 'HilbertLayout(%r)' % (list(self._subsystems),)


def RegisterLayout(num_nuclei, electron_dim=2):
  """Layout of the NV electron followed by num_nuclei spin-1/2 nuclei."""
  subsystems = [(ELECTRON, electron_dim)] if electron_dim else []
  subsystems.extend(('n%d' % (i + 1), 2) for i in range(num_nuclei))
  return HilbertLayout(subsystems)


def NuclearLayout(num_nuclei):
  return RegisterLayout(num_nuclei, electron_dim=0)


class Operator(object):
  """A frozen dense matrix on a HilbertLayout."""

  def __init__(self, matrix, layout):
    matrix = np.array(matrix, dtype=complex)
    dim = layout.total_dim
    if matrix.shape != (dim, dim):
      raise errors.ModelError('matrix of shape %s does not match layout '
                              'dimension %d' % (matrix.shape, dim))
    matrix.setflags(write=False)
    self._matrix = matrix
    self._layout = layout

  @property
  def matrix(self):
    return self._matrix

  @property
  def layout(self):
    return self._layout

  def HermiticityDeviation(self):
    return float(np.max(np.abs(self._matrix - self._matrix.conj().T)))

  def CheckHermitian(self, tolerance=HERMITIAN_TOLERANCE, role='Hamiltonian'):
    deviation = self.HermiticityDeviation()
    if deviation > tolerance:
      raise errors.ValidationError(
          '%s is not Hermitian: max |H - H^dagger| = %.3e' % (role, deviation))
    return self

  def Dagger(self):
    return Operator(self._matrix.conj().T, self._layout)

  def __add__(self, other):
    return Operator(self._matrix + MatrixOf(other), self._layout)

  def __sub__(self, other):
    return Operator(self._matrix - MatrixOf(other), self._layout)

  def __mul__(self, scalar):
    return Operator(self._matrix * scalar, self._layout)

  __rmul__ = __mul__

  def __repr__(self):
    return '%s(dim=%d, layout=%r)' % (type(self).__name__,
                                      self._layout.total_dim,
                                      self._layout.labels)


class DensityOperator(Operator):
  """A trace-one, Hermitian, positive semidefinite Operator.

  Arguments:
    matrix: (array) The density matrix.
    layout: (HilbertLayout) Its tensor structure.
    validate: (bool) Check the state invariants on construction.

  Raises:
    ValidationError: if validate is set and an invariant fails.
  """

  def __init__(self, matrix, layout, validate=True):
    super(DensityOperator, self).__init__(matrix, layout)
    if validate:
      self.Validate()

  @classmethod
  def FromPure(cls, psi, layout):
    psi = np.asarray(psi, dtype=complex).ravel()
    return cls(np.outer(psi, psi.conj()), layout)

  def Diagnostics(self):
    matrix = self.matrix
    hermitian = 0.5 * (matrix + matrix.conj().T)
    return StateDiagnostics(
        trace_deviation=float(abs(np.trace(matrix) - 1.0)),
        hermiticity=self.HermiticityDeviation(),
        min_eigenvalue=float(np.linalg.eigvalsh(hermitian)[0]))

  def Validate(self):
    diagnostics = self.Diagnostics()
    if diagnostics.trace_deviation > TRACE_TOLERANCE:
      raise errors.ValidationError('density operator trace deviates from 1 by '
                                   '%.3e' % diagnostics.trace_deviation)
    if diagnostics.hermiticity > STATE_HERMITIAN_TOLERANCE:
      raise errors.ValidationError('density operator is not Hermitian '
                                   '(deviation %.3e)' % diagnostics.hermiticity)
    if diagnostics.min_eigenvalue < MIN_EIGENVALUE:
      raise errors.ValidationError('density operator has eigenvalue %.3e' %
                                   diagnostics.min_eigenvalue)
    return self

  def Purity(self):
    return float(np.real(np.trace(self.matrix.dot(self.matrix))))

  def Expectation(self, observable):
    return float(np.real(np.trace(self.matrix.dot(MatrixOf(observable)))))


def MatrixOf(value):
  return np.asarray(getattr(value, 'matrix', value))


def EmbedMatrix(local_op, slot, dims):
  """Kron local_op into slot of a register with subsystem dimensions dims."""
  local_op = np.asarray(local_op, dtype=complex)
  if not 0 <= slot < len(dims):
    raise errors.ModelError('slot %d is outside a %d-subsystem layout' %
                            (slot, len(dims)))
  if local_op.shape != (dims[slot], dims[slot]):
    raise errors.ModelError(
        'operator of shape %s does not fit slot %d of dimension %d' %
        (local_op.shape, slot, dims[slot]))
  factors = [
      local_op if i == slot else np.eye(dim, dtype=complex)
      for i, dim in enumerate(dims)
  ]
  return functools.reduce(np.kron, factors)


def Embed(local_op, slot, layout):
  """Return identity kron ... kron local_op kron ... kron identity.

  Arguments:
    local_op: (array) Square matrix acting on one subsystem.
    slot: (int) Index of that subsystem in layout.
    layout: (HilbertLayout) The register.

  Returns:
    An Operator on the whole register.

  Raises:
    ModelError: if local_op doesn't match the dimension of slot.
  """
  return Operator(EmbedMatrix(local_op, slot, layout.dims), layout)


def ProductMatrix(local_ops, dims):
  """Kron of {slot: local_op} with identities on the remaining slots."""
  result = np.eye(int(np.prod(dims)), dtype=complex)
  for slot, local_op in local_ops.items():
    result = result.dot(EmbedMatrix(local_op, slot, dims))
  return result


def PartialTraceMatrix(matrix, dims, keep):
  """Trace a dense matrix over every subsystem not listed in keep."""
  keep = sorted(set(keep))
  count = len(dims)
  letters = string.ascii_letters
  rows = letters[:count]
  cols = ''.join(
      letters[count + i] if i in keep else rows[i] for i in range(count))
  kept_rows = ''.join(rows[i] for i in keep)
  kept_cols = ''.join(cols[i] for i in keep)
  tensor = np.asarray(matrix).reshape(tuple(dims) + tuple(dims))
  reduced = np.einsum('%s%s->%s%s' % (rows, cols, kept_rows, kept_cols), tensor)
  kept_dim = int(np.prod([dims[i] for i in keep]))
  return reduced.reshape(kept_dim, kept_dim)


def PartialTrace(rho, keep):
  """Reduce rho to the subsystems in keep.

  Arguments:
    rho: (DensityOperator) The full state.
    keep: (iterable of int) Indices of the subsystems to keep.

  Returns:
    A DensityOperator on rho.layout.Restrict(keep).

  Raises:
    ModelError: if keep is empty or names a missing subsystem.
  """
  keep = sorted(set(keep))
  if not keep:
    raise errors.ModelError('partial trace needs at least one kept subsystem')
  for index in keep:
    if not 0 <= index < len(rho.layout):
      raise errors.ModelError('cannot keep subsystem %d of a %d-subsystem '
                              'layout' % (index, len(rho.layout)))
  matrix = PartialTraceMatrix(rho.matrix, rho.layout.dims, keep)
  return DensityOperator(matrix, rho.layout.Restrict(keep), validate=False)


def StateFidelity(rho, psi):
  """Return <psi|rho|psi>.

  Raises:
    ModelError: on a dimension mismatch or an unnormalized psi.
  """
  psi = np.asarray(psi, dtype=complex).ravel()
  if psi.shape[0] != rho.layout.total_dim:
    raise errors.ModelError('state vector of length %d does not match '
                            'dimension %d' % (psi.shape[0],
                                              rho.layout.total_dim))
  norm = np.vdot(psi, psi).real
  if abs(norm - 1.0) > 1e-10:
    raise errors.ModelError('state vector is not normalized '
                            '(|psi|^2 = %.12f)' % norm)
  overlap = np.vdot(psi, rho.matrix.dot(psi))
  if abs(overlap.imag) > 1e-10:
    raise errors.ValidationError('fidelity has imaginary part %.3e' %
                                 overlap.imag)
  return float(np.clip(overlap.real, 0.0, 1.0))


def Vec(matrix):
  return np.asarray(matrix).reshape(-1, order='F')


def Unvec(vector, dim):
  return np.asarray(vector).reshape(dim, dim, order='F')


def UnitarySuperoperator(unitary):
  """Superoperator of X -> U X U^dagger."""
  unitary = MatrixOf(unitary)
  return np.kron(unitary.conj(), unitary)


def TracePreservationDeviation(superoperator):
  superoperator = np.asarray(superoperator)
  dim = _ChannelDim(superoperator)
  identity = Vec(np.eye(dim))
  return float(np.max(np.abs(identity.dot(superoperator) - identity)))


def ChoiMatrix(superoperator):
  """Return (E kron id)(|Phi><Phi|) for the column-stacked superoperator of E.

  |Phi> is the normalized maximally entangled state sum_i |i>|i>/sqrt(d); the
  system factor comes first.
  """
  superoperator = np.asarray(superoperator, dtype=complex)
  dim = _ChannelDim(superoperator)
  tensor = superoperator.reshape(dim, dim, dim, dim)
  return tensor.transpose(1, 3, 0, 2).reshape(dim * dim, dim * dim) / dim


def MaximallyEntangledState(dim):
  state = np.zeros(dim * dim, dtype=complex)
  state[[i * dim + i for i in range(dim)]] = 1.0 / np.sqrt(dim)
  return state


def ChoiProcessFidelity(channel, target_unitary):
  """Overlap of the Choi state of channel with that of target_unitary.

  Arguments:
    channel: (array or object with .matrix) Column-stacked superoperator.
    target_unitary: (array or Operator) The ideal gate.

  Returns:
    F = <Phi_U| (E kron id)(|Phi><Phi|) |Phi_U>, with |Phi_U> = (U kron 1)|Phi>.

  Raises:
    ModelError: if the shapes disagree or target_unitary isn't unitary.
    ValidationError: if channel isn't trace preserving.
  """
  superoperator = np.asarray(MatrixOf(channel), dtype=complex)
  unitary = np.asarray(MatrixOf(target_unitary), dtype=complex)
  dim = unitary.shape[0]
  if superoperator.shape != (dim * dim, dim * dim):
    raise errors.ModelError('channel of shape %s does not act on dimension %d' %
                            (superoperator.shape, dim))
  unitarity = np.max(np.abs(unitary.conj().T.dot(unitary) - np.eye(dim)))
  if unitarity > UNITARY_TOLERANCE:
    raise errors.ModelError('target is not unitary (deviation %.3e)' %
                            unitarity)
  deviation = TracePreservationDeviation(superoperator)
  if deviation > CHANNEL_TRACE_TOLERANCE:
    raise errors.ValidationError('channel is not trace preserving '
                                 '(deviation %.3e)' % deviation)
  target = np.kron(unitary, np.eye(dim)).dot(MaximallyEntangledState(dim))
  fidelity = np.vdot(target, ChoiMatrix(superoperator).dot(target)).real
  return float(np.clip(fidelity, 0.0, 1.0))


def _ChannelDim(superoperator):
  size = superoperator.shape[0]
  dim = int(round(np.sqrt(size)))
  if superoperator.shape != (size, size) or dim * dim != size:
    raise errors.ModelError('%s is not the shape of a superoperator' %
                            (superoperator.shape,))
  return dim


# Per-nucleus preparation tokens: x basis, z basis and the maximally mixed
# state. '*' is only meaningful in projectors.
_TOKEN_KETS = {'+': X_PLUS, '-': X_MINUS, 'u': UP, 'd': DOWN}


def ProductStateMatrix(tokens):
  """Density matrix of a product of single-nucleus states, one per token."""
  if not tokens:
    raise errors.ModelError('empty state description')
  factors = []
  for token in tokens:
    if token == 'm':
      factors.append(ID2 / 2)
    elif token in _TOKEN_KETS:
      ket = _TOKEN_KETS[token]
      factors.append(np.outer(ket, ket.conj()))
    else:
      raise errors.ModelError('unknown state token %r in %r; expected one of '
                              '"+-udm"' % (token, tokens))
  return functools.reduce(np.kron, factors)


def ProductProjector(tokens):
  """Projector onto a product state; '*' leaves a nucleus unconstrained."""
  factors = []
  for token in tokens:
    if token == '*':
      factors.append(ID2)
    elif token in _TOKEN_KETS:
      ket = _TOKEN_KETS[token]
      factors.append(np.outer(ket, ket.conj()))
    else:
      raise errors.ModelError('unknown projector token %r in %r' %
                              (token, tokens))
  return functools.reduce(np.kron, factors)


def RotationY(theta):
  """exp(-i theta I^y) on one spin-1/2."""
  return np.array([[np.cos(theta / 2), -np.sin(theta / 2)],
                   [np.sin(theta / 2), np.cos(theta / 2)]],
                  dtype=complex)

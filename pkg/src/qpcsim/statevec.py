"""Dense state-vector engine for small registers of labeled qubits.

Qubit ordering is big-endian: the first label is the most significant bit
of the amplitude index, so a ket string reads left-to-right in label order.
States are immutable values; every operation returns a new StateVector.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

EPS_NORM = 1e-10
EPS_ORTH = 1e-10
EPS_UNITARY = 1e-10
MAX_QUBITS = 12

_SQRT2 = np.sqrt(2.0)


class StateVecError(Exception):
    """Base class for state-vector errors."""


class DuplicateLabel(StateVecError):
    pass


class BadPermutation(StateVecError):
    pass


class LabelMismatch(StateVecError):
    pass


class DimensionMismatch(StateVecError):
    pass


class NotUnitary(StateVecError):
    pass


@dataclass(frozen=True)
class StateVector:
    """Normalized pure state over an ordered tuple of uniquely labeled qubits."""

    labels: tuple
    amps: np.ndarray

    def __post_init__(self):
        labels = tuple(self.labels)
        object.__setattr__(self, "labels", labels)
        if len(labels) < 1:
            raise DimensionMismatch("at least one qubit required")
        if len(labels) > MAX_QUBITS:
            raise DimensionMismatch(f"at most {MAX_QUBITS} qubits supported")
        if len(set(labels)) != len(labels):
            raise DuplicateLabel(f"labels are not unique: {labels}")
        amps = np.asarray(self.amps, dtype=np.complex128)
        if amps.shape != (2 ** len(labels),):
            raise DimensionMismatch(
                f"expected {2 ** len(labels)} amplitudes, got {amps.shape}")
        if not np.all(np.isfinite(amps.view(np.float64))):
            raise StateVecError("non-finite amplitude")
        amps = amps.copy()
        amps.flags.writeable = False
        object.__setattr__(self, "amps", amps)

    @property
    def num_qubits(self) -> int:
        return len(self.labels)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def index_of(self, label) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise LabelMismatch(f"no qubit labeled {label!r}") from None

    def dump_json(self, threshold: float = 1e-12) -> str:
        """Debug dump: JSON array of nonzero amplitudes, 17 significant digits."""
        rows = []
        for i, a in enumerate(self.amps):
            if abs(a) > threshold:
                rows.append('{"index": %d, "re": %.17g, "im": %.17g}'
                            % (i, a.real, a.imag))
        return "[" + ", ".join(rows) + "]"


class BellOutcome(enum.Enum):
    """The four Bell measurement results, totally ordered for serialization."""

    PHI_PLUS = "Phi+"
    PHI_MINUS = "Phi-"
    PSI_PLUS = "Psi+"
    PSI_MINUS = "Psi-"

    def __lt__(self, other):
        order = list(BellOutcome)
        return order.index(self) < order.index(other)


_BELL_AMPS = {
    BellOutcome.PHI_PLUS: np.array([1, 0, 0, 1], dtype=np.complex128) / _SQRT2,
    BellOutcome.PHI_MINUS: np.array([1, 0, 0, -1], dtype=np.complex128) / _SQRT2,
    BellOutcome.PSI_PLUS: np.array([0, 1, 1, 0], dtype=np.complex128) / _SQRT2,
    BellOutcome.PSI_MINUS: np.array([0, 1, -1, 0], dtype=np.complex128) / _SQRT2,
}

KET_PLUS = np.array([1, 1], dtype=np.complex128) / _SQRT2
KET_MINUS = np.array([1, -1], dtype=np.complex128) / _SQRT2


def basis_state(bits, labels=None) -> StateVector:
    """Computational basis ket for the given bit list."""
    bits = list(bits)
    if not bits:
        raise DimensionMismatch("bits must be nonempty")
    if labels is None:
        labels = tuple(range(1, len(bits) + 1))
    index = 0
    for b in bits:
        if b not in (0, 1):
            raise StateVecError(f"bit must be 0 or 1, got {b!r}")
        index = (index << 1) | b
    amps = np.zeros(2 ** len(bits), dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(tuple(labels), amps)


def single_qubit_state(which: str, label=1) -> StateVector:
    """One of |0>, |1>, |+>, |-> by name."""
    table = {
        "0": np.array([1, 0], dtype=np.complex128),
        "1": np.array([0, 1], dtype=np.complex128),
        "+": KET_PLUS.copy(),
        "-": KET_MINUS.copy(),
    }
    if which not in table:
        raise StateVecError(f"unknown single-qubit state {which!r}")
    return StateVector((label,), table[which])


def bell_state(kind: BellOutcome, labels=("a", "b")) -> StateVector:
    if not isinstance(kind, BellOutcome):
        kind = BellOutcome(kind)
    return StateVector(tuple(labels), _BELL_AMPS[kind])


def tensor(a: StateVector, b: StateVector) -> StateVector:
    if set(a.labels) & set(b.labels):
        raise DuplicateLabel(
            f"label sets intersect: {set(a.labels) & set(b.labels)}")
    return StateVector(a.labels + b.labels, np.kron(a.amps, b.amps))


def reorder(s: StateVector, new_label_order) -> StateVector:
    """Relabel-preserving permutation of the qubit ordering."""
    new_order = tuple(new_label_order)
    if len(new_order) != len(s.labels) or set(new_order) != set(s.labels):
        raise BadPermutation(
            f"{new_order} is not a permutation of {s.labels}")
    perm = [s.index_of(lab) for lab in new_order]
    amps = s.amps.reshape([2] * s.num_qubits).transpose(perm).reshape(-1)
    return StateVector(new_order, amps)


def inner(a: StateVector, b: StateVector) -> complex:
    if a.labels != b.labels:
        raise LabelMismatch(f"labels differ: {a.labels} vs {b.labels}")
    return complex(np.vdot(a.amps, b.amps))


@dataclass(frozen=True)
class OrthonormalBasis:
    """Orthonormal measurement basis on k qubits; rows of `matrix` are kets."""

    name: str
    matrix: np.ndarray
    names: tuple

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        dim = m.shape[0]
        if m.shape != (dim, dim) or dim & (dim - 1):
            raise DimensionMismatch(f"basis matrix must be square 2^k, got {m.shape}")
        if len(self.names) != dim:
            raise DimensionMismatch("one name per basis vector required")
        gram = m.conj() @ m.T
        if np.max(np.abs(gram - np.eye(dim))) > EPS_ORTH:
            raise StateVecError(f"basis {self.name!r} is not orthonormal")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "names", tuple(self.names))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def num_qubits(self) -> int:
        return self.dim.bit_length() - 1

    def vector(self, index: int) -> np.ndarray:
        return self.matrix[index]


def z_basis(num_qubits: int = 1) -> OrthonormalBasis:
    dim = 2 ** num_qubits
    names = tuple(format(i, f"0{num_qubits}b") for i in range(dim))
    return OrthonormalBasis("Z", np.eye(dim, dtype=np.complex128), names)


def x_basis(num_qubits: int = 1) -> OrthonormalBasis:
    h = np.array([[1, 1], [1, -1]], dtype=np.complex128) / _SQRT2
    m = np.array([[1.0]], dtype=np.complex128)
    for _ in range(num_qubits):
        m = np.kron(m, h)
    names = tuple("".join("+-"[int(c)] for c in format(i, f"0{num_qubits}b"))
                  for i in range(2 ** num_qubits))
    return OrthonormalBasis("X", m, names)


def bell_basis() -> OrthonormalBasis:
    m = np.stack([_BELL_AMPS[k] for k in BellOutcome])
    return OrthonormalBasis("Bell", m, tuple(k.value for k in BellOutcome))


@dataclass(frozen=True)
class MeasurementRecord:
    basis_name: str
    outcome_index: int
    outcome_name: str
    probability: float


def _move_targets_front(s: StateVector, targets):
    rest = [lab for lab in s.labels if lab not in set(targets)]
    return reorder(s, tuple(targets) + tuple(rest))


def outcome_probabilities(s: StateVector, targets, basis: OrthonormalBasis) -> np.ndarray:
    """Born-rule probabilities of each basis outcome on the target qubits."""
    targets = tuple(targets)
    if not targets:
        raise DimensionMismatch("measuring zero targets is rejected")
    if basis.num_qubits != len(targets):
        raise DimensionMismatch(
            f"basis on {basis.num_qubits} qubits, {len(targets)} targets given")
    moved = _move_targets_front(s, targets)
    m = moved.amps.reshape(basis.dim, -1)
    branches = basis.matrix.conj() @ m
    return np.sum(np.abs(branches) ** 2, axis=1)


def measure(s: StateVector, targets, basis: OrthonormalBasis, rng):
    """Projective measurement on a label subset; returns (record, collapsed state).

    The collapsed state keeps all qubits; measured ones are left in the
    observed basis vector. Sampling is restricted to the support, so a
    zero-probability branch is never returned. Global phase is unspecified.
    """
    targets = tuple(targets)
    if not targets:
        raise DimensionMismatch("measuring zero targets is rejected")
    if basis.num_qubits != len(targets):
        raise DimensionMismatch(
            f"basis on {basis.num_qubits} qubits, {len(targets)} targets given")
    moved = _move_targets_front(s, targets)
    m = moved.amps.reshape(basis.dim, -1)
    branches = basis.matrix.conj() @ m
    probs = np.sum(np.abs(branches) ** 2, axis=1)
    total = probs.sum()
    outcome = int(rng.choice(basis.dim, p=probs / total))
    branch = branches[outcome]
    branch = branch / np.linalg.norm(branch)
    collapsed = np.outer(basis.matrix[outcome], branch).reshape(-1)
    post = reorder(StateVector(moved.labels, collapsed), s.labels)
    record = MeasurementRecord(
        basis_name=basis.name,
        outcome_index=outcome,
        outcome_name=basis.names[outcome],
        probability=float(probs[outcome] / total),
    )
    return record, post


def apply_unitary(s: StateVector, u: np.ndarray, targets) -> StateVector:
    """Apply a unitary on the subspace of the target qubits."""
    targets = tuple(targets)
    if not targets:
        raise DimensionMismatch("zero-target unitary is rejected")
    u = np.asarray(u, dtype=np.complex128)
    k = len(targets)
    if u.shape != (2 ** k, 2 ** k):
        raise DimensionMismatch(
            f"unitary of shape {u.shape} does not fit {k} qubits")
    if np.max(np.abs(u.conj().T @ u - np.eye(2 ** k))) > EPS_UNITARY:
        raise NotUnitary("matrix is not unitary within tolerance")
    moved = _move_targets_front(s, targets)
    m = moved.amps.reshape(2 ** k, -1)
    out = u @ m
    return reorder(StateVector(moved.labels, out.reshape(-1)), s.labels)


def states_equal_up_to_phase(a: StateVector, b: StateVector,
                             tol: float = EPS_NORM) -> bool:
    """Physical equality: |<a|b>| = 1 within tolerance."""
    return abs(abs(inner(a, b)) - 1.0) <= tol


PAULI_I = np.eye(2, dtype=np.complex128)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)

"""Dense linear algebra for small multi-qubit systems.

Qubits carry ``(pair_index, side)`` labels with ``side`` in ``{"A", "B"}``.
The shared ordering convention is pair-major with A before B inside each
pair, so qubit ``2*i`` is ``(i, "A")`` and ``2*i + 1`` is ``(i, "B")``.
Index bit order is big-endian: the first label is the most significant bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import CapacityError, LabelCollisionError, ValidationError

Label = tuple[int, str]

MAX_VECTOR_DIM = 2**20
MAX_DENSITY_DIM = 2**12
HERMITIAN_TOL = 1e-10
UNITARY_TOL = 1e-10
EIGEN_FLOOR = -1e-10


def pair_labels(n_pairs: int, start: int = 0) -> tuple[Label, ...]:
    return tuple((p, side) for p in range(start, start + n_pairs) for side in "AB")


def _check_labels(labels: Sequence[Label], dim: int) -> tuple[Label, ...]:
    labels = tuple((int(p), str(s)) for p, s in labels)
    if len(set(labels)) != len(labels):
        raise LabelCollisionError(f"duplicate qubit labels: {labels}")
    for _, side in labels:
        if side not in ("A", "B"):
            raise ValidationError(f"side must be 'A' or 'B', got {side!r}")
    if dim != 2 ** len(labels):
        raise ValidationError(f"dimension {dim} does not match {len(labels)} labels")
    return labels


@dataclass(frozen=True, eq=False)
class StateVector:
    amplitudes: np.ndarray
    qubit_labels: tuple[Label, ...]

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size > MAX_VECTOR_DIM:
            raise CapacityError(f"state dimension {amps.size} exceeds cap {MAX_VECTOR_DIM}")
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "qubit_labels", _check_labels(self.qubit_labels, amps.size))

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @property
    def n_qubits(self) -> int:
        return len(self.qubit_labels)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "StateVector":
        nrm = self.norm()
        if nrm == 0:
            raise ValidationError("cannot normalize the zero vector")
        return StateVector(self.amplitudes / nrm, self.qubit_labels)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Dense density operator.

    Construction does not enforce positivity so that intermediate operators
    (cross terms, unnormalized outputs) can pass through ``partial_trace``.
    Call :meth:`validate` where a physical state is required.
    """

    entries: np.ndarray
    qubit_labels: tuple[Label, ...]

    def __post_init__(self):
        mat = np.asarray(self.entries, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValidationError(f"density matrix must be square, got shape {mat.shape}")
        if mat.shape[0] > MAX_DENSITY_DIM:
            raise CapacityError(
                f"density dimension {mat.shape[0]} exceeds cap {MAX_DENSITY_DIM}"
            )
        object.__setattr__(self, "entries", mat)
        object.__setattr__(self, "qubit_labels", _check_labels(self.qubit_labels, mat.shape[0]))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def n_qubits(self) -> int:
        return len(self.qubit_labels)

    @property
    def trace_value(self) -> float:
        return float(np.real(np.trace(self.entries)))

    def normalized(self) -> "DensityMatrix":
        tr = self.trace_value
        if tr <= 0:
            raise ValidationError("cannot normalize an operator with non-positive trace")
        return DensityMatrix(self.entries / tr, self.qubit_labels)

    def validate(self, normalized: bool = True) -> "DensityMatrix":
        check_hermitian(self.entries)
        lo = np.linalg.eigvalsh(self.entries).min()
        if lo < EIGEN_FLOOR:
            raise ValidationError(f"not positive semidefinite (min eigenvalue {lo:.3e})")
        if normalized and abs(self.trace_value - 1.0) > 1e-10:
            raise ValidationError(f"trace {self.trace_value} is not 1")
        return self


@dataclass(frozen=True)
class Partition:
    a_qubits: frozenset[int]
    b_qubits: frozenset[int]

    def __post_init__(self):
        a, b = frozenset(self.a_qubits), frozenset(self.b_qubits)
        if a & b:
            raise ValidationError(f"qubits {sorted(a & b)} appear on both sides")
        object.__setattr__(self, "a_qubits", a)
        object.__setattr__(self, "b_qubits", b)

    @classmethod
    def from_labels(cls, labels: Sequence[Label]) -> "Partition":
        """The A:B cut implied by the side tags."""
        a = {i for i, (_, s) in enumerate(labels) if s == "A"}
        b = {i for i, (_, s) in enumerate(labels) if s == "B"}
        return cls(frozenset(a), frozenset(b))

    def check_covers(self, n_qubits: int) -> None:
        if self.a_qubits | self.b_qubits != frozenset(range(n_qubits)):
            raise ValidationError("partition does not cover every qubit exactly once")


def check_hermitian(mat: np.ndarray, tol: float = HERMITIAN_TOL) -> None:
    err = np.max(np.abs(mat - mat.conj().T)) if mat.size else 0.0
    if err > tol:
        raise ValidationError(f"matrix is not Hermitian (max deviation {err:.3e})")


def check_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> None:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValidationError(f"unitary must be square, got shape {u.shape}")
    err = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
    if err > tol:
        raise ValidationError(f"matrix is not unitary (max deviation {err:.3e})")


def to_density(state: StateVector) -> DensityMatrix:
    if state.dim > MAX_DENSITY_DIM:
        raise CapacityError(f"density dimension {state.dim} exceeds cap {MAX_DENSITY_DIM}")
    amps = state.amplitudes
    return DensityMatrix(np.outer(amps, amps.conj()), state.qubit_labels)


def tensor(left, right):
    """Kronecker product, labels concatenated left-then-right."""
    labels = left.qubit_labels + right.qubit_labels
    if set(left.qubit_labels) & set(right.qubit_labels):
        raise LabelCollisionError(
            f"labels {sorted(set(left.qubit_labels) & set(right.qubit_labels))} collide"
        )
    if isinstance(left, StateVector) and isinstance(right, StateVector):
        if left.dim * right.dim > MAX_VECTOR_DIM:
            raise CapacityError("tensor product exceeds the vector cap")
        return StateVector(np.kron(left.amplitudes, right.amplitudes), labels)
    if isinstance(left, StateVector):
        left = to_density(left)
    if isinstance(right, StateVector):
        right = to_density(right)
    if left.dim * right.dim > MAX_DENSITY_DIM:
        raise CapacityError("tensor product exceeds the density cap")
    return DensityMatrix(np.kron(left.entries, right.entries), labels)


def _as_index_list(indices: Iterable[int], n: int) -> list[int]:
    idx = [int(i) for i in indices]
    if len(set(idx)) != len(idx):
        raise ValidationError(f"duplicate qubit indices {idx}")
    for i in idx:
        if not 0 <= i < n:
            raise ValidationError(f"qubit index {i} out of range for {n} qubits")
    return idx


def partial_trace(rho: Union[DensityMatrix, StateVector], keep: Iterable[int]) -> DensityMatrix:
    """Reduce onto ``keep`` (qubit positions); kept qubits retain their order."""
    if isinstance(rho, StateVector):
        return _partial_trace_pure(rho, keep)
    n = rho.n_qubits
    keep = sorted(_as_index_list(keep, n))
    if not keep:
        raise ValidationError("keep set is empty; a scalar trace is not a density matrix")
    drop = [i for i in range(n) if i not in keep]
    t = rho.entries.reshape((2,) * (2 * n))
    t = t.transpose(keep + drop + [n + i for i in keep] + [n + i for i in drop])
    dk, dd = 2 ** len(keep), 2 ** len(drop)
    red = np.trace(t.reshape(dk, dd, dk, dd), axis1=1, axis2=3)
    return DensityMatrix(red, tuple(rho.qubit_labels[i] for i in keep))


def _partial_trace_pure(state: StateVector, keep: Iterable[int]) -> DensityMatrix:
    n = state.n_qubits
    keep = sorted(_as_index_list(keep, n))
    if not keep:
        raise ValidationError("keep set is empty; a scalar trace is not a density matrix")
    drop = [i for i in range(n) if i not in keep]
    dk = 2 ** len(keep)
    if dk > MAX_DENSITY_DIM:
        raise CapacityError(f"reduced dimension {dk} exceeds cap {MAX_DENSITY_DIM}")
    psi = state.amplitudes.reshape((2,) * n).transpose(keep + drop).reshape(dk, -1)
    return DensityMatrix(psi @ psi.conj().T, tuple(state.qubit_labels[i] for i in keep))


def apply_unitary(state, u: np.ndarray, targets: Sequence[int]):
    """Apply ``u`` to the ordered ``targets``; the first target is u's top bit."""
    u = np.asarray(u, dtype=complex)
    check_unitary(u)
    n = state.n_qubits
    targets = _as_index_list(targets, n)
    k = len(targets)
    if u.shape[0] != 2**k:
        raise ValidationError(f"unitary of size {u.shape[0]} does not act on {k} qubits")
    rest = [i for i in range(n) if i not in targets]
    perm = targets + rest
    inv = np.argsort(perm)
    if isinstance(state, StateVector):
        t = state.amplitudes.reshape((2,) * n).transpose(perm).reshape(2**k, -1)
        t = (u @ t).reshape((2,) * n).transpose(inv)
        return StateVector(t.reshape(-1), state.qubit_labels)
    t = state.entries.reshape((2,) * (2 * n))
    t = t.transpose(perm + [n + i for i in perm]).reshape(2**k, 2 ** (n - k), 2**k, 2 ** (n - k))
    t = np.einsum("ij,jakb,lk->ialb", u, t, u.conj(), optimize=True)
    t = t.reshape((2,) * (2 * n)).transpose(list(inv) + [n + i for i in inv])
    return DensityMatrix(t.reshape(2**n, 2**n), state.qubit_labels)


def hermitian_spectrum(rho: Union[DensityMatrix, np.ndarray]) -> np.ndarray:
    """Real eigenvalues in descending order.

    Values in ``[-1e-10, 0)`` are floored to zero; anything more negative is
    treated as a bug upstream and rejected.
    """
    mat = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    check_hermitian(mat)
    vals = np.linalg.eigvalsh(mat)
    if vals.size and vals.min() < EIGEN_FLOOR:
        raise ValidationError(f"eigenvalue {vals.min():.3e} below floor {EIGEN_FLOOR}")
    return np.clip(vals, 0.0, None)[::-1]

"""Bell-pair encoding of classical bits.

Logical 0 and 1 are carried by (|00> + |11>)/sqrt(2) and (|00> - |11>)/sqrt(2).
Products of these span a 2^n dimensional logical subspace of the 4^n
dimensional pair space. Because ``|b> = (Z^b ⊗ I)|Phi+>``, any logical
superposition sum_x c_x |x> has Schmidt form

    2^{-n/2} sum_z (H c)_z |z>_A |z>_B,

with ``H`` the unnormalized Walsh-Hadamard matrix. The reduced state on the
A qubits is therefore diagonal, which is what :func:`reduced_diagonal_fast`
exploits.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import CapacityError, ValidationError
from .qsim import (
    MAX_DENSITY_DIM,
    MAX_VECTOR_DIM,
    DensityMatrix,
    StateVector,
    check_hermitian,
    pair_labels,
)

SQRT_HALF = 1.0 / np.sqrt(2.0)
BELL_ZERO = np.array([SQRT_HALF, 0.0, 0.0, SQRT_HALF], dtype=complex)
BELL_ONE = np.array([SQRT_HALF, 0.0, 0.0, -SQRT_HALF], dtype=complex)
# columns are the two encodings; maps a logical qubit into one pair
ENCODER = np.stack([BELL_ZERO, BELL_ONE], axis=1)

MAX_PAIRS = 10


def bits_to_index(bits: str) -> int:
    """Left-most bit is the most significant."""
    if not bits or set(bits) - {"0", "1"}:
        raise ValidationError(f"not a bit string: {bits!r}")
    return int(bits, 2)


def index_to_bits(index: int, width: int) -> str:
    return format(index, f"0{width}b") if width else ""


@dataclass(frozen=True, eq=False)
class LogicalState:
    """State of ``n_pairs`` Bell-encoded bits in the logical basis.

    ``data`` is a length ``2^n`` amplitude vector when ``kind == "pure"`` and a
    ``2^n x 2^n`` density record when ``kind == "mixed"``.
    """

    n_pairs: int
    kind: str
    data: np.ndarray

    def __post_init__(self):
        if self.kind not in ("pure", "mixed"):
            raise ValidationError(f"kind must be 'pure' or 'mixed', got {self.kind!r}")
        if self.n_pairs < 0:
            raise ValidationError("n_pairs must be non-negative")
        if self.n_pairs > MAX_PAIRS:
            raise CapacityError(f"{self.n_pairs} pairs exceeds the logical cap of {MAX_PAIRS}")
        data = np.asarray(self.data, dtype=complex)
        dim = 2**self.n_pairs
        if self.kind == "pure":
            data = data.reshape(-1)
            if data.size != dim:
                raise ValidationError(f"expected {dim} amplitudes, got {data.size}")
            if abs(np.linalg.norm(data) - 1.0) > 1e-12:
                raise ValidationError(f"pure state norm {np.linalg.norm(data)} is not 1")
        else:
            if data.shape != (dim, dim):
                raise ValidationError(f"expected a {dim}x{dim} density record, got {data.shape}")
            check_hermitian(data)
            if abs(np.trace(data).real - 1.0) > 1e-10:
                raise ValidationError(f"density trace {np.trace(data).real} is not 1")
            lo = np.linalg.eigvalsh(data).min()
            if lo < -1e-10:
                raise ValidationError(f"density record not PSD (min eigenvalue {lo:.3e})")
        object.__setattr__(self, "data", data)

    @classmethod
    def pure(cls, amplitudes: Sequence[complex], normalize: bool = False) -> "LogicalState":
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        n = amps.size.bit_length() - 1
        if amps.size != 2**n:
            raise ValidationError(f"amplitude count {amps.size} is not a power of two")
        if normalize:
            nrm = np.linalg.norm(amps)
            if nrm == 0:
                raise ValidationError("cannot normalize the zero vector")
            amps = amps / nrm
        return cls(n, "pure", amps)

    @classmethod
    def mixed(cls, matrix: np.ndarray) -> "LogicalState":
        mat = np.asarray(matrix, dtype=complex)
        n = mat.shape[0].bit_length() - 1
        return cls(n, "mixed", mat)

    @classmethod
    def basis(cls, bits: str) -> "LogicalState":
        amps = np.zeros(2 ** len(bits), dtype=complex)
        amps[bits_to_index(bits)] = 1.0
        return cls(len(bits), "pure", amps)

    @classmethod
    def uniform(cls, n_pairs: int) -> "LogicalState":
        """Equal-weight superposition of every logical basis string."""
        dim = 2**n_pairs
        return cls(n_pairs, "pure", np.full(dim, 1.0 / np.sqrt(dim), dtype=complex))

    @property
    def dim(self) -> int:
        return 2**self.n_pairs

    def density(self) -> np.ndarray:
        if self.kind == "pure":
            return np.outer(self.data, self.data.conj())
        return self.data

    def to_mixed(self) -> "LogicalState":
        return self if self.kind == "mixed" else LogicalState(self.n_pairs, "mixed", self.density())


def encode_bit(b: int) -> StateVector:
    if b not in (0, 1):
        raise ValidationError(f"bit must be 0 or 1, got {b!r}")
    return StateVector(BELL_ONE if b else BELL_ZERO, pair_labels(1))


def _encode_axes(t: np.ndarray, n: int, offset: int = 0) -> np.ndarray:
    # contract logical axis i with the 4x2 encoder, one pair at a time
    for i in range(n):
        t = np.moveaxis(np.tensordot(ENCODER, t, axes=([1], [offset + i])), 0, offset + i)
    return t


def encode_logical(ls: LogicalState) -> Union[StateVector, DensityMatrix]:
    """Full-space image under the pair-by-pair encoding isometry."""
    n = ls.n_pairs
    labels = pair_labels(n)
    if ls.kind == "pure":
        if 4**n > MAX_VECTOR_DIM:
            raise CapacityError(f"{n} pairs exceeds the vector cap")
        t = _encode_axes(ls.data.reshape((2,) * n), n)
        return StateVector(t.reshape(-1), labels)
    if 4**n > MAX_DENSITY_DIM:
        raise CapacityError(f"{n} pairs exceeds the density cap")
    t = _encode_axes(ls.data.reshape((2,) * (2 * n)), n)
    t = _encode_axes(t.conj(), n, offset=n).conj()
    return DensityMatrix(t.reshape(4**n, 4**n), labels)


def encoder_isometry(n_pairs: int) -> np.ndarray:
    """The 4^n x 2^n matrix of the encoding, pair-major ordering."""
    if 4**n_pairs > MAX_DENSITY_DIM:
        raise CapacityError(f"{n_pairs} pairs exceeds the density cap")
    v = np.ones((1, 1), dtype=complex)
    for _ in range(n_pairs):
        v = np.kron(v, ENCODER)
    return v


def lift_unitary(u_logical: np.ndarray, n_pairs: int) -> np.ndarray:
    """Extend a logical unitary to the full pair space, acting as identity off the code."""
    v = encoder_isometry(n_pairs)
    u = np.asarray(u_logical, dtype=complex)
    if u.shape != (2**n_pairs, 2**n_pairs):
        raise ValidationError(f"logical unitary shape {u.shape} does not match {n_pairs} pairs")
    return v @ u @ v.conj().T + (np.eye(v.shape[0]) - v @ v.conj().T)


def fast_walsh_hadamard(v: Sequence[complex]) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform, kernel (-1)^{z.x}."""
    out = np.array(v, dtype=complex).reshape(-1)
    size = out.size
    if size == 0 or size & (size - 1):
        raise ValidationError(f"length {size} is not a power of two")
    h = 1
    while h < size:
        blocks = out.reshape(-1, 2, h)
        out = np.concatenate(
            [blocks[:, 0] + blocks[:, 1], blocks[:, 0] - blocks[:, 1]], axis=1
        ).reshape(-1)
        h *= 2
    return out


def hadamard_diagonal_pure(amps: np.ndarray) -> np.ndarray:
    return np.abs(fast_walsh_hadamard(amps)) ** 2 / amps.size


def hadamard_diagonal_mixed(record: np.ndarray) -> np.ndarray:
    dim = record.shape[0]
    idx = np.arange(dim)
    # g_w = sum_x r[x, x xor w]
    g = record[idx[:, None], idx[:, None] ^ idx[None, :]].sum(axis=0)
    return np.clip(np.real(fast_walsh_hadamard(g)) / dim, 0.0, None)


def reduced_diagonal_fast(ls: LogicalState) -> np.ndarray:
    """Diagonal of Tr_B of the encoded state, in the A computational basis.

    ``d_z = 2^{-n} sum_{x,y} r_{xy} (-1)^{z.(x xor y)}``. The full reduction is
    diagonal, so this vector is its whole spectrum.
    """
    if ls.kind == "pure":
        return hadamard_diagonal_pure(ls.data)
    return hadamard_diagonal_mixed(ls.data)

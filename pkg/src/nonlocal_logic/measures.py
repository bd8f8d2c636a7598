"""Entropies and entanglement quantities, all in ebits (base 2)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .encoding import LogicalState, reduced_diagonal_fast
from .errors import DomainError, ValidationError
from .qsim import DensityMatrix, Partition, StateVector, hermitian_spectrum, partial_trace

DOMAIN_TOL = 1e-12


@dataclass(frozen=True)
class ExtensionParams:
    """Amplitudes of the free row of a NAND-shaped dilation.

    ``d`` multiplies the canonical garbage string (the gate's own input); ``a``,
    ``b`` and ``c`` multiply the other three garbage strings in lexicographic
    order. ``a = b = c = 0, d = 1`` is the canonical dilation.
    """

    a: complex = 0.0
    b: complex = 0.0
    c: complex = 0.0
    d: complex = 1.0

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, complex(getattr(self, name)))
        norm2 = sum(abs(getattr(self, k)) ** 2 for k in "abcd")
        if abs(norm2 - 1.0) > 1e-10:
            raise ValidationError(f"|a|^2+|b|^2+|c|^2+|d|^2 = {norm2}, expected 1")

    @classmethod
    def from_vector(cls, v) -> "ExtensionParams":
        v = np.asarray(v, dtype=complex).reshape(4)
        nrm = np.linalg.norm(v)
        if nrm == 0:
            raise ValidationError("zero extension vector")
        v = v / nrm
        return cls(*v)

    @classmethod
    def from_reals(cls, x) -> "ExtensionParams":
        x = np.asarray(x, dtype=float)
        return cls.from_vector(x[:4] + 1j * x[4:])

    def as_vector(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c, self.d], dtype=complex)

    @property
    def s(self) -> complex:
        return self.a + self.b + self.c


def _xlogx_sum(p: np.ndarray) -> float:
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def binary_entropy(p: float) -> float:
    if not -DOMAIN_TOL <= p <= 1 + DOMAIN_TOL:
        raise DomainError(f"binary entropy argument {p} outside [0, 1]")
    p = min(max(float(p), 0.0), 1.0)
    return _xlogx_sum(np.array([p, 1.0 - p]))


def shannon_entropy(probs) -> float:
    p = np.asarray(probs, dtype=float).reshape(-1)
    if p.size and p.min() < -1e-10:
        raise ValidationError(f"negative probability {p.min()}")
    if abs(p.sum() - 1.0) > 1e-10:
        raise ValidationError(f"probabilities sum to {p.sum()}, expected 1")
    return _xlogx_sum(np.clip(p, 0.0, None))


def von_neumann_entropy(rho: Union[DensityMatrix, LogicalState, np.ndarray]) -> float:
    """-sum λ log2 λ. Accepts a density matrix, a logical state, or a probability vector."""
    if isinstance(rho, LogicalState):
        if rho.kind == "pure":
            return 0.0
        return _xlogx_sum(hermitian_spectrum(rho.data))
    if isinstance(rho, DensityMatrix):
        spec = hermitian_spectrum(rho)
    else:
        arr = np.asarray(rho)
        if arr.ndim == 1:
            return shannon_entropy(arr)
        spec = hermitian_spectrum(arr)
    if abs(spec.sum() - 1.0) > 1e-10:
        raise ValidationError(f"density trace {spec.sum()} is not 1")
    return _xlogx_sum(spec)


def _default_cut(labels) -> Partition:
    return Partition.from_labels(labels)


def pure_entanglement(state: Union[StateVector, LogicalState], cut: Optional[Partition] = None) -> float:
    """Entropy of entanglement of a pure state across the cut (default: A:B tags)."""
    if isinstance(state, LogicalState):
        if state.kind != "pure":
            raise ValidationError("pure_entanglement needs a pure state")
        return shannon_entropy(reduced_diagonal_fast(state))
    if abs(state.norm() - 1.0) > 1e-10:
        raise ValidationError(f"state norm {state.norm()} is not 1")
    cut = cut or _default_cut(state.qubit_labels)
    cut.check_covers(state.n_qubits)
    # reduce onto the smaller side; the spectra agree
    side = cut.a_qubits if len(cut.a_qubits) <= len(cut.b_qubits) else cut.b_qubits
    if not side:
        return 0.0
    return von_neumann_entropy(partial_trace(state, side))


def gain_lower_bound(rho: Union[DensityMatrix, LogicalState, StateVector]) -> float:
    """S(Tr_B rho) - S(rho). Negative values are returned as-is."""
    if isinstance(rho, LogicalState):
        s_a = shannon_entropy(reduced_diagonal_fast(rho))
        return s_a - von_neumann_entropy(rho)
    if isinstance(rho, StateVector):
        return pure_entanglement(rho)
    cut = _default_cut(rho.qubit_labels)
    cut.check_covers(rho.n_qubits)
    if not cut.a_qubits:
        raise ValidationError("no A-side qubits to keep")
    return von_neumann_entropy(partial_trace(rho, cut.a_qubits)) - von_neumann_entropy(rho)


def ree_nand_family(params: ExtensionParams, reading: str = "linear") -> float:
    """Relative entropy of entanglement of the NAND family's test-state output.

    With ``s = a + b + c`` the output record is [[1/4, s/4], [s*/4, 3/4]], a
    maximally correlated state, so its REE is S(diag) - S(rho):

    ``reading="linear"``:  H[1/2 + Re(s)/4] - H[1/2 + sqrt(1 + |s|^2)/4]
    ``reading="squared"``: H[1/2 + Re(s)^2/4] - H[1/2 + sqrt(1 + |s|^2)/4]

    The two readings agree at Re(s) = 0. The squared one can push the first
    argument past 1 (raises DomainError) and undershoots the true value once
    |Re s| > 1.
    """
    s = params.s
    if reading == "linear":
        first = 0.5 + 0.25 * s.real
    elif reading == "squared":
        first = 0.5 + 0.25 * s.real**2
    else:
        raise ValidationError(f"unknown reading {reading!r}")
    second = 0.5 + 0.25 * np.sqrt(1.0 + abs(s) ** 2)
    return binary_entropy(first) - binary_entropy(second)

"""Classical truth tables and their unitary dilations on the logical basis.

A table ``f: {0,1}^n -> {0,1}^m`` is lifted to an isometry that appends ``k``
ancilla pairs in logical 0 and maps ``|x>|0^k>`` to ``|f(x)>|g(x)>``. The
kept pairs carry ``f(x)``; the ``n + k - m`` garbage pairs carrying ``g(x)``
are discarded. ``k`` is the smallest count for which an injective garbage
exists, trying in order:

* the input itself when ``k = m`` (NAND, RESET),
* the leading ``n + k - m`` input bits (XOR keeps ``x1``, as a CNOT would),
* the rank of ``x`` among the preimages of ``f(x)``.

Rows with ancillas not all zero are completed to a permutation by pairing the
remaining inputs and outputs in ascending order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional, Sequence

import numpy as np

from .encoding import LogicalState, bits_to_index, index_to_bits
from .errors import ConfigurationError, ValidationError
from .measures import ExtensionParams, binary_entropy


@dataclass(frozen=True)
class TruthTable:
    name: str
    n_in: int
    m_out: int
    outputs: tuple[int, ...]

    def __post_init__(self):
        if self.n_in < 1 or self.m_out < 1:
            raise ValidationError(f"{self.name}: n_in and m_out must be at least 1")
        outs = tuple(int(v) for v in self.outputs)
        if len(outs) != 2**self.n_in:
            raise ValidationError(
                f"{self.name}: table has {len(outs)} rows, expected {2 ** self.n_in}"
            )
        if any(not 0 <= v < 2**self.m_out for v in outs):
            raise ValidationError(f"{self.name}: output value out of range for {self.m_out} bits")
        object.__setattr__(self, "outputs", outs)

    @classmethod
    def from_function(cls, name: str, n_in: int, m_out: int, fn: Callable[[int], int]) -> "TruthTable":
        return cls(name, n_in, m_out, tuple(fn(x) for x in range(2**n_in)))

    @classmethod
    def from_rows(cls, name: str, rows: dict[str, str]) -> "TruthTable":
        n_in = len(next(iter(rows)))
        m_out = len(next(iter(rows.values())))
        outs = [None] * 2**n_in
        for k, v in rows.items():
            outs[bits_to_index(k)] = bits_to_index(v)
        if any(o is None for o in outs):
            raise ValidationError(f"{name}: table is not total")
        return cls(name, n_in, m_out, tuple(outs))

    def __call__(self, bits: str) -> str:
        if len(bits) != self.n_in:
            raise ValidationError(f"{self.name} takes {self.n_in} bits, got {len(bits)}")
        return index_to_bits(self.outputs[bits_to_index(bits)], self.m_out)

    def rows(self) -> list[tuple[str, str]]:
        return [
            (index_to_bits(x, self.n_in), index_to_bits(y, self.m_out))
            for x, y in enumerate(self.outputs)
        ]

    @property
    def is_reversible(self) -> bool:
        return self.n_in == self.m_out and len(set(self.outputs)) == len(self.outputs)


def _bit(x: int, i: int, n: int) -> int:
    """Bit ``i`` (0 = left-most) of an ``n``-bit integer."""
    return (x >> (n - 1 - i)) & 1


CATALOG: dict[str, TruthTable] = {
    t.name: t
    for t in [
        TruthTable("NOT", 1, 1, (1, 0)),
        TruthTable("RESET", 1, 1, (0, 0)),
        TruthTable("FANOUT", 1, 2, (0b00, 0b11)),
        TruthTable("XOR", 2, 1, (0, 1, 1, 0)),
        TruthTable("AND", 2, 1, (0, 0, 0, 1)),
        TruthTable("OR", 2, 1, (0, 1, 1, 1)),
        TruthTable("NAND", 2, 1, (1, 1, 1, 0)),
        TruthTable("NOR", 2, 1, (1, 0, 0, 0)),
        TruthTable.from_function("CNOT", 2, 2, lambda x: x ^ (x >> 1)),
        TruthTable.from_function(
            "TOFFOLI", 3, 3, lambda x: x ^ (_bit(x, 0, 3) & _bit(x, 1, 3))
        ),
    ]
}


def identity_table(n: int = 1) -> TruthTable:
    return TruthTable.from_function(f"ID{n}", n, n, lambda x: x)


def _garbage(tt: TruthTable, k: int) -> Optional[tuple[int, ...]]:
    n, m = tt.n_in, tt.m_out
    width = n + k - m
    if width < 0:
        return None
    xs = range(2**n)
    candidates = []
    if width >= n:
        candidates.append(tuple(x << (width - n) for x in xs))
    else:
        candidates.append(tuple(x >> (n - width) for x in xs))
        ranks, seen = [], {}
        for x in xs:
            y = tt.outputs[x]
            ranks.append(seen.get(y, 0))
            seen[y] = seen.get(y, 0) + 1
        if max(seen.values()) <= 2**width:
            candidates.append(tuple(ranks))
    for g in candidates:
        if len({(tt.outputs[x], g[x]) for x in xs}) == 2**n:
            return g
    return None


@dataclass(frozen=True, eq=False)
class DilationModel:
    """Isometric lift of a truth table.

    Block layout: inputs ``0..n-1`` then ancillas; outputs ``0..m-1`` are
    kept and the rest are discarded. ``isometry`` holds the columns of
    ``logical_unitary`` whose ancillas start in logical 0.
    """

    truth_table: TruthTable
    ancilla_pairs: int
    garbage: tuple[int, ...]
    isometry: np.ndarray = field(repr=False)
    extension: Optional[ExtensionParams] = None
    free_input: Optional[int] = None

    @property
    def n_in(self) -> int:
        return self.truth_table.n_in

    @property
    def m_out(self) -> int:
        return self.truth_table.m_out

    @property
    def n_block(self) -> int:
        return self.n_in + self.ancilla_pairs

    @property
    def n_garbage(self) -> int:
        return self.n_block - self.m_out

    @property
    def kept_outputs(self) -> tuple[int, ...]:
        return tuple(range(self.m_out))

    @property
    def discarded(self) -> tuple[int, ...]:
        return tuple(range(self.m_out, self.n_block))

    @property
    def has_family(self) -> bool:
        return self.free_input is not None

    @cached_property
    def logical_unitary(self) -> np.ndarray:
        n, k = self.n_in, self.ancilla_pairs
        dim = 2 ** (n + k)
        u = np.zeros((dim, dim), dtype=complex)
        valid = [x << k for x in range(2**n)]
        u[:, valid] = self.isometry
        others = [i for i in range(dim) if i not in set(valid)]
        if self.extension is None:
            used = {int(np.argmax(np.abs(self.isometry[:, x]))) for x in range(2**n)}
            for i, j in zip(others, [j for j in range(dim) if j not in used]):
                u[j, i] = 1.0
            return u
        # Gram-Schmidt over the standard basis, ascending
        basis = [self.isometry[:, x] for x in range(2**n)]
        fill = iter(others)
        for j in range(dim):
            if len(basis) == dim:
                break
            e = np.zeros(dim, dtype=complex)
            e[j] = 1.0
            for b in basis:
                e = e - np.vdot(b, e) * b
            nrm = np.linalg.norm(e)
            if nrm > 1e-8:
                e = e / nrm
                basis.append(e)
                u[:, next(fill)] = e
        return u

    def with_extension(self, ext: Optional[ExtensionParams]) -> "DilationModel":
        if ext is None:
            return dilation_from_truth_table(self.truth_table)
        if not self.has_family:
            raise ConfigurationError(
                f"{self.truth_table.name}: extension parameters need a NAND-shaped table"
            )
        w = self.isometry.copy()
        w[:, self.free_input] = _extension_column(self.truth_table, self.free_input, ext)
        return DilationModel(
            self.truth_table, self.ancilla_pairs, self.garbage, w, ext, self.free_input
        )


def _family_input(tt: TruthTable, k: int, garbage: tuple[int, ...]) -> Optional[int]:
    """The single-preimage input of a 2-to-1 table whose garbage is the input itself."""
    if (tt.n_in, tt.m_out, k) != (2, 1, 1) or garbage != tuple(range(4)):
        return None
    counts = {y: tt.outputs.count(y) for y in set(tt.outputs)}
    lonely = [x for x in range(4) if counts[tt.outputs[x]] == 1]
    return lonely[0] if len(lonely) == 1 else None


def _extension_column(tt: TruthTable, x_star: int, ext: ExtensionParams) -> np.ndarray:
    col = np.zeros(8, dtype=complex)
    others = [g for g in range(4) if g != x_star]
    y = tt.outputs[x_star]
    for g, amp in zip(others, (ext.a, ext.b, ext.c)):
        col[(y << 2) | g] = amp
    col[(y << 2) | x_star] = ext.d
    return col


def dilation_from_truth_table(
    tt: TruthTable, extension: Optional[ExtensionParams] = None
) -> DilationModel:
    n, m = tt.n_in, tt.m_out
    for k in range(m + 1):
        garbage = _garbage(tt, k)
        if garbage is not None:
            break
    width = n + k - m
    w = np.zeros((2 ** (m + width), 2**n), dtype=complex)
    for x in range(2**n):
        w[(tt.outputs[x] << width) | garbage[x], x] = 1.0
    model = DilationModel(tt, k, garbage, w, None, _family_input(tt, k, garbage))
    if extension is not None:
        return model.with_extension(extension)
    return model


def output_layout(n_pairs: int, wires: Sequence[int], m_out: int) -> list[tuple[str, int]]:
    """Pair order after a gate: outputs take the wire slots, extras go last."""
    order = []
    for pos in range(n_pairs):
        if pos in wires:
            j = list(wires).index(pos)
            if j < m_out:
                order.append(("out", j))
        else:
            order.append(("rest", pos))
    order.extend(("out", j) for j in range(len(wires), m_out))
    return order


def _check_wires(n_pairs: int, wires: Sequence[int], n_in: int) -> list[int]:
    wires = [int(w) for w in wires]
    if len(wires) != n_in:
        raise ValidationError(f"gate takes {n_in} wires, got {len(wires)}")
    if len(set(wires)) != len(wires):
        raise ValidationError(f"wires must be distinct, got {wires}")
    for w in wires:
        if not 0 <= w < n_pairs:
            raise ValidationError(f"wire {w} out of range for {n_pairs} pairs")
    return wires


def _layout_perm(n_pairs: int, wires: list[int], m: int) -> tuple[list[int], list[int]]:
    rest = [i for i in range(n_pairs) if i not in wires]
    current = [("out", j) for j in range(m)] + [("rest", i) for i in rest]
    target = output_layout(n_pairs, wires, m)
    return rest, [current.index(o) for o in target]


def apply_gate(ls: LogicalState, model: DilationModel, wires: Sequence[int]) -> LogicalState:
    """Append ancillas, apply the dilation on ``wires``, trace out the garbage."""
    L = ls.n_pairs
    wires = _check_wires(L, wires, model.n_in)
    n, m, G = model.n_in, model.m_out, model.n_garbage
    rest, perm = _layout_perm(L, wires, m)
    R = 2 ** (L - n)
    L_out = m + L - n
    w = model.isometry
    if ls.kind == "pure":
        t = ls.data.reshape((2,) * L).transpose(wires + rest).reshape(2**n, R)
        t = (w @ t).reshape(2**m, 2**G, R)
        if G == 0:
            t = t.reshape((2,) * L_out).transpose(perm)
            return LogicalState(L_out, "pure", t.reshape(-1))
        rho = np.einsum("agr,bgs->arbs", t, t.conj())
    else:
        t = ls.data.reshape((2,) * (2 * L))
        t = t.transpose(wires + rest + [L + i for i in wires + rest]).reshape(2**n, R, 2**n, R)
        t = np.einsum("ij,jakb,lk->ialb", w, t, w.conj(), optimize=True)
        t = t.reshape(2**m, 2**G, R, 2**m, 2**G, R)
        rho = np.einsum("agrbgs->arbs", t)
    rho = rho.reshape((2,) * (2 * L_out)).transpose(perm + [L_out + p for p in perm])
    rho = rho.reshape(2**L_out, 2**L_out)
    return LogicalState(L_out, "mixed", (rho + rho.conj().T) / 2)


def apply_gate_purified(
    columns: np.ndarray, n_pairs: int, model: DilationModel, wires: Sequence[int]
) -> tuple[np.ndarray, int]:
    """Apply a dilation to a batch of pure states, keeping the garbage.

    ``columns`` has shape ``(2^n_pairs, batch)``. The result places pairs as
    :func:`output_layout` says, followed by the garbage pairs. Returns the new
    array and its pair count.
    """
    L = n_pairs
    wires = _check_wires(L, wires, model.n_in)
    n, m, G = model.n_in, model.m_out, model.n_garbage
    rest, perm = _layout_perm(L, wires, m)
    B = columns.shape[1]
    L_live = m + L - n
    t = columns.reshape((2,) * L + (B,)).transpose(wires + rest + [L])
    t = (model.isometry @ t.reshape(2**n, -1)).reshape(2**m, 2**G, 2 ** (L - n), B)
    t = t.transpose(0, 2, 1, 3).reshape((2,) * L_live + (2,) * G + (B,))
    t = t.transpose(perm + list(range(L_live, L_live + G)) + [L_live + G])
    return t.reshape(-1, B), L_live + G


def trace_pairs(ls: LogicalState, pairs: Sequence[int]) -> LogicalState:
    """Discard ``pairs``; valid in the logical basis since the encoding is pairwise."""
    pairs = sorted(set(int(p) for p in pairs))
    if not pairs:
        return ls
    L = ls.n_pairs
    keep = [i for i in range(L) if i not in pairs]
    dk, dd = 2 ** len(keep), 2 ** len(pairs)
    if ls.kind == "pure":
        t = ls.data.reshape((2,) * L).transpose(keep + pairs).reshape(dk, dd)
        rho = t @ t.conj().T
    else:
        t = ls.data.reshape((2,) * (2 * L))
        t = t.transpose(keep + pairs + [L + i for i in keep + pairs]).reshape(dk, dd, dk, dd)
        rho = np.trace(t, axis1=1, axis2=3)
    return LogicalState(len(keep), "mixed", rho)


def permute_pairs(ls: LogicalState, order: Sequence[int]) -> LogicalState:
    """New pair ``i`` is old pair ``order[i]``."""
    order = list(order)
    L = ls.n_pairs
    if ls.kind == "pure":
        t = ls.data.reshape((2,) * L).transpose(order)
        return LogicalState(L, "pure", t.reshape(-1))
    t = ls.data.reshape((2,) * (2 * L)).transpose(order + [L + i for i in order])
    return LogicalState(L, "mixed", t.reshape(2**L, 2**L))


@dataclass(frozen=True)
class NonlocalProfile:
    e_up_lower: float
    e_down_lower: float
    e_cost_upper: float
    notes: str = ""

    def __post_init__(self):
        if self.e_up_lower > self.e_cost_upper + 1e-9:
            raise ValidationError(
                f"entangling lower bound {self.e_up_lower} exceeds cost bound {self.e_cost_upper}"
            )


@dataclass(frozen=True)
class CostConstruction:
    """Explicit distributed implementation: nonlocal Toffolis plus fresh Bell pairs."""

    toffolis: int
    ancilla_pairs: int
    note: str

    TOFFOLI_COST = 2.0

    @property
    def ebits(self) -> float:
        return self.TOFFOLI_COST * self.toffolis + float(self.ancilla_pairs)


COST_CONSTRUCTIONS: dict[str, CostConstruction] = {
    "NOT": CostConstruction(0, 0, "logical NOT is a local Z on one side"),
    "CNOT": CostConstruction(0, 0, "logical CNOT is a pair of local CNOTs"),
    "XOR": CostConstruction(0, 0, "logical CNOT, then discard the control pair"),
    "RESET": CostConstruction(0, 1, "swap in a fresh pair prepared in logical 0"),
    "FANOUT": CostConstruction(0, 1, "logical CNOT onto a fresh pair in logical 0"),
    "TOFFOLI": CostConstruction(1, 0, "nonlocal Toffoli, 2 ebits taken as given"),
    "NAND": CostConstruction(1, 1, "Toffoli onto a fresh pair, discard both inputs"),
    "NOR": CostConstruction(1, 1, "local NOTs around the NAND construction"),
    "AND": CostConstruction(1, 1, "NAND construction followed by a local NOT"),
    "OR": CostConstruction(1, 1, "NOR construction followed by a local NOT"),
}

NAND_TEST_STATE_GAIN = 1.0 - binary_entropy(0.25)

_PROFILES: dict[str, tuple[float, float, str]] = {
    "RESET": (1.0, 0.0, "input (|0>+|1>)/sqrt2 is unentangled and always leaves a Bell pair; "
              "the output is maximally entangled whatever the input"),
    "NOT": (0.0, 0.0, "local unitary"),
    "CNOT": (0.0, 0.0, "local unitary"),
    "XOR": (0.0, 1.0, "zero-cost construction cannot create entanglement; "
            "the discarded control pair carries 1 ebit on basis inputs"),
    "NAND": (NAND_TEST_STATE_GAIN, 1.0, "uniform product test state under the worst extension "
             "gives 1 - H(1/4); basis input 11 loses one pair's ebit"),
    "NOR": (NAND_TEST_STATE_GAIN, 1.0, "equal to NAND up to local NOTs"),
    "AND": (NAND_TEST_STATE_GAIN, 1.0, "equal to NAND up to a local NOT"),
    "OR": (NAND_TEST_STATE_GAIN, 1.0, "equal to NOR up to a local NOT"),
    "TOFFOLI": (0.0, 0.0, "only the cost bound is recorded; capacities are trivial bounds"),
}


def builtin_profile(gate_name: str) -> NonlocalProfile:
    if gate_name not in _PROFILES:
        raise ValidationError(f"no built-in profile for {gate_name!r}")
    up, down, note = _PROFILES[gate_name]
    cons = COST_CONSTRUCTIONS[gate_name]
    return NonlocalProfile(up, down, cons.ebits, f"{note}; cost: {cons.note}")


def catalog_names() -> list[str]:
    return sorted(CATALOG)

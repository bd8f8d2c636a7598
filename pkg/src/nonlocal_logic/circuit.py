"""Netlists: text format, classical evaluation, and the Bell-pair channel they induce.

Format (one statement per line, ``#`` starts a comment)::

    inputs a b c
    t = XOR a b
    table MAJ 2 1
    00 -> 0
    01 -> 0
    10 -> 0
    11 -> 1
    w = MAJ t c
    outputs w

Every wire is assigned once and read at most once. Copying a value needs an
explicit ``FANOUT``; a wire that is never read is discarded.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .encoding import LogicalState, bits_to_index, index_to_bits
from .errors import BoundUndefinedError, CapacityError, NetlistError, ValidationError
from .gates import (
    CATALOG,
    TruthTable,
    apply_gate,
    apply_gate_purified,
    dilation_from_truth_table,
    output_layout,
    permute_pairs,
    trace_pairs,
)
from .measures import ExtensionParams

NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
GATE_RE = re.compile(r"[A-Z][A-Z0-9_]*\Z")
BITS_RE = re.compile(r"[01]+\Z")

MAX_LIVE_PAIRS = 10
MAX_TABLE_INPUTS = 10
MAX_PURIFIED_PAIRS = 18


@dataclass(frozen=True)
class GateInstance:
    gate: str
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Netlist:
    inputs: tuple[str, ...]
    gates: tuple[GateInstance, ...]
    outputs: tuple[str, ...]
    tables: tuple[TruthTable, ...] = ()

    def table(self, name: str) -> TruthTable:
        for t in self.tables:
            if t.name == name:
                return t
        if name in CATALOG:
            return CATALOG[name]
        raise ValidationError(f"unknown gate {name!r}")

    def gate_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for g in self.gates:
            counts[g.gate] = counts.get(g.gate, 0) + 1
        return counts


# ---------------------------------------------------------------- parsing


def _tokens(line: str) -> list[tuple[str, int]]:
    """Whitespace-separated tokens with 1-based columns."""
    return [(m.group(), m.start() + 1) for m in re.finditer(r"\S+", line)]


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0]


def _check_name(tok: str, col: int, lineno: int) -> str:
    if not NAME_RE.match(tok):
        raise NetlistError("E_SYNTAX", f"bad wire name {tok!r}", lineno, col)
    return tok


@dataclass
class _Stmt:
    kind: str  # inputs | gate | outputs
    names: list[tuple[str, int]]
    lineno: int
    gate: Optional[GateInstance] = None
    in_cols: list[int] = field(default_factory=list)
    out_cols: list[int] = field(default_factory=list)


def _parse_table_header(toks, lineno, lines, i, tables) -> tuple[TruthTable, int]:
    if len(toks) != 4:
        raise NetlistError("E_SYNTAX", "expected 'table NAME n_in m_out'", lineno, 1)
    (_, _), (name, ncol), (n_tok, n_col), (m_tok, m_col) = toks
    if not GATE_RE.match(name):
        raise NetlistError("E_SYNTAX", f"table name {name!r} must be upper-case", lineno, ncol)
    if name in CATALOG or name in tables:
        raise NetlistError("E_REDEFINED", f"gate {name} is already defined", lineno, ncol)
    for tok, col in ((n_tok, n_col), (m_tok, m_col)):
        if not tok.isdigit() or int(tok) < 1:
            raise NetlistError("E_TABLE", f"arity {tok!r} must be a positive integer", lineno, col)
    n_in, m_out = int(n_tok), int(m_tok)
    if n_in > MAX_TABLE_INPUTS:
        raise NetlistError("E_TABLE", f"tables take at most {MAX_TABLE_INPUTS} inputs", lineno, n_col)
    outs: dict[int, int] = {}
    while len(outs) < 2**n_in:
        if i >= len(lines):
            raise NetlistError("E_TABLE", f"table {name} ends after {len(outs)} rows", lineno, 1)
        row_no, raw = i + 1, _strip_comment(lines[i])
        i += 1
        row = _tokens(raw)
        if not row:
            continue
        if len(row) != 3 or row[1][0] != "->":
            raise NetlistError("E_TABLE", "expected '<inbits> -> <outbits>'", row_no, row[0][1])
        (lhs, lcol), _, (rhs, rcol) = row
        if not BITS_RE.match(lhs) or len(lhs) != n_in:
            raise NetlistError("E_TABLE", f"input bits {lhs!r} should have width {n_in}", row_no, lcol)
        if not BITS_RE.match(rhs) or len(rhs) != m_out:
            raise NetlistError("E_TABLE", f"output bits {rhs!r} should have width {m_out}", row_no, rcol)
        key = bits_to_index(lhs)
        if key in outs:
            raise NetlistError("E_TABLE", f"row {lhs} given twice", row_no, lcol)
        outs[key] = bits_to_index(rhs)
    return TruthTable(name, n_in, m_out, tuple(outs[x] for x in range(2**n_in))), i


def _parse_lines(text: str) -> tuple[list[_Stmt], dict[str, TruthTable]]:
    """Line-local checks: syntax, gate names, arity, table bodies."""
    lines = text.splitlines()
    stmts: list[_Stmt] = []
    tables: dict[str, TruthTable] = {}
    i = 0
    while i < len(lines):
        lineno = i + 1
        toks = _tokens(_strip_comment(lines[i]))
        i += 1
        if not toks:
            continue
        head = toks[0][0]
        if head in ("inputs", "outputs"):
            if len(toks) < 2:
                raise NetlistError("E_SYNTAX", f"'{head}' needs at least one name", lineno, 1)
            names = [(_check_name(t, c, lineno), c) for t, c in toks[1:]]
            stmts.append(_Stmt(head, names, lineno))
        elif head == "table":
            tt, i = _parse_table_header(toks, lineno, lines, i, tables)
            tables[tt.name] = tt
        else:
            eq = [k for k, (t, _) in enumerate(toks) if t == "="]
            if len(eq) != 1 or eq[0] == 0 or eq[0] + 1 >= len(toks):
                raise NetlistError("E_SYNTAX", "expected '<out>+ = <GATE> <in>+'", lineno, 1)
            k = eq[0]
            gate, gcol = toks[k + 1]
            outs, ins = toks[:k], toks[k + 2:]
            if not GATE_RE.match(gate) or (gate not in CATALOG and gate not in tables):
                raise NetlistError("E_UNKNOWN_GATE", f"unknown gate {gate!r}", lineno, gcol)
            tt = tables.get(gate) or CATALOG[gate]
            for t, c in outs + ins:
                _check_name(t, c, lineno)
            if len(ins) != tt.n_in:
                col = ins[0][1] if ins else gcol
                raise NetlistError(
                    "E_ARITY", f"{gate} takes {tt.n_in} inputs, got {len(ins)}", lineno, col
                )
            if len(outs) != tt.m_out:
                raise NetlistError(
                    "E_ARITY", f"{gate} has {tt.m_out} outputs, got {len(outs)}", lineno, outs[0][1]
                )
            gi = GateInstance(gate, tuple(t for t, _ in ins), tuple(t for t, _ in outs), lineno)
            stmts.append(
                _Stmt("gate", [], lineno, gi, [c for _, c in ins], [c for _, c in outs])
            )
    return stmts, tables


def _find_cycle(gates: list[_Stmt]) -> Optional[_Stmt]:
    producer = {w: s for s in gates for w in s.gate.outputs}
    state: dict[int, int] = {}

    def visit(s: _Stmt) -> Optional[_Stmt]:
        state[id(s)] = 1
        for w in s.gate.inputs:
            p = producer.get(w)
            if p is None:
                continue
            mark = state.get(id(p), 0)
            if mark == 1:
                return p
            if mark == 0:
                hit = visit(p)
                if hit is not None:
                    return hit
        state[id(s)] = 2
        return None

    for s in gates:
        if state.get(id(s), 0) == 0:
            hit = visit(s)
            if hit is not None:
                return hit
    return None


def parse_netlist(text: str) -> Netlist:
    """Parse and validate; raises :class:`NetlistError` with line and column."""
    stmts, tables = _parse_lines(text)
    if not stmts or stmts[0].kind != "inputs":
        line = stmts[0].lineno if stmts else 1
        raise NetlistError("E_SYNTAX", "first statement must be 'inputs'", line, 1)
    if stmts[-1].kind != "outputs":
        raise NetlistError("E_SYNTAX", "last statement must be 'outputs'", stmts[-1].lineno, 1)
    for s in stmts[1:-1]:
        if s.kind != "gate":
            raise NetlistError("E_SYNTAX", f"unexpected '{s.kind}' statement", s.lineno, 1)
    head, body, tail = stmts[0], stmts[1:-1], stmts[-1]

    defined: dict[str, int] = {}
    for name, col in head.names:
        if name in defined:
            raise NetlistError("E_REDEFINED", f"input {name} listed twice", head.lineno, col)
        defined[name] = 0
    for s in body:
        for name, col in zip(s.gate.outputs, s.out_cols):
            if name in defined:
                raise NetlistError("E_REDEFINED", f"wire {name} assigned twice", s.lineno, col)
            defined[name] = s.lineno

    for s in body:
        for name, col in zip(s.gate.inputs, s.in_cols):
            if name not in defined:
                raise NetlistError("E_UNDEFINED_WIRE", f"wire {name} is never assigned", s.lineno, col)
    cyc = _find_cycle(body)
    if cyc is not None:
        raise NetlistError("E_CYCLE", "gates form a cycle", cyc.lineno, 1)
    for s in body:
        for name, col in zip(s.gate.inputs, s.in_cols):
            if defined[name] >= s.lineno:
                raise NetlistError(
                    "E_USE_BEFORE_DEF", f"wire {name} is read before it is assigned", s.lineno, col
                )

    readers: dict[str, int] = {}
    for s in body:
        for name, col in zip(s.gate.inputs, s.in_cols):
            if name in readers:
                raise NetlistError(
                    "E_FANOUT", f"wire {name} is read twice; copy it with FANOUT", s.lineno, col
                )
            readers[name] = s.lineno
    for name, col in tail.names:
        if name not in defined:
            raise NetlistError("E_UNDECLARED_OUTPUT", f"output {name} is never assigned", tail.lineno, col)
        if name in readers:
            raise NetlistError(
                "E_FANOUT", f"output {name} is also read by a gate; copy it with FANOUT", tail.lineno, col
            )
        readers[name] = tail.lineno

    used = {s.gate.gate for s in body}
    return Netlist(
        tuple(n for n, _ in head.names),
        tuple(s.gate for s in body),
        tuple(n for n, _ in tail.names),
        tuple(t for name, t in tables.items() if name in used),
    )


def format_netlist(nl: Netlist) -> str:
    lines = ["inputs " + " ".join(nl.inputs)]
    for t in nl.tables:
        lines.append(f"table {t.name} {t.n_in} {t.m_out}")
        lines.extend(f"{x} -> {y}" for x, y in t.rows())
    for g in nl.gates:
        lines.append(f"{' '.join(g.outputs)} = {g.gate} {' '.join(g.inputs)}")
    lines.append("outputs " + " ".join(nl.outputs))
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------- evaluation


def evaluate_classical(nl: Netlist, bits: str) -> str:
    if len(bits) != len(nl.inputs) or set(bits) - {"0", "1"}:
        raise ValidationError(f"expected {len(nl.inputs)} bits, got {bits!r}")
    values = dict(zip(nl.inputs, bits))
    for g in nl.gates:
        out = nl.table(g.gate)("".join(values[w] for w in g.inputs))
        values.update(zip(g.outputs, out))
    return "".join(values[w] for w in nl.outputs)


def _last_reads(nl: Netlist) -> dict[str, int]:
    """Index of the gate that consumes each wire (len(gates) for outputs, -1 if never)."""
    last = {w: -1 for w in nl.inputs}
    for g in nl.gates:
        last.update({w: -1 for w in g.outputs})
    for k, g in enumerate(nl.gates):
        for w in g.inputs:
            last[w] = k
    for w in nl.outputs:
        last[w] = len(nl.gates)
    return last


def simulate_channel(
    nl: Netlist, input: LogicalState, ext: Optional[ExtensionParams] = None
) -> LogicalState:
    """Run the netlist on encoded pairs, tracing out dead wires as soon as possible.

    ``ext`` selects the extension row for every NAND-shaped gate that has one.
    """
    if input.n_pairs != len(nl.inputs):
        raise ValidationError(f"netlist takes {len(nl.inputs)} pairs, input has {input.n_pairs}")
    last = _last_reads(nl)
    live = list(nl.inputs)
    state = input

    def drop_dead(state, live, step):
        dead = [i for i, w in enumerate(live) if last[w] < step]
        if dead:
            state = trace_pairs(state, dead)
            live = [w for i, w in enumerate(live) if i not in dead]
        return state, live

    state, live = drop_dead(state, live, 0)
    for k, g in enumerate(nl.gates):
        model = dilation_from_truth_table(nl.table(g.gate))
        if ext is not None and model.has_family:
            model = model.with_extension(ext)
        wires = [live.index(w) for w in g.inputs]
        grown = len(live) - model.n_in + model.m_out
        if grown > MAX_LIVE_PAIRS:
            raise CapacityError(f"line {g.line}: {grown} live pairs exceeds the cap of {MAX_LIVE_PAIRS}")
        state = apply_gate(state, model, wires)
        live = [
            g.outputs[j] if kind == "out" else live[j]
            for kind, j in output_layout(len(live), wires, model.m_out)
        ]
        state, live = drop_dead(state, live, k + 1)
    return permute_pairs(state, [live.index(w) for w in nl.outputs])


def channel_from_netlist(nl: Netlist, pins: Optional[dict[str, int]] = None):
    """The netlist as one isometry from its free inputs to (outputs, garbage).

    Pinned inputs are fixed to a logical basis value; each contributes one
    ebit to the input entanglement.
    """
    from .capacity import IsometricChannel

    pins = dict(pins or {})
    for name, bit in pins.items():
        if name not in nl.inputs:
            raise ValidationError(f"pinned wire {name!r} is not an input")
        if bit not in (0, 1):
            raise ValidationError(f"pinned value for {name} must be 0 or 1")
    free = [w for w in nl.inputs if w not in pins]
    n_free, n_all = len(free), len(nl.inputs)
    if n_free > MAX_LIVE_PAIRS:
        raise CapacityError(f"{n_free} free inputs exceeds the cap of {MAX_LIVE_PAIRS}")
    cols = np.zeros((2**n_all, 2**n_free), dtype=complex)
    for c in range(2**n_free):
        fbits = dict(zip(free, index_to_bits(c, n_free)))
        full = "".join(str(pins[w]) if w in pins else fbits[w] for w in nl.inputs)
        cols[bits_to_index(full), c] = 1.0

    live, n_pairs, garbage = list(nl.inputs), n_all, 0
    for g in nl.gates:
        model = dilation_from_truth_table(nl.table(g.gate))
        wires = [live.index(w) for w in g.inputs]
        # apply_gate_purified works on the leading len(live) pairs; garbage sits behind them
        if n_pairs + model.ancilla_pairs > MAX_PURIFIED_PAIRS:
            raise CapacityError(f"line {g.line}: purified circuit exceeds {MAX_PURIFIED_PAIRS} pairs")
        live_n = len(live)
        batch = cols.reshape(2**live_n, -1)
        out, _ = apply_gate_purified(batch, live_n, model, wires)
        new_live = live_n - model.n_in + model.m_out
        # out rows: (new live, new garbage) x (old garbage x batch)
        out = out.reshape(2**new_live, 2**model.n_garbage, 2**garbage, 2**n_free)
        garbage += model.n_garbage
        cols = out.reshape(-1, 2**n_free)
        live = [
            g.outputs[j] if kind == "out" else live[j]
            for kind, j in output_layout(live_n, wires, model.m_out)
        ]
        n_pairs = len(live) + garbage
    # outputs first, then the remaining live wires and all garbage
    order = [live.index(w) for w in nl.outputs]
    order += [i for i in range(len(live)) if i not in order]
    t = cols.reshape((2,) * n_pairs + (2**n_free,))
    t = t.transpose(order + list(range(len(live), n_pairs)) + [n_pairs])
    m_out = len(nl.outputs)
    return IsometricChannel(
        n_free, m_out, n_pairs - m_out, t.reshape(-1, 2**n_free), pinned_ebits=len(pins)
    )


# ----------------------------------------------------------------- bounds


@dataclass(frozen=True)
class GateBound:
    gate: str
    cost: float
    ratio: float
    ceiling: int


@dataclass(frozen=True, eq=False)
class BoundReport:
    e_up_circuit: float
    witness: Optional[LogicalState]
    costs: dict[str, float]
    n_gates_bound: dict[str, GateBound]
    notes: tuple[str, ...] = ()


def bound_gate_count(e_up: float, counted_gate: str) -> GateBound:
    """Lower bound on how many ``counted_gate`` instances the circuit needs."""
    from .capacity import e_cost_upper

    if counted_gate not in CATALOG:
        raise ValidationError(f"unknown gate {counted_gate!r}")
    cost = e_cost_upper(CATALOG[counted_gate])
    if cost <= 0:
        raise BoundUndefinedError(
            f"{counted_gate} has zero entanglement cost; a count bound is undefined"
        )
    ratio = max(float(e_up), 0.0) / cost
    return GateBound(counted_gate, cost, ratio, max(0, math.ceil(ratio - 1e-9)))


def circuit_bound_report(
    nl: Netlist,
    counted_gates: Sequence[str] = ("NAND",),
    cfg=None,
    pins: Optional[dict[str, int]] = None,
) -> BoundReport:
    from .capacity import OptimizerConfig, e_cost_upper, estimate_e_up_lower
    from .errors import UnavailableBoundError

    est = estimate_e_up_lower(channel_from_netlist(nl, pins), cfg or OptimizerConfig())
    costs, notes = {}, list(est.notes)
    for name in sorted(nl.gate_counts()):
        try:
            costs[name] = e_cost_upper(nl.table(name))
        except UnavailableBoundError as exc:
            notes.append(str(exc))
    if pins:
        notes.append("pinned inputs: " + ", ".join(f"{k}={v}" for k, v in sorted(pins.items())))
    notes.append("NAND-shaped gates inside a circuit use their canonical extension")
    bounds = {g: bound_gate_count(est.value, g) for g in counted_gates}
    return BoundReport(est.value, est.witness, costs, bounds, tuple(notes))


# --------------------------------------------------------------- fixtures


FULL_ADDER = """\
# sum and carry of three bits; carry is the high bit
inputs a b c
a1 a2 = FANOUT a
b1 b2 = FANOUT b
c1 c2 = FANOUT c
t = XOR a1 b1
t1 t2 = FANOUT t
sum = XOR t1 c1
n1 = NAND a2 b2
n2 = NAND c2 t2
g1 = NOT n1
g2 = NOT n2
carry = XOR g1 g2
outputs carry sum
"""


def full_adder_netlist() -> Netlist:
    return parse_netlist(FULL_ADDER)


def parity_text(n: int) -> str:
    """XOR cascade whose output is 1 when the number of zeros is odd.

    For odd ``n`` an extra input ``one`` (to be pinned to 1) flips the result.
    """
    if n < 2:
        raise ValidationError("parity needs at least 2 inputs")
    wires = [f"x{i}" for i in range(1, n + 1)]
    if n % 2:
        wires.append("one")
    lines = ["inputs " + " ".join(wires)]
    acc = wires[0]
    for k, w in enumerate(wires[1:], start=1):
        out = f"p{k}"
        lines.append(f"{out} = XOR {acc} {w}")
        acc = out
    lines.append(f"outputs {acc}")
    return "\n".join(lines) + "\n"


def parity_netlist(n: int) -> tuple[Netlist, dict[str, int]]:
    """Parity netlist and the pins it needs."""
    return parse_netlist(parity_text(n)), ({"one": 1} if n % 2 else {})


def count_table(n: int) -> TruthTable:
    m = n.bit_length()
    return TruthTable.from_function(f"COUNT{n}", n, m, lambda x: bin(x).count("1"))


def majority_text(n: int) -> str:
    """Binary count of ones; each input is copied first so the result is fully dephased."""
    tt = count_table(n)
    xs = [f"x{i}" for i in range(1, n + 1)]
    lines = ["inputs " + " ".join(xs), f"table {tt.name} {tt.n_in} {tt.m_out}"]
    lines += [f"{a} -> {b}" for a, b in tt.rows()]
    lines += [f"{x}a {x}b = FANOUT {x}" for x in xs]
    fs = [f"f{j}" for j in range(1, tt.m_out + 1)]
    lines.append(f"{' '.join(fs)} = {tt.name} " + " ".join(f"{x}a" for x in xs))
    lines.append("outputs " + " ".join(fs))
    return "\n".join(lines) + "\n"


def majority_netlist(n: int) -> Netlist:
    return parse_netlist(majority_text(n))


def random_netlist(
    rng: np.random.Generator, max_inputs: int = 5, max_gates: int = 5
) -> Netlist:
    """A random valid netlist drawn from the catalog plus an occasional random table."""
    n_in = int(rng.integers(1, max_inputs + 1))
    inputs = [f"i{k}" for k in range(n_in)]
    pool = list(inputs)
    lines = ["inputs " + " ".join(inputs)]
    names = [n for n in sorted(CATALOG) if n != "TOFFOLI"] + ["TOFFOLI", "TAB"]
    wire_id = 0
    table_done = False
    for _ in range(int(rng.integers(0, max_gates + 1))):
        name = names[int(rng.integers(len(names)))]
        if name == "TAB":
            if table_done:
                continue
            k = int(rng.integers(1, min(3, len(pool)) + 1))
            m = int(rng.integers(1, 3))
            tt = TruthTable("TAB", k, m, tuple(int(v) for v in rng.integers(0, 2**m, size=2**k)))
            lines.append(f"table TAB {k} {m}")
            lines += [f"{a} -> {b}" for a, b in tt.rows()]
            table_done = True
        else:
            tt = CATALOG[name]
        if tt.n_in > len(pool) or len(pool) - tt.n_in + tt.m_out > 8:
            continue
        picks = [pool.pop(int(rng.integers(len(pool)))) for _ in range(tt.n_in)]
        outs = [f"w{wire_id + j}" for j in range(tt.m_out)]
        wire_id += tt.m_out
        pool.extend(outs)
        lines.append(f"{' '.join(outs)} = {tt.name} {' '.join(picks)}")
    n_out = int(rng.integers(1, len(pool) + 1))
    outs = [pool[int(j)] for j in rng.permutation(len(pool))[:n_out]]
    lines.append("outputs " + " ".join(outs))
    return parse_netlist("\n".join(lines) + "\n")

"""Numerical lower bounds on entangling and disentangling capacity.

Estimates search pure logical inputs on the model's input pairs with
Nelder-Mead from seeded random starts. Gates with a free extension row are
treated adversarially: the value of an input is the minimum over extensions,
and the search maximizes that minimum.

Inside one restart the inner minimum is approximated by a pool of extensions
(the canonical row plus any worse rows found so far). After the outer search
stops, a full inner minimization at the candidate input certifies the value;
if it finds a worse extension, that row joins the pool and the outer search
resumes. Restarts draw from independent ``(seed, restart)`` streams, so the
best value is non-decreasing in the restart count.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import minimize

from .encoding import LogicalState, fast_walsh_hadamard
from .errors import CapacityError, UnavailableBoundError, ValidationError
from ._kernel import ext_from_reals, gain_and_input_ebits, state_from_reals, with_column
from .gates import (
    CATALOG,
    COST_CONSTRUCTIONS,
    CostConstruction,
    DilationModel,
    TruthTable,
    _extension_column,
    apply_gate,
)
from .measures import ExtensionParams, gain_lower_bound, pure_entanglement

MAX_SEARCH_PAIRS = 10
CANONICAL_EXTENSION = ExtensionParams()
_CANONICAL_REALS = np.array([0, 0, 0, 1, 0, 0, 0, 0], dtype=float)


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 32
    max_iterations: int = 2000
    simplex_tolerance: float = 1e-9
    seed: int = 0
    inner_restarts: int = 3
    extension_mode: str = "maxmin"

    def __post_init__(self):
        if self.restarts < 1:
            raise ValidationError("restarts must be at least 1")
        if self.simplex_tolerance <= 0:
            raise ValidationError("simplex_tolerance must be positive")
        if self.max_iterations < 1:
            raise ValidationError("max_iterations must be at least 1")
        if self.extension_mode not in ("maxmin", "maxmax"):
            raise ValidationError(f"unknown extension mode {self.extension_mode!r}")


@dataclass(frozen=True, eq=False)
class CapacityEstimate:
    value: float
    witness: LogicalState
    worst_extension: Optional[ExtensionParams]
    iterations_used: int
    quantity: str = "e_up"
    converged: bool = True
    notes: tuple[str, ...] = field(default_factory=tuple)


@dataclass(frozen=True, eq=False)
class IsometricChannel:
    """Input pairs -> (kept pairs, garbage pairs) as one isometry.

    ``pinned_ebits`` counts input pairs fixed to a logical basis value; each
    carries one ebit that belongs to the input entanglement.
    """

    n_in: int
    m_out: int
    n_garbage: int
    isometry: np.ndarray
    free_input: Optional[int] = None
    truth_table: Optional[TruthTable] = None
    pinned_ebits: int = 0

    @property
    def has_family(self) -> bool:
        return self.free_input is not None

    def isometry_for(self, ext: Optional[ExtensionParams]) -> np.ndarray:
        if ext is None or not self.has_family:
            return self.isometry
        w = self.isometry.copy()
        w[:, self.free_input] = _extension_column(self.truth_table, self.free_input, ext)
        return w


def channel_of(model) -> IsometricChannel:
    if isinstance(model, IsometricChannel):
        return model
    if isinstance(model, DilationModel):
        return IsometricChannel(
            model.n_in,
            model.m_out,
            model.n_garbage,
            model.isometry,
            model.free_input,
            model.truth_table,
        )
    from .circuit import Netlist, channel_from_netlist

    if isinstance(model, Netlist):
        return channel_from_netlist(model)
    raise ValidationError(f"cannot build a channel from {type(model).__name__}")


_HADAMARD: dict[int, np.ndarray] = {}


def _hadamard(dim: int) -> np.ndarray:
    if dim not in _HADAMARD:
        _HADAMARD[dim] = np.array([fast_walsh_hadamard(e) for e in np.eye(dim)])
    return _HADAMARD[dim]


def _ext_vector(y: np.ndarray) -> np.ndarray:
    return ext_from_reals(np.ascontiguousarray(y, dtype=float))


def _objective(ch: IsometricChannel, quantity: str):
    """value(psi, ext_vector_or_None) for the requested quantity."""
    sign = 1.0 if quantity == "e_up" else -1.0
    base = np.ascontiguousarray(ch.isometry, dtype=complex)
    m_dim, g_dim = 2**ch.m_out, 2**ch.n_garbage
    h_out, h_in = _hadamard(m_dim), _hadamard(2**ch.n_in)
    if ch.has_family:
        y_star = ch.truth_table.outputs[ch.free_input]
        others = [g for g in range(4) if g != ch.free_input]
        rows = np.array([(y_star << 2) | g for g in others + [ch.free_input]])

    def value(psi: np.ndarray, ext: Optional[np.ndarray]) -> float:
        w = base if ext is None else with_column(base, ch.free_input, rows, ext)
        gain, e_in = gain_and_input_ebits(w, psi, m_dim, g_dim, h_out, h_in)
        return sign * (gain - e_in - ch.pinned_ebits)

    return value


def _to_state(x: np.ndarray) -> np.ndarray:
    return state_from_reals(np.ascontiguousarray(x, dtype=float))


def _nm(fun, x0, cfg: OptimizerConfig):
    return minimize(
        fun,
        x0,
        method="Nelder-Mead",
        options={
            "maxiter": cfg.max_iterations,
            "xatol": cfg.simplex_tolerance,
            "fatol": cfg.simplex_tolerance,
            "adaptive": x0.size > 4,
        },
    )


def _inner(value, psi, cfg: OptimizerConfig, rng: np.random.Generator, maximize: bool = False):
    """Extremize over extension rows at fixed input. Returns (ext, value, iterations)."""
    sign = -1.0 if maximize else 1.0
    canonical = CANONICAL_EXTENSION.as_vector()
    starts = [_CANONICAL_REALS] + [rng.normal(size=8) for _ in range(cfg.inner_restarts)]
    best_ext, best_val, iters = canonical, value(psi, canonical), 0
    for y0 in starts:
        res = _nm(lambda y: sign * value(psi, _ext_vector(y)), y0, cfg)
        iters += res.nit
        ext = _ext_vector(res.x)
        val = value(psi, ext)
        if sign * val < sign * best_val:
            best_ext, best_val = ext, val
    return best_ext, best_val, iters


def _check_size(ch: IsometricChannel) -> None:
    if ch.n_in > MAX_SEARCH_PAIRS:
        raise CapacityError(f"{ch.n_in} input pairs exceeds the search cap of {MAX_SEARCH_PAIRS}")


def _structured_inputs(n: int) -> list[np.ndarray]:
    """Logical basis strings (n ebits each) and Hadamard rows (product states)."""
    dim = 2**n
    eye = np.eye(dim, dtype=complex)
    rows = [fast_walsh_hadamard(e) / np.sqrt(dim) for e in eye]
    return list(eye) + rows


def _search(model, cfg: OptimizerConfig, quantity: str) -> CapacityEstimate:
    ch = channel_of(model)
    _check_size(ch)
    value = _objective(ch, quantity)
    dim = 2**ch.n_in
    family = ch.has_family
    maxmax = family and cfg.extension_mode == "maxmax"
    best = None
    total_iters = 0
    all_converged = True

    def certify(psi, upper, rng):
        """Full inner extremum; skipped when even ``upper`` cannot win (maxmin only)."""
        nonlocal total_iters
        if not family:
            return None, value(psi, None)
        if not maxmax and best is not None and upper <= best[0] + 1e-9:
            return None, -np.inf
        ext, val, it = _inner(value, psi, cfg, rng, maximize=maxmax)
        total_iters += it
        return ext, val

    def consider(val, psi, ext):
        nonlocal best
        if best is None or val > best[0]:
            best = (val, psi, ext)

    canonical = CANONICAL_EXTENSION.as_vector() if family else None
    for i, psi in enumerate(_structured_inputs(ch.n_in)):
        rng = np.random.default_rng([cfg.seed, 1_000_000 + i])
        ext, val = certify(psi, value(psi, canonical), rng)
        consider(val, psi, ext)

    for r in range(cfg.restarts):
        rng = np.random.default_rng([cfg.seed, r])
        x = rng.normal(size=2 * dim)
        if maxmax:
            res = _nm(
                lambda z: -value(_to_state(z[: 2 * dim]), _ext_vector(z[2 * dim:])),
                np.concatenate([x, rng.normal(size=8)]),
                cfg,
            )
            total_iters += res.nit
            all_converged &= bool(res.success)
            psi = _to_state(res.x[: 2 * dim])
            ext, val = certify(psi, None, rng)
            joint = value(psi, _ext_vector(res.x[2 * dim:]))
            if joint > val:
                ext, val = _ext_vector(res.x[2 * dim:]), joint
            consider(val, psi, ext)
            continue
        pool = [canonical]
        for _ in range(4):
            res = _nm(lambda z: -min(value(_to_state(z), e) for e in pool), x, cfg)
            total_iters += res.nit
            all_converged &= bool(res.success)
            x = res.x
            psi = _to_state(x)
            pooled = min(value(psi, e) for e in pool)
            ext, val = certify(psi, pooled, rng)
            if ext is None or val >= pooled - 1e-10:
                break
            pool.append(ext)
        consider(val, psi, ext)

    val, psi, ext = best
    notes = []
    if not all_converged:
        notes.append("some restarts stopped at the iteration cap; value is still a valid bound")
    if family:
        notes.append(f"extension handling: {cfg.extension_mode}")
    return CapacityEstimate(
        float(val),
        LogicalState(ch.n_in, "pure", psi),
        ExtensionParams.from_vector(ext) if ext is not None else None,
        total_iters,
        quantity,
        all_converged,
        tuple(notes),
    )


def entangling_gain(model, input: LogicalState, ext: Optional[ExtensionParams] = None) -> float:
    """Entanglement of the output (hashing bound) minus that of the pure input."""
    if input.kind != "pure":
        raise ValidationError("entangling_gain takes a pure input")
    if isinstance(model, DilationModel):
        if input.n_pairs != model.n_in:
            raise ValidationError(f"model takes {model.n_in} pairs, input has {input.n_pairs}")
        if ext is not None:
            model = model.with_extension(ext)
        out = apply_gate(input, model, range(model.n_in))
        return gain_lower_bound(out) - pure_entanglement(input)
    from .circuit import Netlist, simulate_channel

    if isinstance(model, Netlist):
        if input.n_pairs != len(model.inputs):
            raise ValidationError(
                f"netlist takes {len(model.inputs)} pairs, input has {input.n_pairs}"
            )
        return gain_lower_bound(simulate_channel(model, input)) - pure_entanglement(input)
    raise ValidationError(f"unsupported model type {type(model).__name__}")


def estimate_e_up_lower(model, cfg: OptimizerConfig = OptimizerConfig()) -> CapacityEstimate:
    return _search(model, cfg, "e_up")


def estimate_e_down_lower(model, cfg: OptimizerConfig = OptimizerConfig()) -> CapacityEstimate:
    return _search(model, cfg, "e_down")


def evaluate_witness(
    model, witness: LogicalState, cfg: OptimizerConfig = OptimizerConfig(), quantity: str = "e_up"
) -> CapacityEstimate:
    """Value certified by one fixed input, under the worst extension."""
    ch = channel_of(model)
    if witness.kind != "pure" or witness.n_pairs != ch.n_in:
        raise ValidationError("witness must be a pure state on the model's input pairs")
    value = _objective(ch, quantity)
    if not ch.has_family:
        return CapacityEstimate(float(value(witness.data, None)), witness, None, 0, quantity)
    rng = np.random.default_rng([cfg.seed, 2_000_000])
    maxmax = cfg.extension_mode == "maxmax"
    ext, val, iters = _inner(value, witness.data, cfg, rng, maximize=maxmax)
    return CapacityEstimate(
        float(val), witness, ExtensionParams.from_vector(ext), iters, quantity
    )


def e_cost_upper(tt: TruthTable, construction: Optional[CostConstruction] = None) -> float:
    """Ebits consumed by an explicit construction of ``tt``."""
    if tt.name in COST_CONSTRUCTIONS and CATALOG.get(tt.name) == tt:
        return COST_CONSTRUCTIONS[tt.name].ebits
    for name, table in CATALOG.items():
        if (table.n_in, table.m_out, table.outputs) == (tt.n_in, tt.m_out, tt.outputs):
            return COST_CONSTRUCTIONS[name].ebits
    if tt.is_reversible and tt.outputs == tuple(range(2**tt.n_in)):
        return 0.0
    if construction is not None:
        return construction.ebits
    raise UnavailableBoundError(f"{tt.name}: no construction declared, cost bound unavailable")

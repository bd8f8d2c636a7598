"""Command-line front end: ``nonlocal-logic <command> ...``.

Exit codes: 0 on success, 2 for invalid input, 3 when a problem exceeds the
simulation caps.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path
from typing import Optional

import numpy as np

from .capacity import CapacityEstimate, OptimizerConfig
from .circuit import circuit_bound_report, parse_netlist
from .errors import CapacityError, ValidationError
from .repro import fig2_table, gate_report, oracle_parity, selftest

DIGITS = 12


def _r(x: float) -> float:
    return float(f"{float(x):.{DIGITS}g}")


def _witness(est: Optional[CapacityEstimate]):
    if est is None:
        return None
    return [[_r(a.real), _r(a.imag)] for a in np.asarray(est.witness.data)]


def _estimate(est: CapacityEstimate) -> dict:
    out = {"value": _r(est.value), "witness": _witness(est), "iterations": est.iterations_used}
    if est.worst_extension is not None:
        out["worst_extension"] = [[_r(v.real), _r(v.imag)] for v in est.worst_extension.as_vector()]
    return out


def _report(command: str, inputs: dict, seed: int) -> dict:
    return {
        "command": command,
        "inputs": inputs,
        "seed": seed,
        "profiles": {},
        "estimates": {},
        "bounds": {},
        "notes": [],
    }


def _config(args) -> OptimizerConfig:
    kw = {"seed": args.seed}
    if args.restarts is not None:
        kw["restarts"] = args.restarts
    return OptimizerConfig(**kw)


def cmd_gate(args) -> tuple[dict, str]:
    cfg = _config(args)
    res = gate_report(args.name, cfg)
    rep = _report("gate", {"name": args.name}, args.seed)
    prof = res["profile"]
    if prof is not None:
        rep["profiles"][args.name] = {k: (_r(v) if isinstance(v, float) else v) for k, v in asdict(prof).items()}
    else:
        rep["notes"].append(f"{args.name}: no built-in profile; capacities below are numerical only")
    rep["profiles"].setdefault(args.name, {})["e_cost_upper"] = _r(res["e_cost_upper"])
    for key in ("e_up", "e_down", "e_up_uniform"):
        rep["estimates"][key] = _estimate(res[key])
    rep["notes"].extend(res["e_up"].notes)
    lines = [f"gate {args.name}"]
    if prof is not None:
        lines.append(
            f"  profile: e_up >= {prof.e_up_lower:.6f}, e_down >= {prof.e_down_lower:.6f}, "
            f"e_cost <= {prof.e_cost_upper:g}"
        )
        lines.append(f"  notes: {prof.notes}")
    lines.append(f"  e_cost upper bound: {res['e_cost_upper']:g}")
    lines.append(f"  e_up search (max over inputs): {res['e_up'].value:.6f}")
    lines.append(f"  e_up at uniform test input, worst extension: {res['e_up_uniform'].value:.6f}")
    lines.append(f"  e_down search: {res['e_down'].value:.6f}")
    return rep, "\n".join(lines) + "\n"


def _parse_pins(items) -> dict[str, int]:
    pins = {}
    for item in items or []:
        name, sep, bit = item.partition("=")
        if not sep or bit not in ("0", "1"):
            raise ValidationError(f"pin must look like name=0 or name=1, got {item!r}")
        pins[name] = int(bit)
    return pins


def cmd_circuit(args) -> tuple[dict, str]:
    try:
        text = Path(args.file).read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read {args.file}: {exc.strerror}") from exc
    nl = parse_netlist(text)
    pins = _parse_pins(args.pin)
    counted = args.count_gate or ["NAND"]
    rep_b = circuit_bound_report(nl, counted, _config(args), pins)
    rep = _report("circuit", {"file": str(args.file), "count_gate": counted, "pins": pins}, args.seed)
    rep["profiles"]["costs"] = {k: _r(v) for k, v in rep_b.costs.items()}
    rep["profiles"]["gate_counts"] = nl.gate_counts()
    rep["estimates"]["e_up"] = {
        "value": _r(rep_b.e_up_circuit),
        "witness": [[_r(a.real), _r(a.imag)] for a in rep_b.witness.data],
        "iterations": None,
    }
    for g, b in rep_b.n_gates_bound.items():
        rep["bounds"][g] = {"ratio": _r(b.ratio), "ceiling": b.ceiling}
    rep["notes"].extend(rep_b.notes)
    lines = [f"circuit {args.file}", f"  e_up lower bound: {rep_b.e_up_circuit:.6f}"]
    for g, b in rep_b.n_gates_bound.items():
        lines.append(f"  N_{g} >= {b.ratio:.6f} (at least {b.ceiling})")
    return rep, "\n".join(lines) + "\n"


def cmd_parity(args) -> tuple[dict, str]:
    res = oracle_parity(args.n, _config(args), analytic=args.analytic)
    rep = _report("parity", {"n": args.n, "analytic": args.analytic}, args.seed)
    est = {"value": _r(res.e_up), "witness": _witness(res.estimate), "iterations": None}
    if res.estimate is not None:
        est["iterations"] = res.estimate.iterations_used
    rep["estimates"]["e_up"] = est
    rep["estimates"]["uniform_gain"] = {"value": _r(res.uniform_gain), "witness": None, "iterations": 0}
    rep["bounds"]["NAND"] = {"ratio": _r(res.ratio), "ceiling": res.ceiling}
    rep["notes"].extend([f"path: {res.path}", *res.notes])
    text = f"parity n={args.n}\n  e_up estimate: {res.e_up:.6g}\n  N_NAND >= {res.ceiling}\n"
    return rep, text


def cmd_fig2(args) -> tuple[dict, str]:
    csv_text = fig2_table(args.n_list)
    rep = _report("fig2", {"n_list": args.n_list}, args.seed)
    rep["estimates"]["rows"] = csv_text.splitlines()
    rep["notes"].append("fit_red and fit_blue are the published fit lines, not recomputed values")
    return rep, csv_text


def cmd_selftest(args) -> tuple[dict, str]:
    res = selftest(args.seed)
    rep = _report("selftest", {}, args.seed)
    rep["estimates"] = {
        k: {"passed": v["passed"], "total": v["total"], "max_error": _r(v["max_error"])}
        for k, v in res["checks"].items()
    }
    rep["notes"].append("all checks passed" if res["ok"] else "some checks FAILED")
    lines = [f"{k}: {v['passed']}/{v['total']} (max error {v['max_error']:.3g})" for k, v in res["checks"].items()]
    return rep, "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    def globals_(suppress: bool) -> argparse.ArgumentParser:
        # subcommands repeat the global flags without defaults so they never
        # overwrite a value given before the subcommand name
        d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
        g = argparse.ArgumentParser(add_help=False)
        g.add_argument("--seed", type=int, default=d(0))
        g.add_argument("--restarts", type=int, default=d(None), help="optimizer restarts (default 32)")
        g.add_argument("--json", action="store_true", default=d(False), help="print a JSON report")
        g.add_argument("--out", type=Path, default=d(None), help="write output to this file")
        return g

    common = globals_(suppress=True)
    p = argparse.ArgumentParser(
        prog="nonlocal-logic", parents=[globals_(suppress=False)], description=__doc__.splitlines()[0]
    )
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gate", parents=[common], help="profile and capacity estimates of a catalog gate")
    g.add_argument("name")
    g.set_defaults(func=cmd_gate)

    c = sub.add_parser("circuit", parents=[common], help="gate-count bound for a netlist file")
    c.add_argument("file")
    c.add_argument("--count-gate", action="append", metavar="GATE")
    c.add_argument("--pin", action="append", metavar="NAME=BIT", help="fix an input to a constant")
    c.set_defaults(func=cmd_circuit)

    q = sub.add_parser("parity", parents=[common], help="parity example")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--analytic", action="store_true", help="skip simulation")
    q.set_defaults(func=cmd_parity)

    f = sub.add_parser("fig2", parents=[common], help="majority-count gains as CSV")
    f.add_argument("--n-list", type=int, nargs="+", required=True)
    f.set_defaults(func=cmd_fig2)

    s = sub.add_parser("selftest", parents=[common], help="oracle-equivalence suite")
    s.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        rep, text = args.func(args)
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out = json.dumps(rep, sort_keys=True, indent=2) + "\n" if args.json else text
    if args.out is not None:
        args.out.write_text(out, encoding="utf-8")
    else:
        sys.stdout.write(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())

import json

import pytest

from nonlocal_logic.cli import build_parser, main

ONE_NAND = "inputs a b\nw = NAND a b\noutputs w\n"
KEYS = {"command", "inputs", "seed", "profiles", "estimates", "bounds", "notes"}


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_global_flags_before_or_after_command():
    p = build_parser()
    assert p.parse_args(["--seed", "7", "selftest"]).seed == 7
    assert p.parse_args(["selftest", "--seed", "7"]).seed == 7
    assert p.parse_args(["selftest"]).seed == 0


def test_fig2_csv(capsys):
    code, out, _ = run(["fig2", "--n-list", "3", "64"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "n,m,gain,nand_bound,fit_red,fit_blue"
    assert lines[1].startswith("3,2,0.188722,0.062907")


def test_fig2_json_schema(capsys):
    code, out, _ = run(["--json", "fig2", "--n-list", "3"], capsys)
    rep = json.loads(out)
    assert code == 0 and set(rep) == KEYS and rep["command"] == "fig2"


def test_circuit_json(tmp_path, capsys):
    f = tmp_path / "nand.net"
    f.write_text(ONE_NAND)
    code, out, _ = run(["circuit", str(f), "--count-gate", "NAND", "--restarts", "2", "--json"], capsys)
    rep = json.loads(out)
    assert code == 0 and set(rep) == KEYS
    assert rep["bounds"]["NAND"]["ceiling"] == 1
    assert rep["estimates"]["e_up"]["value"] > 0.18


def test_circuit_diagnostic_exit_code(tmp_path, capsys):
    f = tmp_path / "bad.net"
    f.write_text("inputs a b\nw = NAND a\noutputs w\n")
    code, _, err = run(["circuit", str(f)], capsys)
    assert code == 2 and "E_ARITY" in err and "2:" in err


def test_zero_cost_count_gate_exit_code(tmp_path, capsys):
    f = tmp_path / "nand.net"
    f.write_text(ONE_NAND)
    code, _, err = run(["circuit", str(f), "--count-gate", "XOR", "--restarts", "1"], capsys)
    assert code == 2 and "zero entanglement cost" in err


def test_missing_file_exit_code(tmp_path, capsys):
    code, _, _ = run(["circuit", str(tmp_path / "nope.net")], capsys)
    assert code == 2


def test_capacity_exit_code(tmp_path, capsys):
    names = " ".join(f"x{i}" for i in range(11))
    f = tmp_path / "wide.net"
    f.write_text(f"inputs {names}\noutputs {names}\n")
    code, _, _ = run(["circuit", str(f), "--restarts", "1"], capsys)
    assert code == 3


def test_bad_pin(tmp_path, capsys):
    f = tmp_path / "nand.net"
    f.write_text(ONE_NAND)
    code, _, _ = run(["circuit", str(f), "--pin", "a=2"], capsys)
    assert code == 2


def test_parity_command(capsys):
    code, out, _ = run(["parity", "--n", "2", "--restarts", "2", "--json"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["bounds"]["NAND"]["ceiling"] == 0
    assert abs(rep["bounds"]["NAND"]["ratio"]) < 1e-6


def test_gate_command_text(capsys):
    code, out, _ = run(["gate", "RESET", "--restarts", "2"], capsys)
    assert code == 0 and "e_cost upper bound: 1" in out


def test_unknown_gate(capsys):
    code, _, _ = run(["gate", "FOO", "--restarts", "1"], capsys)
    assert code == 2


def test_out_file(tmp_path, capsys):
    dest = tmp_path / "rep.json"
    code, out, _ = run(["fig2", "--n-list", "5", "--json", "--out", str(dest)], capsys)
    assert code == 0 and out == ""
    assert json.loads(dest.read_text())["inputs"] == {"n_list": [5]}


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as info:
        main(["parity"])
    assert info.value.code == 2

import csv
import io
import math
import time

import pytest

from nonlocal_logic.capacity import OptimizerConfig
from nonlocal_logic.errors import ValidationError
from nonlocal_logic.measures import binary_entropy
from nonlocal_logic.repro import (
    fig2_table,
    oracle_majority_gain,
    oracle_parity,
    selftest,
    simulated_majority_gain,
)


def test_oracle_small_cases():
    r1 = oracle_majority_gain(1)
    assert (r1.m, r1.gain) == (1, 0.0)
    r3 = oracle_majority_gain(3)
    assert r3.m == 2
    assert abs(r3.gain - 0.188722) < 1e-6
    assert abs(r3.nand_bound - 0.062907) < 1e-6
    assert r3.nand_bound_ceiling == 1


def test_oracle_closed_form_n3():
    # binomial weights (1, 3, 3, 1) / 8 give S = 1 + H(1/4)
    assert abs(oracle_majority_gain(3).gain - (1 - binary_entropy(0.25))) < 1e-12


def test_oracle_range():
    with pytest.raises(ValidationError):
        oracle_majority_gain(0)
    with pytest.raises(ValidationError):
        oracle_majority_gain(2**20 + 1)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_oracle_matches_simulation(n):
    assert abs(oracle_majority_gain(n).gain - simulated_majority_gain(n)) < 1e-8


def test_oracle_large_n_is_fast():
    t = time.perf_counter()
    row = oracle_majority_gain(2**20)
    assert time.perf_counter() - t < 1.0
    assert row.m == 21 and 0 <= row.gain <= row.m


def test_gain_cap_and_bound_relation():
    for n in list(range(1, 70)) + [100, 1000, 4097, 65535]:
        row = oracle_majority_gain(n)
        assert row.gain <= row.m + 1e-9
        assert row.m == math.ceil(math.log2(n + 1))
        assert abs(row.nand_bound - row.gain / 3) < 1e-15


def test_fig2_csv():
    text = fig2_table([3, 7, 15, 31, 63, 64])
    rows = list(csv.DictReader(io.StringIO(text)))
    assert text.splitlines()[0] == "n,m,gain,nand_bound,fit_red,fit_blue"
    assert float(rows[-1]["fit_blue"]) == pytest.approx(2.9986, abs=1e-4)
    gains = [float(r["gain"]) for r in rows[:5]]
    assert gains == sorted(gains)


def test_parity_simulated():
    cfg = OptimizerConfig(restarts=3)
    for n in (2, 4):
        rep = oracle_parity(n, cfg)
        assert rep.e_up <= 1e-6 and rep.ceiling == 0
        assert abs(rep.uniform_gain) < 1e-10
    odd = oracle_parity(3, cfg)
    assert odd.e_up <= 1e-6 and odd.ceiling == 0
    assert any("pinned" in n for n in odd.notes)


def test_parity_analytic_and_range():
    rep = oracle_parity(1000)
    assert rep.path == "analytic" and rep.e_up == 0 and rep.ceiling == 0
    with pytest.raises(ValidationError):
        oracle_parity(1)


def test_selftest_small_and_deterministic():
    a = selftest(3, n_states=20, n_netlists=10)
    b = selftest(3, n_states=20, n_netlists=10)
    assert a == b and a["ok"]

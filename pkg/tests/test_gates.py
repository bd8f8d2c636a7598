import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nonlocal_logic.encoding import LogicalState, bits_to_index
from nonlocal_logic.errors import ConfigurationError, ValidationError
from nonlocal_logic.gates import (
    CATALOG,
    COST_CONSTRUCTIONS,
    NAND_TEST_STATE_GAIN,
    NonlocalProfile,
    TruthTable,
    apply_gate,
    apply_gate_purified,
    builtin_profile,
    dilation_from_truth_table,
    identity_table,
    output_layout,
    trace_pairs,
)
from nonlocal_logic.measures import ExtensionParams, binary_entropy
from nonlocal_logic.qsim import check_unitary


def fidelity(ls: LogicalState, bits: str) -> float:
    y = bits_to_index(bits)
    return abs(ls.data[y]) ** 2 if ls.kind == "pure" else ls.data[y, y].real


def test_nand_canonical_unitary_rows():
    u = dilation_from_truth_table(CATALOG["NAND"]).logical_unitary
    rows = {"000": "100", "010": "101", "100": "110", "110": "011"}
    for src, dst in rows.items():
        col = u[:, bits_to_index(src)]
        assert abs(col[bits_to_index(dst)] - 1) < 1e-15


def test_nand_alternative_extension_row():
    m = dilation_from_truth_table(CATALOG["NAND"], ExtensionParams(a=1, d=0))
    col = m.logical_unitary[:, bits_to_index("110")]
    assert abs(col[bits_to_index("000")] - 1) < 1e-15


def test_reset_swaps_in_an_ancilla():
    m = dilation_from_truth_table(CATALOG["RESET"])
    assert m.ancilla_pairs == 1 and m.n_garbage == 1
    # |x>|0> -> |0>|x>
    assert np.allclose(m.isometry, np.eye(4)[:, [0, 1]])


def test_identity_needs_nothing():
    m = dilation_from_truth_table(identity_table(1))
    assert m.ancilla_pairs == 0 and m.discarded == ()
    assert np.allclose(m.logical_unitary, np.eye(2))


def test_xor_keeps_first_input_as_garbage():
    m = dilation_from_truth_table(CATALOG["XOR"])
    assert m.ancilla_pairs == 0 and m.garbage == (0, 0, 1, 1)


def test_only_nand_shaped_tables_have_a_family():
    fam = {n for n, t in CATALOG.items() if dilation_from_truth_table(t).has_family}
    assert fam == {"NAND", "NOR", "AND", "OR"}
    with pytest.raises(ConfigurationError):
        dilation_from_truth_table(CATALOG["XOR"], ExtensionParams())


@pytest.mark.parametrize("name", sorted(CATALOG))
def test_catalog_unitaries_are_unitary(name):
    check_unitary(dilation_from_truth_table(CATALOG[name]).logical_unitary)


@pytest.mark.parametrize("name", sorted(CATALOG))
def test_classical_faithfulness(name):
    tt = CATALOG[name]
    m = dilation_from_truth_table(tt)
    for x, y in tt.rows():
        out = apply_gate(LogicalState.basis(x), m, range(tt.n_in))
        assert abs(fidelity(out, y) - 1) < 1e-12
        assert abs(np.trace(out.density()).real - 1) < 1e-10


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_extension_irrelevant_on_classical_inputs(seed):
    rng = np.random.default_rng(seed)
    ext = ExtensionParams.from_reals(rng.normal(size=8))
    for name in ("NAND", "NOR", "AND", "OR"):
        tt = CATALOG[name]
        base = dilation_from_truth_table(tt)
        other = base.with_extension(ext)
        for x, _ in tt.rows():
            a = apply_gate(LogicalState.basis(x), base, [0, 1]).density()
            b = apply_gate(LogicalState.basis(x), other, [0, 1]).density()
            assert np.max(np.abs(a - b)) < 1e-12


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_extended_unitary_stays_unitary(seed):
    rng = np.random.default_rng(seed)
    ext = ExtensionParams.from_reals(rng.normal(size=8))
    check_unitary(dilation_from_truth_table(CATALOG["NAND"], ext).logical_unitary)


def test_xor_on_basis_11():
    out = apply_gate(LogicalState.basis("11"), dilation_from_truth_table(CATALOG["XOR"]), [0, 1])
    assert abs(fidelity(out, "0") - 1) < 1e-15
    assert np.allclose(out.density(), [[1, 0], [0, 0]])


def test_nand_on_test_state():
    m = dilation_from_truth_table(CATALOG["NAND"])
    out = apply_gate(LogicalState.uniform(2), m, [0, 1])
    assert np.allclose(out.data, np.diag([0.25, 0.75]), atol=1e-15)


def test_nand_alternative_extension_on_test_state():
    m = dilation_from_truth_table(CATALOG["NAND"], ExtensionParams(a=1, d=0))
    out = apply_gate(LogicalState.uniform(2), m, [0, 1])
    assert np.allclose(out.data, [[0.25, 0.25], [0.25, 0.75]], atol=1e-15)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_family_output_depends_on_s(seed):
    rng = np.random.default_rng(seed)
    ext = ExtensionParams.from_reals(rng.normal(size=8))
    m = dilation_from_truth_table(CATALOG["NAND"], ext)
    out = apply_gate(LogicalState.uniform(2), m, [0, 1]).data
    expected = np.array([[0.25, ext.s / 4], [np.conj(ext.s) / 4, 0.75]])
    assert np.max(np.abs(out - expected)) < 1e-12


def test_gate_on_inner_wires_keeps_the_rest():
    # NOT on the middle pair of |010>
    m = dilation_from_truth_table(CATALOG["NOT"])
    out = apply_gate(LogicalState.basis("010"), m, [1])
    assert abs(fidelity(out, "000") - 1) < 1e-15


def test_fanout_appends_its_extra_output():
    m = dilation_from_truth_table(CATALOG["FANOUT"])
    out = apply_gate(LogicalState.basis("10"), m, [0])
    # wire 0 becomes the first copy, the second copy goes last
    assert abs(fidelity(out, "101") - 1) < 1e-15
    assert output_layout(2, [0], 2) == [("out", 0), ("rest", 1), ("out", 1)]


def test_wire_errors():
    m = dilation_from_truth_table(CATALOG["XOR"])
    with pytest.raises(ValidationError):
        apply_gate(LogicalState.basis("01"), m, [0, 0])
    with pytest.raises(ValidationError):
        apply_gate(LogicalState.basis("01"), m, [0, 2])
    with pytest.raises(ValidationError):
        apply_gate(LogicalState.basis("01"), m, [0])


def test_purified_application_matches_mixed():
    rng = np.random.default_rng(2)
    v = rng.normal(size=8) + 1j * rng.normal(size=8)
    ls = LogicalState.pure(v, normalize=True)
    m = dilation_from_truth_table(CATALOG["NAND"])
    full, pairs = apply_gate_purified(ls.data.reshape(-1, 1), 3, m, [2, 0])
    assert pairs == 4  # two live pairs, two garbage pairs
    pure = LogicalState.pure(full[:, 0])
    reduced = trace_pairs(pure, [2, 3])
    assert np.allclose(reduced.data, apply_gate(ls, m, [2, 0]).data, atol=1e-12)


def test_truth_table_validation():
    with pytest.raises(ValidationError):
        TruthTable("BAD", 2, 1, (0, 1, 2, 0))
    with pytest.raises(ValidationError):
        TruthTable("BAD", 2, 1, (0, 1))
    tt = TruthTable.from_rows("T", {"0": "1", "1": "0"})
    assert tt == CATALOG["NOT"].__class__("T", 1, 1, (1, 0))
    assert CATALOG["TOFFOLI"]("111") == "110"
    assert CATALOG["CNOT"]("10") == "11"


def test_builtin_profiles():
    assert builtin_profile("XOR").e_cost_upper == 0
    nand = builtin_profile("NAND")
    assert abs(nand.e_up_lower - 0.188722) < 1e-6 and nand.e_cost_upper == 3
    assert builtin_profile("RESET").e_down_lower == 0
    assert (builtin_profile("RESET").e_up_lower, builtin_profile("RESET").e_cost_upper) == (1, 1)
    assert builtin_profile("TOFFOLI").e_cost_upper == 2
    for name in ("NOT", "CNOT"):
        p = builtin_profile(name)
        assert (p.e_up_lower, p.e_down_lower, p.e_cost_upper) == (0, 0, 0)
    nor = builtin_profile("NOR")
    assert (nor.e_up_lower, nor.e_down_lower, nor.e_cost_upper) == (
        nand.e_up_lower,
        nand.e_down_lower,
        nand.e_cost_upper,
    )
    with pytest.raises(ValidationError):
        builtin_profile("FOO")
    assert NAND_TEST_STATE_GAIN == 1 - binary_entropy(0.25)


def test_profile_invariant():
    with pytest.raises(ValidationError):
        NonlocalProfile(2.0, 0.0, 1.0)


def test_every_catalog_gate_has_a_construction():
    assert set(COST_CONSTRUCTIONS) == set(CATALOG)


def test_random_tables_dilate_faithfully():
    rng = np.random.default_rng(11)
    for _ in range(40):
        n, m = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        tt = TruthTable("R", n, m, tuple(int(v) for v in rng.integers(0, 2**m, size=2**n)))
        model = dilation_from_truth_table(tt)
        check_unitary(model.logical_unitary)
        for x, y in tt.rows():
            out = apply_gate(LogicalState.basis(x), model, range(n))
            assert abs(fidelity(out, y) - 1) < 1e-12


def test_mixed_input_path():
    m = dilation_from_truth_table(CATALOG["NAND"])
    ls = LogicalState.uniform(2)
    a = apply_gate(ls, m, [0, 1])
    b = apply_gate(ls.to_mixed(), m, [0, 1])
    assert np.allclose(a.data, b.data, atol=1e-14)
    for bits in itertools.product("01", repeat=2):
        s = LogicalState.basis("".join(bits)).to_mixed()
        assert abs(np.trace(apply_gate(s, m, [1, 0]).data).real - 1) < 1e-12

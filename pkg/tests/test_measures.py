import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nonlocal_logic.encoding import LogicalState, encode_bit, encode_logical
from nonlocal_logic.errors import DomainError, ValidationError
from nonlocal_logic.measures import (
    ExtensionParams,
    binary_entropy,
    gain_lower_bound,
    pure_entanglement,
    ree_nand_family,
    von_neumann_entropy,
)
from nonlocal_logic.qsim import Partition, StateVector, pair_labels, to_density

H_QUARTER = 0.8112781244591328


def test_binary_entropy_examples():
    assert binary_entropy(0.5) == pytest.approx(1.0, abs=1e-15)
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(1.0) == 0.0
    assert binary_entropy(0.25) == pytest.approx(0.811278, abs=1e-6)
    assert 1 - binary_entropy(0.25) == pytest.approx(0.188722, abs=1e-6)


def test_binary_entropy_domain():
    assert binary_entropy(1 + 1e-13) == 0.0
    with pytest.raises(DomainError):
        binary_entropy(1.001)
    with pytest.raises(DomainError):
        binary_entropy(-0.1)


@settings(max_examples=100, deadline=None)
@given(p=st.floats(0, 1))
def test_binary_entropy_symmetric(p):
    assert abs(binary_entropy(p) - binary_entropy(1 - p)) < 1e-12


def test_von_neumann_examples():
    v = np.array([0.6, 0.8])
    assert von_neumann_entropy(np.outer(v, v)) == pytest.approx(0, abs=1e-12)
    assert von_neumann_entropy(np.diag([0.25, 0.75])) == pytest.approx(H_QUARTER, abs=1e-12)
    for m in (1, 3):
        assert von_neumann_entropy(np.eye(2**m) / 2**m) == pytest.approx(m, abs=1e-12)
    assert von_neumann_entropy(np.array([0.5, 0.5])) == pytest.approx(1.0)


def test_von_neumann_rejects_bad_trace():
    with pytest.raises(ValidationError):
        von_neumann_entropy(np.eye(2))


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 3))
def test_von_neumann_unitary_invariance(seed, n):
    rng = np.random.default_rng(seed)
    dim = 2**n
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = z @ z.conj().T
    rho /= np.trace(rho).real
    q, _ = np.linalg.qr(rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)))
    assert abs(von_neumann_entropy(rho) - von_neumann_entropy(q @ rho @ q.conj().T)) < 1e-10


def test_pure_entanglement_examples():
    assert pure_entanglement(encode_bit(0)) == pytest.approx(1.0, abs=1e-12)
    assert pure_entanglement(LogicalState.basis("0")) == pytest.approx(1.0, abs=1e-12)
    assert pure_entanglement(LogicalState.uniform(2)) == pytest.approx(0.0, abs=1e-12)
    prod = StateVector(np.eye(16)[5], pair_labels(2))
    assert pure_entanglement(prod) == pytest.approx(0.0, abs=1e-12)


def test_pure_entanglement_rejects_unnormalized():
    with pytest.raises(ValidationError):
        pure_entanglement(StateVector([1, 0, 0, 1], pair_labels(1)))


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_pure_entanglement_either_side(seed):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=16) + 1j * rng.normal(size=16)
    s = StateVector(v / np.linalg.norm(v), pair_labels(2))
    ab = pure_entanglement(s)
    swapped = pure_entanglement(s, Partition(frozenset({1, 3}), frozenset({0, 2})))
    assert abs(ab - swapped) < 1e-10
    assert abs(gain_lower_bound(to_density(s)) - ab) < 1e-10


def test_gain_examples():
    bell = to_density(encode_bit(0))
    assert gain_lower_bound(bell) == pytest.approx(1.0, abs=1e-12)
    mix = LogicalState.mixed(np.eye(2) / 2)
    assert gain_lower_bound(mix) == pytest.approx(0.0, abs=1e-12)
    full = encode_logical(mix)
    assert gain_lower_bound(full) == pytest.approx(0.0, abs=1e-12)
    w = np.array([1, 3, 3, 1]) / 8
    counts = LogicalState.mixed(np.diag(w))
    assert gain_lower_bound(counts) == pytest.approx(2 - 1.811278, abs=1e-6)


def test_gain_of_classical_mixtures():
    r = np.zeros((4, 4))
    r[0, 0] = r[3, 3] = 0.5
    assert gain_lower_bound(LogicalState.mixed(r)) == pytest.approx(1.0)
    assert gain_lower_bound(LogicalState.mixed(np.eye(4) / 4)) == pytest.approx(0.0, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 4))
def test_gain_of_logical_records_is_nonnegative(seed, n):
    # encoded records are maximally correlated, so S(A) >= S(AB)
    rng = np.random.default_rng(seed)
    dim = 2**n
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = z @ z.conj().T
    assert gain_lower_bound(LogicalState.mixed(rho / np.trace(rho).real)) >= -1e-10


def test_extension_params_norm():
    with pytest.raises(ValidationError):
        ExtensionParams(a=1, d=1)
    p = ExtensionParams.from_vector([1, 1, 0, 0])
    assert abs(p.s - np.sqrt(2)) < 1e-12


def test_ree_family_checkpoints():
    base = ree_nand_family(ExtensionParams())
    assert abs(base - (1 - binary_entropy(0.25))) < 1e-12
    assert abs(ree_nand_family(ExtensionParams(), reading="squared") - base) < 1e-12
    # s = 0 without |d| = 1
    p = ExtensionParams(a=0.5, b=-0.5, d=np.sqrt(0.5))
    assert abs(ree_nand_family(p) - base) < 1e-12


def test_ree_family_squared_reading_leaves_domain():
    # the squared (Re s)^2 argument exceeds 1 for Re s > sqrt(2)
    p = ExtensionParams.from_vector([1, 1, 1, 0])
    with pytest.raises(DomainError):
        ree_nand_family(p, reading="squared")
    assert ree_nand_family(p) >= ree_nand_family(ExtensionParams())


def test_ree_family_unknown_reading():
    with pytest.raises(ValidationError):
        ree_nand_family(ExtensionParams(), reading="other")

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cohdisc.qcore import (
    Gate, InvariantError, ProductBasis, QState, apply_gate, bloch_basis, dephase, haar_unitary,
    is_infinite, negativity, partial_trace, partial_transpose, random_state, rel_entropy, tensor,
    unitarity_residual, vn_entropy,
)
from cohdisc.channels import make_cz, make_hadamard
from cohdisc.protocols import StatePrepConfig, stateprep_marginal_control, stateprep_state

from conftest import werner
from oracles import haar_u00_moment

seeds = st.integers(0, 2**32 - 1)
small_dims = st.lists(st.integers(2, 3), min_size=1, max_size=3)


def ket0():
    return QState.basis_state([0], [2])


# --- QState ---------------------------------------------------------------

@pytest.mark.parametrize("mat, msg", [
    ([[1, 0.1], [0, 0]], "Hermitian"),
    ([[0.5, 0], [0, 0.4]], "trace"),
    ([[1.5, 0], [0, -0.5]], "positive"),
])
def test_qstate_rejects_invalid(mat, msg):
    with pytest.raises(InvariantError, match=msg):
        QState((2,), mat)


def test_qstate_rejects_bad_dims():
    with pytest.raises(InvariantError):
        QState((2, 2), np.eye(2) / 2)


# --- tensor ---------------------------------------------------------------

def test_tensor_basis_states():
    s = tensor(ket0(), ket0())
    assert s.dims == (2, 2)
    assert s.allclose(QState.basis_state([0, 0], [2, 2]), atol=0)


def test_tensor_with_trivial_system():
    rho = random_state((2,), seed=1)
    s = tensor(rho, QState((1,), [[1]]))
    assert np.allclose(s.mat, rho.mat, atol=1e-15)


def test_tensor_maximally_mixed():
    s = tensor(QState.maximally_mixed([2]), QState.maximally_mixed([2]))
    assert s.dims == (2, 2)
    assert np.allclose(s.mat, np.eye(4) / 4)


# --- partial trace --------------------------------------------------------

def test_partial_trace_bell(bell):
    assert np.allclose(partial_trace(bell, [0]).mat, np.eye(2) / 2, atol=1e-15)


def test_partial_trace_product():
    a, b = random_state((2,), 3), random_state((3,), 4)
    assert np.allclose(partial_trace(tensor(a, b), [0]).mat, a.mat, atol=1e-14)
    assert np.allclose(partial_trace(tensor(a, b), [1]).mat, b.mat, atol=1e-14)


def test_partial_trace_keeps_order():
    s = random_state((2, 3, 2), 5)
    assert partial_trace(s, [2, 0]).dims == (2, 2)
    assert partial_trace(s, [1, 2]).dims == (3, 2)


def test_partial_trace_everything_is_an_error():
    with pytest.raises(InvariantError, match="cannot trace out everything"):
        partial_trace(random_state((2, 2), 0), [])


@pytest.mark.parametrize("p, theta, l", [(0.2, 0.45, 3), (0.0, 1.1, 2), (0.7, 2.9, 4)])
def test_partial_trace_matches_closed_form_control_marginal(p, theta, l):
    cfg = StatePrepConfig(5, p, theta)
    sim = partial_trace(stateprep_state(cfg, l), [0])
    assert np.allclose(sim.mat, stateprep_marginal_control(cfg, l).mat, atol=1e-10, rtol=0)


@settings(max_examples=40, deadline=None)
@given(small_dims, small_dims, seeds)
def test_partial_trace_inverts_tensor(da, db, seed):
    a, b = random_state(da, seed), random_state(db, seed + 1)
    got = partial_trace(tensor(a, b), range(len(da)))
    assert np.max(np.abs(got.mat - a.mat)) <= 1e-12


# --- dephasing ------------------------------------------------------------

def test_dephase_plus(plus):
    out = dephase(plus, ProductBasis.computational([2]), [0])
    assert np.allclose(out.mat, np.eye(2) / 2, atol=1e-15)


@pytest.mark.parametrize("subset", [[0], [1], [0, 1]])
def test_dephase_diagonal_state_unchanged(subset):
    s = QState((2, 2), np.diag([0.1, 0.2, 0.3, 0.4]))
    assert dephase(s, ProductBasis.computational([2, 2]), subset).allclose(s, atol=1e-15)


def test_dephase_bell_on_a_only(bell):
    out = dephase(bell, ProductBasis.computational([2, 2]), [0])
    assert np.allclose(out.mat, np.diag([0.5, 0, 0, 0.5]), atol=1e-15)


def test_dephase_rejects_empty_and_bad_subsets(bell):
    b = ProductBasis.computational([2, 2])
    with pytest.raises(InvariantError):
        dephase(bell, b, [])
    with pytest.raises(InvariantError):
        dephase(bell, b, [2])


def random_basis(dims, seed):
    rng = np.random.default_rng(seed)
    return ProductBasis(tuple(haar_unitary(d, rng) for d in dims))


subsets = st.lists(st.integers(0, 2), min_size=1, max_size=3, unique=True)


@settings(max_examples=40, deadline=None)
@given(seeds, subsets)
def test_dephase_idempotent_and_entropy_increasing(seed, subset):
    dims = (2, 3, 2)
    s = random_state(dims, seed)
    b = random_basis(dims, seed + 7)
    once = dephase(s, b, subset)
    twice = dephase(once, b, subset)
    assert np.max(np.abs(once.mat - twice.mat)) <= 1e-12
    assert abs(np.trace(once.mat) - 1) <= 1e-12
    assert vn_entropy(once) >= vn_entropy(s) - 1e-10


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_pinching_identity(seed):
    dims = (2, 2)
    s = random_state(dims, seed)
    b = random_basis(dims, seed + 1)
    d = dephase(s, b)
    r = rel_entropy(s, d)
    assert not is_infinite(r)
    assert r == pytest.approx(vn_entropy(d) - vn_entropy(s), abs=1e-9)


# --- entropies ------------------------------------------------------------

def test_entropy_pure_and_mixed(plus):
    assert vn_entropy(plus) == pytest.approx(0, abs=1e-12)
    assert vn_entropy(QState.maximally_mixed([2])) == pytest.approx(1, abs=1e-15)


def test_entropy_werner_closed_form():
    p = 0.2
    lam = [(1 + 3 * p) / 4] + [(1 - p) / 4] * 3
    expected = -sum(x * math.log2(x) for x in lam)
    assert vn_entropy(werner(p)) == pytest.approx(expected, abs=1e-12)
    assert np.allclose(np.sort(np.linalg.eigvalsh(werner(p).mat)), np.sort(lam), atol=1e-14)


def test_rel_entropy_examples(plus):
    rho = random_state((2, 2), 11)
    assert rel_entropy(rho, rho) == pytest.approx(0, abs=1e-12)
    assert rel_entropy(plus, QState.maximally_mixed([2])) == pytest.approx(1, abs=1e-12)
    assert is_infinite(rel_entropy(ket0(), QState.basis_state([1], [2])))


def test_rel_entropy_dimension_mismatch():
    with pytest.raises(InvariantError):
        rel_entropy(random_state((2,), 0), random_state((3,), 0))


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_rel_entropy_nonnegative(seed):
    rho, sigma = random_state((2, 2), seed), random_state((2, 2), seed + 1)
    r = rel_entropy(rho, sigma)
    assert r >= 0
    assert r > 1e-9  # distinct full-rank states


# --- gates ----------------------------------------------------------------

def test_identity_gate_is_noop():
    s = random_state((2, 3), 2)
    assert apply_gate(s, Gate(np.eye(3), (1,))).allclose(s, atol=1e-15)


def test_cz_on_plus_plus_gives_cluster_state(plus):
    out = apply_gate(tensor(plus, plus), make_cz())
    cluster = np.array([1, 1, 1, -1]) / 2
    assert np.allclose(out.mat, np.outer(cluster, cluster), atol=1e-15)
    assert vn_entropy(out) == pytest.approx(0, abs=1e-12)


def test_hadamard_on_zero(plus):
    assert apply_gate(ket0(), make_hadamard()).allclose(plus, atol=1e-15)


def test_gate_on_reversed_targets_matches_swap():
    s = random_state((2, 3), 9)
    u = haar_unitary(6, 1)
    direct = apply_gate(s, Gate(u, (0, 1)))
    # same unitary applied with targets listed (1, 0) acts on the swapped ordering
    swap = np.zeros((6, 6))
    for i in range(2):
        for j in range(3):
            swap[j * 2 + i, i * 3 + j] = 1
    s_swapped = QState((3, 2), swap @ s.mat @ swap.T)
    back = apply_gate(s_swapped, Gate(u, (1, 0)))
    assert np.allclose(swap.T @ back.mat @ swap, direct.mat, atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_apply_gate_preserves_spectrum(seed):
    s = random_state((2, 2, 2), seed)
    g = Gate(haar_unitary(4, seed), (2, 0))
    out = apply_gate(s, g)
    assert np.allclose(np.linalg.eigvalsh(out.mat), np.linalg.eigvalsh(s.mat), atol=1e-10)
    assert abs(np.trace(out.mat) - 1) < 1e-10
    assert vn_entropy(out) == pytest.approx(vn_entropy(s), abs=1e-10)


def test_apply_gate_out_of_range():
    with pytest.raises(InvariantError):
        apply_gate(random_state((2, 2), 0), make_cz(0, 2))


def test_gate_rejects_duplicate_targets():
    with pytest.raises(InvariantError):
        Gate(np.eye(4), (1, 1))


# --- partial transpose / negativity -----------------------------------------

def test_partial_transpose_product_is_psd():
    s = tensor(random_state((2,), 1), random_state((2,), 2))
    assert np.linalg.eigvalsh(partial_transpose(s, 1))[0] >= -1e-12


def test_partial_transpose_bell_spectrum(bell):
    ev = np.sort(np.linalg.eigvalsh(partial_transpose(bell, 0)))
    assert np.allclose(ev, [-0.5, 0.5, 0.5, 0.5], atol=1e-14)


def test_partial_transpose_werner_separability_boundary():
    ev = np.linalg.eigvalsh(partial_transpose(werner(1 / 3), 1))
    assert ev[0] == pytest.approx(0, abs=1e-14)


def test_negativity(bell):
    assert negativity(bell) == pytest.approx(0.5, abs=1e-14)
    assert negativity(werner(0.3)) == pytest.approx(0, abs=1e-12)
    assert negativity(tensor(random_state((2,), 3), random_state((2,), 4))) == pytest.approx(0, abs=1e-12)
    with pytest.raises(InvariantError):
        negativity(random_state((2, 2, 2), 0))


# --- bases and sampling -------------------------------------------------------

def test_bloch_basis():
    assert np.allclose(bloch_basis(0, 0), np.eye(2))
    h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    u = bloch_basis(math.pi / 4, 0)
    # equal to the Hadamard up to a phase on each column
    assert np.allclose(np.abs(np.sum(u.conj() * h, axis=0)), 1, atol=1e-15)
    assert np.allclose(bloch_basis(0.3, 1.1), bloch_basis(0.3, 1.1 + 2 * math.pi), atol=1e-14)
    assert unitarity_residual(bloch_basis(1.234, -0.7)) <= 1e-12


def test_haar_unitary_deterministic_and_unitary():
    assert np.array_equal(haar_unitary(4, 123), haar_unitary(4, 123))
    assert unitarity_residual(haar_unitary(8, 5)) <= 1e-12
    with pytest.raises(ValueError):
        haar_unitary(0, 1)


def test_haar_first_moment():
    mean, se = haar_u00_moment(haar_unitary, d=2, samples=10_000)
    assert abs(mean - 0.5) <= 3 * se

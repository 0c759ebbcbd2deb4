from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thermoprobe.errors import NumericalError, PhysicsError
from thermoprobe.operators import (
    SIGMA_MINUS,
    SIGMA_PLUS,
    SIGMA_X,
    SIGMA_Z,
    Operator,
    boson,
    check_density_matrix,
    collective_spin,
    commutator,
    destroy,
    expm,
    identity,
    kron,
    number,
    partial_trace,
)
from thermoprobe.bath import HECTwoQubit, cluster_state


def close(a, b, tol):
    a = a.data if isinstance(a, Operator) else np.asarray(a)
    b = b.data if isinstance(b, Operator) else np.asarray(b)
    return np.max(np.abs(a - b), initial=0.0) <= tol


def random_state(rng, d):
    x = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = x @ x.conj().T
    return Operator(rho / np.trace(rho))


# --- kron ---------------------------------------------------------------------

def test_kron_identity():
    assert close(kron(identity(2), identity(2)), np.eye(4), 0)


def test_kron_sigma_z():
    assert close(kron(SIGMA_Z, identity(2)), np.diag([1, 1, -1, -1]), 0)


def test_kron_sigma_plus_minus_single_entry():
    k = kron(SIGMA_PLUS, SIGMA_MINUS).data
    assert k[1, 2] == 1
    assert np.count_nonzero(k) == 1


def test_kron_factor_layout():
    a = kron(kron(identity(2), identity(3)), identity(4))
    assert a.factors == (2, 3, 4)
    assert a.dim == 24


def test_kron_dimension_limit():
    with pytest.raises(NumericalError, match="dimension limit"):
        kron(identity(64), identity(128))


def test_factor_product_checked():
    with pytest.raises(ValueError):
        Operator(np.eye(4), (2, 3))


# --- expm ---------------------------------------------------------------------

def test_expm_pauli_period():
    assert close(expm(SIGMA_X, np.pi), -np.eye(2), 1e-9)


def test_expm_zero():
    assert close(expm(Operator(np.zeros((3, 3))), 2.7), np.eye(3), 0)


def test_expm_exchange_swaps():
    # N = 1 dipolar exchange with g = 1, tau = pi/2
    h = kron(SIGMA_PLUS, SIGMA_MINUS) + kron(SIGMA_MINUS, SIGMA_PLUS)
    u = expm(h, np.pi / 2).data
    eg, ge = np.eye(4)[1], np.eye(4)[2]
    assert np.allclose(u @ eg, -1j * ge, atol=1e-12)
    assert np.allclose(u @ ge, -1j * eg, atol=1e-12)


def test_expm_rejects_non_hermitian():
    with pytest.raises(PhysicsError, match="hermiticity violation"):
        expm(SIGMA_PLUS, 1.0)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(-3, 3), st.floats(-3, 3))
def test_expm_unitary_and_group_law(seed, t1, t2):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    h = Operator(x + x.conj().T)
    u = expm(h, t1).data
    assert np.max(np.abs(u.conj().T @ u - np.eye(5))) < 1e-9
    assert close(expm(h, t1).data @ expm(h, t2).data, expm(h, t1 + t2), 1e-9)


# --- partial trace ------------------------------------------------------------

def test_partial_trace_product_state():
    rng = np.random.default_rng(1)
    a, b = random_state(rng, 2), random_state(rng, 3)
    ab = kron(a, b)
    assert close(partial_trace(ab, [0]), a, 1e-12)
    assert close(partial_trace(ab, [1]), b, 1e-12)


def test_partial_trace_bell():
    psi = np.array([1, 0, 0, 1]) / np.sqrt(2)
    bell = Operator(np.outer(psi, psi), (2, 2))
    assert close(partial_trace(bell, [0]), np.eye(2) / 2, 1e-15)


@pytest.mark.parametrize("zeta", [0.0, 0.3, 1.0, 0.5j])
def test_partial_trace_hec_balanced(zeta):
    rho = cluster_state(HECTwoQubit(np.pi / 4, zeta))
    assert close(partial_trace(rho, [0]), np.eye(2) / 2, 1e-15)


def test_partial_trace_middle_factor():
    rng = np.random.default_rng(2)
    a, b, c = random_state(rng, 2), random_state(rng, 3), random_state(rng, 2)
    abc = kron(kron(a, b), c)
    assert close(partial_trace(abc, [1]), b, 1e-12)
    ac = partial_trace(abc, [0, 2])
    assert ac.factors == (2, 2)
    assert close(ac, kron(a, c), 1e-12)


def test_partial_trace_errors():
    with pytest.raises(ValueError, match="unfactored operator"):
        partial_trace(identity(4), [0])
    with pytest.raises(ValueError, match="nothing to keep"):
        partial_trace(kron(identity(2), identity(2)), [])


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 4), st.integers(2, 4))
def test_partial_trace_left_inverse(seed, da, db):
    rng = np.random.default_rng(seed)
    a, b = random_state(rng, da), random_state(rng, db)
    x = rng.normal(size=(da * db, da * db))
    m = Operator(x, (da, db))
    assert abs(partial_trace(m, [0]).tr() - m.tr()) < 1e-12
    assert close(partial_trace(kron(a, b), [0]), a, 1e-12)


# --- collective spin and bosons ---------------------------------------------------

def test_single_qubit_collective():
    j = collective_spin(1)
    assert close(j.jp, SIGMA_PLUS, 0)
    assert close(j.jm, SIGMA_MINUS, 0)
    assert close(j.j2, 0.75 * np.eye(2), 1e-15)


@pytest.mark.parametrize("n", range(1, 9))
def test_su2_algebra(n):
    j = collective_spin(n)
    assert close(commutator(j.jz, j.jp), j.jp, 1e-12)
    assert close(commutator(j.jz, j.jm), -j.jm, 1e-12)
    assert close(commutator(j.jp, j.jm), 2 * j.jz, 1e-12)
    for op in (j.jz, j.jp, j.jm):
        assert close(commutator(j.j2, op), np.zeros((2**n, 2**n)), 1e-12)


def test_two_qubit_commutator_entrywise():
    j = collective_spin(2)
    assert np.array_equal(commutator(j.jp, j.jm).data, 2 * j.jz.data)


def test_boson_number():
    a, ad = boson(5)
    n = (ad @ a).data
    assert n[3, 3] == pytest.approx(3.0)
    assert close(n, number(5), 1e-14)
    comm = commutator(a, ad).data
    # [a, a^dag] = 1 except at the truncation edge
    assert np.allclose(np.diag(comm)[:-1], 1.0)
    assert comm[-1, -1] == pytest.approx(-4.0)


def test_destroy_rejects_tiny_space():
    with pytest.raises(ValueError):
        destroy(1)


def test_density_matrix_checks():
    check_density_matrix(np.eye(2) / 2)
    with pytest.raises(PhysicsError, match="hermiticity"):
        check_density_matrix(np.array([[0.5, 0.1], [0.0, 0.5]]))
    with pytest.raises(PhysicsError, match="trace"):
        check_density_matrix(np.eye(2))
    with pytest.raises(PhysicsError, match="positive"):
        check_density_matrix(np.diag([1.5, -0.5]))

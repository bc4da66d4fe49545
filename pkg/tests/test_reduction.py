"""The 2x2 matrix workhorses: Takagi, SL(2,R) reduction, SO(1,1), preservers."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quadcone.quadform import NotSymmetric
from quadcone.reduction import (
    E_HERM,
    NotPreserver,
    PositiveDeterminant,
    So11Unreachable,
    ZeroMatrix,
    factor_preserver,
    det_invariants,
    sl2_reduce_sym,
    so11_zero_diag,
    takagi2,
)


def random_sym_c(rng, scale=1.0):
    A = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    return scale * (A + A.T) / 2


def random_sl2(rng):
    while True:
        g = rng.standard_normal((2, 2))
        d = np.linalg.det(g)
        if abs(d) <= 1e-3:
            continue
        if d < 0:
            g = g.copy()
            g[:, 0] = -g[:, 0]
            d = -d
        return g / np.sqrt(d)


# --- takagi2 -----------------------------------------------------------------


def test_takagi_diagonal_nonnegative():
    S = np.diag([0.5, 1.0 / 3.0]).astype(complex)
    t = takagi2(S)
    assert t.d == pytest.approx((0.5, 1.0 / 3.0))
    np.testing.assert_allclose(t.u.T @ S @ t.u, np.diag(t.d), atol=1e-12)


def test_takagi_zero():
    t = takagi2(np.zeros((2, 2)))
    assert t.d == (0.0, 0.0)
    np.testing.assert_allclose(t.u, np.eye(2))


def test_takagi_antidiagonal_vs_svd_oracle():
    S = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    sv = np.linalg.svd(S, compute_uv=False)  # oracle
    t = takagi2(S)
    np.testing.assert_allclose(t.d, sv, atol=1e-12)
    np.testing.assert_allclose(t.u.T @ S @ t.u, np.diag(t.d), atol=1e-10)


def test_takagi_rejects_asymmetric():
    with pytest.raises(NotSymmetric):
        takagi2(np.array([[0.0, 1.0], [0.0, 0.0]]))


@settings(max_examples=80, deadline=None)
@given(st.integers(min_value=0, max_value=10_000), st.floats(min_value=-6, max_value=6))
def test_takagi_matches_svd(seed, logscale):
    rng = np.random.default_rng(seed)
    S = random_sym_c(rng, scale=float(np.exp(logscale)))
    t = takagi2(S)
    ns = np.linalg.norm(S, 2) + 1e-300
    assert np.linalg.norm(t.u.conj().T @ t.u - np.eye(2)) <= 1e-12 * 4
    assert np.linalg.norm(t.u.T @ S @ t.u - np.diag(t.d)) <= 1e-10 * ns
    sv = np.linalg.svd(S, compute_uv=False)
    np.testing.assert_allclose(t.d, sv, atol=1e-10 * ns)
    assert t.d[0] >= t.d[1] >= 0


def test_takagi_degenerate_singular_values():
    rng = np.random.default_rng(4)
    for _ in range(25):
        # unitary symmetric matrices have equal singular values
        theta = rng.uniform(0, 2 * np.pi)
        g = np.array(
            [[np.cos(theta), np.sin(theta)], [np.sin(theta), -np.cos(theta)]], dtype=complex
        )
        phase = np.exp(1j * rng.uniform(0, 2 * np.pi))
        S = phase * g
        t = takagi2(S)
        assert np.linalg.norm(t.u.T @ S @ t.u - np.diag(t.d)) <= 1e-10


# --- sl2_reduce_sym ----------------------------------------------------------


def test_sl2_positive_definite():
    P = np.diag([2.0, 2.0])
    g, canon = sl2_reduce_sym(P)
    np.testing.assert_allclose(canon, 2.0 * np.eye(2), atol=1e-12)
    np.testing.assert_allclose(g.T @ P @ g, canon, atol=1e-10)


def test_sl2_indefinite():
    P = np.diag([1.0, -4.0])
    g, canon = sl2_reduce_sym(P)
    np.testing.assert_allclose(canon, 2.0 * np.diag([1.0, -1.0]), atol=1e-12)
    np.testing.assert_allclose(g.T @ P @ g, canon, atol=1e-10)


def test_sl2_rank_one():
    P = np.array([[1.0, 1.0], [1.0, 1.0]])
    g, canon = sl2_reduce_sym(P)
    np.testing.assert_allclose(canon, np.diag([1.0, 0.0]), atol=1e-12)
    assert np.linalg.norm(g.T @ P @ g - canon) <= 1e-10 * np.linalg.norm(P, 2)
    assert np.linalg.det(g) == pytest.approx(1.0, abs=1e-12)


def test_sl2_zero_matrix():
    with pytest.raises(ZeroMatrix):
        sl2_reduce_sym(np.zeros((2, 2)))


def test_sl2_determinant_preserved():
    rng = np.random.default_rng(11)
    for _ in range(200):
        A = rng.standard_normal((2, 2))
        P = (A + A.T) / 2
        if np.linalg.norm(P) < 1e-6:
            continue
        g, canon = sl2_reduce_sym(P)
        npn = np.linalg.norm(P, 2)
        assert abs(np.linalg.det(g) - 1.0) <= 1e-12 * 10
        assert np.linalg.norm(g.T @ P @ g - canon) <= 1e-10 * npn
        if abs(np.linalg.det(P)) > 1e-9 * npn**2:
            assert np.linalg.det(canon) == pytest.approx(np.linalg.det(P), rel=1e-9)


# --- so11_zero_diag ----------------------------------------------------------


def _so11_scan_oracle(Q, taus=None):
    """Dense scan for a diagonal zero of phi(tau)^T Q phi(tau)."""
    if taus is None:
        taus = np.linspace(1e-3, 10.0, 200_001)
    sigma = taus + 1.0 / taus
    delta = taus - 1.0 / taus
    p, q, r = Q[0, 0], Q[0, 1], Q[1, 1]
    pp = 0.25 * (sigma**2 * p + 2 * sigma * delta * q + delta**2 * r)
    rp = 0.25 * (delta**2 * p + 2 * sigma * delta * q + sigma**2 * r)
    best = min(np.min(np.abs(pp)), np.min(np.abs(rp)))
    return best


def test_so11_already_zero():
    el, Qp = so11_zero_diag(np.diag([0.0, 5.0]))
    assert el.tau == pytest.approx(1.0)
    np.testing.assert_allclose(Qp, np.diag([0.0, 5.0]), atol=1e-12)


def test_so11_mixed_signature_vs_scan_oracle():
    Q = np.array([[2.0, 0.0], [0.0, -1.0]])
    # dense-scan oracle confirms a diagonal zero exists along tau > 0
    assert _so11_scan_oracle(Q) <= 1e-3
    el, Qp = so11_zero_diag(Q)
    assert min(abs(Qp[0, 0]), abs(Qp[1, 1])) <= 1e-8 * np.linalg.norm(Q, 2)
    assert np.linalg.det(Qp) == pytest.approx(-2.0, abs=1e-10)
    np.testing.assert_allclose(el.matrix.T @ np.diag([1.0, -1.0]) @ el.matrix,
                               np.diag([1.0, -1.0]), atol=1e-12)
    assert np.linalg.det(el.matrix) == pytest.approx(1.0, abs=1e-12)


def test_so11_antidiagonal_tau_one():
    Q = np.array([[0.0, 3.0], [3.0, 0.0]])
    el, Qp = so11_zero_diag(Q)
    assert el.tau == pytest.approx(1.0)
    assert abs(Qp[0, 0]) <= 1e-12 and abs(Qp[1, 1]) <= 1e-12


def test_so11_rejects_positive_determinant():
    with pytest.raises(PositiveDeterminant):
        so11_zero_diag(np.eye(2))


def test_so11_lightlike_boundary_unreachable():
    # Q = [[1,1],[1,1]] is fixed up to scale by the whole group; no element
    # zeroes its diagonal.  This is the boundary case excluded downstream.
    with pytest.raises(So11Unreachable):
        so11_zero_diag(np.array([[1.0, 1.0], [1.0, 1.0]]))


def test_so11_random_indefinite():
    rng = np.random.default_rng(13)
    done = 0
    while done < 200:
        A = rng.standard_normal((2, 2))
        Q = (A + A.T) / 2
        if np.linalg.det(Q) > 0:
            continue
        done += 1
        el, Qp = so11_zero_diag(Q)
        nq = np.linalg.norm(Q, 2)
        assert min(abs(Qp[0, 0]), abs(Qp[1, 1])) <= 1e-8 * nq
        assert abs(np.linalg.det(Qp) - np.linalg.det(Q)) <= 1e-10 * nq**2


# --- factor_preserver --------------------------------------------------------


def test_factor_preserver_identity():
    theta, g = factor_preserver(np.eye(2))
    assert theta == pytest.approx(0.0, abs=1e-12)
    np.testing.assert_allclose(g, np.eye(2), atol=1e-12)


def test_factor_preserver_pure_phase():
    theta, g = factor_preserver(np.exp(1j * np.pi / 4) * np.eye(2))
    assert theta == pytest.approx(np.pi / 4)
    np.testing.assert_allclose(g, np.eye(2), atol=1e-12)


def test_factor_preserver_rejects_non_preserver():
    with pytest.raises(NotPreserver):
        factor_preserver(np.diag([2.0, 1.0]))


def test_factor_preserver_round_trip():
    rng = np.random.default_rng(17)
    for _ in range(100):
        g0 = random_sl2(rng)
        th0 = rng.uniform(0, 2 * np.pi)
        k = np.exp(1j * th0) * g0
        theta, g = factor_preserver(k)
        assert 0 <= theta < np.pi
        # recovery modulo the (theta, g) <-> (theta+pi, -g) ambiguity
        np.testing.assert_allclose(np.exp(1j * theta) * g, k, atol=1e-10)
        assert min(abs((theta - th0) % np.pi), abs(np.pi - (theta - th0) % np.pi)) <= 1e-10
        assert np.linalg.norm(g - g0) <= 1e-9 or np.linalg.norm(g + g0) <= 1e-9


# --- determinant invariants ------------------------------------------------------


def test_det_invariants_conjugate_pair():
    A = 3 + 4j
    inv = det_invariants(np.diag([A, np.conj(A)]))
    assert inv.det_s == pytest.approx(25.0)
    assert inv.det_p == pytest.approx(9.0)
    assert inv.det_q == pytest.approx(-16.0)


def test_det_invariants_zero():
    inv = det_invariants(np.zeros((2, 2)))
    assert (inv.det_s, inv.det_p, inv.det_q) == (0, 0, 0)


def test_det_invariants_identity():
    rng = np.random.default_rng(19)
    for _ in range(100):
        S = random_sym_c(rng)
        P, Q = S.real, S.imag
        inv = det_invariants(S)
        cross = Q[0, 0] * P[1, 1] + P[0, 0] * Q[1, 1] - 2 * Q[0, 1] * P[0, 1]
        assert inv.det_s == pytest.approx(complex(inv.det_p - inv.det_q, cross), abs=1e-12)


def test_det_invariants_under_preservers():
    # the full preserver action S -> e^(2 i theta) g^T S g with e^(4 i theta)=1
    rng = np.random.default_rng(23)
    for _ in range(100):
        S = random_sym_c(rng)
        g = random_sl2(rng)
        phase = rng.choice([1.0, -1.0])
        S2 = phase * (g.T @ S @ g)
        i1, i2 = det_invariants(S), det_invariants(S2)
        assert abs(abs(i1.det_s) - abs(i2.det_s)) <= 1e-10 * (1 + abs(i1.det_s))
        assert i1.det_p == pytest.approx(i2.det_p, abs=1e-10 * (1 + abs(i1.det_p)))
        assert i1.det_q == pytest.approx(i2.det_q, abs=1e-10 * (1 + abs(i1.det_q)))


def test_preserver_definition_matches_e_herm():
    # sanity: SL(2,R) matrices and phases preserve Im(z1 conj(z2))
    rng = np.random.default_rng(29)
    for _ in range(20):
        k = np.exp(1j * rng.uniform(0, np.pi)) * random_sl2(rng)
        np.testing.assert_allclose(k.conj().T @ E_HERM @ k, E_HERM, atol=1e-12)

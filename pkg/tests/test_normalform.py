"""Classification to normal forms: examples, round trips, degeneracies."""

from __future__ import annotations

import numpy as np
import pytest

from quadcone.normalform import (
    CHOFVAR,
    DegeneracyReport,
    NormalFormResult,
    NormalFormType,
    SingularMatrix,
    apply_change,
    classify2,
    normalize_hermitian,
    oneone_frame_invariants,
    render_cone,
    uniqueness_certificate,
)
from quadcone.quadform import ConeError, QuadraticCone, evaluate, evaluate_many
from quadcone.reduction import E_HERM

TAGS = ("M20", "M11_1", "M11_2", "M11_3", "M10_1", "M10_2", "M00_1")


def example_m():
    return QuadraticCone(np.diag([0.5, 1.0 / 3.0]), np.diag([1.0, -1.0]))


def draw_type(tag, rng, boundary_gap=2e-4):
    if tag == "M20":
        A = rng.uniform(1.0 + 10 * boundary_gap, 5.0)
        return NormalFormType("M20", a=A, b=rng.uniform(0, A))
    if tag == "M11_1":
        A = rng.uniform(0.0, 3.0)
        B = rng.uniform(0, A)
        if abs(A - B) < boundary_gap:
            B = max(0.0, A - boundary_gap)
        if A < boundary_gap:
            A = B = 0.0
        return NormalFormType("M11_1", a=A, b=B)
    if tag == "M11_2":
        return NormalFormType(
            "M11_2", a=complex(rng.uniform(10 * boundary_gap, 3.0), rng.uniform(0, 3.0))
        )
    if tag == "M10_1":
        return NormalFormType("M10_1", a=rng.uniform(0, 4.0))
    return NormalFormType(tag)


def random_gl2(rng, max_cond=30.0):
    while True:
        T = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        if np.linalg.cond(T) < max_cond:
            return T


# --- type validation and rendering ------------------------------------------


def test_type_ranges_enforced():
    with pytest.raises(ConeError):
        NormalFormType("M20", a=0.9, b=0.1)  # needs A > 1
    with pytest.raises(ConeError):
        NormalFormType("M11_1", a=1.0, b=2.0)  # needs B <= A
    with pytest.raises(ConeError):
        NormalFormType("M11_2", a=-1 + 1j)  # needs Re A > 0
    with pytest.raises(ConeError):
        NormalFormType("M10_1", a=-0.5)
    with pytest.raises(ConeError):
        NormalFormType("M00_1", a=1.0)


def test_render_matches_table():
    c = render_cone(NormalFormType("M11_2", a=1 + 2j))
    np.testing.assert_allclose(c.S, np.diag([1 + 2j, 1 - 2j]))
    np.testing.assert_allclose(c.H, E_HERM)
    c = render_cone(NormalFormType("M10_2"))
    np.testing.assert_allclose(c.S, [[0, 0.5], [0.5, 0]])


# --- apply_change ------------------------------------------------------------


def test_apply_change_identity():
    cone = example_m()
    out = apply_change(cone, np.eye(2), 1.0, 1)
    assert out == cone


def test_apply_change_diagonal():
    cone = QuadraticCone(np.diag([1.0, 0.0]).astype(complex), np.zeros((2, 2)))
    out = apply_change(cone, np.diag([2.0, 1.0]), 1.0, 1)
    np.testing.assert_allclose(out.S, np.diag([4.0, 0.0]))


def test_apply_change_pointwise():
    rng = np.random.default_rng(31)
    for _ in range(20):
        A = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        cone = QuadraticCone((A + A.T) / 2, np.eye(2))
        T = random_gl2(rng)
        lam = float(np.exp(rng.uniform(-1, 1)))
        sign = int(rng.choice([-1, 1]))
        out = apply_change(cone, T, lam, sign)
        Z = rng.standard_normal((100, 2)) + 1j * rng.standard_normal((100, 2))
        np.testing.assert_allclose(
            evaluate_many(out, Z),
            sign * lam * evaluate_many(cone, Z @ T.T),
            atol=1e-10 * cone.scale * np.max(np.abs(Z)) ** 2 * lam * np.linalg.norm(T, 2) ** 2,
        )


def test_apply_change_rejects_singular():
    with pytest.raises(SingularMatrix):
        apply_change(example_m(), np.array([[1.0, 1.0], [1.0, 1.0]]))


# --- normalize_hermitian ------------------------------------------------------


def test_normalize_hermitian_targets():
    # (1,1): diag(1,-1) pulled back to the Im(z1 conj(z2)) matrix
    T0, cone1 = normalize_hermitian(example_m())
    np.testing.assert_allclose(cone1.H, E_HERM, atol=1e-12)
    # (2,0) already canonical
    c = QuadraticCone(np.zeros((2, 2)), np.eye(2))
    T0, cone1 = normalize_hermitian(c)
    np.testing.assert_allclose(T0, np.eye(2))
    # (1,0) rescale
    c = QuadraticCone(np.zeros((2, 2)), np.diag([4.0, 0.0]))
    _, cone1 = normalize_hermitian(c)
    np.testing.assert_allclose(cone1.H, np.diag([1.0, 0.0]), atol=1e-12)


def test_chofvar_maps_frames():
    np.testing.assert_allclose(
        CHOFVAR.conj().T @ E_HERM @ CHOFVAR, np.diag([1.0, -1.0]), atol=1e-14
    )


# --- classify2: motivating example and trivial cases ------------------------------


def test_classify_example_m():
    res = classify2(example_m())
    assert res.tag == "M11_1"
    A, B = res.ntype.params()
    assert A == pytest.approx(0.5, abs=1e-8)
    assert B == pytest.approx(1.0 / 3.0, abs=1e-8)
    assert res.residual <= 1e-8 * example_m().scale * np.linalg.norm(res.T, 2) ** 2


def test_classify_already_normal_m20():
    cone = QuadraticCone(np.diag([2.0, 0.0]).astype(complex), np.eye(2))
    res = classify2(cone)
    assert res.tag == "M20"
    assert res.ntype.params() == pytest.approx((2.0, 0.0), abs=1e-12)
    np.testing.assert_allclose(res.T, np.eye(2), atol=1e-9)


def test_classify_round_trip_m11_2():
    rng = np.random.default_rng(37)
    base = render_cone(NormalFormType("M11_2", a=1 + 1j))
    for _ in range(5):
        T = random_gl2(rng)
        lam = float(np.exp(rng.uniform(-2, 2)))
        sign = int(rng.choice([-1, 1]))
        moved = apply_change(base, T, lam, sign)
        res = classify2(moved)
        assert res.tag == "M11_2"
        (a,) = res.ntype.params()
        assert abs(a - (1 + 1j)) <= 1e-6


def test_classification_residual_meaning():
    # sign * lam * rho(T z) == rho_normal(z) on samples
    rng = np.random.default_rng(41)
    cone = apply_change(example_m(), random_gl2(rng), 2.0, -1)
    res = classify2(cone)
    normal = render_cone(res.ntype)
    Z = rng.standard_normal((50, 2)) + 1j * rng.standard_normal((50, 2))
    lhs = res.sign * res.lam * evaluate_many(cone, Z @ res.T.T)
    rhs = evaluate_many(normal, Z)
    assert np.max(np.abs(lhs - rhs)) <= 1e-7 * np.max(np.linalg.norm(Z, axis=1) ** 2)


# --- degeneracies -------------------------------------------------------------


def test_degenerate_point_cone():
    res = classify2(QuadraticCone(np.zeros((2, 2)), np.eye(2)))
    assert isinstance(res, DegeneracyReport) and res.reason == "PointCone"


def test_degenerate_m20_boundary():
    res = classify2(QuadraticCone(np.diag([1.0, 0.2]).astype(complex), np.eye(2)))
    assert isinstance(res, DegeneracyReport) and res.reason == "DimensionDeficient"
    res = classify2(QuadraticCone(np.diag([0.5, 0.2]).astype(complex), np.eye(2)))
    assert isinstance(res, DegeneracyReport) and res.reason == "PointCone"


def test_degenerate_one_zero_no_quadratic():
    H = np.diag([1.0, 0.0])
    small = classify2(QuadraticCone(np.diag([0.5, 0.0]).astype(complex), H))
    assert isinstance(small, DegeneracyReport) and small.reason == "DimensionDeficient"
    big = classify2(QuadraticCone(np.diag([3.0, 0.0]).astype(complex), H))
    assert isinstance(big, DegeneracyReport) and big.reason == "Reducible"


def test_degenerate_harmonic_rank_one():
    res = classify2(QuadraticCone(np.diag([1.0, 0.0]).astype(complex), np.zeros((2, 2))))
    assert isinstance(res, DegeneracyReport) and res.reason == "Reducible"


def test_degenerate_zero_rho():
    res = classify2(QuadraticCone(np.zeros((2, 2)), np.zeros((2, 2))))
    assert isinstance(res, DegeneracyReport) and res.reason == "DimensionDeficient"


def test_unclassified_boundary_stratum():
    # det S > 0, det P = 0, P != 0: outside the table; the cone contains a
    # complex line (z2 = -z1) and is non-minimal.
    mu = 2.0
    S = np.array([[1 + 1j * mu, 1.0], [1.0, 1 - 1j * mu]])
    cone = QuadraticCone(S, E_HERM)
    res = classify2(cone)
    assert isinstance(res, DegeneracyReport)
    assert res.reason == "UnclassifiedBoundary"
    for t in (0.3, 0.8 + 0.1j):
        z = np.array([t, -t])
        assert abs(evaluate(cone, z)) <= 1e-12 * abs(t) ** 2 * cone.scale


# --- idempotence and round trips ----------------------------------------------


@pytest.mark.parametrize("tag", TAGS)
def test_idempotence(tag):
    rng = np.random.default_rng(hash(tag) % 2**32)
    for _ in range(10):
        ntype = draw_type(tag, rng)
        cone = render_cone(ntype)
        res = classify2(cone)
        assert res.tag == tag
        for a, b in zip(res.ntype.params(), ntype.params()):
            assert abs(a - b) <= 1e-8 * max(1.0, abs(b))
        # the recovered change of variables maps the cone onto its own render
        back = apply_change(cone, res.T, res.lam, res.sign)
        np.testing.assert_allclose(back.S, cone.S, atol=1e-7 * max(cone.scale, 1))
        np.testing.assert_allclose(back.H, cone.H, atol=1e-7 * max(cone.scale, 1))


@pytest.mark.parametrize("tag", TAGS)
def test_round_trip_stability(tag):
    rng = np.random.default_rng(1000 + hash(tag) % 2**16)
    for _ in range(15):
        ntype = draw_type(tag, rng)
        cone = render_cone(ntype)
        for _ in range(3):
            T = random_gl2(rng)
            lam = float(np.exp(rng.uniform(-2, 2)))
            sign = int(rng.choice([-1, 1]))
            res = classify2(apply_change(cone, T, lam, sign))
            assert res.tag == tag, (tag, ntype.params())
            for a, b in zip(res.ntype.params(), ntype.params()):
                assert abs(a - b) <= 1e-6 * max(1.0, abs(b)), (ntype.params(), res.ntype.params())


# --- uniqueness certificates ---------------------------------------------------


def test_uniqueness_certificate_round_trip():
    rng = np.random.default_rng(43)
    cone = example_m()
    r1 = classify2(apply_change(cone, random_gl2(rng), 1.3, 1))
    r2 = classify2(apply_change(cone, random_gl2(rng), 0.4, -1))
    assert uniqueness_certificate(r1, r2)


def test_uniqueness_certificate_distinguishes_types():
    r1 = classify2(render_cone(NormalFormType("M11_1", a=1.0, b=0.0)))
    r2 = classify2(render_cone(NormalFormType("M11_3")))
    assert r1.tag == "M11_1" and r2.tag == "M11_3"
    assert not uniqueness_certificate(r1, r2)


def test_uniqueness_certificate_identical():
    r = classify2(example_m())
    assert uniqueness_certificate(r, r)


def test_det_certificate_stability():
    # the (det S, det P, det Q) triple of the Im(z1 conj(z2))-frame
    # representative agrees across random re-presentations of one cone
    rng = np.random.default_rng(47)
    cone = example_m()
    ref = oneone_frame_invariants(classify2(cone).ntype)
    for _ in range(25):
        moved = apply_change(cone, random_gl2(rng), float(np.exp(rng.uniform(-1, 1))), 1)
        got = oneone_frame_invariants(classify2(moved).ntype)
        for a, b in zip(ref, got):
            assert abs(a - b) <= 1e-8 * max(1.0, abs(b))


def test_extension_criterion_forces_large_coefficient():
    # det S >= 1/4 and det P < 0 in the Im(z1 conj(z2)) frame implies
    # type M11_1 with A != B and A >= 1
    rng = np.random.default_rng(53)
    found = 0
    while found < 30:
        S = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        S = (S + S.T) / 2
        d = np.linalg.det(S)
        if abs(d) < 1e-3:
            continue
        S = S * np.exp(-0.5j * np.angle(d))  # rotate det S to be positive
        if np.linalg.det(S.real) >= -1e-6 or np.linalg.det(S).real < 0.25 + 1e-6:
            continue
        found += 1
        res = classify2(QuadraticCone(S, E_HERM))
        assert res.tag == "M11_1"
        A, B = res.ntype.params()
        assert A >= 1.0 - 1e-8
        assert abs(A - B) > 1e-8


def test_sign_consistency_at_balanced_signature():
    # when pi == nu both rho and -rho classify; results must agree
    rng = np.random.default_rng(59)
    for _ in range(20):
        ntype = draw_type("M11_1", rng)
        if ntype.params()[0] == 0.0:
            continue
        cone = render_cone(ntype)
        moved = apply_change(cone, random_gl2(rng), 1.0, 1)
        r_pos = classify2(moved)
        r_neg = classify2(moved.negated())
        assert uniqueness_certificate(r_pos, r_neg)
        assert r_pos.sign == -r_neg.sign

"""Dimension reduction for cones in C^n, n >= 3.

A two-dimensional complex subspace L with M able to be decided inside L
settles the extension question for M itself: a one-sided disc family in L
is a one-sided disc family in C^n.  The structured candidate generator
generates the constructive subspace choices (axis slices,
shears z_j = alpha * z_k, explicit dual-direction slices for the linear
coupling cases), every candidate is validated end to end, and a seeded
randomized search backstops conditioning failures.  Cones with two-sided
support are classified separately into product / harmonic-rank /
bilinear-factor forms, each re-verified pointwise before being reported.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .decider import DiscFamily, DiscReport, Verdict, VerificationFailed, decide2, verify_discs
from .normalform import CHOFVAR, DegeneracyReport, NormalFormResult, classify2
from .quadform import (
    ConeError,
    QuadraticCone,
    canonical_sign,
    evaluate_many,
    hermitian_signature,
    mat_norm,
    real_signature,
)
from .reduction import takagi2

GRAM_DET_MIN = 1e-10
Q_ZERO_REL = 1e-10
DET_ONE_MARGIN = 1e-3  # acceptance margin for the | |det S'| - 1 | criterion
EXTENSION_MARGIN = 1e-3
FIT_VERIFY_REL = 1e-10


class DegenerateBasis(ConeError):
    pass


class QNotZero(ConeError):
    pass


@dataclass(frozen=True)
class Slice:
    basis: np.ndarray  # n x 2, columns span L
    description: str

    def __post_init__(self):
        B = np.asarray(self.basis, dtype=complex)
        object.__setattr__(self, "basis", B)
        gram = B.conj().T @ B
        if abs(np.linalg.det(gram)) < GRAM_DET_MIN * max(mat_norm(gram), 1e-300):
            raise DegenerateBasis("slice basis is numerically dependent")


@dataclass(frozen=True)
class SliceResult:
    slice: Slice
    restricted: QuadraticCone
    classification: NormalFormResult | DegeneracyReport
    verdict: Verdict
    disc_report: DiscReport


@dataclass(frozen=True)
class LinearTermsReduction:
    case: str  # "R0" | "R_z1z3" | "R_z2z3" | "R_cz1z3_z2z3" | "R_z1z3_z2z4"
    c: complex | None
    zprime_change: np.ndarray  # (n-2) x (n-2), new z' coordinates as columns


@dataclass(frozen=True)
class TwoSidedForm:
    kind: str  # "product" | "ts1" | "ts2" | "unknown"
    inner: NormalFormResult | DegeneracyReport | None = None
    k: int | None = None
    transform: np.ndarray | None = None
    fit_residual: float = float("nan")
    detail: str = ""


def restrict(cone: QuadraticCone, slc: Slice) -> QuadraticCone:
    """The cone M intersected with span(basis), as a cone in C^2."""
    B = slc.basis
    if B.shape != (cone.n, 2):
        raise DegenerateBasis(f"basis must be {cone.n} x 2")
    S = B.T @ cone.S @ B
    H = B.conj().T @ cone.H @ B
    return QuadraticCone(0.5 * (S + S.T), 0.5 * (H + H.conj().T))


def check_extension_criterion(S) -> bool:
    """Extension criterion for Im(z1 conj(z2))-frame harmonic data.

    True iff |det S| >= 1/4 (within 1e-9) and, after the quarter-phase
    rotation making det S positive real, det Re(S) < -1e-12.
    """
    S = np.asarray(S, dtype=complex)
    d = complex(np.linalg.det(S))
    if abs(d) < 1e-12:
        return False
    St = np.exp(-0.5j * np.angle(d)) * S
    if abs(np.linalg.det(St).imag) > 1e-9 * max(abs(d), 1.0):
        return False
    return abs(d) >= 0.25 - 1e-9 and np.linalg.det(St.real) < -1e-12


def _extension_margin(S) -> float:
    """How robustly check_extension_criterion holds; <= 0 when it fails."""
    S = np.asarray(S, dtype=complex)
    d = complex(np.linalg.det(S))
    if abs(d) < 1e-12:
        return -1.0
    St = np.exp(-0.5j * np.angle(d)) * S
    return min(abs(d) - 0.25, -np.linalg.det(St.real))


def _hermitian_frame(cone: QuadraticCone):
    """W and flags with W* H W = diag(flags), flags sorted +1s, -1s, 0s."""
    w, V = np.linalg.eigh(cone.H)
    tol = 1e-9 * max(mat_norm(cone.H), 1e-300)
    pos = [i for i in range(len(w)) if w[i] > tol]
    neg = [i for i in range(len(w)) if w[i] < -tol]
    ker = [i for i in range(len(w)) if abs(w[i]) <= tol]
    pos.sort(key=lambda i: -w[i])
    neg.sort(key=lambda i: w[i])
    cols = [V[:, i] / np.sqrt(w[i]) for i in pos]
    cols += [V[:, i] / np.sqrt(-w[i]) for i in neg]
    cols += [V[:, i] for i in ker]
    flags = [1] * len(pos) + [-1] * len(neg) + [0] * len(ker)
    return np.column_stack(cols).astype(complex), flags


def _alpha_grid(max_pow: int = 20, phases: int = 16):
    """Deterministic alpha scan: moduli 2^0, 2^1, 2^-1, ..., 16 phases each."""
    powers = [0]
    for k in range(1, max_pow + 1):
        powers.extend([k, -k])
    phase_vals = [np.exp(2j * np.pi * k / phases) for k in range(phases)]
    for p in powers:
        m = 2.0**p
        for ph in phase_vals:
            yield m * ph


def _embed2(n: int, v2) -> np.ndarray:
    out = np.zeros(n, dtype=complex)
    out[:2] = v2
    return out


def _embed_zprime(n: int, v) -> np.ndarray:
    out = np.zeros(n, dtype=complex)
    out[2:] = v
    return out


def _pi2_candidates(cone0: QuadraticCone):
    """Axis slice plus det-criterion-filtered shears, hermitian part (pi>=2)."""
    n = cone0.n
    W, flags = _hermitian_frame(cone0)
    S1 = W.T @ cone0.S @ W
    S1 = 0.5 * (S1 + S1.T)
    tak = takagi2(S1[:2, :2])
    U = np.eye(n, dtype=complex)
    U[:2, :2] = tak.u
    W = W @ U
    S1 = U.T @ S1 @ U
    yield Slice(W[:, :2], "axis slice z_j = 0, j = 3..n")
    for j in range(2, n):
        coupled = max(abs(S1[0, j]), abs(S1[1, j]), abs(S1[j, j]))
        if coupled <= 1e-13 * max(mat_norm(S1), 1e-300) and flags[j] == 0:
            continue
        for al in _alpha_grid():
            herm2 = 1.0 + flags[j] * abs(al) ** 2
            if herm2 > 1e-6:
                # z_j = al * z2 shear
                s_star = np.array(
                    [
                        [S1[0, 0], S1[0, 1] + al * S1[0, j]],
                        [S1[0, 1] + al * S1[0, j], S1[1, 1] + 2 * al * S1[1, j] + al * al * S1[j, j]],
                    ]
                )
                if abs(abs(np.linalg.det(s_star) / herm2) - 1.0) >= DET_ONE_MARGIN:
                    yield Slice(
                        np.column_stack([W[:, 0], W[:, 1] + al * W[:, j]]),
                        f"shear slice z{j + 1} = a z2, a = {al:.6g}",
                    )
            herm1 = 1.0 + flags[j] * abs(al) ** 2
            if herm1 > 1e-6:
                # z_j = al * z1 shear
                s_star = np.array(
                    [
                        [S1[0, 0] + 2 * al * S1[0, j] + al * al * S1[j, j], S1[0, 1] + al * S1[1, j]],
                        [S1[0, 1] + al * S1[1, j], S1[1, 1]],
                    ]
                )
                if abs(abs(np.linalg.det(s_star) / herm1) - 1.0) >= DET_ONE_MARGIN:
                    yield Slice(
                        np.column_stack([W[:, 0] + al * W[:, j], W[:, 1]]),
                        f"shear slice z{j + 1} = a z1, a = {al:.6g}",
                    )


def _oneone_frame(cone0: QuadraticCone):
    """Frame with hermitian part Im(z1 conj(z2)) + 0 and the harmonic blocks.

    Inputs already presented in that frame keep their own coordinates, so
    the reported coupling shapes match the presentation.
    """
    n = cone0.n
    target = np.zeros((n, n), dtype=complex)
    target[0, 1], target[1, 0] = 0.5j, -0.5j
    if mat_norm(cone0.H - target) <= 1e-12 * max(mat_norm(cone0.H), 1e-300):
        return np.eye(n, dtype=complex), np.array(cone0.S)
    W1, _ = _hermitian_frame(cone0)  # diag(1, -1, 0, ...)
    M = np.eye(n, dtype=complex)
    M[:2, :2] = 0.5 * CHOFVAR
    W = W1 @ M
    S1 = W.T @ cone0.S @ W
    S1 = 0.5 * (S1 + S1.T)
    return W, S1


def _dual_vectors(L: np.ndarray):
    """v3, v4 with L @ v_i = e_i for the bilinear functionals in L's rows."""
    sol, *_ = np.linalg.lstsq(L, np.eye(2, dtype=complex), rcond=None)
    return sol[:, 0], sol[:, 1]


def _explicit_pair_slices(n, W, A, B, C, v3, orient: str):
    """The determinant-2 slice choices for a z1 (or z2) linear coupling.

    orient "first": coupling 2 z1 z3, usable when C != 0;
    orient "second": coupling 2 z2 z3, usable when A != 0.
    """
    out = []
    v3e = _embed_zprime(n, v3)
    if orient == "first":
        if abs(C.real) <= 1e-12 * max(abs(C), 1.0):
            alpha = -(A + C) / 2.0
            beta = -B + np.sqrt(abs(C) ** 2 + 2.0)
        else:
            alpha = -(A + np.conj(C)) / 2.0
            beta = -B + 1j * np.sqrt(abs(C) ** 2 + 2.0)
        b1 = W @ (_embed2(n, [1.0, 0.0]) + alpha * v3e)
        b2 = W @ (_embed2(n, [0.0, 1.0]) + beta * v3e)
        out.append(Slice(np.column_stack([b1, b2]), "dual slice z3 = a z1 + b z2"))
    else:
        if abs(A.real) <= 1e-12 * max(abs(A), 1.0):
            alpha = -(C + A) / 2.0
            beta = -B + np.sqrt(abs(A) ** 2 + 2.0)
        else:
            alpha = -(C + np.conj(A)) / 2.0
            beta = -B + 1j * np.sqrt(abs(A) ** 2 + 2.0)
        b1 = W @ (_embed2(n, [1.0, 0.0]) + beta * v3e)
        b2 = W @ (_embed2(n, [0.0, 1.0]) + alpha * v3e)
        out.append(Slice(np.column_stack([b1, b2]), "dual slice z3 = a z2 + b z1"))
    return out


def _oneone_candidates(cone0: QuadraticCone):
    n = cone0.n
    W, S1 = _oneone_frame(cone0)
    scale = max(mat_norm(S1), 1e-300)
    St = S1[:2, :2]
    L = S1[:2, 2:]
    Qp = S1[2:, 2:]

    if mat_norm(Qp) > Q_ZERO_REL * scale:
        # quadratic z' part present: slice down to a |z1|^2-definite frame
        Md = np.eye(n, dtype=complex)
        Md[:2, :2] = CHOFVAR  # hermitian block becomes diag(1, -1)
        Wd = W @ Md
        probes = _quadratic_support_probes(Qp)
        for v in probes:
            ve = _embed_zprime(n, v)
            for al in (0.0, 0.5, 2.0, -0.5, -2.0, 0.5j, 2j, -0.5j, -2j, 0.25, 4.0):
                b1 = Wd @ (_embed2(n, [1.0, al]))
                b2 = Wd @ ve
                yield Slice(np.column_stack([b1, b2]), f"line slice z2 = a z1, a = {al:.4g}")
        return

    sv = np.linalg.svd(L, compute_uv=False) if L.size else np.array([0.0])
    lrank = int(np.sum(sv > 1e-10 * max(scale, 1.0)))
    if lrank == 0:
        yield Slice(W[:, :2], "axis slice z_j = 0, j = 3..n (product)")
        return

    A, B, C = St[0, 0], St[0, 1], St[1, 1]
    if lrank == 2:
        v3, v4 = _dual_vectors(L)
        if abs(C) > 1e-10 * scale:
            yield from _explicit_pair_slices(n, W, A, B, C, v3, "first")
        if abs(A) > 1e-10 * scale:
            yield from _explicit_pair_slices(n, W, A, B, C, v4, "second")
        if abs(A) <= 1e-10 * scale and abs(C) <= 1e-10 * scale:
            # both quadratic coefficients vanish: the explicit two-direction slice
            c1 = _embed2(n, [1.0, 0.0]) + 0.5 * _embed_zprime(n, v3) + (-B / 2 + 1j) * _embed_zprime(n, v4)
            c2 = _embed2(n, [0.0, 1.0]) + (-B / 2 + 1j) * _embed_zprime(n, v3) - 0.5 * _embed_zprime(n, v4)
            yield Slice(np.column_stack([W @ c1, W @ c2]), "independent-coupling slice")
        return

    # rank one: l1 = c1 * m, l2 = c2 * m for a common functional m
    _, _, vh = np.linalg.svd(L)
    m = vh[0]
    denom = m @ m.conj()
    c1 = (L[0] @ m.conj()) / denom
    c2 = (L[1] @ m.conj()) / denom
    v_m = m.conj() / denom  # m . v_m = 1
    big = max(abs(c1), abs(c2))
    if abs(c2) <= 1e-10 * big:
        # coupling through z1 only
        if abs(C) > 1e-10 * scale:
            yield from _explicit_pair_slices(n, W, A, B, C, v_m / c1, "first")
        return
    if abs(c1) <= 1e-10 * big:
        if abs(A) > 1e-10 * scale:
            yield from _explicit_pair_slices(n, W, A, B, C, v_m / c2, "second")
        return

    c = c1 / c2
    v3 = v_m / c2  # l1 = c z3, l2 = z3 in the coordinate z3 = l2(z')
    if abs(c.imag) <= 1e-10 * abs(c):
        # real coupling ratio: an SL(2,R) change turns this into a pure z1 coupling
        cr = c.real
        G = np.array([[1.0 / cr, -1.0], [0.0, cr]], dtype=complex)
        Sg = G.T @ St @ G
        Ag, Bg, Cg = Sg[0, 0], Sg[0, 1], Sg[1, 1]
        if abs(Cg) > 1e-10 * scale:
            v3e = _embed_zprime(n, v3)
            if abs(Cg.real) <= 1e-12 * max(abs(Cg), 1.0):
                alpha = -(Ag + Cg) / 2.0
                beta = -Bg + np.sqrt(abs(Cg) ** 2 + 2.0)
            else:
                alpha = -(Ag + np.conj(Cg)) / 2.0
                beta = -Bg + 1j * np.sqrt(abs(Cg) ** 2 + 2.0)
            b1 = W @ (_embed2(n, G[:, 0]) + alpha * v3e)
            b2 = W @ (_embed2(n, G[:, 1]) + beta * v3e)
            yield Slice(np.column_stack([b1, b2]), "dual slice after real-ratio reduction")
        return
    # complex ratio: scan z3 = al * z2 slices, filtered by the extension criterion
    T_coupling = np.array([[0.0, c], [c, 2.0]], dtype=complex)
    sin_c = np.sin(np.angle(c))
    argA = np.angle(A) if abs(A) > 0 else 0.0
    phase_order = sorted(
        range(16),
        key=lambda k: 0 if np.sin(2 * np.pi * k / 16 + np.angle(c) - argA) * sin_c < 0 else 1,
    )
    powers = [0]
    for k in range(1, 21):
        powers.extend([k, -k])
    v3e = _embed_zprime(n, v3)
    for p in powers:
        mmod = 2.0**p
        for k in phase_order:
            al = mmod * np.exp(2j * np.pi * k / 16)
            s_star = St + al * T_coupling  # coupling normalized through v3
            if _extension_margin(s_star) >= EXTENSION_MARGIN:
                b1 = W @ _embed2(n, [1.0, 0.0])
                b2 = W @ (_embed2(n, [0.0, 1.0]) + al * v3e)
                yield Slice(np.column_stack([b1, b2]), f"line slice z3 = a z2, a = {al:.6g}")


def _quadratic_support_probes(Qp: np.ndarray):
    """Directions v with v^T Qp v != 0, tried in a deterministic order."""
    m = Qp.shape[0]
    tol = 1e-10 * max(mat_norm(Qp), 1e-300)
    probes = []
    for i in range(m):
        e = np.zeros(m, dtype=complex)
        e[i] = 1.0
        if abs(Qp[i, i]) > tol:
            probes.append(e)
    for i in range(m):
        for j in range(i + 1, m):
            if abs(Qp[i, j]) > tol:
                for w in (1.0, 1j):
                    v = np.zeros(m, dtype=complex)
                    v[i], v[j] = 1.0, w
                    if abs(v @ Qp @ v) > tol:
                        probes.append(v)
    return probes[:8] if probes else []


def _onezero_candidates(cone0: QuadraticCone):
    n = cone0.n
    W, _ = _hermitian_frame(cone0)
    S1 = W.T @ cone0.S @ W
    S1 = 0.5 * (S1 + S1.T)
    Qp = S1[1:, 1:]
    if mat_norm(Qp) <= Q_ZERO_REL * max(mat_norm(S1), 1e-300):
        return  # {z1 = 0} lies inside the cone: non-minimal
    for v in _quadratic_support_probes(Qp):
        ve = np.zeros(n, dtype=complex)
        ve[1:] = v
        yield Slice(np.column_stack([W[:, 0], W @ ve]), "quadratic-support slice")


def _structured_candidates(cone0: QuadraticCone):
    sig = hermitian_signature(cone0)
    if sig.pi >= 2:
        yield from _pi2_candidates(cone0)
    elif (sig.pi, sig.nu) == (1, 1):
        yield from _oneone_candidates(cone0)
    elif (sig.pi, sig.nu) == (1, 0):
        yield from _onezero_candidates(cone0)
    # (0, 0): a harmonic-only cone has two-sided support; no candidates


def _try_slice(
    cone: QuadraticCone, slc: Slice, samples: int, eps_grid, seed: int
) -> SliceResult | None:
    try:
        restricted = restrict(cone, slc)
        cls = classify2(restricted)
    except (DegenerateBasis, ConeError):
        return None
    if isinstance(cls, DegeneracyReport):
        if cls.reason not in ("PointCone", "DimensionDeficient"):
            return None
        rsig = real_signature(restricted)
        if rsig.q == 0 and rsig.p > 0:
            side = 1
        elif rsig.p == 0 and rsig.q > 0:
            side = -1
        else:
            return None
        fam = DiscFamily(kind="level_set", side=side, c=np.eye(2, dtype=complex))
        verdict = Verdict(outcome="one_sided", side=side, discs=fam,
                          note="definite slice: discs avoid the cone entirely")
    else:
        verdict = decide2(cls)
        if verdict.outcome != "one_sided":
            return None
        fam = verdict.discs
    try:
        report = verify_discs(restricted, fam, eps_grid=eps_grid, samples=samples, seed=seed)
    except VerificationFailed:
        return None
    return SliceResult(
        slice=slc, restricted=restricted, classification=cls, verdict=verdict, disc_report=report
    )


def find_good_slice(
    cone: QuadraticCone,
    budget: int = 256,
    seed: int = 0,
    samples: int = 2000,
    eps_grid=(1e-2, 1e-1),
) -> SliceResult | None:
    """First two-dimensional slice whose restricted cone is one-sided.

    Structured candidates (driven by the hermitian signature) come first in
    a deterministic order; remaining budget goes to seeded random
    subspaces.  Every returned slice has passed disc verification on the
    restricted cone.  None means no one-sided slice was found, which for a
    valid cone points at two-sided support (see classify_two_sided_nd).
    """
    if cone.n < 3:
        raise ConeError("find_good_slice expects n >= 3")
    if budget < 1:
        raise ConeError("budget must be >= 1")
    cone0, _ = canonical_sign(cone)
    spent = 0
    for slc in _structured_candidates(cone0):
        if spent >= budget:
            return None
        spent += 1
        res = _try_slice(cone, slc, samples, eps_grid, seed)
        if res is not None:
            return res
    rng = np.random.default_rng(seed)
    while spent < budget:
        spent += 1
        raw = rng.standard_normal((cone.n, 2)) + 1j * rng.standard_normal((cone.n, 2))
        basis, _ = np.linalg.qr(raw)
        try:
            slc = Slice(basis, "random subspace")
        except DegenerateBasis:
            continue
        res = _try_slice(cone, slc, samples, eps_grid, seed)
        if res is not None:
            return res
    return None


def reduce_linear_terms(cone: QuadraticCone) -> LinearTermsReduction:
    """Normalize the linear z' couplings of a (1,1) cone with no z' quadratic.

    Returns which of the five coupling shapes applies, the coupling ratio c
    for the dependent case, and a z' coordinate change whose first columns
    realize the named coordinates (z3, and z4 when independent).
    """
    if hermitian_signature(cone).as_tuple() != (1, 1):
        raise ConeError("reduce_linear_terms expects hermitian signature (1,1)")
    n = cone.n
    _, S1 = _oneone_frame(cone)
    scale = max(mat_norm(S1), 1e-300)
    L = S1[:2, 2:]
    Qp = S1[2:, 2:]
    if mat_norm(Qp) > Q_ZERO_REL * scale:
        raise QNotZero("quadratic z' part is not zero")
    m = n - 2
    sv = np.linalg.svd(L, compute_uv=False) if L.size else np.array([0.0])
    lrank = int(np.sum(sv > 1e-10 * max(scale, 1.0)))
    if lrank == 0:
        return LinearTermsReduction(case="R0", c=None, zprime_change=np.eye(m, dtype=complex))

    def completed(cols):
        Mx = np.zeros((m, m), dtype=complex)
        k = len(cols)
        for i, c_ in enumerate(cols):
            Mx[:, i] = c_
        # complete with an orthonormal basis of the complement
        q, _ = np.linalg.qr(np.column_stack(cols))
        proj = np.eye(m) - q @ q.conj().T
        extra = []
        for i in range(m):
            e = proj[:, i]
            if np.linalg.norm(e) > 1e-8:
                e = e / np.linalg.norm(e)
                extra.append(e)
                proj = proj - np.outer(e, e.conj())
            if len(cols) + len(extra) == m:
                break
        for i, c_ in enumerate(extra):
            Mx[:, k + i] = c_
        return Mx

    if lrank == 2:
        v3, v4 = _dual_vectors(L)
        return LinearTermsReduction(case="R_z1z3_z2z4", c=None, zprime_change=completed([v3, v4]))
    _, _, vh = np.linalg.svd(L)
    mrow = vh[0]
    denom = mrow @ mrow.conj()
    c1 = (L[0] @ mrow.conj()) / denom
    c2 = (L[1] @ mrow.conj()) / denom
    v_m = mrow.conj() / denom
    big = max(abs(c1), abs(c2))
    if abs(c2) <= 1e-10 * big:
        return LinearTermsReduction(case="R_z1z3", c=None, zprime_change=completed([v_m / c1]))
    if abs(c1) <= 1e-10 * big:
        return LinearTermsReduction(case="R_z2z3", c=None, zprime_change=completed([v_m / c2]))
    return LinearTermsReduction(
        case="R_cz1z3_z2z3", c=complex(c1 / c2), zprime_change=completed([v_m / c2])
    )


def _lagrange_diagonalize(S: np.ndarray, tol_rel: float = 1e-10):
    """T invertible with T^T S T diagonal (complex congruence), pivoted."""
    n = S.shape[0]
    A = np.array(S, dtype=complex)
    T = np.eye(n, dtype=complex)
    norm0 = max(mat_norm(S), 1e-300)
    for i in range(n):
        sub = A[i:, i:]
        dlead = np.abs(np.diag(sub))
        if dlead.max(initial=0.0) <= tol_rel * norm0:
            off = np.abs(sub)
            if off.max(initial=0.0) <= tol_rel * norm0:
                break
            r, c_ = divmod(int(np.argmax(off)), sub.shape[1])
            r, c_ = r + i, c_ + i
            E = np.eye(n, dtype=complex)
            E[c_, r] = 1.0  # column r += column c_: creates a diagonal pivot
            A = E.T @ A @ E
            T = T @ E
            sub = A[i:, i:]
            dlead = np.abs(np.diag(sub))
        j = i + int(np.argmax(dlead))
        if j != i:
            E = np.eye(n, dtype=complex)
            E[:, [i, j]] = E[:, [j, i]]
            A = E.T @ A @ E
            T = T @ E
        piv = A[i, i]
        if abs(piv) <= tol_rel * norm0:
            break
        E = np.eye(n, dtype=complex)
        E[i, i + 1 :] = -A[i, i + 1 :] / piv
        A = E.T @ A @ E
        T = T @ E
    return T, np.diag(A).copy()


def _verify_pointwise(cone: QuadraticCone, model, seed: int = 5, count: int = 256) -> float:
    rng = np.random.default_rng(seed)
    Z = rng.standard_normal((count, cone.n)) + 1j * rng.standard_normal((count, cone.n))
    Z /= np.linalg.norm(Z, axis=1)[:, None]
    vals = evaluate_many(cone, Z)
    return float(np.max(np.abs(vals - model(Z))))


def classify_two_sided_nd(cone: QuadraticCone) -> TwoSidedForm:
    """Recognize the two-sided normal shapes in C^n, n >= 3.

    Detects, in order: a product with an inert C^(n-2) factor (joint kernel
    of the coefficient pair has complex dimension n-2), a purely harmonic
    cone Re(z1^2 + ... + zk^2) with k > 2, and the bilinear-factor shape
    Re((z2 + conj(z3)) z1).  Every recognized form is re-verified pointwise
    before being returned; anything else comes back as "unknown" rather
    than a guess.
    """
    if cone.n < 3:
        raise ConeError("classify_two_sided_nd expects n >= 3")
    n = cone.n
    scale = max(cone.scale, 1e-300)

    stacked = np.vstack([cone.S, cone.H])
    sv = np.linalg.svd(stacked, compute_uv=False)
    kdim = int(np.sum(sv <= 1e-9 * max(sv[0], 1e-300)))
    if kdim >= n - 2 and sv[0] > 0:
        _, _, vh = np.linalg.svd(stacked)
        Bc = vh[: n - kdim].conj().T
        Kb = vh[n - kdim :].conj().T
        if Bc.shape[1] == 2:
            rng = np.random.default_rng(3)
            Zw = rng.standard_normal((128, 2)) + 1j * rng.standard_normal((128, 2))
            Zu = rng.standard_normal((128, n - 2)) + 1j * rng.standard_normal((128, n - 2))
            full = Zw @ Bc.T + Zu @ Kb.T
            base = Zw @ Bc.T
            resid = float(np.max(np.abs(evaluate_many(cone, full) - evaluate_many(cone, base))))
            if resid <= FIT_VERIFY_REL * scale * float(np.max(np.linalg.norm(full, axis=1) ** 2)):
                inner = classify2(restrict(cone, Slice(Bc, "product factor")))
                return TwoSidedForm(
                    kind="product", inner=inner, transform=Bc, fit_residual=resid,
                    detail="rho is independent of an (n-2)-dimensional complex factor",
                )

    if mat_norm(cone.H) <= 1e-10 * scale:
        T, d = _lagrange_diagonalize(cone.S)
        k = int(np.sum(np.abs(d) > 1e-10 * max(np.abs(d).max(initial=0.0), 1e-300)))
        if k > 2:
            order = np.argsort(-np.abs(d))
            T = T[:, order]
            d = d[order]
            Tn = T.copy()
            for i in range(k):
                Tn[:, i] = T[:, i] / np.sqrt(d[i])

            def model(Z, Tn=Tn, k=k):
                Wc = Z @ np.linalg.inv(Tn).T
                return np.sum(Wc[:, :k] ** 2, axis=1).real

            resid = _verify_pointwise(cone, model)
            if resid <= FIT_VERIFY_REL * scale * 10:
                return TwoSidedForm(
                    kind="ts1", k=k, transform=Tn, fit_residual=resid,
                    detail=f"purely harmonic with rank {k} >= 3",
                )

    form = _ts2_fit(cone)
    if form is not None:
        return form
    return TwoSidedForm(kind="unknown", detail="no verified two-sided shape matched")


def _ts2_fit(cone: QuadraticCone) -> TwoSidedForm | None:
    """Fit rho = Re((lambda(z) + conj(mu(z))) alpha(z)) with independent forms."""
    n = cone.n
    scale = max(cone.scale, 1e-300)
    if hermitian_signature(cone).as_tuple() != (1, 1):
        return None
    if real_signature(cone).as_tuple() != (2, 2):
        return None
    s_sv = np.linalg.svd(cone.S, compute_uv=False)
    if int(np.sum(s_sv > 1e-9 * max(s_sv[0], 1e-300))) != 2:
        return None
    T, d = _lagrange_diagonalize(cone.S)
    order = np.argsort(-np.abs(d))
    T, d = T[:, order], d[order]
    Tin = np.linalg.inv(T)
    u1, u2 = Tin[0], Tin[1]
    r1, r2 = np.sqrt(d[0]), np.sqrt(d[1])
    cand_a = r1 * u1 + 1j * r2 * u2
    cand_l = r1 * u1 - 1j * r2 * u2
    for a, l in ((cand_a, cand_l), (cand_l, cand_a)):
        m = _solve_hermitian_factor(cone.H, a)
        if m is None:
            continue
        forms = np.vstack([a, l, m])
        fs = np.linalg.svd(forms, compute_uv=False)
        if fs[-1] <= 1e-8 * fs[0]:
            continue

        def model(Z, a=a, l=l, m=m):
            return np.real((Z @ l + np.conj(Z @ m)) * (Z @ a))

        resid = _verify_pointwise(cone, model)
        if resid <= FIT_VERIFY_REL * scale * 10:
            return TwoSidedForm(
                kind="ts2", transform=forms.T, fit_residual=resid,
                detail="rho = Re((lambda + conj(mu)) alpha) with independent linear forms",
            )
    return None


def _solve_hermitian_factor(H: np.ndarray, a: np.ndarray) -> np.ndarray | None:
    """m with H = (conj(m) a^T + conj(a) m^T) / 2, or None if inconsistent."""
    n = H.shape[0]
    rows = []
    rhs = []
    for i in range(n):
        for j in range(n):
            # H_ij = (conj(m_i) a_j + conj(a_i) m_j) / 2, unknowns Re m, Im m
            row_re = np.zeros(2 * n)
            row_im = np.zeros(2 * n)
            # conj(m_i) a_j / 2
            row_re[i] += 0.5 * a[j].real
            row_im[i] += 0.5 * a[j].imag
            row_re[n + i] += 0.5 * a[j].imag
            row_im[n + i] += -0.5 * a[j].real
            # conj(a_i) m_j / 2
            row_re[j] += 0.5 * a[i].real
            row_im[j] += -0.5 * a[i].imag
            row_re[n + j] += 0.5 * a[i].imag
            row_im[n + j] += 0.5 * a[i].real
            rows.extend([row_re, row_im])
            rhs.extend([H[i, j].real, H[i, j].imag])
    A = np.array(rows)
    b = np.array(rhs)
    x, *_ = np.linalg.lstsq(A, b, rcond=None)
    resid = np.linalg.norm(A @ x - b)
    if resid > 1e-8 * max(np.linalg.norm(b), 1.0):
        return None
    return x[:n] + 1j * x[n:]

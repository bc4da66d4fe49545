"""Real quadratic forms on C^n: construction, decomposition, signatures, sampling.

A cone here is the zero set of rho(z) = Re(z^T S z) + conj(z)^T H z with S
complex symmetric (the harmonic coefficients) and H hermitian.  The pair
(S, H) is unique for a given real quadratic polynomial, and every operation
in the package works on this representation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Relative eigenvalue threshold below which an eigenvalue counts as zero.
ZERO_EIG_REL = 1e-9
# Relative symmetry / hermiticity tolerance for constructor validation.
SYM_REL = 1e-12
# Residual bound for points produced by sample_cone, relative to |z|^2.
SAMPLE_RESIDUAL_REL = 1e-10


class ConeError(ValueError):
    """Base class for structured errors raised by this package."""


class NonHomogeneous(ConeError):
    """Input polynomial contains a monomial of degree other than two."""


class NonReal(ConeError):
    """Input polynomial has non-real coefficients."""


class NotSymmetric(ConeError):
    """Matrix expected to be (conjugate-)symmetric is not, beyond tolerance."""


class InsufficientSamples(ConeError):
    """sample_cone could not find enough real points within its budget."""


def mat_norm(m) -> float:
    """Spectral norm, guarded for the zero matrix."""
    m = np.asarray(m)
    if m.size == 0 or not np.any(m):
        return 0.0
    return float(np.linalg.norm(m, 2))


@dataclass(frozen=True)
class HermitianSignature:
    """Counts of positive/negative eigenvalues of the hermitian part."""

    pi: int
    nu: int

    def as_tuple(self):
        return (self.pi, self.nu)


@dataclass(frozen=True)
class RealSignature:
    """Inertia (p, q) of rho viewed as a real quadratic form on R^(2n)."""

    p: int
    q: int

    def as_tuple(self):
        return (self.p, self.q)


@dataclass(frozen=True)
class ConeSample:
    point: np.ndarray
    residual: float


class QuadraticCone:
    """Immutable value object holding the (S, H) coefficient pair.

    S is symmetrized and H hermitized on construction; an asymmetry beyond
    SYM_REL * norm raises NotSymmetric instead of being silently absorbed.
    """

    __slots__ = ("n", "S", "H")

    def __init__(self, S, H):
        S = np.array(S, dtype=complex)
        H = np.array(H, dtype=complex)
        if S.ndim != 2 or S.shape[0] != S.shape[1] or S.shape != H.shape:
            raise ConeError(f"S and H must be square of equal size, got {S.shape} and {H.shape}")
        n = S.shape[0]
        if n < 2:
            raise ConeError("dimension must be at least 2")
        s_scale = mat_norm(S)
        h_scale = mat_norm(H)
        if mat_norm(S - S.T) > SYM_REL * max(s_scale, 1e-300):
            raise NotSymmetric("S is not symmetric within tolerance")
        if mat_norm(H - H.conj().T) > SYM_REL * max(h_scale, 1e-300):
            raise NotSymmetric("H is not hermitian within tolerance")
        S = 0.5 * (S + S.T)
        H = 0.5 * (H + H.conj().T)
        S.setflags(write=False)
        H.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "H", H)

    def __setattr__(self, *a):  # immutability, safe to share across threads
        raise AttributeError("QuadraticCone is immutable")

    def __repr__(self):
        return f"QuadraticCone(n={self.n})"

    def __eq__(self, other):
        if not isinstance(other, QuadraticCone):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.S, other.S) and np.array_equal(self.H, other.H)

    @property
    def scale(self) -> float:
        """Coefficient magnitude ||S|| + ||H||, the natural error scale."""
        return mat_norm(self.S) + mat_norm(self.H)

    def negated(self) -> "QuadraticCone":
        return QuadraticCone(-self.S, -self.H)


def evaluate(cone: QuadraticCone, z) -> float:
    """rho(z) = Re(z^T S z) + conj(z)^T H z at a single point."""
    z = np.asarray(z, dtype=complex)
    return float((z @ cone.S @ z).real + (z.conj() @ cone.H @ z).real)


def evaluate_many(cone: QuadraticCone, Z) -> np.ndarray:
    """Vectorized rho over rows of Z (shape (m, n))."""
    Z = np.asarray(Z, dtype=complex)
    harm = np.einsum("ij,jk,ik->i", Z, cone.S, Z)
    herm = np.einsum("ij,jk,ik->i", Z.conj(), cone.H, Z)
    return harm.real + herm.real


def real_form_matrix(cone: QuadraticCone) -> np.ndarray:
    """The 2n x 2n real symmetric matrix G with rho = (x,y)^T G (x,y).

    Coordinates are ordered x_1..x_n, y_1..y_n.  With S = Sr + i*Si and
    H = Hr + i*Hi the identity is

        rho = x^T (Sr+Hr) x + y^T (Hr-Sr) y - 2 x^T (Si+Hi) y.
    """
    Sr, Si = cone.S.real, cone.S.imag
    Hr, Hi = cone.H.real, cone.H.imag
    n = cone.n
    G = np.zeros((2 * n, 2 * n))
    G[:n, :n] = Sr + Hr
    G[n:, n:] = Hr - Sr
    G[:n, n:] = -(Si + Hi)
    G[n:, :n] = G[:n, n:].T
    return G


def decompose_real_form(G) -> QuadraticCone:
    """Unique (S, H) with Re(z^T S z) + conj(z)^T H z = (x,y)^T G (x,y).

    G must be a real symmetric 2n x 2n matrix in x_1..x_n, y_1..y_n order.
    """
    G = np.asarray(G)
    if np.iscomplexobj(G) and mat_norm(G.imag) > SYM_REL * max(mat_norm(G), 1e-300):
        raise NonReal("real-form matrix has non-real entries")
    G = np.asarray(G.real, dtype=float)
    m = G.shape[0]
    if G.ndim != 2 or G.shape[1] != m or m % 2:
        raise ConeError("real-form matrix must be square of even size")
    if mat_norm(G - G.T) > SYM_REL * max(mat_norm(G), 1e-300):
        raise NotSymmetric("real-form matrix is not symmetric")
    G = 0.5 * (G + G.T)
    n = m // 2
    Gxx, Gyy, Gxy = G[:n, :n], G[n:, n:], G[:n, n:]
    Sr = 0.5 * (Gxx - Gyy)
    Hr = 0.5 * (Gxx + Gyy)
    Si = -0.5 * (Gxy + Gxy.T)
    Hi = -0.5 * (Gxy - Gxy.T)
    return QuadraticCone(Sr + 1j * Si, Hr + 1j * Hi)


def decompose_poly(n: int, terms) -> QuadraticCone:
    """Decompose a polynomial given as [((var, var), coeff), ...].

    Variables are named "x1".."xn", "y1".."yn"; every monomial must have
    total degree exactly two and a real coefficient.
    """

    def index(name: str) -> int:
        kind, num = name[0], name[1:]
        if kind not in ("x", "y") or not num.isdigit():
            raise ConeError(f"unknown variable {name!r}")
        j = int(num)
        if not 1 <= j <= n:
            raise ConeError(f"variable {name!r} out of range for n={n}")
        return (j - 1) + (n if kind == "y" else 0)

    G = np.zeros((2 * n, 2 * n))
    for vars_, coeff in terms:
        if isinstance(coeff, complex) and coeff.imag != 0:
            raise NonReal(f"coefficient {coeff} of {vars_} is not real")
        if len(vars_) != 2:
            raise NonHomogeneous(f"monomial {vars_} has degree {len(vars_)}, expected 2")
        i, j = index(vars_[0]), index(vars_[1])
        c = float(np.real(coeff))
        G[i, j] += c / 2.0
        G[j, i] += c / 2.0
    return decompose_real_form(G)


def hermitian_signature(cone: QuadraticCone, tol: float | None = None) -> HermitianSignature:
    """Eigenvalue counts of H above/below +-tol (default 1e-9 * ||H||)."""
    w = np.linalg.eigvalsh(cone.H)
    if tol is None:
        tol = ZERO_EIG_REL * max(mat_norm(cone.H), 1e-300)
    return HermitianSignature(int(np.sum(w > tol)), int(np.sum(w < -tol)))


def real_signature(cone: QuadraticCone, tol: float | None = None) -> RealSignature:
    """Inertia of the real form of rho on R^(2n)."""
    G = real_form_matrix(cone)
    w = np.linalg.eigvalsh(G)
    if tol is None:
        tol = ZERO_EIG_REL * max(mat_norm(G), 1e-300)
    return RealSignature(int(np.sum(w > tol)), int(np.sum(w < -tol)))


def canonical_sign(cone: QuadraticCone) -> tuple[QuadraticCone, int]:
    """Flip rho so the hermitian signature satisfies pi >= nu.

    At pi == nu the input sign is kept; downstream classification treats the
    tie explicitly (both signs classify to the same normal form).
    """
    sig = hermitian_signature(cone)
    if sig.pi < sig.nu:
        return cone.negated(), -1
    return cone, +1


def sample_cone(cone: QuadraticCone, seed: int, count: int, radius: float = 1.0) -> list[ConeSample]:
    """Deterministic points on the cone found along random real 2-plane sections.

    Draws real directions u, v, solves the real quadratic rho(u + t v) = 0
    for t, keeps real roots and rescales each point into |z| <= radius (the
    cone is homogeneous, so rescaling stays on it).  The generator is
    numpy's default PCG64 seeded with `seed`; accept/reject decisions are
    reproducible across platforms at fixed numpy versions.
    """
    if count < 1:
        raise ConeError("count must be >= 1")
    if radius <= 0:
        raise ConeError("radius must be positive")
    rng = np.random.default_rng(seed)
    n = cone.n
    out: list[ConeSample] = []
    batch = max(count, 256)
    max_batches = 64

    def rho_many(Z):
        return evaluate_many(cone, Z)

    for _ in range(max_batches):
        U = rng.standard_normal((batch, n)) + 1j * rng.standard_normal((batch, n))
        V = rng.standard_normal((batch, n)) + 1j * rng.standard_normal((batch, n))
        scales = rng.uniform(0.05, 1.0, size=2 * batch)
        a = rho_many(V)
        c = rho_many(U)
        b = rho_many(U + V) - a - c  # real polarization term
        disc = b * b - 4.0 * a * c
        for i in range(batch):
            if disc[i] < 0:
                continue
            sq = np.sqrt(disc[i])
            # stable quadratic roots; handle the nearly-linear case
            if abs(a[i]) < 1e-14 * (abs(b[i]) + abs(c[i]) + 1e-300):
                roots = [-c[i] / b[i]] if abs(b[i]) > 0 else []
            else:
                qq = -0.5 * (b[i] + np.copysign(sq, b[i]))
                roots = [qq / a[i]]
                if abs(qq) > 0:
                    roots.append(c[i] / qq)
            for k, t in enumerate(roots):
                p = U[i] + t * V[i]
                norm = np.linalg.norm(p)
                if norm < 1e-9:
                    continue
                p = p * (radius * scales[(2 * i + k) % (2 * batch)] / norm)
                # one Newton polish along V to keep the residual at rounding level
                dv = V[i] * (radius / max(np.linalg.norm(V[i]), 1e-300))
                r0 = evaluate(cone, p)
                g = evaluate(cone, p + 1e-7 * dv) - r0
                if abs(g) > 1e-300:
                    p = p - (r0 * 1e-7 / g) * dv
                res = abs(evaluate(cone, p))
                if res <= SAMPLE_RESIDUAL_REL * np.linalg.norm(p) ** 2 * max(cone.scale, 1.0):
                    out.append(ConeSample(point=p, residual=res))
                    if len(out) == count:
                        return out
    raise InsufficientSamples(
        f"found {len(out)} of {count} requested cone points; rho may be (semi)definite"
    )


def sample_points(cone: QuadraticCone, seed: int, count: int, radius: float = 1.0) -> np.ndarray:
    """Convenience wrapper returning the sample points as an (m, n) array."""
    return np.array([s.point for s in sample_cone(cone, seed, count, radius)])

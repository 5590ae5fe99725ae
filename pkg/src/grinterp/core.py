"""Points, tangents, geodesics, Exp/Log and distances on Gr(n, p).

A subspace [U] in Gr(n, p) is represented by a column-orthonormal matrix
U in St(n, p); the rank-p projector U U^T is never formed at full n x n
size. Tangent vectors are represented by their *horizontal lifts*: n x p
matrices D with U^T D = 0.

Metric convention
-----------------
The projector-space metric is <X, Y> = 1/2 trace(X^T Y). For horizontal
lifts D, E of projector tangents X, Y one has

    <X, Y> = trace(D^T E),

i.e. the *plain* Frobenius inner product of the lifts equals the
canonical inner product of the projector tangents (the factor 1/2
cancels against the two off-diagonal blocks). :func:`canonical_inner`
therefore returns ``trace(x^T y)`` without a 1/2 factor, and a
unit-speed geodesic is one whose lift has unit Frobenius norm.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from ._validation import as_float_matrix, readonly
from .exceptions import BaseMismatch, CutLocus, RankDeficient

FEASIBILITY_TOL = 1e-10
HORIZONTALITY_TOL = 1e-10
_RANK_TOL = 1e-12
_COND_LIMIT = 1e12
_SMALL_ANGLE = 1e-4


def thin_svd(a: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Thin SVD with a deterministic sign convention.

    Signs are fixed so that the largest-magnitude entry of each left
    singular vector is positive, making downstream results reproducible
    across LAPACK backends.
    """
    u, s, vt = np.linalg.svd(a, full_matrices=False)
    idx = np.argmax(np.abs(u), axis=0)
    signs = np.sign(u[idx, np.arange(u.shape[1])])
    signs[signs == 0] = 1.0
    return u * signs, s, signs[:, None] * vt


@dataclass(frozen=True, eq=False)
class StiefelPoint:
    """A column-orthonormal n x p representative of a subspace in Gr(n, p)."""

    u: np.ndarray

    def __post_init__(self):
        a = as_float_matrix(self.u, "u")
        n, p = a.shape
        if not (n >= p >= 1):
            raise ValueError(f"need n >= p >= 1, got n={n}, p={p}")
        err = np.linalg.norm(a.T @ a - np.eye(p))
        if err > FEASIBILITY_TOL:
            raise ValueError(
                f"columns are not orthonormal: ||u^T u - I||_F = {err:.3e}"
            )
        if p > n / 2:
            warnings.warn(
                f"p={p} exceeds n/2={n / 2:g}; chart-based methods assume p <= n/2",
                stacklevel=3,
            )
        object.__setattr__(self, "u", readonly(a))

    @property
    def n(self) -> int:
        return self.u.shape[0]

    @property
    def p(self) -> int:
        return self.u.shape[1]

    def feasibility(self) -> float:
        """||u^T u - I||_F of the stored representative."""
        return float(np.linalg.norm(self.u.T @ self.u - np.eye(self.p)))


@dataclass(frozen=True, eq=False)
class HorizontalTangent:
    """Horizontal lift of a Grassmann tangent vector at ``base``."""

    delta: np.ndarray
    base: StiefelPoint

    def __post_init__(self):
        d = as_float_matrix(self.delta, "delta")
        if d.shape != self.base.u.shape:
            raise ValueError(
                f"delta shape {d.shape} does not match base {self.base.u.shape}"
            )
        err = np.linalg.norm(self.base.u.T @ d)
        if err > HORIZONTALITY_TOL * max(1.0, np.linalg.norm(d)):
            raise ValueError(f"tangent is not horizontal: ||U^T delta||_F = {err:.3e}")
        object.__setattr__(self, "delta", readonly(d))

    def norm(self) -> float:
        return float(np.linalg.norm(self.delta))

    def scaled(self, alpha: float) -> "HorizontalTangent":
        return HorizontalTangent(alpha * self.delta, self.base)


@dataclass(frozen=True, eq=False)
class PrincipalAngles:
    """Principal angles between two subspaces, sorted ascending."""

    theta: np.ndarray = field()

    def __post_init__(self):
        t = np.sort(np.asarray(self.theta, dtype=float).ravel())
        if t.size and (t[0] < -1e-12 or t[-1] > np.pi / 2 + 1e-12):
            raise ValueError(f"principal angles outside [0, pi/2]: {t}")
        object.__setattr__(self, "theta", readonly(t.reshape(-1)))

    def distance(self) -> float:
        return float(np.linalg.norm(self.theta))


def make_stiefel(m) -> StiefelPoint:
    """Orthonormalize ``m`` into a Stiefel representative of span(m).

    If ``m`` already has orthonormal columns it is used unchanged (no
    re-factorization), so chart arithmetic stays bit-stable. Otherwise a
    thin QR factorization is used.
    """
    a = as_float_matrix(m, "m")
    n, p = a.shape
    if n >= p >= 1 and np.linalg.norm(a.T @ a - np.eye(p)) <= FEASIBILITY_TOL:
        return StiefelPoint(a)
    q, r = np.linalg.qr(a)
    d = np.abs(np.diag(r))
    if d.min() < _RANK_TOL * max(d.max(), 1e-300):
        raise RankDeficient(
            f"matrix is (numerically) rank deficient: min|R_ii|={d.min():.3e}, "
            f"max|R_ii|={d.max():.3e}"
        )
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return StiefelPoint(q * signs)


def canonical_inner(x: HorizontalTangent, y: HorizontalTangent) -> float:
    """Canonical inner product of two tangent vectors via their lifts.

    Returns trace(x^T y) -- *not* 1/2 trace(x^T y); see the module
    docstring for why the plain Frobenius product is the right pairing
    for horizontal lifts.
    """
    if x.base.u.shape != y.base.u.shape or not np.array_equal(x.base.u, y.base.u):
        raise BaseMismatch("tangent vectors live at different base points")
    return float(np.tensordot(x.delta, y.delta))


def horizontal_lift(u: StiefelPoint, udot) -> HorizontalTangent:
    """Horizontal lift of the projector velocity induced by a Stiefel velocity.

    ``udot`` should be the derivative of a Stiefel curve through ``u``,
    i.e. u^T udot skew-symmetric (soft-checked). The lift is
    Delta = (udot u^T - u udot^T) u; the vertical component of ``udot``
    is annihilated.
    """
    d = as_float_matrix(udot, "udot")
    if d.shape != u.u.shape:
        raise ValueError(f"udot shape {d.shape} does not match point {u.u.shape}")
    a = u.u.T @ d
    skew_err = np.linalg.norm(a + a.T)
    if skew_err > 1e-8 * max(1.0, np.linalg.norm(d)):
        warnings.warn(
            f"u^T udot is not skew-symmetric (||A + A^T||_F = {skew_err:.3e}); "
            "udot may not be a Stiefel-curve derivative",
            stacklevel=2,
        )
    # (udot u^T - u udot^T) u = udot (u^T u) - u (udot^T u)
    delta = d @ (u.u.T @ u.u) - u.u @ (d.T @ u.u)
    # remove rounding residue in the vertical direction
    delta = delta - u.u @ (u.u.T @ delta)
    return HorizontalTangent(delta, u)


def grassmann_exp(u: StiefelPoint, delta: HorizontalTangent, t: float = 1.0) -> StiefelPoint:
    """Geodesic through [u] with velocity ``delta``, evaluated at ``t``.

    Uses the cosine-sine form gamma(t) = U R cos(t S) R^T + Q sin(t S) R^T
    from the compact SVD Q S R^T = delta. No n x n matrix and no matrix
    exponential is formed.
    """
    if not np.array_equal(delta.base.u, u.u):
        raise BaseMismatch("tangent vector is not based at u")
    q, s, rt = thin_svd(delta.delta)
    ts = t * s
    gamma = (u.u @ rt.T) * np.cos(ts) @ rt + (q * np.sin(ts)) @ rt
    return StiefelPoint(gamma)


def grassmann_log(u: StiefelPoint, v: StiefelPoint) -> HorizontalTangent:
    """Riemannian logarithm: the tangent at [u] whose geodesic reaches [v].

    Standard projection-SVD-arctan algorithm at n x p cost: with
    M = u^T v, form L = v M^{-1} - u (u^T v M^{-1}), take the thin SVD
    Q S R^T = L and return Q arctan(S) R^T. Requires all principal
    angles strictly below pi/2 (M invertible).
    """
    if u.u.shape != v.u.shape:
        raise ValueError("points live on different Grassmannians")
    m = u.u.T @ v.u
    s = np.linalg.svd(m, compute_uv=False)
    if s[-1] <= 0 or s[0] / s[-1] > _COND_LIMIT:
        raise CutLocus(
            f"u^T v is numerically singular (cond ~ {s[0] / max(s[-1], 1e-300):.3e}); "
            "the points are at or beyond the cut locus"
        )
    x = np.linalg.solve(m.T, v.u.T).T  # v (u^T v)^{-1}
    ell = x - u.u @ (u.u.T @ x)  # (I - u u^T) v (u^T v)^{-1}
    q, sig, rt = thin_svd(ell)
    delta = (q * np.arctan(sig)) @ rt
    delta = delta - u.u @ (u.u.T @ delta)
    return HorizontalTangent(delta, u)


def principal_angles(u: StiefelPoint, v: StiefelPoint) -> PrincipalAngles:
    """Principal angles between [u] and [v].

    theta_k = arccos(sigma_k(u^T v)); angles below 1e-4 are recomputed
    from arcsin of the singular values of (I - u u^T) v, because arccos
    loses half the significant digits near zero.
    """
    if u.u.shape != v.u.shape:
        raise ValueError("points live on different Grassmannians")
    s_cos = np.linalg.svd(u.u.T @ v.u, compute_uv=False)
    theta = np.arccos(np.clip(s_cos, 0.0, 1.0))
    theta = np.sort(theta)
    if theta.size and theta[0] < _SMALL_ANGLE:
        residual = v.u - u.u @ (u.u.T @ v.u)
        s_sin = np.linalg.svd(residual, compute_uv=False)
        theta_sin = np.sort(np.arcsin(np.clip(s_sin[: theta.size], 0.0, 1.0)))
        small = theta < _SMALL_ANGLE
        theta[small] = theta_sin[small]
    return PrincipalAngles(theta)


def subspace_distance(u: StiefelPoint, v: StiefelPoint) -> float:
    """Riemannian subspace distance ||Theta||_2; always <= sqrt(p) pi/2."""
    return principal_angles(u, v).distance()


def geodesic_accel_norm(delta: HorizontalTangent) -> float:
    """Euclidean curvature of the projector geodesic driven by ``delta``.

    For a unit-speed lift this is 2 ||Delta^T Delta||_F and never
    exceeds 2. The caller is responsible for normalizing to unit speed.
    """
    g = delta.delta.T @ delta.delta
    return float(2.0 * np.linalg.norm(g))

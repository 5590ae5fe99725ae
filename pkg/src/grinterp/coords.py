"""Matrix-decomposition-free local coordinates on Gr(n, p).

The chart sends a subspace with permuted Stiefel representative
[U1; U2] (U1 the p x p pivot block) to B = U2 U1^{-1}; the inverse
parameterization sends B to the span of [I; B] (I + B^T B)^{-1/2}.
Both directions cost O(n p^2) and require no SVD or matrix exponential.
A :class:`ChartFrame` fixes the row permutation (and hence the chart)
for a whole dataset.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from ._validation import as_float_matrix, readonly
from .core import StiefelPoint
from .exceptions import IllConditionedBlock

_COND_LIMIT = 1e12


@dataclass(frozen=True, eq=False)
class ChartFrame:
    """A row permutation of {0..n-1} plus the block-split index p.

    ``perm`` is stored so that ``m[perm]`` moves the pivot rows to the
    top. ``mv_delta`` is set by the maxvol module when the frame comes
    out of volume maximization; it enables the coordinate-size warning
    in :class:`LocalCoordMatrix`.
    """

    perm: np.ndarray
    p: int
    mv_delta: Optional[float] = None

    def __post_init__(self):
        perm = np.asarray(self.perm, dtype=int).ravel()
        n = perm.size
        if not np.array_equal(np.sort(perm), np.arange(n)):
            raise ValueError("perm is not a permutation of 0..n-1")
        if not (1 <= self.p <= n):
            raise ValueError(f"block size p={self.p} out of range for n={n}")
        inv = np.empty(n, dtype=int)
        inv[perm] = np.arange(n)
        object.__setattr__(self, "perm", _readonly_int(perm))
        object.__setattr__(self, "_inv", _readonly_int(inv))

    @property
    def n(self) -> int:
        return self.perm.size

    @classmethod
    def identity(cls, n: int, p: int) -> "ChartFrame":
        return cls(np.arange(n), p)

    def is_identity(self) -> bool:
        return bool(np.array_equal(self.perm, np.arange(self.n)))

    def apply(self, m: np.ndarray) -> np.ndarray:
        """Permute rows, pivot rows first."""
        return np.asarray(m)[self.perm]

    def unapply(self, m: np.ndarray) -> np.ndarray:
        """Invert :meth:`apply` (exact, index-based)."""
        return np.asarray(m)[self._inv]


def _readonly_int(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=int, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class LocalCoordMatrix:
    """An (n-p) x p coordinate matrix under a fixed :class:`ChartFrame`.

    ``velocity`` optionally carries the coordinate velocity when Hermite
    data is processed.
    """

    b: np.ndarray
    frame: ChartFrame
    velocity: Optional[np.ndarray] = None

    def __post_init__(self):
        b = as_float_matrix(self.b, "b")
        n, p = self.frame.n, self.frame.p
        if b.shape != (n - p, p):
            raise ValueError(f"b must be {(n - p, p)}, got {b.shape}")
        if self.frame.mv_delta is not None:
            bound = (1.0 + self.frame.mv_delta) * np.sqrt(p * (n - p))
            nb = np.linalg.norm(b)
            if nb > bound * (1 + 1e-9):
                warnings.warn(
                    f"||B||_F = {nb:.3e} exceeds the maxvol bound {bound:.3e}; "
                    "the frame may be stale for this data",
                    stacklevel=3,
                )
        object.__setattr__(self, "b", readonly(b))
        if self.velocity is not None:
            v = as_float_matrix(self.velocity, "velocity")
            if v.shape != b.shape:
                raise ValueError("velocity shape must match b")
            object.__setattr__(self, "velocity", readonly(v))


def _pivot_block(pu: np.ndarray, p: int) -> np.ndarray:
    u1 = pu[:p]
    s = np.linalg.svd(u1, compute_uv=False)
    if s[-1] <= 0 or s[0] / s[-1] > _COND_LIMIT:
        inv_norm = float(np.sqrt(np.sum(1.0 / np.maximum(s, 1e-150) ** 2)))
        raise IllConditionedBlock(
            f"pivot block is numerically singular (cond ~ "
            f"{s[0] / max(s[-1], 1e-300):.3e})",
            inv_norm_estimate=inv_norm,
        )
    return u1


def chart_psi(u: StiefelPoint, frame: ChartFrame) -> LocalCoordMatrix:
    """Coordinate image B = U2 U1^{-1} of [u] under ``frame``.

    Computed by a linear solve against U1^T; no matrix larger than
    n x p is formed.
    """
    pu = frame.apply(u.u)
    u1 = _pivot_block(pu, frame.p)
    b = np.linalg.solve(u1.T, pu[frame.p :].T).T
    return LocalCoordMatrix(b, frame)


def param_phi(b: LocalCoordMatrix, variant: str = "cholesky") -> StiefelPoint:
    """Stiefel representative of the subspace with coordinates ``b``.

    Default path (``cholesky``): U = perm^{-1} [I; B] L^{-T} with
    L L^T = I + B^T B. The alternate ``sqrt`` path uses the symmetric
    square root of I + B^T B instead; both span the same subspace and
    the second is kept for cross-validation.
    """
    mat = b.b
    p = b.frame.p
    g = np.eye(p) + mat.T @ mat
    stacked = np.vstack([np.eye(p), mat])
    if variant == "cholesky":
        ell = np.linalg.cholesky(g)
        u = scipy.linalg.solve_triangular(ell, stacked.T, lower=True).T
    elif variant == "sqrt":
        w, v = np.linalg.eigh(g)
        inv_root = (v / np.sqrt(w)) @ v.T
        u = stacked @ inv_root
    else:
        raise ValueError(f"unknown variant {variant!r}")
    # both paths lose digits when I + B^T B is ill conditioned; a Newton
    # sweep restores orthonormality quadratically without changing the span
    for _ in range(3):
        gram = u.T @ u
        if np.linalg.norm(gram - np.eye(p)) < 1e-13:
            break
        u = u @ (1.5 * np.eye(p) - 0.5 * gram)
    return StiefelPoint(b.frame.unapply(u))


def dpsi(u: StiefelPoint, t, frame: ChartFrame) -> np.ndarray:
    """Coordinate velocity of a Stiefel velocity ``t`` at ``u``.

    Evaluates T2 U1^{-1} - U2 U1^{-1} T1 U1^{-1} with two solves against
    U1. The result does not depend on the chosen lift: adding a vertical
    component u A (A skew) to ``t`` leaves it unchanged.
    """
    tm = as_float_matrix(t, "t")
    if tm.shape != u.u.shape:
        raise ValueError(f"t shape {tm.shape} does not match point {u.u.shape}")
    pu = frame.apply(u.u)
    pt = frame.apply(tm)
    p = frame.p
    u1 = _pivot_block(pu, p)
    x = np.linalg.solve(u1.T, pt[p:].T).T  # T2 U1^{-1}
    y = np.linalg.solve(u1.T, pt[:p].T).T  # T1 U1^{-1}
    b = np.linalg.solve(u1.T, pu[p:].T).T  # U2 U1^{-1}
    return x - b @ y


@dataclass(frozen=True, eq=False)
class FactoredTangent:
    """A projector-space tangent kept as a sum of low-rank triples.

    Each term is (A, M, C) with A of size n x p, M p x p and C p x n,
    standing for A M C. Norms are evaluated without densifying, so
    n >> p stays O(n p^2).
    """

    terms: tuple
    frame: ChartFrame

    def canonical_norm(self) -> float:
        """||X||_0 = sqrt(1/2 trace(X^T X)) via p x p Gram blocks."""
        total = 0.0
        for ai, mi, ci in self.terms:
            for aj, mj, cj in self.terms:
                gram_a = ai.T @ aj
                gram_c = cj @ ci.T
                total += float(np.trace(mi.T @ gram_a @ mj @ gram_c))
        return float(np.sqrt(max(total, 0.0) / 2.0))

    def densify(self) -> np.ndarray:
        """Materialize the n x n matrix (test/diagnostic use, small n)."""
        n = self.frame.n
        x = np.zeros((n, n))
        for a, m, c in self.terms:
            x += a @ m @ c
        return self.frame.unapply(self.frame.unapply(x).T).T


def dphi(b: LocalCoordMatrix, v) -> FactoredTangent:
    """Differential of the parameterization at ``b`` in direction ``v``.

    With S = (I + B^T B)^{-1} the three terms are

        [0; v] S [I, B^T]  -  [I; B] S (v^T B + B^T v) S [I, B^T]
                           +  [I; B] S [0, v^T],

    returned in factored low-rank form.
    """
    vm = as_float_matrix(v, "v")
    mat = b.b
    if vm.shape != mat.shape:
        raise ValueError(f"v must have shape {mat.shape}, got {vm.shape}")
    p = b.frame.p
    s = np.linalg.inv(np.eye(p) + mat.T @ mat)
    top_zero = np.vstack([np.zeros((p, p)), vm])
    stacked = np.vstack([np.eye(p), mat])
    row = np.hstack([np.eye(p), mat.T])
    mid = -s @ (vm.T @ mat + mat.T @ vm) @ s
    terms = (
        (top_zero, s, row),
        (stacked, mid, row),
        (stacked, s, top_zero.T),
    )
    return FactoredTangent(terms, b.frame)


def cond_phi_bound(b: LocalCoordMatrix) -> float:
    """Upper bound on the condition number of the parameterization at ``b``.

    Evaluated from the singular values of B (padded with zeros to length
    p when B is rank deficient); never exceeds sqrt(5/2) + 1 ~ 2.5811.
    """
    s = np.linalg.svd(b.b, compute_uv=False)
    p = b.frame.p
    if s.size < p:
        s = np.concatenate([s, np.zeros(p - s.size)])
    sigma_min = s[p - 1]
    peak = np.max(s**2 / (1.0 + s**2) ** 2)
    return float(np.sqrt(2.0) * np.sqrt(1.0 / (1.0 + sigma_min**2) ** 2 + peak) + 1.0)


def block_inv_norm_sq(u: StiefelPoint, frame: ChartFrame) -> float:
    s = np.linalg.svd(frame.apply(u.u)[: frame.p], compute_uv=False)
    if s[-1] <= 0:
        return float("inf")
    return float(np.sum(1.0 / s**2))


def psi_spread_bound(u: StiefelPoint, v: StiefelPoint, frame: ChartFrame) -> float:
    """Bound on ||psi(u) - psi(v)||_F from the pivot-block inverse norms.

    Uses the identity ||U2 U1^{-1}||_F^2 = ||U1^{-1}||_F^2 - p for each
    point; requires both pivot blocks to be invertible under ``frame``.
    """
    for point in (u, v):
        _pivot_block(frame.apply(point.u), frame.p)
    su = max(block_inv_norm_sq(u, frame) - frame.p, 0.0)
    sv = max(block_inv_norm_sq(v, frame) - frame.p, 0.0)
    return float(np.sqrt(su) + np.sqrt(sv))


def coord_distance_to_base(b: LocalCoordMatrix) -> float:
    """Subspace distance from the frame's base point to phi(b).

    Equals sqrt(sum_k arctan(sigma_k)^2) over the singular values of B,
    and is bounded by sqrt(p) arctan(||B||_2).
    """
    s = np.linalg.svd(b.b, compute_uv=False)
    return float(np.sqrt(np.sum(np.arctan(s) ** 2)))

"""Randomized sweeps checking the library's analytic guarantees.

Each sweep draws random data, evaluates an inequality or identity that
the geometry promises, and reports the worst observed margin. A
positive margin means the guarantee held with room to spare; the sweep
fails when any draw violates it beyond rounding. The CLI ``bounds``
subcommand runs all of them and prints one line each.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coords import (
    ChartFrame,
    LocalCoordMatrix,
    block_inv_norm_sq,
    chart_psi,
    cond_phi_bound,
    coord_distance_to_base,
    dphi,
    param_phi,
    psi_spread_bound,
)
from .core import (
    HorizontalTangent,
    StiefelPoint,
    geodesic_accel_norm,
    make_stiefel,
    subspace_distance,
)

# global operator bound on the parameterization differential,
# sqrt(5/2) + 1
DPHI_GLOBAL_BOUND = float(np.sqrt(2.5) + 1.0)


@dataclass(frozen=True)
class BoundCheck:
    """Result of one sweep: name, verdict, worst margin, free-form detail."""

    name: str
    passed: bool
    worst: float
    detail: str

    def summary_line(self) -> str:
        status = "pass" if self.passed else "FAIL"
        return f"{status}  {self.name}: worst margin {self.worst:.3e} ({self.detail})"


def _random_point(rng, n: int, p: int) -> StiefelPoint:
    return make_stiefel(rng.standard_normal((n, p)))


def _random_coords(rng, n: int, p: int, scale: float = 1.0) -> np.ndarray:
    return scale * rng.standard_normal((n - p, p))


def check_coord_distance(seed: int = 0, trials: int = 100, n: int = 30, p: int = 5) -> BoundCheck:
    """Closed-form coordinate distance vs the principal-angle computation.

    Checks both the match with the angle-based distance (to 1e-10) and
    the upper bound sqrt(p) arctan(||B||_2).
    """
    rng = np.random.default_rng([seed, 0])
    frame = ChartFrame.identity(n, p)
    base = param_phi(LocalCoordMatrix(np.zeros((n - p, p)), frame))
    worst_mismatch = 0.0
    worst_margin = np.inf
    ok = True
    for k in range(trials):
        b = LocalCoordMatrix(_random_coords(rng, n, p, scale=0.5 + 2.0 * rng.random()), frame)
        d_formula = coord_distance_to_base(b)
        d_angles = subspace_distance(base, param_phi(b))
        worst_mismatch = max(worst_mismatch, abs(d_formula - d_angles))
        cap = np.sqrt(p) * np.arctan(np.linalg.norm(b.b, 2))
        worst_margin = min(worst_margin, cap - d_formula)
        ok = ok and abs(d_formula - d_angles) <= 1e-10 and d_formula <= cap + 1e-12
    return BoundCheck(
        "coordinate distance formula",
        ok,
        float(worst_margin),
        f"max |formula - angles| = {worst_mismatch:.3e} over {trials} draws",
    )


def check_spread_bound(seed: int = 0, trials: int = 1000, n: int = 20, p: int = 4) -> BoundCheck:
    """Coordinate-image spread vs the pivot-block bound.

    Also verifies the underlying identity
    ||U2 U1^{-1}||_F^2 = ||U1^{-1}||_F^2 - p on every draw.
    """
    rng = np.random.default_rng([seed, 1])
    frame = ChartFrame.identity(n, p)
    worst_margin = np.inf
    worst_identity = 0.0
    ok = True
    for _ in range(trials):
        u = _random_point(rng, n, p)
        v = _random_point(rng, n, p)
        try:
            bu = chart_psi(u, frame)
            bv = chart_psi(v, frame)
            bound = psi_spread_bound(u, v, frame)
        except Exception:
            continue  # draw hit an ill-conditioned block; not a violation
        spread = float(np.linalg.norm(bu.b - bv.b))
        worst_margin = min(worst_margin, bound - spread)
        ident = abs(np.linalg.norm(bu.b) ** 2 - (block_inv_norm_sq(u, frame) - p))
        worst_identity = max(worst_identity, ident)
        ok = ok and spread <= bound * (1 + 1e-12) + 1e-12
        ok = ok and ident <= 1e-10 * max(1.0, block_inv_norm_sq(u, frame))
    return BoundCheck(
        "coordinate spread bound",
        ok,
        float(worst_margin),
        f"max identity residual {worst_identity:.3e} over {trials} pairs",
    )


def check_dphi_bound(
    seed: int = 0,
    trials: int = 1000,
    sizes: tuple = ((10, 4), (500, 10)),
) -> BoundCheck:
    """Sampled differential norms vs the pointwise and global bounds."""
    rng = np.random.default_rng([seed, 2])
    global_max = 0.0
    worst_margin = np.inf
    ok = True
    per_size = max(1, trials // len(sizes))
    for n, p in sizes:
        frame = ChartFrame.identity(n, p)
        for _ in range(per_size):
            b = LocalCoordMatrix(_random_coords(rng, n, p, scale=3.0 * rng.random()), frame)
            v = rng.standard_normal((n - p, p))
            v /= np.linalg.norm(v)
            norm = dphi(b, v).canonical_norm()
            cap = cond_phi_bound(b)
            worst_margin = min(worst_margin, cap - norm)
            global_max = max(global_max, norm)
            ok = ok and norm <= cap + 1e-10
    ok = ok and global_max <= DPHI_GLOBAL_BOUND + 1e-10
    return BoundCheck(
        "parameterization differential bound",
        ok,
        float(worst_margin),
        f"global max {global_max:.4f} <= {DPHI_GLOBAL_BOUND:.4f}",
    )


def check_curvature(seed: int = 0, trials: int = 1000, n: int = 20, p: int = 4) -> BoundCheck:
    """Geodesic curvature of unit-speed projector curves stays <= 2."""
    rng = np.random.default_rng([seed, 3])
    worst = 0.0
    ok = True
    for _ in range(trials):
        u = _random_point(rng, n, p)
        raw = rng.standard_normal((n, p))
        raw -= u.u @ (u.u.T @ raw)
        d = HorizontalTangent(raw / np.linalg.norm(raw), u)
        kappa = geodesic_accel_norm(d)
        worst = max(worst, kappa)
        ok = ok and kappa <= 2.0 + 1e-12
    return BoundCheck(
        "geodesic curvature bound",
        ok,
        float(2.0 - worst),
        f"max curvature {worst:.6f} over {trials} unit tangents",
    )


def check_perturbation_bound(
    seed: int = 0,
    trials_per_size: int = 100,
    sizes: tuple = ((500, 10), (10, 4)),
) -> BoundCheck:
    """Subspace distance under coordinate perturbations.

    For ||B - B~||_F < 1/M with M = sqrt(5/2) + 1,
    dist(phi(B), phi(B~)) <= arcsin(M ||B - B~||_F).
    """
    rng = np.random.default_rng([seed, 4])
    m_const = DPHI_GLOBAL_BOUND
    worst_margin = np.inf
    ok = True
    for n, p in sizes:
        frame = ChartFrame.identity(n, p)
        for _ in range(trials_per_size):
            b = _random_coords(rng, n, p, scale=2.0 * rng.random())
            step = rng.standard_normal((n - p, p))
            step *= (0.999 / m_const) * rng.random() / np.linalg.norm(step)
            bt = b + step
            dist = subspace_distance(
                param_phi(LocalCoordMatrix(b, frame)),
                param_phi(LocalCoordMatrix(bt, frame)),
            )
            cap = float(np.arcsin(min(m_const * np.linalg.norm(step), 1.0)))
            worst_margin = min(worst_margin, cap - dist)
            ok = ok and dist <= cap + 1e-10
    return BoundCheck(
        "coordinate perturbation bound",
        ok,
        float(worst_margin),
        f"{trials_per_size} perturbations per size {list(sizes)}",
    )


def check_sandwich(seed: int = 0, trials: int = 500, n_max: int = 30) -> BoundCheck:
    """dist >= ||P - P~||_0 >= sin(dist) on dense projector pairs.

    The projector-space norm is ||X||_0 = sqrt(1/2) ||X||_F; only pairs
    with dist < pi/2 are counted.
    """
    rng = np.random.default_rng([seed, 5])
    worst_upper = np.inf
    worst_lower = np.inf
    ok = True
    counted = 0
    while counted < trials:
        n = int(rng.integers(4, n_max + 1))
        p = int(rng.integers(1, n // 2 + 1))
        u = _random_point(rng, n, p)
        v = _random_point(rng, n, p)
        dist = subspace_distance(u, v)
        if dist >= np.pi / 2:
            continue
        counted += 1
        pu = u.u @ u.u.T
        pv = v.u @ v.u.T
        gap = float(np.linalg.norm(pu - pv) / np.sqrt(2.0))
        worst_upper = min(worst_upper, dist - gap)
        worst_lower = min(worst_lower, gap - np.sin(dist))
        ok = ok and gap <= dist + 1e-10 and np.sin(dist) <= gap + 1e-10
    return BoundCheck(
        "distance sandwich",
        ok,
        float(min(worst_upper, worst_lower)),
        f"{trials} dense pairs with n <= {n_max}",
    )


def run_all(seed: int = 0) -> list[BoundCheck]:
    return [
        check_coord_distance(seed),
        check_spread_bound(seed),
        check_dphi_bound(seed),
        check_curvature(seed),
        check_perturbation_bound(seed),
        check_sandwich(seed),
    ]

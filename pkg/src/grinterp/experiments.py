"""Data generators and pipelines for the two benchmark studies.

Experiment 1 interpolates the Q-factor projector of a random cubic
matrix curve; experiment 2 interpolates POD subspaces of a
FitzHugh-Nagumo reaction-diffusion system across an applied-voltage
parameter. Both report projector-level relative errors and
representative feasibility, and a convergence study measures the
asymptotic interpolation orders.

Randomness: every generator draws from ``numpy.random.default_rng``
seeded with ``[seed, stream]``, where ``stream`` is a fixed per-purpose
label (coefficient index, tangent draw, ...), so identical specs give
bit-identical data on one platform.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

from .coords import ChartFrame
from .core import (
    HorizontalTangent,
    StiefelPoint,
    grassmann_exp,
    grassmann_log,
    horizontal_lift,
    make_stiefel,
    thin_svd,
)
from .exceptions import CutLocus, RankDeficient, Unstable
from .interpolate import SampleSet, Scheme, interpolate, subspace_rel_error
from .maxvol import MaxvolConfig, MaxvolReport, block_inverse_norm, maxvol_rows, select_dataset_frame

_BLOWUP_LIMIT = 1e6


# ---------------------------------------------------------------------------
# experiment 1: Q-factor of a random cubic matrix curve
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QrCurveSpec:
    """Random cubic matrix curve Y(t) = Y0 + t Y1 + t^2 Y2 + t^3 Y3.

    Coefficients are entrywise uniform with the default ranges
    Y0 in [0, 1], Y1, Y2 in [0, 0.5], Y3 in [0, 0.25].
    """

    n: int = 1000
    p: int = 10
    seed: int = 42
    ranges: tuple = ((0.0, 1.0), (0.0, 0.5), (0.0, 0.5), (0.0, 0.25))


def qr_curve_coeffs(spec: QrCurveSpec) -> list[np.ndarray]:
    coeffs = []
    for k, (lo, hi) in enumerate(spec.ranges):
        rng = np.random.default_rng([spec.seed, k])
        coeffs.append(lo + (hi - lo) * rng.random((spec.n, spec.p)))
    return coeffs


def _qf(y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Thin QR with positive R diagonal (a smooth local branch)."""
    q, r = np.linalg.qr(y)
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return q * signs, signs[:, None] * r


def qr_curve_sample(spec: QrCurveSpec, t: float) -> tuple[StiefelPoint, HorizontalTangent]:
    """Point and horizontal velocity of the Q-factor curve at ``t``.

    The Q-factor derivative uses the standard QR differentiation rule:
    with A = Q^T Ydot R^{-1}, Udot = Q skewlow(A) + (I - Q Q^T) Ydot R^{-1},
    where skewlow(A) is the skew matrix whose strictly lower triangle
    matches A's.
    """
    y0, y1, y2, y3 = qr_curve_coeffs(spec)
    y = y0 + t * y1 + t**2 * y2 + t**3 * y3
    ydot = y1 + 2.0 * t * y2 + 3.0 * t**2 * y3
    q, r = _qf(y)
    d = np.abs(np.diag(r))
    if d.min() < 1e-12 * d.max():
        raise RankDeficient(f"curve matrix is rank deficient at t={t}")
    a = scipy.linalg.solve_triangular(r, (q.T @ ydot).T, lower=False, trans="T").T
    lower = np.tril(a, -1)
    skew = lower - lower.T
    w = scipy.linalg.solve_triangular(r, ydot.T, lower=False, trans="T").T
    udot = q @ skew + (w - q @ a)
    point = StiefelPoint(q)
    return point, horizontal_lift(point, udot)


# ---------------------------------------------------------------------------
# experiment 2: FitzHugh-Nagumo system and POD subspaces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FnModelSpec:
    """Discretization of the 1-D FitzHugh-Nagumo reaction-diffusion model.

    u_t = eps u_xx + f(u)/eps - v/eps + I_a,   f(u) = u (u+1) (1-u)
    v_t = b u - gamma v

    on x in [0, length], zero initial data, Neumann flux
    u_x(t, 0) = -50000 t^3 exp(-15 t) and u_x(t, length) = 0.
    Diffusion is integrated implicitly (tridiagonal solve), reaction and
    coupling explicitly, with internal step ``dt`` snapped to divide the
    snapshot spacing.
    """

    n_x: int = 256
    length: float = 1.0
    t_end: float = 8.0
    n_snapshots: int = 1001
    eps: float = 0.015
    b: float = 0.3
    gamma: float = 0.5
    i_a_samples: tuple = (0.03, 0.04, 0.05, 0.06, 0.07, 0.08)
    pod_rank: int = 8
    dt: float = 1e-3
    boundary_forcing: bool = True
    freeze_i_a: Optional[float] = None


def _boundary_flux(t: float) -> float:
    return -50000.0 * t**3 * math.exp(-15.0 * t)


def fn_solve(spec: FnModelSpec, i_a: float) -> tuple[np.ndarray, np.ndarray]:
    """Snapshot matrices (u-part, v-part), each n_x x n_snapshots."""
    if spec.freeze_i_a is not None:
        i_a = spec.freeze_i_a
    n = spec.n_x
    dx = spec.length / (n - 1)
    snap_times = np.linspace(0.0, spec.t_end, spec.n_snapshots)
    interval = snap_times[1] - snap_times[0]
    substeps = max(1, math.ceil(interval / spec.dt))
    dt = interval / substeps

    # (I - dt eps D2) in banded storage; Neumann rows via ghost nodes
    coef = dt * spec.eps / dx**2
    ab = np.zeros((3, n))
    ab[1, :] = 1.0 + 2.0 * coef
    ab[0, 1:] = -coef
    ab[2, :-1] = -coef
    ab[0, 1] = -2.0 * coef  # reflection at the left boundary
    ab[2, -2] = -2.0 * coef  # reflection at the right boundary

    u = np.zeros(n)
    v = np.zeros(n)
    u_snaps = np.zeros((n, spec.n_snapshots))
    v_snaps = np.zeros((n, spec.n_snapshots))
    t = 0.0
    for k, t_snap in enumerate(snap_times):
        if k > 0:
            for _ in range(substeps):
                t_next = t + dt
                rhs = u + dt * (
                    (u * (u + 1.0) * (1.0 - u)) / spec.eps - v / spec.eps + i_a
                )
                if spec.boundary_forcing:
                    # flux beta(t) enters the left ghost node: eps * (-2 beta / dx)
                    rhs[0] += dt * spec.eps * (-2.0 * _boundary_flux(t_next) / dx)
                v = v + dt * (spec.b * u - spec.gamma * v)
                if not np.all(np.abs(rhs) <= _BLOWUP_LIMIT):
                    raise Unstable(f"state blew up near t={t:.4f}", time=t_next)
                u = scipy.linalg.solve_banded((1, 1), ab, rhs)
                t = t_next
            if max(np.max(np.abs(u)), np.max(np.abs(v))) > _BLOWUP_LIMIT:
                raise Unstable(f"state blew up near t={t:.4f}", time=t)
        u_snaps[:, k] = u
        v_snaps[:, k] = v
    return u_snaps, v_snaps


@lru_cache(maxsize=128)
def _fn_solve_cached(spec: FnModelSpec, i_a: float) -> tuple[np.ndarray, np.ndarray]:
    return fn_solve(spec, i_a)


def pod_basis(snapshots: np.ndarray, p: int) -> StiefelPoint:
    """Dominant p left singular vectors of a snapshot matrix."""
    snapshots = np.asarray(snapshots, dtype=float)
    if snapshots.shape[1] < p:
        raise ValueError(f"need at least p={p} snapshot columns")
    u, s, _ = thin_svd(snapshots)
    if s[p - 1] < 1e-14 * s[0]:
        raise RankDeficient(
            f"snapshot matrix has numerical rank below p={p} "
            f"(sigma_p/sigma_1 = {s[p - 1] / s[0]:.3e})"
        )
    return StiefelPoint(u[:, :p])


def fn_pod(spec: FnModelSpec, i_a: float) -> StiefelPoint:
    """POD basis of the u-part trajectory at the given applied voltage."""
    u_snaps, _ = _fn_solve_cached(spec, float(i_a))
    return pod_basis(u_snaps, spec.pod_rank)


def pod_basis_derivative(
    spec: FnModelSpec, i_a: float, h: float = 1e-3, p: Optional[int] = None
) -> tuple[StiefelPoint, HorizontalTangent]:
    """POD basis and its parameter derivative at ``i_a``.

    The derivative is computed at subspace level: with POD bases at
    i_a - h, i_a, i_a + h, the tangent is the central difference
    [Log_U(U+) - Log_U(U-)] / (2h). This is free of basis-alignment
    ambiguity and O(h^2) accurate.
    """
    if p is None:
        p = spec.pod_rank
    u_snaps, _ = _fn_solve_cached(spec, float(i_a))
    center = pod_basis(u_snaps, p)
    plus = pod_basis(_fn_solve_cached(spec, float(i_a + h))[0], p)
    minus = pod_basis(_fn_solve_cached(spec, float(i_a - h))[0], p)
    try:
        d_plus = grassmann_log(center, plus).delta
        d_minus = grassmann_log(center, minus).delta
    except CutLocus as exc:
        raise CutLocus(
            f"POD subspaces at i_a = {i_a} +/- {h} are too far apart for the "
            "logarithm; retry with a smaller h"
        ) from exc
    return center, HorizontalTangent((d_plus - d_minus) / (2.0 * h), center)


# ---------------------------------------------------------------------------
# error records and pipelines
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ErrorRecord:
    t_star: float
    scheme: str
    rel_error: float
    feasibility: float

    def __post_init__(self):
        if self.rel_error < 0 or self.feasibility < 0:
            raise ValueError("errors must be nonnegative")

    def csv_row(self) -> list:
        return [self.t_star, self.scheme, self.rel_error, self.feasibility]

    @staticmethod
    def csv_header() -> list[str]:
        return ["t_star", "scheme", "rel_error", "feasibility"]


def _frame_report(
    u: StiefelPoint, frame: ChartFrame, own_report: MaxvolReport
) -> MaxvolReport:
    """Before/after norms of ``u`` under a dataset-level frame."""
    n, p = u.u.shape
    return MaxvolReport(
        frame=frame,
        iters=own_report.iters,
        final_max_entry=own_report.final_max_entry,
        inv_norm_before=block_inverse_norm(u, ChartFrame.identity(n, p)),
        inv_norm_after=block_inverse_norm(u, frame),
        converged=own_report.converged,
    )


def _evaluate_schemes(
    samples: SampleSet,
    schemes: Sequence[tuple[Scheme, Optional[ChartFrame], str]],
    grid: np.ndarray,
    reference,
    threads: int = 1,
) -> list[ErrorRecord]:
    """Evaluate (scheme, frame, label) triples over a parameter grid.

    ``reference`` maps a grid value to the true StiefelPoint. Grid
    points are independent; the output is sorted by (t_star, label)
    regardless of evaluation order.
    """

    def one(t_star: float) -> list[ErrorRecord]:
        truth = reference(t_star)
        recs = []
        for scheme, frame, label in schemes:
            result = interpolate(samples, scheme, t_star, frame=frame)
            recs.append(
                ErrorRecord(
                    t_star=float(t_star),
                    scheme=label,
                    rel_error=subspace_rel_error(truth, result),
                    feasibility=result.feasibility(),
                )
            )
        return recs

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(one, grid))
    else:
        chunks = [one(t) for t in grid]
    records = [r for chunk in chunks for r in chunk]
    records.sort(key=lambda r: (r.t_star, r.scheme))
    return records


def run_experiment1(
    spec: QrCurveSpec,
    grid: Optional[np.ndarray] = None,
    frame_cfg: MaxvolConfig = MaxvolConfig(),
    threads: int = 1,
) -> tuple[list[ErrorRecord], list[MaxvolReport]]:
    """All six schemes on the Q-factor curve, sampled at t = 0 and 1."""
    if grid is None:
        grid = np.linspace(0.0, 1.0, 101)
    grid = np.asarray(grid, dtype=float)
    if grid.min() < 0.0 or grid.max() > 1.0:
        raise ValueError("grid must lie in [0, 1]")

    data = [qr_curve_sample(spec, t) for t in (0.0, 1.0)]
    points = tuple(d[0] for d in data)
    velocities = tuple(d[1] for d in data)
    samples = SampleSet(np.array([0.0, 1.0]), points, velocities)

    own_reports = [maxvol_rows(f, frame_cfg) for f in points]
    mv_frame = select_dataset_frame(list(points), frame_cfg)
    reports = [
        _frame_report(f, mv_frame, rep) for f, rep in zip(points, own_reports)
    ]
    identity = ChartFrame.identity(samples.n, samples.p)

    schemes = [
        (Scheme.LOCAL_LAGRANGE, identity, Scheme.LOCAL_LAGRANGE.value),
        (Scheme.LOCAL_HERMITE, identity, Scheme.LOCAL_HERMITE.value),
        (Scheme.MV_LAGRANGE, mv_frame, Scheme.MV_LAGRANGE.value),
        (Scheme.MV_HERMITE, mv_frame, Scheme.MV_HERMITE.value),
        (Scheme.NORMAL_LAGRANGE, None, Scheme.NORMAL_LAGRANGE.value),
        (Scheme.NORMAL_HERMITE, None, Scheme.NORMAL_HERMITE.value),
    ]
    records = _evaluate_schemes(
        samples, schemes, grid, lambda t: qr_curve_sample(spec, t)[0], threads
    )
    return records, reports


@dataclass(frozen=True, eq=False)
class Experiment2Result:
    records: tuple
    reports: tuple  # (sample_index, MaxvolReport) pairs, per interval endpoint


def run_experiment2(
    spec: FnModelSpec,
    grid_per_interval: int = 5,
    frame_cfg: MaxvolConfig = MaxvolConfig(),
    h_deriv: float = 1e-3,
    truncated_iters: int = 3,
    threads: int = 1,
) -> Experiment2Result:
    """Interpolate FN POD subspaces on each consecutive voltage pair.

    Four schemes (MV Lagrange/Hermite, normal Lagrange/Hermite) run per
    interval against reference POD bases from direct solves at the grid
    voltages. A truncated row-selection variant (``truncated_iters``
    swaps, labels suffixed "Truncated") reproduces what happens when the
    volume maximization is cut short.
    """
    ia = list(spec.i_a_samples)
    if len(ia) < 2:
        raise ValueError("need at least two voltage samples")

    sample_data = [pod_basis_derivative(spec, a, h=h_deriv) for a in ia]
    points = [d[0] for d in sample_data]
    velocities = [d[1] for d in sample_data]

    truncated_cfg = replace(frame_cfg, max_iters=truncated_iters)
    all_records: list[ErrorRecord] = []
    reports = []
    for i in range(len(ia) - 1):
        pair = SampleSet(
            np.array(ia[i : i + 2]),
            tuple(points[i : i + 2]),
            tuple(velocities[i : i + 2]),
        )
        pair_points = list(pair.points)
        own = [maxvol_rows(f, frame_cfg) for f in pair_points]
        mv_frame = select_dataset_frame(pair_points, frame_cfg)
        trunc_frame = select_dataset_frame(pair_points, truncated_cfg)
        for side, (f, rep) in enumerate(zip(pair_points, own)):
            reports.append((i + side, _frame_report(f, mv_frame, rep)))

        grid = np.linspace(ia[i], ia[i + 1], grid_per_interval)
        schemes = [
            (Scheme.MV_LAGRANGE, mv_frame, Scheme.MV_LAGRANGE.value),
            (Scheme.MV_HERMITE, mv_frame, Scheme.MV_HERMITE.value),
            (Scheme.NORMAL_LAGRANGE, None, Scheme.NORMAL_LAGRANGE.value),
            (Scheme.NORMAL_HERMITE, None, Scheme.NORMAL_HERMITE.value),
            (Scheme.MV_LAGRANGE, trunc_frame, Scheme.MV_LAGRANGE.value + "Truncated"),
            (Scheme.MV_HERMITE, trunc_frame, Scheme.MV_HERMITE.value + "Truncated"),
        ]
        all_records.extend(
            _evaluate_schemes(
                pair, schemes, grid, lambda a: fn_pod(spec, a), threads
            )
        )
    return Experiment2Result(records=tuple(all_records), reports=tuple(reports))


# ---------------------------------------------------------------------------
# convergence study
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SlopeRow:
    scheme: str
    slope: float
    intercept: float
    errors: tuple
    flagged: bool = False  # errors at rounding level; slope not meaningful

    def csv_row(self) -> list:
        return [self.scheme, self.slope, self.intercept]

    @staticmethod
    def csv_header() -> list[str]:
        return ["scheme", "slope", "intercept"]


def _geodesic_curve(n: int, p: int, seed: int):
    rng = np.random.default_rng([seed, 10])
    base = make_stiefel(rng.standard_normal((n, p)))
    raw = rng.standard_normal((n, p))
    raw -= base.u @ (base.u.T @ raw)
    delta = HorizontalTangent(raw / np.linalg.norm(raw), base)
    q, s, rt = thin_svd(delta.delta)

    def sample(t: float) -> tuple[StiefelPoint, HorizontalTangent]:
        point = grassmann_exp(base, delta, t)
        gdot = -(base.u @ rt.T) * (s * np.sin(t * s)) @ rt + (
            q * (s * np.cos(t * s))
        ) @ rt
        return point, HorizontalTangent(gdot, point)

    return sample


def run_convergence_study(
    spec: QrCurveSpec,
    h_list: Sequence[float] = (0.4, 0.2, 0.1, 0.05),
    schemes: Optional[Sequence[Scheme]] = None,
    curve: str = "qr",
    frame_cfg: MaxvolConfig = MaxvolConfig(),
) -> list[SlopeRow]:
    """Midpoint-error decay rates for samples at {0, h}, h -> 0.

    Lagrange-type schemes should show slope ~2, Hermite-type ~4. On
    exact geodesic data the normal-coordinate Lagrange scheme reproduces
    the curve to rounding; its slope row is flagged instead of fitted.
    """
    h_arr = np.asarray(h_list, dtype=float)
    if h_arr.size < 2 or not np.all(np.diff(h_arr) < 0):
        raise ValueError("h list must be strictly decreasing with >= 2 values")
    if schemes is None:
        schemes = list(Scheme)
    if curve == "qr":
        sampler = lambda t: qr_curve_sample(spec, t)  # noqa: E731
    elif curve == "geodesic":
        sampler = _geodesic_curve(spec.n, spec.p, spec.seed)
    else:
        raise ValueError(f"unknown curve {curve!r}")

    errors = {Scheme(s): [] for s in schemes}
    for h in h_arr:
        data = [sampler(t) for t in (0.0, h)]
        samples = SampleSet(
            np.array([0.0, h]),
            tuple(d[0] for d in data),
            tuple(d[1] for d in data),
        )
        truth = sampler(h / 2.0)[0]
        mv_frame = None
        for scheme in errors:
            if scheme.is_mv and mv_frame is None:
                mv_frame = select_dataset_frame(list(samples.points), frame_cfg)
            result = interpolate(
                samples, scheme, h / 2.0, frame=mv_frame if scheme.is_mv else None
            )
            errors[scheme].append(
                max(subspace_rel_error(truth, result), 1e-300)
            )

    rows = []
    for scheme, errs in errors.items():
        errs = np.asarray(errs)
        if np.max(errs) < 1e-11:
            rows.append(
                SlopeRow(scheme.value, float("nan"), float("nan"), tuple(errs), True)
            )
            continue
        slope, intercept = np.polyfit(np.log(h_arr), np.log(errs), 1)
        rows.append(SlopeRow(scheme.value, float(slope), float(intercept), tuple(errs)))
    return rows

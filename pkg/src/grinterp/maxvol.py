"""Quasi-maximum-volume row selection and dataset-level frame choice.

The row-swapping iteration drives every entry of C = U U1^{-1} below
1 + delta in magnitude, which certifies that the chosen p x p block U1
has quasi-maximal |det| among all row subsets and bounds the inverse,
||U1^{-1}||_F <= sqrt((1+delta)^2 p(n-p) + p).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .coords import ChartFrame
from .core import StiefelPoint
from .exceptions import NoUsableFrame

_COND_LIMIT = 1e12
_REFACTOR_EVERY = 20


@dataclass(frozen=True)
class MaxvolConfig:
    """Termination settings: stop when max |C_ij| <= 1 + delta."""

    delta: float = 0.01
    max_iters: int = 100

    def __post_init__(self):
        if self.delta < 0:
            raise ValueError("delta must be >= 0")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


@dataclass(frozen=True, eq=False)
class MaxvolReport:
    """Outcome of one row-selection run.

    ``converged`` is False when the iteration was cut off by max_iters
    (a deliberately truncated run, not an error).
    """

    frame: ChartFrame
    iters: int
    final_max_entry: float
    inv_norm_before: float
    inv_norm_after: float
    converged: bool = True

    def __post_init__(self):
        if self.inv_norm_after > self.inv_norm_before + 1e-9:
            warnings.warn(
                f"row selection worsened the pivot block: "
                f"{self.inv_norm_before:.3e} -> {self.inv_norm_after:.3e}",
                stacklevel=3,
            )

    def csv_row(self, sample_index: int) -> list:
        return [
            sample_index,
            self.iters,
            self.final_max_entry,
            self.inv_norm_before,
            self.inv_norm_after,
        ]

    @staticmethod
    def csv_header() -> list[str]:
        return [
            "sample_index",
            "iters",
            "final_max_entry",
            "inv_norm_before",
            "inv_norm_after",
        ]


def block_inverse_norm(u: StiefelPoint, frame: ChartFrame) -> float:
    """||U1^{-1}||_F under ``frame``; +inf sentinel for a singular block."""
    s = np.linalg.svd(frame.apply(u.u)[: frame.p], compute_uv=False)
    if s[-1] <= 0:
        warnings.warn("pivot block is exactly singular", stacklevel=2)
        return float("inf")
    return float(np.sqrt(np.sum(1.0 / s**2)))


def _gepp_pivot_rows(a: np.ndarray) -> np.ndarray:
    """Pivot rows of Gaussian elimination with partial pivoting on ``a``."""
    work = np.array(a, dtype=float)
    n, p = work.shape
    rows = np.arange(n)
    for k in range(p):
        j = k + int(np.argmax(np.abs(work[k:, k])))
        if j != k:
            work[[k, j]] = work[[j, k]]
            rows[[k, j]] = rows[[j, k]]
        piv = work[k, k]
        if piv != 0.0:
            work[k + 1 :] -= np.outer(work[k + 1 :, k] / piv, work[k])
    return rows[:p]


def _frame_from_pivots(pivots: np.ndarray, n: int, p: int, delta: float) -> ChartFrame:
    rest = np.setdiff1d(np.arange(n), pivots, assume_unique=False)
    return ChartFrame(np.concatenate([pivots, rest]), p, mv_delta=delta)


def maxvol_rows(u: StiefelPoint, cfg: MaxvolConfig = MaxvolConfig()) -> MaxvolReport:
    """Select p quasi-maximum-volume rows of ``u``.

    Initializes the pivot set from row-pivoted Gaussian elimination,
    then repeatedly swaps the row with the largest entry of
    C = U U1^{-1} into the pivot block. C is maintained by rank-1
    updates and refactorized every few swaps to contain drift.
    """
    a = u.u
    n, p = a.shape
    pivots = _gepp_pivot_rows(a)

    inv_norm_before = block_inverse_norm(u, ChartFrame.identity(n, p))

    c = np.linalg.solve(a[pivots].T, a.T).T
    iters = 0
    converged = False
    since_refactor = 0
    while iters < cfg.max_iters:
        flat = int(np.argmax(np.abs(c)))
        i, j = divmod(flat, p)
        val = abs(c[i, j])
        if val <= 1.0 + cfg.delta:
            converged = True
            break
        # swap row i into pivot slot j; rank-1 update of C
        ej = np.zeros(p)
        ej[j] = 1.0
        c = c - np.outer(c[:, j], (c[i] - ej) / c[i, j])
        pivots[j] = i
        iters += 1
        since_refactor += 1
        if since_refactor >= _REFACTOR_EVERY:
            c = np.linalg.solve(a[pivots].T, a.T).T
            since_refactor = 0
    if since_refactor:
        c = np.linalg.solve(a[pivots].T, a.T).T
    final_max_entry = float(np.max(np.abs(c)))
    # re-verify after the final refactorization; update drift could hide
    # an entry above tolerance
    converged = converged and final_max_entry <= 1.0 + cfg.delta + 1e-10

    frame = _frame_from_pivots(pivots, n, p, cfg.delta)
    s = np.linalg.svd(a[pivots], compute_uv=False)
    inv_norm_after = float(np.sqrt(np.sum(1.0 / np.maximum(s, 1e-150) ** 2)))
    return MaxvolReport(
        frame=frame,
        iters=iters,
        final_max_entry=final_max_entry,
        inv_norm_before=inv_norm_before,
        inv_norm_after=inv_norm_after,
        converged=converged,
    )


def select_dataset_frame(
    samples: list[StiefelPoint], cfg: MaxvolConfig = MaxvolConfig()
) -> ChartFrame:
    """Choose one permutation that conditions every sample's pivot block.

    Runs :func:`maxvol_rows` on each sample to obtain candidate frames,
    scores each candidate by the *maximum* inverse-block norm over all
    samples, and returns the minimizer (ties broken by lowest candidate
    index, so the result is deterministic under parallel evaluation).
    """
    if not samples:
        raise ValueError("need at least one sample")
    shapes = {s.u.shape for s in samples}
    if len(shapes) != 1:
        raise ValueError(f"samples have inconsistent shapes: {shapes}")

    candidates = [maxvol_rows(s, cfg).frame for s in samples]
    worst = []
    usable = []
    for frame in candidates:
        norms = []
        ok = True
        for s in samples:
            sv = np.linalg.svd(frame.apply(s.u)[: frame.p], compute_uv=False)
            if sv[-1] <= 0 or sv[0] / sv[-1] > _COND_LIMIT:
                ok = False
            norms.append(
                float(np.sqrt(np.sum(1.0 / np.maximum(sv, 1e-150) ** 2)))
            )
        worst.append(max(norms))
        usable.append(ok)
    if not any(usable):
        raise NoUsableFrame(
            "every candidate permutation leaves some sample block "
            f"numerically singular; worst norms per candidate: {worst}",
            worst_norms=worst,
        )
    best = min(
        (w, i) for i, (w, ok) in enumerate(zip(worst, usable)) if ok
    )[1]
    return candidates[best]

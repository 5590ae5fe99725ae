"""Scikit-learn-style estimator wrapping the interpolation pipeline.

``GrassmannInterpolator`` follows the fit/predict protocol so subspace
interpolation composes with the wider ecosystem (parameter grids,
cloning, pipelines that pass parameter values through).
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from ._validation import check_increasing
from .coords import ChartFrame
from .core import HorizontalTangent, StiefelPoint, horizontal_lift, make_stiefel
from .interpolate import SampleSet, Scheme, interpolate, resolve_frame
from .maxvol import MaxvolConfig


class GrassmannInterpolator(BaseEstimator):
    """Interpolates a subspace-valued function t -> [U(t)].

    Parameters
    ----------
    scheme : str
        One of "LocalLagrange", "LocalHermite", "MVLagrange",
        "MVHermite", "NormalLagrange", "NormalHermite".
    maxvol_delta, maxvol_max_iters :
        Termination settings of the row selection used by the MV
        schemes.
    transport_step :
        Finite-difference step for velocity transport in
        normal-coordinate Hermite interpolation (scaled by 1/||v||).

    After ``fit``, ``frame_`` holds the chart permutation in force (None
    for the normal-coordinate schemes) and ``samples_`` the validated
    sample set.
    """

    def __init__(
        self,
        scheme: str = "MVHermite",
        maxvol_delta: float = 0.01,
        maxvol_max_iters: int = 100,
        transport_step: float = 1e-4,
    ):
        self.scheme = scheme
        self.maxvol_delta = maxvol_delta
        self.maxvol_max_iters = maxvol_max_iters
        self.transport_step = transport_step

    def fit(self, t, points, velocities=None):
        """Store and validate samples; select the chart frame if needed.

        ``points`` may be StiefelPoint instances or a sequence of n x p
        arrays (orthonormalized via thin QR when necessary);
        ``velocities`` likewise HorizontalTangent instances or raw n x p
        Stiefel velocities, which are horizontally lifted.
        """
        nodes = check_increasing(t)
        pts = [
            f if isinstance(f, StiefelPoint) else make_stiefel(f) for f in points
        ]
        vels = None
        if velocities is not None:
            vels = [
                v
                if isinstance(v, HorizontalTangent)
                else horizontal_lift(pts[i], v)
                for i, v in enumerate(velocities)
            ]
        scheme = Scheme(self.scheme)
        self.samples_ = SampleSet(nodes, tuple(pts), vels and tuple(vels))
        cfg = MaxvolConfig(self.maxvol_delta, self.maxvol_max_iters)
        self.frame_ = resolve_frame(self.samples_, scheme, maxvol_cfg=cfg)
        return self

    def predict(self, t) -> np.ndarray:
        """Interpolated Stiefel representatives, stacked (len(t), n, p)."""
        if not hasattr(self, "samples_"):
            raise RuntimeError("fit must be called before predict")
        scheme = Scheme(self.scheme)
        ts = np.atleast_1d(np.asarray(t, dtype=float))
        cfg = MaxvolConfig(self.maxvol_delta, self.maxvol_max_iters)
        out = [
            interpolate(
                self.samples_,
                scheme,
                float(ti),
                frame=self.frame_,
                maxvol_cfg=cfg,
                transport_step=self.transport_step,
            ).u
            for ti in ts
        ]
        return np.stack(out)

    def predict_point(self, t: float) -> StiefelPoint:
        """Single-point variant of :meth:`predict` returning the rich type."""
        return StiefelPoint(self.predict([t])[0])

    def set_frame(self, frame: ChartFrame) -> "GrassmannInterpolator":
        """Override the fitted chart frame (chart schemes only)."""
        if not hasattr(self, "samples_"):
            raise RuntimeError("fit must be called before set_frame")
        self.frame_ = frame
        return self

"""Small input-validation helpers shared across the package."""

from __future__ import annotations

import numpy as np

from .exceptions import DuplicateNode


def as_float_matrix(m, name: str = "matrix") -> np.ndarray:
    """Coerce to a 2-D float64 array with finite entries."""
    a = np.asarray(m, dtype=float)
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite entries")
    return a


def check_shape(a: np.ndarray, shape: tuple[int, int], name: str) -> None:
    if a.shape != shape:
        raise ValueError(f"{name} must have shape {shape}, got {a.shape}")


def check_nodes(nodes) -> np.ndarray:
    """Validate interpolation nodes: 1-D, finite, pairwise distinct."""
    t = np.asarray(nodes, dtype=float).ravel()
    if t.size == 0:
        raise ValueError("need at least one node")
    if not np.all(np.isfinite(t)):
        raise ValueError("nodes contain non-finite values")
    if len(set(t.tolist())) != t.size:
        raise DuplicateNode(f"nodes are not pairwise distinct: {t}")
    return t


def check_increasing(nodes) -> np.ndarray:
    t = check_nodes(nodes)
    if not np.all(np.diff(t) > 0):
        raise ValueError("nodes must be strictly increasing")
    return t


def readonly(a: np.ndarray) -> np.ndarray:
    """Return a read-only view-safe copy of ``a``."""
    out = np.array(a, dtype=float, copy=True)
    out.setflags(write=False)
    return out

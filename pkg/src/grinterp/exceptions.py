"""Exception hierarchy for grinterp.

All numerical failures derive from :class:`GrassmannError`, so callers
(notably the CLI) can distinguish them from plain argument errors.
"""


class GrassmannError(Exception):
    """Base class for numerical failures in grinterp."""


class RankDeficient(GrassmannError):
    """Input matrix does not have full column rank."""


class BaseMismatch(GrassmannError):
    """Two tangent vectors are anchored at different base points."""


class CutLocus(GrassmannError):
    """Riemannian logarithm requested outside its domain (U^T V singular)."""


class IllConditionedBlock(GrassmannError):
    """Pivot block of a chart is numerically singular.

    Carries an estimate of the Frobenius norm of the block inverse.
    """

    def __init__(self, message: str, inv_norm_estimate: float = float("inf")):
        super().__init__(message)
        self.inv_norm_estimate = inv_norm_estimate


class DuplicateNode(GrassmannError):
    """Interpolation nodes are not pairwise distinct."""


class DegenerateInterval(GrassmannError):
    """Hermite interval has zero length (t0 == t1)."""


class Unstable(GrassmannError):
    """Time integration blew up. Carries the offending time."""

    def __init__(self, message: str, time: float):
        super().__init__(message)
        self.time = time


class NoUsableFrame(GrassmannError):
    """No candidate permutation keeps every sample block invertible.

    Carries the worst inverse-block norm per candidate.
    """

    def __init__(self, message: str, worst_norms: list[float]):
        super().__init__(message)
        self.worst_norms = worst_norms

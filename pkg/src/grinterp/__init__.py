"""Interpolation of subspace-valued functions on the Grassmann manifold.

Three coordinate systems are provided: plain local coordinates built
from a pivot-block split, the same chart preceded by maximum-volume row
selection, and Riemannian normal coordinates (Exp/Log). Lagrange and
cubic Hermite interpolation run in each of them, with bound sweeps and
two reproducible benchmark experiments on top.
"""

from .bounds import BoundCheck, run_all as run_bound_checks
from .coords import (
    ChartFrame,
    FactoredTangent,
    LocalCoordMatrix,
    chart_psi,
    cond_phi_bound,
    coord_distance_to_base,
    dphi,
    dpsi,
    param_phi,
    psi_spread_bound,
)
from .core import (
    HorizontalTangent,
    PrincipalAngles,
    StiefelPoint,
    canonical_inner,
    geodesic_accel_norm,
    grassmann_exp,
    grassmann_log,
    horizontal_lift,
    make_stiefel,
    principal_angles,
    subspace_distance,
    thin_svd,
)
from .estimator import GrassmannInterpolator
from .exceptions import (
    BaseMismatch,
    CutLocus,
    DegenerateInterval,
    DuplicateNode,
    GrassmannError,
    IllConditionedBlock,
    NoUsableFrame,
    RankDeficient,
    Unstable,
)
from .experiments import (
    ErrorRecord,
    FnModelSpec,
    QrCurveSpec,
    fn_pod,
    fn_solve,
    pod_basis,
    pod_basis_derivative,
    qr_curve_sample,
    run_convergence_study,
    run_experiment1,
    run_experiment2,
)
from .interpolate import (
    SampleSet,
    Scheme,
    hermite_basis,
    hermite_cubic_eval,
    interpolate,
    lagrange_eval,
    subspace_rel_error,
    transport_velocity_fd,
)
from .matrixio import read_matrix, write_csv, write_matrix
from .maxvol import MaxvolConfig, MaxvolReport, block_inverse_norm, maxvol_rows, select_dataset_frame

__version__ = "0.1.0"

__all__ = [
    "BaseMismatch",
    "BoundCheck",
    "ChartFrame",
    "CutLocus",
    "DegenerateInterval",
    "DuplicateNode",
    "ErrorRecord",
    "FactoredTangent",
    "FnModelSpec",
    "GrassmannError",
    "GrassmannInterpolator",
    "HorizontalTangent",
    "IllConditionedBlock",
    "LocalCoordMatrix",
    "MaxvolConfig",
    "MaxvolReport",
    "NoUsableFrame",
    "PrincipalAngles",
    "QrCurveSpec",
    "RankDeficient",
    "SampleSet",
    "Scheme",
    "StiefelPoint",
    "Unstable",
    "block_inverse_norm",
    "canonical_inner",
    "chart_psi",
    "cond_phi_bound",
    "coord_distance_to_base",
    "dphi",
    "dpsi",
    "fn_pod",
    "fn_solve",
    "geodesic_accel_norm",
    "grassmann_exp",
    "grassmann_log",
    "hermite_basis",
    "hermite_cubic_eval",
    "horizontal_lift",
    "interpolate",
    "lagrange_eval",
    "make_stiefel",
    "maxvol_rows",
    "param_phi",
    "pod_basis",
    "pod_basis_derivative",
    "principal_angles",
    "psi_spread_bound",
    "qr_curve_sample",
    "read_matrix",
    "run_bound_checks",
    "run_convergence_study",
    "run_experiment1",
    "run_experiment2",
    "select_dataset_frame",
    "subspace_distance",
    "subspace_rel_error",
    "thin_svd",
    "transport_velocity_fd",
    "write_csv",
    "write_matrix",
]

"""
Matrix kernels module.

SVD, polar decomposition, PSD square root, Stiefel projections, principal angles
and orthonormal completion.
"""

from modules.matrix_kernels.angles import (
    completion_bound_gap,
    nonzero_angles,
    principal_angles,
    stiefel_distance_gap,
    trace_inequality_gap,
)
from modules.matrix_kernels.factorizations import (
    OrthonormalMatrix,
    PolarErrorGap,
    PolarFactors,
    SvdResult,
    as_matrix,
    polar,
    polar_argmax_gap,
    polar_error_gap,
    psd_sqrt,
    stiefel_defect,
    svd,
)
from modules.matrix_kernels.stiefel import (
    complete_orthonormal,
    normal_project,
    random_orthonormal,
    skew,
    sym,
    tangent_project,
)

__all__ = [
    'OrthonormalMatrix',
    'PolarFactors',
    'PolarErrorGap',
    'SvdResult',
    'as_matrix',
    'svd',
    'polar',
    'psd_sqrt',
    'polar_error_gap',
    'polar_argmax_gap',
    'stiefel_defect',
    'skew',
    'sym',
    'tangent_project',
    'normal_project',
    'random_orthonormal',
    'complete_orthonormal',
    'principal_angles',
    'nonzero_angles',
    'trace_inequality_gap',
    'stiefel_distance_gap',
    'completion_bound_gap',
]

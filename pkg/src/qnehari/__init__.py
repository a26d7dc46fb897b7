"""Quaternionic Hardy space toolkit: regular power series, Hankel operators,
Carleson measures and mean oscillation on the unit ball of the quaternions."""
from .quat import (
    DomainError,
    ImaginaryUnit,
    Quaternion,
    SlicePoint,
    UNIT_I,
    UNIT_J,
    UNIT_K,
    sample_units,
    sphere_points,
)
from .series import (
    TruncatedSeries,
    cullen_derive,
    evaluate,
    regular_conj,
    star_inv,
    star_mul,
    symmetrize,
)
from .hardy import QuadratureSpec, h2_inner, h2_norm, h2_norm_volume, hinf_estimate, kernel
from .operators import QuatMatrix, bilinear_sup, hankel_matrix, hankel_norm_estimate, mult_matrix, op_norm
from .measures import BoxSpec, MeasureSample, box_constant, embedding_constant, mu_b_sample
from .bmo import ArcFamily, arc_mean, bmo_norm, bmo_slice_norm

__version__ = "0.1.0"

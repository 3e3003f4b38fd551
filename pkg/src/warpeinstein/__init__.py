"""Numerical verification of Einstein sequential warped-product metrics."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    DimensionError,
    DomainError,
    NotNormalizableError,
    NumericError,
    ParameterError,
    SingularityError,
    SpecError,
    WarpError,
)
from .signature import DirectionVector, Signature, eps_norm, normalize_direction, xi  # noqa: E402
from .profiles import ProfileFunction, make_profile  # noqa: E402
from .curvature import MetricField, christoffel, einstein_residual, ricci, scalar_curvature  # noqa: E402
from .warp import DomainBox, WarpSpec, build_metric, block_views, warping_function  # noqa: E402
from .conditions import (  # noqa: E402
    ResidualReport,
    ricci_M_blocks,
    theorem11_residuals,
    theorem21_residuals,
    theorem31_residuals,
)
from .family import (  # noqa: E402
    Controls,
    FamilyParams,
    FamilyState,
    Trajectory,
    first_integral_Z,
    integrate_family,
    omega_rate,
    omega_velocities,
    quadrature_RST,
    reconstruct_profiles,
    scaling_transform,
    system31_accelerations,
)
from .specfile import dump_spec, loads_spec, parse_spec  # noqa: E402

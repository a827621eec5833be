"""Numerical laboratory for the cubic-quintic NLS with an inverse-square potential.

Ground states of the stationary equation, sharp interpolation constants,
the mass-energy scattering region, and radial time evolution with
conservation, virial, and scattering diagnostics.
"""

from .dynamics import (
    EvolutionConfig,
    EvolutionTrace,
    Mode,
    VirialWeight,
    build_virial_weight,
    evolve,
    make_preset,
    scattering_diagnostics,
    step,
    virial_monitor,
)
from .errors import (
    CQNLSError,
    CertificationError,
    ConfigurationError,
    CoverageError,
    DataError,
    DomainError,
    ExistenceError,
    InstabilityError,
    NoSolutionError,
    SolverError,
    StructuralError,
    UndefinedQuotientError,
)
from .fields import RadialField, read_field, write_field
from .functionals import FunctionalReport, f_functional, j_quotient, report
from .grid import Grading, RadialGrid, build_grid, default_grid
from .ground_state import (
    GroundState,
    SharpConstant,
    SState,
    build_s_state,
    constant_from_s,
    select_omega_for_alpha,
    sharp_constant,
    shoot,
)
from .operator import (
    DiscreteOperator,
    OperatorSpec,
    apply_operator,
    build_operator,
    cached_operator,
    linear_propagate,
)
from .plane import PlaneFigure, emit_plane
from .scaling import ScalingKind, ScalingLaw, apply_scaling, transform_report
from .threshold import (
    BranchPoint,
    RegionQuery,
    ThresholdCurve,
    build_threshold_curve,
    classify,
    compute_d,
    trace_branch,
)

__version__ = "0.1.0"

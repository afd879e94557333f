"""cpwave: characteristic evolution of thin gravitational-wave strips
entering curved backgrounds.

The package integrates the reduced colliding-plane-wave equations as a
Goursat problem on a characteristic rectangle, checks the longitudinal
constraint and the jump relations across the strip, generates boundary
data for flat, Schwarzschild, and Robertson-Walker backgrounds, evaluates
the leading Ricci components as an independent curvature oracle, and
probes stationarity of the discrete action.
"""
__version__ = "0.1.0"

from cpwave.grid import (  # noqa: E402,F401
    GENERAL,
    POLARIZED,
    POLE_GUARD,
    BoundaryData,
    CharacteristicGrid,
    FieldState,
    build_grid,
    coarse_index_map,
    refine_grid,
)
from cpwave.solver import (  # noqa: E402,F401
    FP_TOL,
    MAX_FP_ITER,
    SING_THRESHOLD,
    STATUS_COMPLETED,
    STATUS_DIVERGED,
    STATUS_SINGULAR,
    W_CAP,
    FixedPointStats,
    MixedDerivatives,
    OverflowGuardError,
    SolveResult,
    discrete_residual,
    mixed_derivatives_general,
    mixed_derivatives_polarized,
    solve_goursat,
)
from cpwave._kernel import KERNEL_BACKEND  # noqa: E402,F401
from cpwave.constraints import (  # noqa: E402,F401
    ConstraintReport,
    JumpReport,
    constraint_report,
    g_transport_check,
    jump_report,
    theta_constraint_residual,
    v_constraint_G,
    v_constraint_G_line,
)
from cpwave.exact import (  # noqa: E402,F401
    JumpRelation,
    SingularDomainError,
    UDecomposition,
    decompose_U,
    solve_V_linear,
    u_jump_relation,
)
from cpwave.backgrounds import (  # noqa: E402,F401
    SCALE_FACTOR_PRESETS,
    BackgroundSpec,
    BoundaryPoint,
    invert_tortoise,
    minkowski_spherical_data,
    rw_constraint_G,
    rw_spherical_data,
    sample_boundary_line,
    schwarzschild_spherical_data,
    schwarzschild_tortoise,
)
from cpwave.ricci import (  # noqa: E402,F401
    RicciResiduals,
    metric_components,
    reduced_residual_fields,
    ricci_from_reduced,
    ricci_residuals,
)
from cpwave.variational import (  # noqa: E402,F401
    ActionReport,
    action_stationarity_check,
    default_perturbation_bank,
    discrete_action,
    lagrangian_density,
)
from cpwave.initial_line import (  # noqa: E402,F401
    FocusingError,
    InitialLine,
    PulseProfile,
    build_initial_line,
)
from cpwave.config import (  # noqa: E402,F401
    ConfigError,
    ScenarioConfig,
    build_data,
    load_config,
    parse_config,
)

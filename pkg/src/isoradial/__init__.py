"""isoradial: radial probability measures reached from the Gaussian.

Build monotone radial transport maps between the standard Gaussian and a
target radial measure, measure their Lipschitz constants, verify the
finite-dimensional sphere-projection limit analytically and by Monte
Carlo, and emit the induced Gaussian-type isoperimetric lower bounds.
"""

from .criteria import (
    CriteriaReport,
    check_b,
    check_logcvx,
    prop_lip_verdict,
    psi_from_log_derivative,
)
from .errors import (
    BoundViolationError,
    DegenerateDrawError,
    DimensionMismatchError,
    DisconnectedSupportError,
    DivergentMassError,
    DomainError,
    InvalidDensityError,
    IsoradialError,
    NonSmoothDensityError,
    OutOfRangeError,
    OverlappingIntervalsError,
    SupportBoundsError,
    UnboundedAtZeroError,
)
from .phiexp import (
    PhiFunction,
    PhiPClassification,
    classify,
    exp_phi,
    exp_q,
    identity_phi,
    ln_phi,
    phi_from_table,
    phi_p_density,
    poly_phi,
    power_phi,
    theta_delta,
)
from .poincare import (
    ConvergenceTable,
    SampleBatch,
    convergence_diagnostic,
    finite_n_density,
    ks_statistic,
    limit_density,
    sample_pushforward,
    sphere_projection_prefactor,
)
from .profile import (
    AuditReport,
    ProfileBound,
    bound_audit,
    bound_curve,
    boundary_measure_1d,
    gaussian_profile,
    neighborhood_quotients,
)
from .radial import (
    ConditionAReport,
    RadialDensity,
    RadialMeasure,
    build_measure,
    cdf_1d,
    check_condition_a,
    density_from_table,
    exp_power_density,
    gaussian_density,
    load_density_table,
    make_density,
    normalizing_mass,
    radial_cdf,
    scaled_gaussian_density,
    uniform_shell_density,
)
from .specfun import (
    DimConstants,
    gauss_cdf,
    gauss_quantile,
    gaussian_ball_mass,
    gaussian_ball_mass_inv,
    gaussian_tail_check,
    reg_inc_gamma,
    reg_inc_gamma_inv,
    reg_inc_gamma_upper,
    reg_inc_gamma_upper_inv,
    sphere_constants,
)
from .transport import (
    JacobianSpectrum,
    TransportMap,
    apply_map,
    apply_sigma_map,
    build_transport,
    jacobian_spectrum,
    lipschitz_constant,
    write_transport_csv,
)

__version__ = "0.1.0"

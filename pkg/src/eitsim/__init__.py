"""Three-level Lambda EIT simulator: Bloch dynamics, adiabatic coherences,
probe modes, steady-state susceptibility and 1-D Maxwell-Bloch propagation.
"""

__version__ = "0.1.0"

from .adiabatic import (
    CoherenceSolution,
    chi_resonant,
    explicit_coherences,
    rho_ab_quadrature,
    rho_ba_from_rho_bc,
    rho_ba_longtime,
    rho_ba_quadrature,
    rho_bc_quadrature,
    rho_cb_from_rho_ab,
)
from .bloch import (
    BlochTrajectory,
    DensityMatrix3,
    bloch_rhs,
    integrate_bloch,
    population_ratio_check,
    reduced_resonant_rhs,
)
from .errors import (
    BranchCutWarning,
    ConfigError,
    ConvergenceError,
    InsufficientDataError,
    IntegrationError,
    InvariantViolation,
    NoPhysicalModeError,
    ParameterError,
    PoleError,
    QuadratureError,
    RegimeWarning,
)
from .maxwell import (
    Grid1D,
    PropagationRecord,
    coupling_field_checker,
    gaussian_pulse,
    measure_group_velocity,
    propagate,
)
from .modes import (
    ProbeModeCoefficients,
    characteristic_roots,
    envelope_coefficients,
    group_velocity_roots,
    mode_envelope,
    select_group_velocity,
    slow_light_vg,
    solve_probe_modes,
    transport_identity_check,
)
from .params import (
    AtomParams,
    DerivedRates,
    FieldParams,
    canonical_params,
    derive_rates,
    dimensionless_params,
)
from .susceptibility import (
    SteadyCoherences,
    SusceptibilityResult,
    chi_e,
    chi_m_fixed_point,
    chi_steady,
    refractive_index_and_vg,
    rho_cb_ab_relation,
    steady_two_coherence,
    susceptibility_result,
)

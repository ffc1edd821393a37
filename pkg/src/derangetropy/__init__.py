"""Derangetropy: entropy-modulated density transforms and their diagnostics."""

from .distributions import (
    Arcsin,
    Distribution,
    Exponential,
    Normal,
    Semicircle,
    Tabulated,
    Uniform,
    from_spec,
    load_tabulated,
)
from .errors import (
    DerangetropyError,
    DomainError,
    GridMismatch,
    InvalidGrid,
    NegativeDensity,
    NoSignChange,
    NonConvergence,
    NonFiniteSample,
    NonMonotoneGrid,
    ParseError,
    SymmetryProbeFailed,
)
from .functional import (
    ENERGY_CONSTANT,
    SCALE,
    DerangetropyValue,
    EnergyBreakdown,
    bernoulli_entropy,
    derangetropy,
    derangetropy_derivative,
    derangetropy_entropy_form,
    derangetropy_gamma_form,
    derangetropy_kernel,
    derangetropy_profile,
    energy_decomposition,
    total_energy_derivative,
)
from .numerics import (
    QuadratureSpec,
    central_difference,
    cumulative_integral,
    find_root,
    integrate,
    ln_gamma,
)
from .recursion import (
    ConvergenceMetrics,
    GridFunction,
    apply_derangetropy,
    convergence_metrics,
    discretize,
    iterate,
    l2_distance,
)
from .verify import (
    APPENDIX_CONSTANT,
    Equilibrium,
    VerificationReport,
    appendix_integrand,
    find_equilibria,
    run_suite,
    verify_appendix_constant,
    verify_mode_at_median,
    verify_normalization,
    verify_ode_uniform,
)

__version__ = "0.1.0"

__all__ = [
    "APPENDIX_CONSTANT",
    "Arcsin",
    "ConvergenceMetrics",
    "DerangetropyError",
    "DerangetropyValue",
    "Distribution",
    "DomainError",
    "ENERGY_CONSTANT",
    "EnergyBreakdown",
    "Equilibrium",
    "Exponential",
    "GridFunction",
    "GridMismatch",
    "InvalidGrid",
    "NegativeDensity",
    "NoSignChange",
    "NonConvergence",
    "NonFiniteSample",
    "NonMonotoneGrid",
    "Normal",
    "ParseError",
    "QuadratureSpec",
    "SCALE",
    "Semicircle",
    "SymmetryProbeFailed",
    "Tabulated",
    "Uniform",
    "VerificationReport",
    "appendix_integrand",
    "apply_derangetropy",
    "bernoulli_entropy",
    "central_difference",
    "convergence_metrics",
    "cumulative_integral",
    "derangetropy",
    "derangetropy_derivative",
    "derangetropy_entropy_form",
    "derangetropy_gamma_form",
    "derangetropy_kernel",
    "derangetropy_profile",
    "discretize",
    "energy_decomposition",
    "find_equilibria",
    "find_root",
    "from_spec",
    "integrate",
    "iterate",
    "l2_distance",
    "ln_gamma",
    "load_tabulated",
    "run_suite",
    "total_energy_derivative",
    "verify_appendix_constant",
    "verify_mode_at_median",
    "verify_normalization",
    "verify_ode_uniform",
]

"""Langmuir birth-death processes: exact stationary laws, limit laws, simulation."""

__version__ = "0.1.0"

from .errors import (
    DegenerateBoundaryError,
    IrreducibilityError,
    NotApplicableError,
    ParameterError,
    WindowError,
)
from .model import (
    ModelId,
    ModelSpec,
    PhysicalParams,
    birth_rate,
    death_rate,
    map_physical_params,
    noise_term,
    rate_arrays,
)
from .stationary import MomentSet, Pmf, boundary_masses, delta_n, scaled_moments, stationary_pmf
from .specfun import lower_incomplete_gamma, regularized_lower_gamma
from .limits import (
    BetaLaw,
    GammaSteadyState,
    LigAtTop,
    LigParams,
    LigReflected,
    LimitLaw,
    beta_cdf,
    beta_moment,
    delta_infinity,
    gamma_steady_density,
    gamma_steady_state,
    lemma2_limit,
    lemma2_partial_sum,
    lig_cdf,
    lig_moment,
    lig_pdf_continuous_part,
    lig_pi,
    lig_quantile,
    lig_sample,
    limit_law_for,
)

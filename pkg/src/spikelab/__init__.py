"""Simulation and verification laboratory for finite-rank deformed Wigner matrices."""
__version__ = "0.1.0"

from .analytic import (  # noqa: E402
    DeformationSpec, EntryLaw, FluctuationTarget, SpikePrediction, SupportSet, E_sigma, L_sigma,
    fluctuation_target, g_sc, g_sc_derivative, predict_limits, rho, semicircle_cdf, semicircle_pdf,
    separation_plan, sigma_theta, support_set, v_theta, z_sigma,
)
from .ensemble import EnsembleConfig, MatrixSample, apply_deformation, sample_standardized_vector, sample_wigner  # noqa: E402
from .errors import (  # noqa: E402
    ConfigError, ConvergenceError, DomainError, IntervalInsideSupport, InvalidSplit,
    OutsideOutlierRegime, SingularResolvent, SpikelabError,
)
from .spectra import (  # noqa: E402
    ResolventStats, SpectralSample, eigvals, eigvals_extreme, eigvals_hermitian, eigvals_sym,
    gap_census, hermitian_embed, resolvent_trace,
)

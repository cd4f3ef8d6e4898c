"""Bivariate gamma / generalized asymmetric Laplace (BGGL) law: densities,
sampling, closed-form maximum likelihood, asymptotic laws and a
volatility-surprise finance pipeline."""

__version__ = "0.1.0"

from .dist import (
    char_fn,
    fisher_information,
    gal_marginal_log_pdf,
    gal_marginal_pdf,
    gig_conditional,
    joint_log_pdf,
    joint_pdf,
    mgf,
    moments,
    shannon_entropy,
)
from .errors import (
    BgglError,
    ConvergenceError,
    DataFormatError,
    DegenerateSampleError,
    DegenerateSampleWarning,
    DomainError,
    InfiniteInformationError,
    SampleTooSmallError,
)
from .estimate import FitResult, Regime, fit_bggl, fit_gamma, fit_location_scale
from .params import BgglParams, PairedSample
from .sample import RngStream, sample_bggl, sample_gamma, sample_levy_path, sample_stable_subordinator

__all__ = [
    "BgglError",
    "BgglParams",
    "ConvergenceError",
    "DataFormatError",
    "DegenerateSampleError",
    "DegenerateSampleWarning",
    "DomainError",
    "FitResult",
    "InfiniteInformationError",
    "PairedSample",
    "Regime",
    "RngStream",
    "SampleTooSmallError",
    "char_fn",
    "fisher_information",
    "fit_bggl",
    "fit_gamma",
    "fit_location_scale",
    "gal_marginal_log_pdf",
    "gal_marginal_pdf",
    "gig_conditional",
    "joint_log_pdf",
    "joint_pdf",
    "mgf",
    "moments",
    "sample_bggl",
    "sample_gamma",
    "sample_levy_path",
    "sample_stable_subordinator",
    "shannon_entropy",
]

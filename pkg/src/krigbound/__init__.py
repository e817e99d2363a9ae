"""Simple kriging with Gaussian and Matern kernels, and uniform-error convergence studies."""
from . import design, gpsim, kernels, kriging, linalg, study
from ._backend import NAME as BACKEND
from .design import Design, Region, fill_distance, maximin_lhd, min_separation, random_lhd
from .errors import (ConditioningError, DuplicatePointsError, InvalidInputError,
                     KrigboundError, ResourceError, SingularMatrixError)
from .gpsim import GpSample, sample_gp
from .kernels import Kernel, bessel_k, condition1_ratio, spectral_density
from .kriging import KrigingModel, Prediction, fit, interpolate, power_function_sq, predict, sup_power
from .linalg import SpdFactor, factor_spd, solve
from .study import StudyConfig, StudyResult, fit_loglog, run_study

__version__ = "0.1.0"

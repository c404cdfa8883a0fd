"""
Configuration settings for the conditioning laboratory.
Tolerances, iteration caps, oracle guards and experiment defaults.
"""

import os
import logging
from typing import Dict, Any

from ..core.exceptions import ConfigurationError

logger = logging.getLogger(__name__)


class DftConfig:
    """Discrete Fourier transform settings"""
    ROUNDTRIP_RTOL = 1e-12
    CONVOLUTION_RTOL = 1e-10
    PLAN_CACHE_SIZE = 64


class OracleConfig:
    """Dense ground-truth linear algebra guards"""
    MAX_DENSE_ENTRIES = 10 ** 8
    MAX_DENSE_SIDE = 10 ** 4
    MAX_SVD_DIM = 512
    JACOBI_TOL = 1e-14
    JACOBI_MAX_SWEEPS = 30
    SINGULAR_PIVOT = 1e-300
    MINOR_PIVOT_RTOL = 1e-14
    # Below this size experiments use dense singular values, above it estimators
    ORACLE_SVD_THRESHOLD = 256


class GsConfig:
    """Gohberg-Semencul construction settings"""
    DEGENERATE_PIVOT_RTOL = 1e-14
    PROBE_RTOL = 1e-6
    PROBE_SEED = 7919


class ConditioningConfig:
    """Norm and condition number estimation settings"""
    POWER_TOL = 1e-8
    NORM_MAX_ITER = 2000
    INV_MAX_ITER = 5000
    HAGER_MAX_SWEEPS = 5
    HAGER_CANDIDATES = 8
    BRACKET_MAX_N = 64
    NORM_REPORT_TOL = 1e-6


class EnsembleConfig:
    """Random matrix population settings"""
    GENERATOR_NAME = "numpy.random.Philox (Philox4x64-10, SeedSequence keyed)"
    TABLE_DISTRIBUTION = "uniform:-1,1"
    BOUND_DISTRIBUTION = "gaussian:0,1"


class ExperimentDefaults:
    """Batch driver defaults"""
    TRIALS = 100
    BOUND_TRIALS = 10000
    SEED = 20130501
    JOBS = 1
    FORMAT = "csv"
    SE_MULTIPLIER = 3.0
    MAX_RESAMPLES = 25
    CONTRAST_RHO = 0.9
    CONTRAST_MAX_N = 512
    TABLE_SIZES = [32, 64, 128, 256, 512, 1024]
    CIRCULANT_KAPPA_SIZES = [256, 512, 1024, 2048, 4096, 8192, 16384, 32768, 65536]
    TOEPLITZ_KAPPA_SIZES = [256, 512, 1024, 2048, 4096]
    BOUND_SIZES = [32]
    CONTRAST_SIZES = [4, 8, 12, 16, 24, 32]


class LoggingConfig:
    """Logging configuration"""
    LEVEL = "INFO"
    JSON = False
    FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    JSON_FORMAT = '%(asctime)s %(name)s %(levelname)s %(message)s'


def get_config() -> Dict[str, Any]:
    """Get complete configuration as dictionary"""
    def public(cls) -> Dict[str, Any]:
        return {k: v for k, v in vars(cls).items() if k.isupper()}

    return {
        "dft": public(DftConfig),
        "oracle": public(OracleConfig),
        "gs": public(GsConfig),
        "conditioning": public(ConditioningConfig),
        "ensemble": public(EnsembleConfig),
        "experiment": public(ExperimentDefaults),
        "logging": public(LoggingConfig),
    }


def _env_int(name: str, target: type, attribute: str):
    raw = os.getenv(name)
    if raw is None:
        return
    try:
        setattr(target, attribute, int(raw))
    except ValueError:
        logger.warning(f"Ignoring non-integer {name}={raw!r}")


# Environment-based configuration overrides
def load_env_config():
    """Load configuration from environment variables"""
    _env_int("CONDLAB_SEED", ExperimentDefaults, "SEED")
    _env_int("CONDLAB_JOBS", ExperimentDefaults, "JOBS")
    _env_int("CONDLAB_TRIALS", ExperimentDefaults, "TRIALS")

    if os.getenv("CONDLAB_LOG_LEVEL"):
        LoggingConfig.LEVEL = os.getenv("CONDLAB_LOG_LEVEL").upper()

    if os.getenv("CONDLAB_LOG_JSON"):
        LoggingConfig.JSON = os.getenv("CONDLAB_LOG_JSON").lower() in ("1", "true", "yes")


def validate_config():
    """Validate configuration settings"""
    errors = []

    for name in ("NORM_MAX_ITER", "INV_MAX_ITER", "HAGER_MAX_SWEEPS", "HAGER_CANDIDATES"):
        if getattr(ConditioningConfig, name) <= 0:
            errors.append(f"{name} must be positive")

    for cls, name in ((ConditioningConfig, "POWER_TOL"), (OracleConfig, "JACOBI_TOL"),
                      (GsConfig, "DEGENERATE_PIVOT_RTOL"), (DftConfig, "ROUNDTRIP_RTOL")):
        if not (0 < getattr(cls, name) < 1):
            errors.append(f"{name} must lie in (0, 1)")

    if OracleConfig.JACOBI_MAX_SWEEPS <= 0:
        errors.append("JACOBI_MAX_SWEEPS must be positive")

    if ExperimentDefaults.TRIALS < 1:
        errors.append("TRIALS must be at least 1")

    if ExperimentDefaults.JOBS < 1:
        errors.append("JOBS must be at least 1")

    if not (0 < ExperimentDefaults.CONTRAST_RHO < 1):
        errors.append("CONTRAST_RHO must lie in (0, 1)")

    if errors:
        raise ConfigurationError(
            f"Configuration validation failed: {'; '.join(errors)}",
            error_code="INVALID_CONFIG",
            details={"errors": errors},
        )

    return True


# Load environment overrides on import
load_env_config()

# Validate on import
try:
    validate_config()
except ConfigurationError as e:
    logger.warning(f"Configuration warning: {e}")

"""
Random Toeplitz conditioning against a deterministic ill-conditioned family.

The family is the symmetric Toeplitz matrix with t_k = rho^(k^2) (a sampled
Gaussian kernel). Its kappa_2 comes from the Jacobi oracle; the random side
reuses the table machinery at the same sizes.
"""

import logging
from typing import Dict, List

import numpy as np

from ..config.settings import ExperimentDefaults
from ..core import dense_oracle
from ..core.ensembles import Distribution, EnsembleKind, EnsembleSpec, sample
from ..core.exceptions import SingularityError, UsageError
from ..core.structured_matrices import ToeplitzSpec, to_dense
from ..data.models import ExperimentConfig, RunReport, SummaryRow
from ..utils.performance import performance_timer
from .trials import resample_count, run_trials, summarize

logger = logging.getLogger(__name__)


def gaussian_kernel_toeplitz(n: int, rho: float = ExperimentDefaults.CONTRAST_RHO) -> ToeplitzSpec:
    k = np.arange(n, dtype=float)
    return ToeplitzSpec.symmetric(rho ** (k * k))


def family_label(rho: float = ExperimentDefaults.CONTRAST_RHO) -> str:
    return f"gaussian_kernel:{rho:g}"


def kappa2_dense(spec) -> float:
    values = dense_oracle.jacobi_svd(to_dense(spec))
    return float(values[0] / values[-1]) if values[-1] > 0 else float("inf")


def _random_kappa(n: int, dist: Distribution, seed: int):
    def evaluate(index: int) -> Dict[str, float]:
        T = sample(EnsembleSpec(EnsembleKind.TOEPLITZ, n, n, dist, seed, index))
        values = dense_oracle.singular_values(to_dense(T), method="lapack")
        if values[-1] <= values[0] * np.finfo(float).eps:
            raise SingularityError(f"Random Toeplitz draw {index} is numerically singular", error_code="SINGULAR")
        return {"kappa2": float(values[0] / values[-1])}
    return evaluate


def run_contrast(cfg: ExperimentConfig, rho: float = ExperimentDefaults.CONTRAST_RHO) -> RunReport:
    """kappa_2 of the kernel family and of random Toeplitz matrices per size"""
    too_large = [n for n in cfg.sizes if n > ExperimentDefaults.CONTRAST_MAX_N]
    if too_large:
        raise UsageError(f"contrast sizes are limited to n <= {ExperimentDefaults.CONTRAST_MAX_N}, got {too_large}",
                         error_code="TOO_LARGE")

    dist = Distribution.parse(cfg.distribution)
    report = RunReport()
    family_rows: List[SummaryRow] = []

    for n in cfg.sizes:
        with performance_timer(f"contrast n={n}"):
            kappa = kappa2_dense(gaussian_kernel_toeplitz(n, rho))
            family_rows.append(SummaryRow(family_label(rho), n, "kappa2", kappa, kappa, kappa, 0.0))
            outcomes = run_trials("toeplitz", n, cfg.trials, _random_kappa(n, dist, cfg.seed), jobs=cfg.jobs)

        report.rows.extend(summarize("toeplitz", n, outcomes))
        report.resamples[f"toeplitz:{n}"] = resample_count(outcomes)
        report.trials_requested += cfg.trials
        report.trials_summarized += len(outcomes)

    report.rows = family_rows + report.rows
    return report

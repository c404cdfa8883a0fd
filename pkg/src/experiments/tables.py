"""
Norm and condition number tables over random ensembles.

Circulant quantities are exact through the DFT, Toeplitz and Hankel inverses
are applied through Gohberg-Semencul, general matrices go through LU.
"""

import logging
from typing import Dict, Optional, Tuple

import numpy as np

from ..core import dense_oracle
from ..core.conditioning import (
    Apply, estimate_spectrum, frobenius_norm, inv_norm1_estimate, inverse_operator, norms_exact,
)
from ..core.ensembles import Distribution, EnsembleKind, EnsembleSpec, make_stream, parse_ensemble, sample
from ..core.exceptions import ConvergenceError, SingularityError
from ..core.structured_matrices import FCirculantSpec, HankelSpec, ToeplitzSpec, fcirculant_inverse
from ..data.models import ExperimentConfig, RunReport
from ..utils.performance import performance_timer
from .trials import resample_count, run_trials, summarize

logger = logging.getLogger(__name__)

# Trial-local stream for power iteration start vectors
_START_VECTOR_KEY = 1


def _draw(kind: EnsembleKind, f: Optional[float], n: int, dist: Distribution, seed: int, index: int):
    spec = EnsembleSpec(kind, n, n, dist, seed, index, f)
    matrix = sample(spec)
    rng = make_stream(seed, (kind.code, n, n, index, _START_VECTOR_KEY))
    return matrix, rng


def _spectrum(matrix, rng, inverse=None):
    summary = estimate_spectrum(matrix, rng=rng, inverse=inverse)
    if not summary.all_converged:
        raise ConvergenceError(f"Spectrum estimate did not converge (iterations {summary.iterations_used})",
                               error_code="POWER_NO_CONVERGENCE")
    if summary.sigma_min == 0:
        raise SingularityError("Sampled matrix is singular", error_code="SINGULAR")
    return summary


def _gs_inverse(matrix) -> Optional[Tuple[Apply, Apply]]:
    """One Gohberg-Semencul build per Toeplitz or Hankel trial, shared by both inverse norms"""
    if isinstance(matrix, (ToeplitzSpec, HankelSpec)):
        return inverse_operator(matrix)
    return None


def inverse_norm1(matrix, inverse: Optional[Tuple[Apply, Apply]] = None) -> float:
    """||A^-1||_1: exact for circulant classes and dense matrices, estimated otherwise"""
    if isinstance(matrix, FCirculantSpec):
        return norms_exact(fcirculant_inverse(matrix))[0]
    if isinstance(matrix, np.ndarray):
        return float(np.abs(dense_oracle.dense_inverse(matrix)).sum(axis=0).max())
    apply_inverse, apply_inverse_transpose = inverse if inverse is not None else inverse_operator(matrix)
    return inv_norm1_estimate(apply_inverse, apply_inverse_transpose, matrix.shape[0])


def norm_metrics(matrix, rng) -> Dict[str, float]:
    """
    Spectral and Frobenius columns side by side. Published norm tables for
    these ensembles track ||A||_F (about n / sqrt(3) for uniform(-1, 1)
    entries), so norm1_over_frobenius is the column to compare with them.
    """
    norm1 = norms_exact(matrix)[0]
    frobenius = frobenius_norm(matrix)
    inverse = _gs_inverse(matrix)
    summary = _spectrum(matrix, rng, inverse)
    inv_norm1 = inverse_norm1(matrix, inverse)
    inv_norm2 = 1.0 / summary.sigma_min
    return {
        "norm1": norm1,
        "norm2": summary.sigma_max,
        "norm1_over_norm2": norm1 / summary.sigma_max,
        "frobenius": frobenius,
        "norm1_over_frobenius": norm1 / frobenius,
        "inv_norm1": inv_norm1,
        "inv_norm2": inv_norm2,
        "inv_norm1_over_inv_norm2": inv_norm1 / inv_norm2,
    }


def default_norm(kind: EnsembleKind) -> int:
    """kappa_1 for Toeplitz and Hankel, kappa_2 for the rest"""
    return 1 if kind in (EnsembleKind.TOEPLITZ, EnsembleKind.HANKEL) else 2


def kappa_metrics(matrix, rng, norm: int) -> Dict[str, float]:
    if norm == 1:
        return {"kappa1": norms_exact(matrix)[0] * inverse_norm1(matrix)}
    return {"kappa2": _spectrum(matrix, rng).kappa2}


def _run_table(cfg: ExperimentConfig, stage: str, metrics) -> RunReport:
    dist = Distribution.parse(cfg.distribution)
    report = RunReport(trials_requested=0, trials_summarized=0)

    for ensemble in cfg.ensembles:
        kind, f = parse_ensemble(ensemble)
        label = f"fcirculant:{f:g}" if f is not None else kind.value
        for n in cfg.sizes:
            def evaluate(index: int, kind=kind, f=f, n=n) -> Dict[str, float]:
                matrix, rng = _draw(kind, f, n, dist, cfg.seed, index)
                return metrics(kind, matrix, rng)

            with performance_timer(f"{stage} {label} n={n}"):
                outcomes = run_trials(label, n, cfg.trials, evaluate, jobs=cfg.jobs)

            report.rows.extend(summarize(label, n, outcomes))
            report.resamples[f"{label}:{n}"] = resample_count(outcomes)
            report.trials_requested += cfg.trials
            report.trials_summarized += len(outcomes)

    return report


def run_table_norms(cfg: ExperimentConfig) -> RunReport:
    """1- and 2-norms of A and A^-1 and their ratios, per ensemble and size"""
    return _run_table(cfg, "table-norms", lambda kind, matrix, rng: norm_metrics(matrix, rng))


def run_table_kappa(cfg: ExperimentConfig) -> RunReport:
    """kappa_1 or kappa_2 per ensemble and size"""
    def metrics(kind, matrix, rng):
        return kappa_metrics(matrix, rng, cfg.norm or default_norm(kind))

    return _run_table(cfg, "table-kappa", metrics)

"""
Empirical validation of cdf bounds.

For each size the observable named by the bound is sampled over the trial
batch, its empirical cdf is evaluated on the y grid and compared with the
bound. A point is violated when the bound is broken by more than
SE_MULTIPLIER binomial standard errors, vacuous when the bound says nothing
there, respected otherwise.
"""

import logging
import math
from typing import Callable, Dict, List

import numpy as np

from ..config.settings import ExperimentDefaults
from ..core import dense_oracle
from ..core.conditioning import circulant_spectrum
from ..core.ensembles import (
    Distribution, EnsembleKind, EnsembleSpec, draw, gaussian_variate, make_stream, sample,
)
from ..core.exceptions import DomainError, UsageError
from ..core.probability_bounds import BoundDirection, BoundValue, CdfBound, get_bound
from ..core.structured_matrices import to_dense
from ..data.models import BoundCheckRow, ExperimentConfig, RunReport, Verdict
from ..utils.performance import performance_timer
from .trials import resample_count, run_trials

logger = logging.getLogger(__name__)

Observables = Callable[[int], Dict[str, float]]

# Extra stream for the fixed unit vector of the inner-product check
_UNIT_VECTOR_KEY = 99


def _spec(kind: EnsembleKind, n: int, dist: Distribution, seed: int, index: int) -> EnsembleSpec:
    return EnsembleSpec(kind, n, n, dist, seed, index)


def _observables(name: str, n: int, dist: Distribution, seed: int) -> Observables:
    """Trial function returning the observable(s) the bound talks about"""
    def singular_values(kind, index):
        return dense_oracle.singular_values(to_dense(sample(_spec(kind, n, dist, seed, index))), method="lapack")

    if name == "sv_general":
        return lambda i: {"sigma_min": float(singular_values(EnsembleKind.GENERAL, i)[-1])}
    if name == "norm_general":
        return lambda i: {"norm2": float(singular_values(EnsembleKind.GENERAL, i)[0])}
    if name == "kappa_general":
        def kappa(i):
            s = singular_values(EnsembleKind.GENERAL, i)
            return {"kappa2": float(s[0] / s[-1]) if s[-1] > 0 else math.inf}
        return kappa
    if name == "toeplitz_norm":
        return lambda i: {"norm2": float(singular_values(EnsembleKind.TOEPLITZ, i)[0])}
    if name in ("circulant_norm", "circulant_inv"):
        def circulant(i):
            spectrum = circulant_spectrum(sample(_spec(EnsembleKind.CIRCULANT, n, dist, seed, i)))
            values = spectrum.singular_values
            return {"norm2": float(values[0])} if name == "circulant_norm" else {"sigma_min": float(values[-1])}
        return circulant
    if name == "inner_product":
        t = gaussian_variate(make_stream(seed, (_UNIT_VECTOR_KEY, n)), n)
        t = t / np.linalg.norm(t)

        def inner(i):
            b = draw(make_stream(seed, (EnsembleKind.GENERAL.code, n, 1, i)), dist, n)
            return {"abs_inner_product": float(abs(t @ b))}
        return inner
    if name == "toeplitz_inv_factors":
        def factors(i):
            T = to_dense(sample(_spec(EnsembleKind.TOEPLITZ, n, dist, seed, i)))
            lu = dense_oracle.lu_factor_checked(T)
            e = np.zeros(n)
            e[0] = 1.0
            p = dense_oracle.lu_solve(T, e, factors=lu)
            q = dense_oracle.lu_solve(T, e[::-1].copy(), factors=lu)
            return {"alpha": 1.0 / float(np.linalg.norm(p)), "beta": 1.0 / float(np.linalg.norm(q))}
        return factors

    raise UsageError(f"No observable for bound {name!r}", error_code="UNKNOWN_BOUND")


def bound_parameters(name: str, n: int, dist: Distribution) -> Dict[str, float]:
    params = {"n": n, "mu": dist.mu, "sigma": dist.sigma}
    if name == "sv_general":
        params["l"] = n
    if name == "norm_general":
        params["h"] = n
    return params


def _format_params(params: Dict[str, float]) -> str:
    return ",".join(f"{k}={v:g}" for k, v in params.items())


def _evaluate_bound(bound: CdfBound, y: float, params: Dict[str, float]) -> BoundValue:
    try:
        return bound.evaluate(y, params)
    except DomainError as e:
        if e.error_code != "OUT_OF_DOMAIN":
            raise
        # below the stated domain the lower bound says nothing
        return BoundValue(0.0, 0.0, True)


def verdict(direction: BoundDirection, empirical: float, bound: BoundValue, se: float,
            multiplier: float = ExperimentDefaults.SE_MULTIPLIER) -> Verdict:
    if bound.vacuous:
        return Verdict.VACUOUS
    if direction is BoundDirection.UPPER and empirical > bound.value + multiplier * se:
        return Verdict.VIOLATED
    if direction is BoundDirection.LOWER and empirical < bound.value - multiplier * se:
        return Verdict.VIOLATED
    return Verdict.RESPECTED


def compare(name: str, n: int, params: Dict[str, float], observable: str,
            samples: np.ndarray, grid: List[float]) -> List[BoundCheckRow]:
    """Rows for one observable sample against the bound on the grid"""
    bound = get_bound(name)
    count = samples.shape[0]
    sorted_samples = np.sort(samples)
    rows = []
    for y in grid:
        empirical = float(np.searchsorted(sorted_samples, y, side="right")) / count
        value = _evaluate_bound(bound, float(y), params)
        p0 = value.value
        se = math.sqrt(max(p0 * (1 - p0), empirical * (1 - empirical)) / count)
        rows.append(BoundCheckRow(
            bound=name,
            n=n,
            params=_format_params(params),
            y=float(y),
            empirical=empirical,
            theoretical=value.raw,
            se=se,
            verdict=verdict(bound.direction, empirical, value, se),
            observable=observable,
        ))
    return rows


def run_bound_check(cfg: ExperimentConfig) -> RunReport:
    """Monte Carlo cdfs of the bound's observable against the bound"""
    dist = Distribution.parse(cfg.distribution)
    if not dist.is_gaussian:
        raise UsageError(f"Bound {cfg.bound!r} assumes Gaussian entries, got {dist}", error_code="GAUSSIAN_ONLY")
    get_bound(cfg.bound)
    grid = sorted(float(y) for y in cfg.grid)

    report = RunReport()
    for n in cfg.sizes:
        params = bound_parameters(cfg.bound, n, dist)
        evaluate = _observables(cfg.bound, n, dist, cfg.seed)
        with performance_timer(f"bound-check {cfg.bound} n={n}"):
            outcomes = run_trials(cfg.bound, n, cfg.trials, evaluate, jobs=cfg.jobs)

        for observable in outcomes[0].values:
            samples = np.array([o.values[observable] for o in outcomes])
            report.rows.extend(compare(cfg.bound, n, params, observable, samples, grid))

        report.resamples[f"{cfg.bound}:{n}"] = resample_count(outcomes)
        report.trials_requested += cfg.trials
        report.trials_summarized += len(outcomes)

    violated = sum(1 for r in report.rows if r.verdict is Verdict.VIOLATED)
    vacuous = sum(1 for r in report.rows if r.verdict is Verdict.VACUOUS)
    logger.info(f"bound-check {cfg.bound}: {len(report.rows)} grid points, {violated} violated, {vacuous} vacuous")
    return report

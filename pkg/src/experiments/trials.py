"""
Trial execution shared by every experiment.

A trial is a pure function of its stream index. Failed draws are replaced by
the draw at index trial + attempt * trials, so the replacement is also fixed
by the configuration. Outcomes are sorted by (n, trial_index) before any
aggregation and the result never depends on the number of workers.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Sequence

import pandas as pd

from ..config.settings import ExperimentDefaults
from ..core.exceptions import TRIAL_FAILURES, ConvergenceError
from ..data.models import SummaryRow

logger = logging.getLogger(__name__)

# Non-converged estimates are redrawn like singular draws
RESAMPLE_ON = TRIAL_FAILURES + (ConvergenceError,)

Evaluate = Callable[[int], Dict[str, float]]


@dataclass(frozen=True)
class TrialOutcome:
    n: int
    trial_index: int
    stream_index: int
    values: Dict[str, float] = field(repr=False)
    resamples: int = 0


def _run_one(label: str, n: int, trial: int, trials: int, evaluate: Evaluate,
             max_resamples: int) -> TrialOutcome:
    last_error = None
    for attempt in range(max_resamples + 1):
        stream_index = trial + attempt * trials
        try:
            return TrialOutcome(n, trial, stream_index, evaluate(stream_index), attempt)
        except RESAMPLE_ON as e:
            last_error = e
            logger.warning(f"{label} n={n} trial {trial}: {e.__class__.__name__}: {e.message}; resampling")

    raise ConvergenceError(
        f"{label} n={n} trial {trial} failed {max_resamples + 1} draws in a row",
        error_code="RESAMPLES_EXHAUSTED",
        details={"last_error": last_error.to_dict() if last_error else None},
    )


def run_trials(label: str, n: int, trials: int, evaluate: Evaluate, jobs: int = 1,
               max_resamples: int = ExperimentDefaults.MAX_RESAMPLES) -> List[TrialOutcome]:
    """Run `trials` independent trials on a bounded worker pool"""
    indices = range(trials)
    if jobs <= 1:
        outcomes = [_run_one(label, n, t, trials, evaluate, max_resamples) for t in indices]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(
                lambda t: _run_one(label, n, t, trials, evaluate, max_resamples), indices))

    outcomes.sort(key=lambda o: (o.n, o.trial_index))
    resampled = sum(o.resamples for o in outcomes)
    if resampled:
        logger.info(f"{label} n={n}: {resampled} resamples over {trials} trials")
    return outcomes


def resample_count(outcomes: Sequence[TrialOutcome]) -> int:
    return sum(o.resamples for o in outcomes)


def summarize(label: str, n: int, outcomes: Sequence[TrialOutcome]) -> List[SummaryRow]:
    """One row per metric: min, mean, max and population std"""
    if not outcomes:
        return []
    frame = pd.DataFrame([o.values for o in outcomes])
    rows = []
    for metric in frame.columns:
        column = frame[metric].astype(float)
        low, high = float(column.min()), float(column.max())
        rows.append(SummaryRow(
            ensemble=label,
            n=n,
            metric=str(metric),
            min=low,
            # rounding in the sum can push the mean of equal values past them
            mean=min(max(float(column.mean()), low), high),
            max=high,
            std=float(column.std(ddof=0)),
        ))
    return rows

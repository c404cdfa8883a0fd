"""
Data models for experiment configuration and result rows.
Defines the structure and validation for data entities.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

from ..config.settings import EnsembleConfig, ExperimentDefaults
from ..core.exceptions import UsageError


class ExperimentKind(Enum):
    """Enumeration for experiment kinds"""
    TABLE_NORMS = "table_norms"
    TABLE_KAPPA = "table_kappa"
    BOUND_CHECK = "bound_check"
    CONTRAST = "contrast"


class Verdict(Enum):
    """Enumeration for bound check verdicts"""
    RESPECTED = "respected"
    VIOLATED = "violated"
    VACUOUS = "vacuous"


class OutputFormat(Enum):
    CSV = "csv"
    JSON = "json"


@dataclass
class ExperimentConfig:
    """Data model for one batch run"""
    experiment: ExperimentKind
    ensembles: List[str]
    sizes: List[int]
    trials: int = ExperimentDefaults.TRIALS
    distribution: str = EnsembleConfig.TABLE_DISTRIBUTION
    seed: int = ExperimentDefaults.SEED
    # None keeps the per-class choice: kappa_1 for Toeplitz and Hankel, kappa_2 otherwise
    norm: Optional[int] = None
    out: Optional[str] = None
    format: OutputFormat = OutputFormat.CSV
    jobs: int = ExperimentDefaults.JOBS
    bound: Optional[str] = None
    grid: Optional[List[float]] = None

    def validate(self) -> "ExperimentConfig":
        """Raise UsageError on the first violated constraint"""
        if self.trials < 1:
            raise UsageError(f"trials must be at least 1, got {self.trials}", error_code="BAD_TRIALS")
        if not self.sizes:
            raise UsageError("At least one size is required", error_code="BAD_SIZES")
        if any(n < 1 for n in self.sizes):
            raise UsageError(f"Sizes must be positive, got {self.sizes}", error_code="BAD_SIZES")
        if any(b <= a for a, b in zip(self.sizes, self.sizes[1:])):
            raise UsageError(f"Sizes must be strictly increasing, got {self.sizes}", error_code="BAD_SIZES")
        if self.norm not in (None, 1, 2):
            raise UsageError(f"norm must be 1 or 2, got {self.norm}", error_code="BAD_NORM")
        if self.jobs < 1:
            raise UsageError(f"jobs must be at least 1, got {self.jobs}", error_code="BAD_JOBS")
        if self.seed < 0:
            raise UsageError(f"seed must be non-negative, got {self.seed}", error_code="BAD_SEED")
        if self.experiment is ExperimentKind.BOUND_CHECK:
            if not self.bound:
                raise UsageError("bound-check needs --bound", error_code="MISSING_BOUND")
            if not self.grid:
                raise UsageError("bound-check needs a nonempty --grid", error_code="BAD_GRID")
        return self

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary"""
        return {
            'experiment': self.experiment.value,
            'ensembles': list(self.ensembles),
            'sizes': list(self.sizes),
            'trials': self.trials,
            'distribution': self.distribution,
            'seed': self.seed,
            'norm': self.norm,
            'format': self.format.value,
            'bound': self.bound,
            'grid': list(self.grid) if self.grid else None,
        }


@dataclass
class SummaryRow:
    """min / mean / max / population std of one observable over a trial batch"""
    ensemble: str
    n: int
    metric: str
    min: float
    mean: float
    max: float
    std: float

    COLUMNS = ("ensemble", "n", "metric", "min", "mean", "max", "std")

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary"""
        return {
            'ensemble': self.ensemble,
            'n': self.n,
            'metric': self.metric,
            'min': self.min,
            'mean': self.mean,
            'max': self.max,
            'std': self.std,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'SummaryRow':
        """Create from dictionary"""
        return cls(
            ensemble=str(data['ensemble']),
            n=int(data['n']),
            metric=str(data['metric']),
            min=float(data['min']),
            mean=float(data['mean']),
            max=float(data['max']),
            std=float(data['std']),
        )


@dataclass
class BoundCheckRow:
    """Empirical cdf against a theoretical bound at one grid point"""
    bound: str
    n: int
    params: str
    y: float
    empirical: float
    theoretical: float
    se: float
    verdict: Verdict
    observable: str = ""

    COLUMNS = ("bound", "n", "params", "observable", "y", "empirical", "theoretical", "se", "verdict")

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary"""
        return {
            'bound': self.bound,
            'n': self.n,
            'params': self.params,
            'observable': self.observable,
            'y': self.y,
            'empirical': self.empirical,
            'theoretical': self.theoretical,
            'se': self.se,
            'verdict': self.verdict.value if isinstance(self.verdict, Verdict) else self.verdict,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'BoundCheckRow':
        """Create from dictionary"""
        return cls(
            bound=str(data['bound']),
            n=int(data['n']),
            params=str(data['params']),
            y=float(data['y']),
            empirical=float(data['empirical']),
            theoretical=float(data['theoretical']),
            se=float(data['se']),
            verdict=Verdict(data['verdict']) if isinstance(data['verdict'], str) else data['verdict'],
            observable=str(data.get('observable') or ""),
        )


@dataclass
class RunReport:
    """Rows of one run plus its bookkeeping"""
    rows: List[Any] = field(default_factory=list)
    resamples: Dict[str, int] = field(default_factory=dict)
    trials_requested: int = 0
    trials_summarized: int = 0

    @property
    def violated(self) -> bool:
        return any(isinstance(r, BoundCheckRow) and r.verdict is Verdict.VIOLATED for r in self.rows)


# Type aliases for common data structures
SummaryRowList = List[SummaryRow]
BoundCheckRowList = List[BoundCheckRow]

"""
Seeded random-matrix populations.

Every trial owns its own Philox stream keyed by (seed, kind, m, n, trial),
so a matrix depends only on its key and never on which worker drew it or
in what order.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Union

import numpy as np

from ..config.settings import EnsembleConfig
from .exceptions import UsageError
from .structured_matrices import FCirculantSpec, HankelSpec, ToeplitzSpec

logger = logging.getLogger(__name__)


class DistributionTag(Enum):
    GAUSSIAN = "gaussian"
    UNIFORM = "uniform"


@dataclass(frozen=True)
class Distribution:
    """Gaussian(mu, sigma) or Uniform(lo, hi) entry law"""
    tag: DistributionTag
    a: float
    b: float

    def __post_init__(self):
        if self.tag is DistributionTag.GAUSSIAN and not self.b > 0:
            raise UsageError(f"Gaussian sigma must be positive, got {self.b}", error_code="BAD_DISTRIBUTION")
        if self.tag is DistributionTag.UNIFORM and not self.a < self.b:
            raise UsageError(f"Uniform needs lo < hi, got ({self.a}, {self.b})", error_code="BAD_DISTRIBUTION")

    @classmethod
    def gaussian(cls, mu: float = 0.0, sigma: float = 1.0) -> "Distribution":
        return cls(DistributionTag.GAUSSIAN, float(mu), float(sigma))

    @classmethod
    def uniform(cls, lo: float = -1.0, hi: float = 1.0) -> "Distribution":
        return cls(DistributionTag.UNIFORM, float(lo), float(hi))

    @classmethod
    def parse(cls, text: str) -> "Distribution":
        """'gaussian:mu,sigma' or 'uniform:lo,hi'; bare names take the defaults"""
        name, _, params = text.strip().partition(":")
        try:
            tag = DistributionTag(name.lower())
        except ValueError:
            raise UsageError(f"Unknown distribution {name!r}", error_code="BAD_DISTRIBUTION")
        if not params:
            return cls.gaussian() if tag is DistributionTag.GAUSSIAN else cls.uniform()
        try:
            a, b = (float(p) for p in params.split(","))
        except ValueError:
            raise UsageError(f"Distribution parameters must be two numbers, got {params!r}",
                             error_code="BAD_DISTRIBUTION")
        return cls(tag, a, b)

    @property
    def is_gaussian(self) -> bool:
        return self.tag is DistributionTag.GAUSSIAN

    @property
    def mu(self) -> float:
        return self.a if self.is_gaussian else 0.5 * (self.a + self.b)

    @property
    def sigma(self) -> float:
        return self.b if self.is_gaussian else (self.b - self.a) / np.sqrt(12.0)

    def __str__(self) -> str:
        return f"{self.tag.value}:{self.a:g},{self.b:g}"


class EnsembleKind(Enum):
    GENERAL = "general"
    TOEPLITZ = "toeplitz"
    HANKEL = "hankel"
    CIRCULANT = "circulant"
    FCIRCULANT = "fcirculant"

    @property
    def code(self) -> int:
        return list(EnsembleKind).index(self)


def parse_ensemble(text: str):
    """'toeplitz' -> (TOEPLITZ, None); 'fcirculant:2' -> (FCIRCULANT, 2.0)"""
    name, _, param = text.strip().partition(":")
    try:
        kind = EnsembleKind(name.lower())
    except ValueError:
        raise UsageError(f"Unknown ensemble {name!r}", error_code="BAD_ENSEMBLE")
    if kind is EnsembleKind.FCIRCULANT:
        try:
            return kind, float(param)
        except ValueError:
            raise UsageError("fcirculant needs a scalar, e.g. fcirculant:2", error_code="BAD_ENSEMBLE")
    return kind, None


@dataclass(frozen=True)
class EnsembleSpec:
    """One random-matrix population member, reproducible from its key"""
    kind: EnsembleKind
    m: int
    n: int
    dist: Distribution
    seed: int
    trial_index: int = 0
    f: Optional[float] = None

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise UsageError(f"Invalid dimensions {self.m}x{self.n}", error_code="BAD_SHAPE")
        if self.kind in (EnsembleKind.CIRCULANT, EnsembleKind.FCIRCULANT) and self.m != self.n:
            raise UsageError(f"{self.kind.value} matrices are square, got {self.m}x{self.n}", error_code="BAD_SHAPE")
        if self.kind is EnsembleKind.FCIRCULANT and self.f is None:
            raise UsageError("fcirculant ensemble needs f", error_code="BAD_ENSEMBLE")
        if self.seed < 0 or self.trial_index < 0:
            raise UsageError("seed and trial_index must be non-negative", error_code="BAD_SEED")

    @property
    def variate_count(self) -> int:
        if self.kind is EnsembleKind.GENERAL:
            return self.m * self.n
        if self.kind in (EnsembleKind.TOEPLITZ, EnsembleKind.HANKEL):
            return self.m + self.n - 1
        return self.n

    @property
    def label(self) -> str:
        return f"fcirculant:{self.f:g}" if self.kind is EnsembleKind.FCIRCULANT else self.kind.value


def make_stream(seed: int, key: Sequence[int]) -> np.random.Generator:
    """Independent Philox stream for `key` under the run seed"""
    sequence = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(sequence))


def spec_stream(spec: EnsembleSpec) -> np.random.Generator:
    return make_stream(spec.seed, (spec.kind.code, spec.m, spec.n, spec.trial_index))


def gaussian_variate(stream: np.random.Generator, count: Optional[int] = None,
                     mu: float = 0.0, sigma: float = 1.0) -> Union[float, np.ndarray]:
    """
    Normal variates by the Box-Muller transform of pairs of uniforms.

    u1 is drawn from (0, 1] so the logarithm stays finite.
    """
    size = 1 if count is None else int(count)
    pairs = (size + 1) // 2
    u1 = 1.0 - stream.random(pairs)
    u2 = stream.random(pairs)
    radius = np.sqrt(-2.0 * np.log(u1))
    angle = 2.0 * np.pi * u2

    z = np.empty(2 * pairs)
    z[0::2] = radius * np.cos(angle)
    z[1::2] = radius * np.sin(angle)
    z = mu + sigma * z[:size]
    return float(z[0]) if count is None else z


def draw(stream: np.random.Generator, dist: Distribution, count: int) -> np.ndarray:
    if dist.is_gaussian:
        return gaussian_variate(stream, count, dist.a, dist.b)
    return dist.a + (dist.b - dist.a) * stream.random(count)


def sample(spec: EnsembleSpec):
    """
    Draw the matrix described by `spec`.

    Consumes exactly m+n-1 variates for Toeplitz and Hankel, n for the
    circulant classes and m*n (row major) for general matrices.
    """
    values = draw(spec_stream(spec), spec.dist, spec.variate_count)

    if spec.kind is EnsembleKind.GENERAL:
        return values.reshape(spec.m, spec.n)
    if spec.kind is EnsembleKind.TOEPLITZ:
        return ToeplitzSpec(spec.m, spec.n, values)
    if spec.kind is EnsembleKind.HANKEL:
        return HankelSpec(spec.m, spec.n, values)
    if spec.kind is EnsembleKind.CIRCULANT:
        return FCirculantSpec(spec.n, values, 1.0)
    return FCirculantSpec(spec.n, values, spec.f)


def generator_description() -> str:
    return f"{EnsembleConfig.GENERATOR_NAME}; numpy {np.__version__}"

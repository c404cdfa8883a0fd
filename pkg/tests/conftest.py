"""
Shared fixtures for the condlab test suite.
"""

import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from src.core.ensembles import Distribution, EnsembleKind, EnsembleSpec, sample  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(20130501)


@pytest.fixture
def random_toeplitz():
    """Factory: seeded square uniform[-1, 1) Toeplitz matrix"""
    def make(n, index=0, seed=11, dist=None):
        dist = dist or Distribution.uniform()
        return sample(EnsembleSpec(EnsembleKind.TOEPLITZ, n, n, dist, seed, index))
    return make

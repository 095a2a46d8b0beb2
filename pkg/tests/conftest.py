"""
Shared fixtures.

Puts the project root on sys.path and provides seeded tensors.
"""

import sys
from pathlib import Path

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

import numpy as np
import pytest

from modules.harness.generators import GeneratorKind, GeneratorSpec, generate_tensor
from shared.utils.rng import make_generator


@pytest.fixture
def rng() -> np.random.Generator:
    return make_generator(20240601)


@pytest.fixture
def odeco_321():
    """4x4x4 odeco tensor with lambda = (3, 2, 1) and its ground truth."""
    spec = GeneratorSpec(kind=GeneratorKind.ODECO_EXACT, dims=[4, 4, 4], true_rank=3, lambdas=[3.0, 2.0, 1.0], seed=7)
    return generate_tensor(spec)


@pytest.fixture
def gaussian_444():
    return generate_tensor(GeneratorSpec(kind=GeneratorKind.GAUSSIAN, dims=[4, 4, 4], seed=11)).tensor


@pytest.fixture
def gaussian_555():
    return generate_tensor(GeneratorSpec(kind=GeneratorKind.GAUSSIAN, dims=[5, 5, 5], seed=3)).tensor

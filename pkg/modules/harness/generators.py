"""
Seeded test tensors.

Kinds:
    gaussian        i.i.d. standard normal entries
    odeco_exact     assemble(random orthonormal factors, lambda), lambda log-uniform in [0.5, 5]
    odeco_noisy     odeco_exact + noise * gaussian
    defective_rank  odeco_exact of rank true_rank - 1, for runs at target rank true_rank
"""

from enum import Enum
from typing import List, NamedTuple, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from modules.matrix_kernels import random_orthonormal
from modules.solver import FactorSet
from modules.tensor_core import DenseTensor, assemble
from shared.utils.logger import setup_logger
from shared.utils.rng import make_generator

logger = setup_logger(__name__)

LAMBDA_RANGE = (0.5, 5.0)


class GeneratorKind(str, Enum):
    GAUSSIAN = "gaussian"
    ODECO_EXACT = "odeco_exact"
    ODECO_NOISY = "odeco_noisy"
    DEFECTIVE_RANK = "defective_rank"


class GeneratorSpec(BaseModel):
    """
    Tensor generator settings.

    true_rank is the rank of the odeco part, except for defective_rank where it
    is the target rank and the tensor has rank true_rank - 1.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: GeneratorKind
    dims: List[int] = Field(..., min_length=1)
    true_rank: Optional[int] = Field(None, ge=1)
    noise: float = Field(0.0, ge=0)
    seed: int = Field(0, ge=0)
    lambdas: Optional[List[float]] = None

    @model_validator(mode="after")
    def check_ranks(self) -> "GeneratorSpec":
        if any(n < 1 for n in self.dims):
            raise ValueError(f"dims must be positive, got {self.dims}")
        if self.kind is GeneratorKind.GAUSSIAN:
            return self
        if self.true_rank is None:
            raise ValueError(f"{self.kind.value} needs true_rank")
        if self.true_rank > min(self.dims):
            raise ValueError(f"true_rank {self.true_rank} exceeds min(dims) = {min(self.dims)}")
        if self.kind is GeneratorKind.DEFECTIVE_RANK and self.true_rank < 2:
            raise ValueError("defective_rank needs true_rank >= 2")
        if self.lambdas is not None and len(self.lambdas) != self.odeco_rank:
            raise ValueError(f"Expected {self.odeco_rank} lambdas, got {len(self.lambdas)}")
        return self

    @property
    def odeco_rank(self) -> int:
        """Rank of the odeco part actually generated."""
        if self.kind is GeneratorKind.GAUSSIAN:
            return 0
        if self.kind is GeneratorKind.DEFECTIVE_RANK:
            return self.true_rank - 1
        return self.true_rank


class GroundTruth(NamedTuple):
    factors: FactorSet
    lam: np.ndarray


class GeneratedTensor(NamedTuple):
    tensor: DenseTensor
    truth: Optional[GroundTruth]


def random_lambdas(rng: np.random.Generator, r: int) -> np.ndarray:
    """Log-uniform in LAMBDA_RANGE, sorted nonincreasing."""
    low, high = np.log(LAMBDA_RANGE[0]), np.log(LAMBDA_RANGE[1])
    return np.sort(np.exp(rng.uniform(low, high, size=r)))[::-1]


def generate_tensor(spec: GeneratorSpec, *stream: int) -> GeneratedTensor:
    """
    Build the tensor described by spec.

    Draws come from the PCG64 stream (spec.seed, *stream), so repeats of an
    experiment pass their repeat index as the stream.
    """
    rng = make_generator(spec.seed, *stream)
    dims = tuple(spec.dims)
    if spec.kind is GeneratorKind.GAUSSIAN:
        return GeneratedTensor(DenseTensor(rng.standard_normal(dims)), None)

    r = spec.odeco_rank
    factors = FactorSet(tuple(random_orthonormal(n, r, rng) for n in dims))
    lam = np.asarray(spec.lambdas, dtype=np.float64) if spec.lambdas is not None else random_lambdas(rng, r)
    A = assemble(factors, lam)
    if spec.kind is GeneratorKind.ODECO_NOISY and spec.noise > 0:
        A = A + DenseTensor(spec.noise * rng.standard_normal(dims))
    logger.debug(f"Generated {spec.kind.value} tensor {dims} with odeco rank {r}")
    return GeneratedTensor(A, GroundTruth(factors, lam))

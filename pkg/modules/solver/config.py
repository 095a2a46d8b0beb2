"""
Solver configuration.

SolverConfig is the user-facing schema: every threshold is optional and falls
back to a default scaled to the input tensor. resolve() turns it into the
SolverParameters of one run.
"""

import math
from typing import Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, NonNegativeInt, model_validator

from modules.solver.types import InitStrategy, ProximalMode, SolverParameters
from shared.core.exceptions import ConfigurationException

EPSILON_SCALE = 1e-4
KAPPA_FRACTION = 0.5
TAU_FACTOR = 10.0


def default_epsilon(norm_sq: float) -> float:
    """1e-4 * max(1, ||A||^2); V Lambda scales like ||A||^2."""
    return EPSILON_SCALE * max(1.0, norm_sq)


def kappa_upper_bound(f0: float, r: int) -> float:
    """Truncation thresholds must stay below sqrt(f(U_[0]) / r)."""
    return math.sqrt(f0 / r)


class SolverConfig(BaseModel):
    """iAPD settings. Unknown keys are rejected."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    epsilon: Optional[float] = Field(None, gt=0)
    kappa: Optional[float] = Field(None, ge=0)
    tau: Optional[float] = Field(None, gt=0)
    proximal_mode: ProximalMode = ProximalMode.CLASSIC
    truncation_enabled: bool = True
    max_sweeps: int = Field(2000, ge=1)
    step_tol: float = Field(1e-10, ge=0)
    kkt_tol: float = Field(1e-8, ge=0)
    init: InitStrategy = InitStrategy.HOSVD
    seed: int = Field(0, ge=0)
    # spawn key under seed for random starts, e.g. (experiment, repeat, mode)
    init_stream: Tuple[NonNegativeInt, ...] = ()
    keep_snapshots: bool = True

    @model_validator(mode="after")
    def check_tau(self) -> "SolverConfig":
        """tau > epsilon when both are given in revised mode."""
        if (
            self.proximal_mode is ProximalMode.REVISED
            and self.tau is not None
            and self.epsilon is not None
            and self.tau <= self.epsilon
        ):
            raise ValueError(f"tau ({self.tau}) must exceed epsilon ({self.epsilon}) in revised mode")
        return self

    def resolve(self, norm_sq: float, f0: float, r: int) -> SolverParameters:
        """
        Fill in derived defaults and validate against the starting point.

        Args:
            norm_sq: ||A||^2
            f0: f(U_[0])
            r: Initial rank

        Raises:
            ConfigurationException: If tau <= epsilon or kappa is outside [0, sqrt(f0/r))
        """
        epsilon = self.epsilon if self.epsilon is not None else default_epsilon(norm_sq)
        bound = kappa_upper_bound(f0, r)
        kappa = self.kappa if self.kappa is not None else KAPPA_FRACTION * bound
        if self.truncation_enabled and kappa >= bound:
            raise ConfigurationException(
                f"kappa={kappa:.6g} must be below sqrt(f(U_0)/r)={bound:.6g}"
            )

        tau: Optional[float] = None
        if self.proximal_mode is ProximalMode.REVISED:
            tau = self.tau if self.tau is not None else TAU_FACTOR * epsilon
            if tau <= epsilon:
                raise ConfigurationException(f"tau ({tau:.6g}) must exceed epsilon ({epsilon:.6g})")

        return SolverParameters(
            epsilon=epsilon,
            kappa=kappa,
            tau=tau,
            proximal_mode=self.proximal_mode,
            truncation_enabled=self.truncation_enabled,
            max_sweeps=self.max_sweeps,
            step_tol=self.step_tol,
            kkt_tol=self.kkt_tol,
            keep_snapshots=self.keep_snapshots,
            norm_sq=norm_sq,
            f0=f0,
            initial_rank=r,
        )

"""
Data types for the iAPD solver: factor sets, per-sweep records, traces and
solutions.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from modules.matrix_kernels import OrthonormalMatrix
from shared.core.exceptions import DimensionMismatchError


class ProximalMode(str, Enum):
    """Which Substep 2 the solver runs."""
    CLASSIC = "classic"
    REVISED = "revised"
    NONE = "none"


class InitStrategy(str, Enum):
    HOSVD = "hosvd"
    RANDOM = "random"


class UpdateCase(str, Enum):
    """How a mode factor was produced."""
    POLAR = "polar"                # plain polar factor of V Lambda
    PROXIMAL = "proximal"          # polar factor of V Lambda + eps U_old
    REVISED_FLIP = "revised_flip"  # revised step, last singular vector sign-aligned


class TerminationReason(str, Enum):
    TOLERANCE = "tolerance"
    MAX_SWEEPS = "max_sweeps"


@dataclass(frozen=True, eq=False)
class FactorSet:
    """
    Ordered factors (U^(1), ..., U^(k)); U^(i) is n_i x r with orthonormal columns.

    Indexing and iteration yield the underlying ndarrays, so a FactorSet can be
    passed anywhere a sequence of matrices is expected.
    """
    factors: Tuple[OrthonormalMatrix, ...]

    def __post_init__(self):
        if not self.factors:
            raise DimensionMismatchError("A factor set needs at least one factor")
        ranks = {U.cols for U in self.factors}
        if len(ranks) != 1:
            raise DimensionMismatchError(f"Factors disagree on column count: {sorted(ranks)}")
        if self.factors[0].cols < 1:
            raise DimensionMismatchError("A factor set needs rank r >= 1")

    @classmethod
    def of(cls, matrices: Sequence[np.ndarray], tol: float = 1e-10) -> "FactorSet":
        """Validate and wrap plain matrices."""
        return cls(tuple(
            M if isinstance(M, OrthonormalMatrix) else OrthonormalMatrix(M, tol=tol)
            for M in matrices
        ))

    @property
    def rank(self) -> int:
        return self.factors[0].cols

    @property
    def dims(self) -> Tuple[int, ...]:
        return tuple(U.rows for U in self.factors)

    @property
    def order(self) -> int:
        return len(self.factors)

    def __len__(self) -> int:
        return len(self.factors)

    def __iter__(self) -> Iterator[np.ndarray]:
        return (U.matrix for U in self.factors)

    def __getitem__(self, i: int) -> np.ndarray:
        return self.factors[i].matrix

    def matrices(self) -> List[np.ndarray]:
        """Writable copies of the factor matrices."""
        return [np.array(U.matrix) for U in self.factors]

    def column(self, j: int) -> List[np.ndarray]:
        """Block vector x_j = (u^(1)_j, ..., u^(k)_j) as a list of parts."""
        return [U.matrix[:, j] for U in self.factors]

    def remove_columns(self, J: Sequence[int]) -> "FactorSet":
        """Drop columns J from every factor."""
        if not len(J):
            return self
        return FactorSet.of([np.delete(U.matrix, list(J), axis=1) for U in self.factors])

    def select_columns(self, order: Sequence[int]) -> "FactorSet":
        return FactorSet.of([U.matrix[:, list(order)] for U in self.factors])

    def distance(self, other: "FactorSet") -> float:
        """||U - V||_F over all modes."""
        if self.dims != other.dims or self.rank != other.rank:
            raise DimensionMismatchError(
                f"Cannot compare factor sets of dims {self.dims}/{self.rank} and {other.dims}/{other.rank}"
            )
        return float(np.sqrt(sum(np.linalg.norm(a - b) ** 2 for a, b in zip(self, other))))


@dataclass(frozen=True)
class SolverParameters:
    """Solver settings with every derived default resolved for one run."""
    epsilon: float
    kappa: float
    tau: Optional[float]
    proximal_mode: ProximalMode
    truncation_enabled: bool
    max_sweeps: int
    step_tol: float
    kkt_tol: float
    keep_snapshots: bool
    norm_sq: float
    f0: float
    initial_rank: int

    @property
    def decrease_constant(self) -> Optional[float]:
        """c with f(U_[p]) - f(U_[p-1]) >= c/2 ||U_[p] - U_[p-1]||^2; None without a guarantee."""
        if self.proximal_mode is ProximalMode.CLASSIC:
            return self.epsilon
        if self.proximal_mode is ProximalMode.REVISED:
            return min(self.epsilon, self.tau - self.epsilon)
        return None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "epsilon": self.epsilon,
            "kappa": self.kappa,
            "tau": self.tau,
            "proximal_mode": self.proximal_mode.value,
            "truncation_enabled": self.truncation_enabled,
            "max_sweeps": self.max_sweeps,
            "step_tol": self.step_tol,
            "kkt_tol": self.kkt_tol,
            "norm_sq": self.norm_sq,
            "f0": self.f0,
            "initial_rank": self.initial_rank,
        }


@dataclass(frozen=True, eq=False)
class ModeUpdate:
    """Outcome of one Substep 1 + Substep 2 on mode i."""
    factor: np.ndarray
    case: UpdateCase
    sigma: np.ndarray          # singular values of V Lambda, nonincreasing
    lam_before: np.ndarray     # lambda^{i-1}: diag(U_old^T V)
    lam_after: np.ndarray      # lambda^i: diag(U_new^T V)
    symmetry_defect: Optional[float] = None

    @property
    def proximal(self) -> bool:
        return self.case is UpdateCase.PROXIMAL

    @property
    def sigma_min(self) -> float:
        return float(self.sigma[-1])


@dataclass(frozen=True, eq=False)
class SweepRecord:
    """
    Everything observed during sweep p.

    lam is lambda^k at the end of the sweep, before truncation; truncated indexes
    into it. f_value is f(U_[p]) after truncation. The snapshots hold U_[p-1]
    (sweep start) and U_[p] before truncation when the run keeps them.
    """
    sweep: int
    rank: int
    f_start: float
    f_value: float
    lam: np.ndarray
    step_norm: float
    mode_step_norms: Tuple[float, ...]
    sigma_min: Tuple[float, ...]
    proximal_flags: Tuple[bool, ...]
    revised_flags: Tuple[bool, ...]
    substep_f: Tuple[float, ...]
    lambda_products: Tuple[float, ...]
    truncated: Tuple[int, ...]
    kkt_residual: float
    start_factors: Optional[FactorSet] = None
    end_factors: Optional[FactorSet] = None

    @property
    def is_truncation(self) -> bool:
        return bool(self.truncated)

    @property
    def truncation_loss(self) -> float:
        """Objective lost to truncation: f before truncation minus f after."""
        return self.substep_f[-1] - self.f_value

    @property
    def proximal_bitmask(self) -> int:
        """Bit i set when mode i+1 took a proximal correction."""
        return sum(1 << i for i, flag in enumerate(self.proximal_flags) if flag)


@dataclass(frozen=True, eq=False)
class SweepTrace:
    """One record per completed sweep, plus the resolved run parameters."""
    dims: Tuple[int, ...]
    params: SolverParameters
    records: Tuple[SweepRecord, ...] = field(default_factory=tuple)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[SweepRecord]:
        return iter(self.records)

    def __getitem__(self, p: int) -> SweepRecord:
        return self.records[p]

    def f_values(self) -> np.ndarray:
        return np.array([rec.f_value for rec in self.records])

    def truncation_sweeps(self) -> List[int]:
        return [rec.sweep for rec in self.records if rec.is_truncation]

    def last_truncation_position(self) -> int:
        """Index in records of the last truncation sweep, -1 when none happened."""
        positions = [p for p, rec in enumerate(self.records) if rec.is_truncation]
        return positions[-1] if positions else -1

    def removed_count(self) -> int:
        return sum(len(rec.truncated) for rec in self.records)

    def with_records(self, records: Sequence[SweepRecord]) -> "SweepTrace":
        return SweepTrace(dims=self.dims, params=self.params, records=tuple(records))


@dataclass(frozen=True, eq=False)
class Solution:
    """Final factors with lambda normalized nonnegative and nonincreasing."""
    factors: FactorSet
    lam: np.ndarray
    residual: float
    trace: SweepTrace
    termination_reason: TerminationReason

    @property
    def rank(self) -> int:
        return self.factors.rank

    @property
    def sweeps(self) -> int:
        return len(self.trace)

    @property
    def final_f(self) -> float:
        return float(np.dot(self.lam, self.lam))

    def to_summary(self) -> Dict[str, Any]:
        last = self.trace.records[-1] if len(self.trace) else None
        return {
            "final_f": self.final_f,
            "residual": self.residual,
            "rank": self.rank,
            "sweeps": self.sweeps,
            "termination_reason": self.termination_reason.value,
            "lambda": [float(v) for v in self.lam],
            "kkt_residual": last.kkt_residual if last else None,
            "truncations": self.trace.removed_count(),
            "proximal_corrections": sum(sum(rec.proximal_flags) for rec in self.trace),
        }

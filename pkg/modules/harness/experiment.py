"""
Experiment schema and single-run execution.

Experiment files are JSON validated against ExperimentConfig; unknown keys are
rejected.
"""

import json
import time
import zlib
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from modules.diagnostics import (
    fit_linear_rate,
    kkt_residual,
    monotonicity_audit,
    positivity_chain_audit,
    recovery_error,
    subdiff_bound_audit,
    substep_decrease_audit,
    sufficient_decrease_audit,
)
from modules.harness.generators import GeneratorKind, GeneratorSpec, GroundTruth, generate_tensor
from modules.harness.trace_export import write_trace_csv
from modules.solver import ProximalMode, Solution, SolverConfig, TerminationReason, run
from modules.tensor_core import DenseTensor, norm
from shared.core.exceptions import ConfigurationException, InsufficientDataError
from shared.utils.logger import setup_logger

logger = setup_logger(__name__)

KKT_LIMIT_TOL = 1e-8
RESIDUAL_IDENTITY_TOL = 1e-8
RECOVERY_LAMBDA_TOL = 1e-8
RECOVERY_SUBSPACE_TOL = 1e-7


class ExperimentConfig(BaseModel):
    """One benchmark family: a generator, a target rank and the solver modes to compare."""

    model_config = ConfigDict(extra="forbid")

    name: str = "experiment"
    generator: GeneratorSpec
    rank: int = Field(..., ge=1)
    solver: SolverConfig = Field(default_factory=SolverConfig)
    modes: List[ProximalMode] = Field(default_factory=lambda: [ProximalMode.CLASSIC], min_length=1)
    repeat: int = Field(1, ge=1)
    output_dir: Optional[str] = None
    write_traces: bool = True

    @model_validator(mode="after")
    def check_rank(self) -> "ExperimentConfig":
        if self.rank > min(self.generator.dims):
            raise ValueError(f"rank {self.rank} exceeds min(dims) = {min(self.generator.dims)}")
        if len(self.generator.dims) < 3:
            raise ValueError("The solver needs tensors of order >= 3")
        return self

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "ExperimentConfig":
        """
        Load and validate a JSON experiment file.

        Raises:
            ConfigurationException: If the file is unreadable or fails validation
        """
        path = Path(path)
        try:
            return cls.model_validate(json.loads(path.read_text()))
        except (OSError, json.JSONDecodeError, ValidationError) as e:
            raise ConfigurationException(f"Invalid experiment config {path}: {e}") from e


class RunRecord(BaseModel):
    """Outcome of one (mode, repeat) run."""

    model_config = ConfigDict(extra="forbid")

    experiment: str
    mode: ProximalMode
    repeat: int
    summary: Dict[str, Any] = Field(default_factory=dict)
    verdicts: Dict[str, bool] = Field(default_factory=dict)
    rate: Optional[Dict[str, Any]] = None
    recovery: Optional[Dict[str, Any]] = None
    tail_proximal_fraction: Optional[float] = None
    wall_time: float = 0.0
    trace_csv: Optional[str] = None
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None


def tail_proximal_fraction(sol: Solution, fraction: float = 0.5) -> float:
    """Share of sweeps in the final `fraction` of the run that took any proximal correction."""
    records = sol.trace.records
    if not records:
        return 0.0
    start = int(len(records) * (1.0 - fraction))
    tail = records[start:] or records[-1:]
    return sum(1 for rec in tail if any(rec.proximal_flags)) / len(tail)


def audit_solution(A: DenseTensor, sol: Solution,
                   truth: Optional[GroundTruth] = None,
                   exact: bool = False) -> Tuple[Dict[str, bool], Dict[str, Any]]:
    """
    Run every audit that applies to this solution.

    Returns:
        (verdicts by audit name, details by audit name)
    """
    verdicts: Dict[str, bool] = {}
    details: Dict[str, Any] = {}
    params = sol.trace.params
    norm_sq = norm(A) ** 2

    identity_gap = abs(sol.residual ** 2 - (norm_sq - sol.final_f))
    verdicts["residual_identity"] = identity_gap <= RESIDUAL_IDENTITY_TOL * max(1.0, norm_sq)

    if params.decrease_constant is not None:
        violations = sufficient_decrease_audit(sol.trace)
        verdicts["sufficient_decrease"] = not violations
        details["sufficient_decrease"] = [v.to_dict() for v in violations]
        verdicts["substep_decrease"] = not substep_decrease_audit(sol.trace)
        chain = positivity_chain_audit(sol.trace)
        verdicts["positivity_chain"] = not chain
        details["positivity_chain"] = chain

    mono = monotonicity_audit(sol.trace)
    verdicts["monotonicity"] = mono.passed
    details["monotonicity"] = mono.to_dict()

    if params.keep_snapshots:
        subdiff = subdiff_bound_audit(A, sol.trace)
        verdicts["subdiff_bound"] = subdiff.passed
        details["subdiff_bound"] = subdiff.to_dict()

    if sol.termination_reason is TerminationReason.TOLERANCE:
        report = kkt_residual(A, sol.factors)
        verdicts["kkt_limit"] = report.total <= KKT_LIMIT_TOL and report.max_symmetry_defect <= KKT_LIMIT_TOL
        details["kkt_limit"] = report.to_dict()

    if truth is not None and exact:
        rec = recovery_error(sol, truth)
        verdicts["exact_recovery"] = (
            rec.lambda_error <= RECOVERY_LAMBDA_TOL and rec.subspace_error <= RECOVERY_SUBSPACE_TOL
        )
        details["exact_recovery"] = rec.to_dict()
    return verdicts, details


def run_stream(config: ExperimentConfig, mode: ProximalMode, repeat: int) -> Tuple[int, int, int]:
    """SeedSequence spawn key (experiment, repeat, mode) for the run's random start."""
    return zlib.crc32(config.name.encode()), repeat, list(ProximalMode).index(ProximalMode(mode))


def run_single(config: ExperimentConfig, mode: ProximalMode, repeat: int,
               output_dir: Optional[Path] = None) -> RunRecord:
    """Generate the repeat's tensor, solve it in the given mode and audit the run."""
    generated = generate_tensor(config.generator, repeat)
    solver_config = SolverConfig.model_validate({
        **config.solver.model_dump(),
        "proximal_mode": mode,
        "init_stream": run_stream(config, mode, repeat),
    })

    started = time.perf_counter()
    sol = run(generated.tensor, config.rank, solver_config)
    wall_time = time.perf_counter() - started

    exact = config.generator.kind is GeneratorKind.ODECO_EXACT and config.rank == config.generator.true_rank
    verdicts, _ = audit_solution(generated.tensor, sol, generated.truth, exact=exact)

    rate = None
    if sol.termination_reason is TerminationReason.TOLERANCE:
        try:
            rate = fit_linear_rate(sol).to_dict()
        except InsufficientDataError as e:
            logger.debug(f"No rate for {config.name}/{mode.value}/{repeat}: {e}")

    recovery = None
    if generated.truth is not None:
        recovery = recovery_error(sol, generated.truth).to_dict()

    trace_csv = None
    if output_dir is not None and config.write_traces:
        path = output_dir / f"{config.name}_{mode.value}_r{repeat:03d}.csv"
        trace_csv = str(write_trace_csv(sol.trace, path))

    return RunRecord(
        experiment=config.name,
        mode=mode,
        repeat=repeat,
        summary=sol.to_summary(),
        verdicts=verdicts,
        rate=rate,
        recovery=recovery,
        tail_proximal_fraction=tail_proximal_fraction(sol),
        wall_time=wall_time,
        trace_csv=trace_csv,
    )

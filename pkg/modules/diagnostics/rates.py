"""
Empirical convergence rate of f along a trace.

f* is estimated as the final f plus a Richardson-type extrapolation of the
remaining gap from the last three values. The rate is exp(slope) of a
least-squares line through log(f* - f_p) over the tail of the usable points.
"""

import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional, Sequence, Union

import numpy as np

from modules.diagnostics.formulas import LojasiewiczExponent, lojasiewicz_exponent
from modules.solver import Solution, SweepTrace, TerminationReason
from shared.core.exceptions import InsufficientDataError
from shared.utils.logger import setup_logger

logger = setup_logger(__name__)

MIN_TAIL_POINTS = 10
TAIL_FRACTION = 0.3
# gaps at or below this many ulps of f* are indistinguishable from zero
NOISE_ULPS = 1e3


@dataclass(frozen=True)
class RateReport:
    rho: float
    tail_length: int
    fit_residual: float
    f_star: float
    usable_points: int
    superlinear: bool
    lojasiewicz: Optional[LojasiewiczExponent] = None

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        if self.lojasiewicz is not None:
            data["lojasiewicz"] = {
                "N": self.lojasiewicz.N,
                "triple": list(self.lojasiewicz.triple),
                "tau": self.lojasiewicz.tau,
            }
        return data


def _f_sequence(trace: SweepTrace) -> np.ndarray:
    """f values after the last truncation, starting from that sweep's end value."""
    last = trace.last_truncation_position()
    tail = trace.records[last + 1:]
    if not tail:
        return np.array([trace.records[-1].f_value]) if len(trace) else np.array([])
    return np.array([tail[0].f_start] + [rec.f_value for rec in tail])


def estimate_f_star(f: np.ndarray) -> float:
    """Final f plus d_last q / (1 - q), q = d_last / d_prev, when 0 < q < 1."""
    if f.size < 3:
        return float(f[-1])
    d_prev, d_last = f[-2] - f[-3], f[-1] - f[-2]
    if d_prev != 0:
        q = d_last / d_prev
        if 0 < q < 1:
            return float(f[-1] + d_last * q / (1 - q))
    return float(f[-1])


def fit_linear_rate(source: Union[Solution, SweepTrace, Sequence[float]]) -> RateReport:
    """
    Fit f* - f_p ~ C rho^p on the tail of a run.

    A gap that reaches the noise floor before MIN_TAIL_POINTS usable points is
    reported as superlinear with rho = 0.

    Args:
        source: A Solution, its trace, or a plain sequence of f values

    Raises:
        InsufficientDataError: If fewer than MIN_TAIL_POINTS usable gaps exist
                               and the gap never reached the noise floor
    """
    lojasiewicz = None
    if isinstance(source, Solution):
        if source.termination_reason is TerminationReason.MAX_SWEEPS:
            logger.warning("Fitting a rate on a run that stopped at max_sweeps")
        source = source.trace
    if isinstance(source, SweepTrace):
        if len(source):
            last = source.records[-1]
            lojasiewicz = lojasiewicz_exponent(source.dims, last.rank - len(last.truncated))
        f = _f_sequence(source)
    else:
        f = np.asarray(source, dtype=np.float64).reshape(-1)
    if f.size == 0:
        raise InsufficientDataError("No objective values to fit")

    f_star = estimate_f_star(f)
    gaps = f_star - f
    floor = NOISE_ULPS * np.finfo(np.float64).eps * max(1.0, abs(f_star))
    usable = np.flatnonzero(gaps > floor)
    hit_floor = bool(np.any(gaps <= floor))

    if usable.size < MIN_TAIL_POINTS:
        if hit_floor:
            return RateReport(rho=0.0, tail_length=int(usable.size), fit_residual=0.0, f_star=f_star,
                              usable_points=int(usable.size), superlinear=True, lojasiewicz=lojasiewicz)
        raise InsufficientDataError(
            f"Need {MIN_TAIL_POINTS} usable gaps for a rate fit, found {usable.size}"
        )

    tail_length = max(MIN_TAIL_POINTS, math.ceil(TAIL_FRACTION * usable.size))
    tail = usable[-tail_length:]
    log_gaps = np.log(gaps[tail])
    slope, intercept = np.polyfit(tail.astype(np.float64), log_gaps, 1)
    fitted = slope * tail + intercept
    fit_residual = float(np.sqrt(np.mean((log_gaps - fitted) ** 2)))
    return RateReport(
        rho=float(np.exp(slope)),
        tail_length=int(tail_length),
        fit_residual=fit_residual,
        f_star=f_star,
        usable_points=int(usable.size),
        superlinear=False,
        lojasiewicz=lojasiewicz,
    )

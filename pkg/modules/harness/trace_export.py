"""
Sweep traces as CSV.

Columns, in order: sweep, f, delta_f, step_norm, kkt_residual,
sigma_min_mode_1..k, proximal_flags (bitmask, bit i-1 for mode i),
truncated_indices (semicolon-separated, empty when none).
"""

from pathlib import Path
from typing import List, Union

import pandas as pd

from modules.solver import SweepTrace


def trace_columns(k: int) -> List[str]:
    return (
        ["sweep", "f", "delta_f", "step_norm", "kkt_residual"]
        + [f"sigma_min_mode_{i}" for i in range(1, k + 1)]
        + ["proximal_flags", "truncated_indices"]
    )


def trace_frame(trace: SweepTrace) -> pd.DataFrame:
    """One row per sweep, fixed column order."""
    k = len(trace.dims)
    rows = []
    for rec in trace:
        row = {
            "sweep": rec.sweep,
            "f": rec.f_value,
            "delta_f": rec.f_value - rec.f_start,
            "step_norm": rec.step_norm,
            "kkt_residual": rec.kkt_residual,
            "proximal_flags": rec.proximal_bitmask,
            "truncated_indices": ";".join(str(j) for j in rec.truncated),
        }
        for i, sigma in enumerate(rec.sigma_min, start=1):
            row[f"sigma_min_mode_{i}"] = sigma
        rows.append(row)
    return pd.DataFrame(rows, columns=trace_columns(k))


def write_trace_csv(trace: SweepTrace, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    trace_frame(trace).to_csv(path, index=False)
    return path

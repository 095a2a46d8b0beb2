"""
Benchmark runner: every (mode, repeat) pair of an experiment, run concurrently
on worker threads, followed by a per-mode aggregate.

Outputs in the benchmark directory:
    <name>_<mode>_rNNN.csv   sweep trace per run
    runs.json                one RunRecord per run, sorted by (mode, repeat)
    aggregate.json           per-mode statistics
"""

import asyncio
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional

import pandas as pd

from modules.harness.experiment import ExperimentConfig, RunRecord, run_single
from modules.solver import ProximalMode
from shared.utils.config import settings
from shared.utils.logger import log_error, log_function_call, setup_logger

logger = setup_logger(__name__)

MODE_ORDER = {mode: position for position, mode in enumerate(ProximalMode)}


@dataclass
class BenchmarkResult:
    records: List[RunRecord]
    aggregate: Dict[str, Any]
    output_dir: Path

    @property
    def failed(self) -> List[RunRecord]:
        return [r for r in self.records if not r.ok]


def _sort_key(record: RunRecord):
    return (MODE_ORDER[record.mode], record.repeat)


def aggregate_records(records: List[RunRecord]) -> Dict[str, Any]:
    """
    Per-mode statistics: run counts, median sweeps, fitted rates, truncation and
    tail proximal frequencies, and audit pass counts.
    """
    rows = [
        {
            'mode': r.mode.value,
            'repeat': r.repeat,
            'ok': r.ok,
            'tolerance': r.summary.get('termination_reason') == 'tolerance',
            'sweeps': r.summary.get('sweeps'),
            'truncated': (r.summary.get('truncations') or 0) > 0,
            'rho': r.rate['rho'] if r.rate else None,
            'tail_proximal_fraction': r.tail_proximal_fraction,
            'wall_time': r.wall_time,
        }
        for r in sorted(records, key=_sort_key)
    ]
    if not rows:
        return {}
    frame = pd.DataFrame(rows)

    aggregate: Dict[str, Any] = {}
    for mode, group in frame.groupby('mode', sort=False):
        ok = group[group['ok']]
        rhos = ok['rho'].dropna()
        mode_records = [r for r in records if r.mode.value == mode and r.ok]
        audit_names = sorted({name for r in mode_records for name in r.verdicts})
        aggregate[mode] = {
            'runs': int(len(group)),
            'failed_runs': int((~group['ok']).sum()),
            'tolerance_runs': int(ok['tolerance'].sum()),
            'median_sweeps': float(ok['sweeps'].median()) if len(ok) else None,
            'rho': [float(v) for v in rhos],
            'median_rho': float(rhos.median()) if len(rhos) else None,
            'truncation_frequency': float(ok['truncated'].mean()) if len(ok) else None,
            'tail_proximal_frequency': float(ok['tail_proximal_fraction'].mean()) if len(ok) else None,
            'proximal_free_tail_runs': int((ok['tail_proximal_fraction'] == 0).sum()),
            'median_wall_time': float(ok['wall_time'].median()) if len(ok) else None,
            'audits_passed': {
                name: sum(1 for r in mode_records if r.verdicts.get(name)) for name in audit_names
            },
        }
    return aggregate


async def run_benchmark(config: ExperimentConfig, output_dir: Optional[Path] = None,
                        workers: Optional[int] = None) -> BenchmarkResult:
    """
    Run config.repeat repeats for each mode in config.modes.

    Repeats run on worker threads; a run that raises becomes a RunRecord with
    its error set instead of aborting the batch.
    """
    output_dir = Path(output_dir or config.output_dir or settings.output_path / config.name)
    output_dir.mkdir(parents=True, exist_ok=True)
    workers = workers or settings.BENCHMARK_WORKERS
    log_function_call(logger, "run_benchmark", name=config.name, modes=[m.value for m in config.modes],
                      repeat=config.repeat, workers=workers)

    jobs = [(mode, repeat) for mode in config.modes for repeat in range(config.repeat)]
    logger.info(f"Starting benchmark {config.name}: {len(jobs)} runs on {workers} workers")
    semaphore = asyncio.Semaphore(workers)

    async def _job(mode: ProximalMode, repeat: int) -> RunRecord:
        async with semaphore:
            return await asyncio.to_thread(run_single, config, mode, repeat, output_dir)

    results = await asyncio.gather(*(_job(mode, repeat) for mode, repeat in jobs), return_exceptions=True)

    # Convert exceptions to failed records
    records: List[RunRecord] = []
    for (mode, repeat), result in zip(jobs, results):
        if isinstance(result, Exception):
            log_error(logger, result, f"Run {config.name}/{mode.value}/{repeat}")
            records.append(RunRecord(experiment=config.name, mode=mode, repeat=repeat, error=str(result)))
        else:
            records.append(result)
    records.sort(key=_sort_key)

    aggregate = aggregate_records(records)
    write_json(output_dir / "runs.json", [r.model_dump(mode='json') for r in records])
    write_json(output_dir / "aggregate.json", {'experiment': config.model_dump(mode='json'), 'modes': aggregate})

    successful = sum(1 for r in records if r.ok)
    logger.info(f"Benchmark {config.name} completed: {successful}/{len(records)} successful")
    return BenchmarkResult(records=records, aggregate=aggregate, output_dir=output_dir)


def write_json(path: Path, payload: Any) -> Path:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path

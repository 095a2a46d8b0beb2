#!/usr/bin/env python3
"""
Run every bundled benchmark experiment.

Runs each JSON file under config/benchmark/ and prints the per-mode medians.
Outputs go to $LROTA_OUTPUT_DIR/<experiment name>/.

Usage:
    python scripts/run_benchmarks.py [--workers 8] [--repeat 5]
"""

import argparse
import asyncio
import sys
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from modules.harness.benchmark import run_benchmark
from modules.harness.experiment import ExperimentConfig
from shared.utils.config import PROJECT_ROOT
from shared.utils.logger import setup_logger

logger = setup_logger(__name__)

BENCHMARK_DIR = PROJECT_ROOT / "config" / "benchmark"


async def run_all(workers: int, repeat: int) -> bool:
    """Run the experiments one after another; repeats inside each run concurrently."""
    ok = True
    for path in sorted(BENCHMARK_DIR.glob("*.json")):
        config = ExperimentConfig.from_file(path)
        if repeat:
            config = config.model_copy(update={'repeat': repeat})
        logger.info(f"Running {path.name} ({config.repeat} repeats x {len(config.modes)} modes)")

        result = await run_benchmark(config, workers=workers)
        print(f"\n{config.name}  ->  {result.output_dir}")
        for mode, stats in result.aggregate.items():
            print(
                f"  {mode:8s} runs={stats['runs']:3d} tolerance={stats['tolerance_runs']:3d} "
                f"median_sweeps={stats['median_sweeps']} median_rho={stats['median_rho']} "
                f"truncation={stats['truncation_frequency']}"
            )
        if result.failed:
            logger.error(f"{config.name}: {len(result.failed)} runs failed")
            ok = False
    return ok


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.strip().splitlines()[0])
    parser.add_argument("--workers", type=int, default=4)
    parser.add_argument("--repeat", type=int, default=0, help="override each experiment's repeat count")
    args = parser.parse_args()
    return 0 if asyncio.run(run_all(args.workers, args.repeat)) else 1


if __name__ == "__main__":
    sys.exit(main())

"""
Command-line front end.

    python -m modules.harness generate  --kind odeco_exact --dims 4 4 4 --true-rank 2 --out data/
    python -m modules.harness decompose --input data/tensor.txt --rank 2 --out results/
    python -m modules.harness verify    [--only polar-error-bound] [--config suite.yaml]
    python -m modules.harness benchmark --config config/benchmark/gaussian_5x5x5.json

Exit codes: 0 success (decompose: tolerance reached), 2 decompose stopped at
max_sweeps, 1 on any error or failed verification.
"""

import argparse
import asyncio
import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import ValidationError

from modules.diagnostics import kkt_residual
from modules.harness.benchmark import run_benchmark, write_json
from modules.harness.experiment import ExperimentConfig, audit_solution
from modules.harness.generators import GeneratorKind, GeneratorSpec, generate_tensor
from modules.harness.trace_export import write_trace_csv
from modules.harness.verification import VerificationEngine
from modules.solver import InitStrategy, ProximalMode, SolverConfig, TerminationReason, run
from modules.tensor_core import DenseTensor, norm, read_tensor, write_matrices, write_tensor
from shared.core.exceptions import LrotaException
from shared.utils.config import settings
from shared.utils.logger import log_error, set_log_level, setup_logger

logger = setup_logger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_MAX_SWEEPS = 2


def _print_json(payload: Any) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True))


def _out_dir(args: argparse.Namespace) -> Path:
    path = Path(args.out) if args.out else settings.output_path
    path.mkdir(parents=True, exist_ok=True)
    return path


def _solver_config(args: argparse.Namespace) -> SolverConfig:
    overrides: Dict[str, Any] = {
        'epsilon': args.epsilon,
        'kappa': args.kappa,
        'tau': args.tau,
        'proximal_mode': args.mode,
        'max_sweeps': args.max_sweeps,
        'step_tol': args.step_tol,
        'kkt_tol': args.kkt_tol,
        'init': args.init,
        'seed': args.seed,
    }
    if args.no_truncation:
        overrides['truncation_enabled'] = False
    return SolverConfig.model_validate({k: v for k, v in overrides.items() if v is not None})


def cmd_generate(args: argparse.Namespace) -> int:
    """Write a generated tensor, and its ground truth for odeco kinds."""
    spec = GeneratorSpec(
        kind=args.kind,
        dims=args.dims,
        true_rank=args.true_rank,
        noise=args.noise,
        seed=args.seed or 0,
        lambdas=args.lambdas,
    )
    generated = generate_tensor(spec)
    out = _out_dir(args)
    written = {'tensor': str(write_tensor(out / "tensor.txt", generated.tensor))}
    if generated.truth is not None:
        written['truth_factors'] = str(write_matrices(out / "truth_factors.txt", generated.truth.factors.matrices()))
        written['truth_lambda'] = str(write_tensor(out / "truth_lambda.txt", DenseTensor(generated.truth.lam)))
    _print_json({'spec': spec.model_dump(mode='json'), 'norm': norm(generated.tensor), 'files': written})
    return EXIT_OK


def cmd_decompose(args: argparse.Namespace) -> int:
    """Solve one tensor file; write factors, lambda and the sweep trace."""
    A = read_tensor(args.input)
    config = _solver_config(args)
    sol = run(A, args.rank, config)

    out = _out_dir(args)
    write_matrices(out / "factors.txt", sol.factors.matrices())
    write_tensor(out / "lambda.txt", DenseTensor(sol.lam))
    write_trace_csv(sol.trace, out / "trace.csv")

    summary = sol.to_summary()
    _print_json(summary)

    if args.json_report:
        verdicts, details = audit_solution(A, sol)
        write_json(Path(args.json_report), {
            'input': str(args.input),
            'rank': args.rank,
            'parameters': sol.trace.params.to_dict(),
            'summary': summary,
            'kkt': kkt_residual(A, sol.factors).to_dict(),
            'verdicts': verdicts,
            'audits': details,
        })
    return EXIT_OK if sol.termination_reason is TerminationReason.TOLERANCE else EXIT_MAX_SWEEPS


def cmd_verify(args: argparse.Namespace) -> int:
    """Run the verification battery; exit 0 iff every check passes."""
    engine = VerificationEngine(args.config, seed=args.seed)
    report = engine.run(only=args.only)

    report_path = Path(args.json_report) if args.json_report else _out_dir(args) / "verification_report.json"
    report_path.parent.mkdir(parents=True, exist_ok=True)
    write_json(report_path, report.to_dict())

    for result in report.results:
        status = "PASS" if result.passed else "FAIL"
        print(f"{status}  {result.check_name}: {result.message}")
    print(f"{report.passed_checks}/{report.total_checks} checks passed; report: {report_path}")
    if not report.passed:
        print(f"Failed checks: {', '.join(report.failed_names)}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK


def cmd_benchmark(args: argparse.Namespace) -> int:
    """Run an experiment file; exit 1 if any run raised."""
    config = ExperimentConfig.from_file(args.config)
    out = Path(args.out) if args.out else None
    result = asyncio.run(run_benchmark(config, out, args.workers))
    _print_json({'output_dir': str(result.output_dir), 'modes': result.aggregate})
    if result.failed:
        print(f"{len(result.failed)} runs failed", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK


def _add_solver_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--epsilon", type=float, help="proximal threshold (default 1e-4 max(1, ||A||^2))")
    parser.add_argument("--kappa", type=float, help=(
        "truncation threshold (default 0.5 sqrt(f0 / r)); the default can remove true "
        "components whose |lambda| is small next to the others, see the default-kappa check"
    ))
    parser.add_argument("--tau", type=float, help="revised-step threshold (default 10 epsilon)")
    parser.add_argument("--mode", choices=[m.value for m in ProximalMode], help="proximal correction")
    parser.add_argument("--max-sweeps", type=int)
    parser.add_argument("--step-tol", type=float)
    parser.add_argument("--kkt-tol", type=float)
    parser.add_argument("--init", choices=[s.value for s in InitStrategy])
    parser.add_argument("--no-truncation", action="store_true", help="never remove columns")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lrota",
        description="Low-rank orthogonal tensor approximation by alternating polar decompositions",
    )
    parser.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"],
                        help="override LROTA_LOG_LEVEL for this run")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a seeded test tensor")
    gen.add_argument("--kind", required=True, choices=[k.value for k in GeneratorKind])
    gen.add_argument("--dims", required=True, type=int, nargs="+")
    gen.add_argument("--true-rank", type=int)
    gen.add_argument("--noise", type=float, default=0.0)
    gen.add_argument("--lambdas", type=float, nargs="+")
    gen.add_argument("--seed", type=int)
    gen.add_argument("--out", help="output directory (default: $LROTA_OUTPUT_DIR)")
    gen.set_defaults(handler=cmd_generate)

    dec = sub.add_parser("decompose", help="approximate a tensor file")
    dec.add_argument("--input", required=True)
    dec.add_argument("--rank", required=True, type=int)
    _add_solver_arguments(dec)
    dec.add_argument("--seed", type=int, help="seed for random initialization")
    dec.add_argument("--out")
    dec.add_argument("--json-report", help="write summary, KKT report and audits as JSON")
    dec.set_defaults(handler=cmd_decompose)

    ver = sub.add_parser("verify", help="run the verification battery")
    ver.add_argument("--only", action="append", metavar="CHECK", help="run only this check (repeatable)")
    ver.add_argument("--config", help="suite YAML (default config/verification/suites.yaml)")
    ver.add_argument("--seed", type=int, help="override the suite seed")
    ver.add_argument("--out")
    ver.add_argument("--json-report")
    ver.set_defaults(handler=cmd_verify)

    bench = sub.add_parser("benchmark", help="run an experiment file")
    bench.add_argument("--config", required=True, help="experiment JSON")
    bench.add_argument("--out")
    bench.add_argument("--workers", type=int)
    bench.set_defaults(handler=cmd_benchmark)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.log_level:
        set_log_level(args.log_level)
    try:
        return args.handler(args)
    except (LrotaException, OSError, ValidationError) as e:
        log_error(logger, e, f"{args.command} failed")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

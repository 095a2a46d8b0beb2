"""
Harness module.

Seeded tensor generation, experiment execution with audits, trace export, the
verification battery and the command-line front end (`python -m modules.harness`).
"""

from modules.harness.experiment import ExperimentConfig, RunRecord, audit_solution, run_single
from modules.harness.generators import (
    GeneratedTensor,
    GeneratorKind,
    GeneratorSpec,
    GroundTruth,
    generate_tensor,
)
from modules.harness.trace_export import trace_frame, write_trace_csv

__all__ = [
    'GeneratorKind',
    'GeneratorSpec',
    'GeneratedTensor',
    'GroundTruth',
    'generate_tensor',
    'ExperimentConfig',
    'RunRecord',
    'audit_solution',
    'run_single',
    'trace_frame',
    'write_trace_csv',
]

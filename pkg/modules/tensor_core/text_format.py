"""
Plain-text tensor and matrix formats.

Tensor file:
    line 1: k n_1 ... n_k
    then prod(n_i) whitespace-separated decimal floats in row-major order.

Matrix file (one or more blocks):
    MATRIX n m
    then n*m floats, row by row.

Floats are printed with repr(), the shortest string that round-trips exactly.
"""

from pathlib import Path
from typing import List, Sequence, Union

import numpy as np

from modules.tensor_core.dense_tensor import DenseTensor
from shared.core.exceptions import TensorFormatError
from shared.utils.logger import setup_logger

logger = setup_logger(__name__)

PathLike = Union[str, Path]
MATRIX_HEADER = "MATRIX"


def _fmt(values: np.ndarray) -> str:
    return " ".join(repr(float(v)) for v in values)


def _parse_floats(tokens: Sequence[str], where: str) -> np.ndarray:
    try:
        return np.array([float(t) for t in tokens], dtype=np.float64)
    except ValueError as e:
        raise TensorFormatError(f"Invalid number in {where}: {e}") from e


def _parse_ints(tokens: Sequence[str], where: str) -> List[int]:
    try:
        values = [int(t) for t in tokens]
    except ValueError as e:
        raise TensorFormatError(f"Invalid integer in {where}: {e}") from e
    if any(v < 0 for v in values):
        raise TensorFormatError(f"Negative size in {where}: {values}")
    return values


def format_tensor(A: DenseTensor) -> str:
    """Serialize a tensor; one output line per fibre of the last mode."""
    header = " ".join(str(n) for n in (A.order,) + A.dims)
    rows = A.array.reshape(-1, A.dims[-1])
    return "\n".join([header] + [_fmt(row) for row in rows]) + "\n"


def parse_tensor(text: str) -> DenseTensor:
    """
    Parse the tensor text format.

    Raises:
        TensorFormatError: On a malformed header or wrong entry count
    """
    lines = text.strip().splitlines()
    if not lines:
        raise TensorFormatError("Empty tensor file")
    header = _parse_ints(lines[0].split(), "tensor header")
    if len(header) < 2 or header[0] != len(header) - 1:
        raise TensorFormatError(f"Tensor header must be 'k n_1 ... n_k', got: {lines[0]!r}")
    dims = tuple(header[1:])
    if any(n < 1 for n in dims):
        raise TensorFormatError(f"Tensor dimensions must be positive, got {dims}")
    values = _parse_floats(" ".join(lines[1:]).split(), "tensor body")
    expected = int(np.prod(dims))
    if values.size != expected:
        raise TensorFormatError(f"Expected {expected} entries for dims {dims}, found {values.size}")
    return DenseTensor.from_flat(dims, values)


def format_matrix(M: np.ndarray) -> str:
    """Serialize one matrix block."""
    M = np.atleast_2d(np.asarray(M, dtype=np.float64))
    n, m = M.shape
    return "\n".join([f"{MATRIX_HEADER} {n} {m}"] + [_fmt(row) for row in M]) + "\n"


def parse_matrices(text: str) -> List[np.ndarray]:
    """
    Parse a file holding one or more MATRIX blocks.

    Raises:
        TensorFormatError: On a missing header or wrong entry count
    """
    tokens = text.split()
    matrices: List[np.ndarray] = []
    pos = 0
    while pos < len(tokens):
        if tokens[pos] != MATRIX_HEADER or pos + 2 >= len(tokens):
            raise TensorFormatError(f"Expected '{MATRIX_HEADER} n m' header at token {pos}")
        n, m = _parse_ints(tokens[pos + 1:pos + 3], "matrix header")
        start = pos + 3
        body = tokens[start:start + n * m]
        if len(body) != n * m or MATRIX_HEADER in body:
            raise TensorFormatError(f"Matrix block {len(matrices)} needs {n * m} entries")
        matrices.append(_parse_floats(body, "matrix body").reshape(n, m))
        pos = start + n * m
    if not matrices:
        raise TensorFormatError("No matrix blocks found")
    return matrices


def write_tensor(path: PathLike, A: DenseTensor) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_tensor(A))
    logger.debug(f"Wrote tensor {A.dims} to {path}")
    return path


def read_tensor(path: PathLike) -> DenseTensor:
    """
    Read a tensor file.

    Raises:
        TensorFormatError: If the file is missing or malformed
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise TensorFormatError(f"Cannot read tensor file {path}: {e}") from e
    return parse_tensor(text)


def write_matrices(path: PathLike, matrices: Sequence[np.ndarray]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(format_matrix(M) for M in matrices))
    return path


def read_matrices(path: PathLike) -> List[np.ndarray]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise TensorFormatError(f"Cannot read matrix file {path}: {e}") from e
    return parse_matrices(text)

"""
Dense tensor and block vector types.

A DenseTensor stores a k-way float64 array in row-major order (last index varies
fastest). The underlying array is flagged read-only after construction, so
tensors can be shared freely between threads.
"""

from dataclasses import dataclass
from typing import Iterator, Sequence, Tuple

import numpy as np

from shared.core.exceptions import DimensionMismatchError


@dataclass(frozen=True, eq=False)
class DenseTensor:
    """
    Dense real tensor of dimension n_1 x ... x n_k.

    Use DenseTensor(array) for an ndarray, or DenseTensor.from_flat(dims, data)
    for a flat row-major buffer.
    """
    array: np.ndarray

    def __post_init__(self):
        arr = np.array(self.array, dtype=np.float64, order="C", copy=True)
        if arr.ndim < 1:
            raise DimensionMismatchError("A tensor needs at least one mode (k >= 1)")
        if any(n < 1 for n in arr.shape):
            raise DimensionMismatchError(f"All dimensions must be positive, got {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "array", arr)

    @classmethod
    def from_flat(cls, dims: Sequence[int], data: Sequence[float]) -> "DenseTensor":
        """
        Build a tensor from dims and a flat row-major buffer.

        Raises:
            DimensionMismatchError: If len(data) != prod(dims)
        """
        dims = tuple(int(n) for n in dims)
        flat = np.asarray(data, dtype=np.float64).ravel()
        expected = int(np.prod(dims)) if dims else 0
        if not dims or flat.size != expected:
            raise DimensionMismatchError(
                f"Data length {flat.size} does not match dims {dims} (expected {expected})"
            )
        return cls(flat.reshape(dims))

    @classmethod
    def zeros(cls, dims: Sequence[int]) -> "DenseTensor":
        """Zero tensor of the given dims."""
        return cls(np.zeros(tuple(int(n) for n in dims)))

    @property
    def dims(self) -> Tuple[int, ...]:
        return tuple(self.array.shape)

    @property
    def order(self) -> int:
        """Number of modes k."""
        return self.array.ndim

    @property
    def data(self) -> np.ndarray:
        """Flat row-major view of the entries."""
        return self.array.reshape(-1)

    @property
    def size(self) -> int:
        return int(self.array.size)

    def __add__(self, other: "DenseTensor") -> "DenseTensor":
        if not isinstance(other, DenseTensor):
            return NotImplemented
        if self.dims != other.dims:
            raise DimensionMismatchError(f"Cannot add tensors of dims {self.dims} and {other.dims}")
        return DenseTensor(self.array + other.array)

    def __sub__(self, other: "DenseTensor") -> "DenseTensor":
        if not isinstance(other, DenseTensor):
            return NotImplemented
        if self.dims != other.dims:
            raise DimensionMismatchError(f"Cannot subtract tensors of dims {self.dims} and {other.dims}")
        return DenseTensor(self.array - other.array)

    def scaled(self, alpha: float) -> "DenseTensor":
        """Return alpha * self."""
        return DenseTensor(float(alpha) * self.array)

    def __repr__(self) -> str:
        return f"DenseTensor(dims={self.dims})"


@dataclass(frozen=True, eq=False)
class BlockVector:
    """
    Block vector x = (x_1, ..., x_k) with x_i in R^{n_i}.

    Unit-norm requirements are checked where the vector is used, not here.
    """
    parts: Tuple[np.ndarray, ...]

    def __post_init__(self):
        parts = tuple(np.array(p, dtype=np.float64).reshape(-1) for p in self.parts)
        for p in parts:
            p.setflags(write=False)
        object.__setattr__(self, "parts", parts)

    @classmethod
    def of(cls, *parts: Sequence[float]) -> "BlockVector":
        return cls(tuple(np.asarray(p, dtype=np.float64) for p in parts))

    @property
    def dims(self) -> Tuple[int, ...]:
        return tuple(p.size for p in self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self) -> Iterator[np.ndarray]:
        return iter(self.parts)

    def __getitem__(self, i: int) -> np.ndarray:
        return self.parts[i]

    def replace(self, i: int, y: Sequence[float]) -> "BlockVector":
        """Return a copy with part i replaced by y."""
        parts = list(self.parts)
        parts[i] = np.asarray(y, dtype=np.float64)
        return BlockVector(tuple(parts))

    def check_dims(self, dims: Sequence[int]) -> None:
        """
        Raise if part lengths do not match dims.

        Raises:
            DimensionMismatchError
        """
        if self.dims != tuple(dims):
            raise DimensionMismatchError(f"Block vector dims {self.dims} do not match {tuple(dims)}")

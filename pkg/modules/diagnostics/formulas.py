"""
Closed-form quantities: manifold dimension, truncation safety, the Lojasiewicz
exponent and the equal-dimension rank bound.

Exact arithmetic goes through fractions.Fraction; floats are derived last.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Tuple

from shared.core.exceptions import DimensionMismatchError


def _check_dims(dims: Sequence[int]) -> Tuple[int, ...]:
    dims = tuple(int(n) for n in dims)
    if not dims or any(n < 1 for n in dims):
        raise DimensionMismatchError(f"Dimensions must be positive integers, got {dims}")
    return dims


def manifold_dim(dims: Sequence[int], r: int) -> int:
    """
    Dimension d_{n,r} = r [sum n_i - k(r+1)/2 + 1] of the set of rank-r
    orthogonally decomposable tensors.

    Raises:
        DimensionMismatchError: If r < 0 or r > min n_i
    """
    dims = _check_dims(dims)
    if not 0 <= r <= min(dims):
        raise DimensionMismatchError(f"Rank {r} must lie in [0, {min(dims)}]")
    value = r * (sum(dims) - Fraction(len(dims) * (r + 1), 2) + 1)
    assert value.denominator == 1, f"d_(n,r) not integral: {value}"
    return int(value)


def truncation_safe(dims: Sequence[int], r: int) -> bool:
    """
    d_{n,r-1} < prod (n_i - r + 1).

    When this holds, a generic local minimizer of the rank-r problem has full rank r.
    """
    dims = _check_dims(dims)
    if not 1 <= r <= min(dims):
        raise DimensionMismatchError(f"Rank {r} must lie in [1, {min(dims)}]")
    return manifold_dim(dims, r - 1) < math.prod(n - r + 1 for n in dims)


def sufficient_condition_equal_dims(n: int, k: int, r: int) -> bool:
    """
    2 n^(k-2) / k * alpha^k + alpha^2 - 1 > 0 with alpha = (n - r + 1) / n.

    Implies truncation_safe((n,) * k, r).
    """
    if not 1 <= r <= n or k < 2:
        raise DimensionMismatchError(f"Need 1 <= r <= n and k >= 2, got n={n}, k={k}, r={r}")
    alpha = Fraction(n - r + 1, n)
    return Fraction(2 * n ** (k - 2), k) * alpha ** k + alpha ** 2 - 1 > 0


def max_safe_rank(n: int, k: int) -> float:
    """(1 - (k / (2 n^(k-2)))^(1/k)) n + 1: ranks up to this satisfy the equal-dimension condition."""
    if n < 1 or k < 2:
        raise DimensionMismatchError(f"Need n >= 1 and k >= 2, got n={n}, k={k}")
    return (1.0 - (k / (2.0 * n ** (k - 2))) ** (1.0 / k)) * n + 1.0


@dataclass(frozen=True)
class LojasiewiczExponent:
    """tau = 1 - 1 / (base * ratio^power) with base = 2k, ratio = 6k - 3, power = N - 1."""
    N: int
    base: int
    ratio: int
    power: int

    @property
    def exact(self) -> Fraction:
        return 1 - Fraction(1, self.base * self.ratio ** self.power)

    @property
    def tau(self) -> float:
        return float(self.exact)

    @property
    def triple(self) -> Tuple[int, int, int]:
        return (self.base, self.ratio, self.power)


def lojasiewicz_exponent(dims: Sequence[int], r: int) -> LojasiewiczExponent:
    """
    Exponent of the gradient inequality for the rank-r objective.

    N = sum_i (r n_i + r(r+1)/2) variables.

    Raises:
        DimensionMismatchError: If r < 1
    """
    dims = _check_dims(dims)
    if r < 1:
        raise DimensionMismatchError(f"Rank must be at least 1, got {r}")
    k = len(dims)
    N = sum(r * n + r * (r + 1) // 2 for n in dims)
    return LojasiewiczExponent(N=N, base=2 * k, ratio=6 * k - 3, power=N - 1)

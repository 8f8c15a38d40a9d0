"""Quadratic pseudo-Boolean functions over {0,1}^n.

A function is stored as ``x -> x^T A x + b^T x + c`` with ``A`` symmetric and
zero on the diagonal, so an interaction ``x_i x_j`` with coefficient ``a``
appears as ``A[i, j] = A[j, i] = a / 2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, NamedTuple, Tuple, Union

import numpy as np

#: Largest dimension accepted by the enumeration oracle.
MAX_BRUTE_FORCE_DIM = 24

_CHUNK = 1 << 16


class BudgetExceededError(ValueError):
    """Raised when exhaustive enumeration would exceed its size budget."""


def as_bits(x, n: int | None = None) -> np.ndarray:
    """Validate ``x`` as a binary vector and return it as an int8 array."""
    arr = np.asarray(x)
    if arr.ndim != 1:
        raise ValueError(f"expected a 1-d binary vector, got shape {arr.shape}")
    if n is not None and arr.shape[0] != n:
        raise ValueError(f"dimension mismatch: expected {n} bits, got {arr.shape[0]}")
    if not np.all((arr == 0) | (arr == 1)):
        raise ValueError("binary vector entries must be 0 or 1")
    return arr.astype(np.int8)


def all_bits(n: int) -> np.ndarray:
    """All 2^n binary vectors as rows, in lexicographic order (x_1 most significant)."""
    codes = np.arange(1 << n, dtype=np.int64)
    return codes_to_bits(codes, n)


def codes_to_bits(codes: np.ndarray, n: int) -> np.ndarray:
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((codes[:, None] >> shifts[None, :]) & 1).astype(np.int8)


def bitstring(x) -> str:
    return "".join("1" if v else "0" for v in np.asarray(x))


@dataclass(frozen=True, eq=False)
class QuadraticPBF:
    """Immutable quadratic pseudo-Boolean function ``x^T A x + b^T x + c``.

    Any input matrix is accepted: it is symmetrized (which leaves ``x^T A x``
    unchanged) and its diagonal is folded into ``b`` because ``x_i^2 = x_i``.
    """

    A: np.ndarray
    b: np.ndarray
    c: float = 0.0

    def __post_init__(self):
        A = np.array(self.A, dtype=np.float64)
        b = np.array(self.b, dtype=np.float64).reshape(-1)
        n = b.shape[0]
        if A.shape != (n, n):
            raise ValueError(f"A must be {n}x{n}, got {A.shape}")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b)) and np.isfinite(self.c)):
            raise ValueError("coefficients must be finite")
        b = b + np.diag(A)
        A = 0.5 * (A + A.T)
        np.fill_diagonal(A, 0.0)
        A.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", float(self.c))

    @property
    def dimension(self) -> int:
        return self.b.shape[0]

    @classmethod
    def zero(cls, n: int) -> "QuadraticPBF":
        return cls(np.zeros((n, n)), np.zeros(n), 0.0)

    def __add__(self, other: "QuadraticPBF") -> "QuadraticPBF":
        if other.dimension != self.dimension:
            raise ValueError("dimension mismatch")
        return QuadraticPBF(self.A + other.A, self.b + other.b, self.c + other.c)

    def __call__(self, x) -> float:
        return evaluate(self, x)

    def evaluate_many(self, X: np.ndarray) -> np.ndarray:
        """Evaluate on each row of a (k, n) 0/1 matrix."""
        X = np.asarray(X, dtype=np.float64)
        return np.einsum("ki,ki->k", X @ self.A, X) + X @ self.b + self.c


class SignSplit(NamedTuple):
    a_plus: np.ndarray
    a_minus: np.ndarray


def evaluate(f: QuadraticPBF, x) -> float:
    """Return ``x^T A x + b^T x + c``."""
    bits = as_bits(x, f.dimension).astype(bool)
    sub = f.A[np.ix_(bits, bits)]
    return float(sub.sum() + f.b[bits].sum() + f.c)


def from_alpha(
    alpha0: float,
    alpha_lin,
    alpha_quad: Mapping[Tuple[int, int], float],
    lambda_reg: float = 0.0,
) -> QuadraticPBF:
    """Build the acquisition quadratic from second-order model coefficients.

    The result equals ``alpha0 + sum_j (alpha_j + lambda_reg) x_j
    + sum_{i<j} alpha_ij x_i x_j``.
    """
    if lambda_reg < 0:
        raise ValueError("lambda_reg must be non-negative")
    b = np.asarray(alpha_lin, dtype=np.float64).reshape(-1) + lambda_reg
    n = b.shape[0]
    A = np.zeros((n, n))
    seen = set()
    for (i, j), a in alpha_quad.items():
        i, j = int(i), int(j)
        if not 0 <= i < j < n:
            raise ValueError(f"pair index ({i}, {j}) must satisfy 0 <= i < j < {n}")
        if (i, j) in seen:
            raise ValueError(f"duplicate pair index ({i}, {j})")
        seen.add((i, j))
        A[i, j] = A[j, i] = 0.5 * a
    return QuadraticPBF(A, b, alpha0)


def sign_split(f: Union[QuadraticPBF, np.ndarray]) -> SignSplit:
    """Split the interaction matrix into strictly positive and non-positive parts."""
    A = f.A if isinstance(f, QuadraticPBF) else np.asarray(f, dtype=np.float64)
    positive = A > 0
    return SignSplit(np.where(positive, A, 0.0), np.where(positive, 0.0, A))


def brute_force_minimize(f: QuadraticPBF) -> Tuple[np.ndarray, float]:
    """Exhaustive minimization; ties go to the lexicographically smallest x."""
    n = f.dimension
    if n > MAX_BRUTE_FORCE_DIM:
        raise BudgetExceededError(
            f"dimension {n} exceeds enumeration budget {MAX_BRUTE_FORCE_DIM}"
        )
    best_code, best_val = 0, np.inf
    total = 1 << n
    for start in range(0, total, _CHUNK):
        codes = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        vals = f.evaluate_many(codes_to_bits(codes, n))
        k = int(np.argmin(vals))
        if vals[k] < best_val:
            best_code, best_val = int(codes[k]), float(vals[k])
    x = codes_to_bits(np.array([best_code]), n)[0]
    return x, evaluate(f, x)

"""
Dense real linear algebra for the GLM and Fredholm solvers.

Thin layer over LAPACK's partially pivoted LU (scipy.linalg.lu_factor) that
adds the pieces the solvers need: exact-singularity reporting with the pivot
index, the sign parity of the row permutation, row-vector solves G A = P,
determinants as signed pivot products, and the scaled Frobenius norm used by
the error harness.

Matrices are plain 2-D float64 numpy arrays.
"""

import warnings
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import scipy.linalg


class LinearAlgebraError(ValueError):
    """Base class for failures in this module."""

    pass


class ShapeError(LinearAlgebraError):
    """Raised when operands are not square or do not conform."""

    pass


class NonFiniteMatrixError(LinearAlgebraError):
    """Raised when a matrix contains inf or nan entries."""

    pass


class SingularMatrixError(LinearAlgebraError):
    """
    Raised when a solve hits an exactly zero pivot.

    Attributes:
        pivot_index: Zero-based index of the first zero pivot
    """

    def __init__(self, pivot_index: int):
        self.pivot_index = pivot_index
        super().__init__(f"Matrix is singular: zero pivot at index {pivot_index}")


@dataclass(frozen=True)
class LUFactors:
    """
    Packed LU factors with partial pivoting, PA = LU.

    Attributes:
        lu: Unit lower triangle (below the diagonal) and U packed together
        piv: LAPACK pivot indices, row i was swapped with row piv[i]
        parity: Sign of the row permutation, +1 or -1
        zero_pivot: Index of the first exactly zero pivot, None if nonsingular
    """

    lu: np.ndarray
    piv: np.ndarray
    parity: int
    zero_pivot: Optional[int] = None

    @property
    def singular(self) -> bool:
        return self.zero_pivot is not None

    def permutation(self) -> np.ndarray:
        """Row order perm such that A[perm] = L @ U."""
        perm = np.arange(len(self.piv))
        for i, p in enumerate(self.piv):
            perm[i], perm[p] = perm[p], perm[i]
        return perm

    def unpack(self) -> Tuple[np.ndarray, np.ndarray]:
        """Return (L, U) as separate dense matrices."""
        lower = np.tril(self.lu, k=-1) + np.eye(self.lu.shape[0])
        upper = np.triu(self.lu)
        return lower, upper


def as_matrix(A, square: bool = True) -> np.ndarray:
    """
    Validate and convert input to a 2-D float64 array.

    Raises:
        ShapeError: If A is not 2-D, or not square when square is set
        NonFiniteMatrixError: If any entry is inf or nan
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise ShapeError(f"Expected a matrix, got an array with {A.ndim} dims")
    if square and A.shape[0] != A.shape[1]:
        raise ShapeError(f"Expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise NonFiniteMatrixError("Matrix has non-finite entries")
    return A


def lu_factor(A) -> LUFactors:
    """
    Factor a square matrix as PA = LU with partial pivoting.

    A singular matrix is not an error here; the first zero pivot is recorded
    in the result instead.
    """
    A = as_matrix(A)
    with warnings.catch_warnings():
        # LAPACK reports exact singularity through a warning; zero_pivot carries it
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(A, check_finite=False)
    swaps = int(np.count_nonzero(piv != np.arange(len(piv))))
    zeros = np.flatnonzero(np.diag(lu) == 0.0)
    return LUFactors(
        lu=lu,
        piv=piv,
        parity=-1 if swaps % 2 else 1,
        zero_pivot=int(zeros[0]) if zeros.size else None,
    )


def solve_row_system(rhs, A) -> np.ndarray:
    """
    Solve the row-vector system G A = rhs for G.

    Factors A^T and solves A^T G^T = rhs^T.

    Args:
        rhs: Right-hand side row of length n
        A: (n, n) system matrix

    Returns:
        The row G of length n

    Raises:
        ShapeError: If A is not square or rhs has the wrong length
        SingularMatrixError: If A is exactly singular
    """
    A = as_matrix(A)
    rhs = np.asarray(rhs, dtype=float)
    if rhs.shape != (A.shape[0],):
        raise ShapeError(
            f"Right-hand side of length {rhs.shape} does not match {A.shape}"
        )
    factors = lu_factor(A.T)
    if factors.singular:
        raise SingularMatrixError(factors.zero_pivot)  # type: ignore[arg-type]
    return scipy.linalg.lu_solve((factors.lu, factors.piv), rhs, check_finite=False)


def determinant(A) -> float:
    """Determinant as parity times the product of the U pivots (0 if singular)."""
    factors = lu_factor(A)
    if factors.singular:
        return 0.0
    return float(factors.parity * np.prod(np.diag(factors.lu)))


def scaled_frobenius(A, scale: float = 1.0) -> float:
    """Return scale * sqrt(sum of squared entries)."""
    if not scale > 0:
        raise ValueError(f"Scale must be positive, got {scale}")
    return float(scale * np.linalg.norm(np.asarray(A, dtype=float)))

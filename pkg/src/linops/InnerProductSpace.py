import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Callable

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sps
import scipy.sparse.linalg as spla

from errors import InvalidSpaceError
from .utils import (
    DENSE_LIMIT,
    Matrix,
    as_matrix,
    count_nonzero,
    dense,
    diagonal_matrix,
    is_sparse,
    matrices_equal,
    max_abs,
    scale_rows,
)

logger = logging.getLogger(__name__)

SYMMETRY_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class InnerProductSpace:
    """
    Finite-dimensional real Hilbert space R^n with <x, y> = x^T G y.

    Args:
        dim: Number of coordinates
        gram: Symmetric positive definite weight matrix, dense or sparse
        label: Optional name used in log and error messages
    """

    dim: int
    gram: Matrix
    label: str = ""

    def __post_init__(self) -> None:
        if self.dim < 0:
            raise InvalidSpaceError(f"negative dimension {self.dim}", space=self.label)
        try:
            gram = as_matrix(self.gram)
        except ValueError as e:
            raise InvalidSpaceError(str(e), space=self.label) from e
        object.__setattr__(self, "gram", gram)
        if gram.shape != (self.dim, self.dim):
            raise InvalidSpaceError(
                f"gram has shape {gram.shape}, expected {(self.dim, self.dim)}",
                space=self.label,
            )
        if self.dim:
            self._check_symmetric()
            self._check_positive_definite()

    @classmethod
    def identity(cls, dim: int, label: str = "") -> "InnerProductSpace":
        return cls(dim, sps.identity(dim, format="csr"), label)

    @classmethod
    def weighted(cls, weights: np.ndarray, label: str = "") -> "InnerProductSpace":
        """Space with a diagonal gram built from positive weights"""
        weights = np.asarray(weights, dtype=np.float64)
        return cls(weights.size, diagonal_matrix(weights), label)

    def __str__(self) -> str:
        return f"{self.label or 'space'}(dim={self.dim})"

    def _check_symmetric(self) -> None:
        asymmetry = max_abs(self.gram - self.gram.T)
        if asymmetry > SYMMETRY_RTOL * max_abs(self.gram):
            raise InvalidSpaceError(
                "gram is not symmetric", space=self.label, asymmetry=asymmetry
            )

    def _check_positive_definite(self) -> None:
        diagonal = self.diagonal
        if np.any(diagonal <= 0):
            raise InvalidSpaceError("gram has a non-positive diagonal entry", space=self.label)
        if self.is_diagonal:
            return
        off_diagonal = np.asarray(abs(self.gram).sum(axis=1)).ravel() - diagonal
        if np.all(diagonal > off_diagonal):
            return
        if self.dim <= DENSE_LIMIT:
            smallest = float(sla.eigvalsh(dense(self.gram), subset_by_index=[0, 0])[0])
        else:
            smallest = float(spla.eigsh(self.gram, k=1, which="SA", return_eigenvectors=False)[0])
        if smallest <= 0:
            raise InvalidSpaceError(
                "gram is not positive definite", space=self.label, smallest=smallest
            )

    @cached_property
    def diagonal(self) -> np.ndarray:
        if is_sparse(self.gram):
            return np.asarray(self.gram.diagonal(), dtype=np.float64)
        return np.diag(self.gram).astype(np.float64)

    @cached_property
    def is_diagonal(self) -> bool:
        if is_sparse(self.gram):
            rest = self.gram - diagonal_matrix(self.gram.diagonal())
        else:
            rest = self.gram - np.diag(np.diag(self.gram))
        return count_nonzero(rest) == 0

    @cached_property
    def _cholesky(self) -> np.ndarray:
        # Lower factor, G = L L^T.
        logger.debug(f"Factorizing gram of {self} densely")
        return np.asarray(sla.cholesky(dense(self.gram), lower=True))

    @cached_property
    def _sparse_solver(self) -> Callable[[np.ndarray], np.ndarray]:
        return spla.factorized(sps.csc_matrix(self.gram))

    def inner(self, x: np.ndarray, y: np.ndarray) -> float:
        return float(np.asarray(x) @ (self.gram @ np.asarray(y)))

    def norm(self, x: np.ndarray) -> float:
        return float(np.sqrt(max(self.inner(x, x), 0.0)))

    def solve(self, rhs: Any) -> Any:
        """Apply G^{-1} to a vector or to the columns of a (sparse) matrix"""
        if self.is_diagonal:
            inverse = 1.0 / self.diagonal
            if is_sparse(rhs):
                return sps.csr_matrix(diagonal_matrix(inverse) @ rhs)
            return scale_rows(inverse, np.asarray(rhs, dtype=np.float64))
        if is_sparse(self.gram):
            if is_sparse(rhs):
                solved = spla.spsolve(sps.csc_matrix(self.gram), sps.csc_matrix(rhs))
                return sps.csr_matrix(solved.reshape(-1, 1) if solved.ndim == 1 else solved)
            values = np.asarray(rhs, dtype=np.float64)
            if values.ndim == 1:
                return self._sparse_solver(values)
            if not values.shape[1]:
                return values.copy()
            return np.column_stack([self._sparse_solver(c) for c in values.T])
        return sla.cho_solve((self._cholesky, True), dense(rhs))

    def to_orthonormal(self, x: np.ndarray) -> np.ndarray:
        """Coordinates z = L^T x in which the inner product is Euclidean"""
        x = np.asarray(x, dtype=np.float64)
        if self.is_diagonal:
            return scale_rows(np.sqrt(self.diagonal), x)
        return self._cholesky.T @ x

    def from_orthonormal(self, z: np.ndarray) -> np.ndarray:
        """Inverse of to_orthonormal: x = L^{-T} z"""
        z = np.asarray(z, dtype=np.float64)
        if self.is_diagonal:
            return scale_rows(1.0 / np.sqrt(self.diagonal), z)
        return sla.solve_triangular(self._cholesky, z, lower=True, trans="T")

    def whiten_columns(self, matrix: np.ndarray) -> np.ndarray:
        """Right-multiply by L^{-T}, i.e. express a map out of this space in orthonormal coordinates"""
        matrix = np.asarray(matrix, dtype=np.float64)
        if self.is_diagonal:
            return matrix / np.sqrt(self.diagonal)[None, :]
        return sla.solve_triangular(self._cholesky, matrix.T, lower=True).T

    def same_as(self, other: "InnerProductSpace") -> bool:
        if self is other:
            return True
        return self.dim == other.dim and matrices_equal(self.gram, other.gram)


def direct_sum(*spaces: InnerProductSpace, label: str = "") -> InnerProductSpace:
    """Orthogonal direct sum with a block-diagonal gram"""
    if not spaces:
        raise InvalidSpaceError("direct sum of no spaces")
    label = label or " + ".join(s.label or "space" for s in spaces)
    blocks = [sps.csr_matrix(s.gram) for s in spaces if s.dim]
    if not blocks:
        return InnerProductSpace.identity(0, label)
    gram = sps.block_diag(blocks, format="csr")
    return InnerProductSpace(gram.shape[0], gram, label)

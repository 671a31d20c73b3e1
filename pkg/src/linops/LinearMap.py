import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sps
import scipy.sparse.linalg as spla

from errors import DimensionMismatchError, SpaceMismatchError
from .InnerProductSpace import InnerProductSpace, direct_sum
from .utils import (
    DENSE_LIMIT,
    Matrix,
    as_matrix,
    count_nonzero,
    dense,
    diagonal_matrix,
    is_sparse,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class LinearMap:
    """Matrix of a linear map between two inner product spaces"""

    domain: InnerProductSpace
    codomain: InnerProductSpace
    entries: Matrix
    label: str = ""

    def __post_init__(self) -> None:
        entries = as_matrix(self.entries)
        object.__setattr__(self, "entries", entries)
        expected = (self.codomain.dim, self.domain.dim)
        if entries.shape != expected:
            raise DimensionMismatchError(
                f"{self.label or 'map'} has shape {entries.shape}, expected {expected}",
                shape=list(entries.shape),
                expected=list(expected),
            )

    def __str__(self) -> str:
        return f"{self.label or 'map'}: {self.domain} -> {self.codomain}"

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    @property
    def nnz(self) -> int:
        return count_nonzero(self.entries)

    def apply(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape[0] != self.domain.dim:
            raise DimensionMismatchError(
                f"{self.label or 'map'} expects {self.domain.dim} coordinates, got {x.shape[0]}"
            )
        return np.asarray(self.entries @ x)

    def compose(self, inner: "LinearMap") -> "LinearMap":
        """The map self o inner"""
        if not inner.codomain.same_as(self.domain):
            raise SpaceMismatchError(
                f"cannot compose {self} after {inner}: intermediate spaces differ"
            )
        entries = self.entries @ inner.entries
        return LinearMap(inner.domain, self.codomain, entries, f"{self.label}{inner.label}")

    def stack(self, other: "LinearMap") -> "LinearMap":
        """x -> (self x, other x) into the direct sum of both codomains"""
        if not other.domain.same_as(self.domain):
            raise SpaceMismatchError(f"cannot stack {self} and {other}: domains differ")
        entries = sps.vstack(
            [sps.csr_matrix(self.entries), sps.csr_matrix(other.entries)], format="csr"
        )
        codomain = direct_sum(self.codomain, other.codomain)
        return LinearMap(self.domain, codomain, entries, f"({self.label}; {other.label})")

    def weighted_matrix(self) -> np.ndarray:
        """
        Dense matrix of the map between orthonormal coordinates, L_c^T A L_d^{-T}.

        Returned in column-major order for in-place LAPACK factorizations.
        """
        if is_sparse(self.entries) and self.domain.is_diagonal and self.codomain.is_diagonal:
            whitened = (
                diagonal_matrix(np.sqrt(self.codomain.diagonal))
                @ self.entries
                @ diagonal_matrix(1.0 / np.sqrt(self.domain.diagonal))
            )
            return sps.csr_matrix(whitened).toarray(order="F")
        left = self.codomain.to_orthonormal(dense(self.entries))
        return np.asfortranarray(self.domain.whiten_columns(left))

    def operator_norm(self) -> float:
        """Largest weighted singular value; exact zero for a structurally zero map"""
        if min(self.shape) == 0 or self.nnz == 0:
            return 0.0
        if (
            min(self.shape) > DENSE_LIMIT
            and self.domain.is_diagonal
            and self.codomain.is_diagonal
        ):
            whitened = (
                diagonal_matrix(np.sqrt(self.codomain.diagonal))
                @ sps.csr_matrix(self.entries)
                @ diagonal_matrix(1.0 / np.sqrt(self.domain.diagonal))
            )
            return float(spla.svds(whitened, k=1, return_singular_vectors=False)[0])
        return float(np.linalg.norm(self.weighted_matrix(), 2))


def adjoint(A: LinearMap) -> LinearMap:
    """
    Gram-weighted adjoint A* = G_d^{-1} A^T G_c.

    Args:
        A: Map between weighted spaces

    Returns:
        LinearMap: The adjoint, codomain to domain
    """
    transposed = A.entries.T @ A.codomain.gram
    if is_sparse(transposed):
        transposed = sps.csr_matrix(transposed)
    entries = A.domain.solve(transposed)
    label = A.label[:-1] if A.label.endswith("*") else f"{A.label}*"
    return LinearMap(A.codomain, A.domain, entries, label)

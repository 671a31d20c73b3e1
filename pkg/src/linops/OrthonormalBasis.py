from dataclasses import dataclass
from typing import Optional

import numpy as np

from errors import DecompositionError
from .InnerProductSpace import InnerProductSpace
from .LinearMap import LinearMap
from .WeightedSVD import RANK_RTOL, weighted_svd

ORTHONORMALITY_ATOL = 1e-10


@dataclass(frozen=True, eq=False)
class OrthonormalBasis:
    """Columns C of a subspace with C^T G C = I"""

    space: InnerProductSpace
    columns: np.ndarray

    def __post_init__(self) -> None:
        columns = np.asarray(self.columns, dtype=np.float64)
        if columns.ndim != 2 or columns.shape[0] != self.space.dim:
            raise DecompositionError(
                f"basis of shape {columns.shape} does not live in {self.space}"
            )
        object.__setattr__(self, "columns", columns)
        defect = np.abs(columns.T @ (self.space.gram @ columns) - np.eye(self.rank))
        if defect.size and defect.max() > ORTHONORMALITY_ATOL:
            raise DecompositionError(
                "basis columns are not G-orthonormal", defect=float(defect.max())
            )

    @property
    def rank(self) -> int:
        return self.columns.shape[1]

    def coordinates(self, x: np.ndarray) -> np.ndarray:
        return self.columns.T @ (self.space.gram @ x)

    def expand(self, z: np.ndarray) -> np.ndarray:
        return self.columns @ z


def kernel_basis(
    A: LinearMap, rank_tol: Optional[float] = None, rtol: float = RANK_RTOL
) -> OrthonormalBasis:
    """Orthonormal basis of the numerical kernel of A"""
    svd = weighted_svd(A, rank_tol=rank_tol, rtol=rtol)
    return OrthonormalBasis(A.domain, svd.kernel_columns())


def range_basis(
    A: LinearMap, rank_tol: Optional[float] = None, rtol: float = RANK_RTOL
) -> OrthonormalBasis:
    """Orthonormal basis of the numerical range of A"""
    svd = weighted_svd(A, rank_tol=rank_tol, rtol=rtol)
    return OrthonormalBasis(A.codomain, svd.range_columns())

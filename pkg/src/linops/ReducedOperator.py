"""
Restriction of an operator to the orthogonal complement of its kernel,
mapping onto its range. Its smallest singular value is the reciprocal of
the discrete Poincaré constant.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from errors import DecompositionError, DimensionMismatchError, TrivialRangeError
from .LinearMap import LinearMap
from .OrthonormalBasis import OrthonormalBasis
from .WeightedSVD import RANK_RTOL, weighted_svd
from .utils import dense

logger = logging.getLogger(__name__)

COMPOSITION_RTOL = 1e-10


@dataclass(frozen=True, eq=False)
class ReducedOperator:
    source_basis: OrthonormalBasis
    target_basis: OrthonormalBasis
    matrix: np.ndarray
    sigma_min: float

    @property
    def rank(self) -> int:
        return self.source_basis.rank

    @property
    def poincare(self) -> float:
        """1/sigma_min, or 0.0 when the range is trivial"""
        return 0.0 if self.rank == 0 else 1.0 / self.sigma_min


def reduced_operator(
    A: LinearMap, rank_tol: Optional[float] = None, rtol: float = RANK_RTOL
) -> ReducedOperator:
    svd = weighted_svd(A, rank_tol=rank_tol, rtol=rtol)
    source = OrthonormalBasis(A.domain, svd.corange_columns())
    target = OrthonormalBasis(A.codomain, svd.range_columns())
    image = dense(A.entries @ source.columns)
    matrix = target.columns.T @ np.asarray(A.codomain.gram @ image)
    if svd.rank:
        defect = np.abs(image - target.columns @ matrix).max()
        if defect > COMPOSITION_RTOL * (1.0 + np.abs(image).max()):
            raise DecompositionError(
                f"range of {A.label or 'map'} is not captured by its reduced operator",
                defect=float(defect),
            )
        sigma_min = float(np.linalg.svd(matrix, compute_uv=False).min())
    else:
        sigma_min = float("inf")
    logger.debug(f"Reduced {A.label or 'map'}: rank {svd.rank}, sigma_min {sigma_min:.6g}")
    return ReducedOperator(source, target, matrix, sigma_min)


def reduced_solve(B: ReducedOperator, y: np.ndarray) -> np.ndarray:
    """Minimum-norm preimage of y, which must lie in the range"""
    y = np.asarray(y, dtype=np.float64)
    if y.shape[0] != B.target_basis.space.dim:
        raise DimensionMismatchError(
            f"right-hand side has {y.shape[0]} coordinates, expected {B.target_basis.space.dim}"
        )
    if B.rank == 0:
        return np.zeros(B.source_basis.space.dim)
    z = np.linalg.solve(B.matrix, B.target_basis.coordinates(y))
    return B.source_basis.expand(z)


def poincare_constant(
    A: LinearMap, rank_tol: Optional[float] = None, rtol: float = RANK_RTOL
) -> float:
    B = reduced_operator(A, rank_tol=rank_tol, rtol=rtol)
    if B.rank == 0:
        raise TrivialRangeError(f"trivial range: {A.label or 'map'} has no Poincaré constant")
    return 1.0 / B.sigma_min

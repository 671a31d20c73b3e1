import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg as sla

from errors import DecompositionError, ValidationError
from .LinearMap import LinearMap
from .utils import dense

logger = logging.getLogger(__name__)

RANK_RTOL = 1e-10


@dataclass(frozen=True, eq=False)
class WeightedSVD:
    """
    SVD of a map in orthonormal coordinates of both spaces.

    Only the right factor is kept; range columns are rebuilt from the image
    of the corange. right is None when only singular values were requested.
    """

    linear_map: LinearMap
    singular_values: np.ndarray
    right: Optional[np.ndarray]
    rank: int
    tolerance: float

    @property
    def sigma_max(self) -> float:
        return float(self.singular_values[0]) if self.singular_values.size else 0.0

    @property
    def sigma_min(self) -> float:
        return float(self.singular_values[self.rank - 1]) if self.rank else float("inf")

    @property
    def nullity(self) -> int:
        return self.linear_map.domain.dim - self.rank

    @property
    def poincare(self) -> float:
        """1/sigma_min, or 0.0 when the range is trivial"""
        return 0.0 if self.rank == 0 else 1.0 / self.sigma_min

    def _right(self) -> np.ndarray:
        if self.right is None:
            raise DecompositionError(
                f"singular vectors of {self.linear_map.label or 'map'} were not computed"
            )
        return self.right

    def kernel_columns(self) -> np.ndarray:
        return self.linear_map.domain.from_orthonormal(self._right()[:, self.rank :])

    def corange_columns(self) -> np.ndarray:
        return self.linear_map.domain.from_orthonormal(self._right()[:, : self.rank])

    def range_columns(self) -> np.ndarray:
        codomain = self.linear_map.codomain
        if self.rank == 0:
            return np.zeros((codomain.dim, 0))
        image = dense(self.linear_map.entries @ self.corange_columns())
        q, _ = sla.qr(codomain.to_orthonormal(image), mode="economic")
        return codomain.from_orthonormal(q)


def _factor(whitened: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Singular values and the full right factor of a column-major matrix"""
    m, n = whitened.shape
    if m > n:
        # Only R of a tall matrix carries its singular values and right vectors.
        _, triangle = sla.qr(whitened, overwrite_a=True, mode="raw", check_finite=False)
        whitened = np.asfortranarray(triangle)
    _, values, right_t = sla.svd(
        whitened, full_matrices=True, overwrite_a=True, check_finite=False, lapack_driver="gesdd"
    )
    return values, right_t.T


def weighted_svd(
    A: LinearMap,
    rank_tol: Optional[float] = None,
    rtol: float = RANK_RTOL,
    vectors: bool = True,
) -> WeightedSVD:
    """
    Rank-revealing SVD shared by kernel, range and reduced-operator construction.

    Args:
        A: Map to factor
        rank_tol: Absolute singular value threshold; overrides rtol
        rtol: Threshold relative to the largest singular value
        vectors: Also compute the right singular vectors

    Returns:
        WeightedSVD: Singular values, right factor and the numerical rank
    """
    if rank_tol is not None and rank_tol <= 0:
        raise ValidationError(f"rank_tol must be positive, got {rank_tol}", rank_tol=rank_tol)
    whitened = A.weighted_matrix()
    m, n = whitened.shape
    right: Optional[np.ndarray] = None
    if m == 0 or n == 0:
        values = np.zeros(0)
        right = np.eye(n) if vectors else None
    elif vectors:
        values, right = _factor(whitened)
    else:
        values = sla.svd(
            whitened, compute_uv=False, overwrite_a=True, check_finite=False, lapack_driver="gesdd"
        )
    del whitened
    tolerance = rank_tol if rank_tol is not None else rtol * (values[0] if values.size else 0.0)
    rank = int(np.count_nonzero(values > tolerance))
    logger.debug(f"SVD of {A.label or 'map'} {(m, n)}: rank {rank}, tol {tolerance:.3e}")
    return WeightedSVD(A, values, right, rank, float(tolerance))

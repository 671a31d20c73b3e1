from dataclasses import dataclass

import numpy as np

from errors import DecompositionError, DimensionMismatchError
from .InnerProductSpace import InnerProductSpace
from .OrthonormalBasis import OrthonormalBasis
from .utils import frobenius

PROJECTOR_ATOL = 1e-10


@dataclass(frozen=True, eq=False)
class Projector:
    """G-orthogonal projector, stored densely"""

    space: InnerProductSpace
    matrix: np.ndarray

    def __post_init__(self) -> None:
        matrix = np.asarray(self.matrix, dtype=np.float64)
        object.__setattr__(self, "matrix", matrix)
        n = self.space.dim
        if matrix.shape != (n, n):
            raise DimensionMismatchError(f"projector of shape {matrix.shape} on {self.space}")
        if not n:
            return
        scale = max(1.0, frobenius(matrix))
        idempotency = frobenius(matrix @ matrix - matrix)
        if idempotency > PROJECTOR_ATOL * scale:
            raise DecompositionError("projector is not idempotent", defect=idempotency)
        weighted = np.asarray(self.space.gram @ matrix)
        symmetry = frobenius(weighted - weighted.T)
        if symmetry > PROJECTOR_ATOL * max(1.0, frobenius(weighted)):
            raise DecompositionError("projector is not self-adjoint", defect=symmetry)

    @property
    def rank(self) -> int:
        return int(round(float(np.trace(self.matrix))))

    def apply(self, v: np.ndarray) -> np.ndarray:
        return self.matrix @ np.asarray(v, dtype=np.float64)


def projector_onto(basis: OrthonormalBasis) -> Projector:
    """P = C C^T G"""
    columns = basis.columns
    weighted = np.asarray(basis.space.gram @ columns)
    return Projector(basis.space, columns @ weighted.T)

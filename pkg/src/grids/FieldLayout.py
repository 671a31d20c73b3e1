"""
Storage of scalar, vector and matrix fields on grids.

Matrix-valued kinds keep only independent components. The pointwise weight
matrix W of each kind is chosen so that x^T W x equals the Frobenius norm
of the full matrix the components stand for; the field gram is
kron(W, I_n) h^d.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Optional

import numpy as np
import scipy.sparse as sps

from errors import GridSpecError, UnsupportedDimError
from linops.InnerProductSpace import InnerProductSpace
from linops.utils import diagonal_matrix

SCALAR = "scalar"
VECTOR = "vector"
ANTISYM2 = "antisym2"
SYM = "sym"
DEV = "dev"
MATRIX = "matrix"
KINDS = (SCALAR, VECTOR, ANTISYM2, SYM, DEV, MATRIX)


@dataclass(frozen=True)
class FieldLayout:
    kind: str
    d: int

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise GridSpecError(f"unknown field kind {self.kind!r}")
        if self.kind == DEV and self.d != 3:
            raise UnsupportedDimError("deviatoric fields are defined for d = 3 only", d=self.d)

    @cached_property
    def index_pairs(self) -> list[tuple[int, int]]:
        """Matrix entry (j, k) stored by each component of a matrix-valued kind"""
        d = self.d
        if self.kind == ANTISYM2:
            return [(j, k) for j in range(d) for k in range(j + 1, d)]
        if self.kind == SYM:
            return [(j, j) for j in range(d)] + [
                (j, k) for j in range(d) for k in range(j + 1, d)
            ]
        if self.kind == DEV:
            return [(0, 0), (1, 1)] + [
                (j, k) for j in range(d) for k in range(d) if j != k
            ]
        if self.kind == MATRIX:
            return [(j, k) for j in range(d) for k in range(d)]
        return []

    @property
    def components(self) -> int:
        if self.kind == SCALAR:
            return 1
        if self.kind == VECTOR:
            return self.d
        return len(self.index_pairs)

    def index(self, j: int, k: int) -> int:
        return self.index_pairs.index((j, k))

    @cached_property
    def weights(self) -> np.ndarray:
        """Pointwise component weight matrix W"""
        W = np.eye(self.components)
        if self.kind in (ANTISYM2, SYM):
            for c, (j, k) in enumerate(self.index_pairs):
                if j != k:
                    W[c, c] = 2.0
        elif self.kind == DEV:
            # M22 = -M00 - M11 contributes (M00 + M11)^2.
            W[:2, :2] = [[2.0, 1.0], [1.0, 2.0]]
        return W

    def space(self, h: float, n_points: int, label: str = "") -> InnerProductSpace:
        volume = h**self.d
        W = self.weights
        if np.count_nonzero(W - np.diag(np.diag(W))) == 0:
            gram = diagonal_matrix(np.repeat(np.diag(W), n_points) * volume)
        else:
            gram = sps.csr_matrix(sps.kron(W, sps.identity(n_points)) * volume)
        dim = self.components * n_points
        return InnerProductSpace(dim, gram, label or self.kind)

    def pack(self, full: np.ndarray) -> np.ndarray:
        """
        Flatten a full field of shape (d, d, *grid) (or (d, *grid) / grid) into
        component-major storage. Matrix kinds read only their stored entries.
        """
        full = np.asarray(full, dtype=np.float64)
        if self.kind == SCALAR:
            return full.ravel()
        if self.kind == VECTOR:
            return np.concatenate([full[j].ravel() for j in range(self.d)])
        return np.concatenate([full[j, k].ravel() for j, k in self.index_pairs])

    def unpack(self, values: np.ndarray, grid_shape: tuple[int, ...]) -> np.ndarray:
        """Inverse of pack, rebuilding the dependent matrix entries"""
        parts = np.asarray(values, dtype=np.float64).reshape((self.components,) + grid_shape)
        if self.kind == SCALAR:
            return parts[0]
        if self.kind == VECTOR:
            return parts
        full = np.zeros((self.d, self.d) + grid_shape)
        for c, (j, k) in enumerate(self.index_pairs):
            full[j, k] = parts[c]
            if self.kind == ANTISYM2:
                full[k, j] = -parts[c]
            elif self.kind == SYM:
                full[k, j] = parts[c]
        if self.kind == DEV:
            full[2, 2] = -full[0, 0] - full[1, 1]
        return full


class MatrixParts(NamedTuple):
    sym: np.ndarray
    skew: np.ndarray
    dev: Optional[np.ndarray]
    trace: np.ndarray


def pointwise_algebra(M: np.ndarray) -> MatrixParts:
    """
    sym, skew, dev and trace of a matrix or of a matrix field with leading (d, d) axes.

    dev is only defined for d = 3 and is None otherwise.
    """
    M = np.asarray(M, dtype=np.float64)
    if M.ndim < 2 or M.shape[0] != M.shape[1] or M.shape[0] not in (2, 3):
        raise UnsupportedDimError(f"expected leading (d, d) axes with d in (2, 3), got {M.shape}")
    d = M.shape[0]
    transposed = np.swapaxes(M, 0, 1)
    trace = np.einsum("ii...->...", M)
    dev = None
    if d == 3:
        identity = np.eye(3).reshape((3, 3) + (1,) * (M.ndim - 2))
        dev = M - trace / 3.0 * identity
    return MatrixParts(
        sym=(M + transposed) / 2.0,
        skew=(M - transposed) / 2.0,
        dev=dev,
        trace=trace,
    )

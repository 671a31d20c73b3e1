from typing import Union

import numpy as np
import scipy.sparse as sps

Matrix = Union[np.ndarray, sps.spmatrix]

# Above this size dense factorizations are avoided where a sparse route exists.
DENSE_LIMIT = 2000


def is_sparse(matrix: Matrix) -> bool:
    return sps.issparse(matrix)


def as_matrix(matrix: Matrix) -> Matrix:
    """Normalize to a float64 CSR matrix or a 2-D float64 ndarray"""
    if sps.issparse(matrix):
        return sps.csr_matrix(matrix, dtype=np.float64)
    array = np.asarray(matrix, dtype=np.float64)
    if array.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {array.shape}")
    return array


def dense(matrix: Matrix) -> np.ndarray:
    if sps.issparse(matrix):
        return matrix.toarray()
    return np.asarray(matrix, dtype=np.float64)


def max_abs(matrix: Matrix) -> float:
    if sps.issparse(matrix):
        return float(abs(matrix).max()) if matrix.nnz else 0.0
    array = np.asarray(matrix)
    return float(np.abs(array).max()) if array.size else 0.0


def frobenius(matrix: Matrix) -> float:
    if sps.issparse(matrix):
        return float(np.sqrt((matrix.multiply(matrix)).sum()))
    return float(np.linalg.norm(matrix))


def count_nonzero(matrix: Matrix) -> int:
    if sps.issparse(matrix):
        return int(matrix.count_nonzero())
    return int(np.count_nonzero(matrix))


def matrices_equal(a: Matrix, b: Matrix) -> bool:
    if a.shape != b.shape:
        return False
    if sps.issparse(a) and sps.issparse(b):
        return (a != b).nnz == 0
    return bool(np.array_equal(dense(a), dense(b)))


def scale_rows(weights: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Multiply the leading axis of a vector or matrix by weights"""
    if values.ndim == 1:
        return weights * values
    return weights[:, None] * values


def diagonal_matrix(values: np.ndarray) -> sps.csr_matrix:
    values = np.asarray(values, dtype=np.float64)
    index = np.arange(values.size)
    return sps.csr_matrix((values, (index, index)), shape=(values.size, values.size))

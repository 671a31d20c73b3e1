from typing import Dict, Optional, Tuple

import numpy as np
import scipy.sparse as sps


def periodic_shift(N: int) -> sps.csr_matrix:
    """(S u)_i = u_{i+1 mod N}"""
    return sps.csr_matrix(
        (np.ones(N), (np.arange(N), (np.arange(N) + 1) % N)), shape=(N, N)
    )


def forward_difference(N: int, h: float) -> sps.csr_matrix:
    return sps.csr_matrix((periodic_shift(N) - sps.identity(N)) / h)


def backward_difference(N: int, h: float) -> sps.csr_matrix:
    return sps.csr_matrix((sps.identity(N) - periodic_shift(N).T) / h)


def axis_operator(op: sps.spmatrix, axis: int, d: int) -> sps.csr_matrix:
    """Act with a 1-D operator along one axis of a C-ordered d-dimensional grid"""
    N = op.shape[0]
    result = sps.identity(1, format="csr")
    for a in range(d):
        result = sps.kron(result, op if a == axis else sps.identity(N), format="csr")
    return sps.csr_matrix(result)


def assemble_blocks(
    blocks: Dict[Tuple[int, int], sps.spmatrix],
    n_rows: int,
    n_cols: int,
    size: int,
) -> sps.csr_matrix:
    """
    Block matrix of equally sized square blocks; missing blocks are zero.

    Args:
        blocks: (block row, block column) -> size x size matrix
        n_rows: Number of block rows
        n_cols: Number of block columns
        size: Block size

    Returns:
        sps.csr_matrix: The assembled (n_rows*size) x (n_cols*size) matrix
    """
    if n_rows == 0 or n_cols == 0:
        return sps.csr_matrix((n_rows * size, n_cols * size))
    grid: list[list[Optional[sps.spmatrix]]] = [[None] * n_cols for _ in range(n_rows)]
    for (r, c), block in blocks.items():
        grid[r][c] = block
    # bmat needs every block row and column to fix its size.
    for r in range(n_rows):
        if all(b is None for b in grid[r]):
            grid[r][0] = sps.csr_matrix((size, size))
    for c in range(n_cols):
        if all(grid[r][c] is None for r in range(n_rows)):
            grid[0][c] = sps.csr_matrix((size, size))
    return sps.csr_matrix(sps.bmat(grid, format="csr"))

"""
Cubical cochain complex with homogeneous Dirichlet conditions.

Scalars live on vertices, vectors on edges and antisymmetric fields on
faces. A vertex or an edge is kept iff every cell containing it is active,
where cells outside the box count as inactive; a face is kept iff it
belongs to an active cell. Kept vertices and edges therefore form a
subcomplex and A1 A0 = 0 holds exactly.
"""

import itertools
import logging

import numpy as np
import scipy.sparse as sps

from complexes.ShortSequence import ShortSequence, validate_sequence
from errors import UnsupportedBCError
from linops.InnerProductSpace import InnerProductSpace
from linops.LinearMap import LinearMap
from .BaseGridComplex import BaseGridComplex
from .GridSpec import DIRICHLET, GridSpec

logger = logging.getLogger(__name__)


class DirichletDeRham(BaseGridComplex):
    name = "dirichlet de Rham"

    def __init__(self, spec: GridSpec):
        if spec.bc != DIRICHLET:
            raise UnsupportedBCError("the cochain backend expects a dirichlet grid", bc=spec.bc)
        super().__init__(spec)
        N, d = spec.N, spec.d
        self._padded = np.zeros((N + 2,) * d, dtype=bool)
        self._padded[(slice(1, N + 1),) * d] = spec.active_cells()

    def _status(self, directions: tuple[int, ...]) -> tuple[np.ndarray, np.ndarray]:
        """
        For cubes spanned by the given axes, indexed by their lowest corner:
        (all containing cells active, some containing cell active)
        """
        d, N = self.spec.d, self.spec.N
        shape = tuple(N if a in directions else N + 1 for a in range(d))
        free = [a for a in range(d) if a not in directions]
        interior = np.ones(shape, dtype=bool)
        present = np.zeros(shape, dtype=bool)
        for offsets in itertools.product((-1, 0), repeat=len(free)):
            shift = dict(zip(free, offsets))
            window = tuple(
                slice(1 + shift.get(a, 0), 1 + shift.get(a, 0) + shape[a]) for a in range(d)
            )
            cells = self._padded[window]
            interior &= cells
            present |= cells
        return interior, present

    @staticmethod
    def _numbering(keep: np.ndarray, offset: int = 0) -> np.ndarray:
        numbers = np.full(keep.shape, -1, dtype=np.int64)
        numbers[keep] = offset + np.arange(np.count_nonzero(keep))
        return numbers

    def _grad(self, vertices: np.ndarray, edges: list[np.ndarray], n0: int, n1: int) -> sps.csr_matrix:
        rows, cols, values = [], [], []
        for a, numbers in enumerate(edges):
            corners = np.nonzero(numbers >= 0)
            edge = numbers[corners]
            head = list(corners)
            head[a] = corners[a] + 1
            for sign, vertex in ((1.0, vertices[tuple(head)]), (-1.0, vertices[corners])):
                kept = vertex >= 0
                rows.append(edge[kept])
                cols.append(vertex[kept])
                values.append(np.full(np.count_nonzero(kept), sign))
        return self._assemble(rows, cols, values, (n1, n0))

    def _curl(
        self,
        edges: list[np.ndarray],
        faces: list[np.ndarray],
        pairs: list[tuple[int, int]],
        n1: int,
        n2: int,
    ) -> sps.csr_matrix:
        # Curl_ab = u_a(v + e_b) - u_a(v) - u_b(v + e_a) + u_b(v)
        rows, cols, values = [], [], []
        for numbers, (a, b) in zip(faces, pairs):
            corners = np.nonzero(numbers >= 0)
            face = numbers[corners]
            shifted_b = list(corners)
            shifted_b[b] = corners[b] + 1
            shifted_a = list(corners)
            shifted_a[a] = corners[a] + 1
            terms = (
                (1.0, edges[a][tuple(shifted_b)]),
                (-1.0, edges[a][corners]),
                (-1.0, edges[b][tuple(shifted_a)]),
                (1.0, edges[b][corners]),
            )
            for sign, edge in terms:
                kept = edge >= 0
                rows.append(face[kept])
                cols.append(edge[kept])
                values.append(np.full(np.count_nonzero(kept), sign))
        return self._assemble(rows, cols, values, (n2, n1))

    def _assemble(self, rows, cols, values, shape: tuple[int, int]) -> sps.csr_matrix:
        if not rows:
            return sps.csr_matrix(shape)
        data = np.concatenate(values) / self.spec.h
        return sps.csr_matrix((data, (np.concatenate(rows), np.concatenate(cols))), shape=shape)

    def sequences(self) -> tuple[ShortSequence, ...]:
        d, h = self.spec.d, self.spec.h
        volume = h**d

        vertices = self._numbering(self._status(())[0])
        n0 = int(np.count_nonzero(vertices >= 0))

        edges, n1 = [], 0
        for a in range(d):
            keep = self._status((a,))[0]
            edges.append(self._numbering(keep, n1))
            n1 += int(np.count_nonzero(keep))

        pairs = [(a, b) for a in range(d) for b in range(a + 1, d)]
        faces, n2 = [], 0
        for a, b in pairs:
            keep = self._status((a, b))[1]
            faces.append(self._numbering(keep, n2))
            n2 += int(np.count_nonzero(keep))

        H0 = InnerProductSpace.weighted(np.full(n0, volume), "vertices")
        H1 = InnerProductSpace.weighted(np.full(n1, volume), "edges")
        H2 = InnerProductSpace.weighted(np.full(n2, 2.0 * volume), "faces")
        grad = LinearMap(H0, H1, self._grad(vertices, edges, n0, n1), "grad")
        curl = LinearMap(H1, H2, self._curl(edges, faces, pairs, n1, n2), "Curl")
        logger.info(f"Built {self}: {n0} vertices, {n1} edges, {n2} faces")
        return (validate_sequence(grad, curl, label="derham"),)

import logging

import scipy.sparse as sps

from errors import UnsupportedBCError
from linops.InnerProductSpace import InnerProductSpace
from linops.LinearMap import LinearMap
from .FieldLayout import ANTISYM2, MATRIX, SCALAR, VECTOR, FieldLayout
from .GridSpec import PERIODIC, GridSpec
from .utils import assemble_blocks, axis_operator, backward_difference, forward_difference

logger = logging.getLogger(__name__)


class PeriodicCalculus:
    """
    Colocated difference calculus on the torus.

    Forward differences D_j build the gradients and Curl; their negative
    adjoints are backward differences, which build div and Div. All D_j
    commute, so second-order identities hold exactly.
    """

    def __init__(self, spec: GridSpec):
        if spec.bc != PERIODIC:
            raise UnsupportedBCError("the difference calculus needs a periodic grid", bc=spec.bc)
        self.spec = spec
        d, N, h = spec.d, spec.N, spec.h
        self.forward = [axis_operator(forward_difference(N, h), a, d) for a in range(d)]
        self.backward = [axis_operator(backward_difference(N, h), a, d) for a in range(d)]
        self._spaces: dict[str, InnerProductSpace] = {}
        logger.debug(f"Periodic calculus on a {d}D grid with N={N}")

    def layout(self, kind: str) -> FieldLayout:
        return FieldLayout(kind, self.spec.d)

    def space(self, kind: str) -> InnerProductSpace:
        """One shared space object per field kind"""
        if kind not in self._spaces:
            self._spaces[kind] = self.layout(kind).space(self.spec.h, self.spec.n_points)
        return self._spaces[kind]

    def grad(self) -> LinearMap:
        entries = sps.vstack(self.forward, format="csr")
        return LinearMap(self.space(SCALAR), self.space(VECTOR), entries, "grad")

    def div(self) -> LinearMap:
        entries = sps.hstack(self.backward, format="csr")
        return LinearMap(self.space(VECTOR), self.space(SCALAR), entries, "div")

    def curl(self) -> LinearMap:
        """(Curl u)_jk = D_k u_j - D_j u_k for j < k"""
        d, n = self.spec.d, self.spec.n_points
        pairs = self.layout(ANTISYM2).index_pairs
        blocks = {}
        for p, (j, k) in enumerate(pairs):
            blocks[(p, j)] = self.forward[k]
            blocks[(p, k)] = -self.forward[j]
        entries = assemble_blocks(blocks, len(pairs), d, n)
        return LinearMap(self.space(VECTOR), self.space(ANTISYM2), entries, "Curl")

    def vector_grad(self) -> LinearMap:
        """Row gradient (Grad u)_jk = D_k u_j into full matrices"""
        d, n = self.spec.d, self.spec.n_points
        blocks = {(j * d + k, j): self.forward[k] for j in range(d) for k in range(d)}
        entries = assemble_blocks(blocks, d * d, d, n)
        return LinearMap(self.space(VECTOR), self.space(MATRIX), entries, "Grad")

    def matrix_div(self) -> LinearMap:
        """Row divergence (Div M)_j = sum_k B_k M_jk, equal to -Grad*"""
        d, n = self.spec.d, self.spec.n_points
        blocks = {(j, j * d + k): self.backward[k] for j in range(d) for k in range(d)}
        entries = assemble_blocks(blocks, d, d * d, n)
        return LinearMap(self.space(MATRIX), self.space(VECTOR), entries, "Div")

    def skew(self) -> LinearMap:
        """Full matrix field to the stored components of its skew part"""
        d, n = self.spec.d, self.spec.n_points
        pairs = self.layout(ANTISYM2).index_pairs
        half = 0.5 * sps.identity(n, format="csr")
        blocks = {}
        for p, (j, k) in enumerate(pairs):
            blocks[(p, j * d + k)] = half
            blocks[(p, k * d + j)] = -half
        entries = assemble_blocks(blocks, len(pairs), d * d, n)
        return LinearMap(self.space(MATRIX), self.space(ANTISYM2), entries, "skew")

    def embed_antisym(self) -> LinearMap:
        """Stored antisymmetric components to the full matrix field"""
        d, n = self.spec.d, self.spec.n_points
        pairs = self.layout(ANTISYM2).index_pairs
        one = sps.identity(n, format="csr")
        blocks = {}
        for p, (j, k) in enumerate(pairs):
            blocks[(j * d + k, p)] = one
            blocks[(k * d + j, p)] = -one
        entries = assemble_blocks(blocks, d * d, len(pairs), n)
        return LinearMap(self.space(ANTISYM2), self.space(MATRIX), entries, "embed")

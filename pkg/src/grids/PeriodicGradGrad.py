"""
Grad-grad complex on the 3-torus:

    scalar --gradgrad--> sym --curl_r--> dev --div_r--> vector

curl_r acts row-wise, (curl_r S)_il = sum_mn eps_lmn D_m S_in. For symmetric
S its trace vanishes identically, so it lands in trace-free matrices, which
are stored with M22 = -M00 - M11.
"""

import logging

import scipy.sparse as sps

from complexes.ShortSequence import ShortSequence, validate_sequence
from errors import UnsupportedDimError
from linops.LinearMap import LinearMap
from .BaseGridComplex import BaseGridComplex
from .FieldLayout import DEV, MATRIX, SCALAR, SYM, VECTOR
from .GridSpec import GridSpec
from .PeriodicCalculus import PeriodicCalculus
from .utils import assemble_blocks

logger = logging.getLogger(__name__)


def levi_civita(l: int, m: int, n: int) -> int:
    return (l - m) * (m - n) * (n - l) // 2


class PeriodicGradGrad(BaseGridComplex):
    name = "periodic grad-grad"

    def __init__(self, spec: GridSpec):
        super().__init__(spec)
        self.calculus = PeriodicCalculus(spec)
        if spec.d != 3:
            raise UnsupportedDimError("the grad-grad complex is built for d = 3", d=spec.d)
        self._sym = self.calculus.layout(SYM)
        self._dev = self.calculus.layout(DEV)
        self._full = self.calculus.layout(MATRIX)

    def _sym_index(self, i: int, n: int) -> int:
        return self._sym.index(min(i, n), max(i, n))

    def gradgrad(self) -> LinearMap:
        D, n = self.calculus.forward, self.spec.n_points
        blocks = {
            (c, 0): sps.csr_matrix(D[j] @ D[k])
            for c, (j, k) in enumerate(self._sym.index_pairs)
        }
        entries = assemble_blocks(blocks, self._sym.components, 1, n)
        return LinearMap(
            self.calculus.space(SCALAR), self.calculus.space(SYM), entries, "gradgrad"
        )

    def _row_curl_blocks(self) -> dict[tuple[int, int], sps.csr_matrix]:
        D = self.calculus.forward
        blocks: dict[tuple[int, int], sps.csr_matrix] = {}
        for i in range(3):
            for l in range(3):
                row = self._full.index(i, l)
                for m in range(3):
                    for n in range(3):
                        sign = levi_civita(l, m, n)
                        if not sign:
                            continue
                        key = (row, self._sym_index(i, n))
                        term = sign * D[m]
                        blocks[key] = blocks[key] + term if key in blocks else term
        return blocks

    def row_curl(self) -> LinearMap:
        """Row-wise curl of a symmetric field into all nine matrix components"""
        entries = assemble_blocks(
            self._row_curl_blocks(), 9, self._sym.components, self.spec.n_points
        )
        return LinearMap(
            self.calculus.space(SYM), self.calculus.space(MATRIX), entries, "curl_r"
        )

    def curl_sym(self) -> LinearMap:
        full = self._row_curl_blocks()
        blocks = {}
        for c, (i, l) in enumerate(self._dev.index_pairs):
            row = self._full.index(i, l)
            for (r, col), block in full.items():
                if r == row:
                    blocks[(c, col)] = block
        entries = assemble_blocks(
            blocks, self._dev.components, self._sym.components, self.spec.n_points
        )
        return LinearMap(
            self.calculus.space(SYM), self.calculus.space(DEV), entries, "curl_sym"
        )

    def div_dev(self) -> LinearMap:
        """(div_r M)_i = sum_l D_l M_il with M22 = -M00 - M11"""
        D = self.calculus.forward
        blocks: dict[tuple[int, int], sps.csr_matrix] = {}
        for i in range(3):
            for l in range(3):
                if (i, l) == (2, 2):
                    blocks[(2, self._dev.index(0, 0))] = -D[2]
                    blocks[(2, self._dev.index(1, 1))] = -D[2]
                else:
                    blocks[(i, self._dev.index(i, l))] = D[l]
        entries = assemble_blocks(blocks, 3, self._dev.components, self.spec.n_points)
        return LinearMap(
            self.calculus.space(DEV), self.calculus.space(VECTOR), entries, "div_dev"
        )

    def sequences(self) -> tuple[ShortSequence, ...]:
        gradgrad, curl, div = self.gradgrad(), self.curl_sym(), self.div_dev()
        logger.info(
            f"Built {self}: gradgrad {gradgrad.shape}, curl_sym {curl.shape}, div_dev {div.shape}"
        )
        return (
            validate_sequence(gradgrad, curl, label="gradgrad-curl"),
            validate_sequence(curl, div, label="curl-div"),
        )

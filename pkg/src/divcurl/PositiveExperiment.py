"""
Div-curl lemma on a grid: u_k with controlled A0* u_k and v_k with
controlled A1 v_k, whose pairings converge to the pairing of the limits.
"""

import logging
from typing import Callable, Optional, Sequence

from complexes.ShortSequence import ShortSequence
from errors import DimensionMismatchError, FamilyError
from grids.GridSpec import GridSpec
from grids.builders import build_derham
from linops.LinearMap import adjoint
from .BaseExperiment import BaseExperiment
from .ConvergenceTable import ConvergenceRow, ConvergenceTable
from .OscillatoryFamily import OscillatoryFamily, sample, sample_macro
from .utils import local_pairing_error, weak_gap

logger = logging.getLogger(__name__)

DEFAULT_U = {"macro": ["1", "0"], "micro": ["sin(x2)", "0"]}
DEFAULT_V = {"macro": ["1", "0"], "micro": ["cos(x1)", "0"]}


class PositiveExperiment(BaseExperiment):
    name = "divcurl"

    def __init__(
        self,
        u: OscillatoryFamily,
        v: OscillatoryFamily,
        grid: GridSpec,
        sequence: Optional[ShortSequence] = None,
        max_workers: int = 1,
    ):
        if u.frequencies != v.frequencies:
            raise FamilyError(
                f"u and v use different frequencies: {u.frequencies} vs {v.frequencies}"
            )
        super().__init__(grid, u.frequencies, max_workers)
        self.u, self.v = u, v
        self.sequence = sequence or build_derham(grid)
        expected = self.sequence.H1.dim
        for family in (u, v):
            if family.components * grid.n_points != expected:
                raise DimensionMismatchError(
                    f"family with {family.components} components does not sample "
                    f"the middle space of dimension {expected}"
                )

    def run(self) -> ConvergenceTable:
        S = self.sequence
        H1 = S.H1
        A0_star = adjoint(S.A0)
        U, V = sample_macro(self.u, self.grid), sample_macro(self.v, self.grid)
        reference = H1.inner(U, V)

        def row(k: int) -> ConvergenceRow:
            u_k, v_k = sample(self.u, k, self.grid), sample(self.v, k, self.grid)
            value = H1.inner(u_k, v_k)
            logger.debug(f"{self.name} k={k}: I_k={value:.17g}")
            return ConvergenceRow(
                k=k,
                value=value,
                reference=reference,
                error=abs(value - reference),
                res_div=S.H0.norm(A0_star.apply(u_k)),
                res_curl=S.H2.norm(S.A1.apply(v_k)),
                weak_gap=max(
                    weak_gap(H1, [u_k], U, self.grid), weak_gap(H1, [v_k], V, self.grid)
                ),
                local_error=local_pairing_error(H1, u_k, v_k, U, V, self.grid),
            )

        table = ConvergenceTable(self.grid, self.map_frequencies(row))
        logger.info(f"{self}: max error {table.max_error:.3e}")
        return table


def run_positive(
    u: OscillatoryFamily,
    v: OscillatoryFamily,
    grids: Sequence[GridSpec],
    builder: Callable[[GridSpec], ShortSequence] = build_derham,
    max_workers: int = 1,
) -> list[ConvergenceTable]:
    """
    One convergence table per grid.

    Args:
        u: Family with controlled A0* u_k
        v: Family with controlled A1 v_k
        grids: Periodic grids to sample on
        builder: Sequence whose middle space the families live in
        max_workers: Frequencies evaluated concurrently

    Returns:
        list[ConvergenceTable]: Tables in grid order
    """
    return [
        PositiveExperiment(u, v, grid, builder(grid), max_workers).run() for grid in grids
    ]

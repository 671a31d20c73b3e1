import logging
from typing import Optional, Sequence

from complexes.ShortSequence import ShortSequence
from errors import DimensionMismatchError
from grids.GridSpec import GridSpec
from linops.LinearMap import adjoint
from linops.OrthonormalBasis import range_basis
from linops.Projector import projector_onto
from linops.WeightedSVD import RANK_RTOL
from .BaseExperiment import BaseExperiment
from .ConvergenceTable import ProjectionRow, ProjectionTable
from .OscillatoryFamily import OscillatoryFamily, sample, sample_macro

logger = logging.getLogger(__name__)

DEFAULT_FAMILY = {
    "macro": ["cos(x1)*sin(x2)", "sin(x1)*cos(x2)"],
    "micro": ["sin(x2)", "0"],
}


class ProjectionExperiment(BaseExperiment):
    """
    Helmholtz projections of u_k against the projection of the macro part.

    With A0* u_k independent of k the exact parts coincide for every k.
    """

    name = "projection"

    def __init__(
        self,
        sequence: ShortSequence,
        family: OscillatoryFamily,
        grid: GridSpec,
        frequencies: Optional[Sequence[int]] = None,
        max_workers: int = 1,
        rtol: float = RANK_RTOL,
    ):
        super().__init__(grid, frequencies or family.frequencies, max_workers)
        if family.components * grid.n_points != sequence.H1.dim:
            raise DimensionMismatchError(
                f"family does not sample the middle space of dimension {sequence.H1.dim}"
            )
        self.sequence = sequence
        self.family = family
        self.rtol = rtol

    def run(self) -> ProjectionTable:
        S = self.sequence
        P = projector_onto(range_basis(S.A0, rtol=self.rtol))
        A0_star = adjoint(S.A0)
        U = sample_macro(self.family, self.grid)
        projected = P.apply(U)

        def row(k: int) -> ProjectionRow:
            u_k = sample(self.family, k, self.grid)
            return ProjectionRow(
                k=k,
                projection_error=S.H1.norm(P.apply(u_k) - projected),
                divergence_residual=S.H0.norm(A0_star.apply(u_k - U)),
            )

        table = ProjectionTable(self.grid, self.map_frequencies(row))
        logger.info(f"{self}: max projection error {table.max_error:.3e}")
        return table


def projection_convergence(
    S: ShortSequence,
    family: OscillatoryFamily,
    grid: GridSpec,
    frequencies: Optional[Sequence[int]] = None,
    max_workers: int = 1,
    rtol: float = RANK_RTOL,
) -> ProjectionTable:
    return ProjectionExperiment(S, family, grid, frequencies, max_workers, rtol).run()

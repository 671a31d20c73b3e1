"""
Converse of the div-curl lemma: u_k = v_k = sin(k x1) e1 tends weakly to 0
while <u_k, u_k> stays at 2π², because div u_k = k cos(k x1) is unbounded.

The self-pairing is reported as the exact grid quadrature value π · 2π; a
displayed limit normalized by 1/(2π) would be π and is not what is computed.
"""

import logging
from typing import Sequence

import numpy as np

from errors import UnsupportedDimError
from grids.GridSpec import GridSpec
from grids.PeriodicCalculus import PeriodicCalculus
from .BaseExperiment import BaseExperiment
from .ConvergenceTable import ConvergenceRow, ConvergenceTable
from .OscillatoryFamily import OscillatoryFamily, closed_form_residuals, sample
from .utils import local_pairing_error, weak_gap

logger = logging.getLogger(__name__)


def counterexample_family(frequencies: Sequence[int]) -> OscillatoryFamily:
    return OscillatoryFamily.from_strings(["0", "0"], ["sin(x1)", "0"], frequencies, d=2)


class CounterexampleExperiment(BaseExperiment):
    name = "counterexample"

    def __init__(self, grid: GridSpec, frequencies: Sequence[int], max_workers: int = 1):
        super().__init__(grid, frequencies, max_workers)
        self.calculus = PeriodicCalculus(grid)
        if grid.d != 2:
            raise UnsupportedDimError("the counterexample runs on the 2-torus", d=grid.d)
        self.family = counterexample_family(self.frequencies)

    def run(self) -> ConvergenceTable:
        space = self.calculus.space("vector")
        div, curl = self.calculus.div(), self.calculus.curl()
        zero = np.zeros(space.dim)

        def row(k: int) -> ConvergenceRow:
            u_k = sample(self.family, k, self.grid)
            value = space.inner(u_k, u_k)
            res_div, res_curl = closed_form_residuals(self.family, k, self.grid)
            logger.debug(
                f"{self.name} k={k}: discrete |div u_k| = "
                f"{self.calculus.space('scalar').norm(div.apply(u_k)):.6g}, "
                f"discrete |Curl u_k| = {self.calculus.space('antisym2').norm(curl.apply(u_k)):.3e}"
            )
            return ConvergenceRow(
                k=k,
                value=value,
                reference=0.0,
                error=abs(value),
                res_div=res_div,
                res_curl=res_curl,
                weak_gap=weak_gap(space, [u_k], zero, self.grid),
                local_error=local_pairing_error(space, u_k, u_k, zero, zero, self.grid),
            )

        table = ConvergenceTable(self.grid, self.map_frequencies(row))
        logger.info(f"{self}: smallest gap {min(table.errors, default=0.0):.6g}")
        return table


def run_counterexample(
    grids: Sequence[GridSpec], frequencies: Sequence[int], max_workers: int = 1
) -> list[ConvergenceTable]:
    return [CounterexampleExperiment(grid, frequencies, max_workers).run() for grid in grids]

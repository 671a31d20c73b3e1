"""
Periodic Friedrichs identity |Grad u|^2 = 1/2 |Curl u|^2 + |div u|^2.

Commuting differences and summation by parts make it exact for every
discrete vector field on the torus.
"""

import logging
from dataclasses import dataclass

import numpy as np

from grids.GridSpec import GridSpec
from grids.PeriodicCalculus import PeriodicCalculus

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FriedrichsReport:
    grid: GridSpec
    samples: int
    max_relative_residual: float
    max_absolute_residual: float


class FriedrichsOperators:
    """Grad, Curl and div of one periodic grid, assembled once"""

    def __init__(self, calculus: PeriodicCalculus):
        self.calculus = calculus
        self.grad = calculus.vector_grad()
        self.curl = calculus.curl()
        self.div = calculus.div()

    def residual(self, u: np.ndarray) -> tuple[float, float]:
        """(r(u), |Grad u|^2) with r(u) = |Grad u|^2 - 1/2 |Curl u|^2 - |div u|^2"""
        gradient = self.grad.codomain.norm(self.grad.apply(u)) ** 2
        curl = self.curl.codomain.norm(self.curl.apply(u)) ** 2
        divergence = self.div.codomain.norm(self.div.apply(u)) ** 2
        return gradient - 0.5 * curl - divergence, gradient


def friedrichs_check(spec: GridSpec, samples: int = 100, seed: int = 0) -> FriedrichsReport:
    """
    Evaluate the identity on random fields.

    Args:
        spec: Periodic grid
        samples: Number of random vector fields
        seed: Seed of the generator

    Returns:
        FriedrichsReport: Largest residual relative to |Grad u|^2 and in absolute terms
    """
    operators = FriedrichsOperators(PeriodicCalculus(spec))
    rng = np.random.default_rng(seed)
    dim = operators.grad.domain.dim
    relative = absolute = 0.0
    for _ in range(samples):
        residual, gradient = operators.residual(rng.standard_normal(dim))
        absolute = max(absolute, abs(residual))
        relative = max(relative, abs(residual) / gradient if gradient > 0 else abs(residual))
    logger.info(f"Friedrichs identity on N={spec.N}, d={spec.d}: max relative residual {relative:.3e}")
    return FriedrichsReport(spec, samples, relative, absolute)

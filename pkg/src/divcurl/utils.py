from typing import Sequence

import numpy as np
import sympy as sp

from grids.GridSpec import GridSpec
from linops.InnerProductSpace import InnerProductSpace
from .OscillatoryFamily import VARIABLES, evaluate

# Smooth periodic test functions in x1 and the last coordinate.
PROBE_FUNCTIONS = (
    "1",
    "cos({a}) + sin({b})",
    "exp(cos({a}))",
    "exp(sin({a} + {b}))",
    "1/(2 + cos({a}))",
)


def probe_functions(grid: GridSpec) -> list[np.ndarray]:
    a, b = VARIABLES[0], VARIABLES[grid.d - 1]
    points = grid.points()
    return [
        evaluate(sp.sympify(text.format(a=a, b=b), locals={str(a): a, str(b): b}), points).ravel()
        for text in PROBE_FUNCTIONS
    ]


def weak_gap(
    space: InnerProductSpace, fields: Sequence[np.ndarray], limit: np.ndarray, grid: GridSpec
) -> float:
    """max over probes phi and fields f of |<f - limit, phi e>| with phi copied to every component"""
    components = space.dim // grid.n_points
    gap = 0.0
    for phi in probe_functions(grid):
        probe = np.tile(phi, components)
        for field in fields:
            gap = max(gap, abs(space.inner(field - limit, probe)))
    return gap


def local_pairing_error(
    space: InnerProductSpace,
    u: np.ndarray,
    v: np.ndarray,
    U: np.ndarray,
    V: np.ndarray,
    grid: GridSpec,
) -> float:
    """max over probes phi of |<phi u, v> - <phi U, V>|, the localized pairing"""
    components = space.dim // grid.n_points
    error = 0.0
    for phi in probe_functions(grid):
        weight = np.tile(phi, components)
        error = max(error, abs(space.inner(weight * u, v) - space.inner(weight * U, V)))
    return error

"""
Oscillatory field families u_k(x) = U(x) + W(k x).

Profiles are sympy expressions in x1, x2, x3. W must be 2π-periodic with
zero mean; its highest Fourier mode is measured on a probe grid and bounds
the frequencies a grid can resolve without aliasing.
"""

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Sequence

import numpy as np
import sympy as sp

from errors import AliasingError, DimensionMismatchError, FamilyError, UnsupportedBCError
from grids.GridSpec import PERIODIC, GridSpec

logger = logging.getLogger(__name__)

VARIABLES = sp.symbols("x1 x2 x3", real=True)
PROBE_POINTS = {1: 64, 2: 64, 3: 32}
MEAN_ATOL = 1e-12
SPECTRUM_RTOL = 1e-10


def parse_expression(text: str, d: int) -> sp.Expr:
    names = {str(x): x for x in VARIABLES[:d]}
    try:
        expr = sp.sympify(text, locals=names)
    except (sp.SympifyError, SyntaxError, TypeError) as e:
        raise FamilyError(f"cannot parse expression {text!r}: {e}") from e
    stray = {str(s) for s in expr.free_symbols} - set(names)
    if stray:
        raise FamilyError(f"expression {text!r} uses unknown symbols {sorted(stray)}", d=d)
    return expr


def evaluate(expr: sp.Expr, coordinates: Sequence[np.ndarray]) -> np.ndarray:
    """Evaluate an expression on coordinate arrays of a common shape"""
    d = len(coordinates)
    function: Callable = sp.lambdify(VARIABLES[:d], expr, modules="numpy")
    values = np.asarray(function(*coordinates), dtype=np.float64)
    return np.broadcast_to(values, coordinates[0].shape).copy()


def sample_expressions(exprs: Sequence[sp.Expr], grid: GridSpec) -> np.ndarray:
    """Component-major samples of a vector of expressions at the grid points"""
    points = grid.points()
    return np.concatenate([evaluate(e, points).ravel() for e in exprs])


@dataclass(frozen=True, eq=False)
class OscillatoryFamily:
    macro: tuple[sp.Expr, ...]
    micro: tuple[sp.Expr, ...]
    frequencies: tuple[int, ...]
    d: int

    def __post_init__(self) -> None:
        if self.d not in (1, 2, 3):
            raise FamilyError(f"dimension must be 1, 2 or 3, got {self.d}")
        if len(self.macro) != len(self.micro) or not self.macro:
            raise FamilyError(
                f"macro has {len(self.macro)} components, micro has {len(self.micro)}"
            )
        frequencies = tuple(int(k) for k in self.frequencies)
        if not frequencies or frequencies[0] <= 0 or any(
            a >= b for a, b in zip(frequencies, frequencies[1:])
        ):
            raise FamilyError(f"frequencies must be positive and increasing, got {frequencies}")
        object.__setattr__(self, "frequencies", frequencies)
        allowed = set(VARIABLES[: self.d])
        for expr in self.macro + self.micro:
            if not expr.free_symbols <= allowed:
                raise FamilyError(f"{expr} uses variables beyond x{self.d}")
        mean = self.micro_mean
        if mean > MEAN_ATOL:
            raise FamilyError(f"micro profile has mean {mean:.3e}", mean=mean)
        logger.debug(f"Family with {self.components} components, micro mode {self.micro_mode}")

    @classmethod
    def from_strings(
        cls,
        macro: Sequence[str],
        micro: Sequence[str],
        frequencies: Sequence[int],
        d: int,
    ) -> "OscillatoryFamily":
        return cls(
            tuple(parse_expression(m, d) for m in macro),
            tuple(parse_expression(m, d) for m in micro),
            tuple(frequencies),
            d,
        )

    @property
    def components(self) -> int:
        return len(self.macro)

    @property
    def has_micro(self) -> bool:
        return any(expr != 0 for expr in self.micro)

    @cached_property
    def _spectra(self) -> list[np.ndarray]:
        M = PROBE_POINTS[self.d]
        axis = 2 * math.pi * np.arange(M) / M
        points = np.meshgrid(*([axis] * self.d), indexing="ij")
        return [np.fft.fftn(evaluate(w, points)) / M**self.d for w in self.micro]

    @cached_property
    def micro_mean(self) -> float:
        return max(float(abs(spectrum.flat[0])) for spectrum in self._spectra)

    @cached_property
    def micro_mode(self) -> int:
        """Largest |m_a| over significant Fourier modes of the micro profile"""
        M = PROBE_POINTS[self.d]
        modes = np.abs(np.fft.fftfreq(M, 1.0 / M)).astype(int)
        highest = 0
        for spectrum in self._spectra:
            magnitude = np.abs(spectrum)
            scale = magnitude.max()
            if scale == 0:
                continue
            significant = np.nonzero(magnitude > SPECTRUM_RTOL * max(scale, 1.0))
            for axis_modes in significant:
                if axis_modes.size:
                    highest = max(highest, int(modes[axis_modes].max()))
        if highest >= M // 2 - 1:
            raise FamilyError(
                f"micro profile is not resolved by {M} probe points per axis; "
                "use a 2π-periodic trigonometric profile"
            )
        return highest

    def at(self, k: int) -> tuple[sp.Expr, ...]:
        """Symbolic u_k"""
        scaled = {x: k * x for x in VARIABLES[: self.d]}
        return tuple(U + W.xreplace(scaled) for U, W in zip(self.macro, self.micro))


def sample(f: OscillatoryFamily, k: int, grid: GridSpec) -> np.ndarray:
    """
    Evaluate u_k at the colocated points of a periodic grid.

    Args:
        f: Family to sample
        k: Frequency
        grid: Periodic grid of the family's dimension

    Returns:
        np.ndarray: Component-major samples
    """
    if grid.d != f.d:
        raise DimensionMismatchError(f"family lives in d={f.d}, grid in d={grid.d}")
    if grid.bc != PERIODIC:
        raise UnsupportedBCError("families are sampled on periodic grids", bc=grid.bc)
    if k * f.micro_mode >= grid.N / 2:
        raise AliasingError(
            f"frequency {k} times micro mode {f.micro_mode} is not below N/2 = {grid.N / 2}",
            k=k,
            N=grid.N,
        )
    if f.has_micro and not math.isclose(grid.L, 2 * math.pi):
        logger.warning(f"Sampling a 2π-periodic micro profile on a box of length {grid.L}")
    points = grid.points()
    scaled = [k * x for x in points]
    return np.concatenate(
        [
            (evaluate(U, points) + evaluate(W, scaled)).ravel()
            for U, W in zip(f.macro, f.micro)
        ]
    )


def sample_macro(f: OscillatoryFamily, grid: GridSpec) -> np.ndarray:
    return sample_expressions(f.macro, grid)


def closed_form_residuals(f: OscillatoryFamily, k: int, grid: GridSpec) -> tuple[float, float]:
    """
    Grid norms of the exact div u_k and Curl u_k, from symbolic derivatives.

    Curl components j < k carry weight 2 so that the norm is the full-matrix one.
    """
    if f.components != f.d:
        raise FamilyError("closed-form div and Curl need a vector family")
    u = f.at(k)
    x = VARIABLES[: f.d]
    divergence = sum((sp.diff(u[j], x[j]) for j in range(f.d)), sp.Integer(0))
    curls = [
        sp.diff(u[j], x[l]) - sp.diff(u[l], x[j]) for j in range(f.d) for l in range(j + 1, f.d)
    ]
    volume = grid.h**grid.d
    points = grid.points()
    div_norm = math.sqrt(volume * float(np.sum(evaluate(divergence, points) ** 2)))
    curl_norm = math.sqrt(
        2 * volume * sum(float(np.sum(evaluate(c, points) ** 2)) for c in curls)
    )
    return div_norm, curl_norm

import itertools
import json
import math
from dataclasses import dataclass, field, replace
from typing import Any, Dict, Iterable, Sequence

import numpy as np

from errors import GridSpecError, UnsupportedBCError

PERIODIC = "periodic"
DIRICHLET = "dirichlet"
BOUNDARY_CONDITIONS = (PERIODIC, DIRICHLET)


@dataclass(frozen=True)
class GridSpec:
    """
    Uniform box [0, L)^d with N cells per axis.

    Args:
        d: Dimension, 1 to 3
        N: Cells per axis
        L: Axis length
        bc: "periodic" or "dirichlet"
        mask: Deactivated cells as index tuples, dirichlet only
    """

    d: int
    N: int
    L: float = 2 * math.pi
    bc: str = PERIODIC
    mask: frozenset = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        mask = frozenset(tuple(int(i) for i in cell) for cell in self.mask)
        object.__setattr__(self, "mask", mask)
        object.__setattr__(self, "L", float(self.L))
        problems = self._problems()
        if problems:
            raise GridSpecError("invalid grid: " + "; ".join(problems), problems=problems)

    def _problems(self) -> list[str]:
        problems = []
        if self.d not in (1, 2, 3):
            problems.append(f"d must be 1, 2 or 3, got {self.d}")
        if self.bc not in BOUNDARY_CONDITIONS:
            problems.append(f"bc must be one of {BOUNDARY_CONDITIONS}, got {self.bc!r}")
        if self.N < 2:
            problems.append(f"N must be at least 2, got {self.N}")
        elif self.bc == DIRICHLET and self.N < 3:
            problems.append("dirichlet grids need N >= 3 for an interior vertex")
        if not (math.isfinite(self.L) and self.L > 0):
            problems.append(f"L must be positive, got {self.L}")
        if self.mask:
            if self.bc != DIRICHLET:
                problems.append("mask is only valid with bc = dirichlet")
            bad = [c for c in self.mask if len(c) != self.d or not all(0 <= i < self.N for i in c)]
            if bad:
                problems.append(f"mask cells out of range: {sorted(bad)[:3]}")
            elif self.d in (1, 2, 3) and self.N >= 2 and len(self.mask) >= self.N**self.d:
                problems.append("mask deactivates every cell")
        return problems

    @property
    def h(self) -> float:
        return self.L / self.N

    @property
    def n_points(self) -> int:
        return self.N**self.d

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.N,) * self.d

    def active_cells(self) -> np.ndarray:
        active = np.ones(self.shape, dtype=bool)
        for cell in self.mask:
            active[cell] = False
        return active

    def points(self) -> list[np.ndarray]:
        """Colocated coordinates x_i = i h, one array per axis in ij indexing"""
        axis = np.arange(self.N) * self.h
        return list(np.meshgrid(*([axis] * self.d), indexing="ij"))

    def with_resolution(self, N: int) -> "GridSpec":
        if self.mask:
            raise GridSpecError("a masked grid cannot be re-resolved")
        return replace(self, N=N)

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {"d": self.d, "N": self.N, "L": self.L, "bc": self.bc}
        if self.mask:
            data["mask"] = [list(cell) for cell in sorted(self.mask)]
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "GridSpec":
        unknown = set(data) - {"d", "N", "L", "bc", "mask"}
        missing = {"d", "N"} - set(data)
        problems = [f"unknown grid key {k!r}" for k in sorted(unknown)]
        problems += [f"missing grid key {k!r}" for k in sorted(missing)]
        if problems:
            raise GridSpecError("invalid grid: " + "; ".join(problems), problems=problems)
        try:
            return cls(
                d=int(data["d"]),
                N=int(data["N"]),
                L=float(data.get("L", 2 * math.pi)),
                bc=str(data.get("bc", PERIODIC)),
                mask=frozenset(tuple(c) for c in data.get("mask", [])),
            )
        except (TypeError, ValueError) as e:
            raise GridSpecError(f"invalid grid: {e}") from e


def puncture(spec: GridSpec, lo: Sequence[int], hi: Sequence[int]) -> GridSpec:
    """
    Remove the box of cells lo <= i < hi from a dirichlet grid.

    The hole must stay strictly inside so that the outer boundary is untouched.
    """
    if spec.bc != DIRICHLET:
        raise UnsupportedBCError("holes are only supported on dirichlet grids", bc=spec.bc)
    lo, hi = [int(i) for i in lo], [int(i) for i in hi]
    if len(lo) != spec.d or len(hi) != spec.d:
        raise GridSpecError(f"hole corners need {spec.d} coordinates each")
    if any(l >= u for l, u in zip(lo, hi)):
        raise GridSpecError(f"empty hole {lo}..{hi}")
    if all(l <= 0 for l in lo) and all(u >= spec.N for u in hi):
        raise GridSpecError("hole covers every cell")
    if any(l < 1 for l in lo) or any(u > spec.N - 1 for u in hi):
        raise GridSpecError(f"hole {lo}..{hi} touches the outer boundary of an N={spec.N} grid")
    hole: Iterable[tuple[int, ...]] = itertools.product(*(range(l, u) for l, u in zip(lo, hi)))
    return replace(spec, mask=spec.mask | frozenset(hole))

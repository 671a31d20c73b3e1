import csv
import io
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from grids.GridSpec import GridSpec

logger = logging.getLogger(__name__)

CSV_HEADER = ("k", "I_k", "I_inf", "error", "res_div", "res_curl")
PROJECTION_HEADER = ("k", "projection_error", "divergence_residual")


def fit_decay_slope(ks: Sequence[int], values: Sequence[float]) -> Optional[float]:
    """Least-squares slope of log(value) against log(k) over positive values"""
    pairs = [(k, v) for k, v in zip(ks, values) if v > 0]
    if len(pairs) < 2:
        return None
    k, v = np.array(pairs, dtype=np.float64).T
    return float(np.polyfit(np.log(k), np.log(v), 1)[0])


def _format(value: Union[int, float]) -> str:
    return str(value) if isinstance(value, (int, np.integer)) else f"{value:.17g}"


def _write_csv(header: Sequence[str], rows: list[list], path: Optional[Union[str, Path]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows([[_format(x) for x in row] for row in rows])
    text = buffer.getvalue()
    if path is not None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    return text


@dataclass(frozen=True)
class ConvergenceRow:
    k: int
    value: float
    reference: float
    error: float
    res_div: float
    res_curl: float
    weak_gap: float = 0.0
    local_error: float = 0.0


@dataclass(frozen=True)
class ConvergenceTable:
    """Pairings <u_k, v_k> against the pairing of the weak limits, one grid"""

    grid: GridSpec
    rows: tuple[ConvergenceRow, ...]

    def __post_init__(self) -> None:
        ks = [row.k for row in self.rows]
        if ks != sorted(ks):
            raise ValueError(f"rows must be sorted by k, got {ks}")

    @property
    def ks(self) -> list[int]:
        return [row.k for row in self.rows]

    @property
    def errors(self) -> list[float]:
        return [row.error for row in self.rows]

    @property
    def max_error(self) -> float:
        return max(self.errors, default=0.0)

    @property
    def max_weak_gap(self) -> float:
        """Distance from the weak limit, tested against the smooth probe fields"""
        return max((row.weak_gap for row in self.rows), default=0.0)

    @property
    def max_local_error(self) -> float:
        return max((row.local_error for row in self.rows), default=0.0)

    @property
    def slope(self) -> Optional[float]:
        return fit_decay_slope(self.ks, self.errors)

    def to_csv(self, path: Optional[Union[str, Path]] = None) -> str:
        rows = [
            [r.k, r.value, r.reference, r.error, r.res_div, r.res_curl] for r in self.rows
        ]
        return _write_csv(CSV_HEADER, rows, path)


@dataclass(frozen=True)
class ProjectionRow:
    k: int
    projection_error: float
    divergence_residual: float


@dataclass(frozen=True)
class ProjectionTable:
    grid: GridSpec
    rows: tuple[ProjectionRow, ...]

    @property
    def max_error(self) -> float:
        return max((r.projection_error for r in self.rows), default=0.0)

    @property
    def min_error(self) -> float:
        return min((r.projection_error for r in self.rows), default=0.0)

    def to_csv(self, path: Optional[Union[str, Path]] = None) -> str:
        rows = [[r.k, r.projection_error, r.divergence_residual] for r in self.rows]
        return _write_csv(PROJECTION_HEADER, rows, path)

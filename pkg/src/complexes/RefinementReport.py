import csv
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Optional, Union

from errors import ValidationError
from linops.LinearMap import LinearMap, adjoint
from linops.WeightedSVD import RANK_RTOL, weighted_svd
from .HodgeDecomposition import harmonic_dimension
from .ShortSequence import ShortSequence

logger = logging.getLogger(__name__)

CSV_HEADER = ("N", "poincare_A0", "poincare_A1star", "harmonic_dim")


@dataclass(frozen=True)
class RefinementLevel:
    N: int
    poincare_A0: float
    poincare_A1star: float
    harmonic_dim: int


@dataclass(frozen=True)
class RefinementReport:
    """
    Discrete stand-in for compactness of a sequence: Poincaré constants that
    stay bounded and a harmonic dimension that does not change under refinement.
    """

    levels: tuple[RefinementLevel, ...]

    def __post_init__(self) -> None:
        resolutions = [level.N for level in self.levels]
        if resolutions != sorted(resolutions):
            raise ValueError(f"levels must be sorted by N, got {resolutions}")

    @property
    def harmonic_dims(self) -> list[int]:
        return [level.harmonic_dim for level in self.levels]

    def is_stable(self) -> bool:
        return len(set(self.harmonic_dims)) <= 1

    def to_csv(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(CSV_HEADER)
            for level in self.levels:
                writer.writerow(
                    [
                        level.N,
                        f"{level.poincare_A0:.17g}",
                        f"{level.poincare_A1star:.17g}",
                        level.harmonic_dim,
                    ]
                )
        return path


def _constant(A: LinearMap, rtol: float) -> float:
    # 0.0 stands for a trivial range, where every constant works.
    return weighted_svd(A, rtol=rtol, vectors=False).poincare


def refinement_diagnostics(
    builder: Callable[[int], ShortSequence],
    resolutions: Iterable[int],
    max_workers: int = 1,
    rtol: float = RANK_RTOL,
    harmonic_rtol: Optional[float] = None,
) -> RefinementReport:
    """
    Evaluate Poincaré constants of A0 and A1* and the harmonic dimension per resolution.

    Args:
        builder: Maps a resolution N to a sequence
        resolutions: At least two distinct resolutions
        max_workers: Levels evaluated concurrently
        rtol: Relative rank threshold
        harmonic_rtol: Separate threshold for the harmonic dimension, defaults to rtol

    Returns:
        RefinementReport: Levels sorted by N
    """
    resolutions = sorted(set(resolutions))
    if len(resolutions) < 2:
        raise ValidationError(
            "refinement diagnostics need at least two resolutions", resolutions=resolutions
        )

    def level(N: int) -> RefinementLevel:
        S = builder(N)
        logger.debug(f"Refinement level N={N}: {S}")
        return RefinementLevel(
            N=N,
            poincare_A0=_constant(S.A0, rtol),
            poincare_A1star=_constant(adjoint(S.A1), rtol),
            harmonic_dim=harmonic_dimension(S, rtol=harmonic_rtol or rtol),
        )

    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        levels = tuple(pool.map(level, resolutions))
    report = RefinementReport(levels)
    if not report.is_stable():
        logger.warning(f"Harmonic dimension changes under refinement: {report.harmonic_dims}")
    return report

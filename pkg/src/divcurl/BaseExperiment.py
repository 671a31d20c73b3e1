from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Sequence, TypeVar

from grids.GridSpec import GridSpec

Row = TypeVar("Row")


class BaseExperiment(ABC):
    """Base interface for experiments that sweep a list of frequencies on one grid"""

    name: str  # name used in logs and the run ledger

    def __init__(self, grid: GridSpec, frequencies: Sequence[int], max_workers: int = 1):
        self.grid = grid
        self.frequencies = tuple(sorted(frequencies))
        self.max_workers = max_workers

    @abstractmethod
    def run(self) -> Any:
        """
        Evaluate every frequency and collect the rows

        Returns:
            Any: The experiment's table or report
        """
        pass

    def map_frequencies(self, row: Callable[[int], Row]) -> tuple[Row, ...]:
        # Rows come back in frequency order whatever the schedule.
        with ThreadPoolExecutor(max_workers=self.max_workers) as pool:
            return tuple(pool.map(row, self.frequencies))

    def __str__(self):
        return f"{self.name} (d={self.grid.d}, N={self.grid.N}, k={list(self.frequencies)})"

    def __repr__(self):
        return f"<{self.__class__.__name__}(name='{self.name}', grid={self.grid!r})>"

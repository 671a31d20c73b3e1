from abc import ABC, abstractmethod

from complexes.ShortSequence import ShortSequence
from .GridSpec import GridSpec


class BaseGridComplex(ABC):
    """Base interface for all discrete complexes built on a grid"""

    name: str  # short name of the complex

    def __init__(self, spec: GridSpec):
        self.spec = spec

    @abstractmethod
    def sequences(self) -> tuple[ShortSequence, ...]:
        """
        Assemble and validate the short sequences of the complex

        Returns:
            tuple[ShortSequence, ...]: Consecutive pairs of the complex
        """
        pass

    def build(self) -> ShortSequence:
        return self.sequences()[0]

    def __str__(self):
        return f"{self.name} (d={self.spec.d}, N={self.spec.N}, {self.spec.bc})"

    def __repr__(self):
        return f"<{self.__class__.__name__}(name='{self.name}', spec={self.spec!r})>"

import logging

from complexes.ShortSequence import ShortSequence, validate_sequence
from .BaseGridComplex import BaseGridComplex
from .GridSpec import GridSpec
from .PeriodicCalculus import PeriodicCalculus

logger = logging.getLogger(__name__)


class PeriodicDeRham(BaseGridComplex):
    """(grad, Curl) on the torus with colocated forward differences"""

    name = "periodic de Rham"

    def __init__(self, spec: GridSpec):
        super().__init__(spec)
        self.calculus = PeriodicCalculus(spec)

    def sequences(self) -> tuple[ShortSequence, ...]:
        grad = self.calculus.grad()
        curl = self.calculus.curl()
        logger.info(f"Built {self}: grad {grad.shape}, Curl {curl.shape}")
        return (validate_sequence(grad, curl, label="derham"),)

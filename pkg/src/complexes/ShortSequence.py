import logging
from dataclasses import dataclass

from errors import NotASequenceError, SpaceMismatchError
from linops.InnerProductSpace import InnerProductSpace
from linops.LinearMap import LinearMap, adjoint

logger = logging.getLogger(__name__)

SEQUENCE_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class ShortSequence:
    """
    Pair of maps H0 -> H1 -> H2 whose composition vanishes.

    In finite dimensions every map is everywhere defined and closed with
    closed range, so the sequence property is the only condition left.
    Build instances through validate_sequence.
    """

    A0: LinearMap
    A1: LinearMap
    residual: float
    label: str = ""

    @property
    def H0(self) -> InnerProductSpace:
        return self.A0.domain

    @property
    def H1(self) -> InnerProductSpace:
        return self.A0.codomain

    @property
    def H2(self) -> InnerProductSpace:
        return self.A1.codomain

    def __str__(self) -> str:
        return f"{self.label or 'sequence'}({self.H0.dim} -> {self.H1.dim} -> {self.H2.dim})"


def validate_sequence(
    A0: LinearMap, A1: LinearMap, label: str = "", rtol: float = SEQUENCE_RTOL
) -> ShortSequence:
    """
    Check rge(A0) is contained in ker(A1).

    Args:
        A0: First map
        A1: Second map, starting where A0 ends
        label: Name for logs and reports
        rtol: Residual bound relative to 1 + |A0| |A1|

    Returns:
        ShortSequence: The validated pair with its residual
    """
    if not A0.codomain.same_as(A1.domain):
        raise SpaceMismatchError(
            f"A0 lands in {A0.codomain} but A1 starts from {A1.domain}"
        )
    residual = A1.compose(A0).operator_norm()
    if residual > 0:
        bound = rtol * (1.0 + A0.operator_norm() * A1.operator_norm())
        if residual > bound:
            raise NotASequenceError(residual, bound)
    logger.debug(f"Validated {label or 'sequence'} with residual {residual:.3e}")
    return ShortSequence(A0, A1, residual, label)


def dual_sequence(S: ShortSequence) -> ShortSequence:
    """(A1*, A0*), again a sequence"""
    label = f"{S.label}*" if S.label else "dual"
    return validate_sequence(adjoint(S.A1), adjoint(S.A0), label=label)

"""
Orthogonal splitting of the middle space of a short sequence into exact,
harmonic and coexact fields.
"""

import logging
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from errors import DecompositionError, DimensionMismatchError
from linops.InnerProductSpace import InnerProductSpace
from linops.LinearMap import LinearMap, adjoint
from linops.OrthonormalBasis import OrthonormalBasis, kernel_basis, range_basis
from linops.Projector import PROJECTOR_ATOL, Projector, projector_onto
from linops.WeightedSVD import RANK_RTOL, weighted_svd
from .ShortSequence import ShortSequence

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class HodgeDecomposition:
    p_exact: Projector
    p_harmonic: Projector
    p_coexact: Projector
    harmonic_dim: int

    def __post_init__(self) -> None:
        self.check()

    @property
    def space(self) -> InnerProductSpace:
        return self.p_exact.space

    @property
    def projectors(self) -> tuple[Projector, Projector, Projector]:
        return self.p_exact, self.p_harmonic, self.p_coexact

    def check(self, atol: float = PROJECTOR_ATOL) -> None:
        """Raise DecompositionError unless the projectors split the space orthogonally"""
        names = ("exact", "harmonic", "coexact")
        for i, P in enumerate(self.projectors):
            for j, Q in enumerate(self.projectors):
                if i == j:
                    continue
                overlap = float(np.linalg.norm(P.matrix @ Q.matrix))
                if overlap > atol:
                    raise DecompositionError(
                        f"{names[i]} and {names[j]} projectors overlap", defect=overlap
                    )
        total = sum(P.matrix for P in self.projectors) - np.eye(self.space.dim)
        defect = float(np.linalg.norm(total)) if self.space.dim else 0.0
        if defect > atol:
            raise DecompositionError("projectors do not resolve the identity", defect=defect)
        if self.p_harmonic.rank != self.harmonic_dim:
            raise DecompositionError(
                f"harmonic projector has rank {self.p_harmonic.rank}, expected {self.harmonic_dim}"
            )


class FieldSplit(NamedTuple):
    exact: np.ndarray
    harmonic: np.ndarray
    coexact: np.ndarray


def harmonic_stack(S: ShortSequence) -> LinearMap:
    """(A0*; A1), whose kernel is ker(A0*) ∩ ker(A1)"""
    return adjoint(S.A0).stack(S.A1)


def harmonic_basis(
    S: ShortSequence, rank_tol: Optional[float] = None, rtol: float = RANK_RTOL
) -> OrthonormalBasis:
    return kernel_basis(harmonic_stack(S), rank_tol=rank_tol, rtol=rtol)


def harmonic_dimension(
    S: ShortSequence, rank_tol: Optional[float] = None, rtol: float = RANK_RTOL
) -> int:
    svd = weighted_svd(harmonic_stack(S), rank_tol=rank_tol, rtol=rtol, vectors=False)
    dim = svd.nullity
    logger.debug(f"Harmonic dimension of {S}: {dim}")
    return dim


def hodge_decompose(
    S: ShortSequence, rank_tol: Optional[float] = None, rtol: float = RANK_RTOL
) -> HodgeDecomposition:
    """
    Build the three projectors of the middle space.

    Args:
        S: Validated sequence
        rank_tol: Absolute rank threshold, overrides rtol
        rtol: Rank threshold relative to the largest singular value of each map

    Returns:
        HodgeDecomposition: Checked projectors onto rge(A0), harmonic fields and rge(A1*)
    """
    exact = range_basis(S.A0, rank_tol=rank_tol, rtol=rtol)
    harmonic = harmonic_basis(S, rank_tol=rank_tol, rtol=rtol)
    coexact = range_basis(adjoint(S.A1), rank_tol=rank_tol, rtol=rtol)
    logger.info(
        f"Hodge decomposition of {S}: ranks {exact.rank} + {harmonic.rank} + {coexact.rank}"
    )
    return HodgeDecomposition(
        projector_onto(exact),
        projector_onto(harmonic),
        projector_onto(coexact),
        harmonic.rank,
    )


def split_field(
    S: ShortSequence, v: np.ndarray, decomposition: Optional[HodgeDecomposition] = None
) -> FieldSplit:
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (S.H1.dim,):
        raise DimensionMismatchError(f"field has shape {v.shape}, expected ({S.H1.dim},)")
    decomposition = decomposition or hodge_decompose(S)
    split = FieldSplit(*(P.apply(v) for P in decomposition.projectors))
    logger.debug(
        f"Split residuals: |A1 exact| = {S.H2.norm(S.A1.apply(split.exact)):.3e}, "
        f"|A0* coexact| = {S.H0.norm(adjoint(S.A0).apply(split.coexact)):.3e}"
    )
    return split


def abstract_divcurl_identity(
    decomposition: HodgeDecomposition, u: np.ndarray, v: np.ndarray
) -> float:
    """
    Defect of <u, v> = <u, P_c v> + <P_e u, v> + <P_h u, P_h v>.

    The identity holds for every pair because ker(A1) = rge(A0) ⊕ harmonic
    and rge(A1*) is orthogonal to both.
    """
    H = decomposition.space
    harmonic = decomposition.p_harmonic
    lhs = H.inner(u, v)
    rhs = (
        H.inner(u, decomposition.p_coexact.apply(v))
        + H.inner(decomposition.p_exact.apply(u), v)
        + H.inner(harmonic.apply(u), harmonic.apply(v))
    )
    return abs(lhs - rhs)

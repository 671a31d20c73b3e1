"""
Matrix Market coordinate I/O for operators, grams and projectors.

Values are written with 17 significant digits so that a read back
reproduces every float64 entry exactly.
"""

import logging
from pathlib import Path
from typing import TYPE_CHECKING, Union

import scipy.sparse as sps
from scipy.io import mmread, mmwrite

from errors import SpaceMismatchError
from .InnerProductSpace import InnerProductSpace
from .LinearMap import LinearMap
from .utils import Matrix

if TYPE_CHECKING:
    from complexes.HodgeDecomposition import HodgeDecomposition
    from complexes.ShortSequence import ShortSequence

logger = logging.getLogger(__name__)

MM_PRECISION = 17

PathLike = Union[str, Path]


def write_matrix(path: PathLike, matrix: Matrix) -> Path:
    path = Path(path)
    mmwrite(str(path), sps.coo_matrix(matrix), precision=MM_PRECISION, symmetry="general")
    return path


def read_matrix(path: PathLike) -> sps.csr_matrix:
    return sps.csr_matrix(mmread(str(path)), dtype=float)


def export_sequence(S: "ShortSequence", directory: PathLike) -> list[Path]:
    """
    Write A0, A1 and the three grams of a sequence.

    Args:
        S: Sequence to export
        directory: Target directory, created if missing

    Returns:
        list[Path]: Written files in the order A0, A1, gram0, gram1, gram2
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    files = {
        "A0.mtx": S.A0.entries,
        "A1.mtx": S.A1.entries,
        "gram0.mtx": S.A0.domain.gram,
        "gram1.mtx": S.A0.codomain.gram,
        "gram2.mtx": S.A1.codomain.gram,
    }
    written = [write_matrix(directory / name, matrix) for name, matrix in files.items()]
    logger.info(f"Exported {len(written)} matrices to {directory}")
    return written


def _space(directory: Path, name: str, dim: int, label: str) -> InnerProductSpace:
    path = directory / name
    if not path.exists():
        return InnerProductSpace.identity(dim, label)
    gram = read_matrix(path)
    if gram.shape != (dim, dim):
        raise SpaceMismatchError(
            f"{name} has shape {gram.shape}, operators need {(dim, dim)}"
        )
    return InnerProductSpace(dim, gram, label)


def import_sequence(directory: PathLike) -> tuple[LinearMap, LinearMap]:
    """Read A0.mtx and A1.mtx, with identity grams where gram files are absent"""
    directory = Path(directory)
    A0 = read_matrix(directory / "A0.mtx")
    A1 = read_matrix(directory / "A1.mtx")
    if A0.shape[0] != A1.shape[1]:
        raise SpaceMismatchError(
            f"A0 maps into dimension {A0.shape[0]} but A1 starts from {A1.shape[1]}"
        )
    H0 = _space(directory, "gram0.mtx", A0.shape[1], "H0")
    H1 = _space(directory, "gram1.mtx", A0.shape[0], "H1")
    H2 = _space(directory, "gram2.mtx", A1.shape[0], "H2")
    return LinearMap(H0, H1, A0, "A0"), LinearMap(H1, H2, A1, "A1")


def export_projectors(decomposition: "HodgeDecomposition", directory: PathLike) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    return [
        write_matrix(directory / "P_exact.mtx", decomposition.p_exact.matrix),
        write_matrix(directory / "P_harmonic.mtx", decomposition.p_harmonic.matrix),
        write_matrix(directory / "P_coexact.mtx", decomposition.p_coexact.matrix),
    ]

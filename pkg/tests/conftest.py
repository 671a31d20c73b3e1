import math

import numpy as np
import pytest

from grids.GridSpec import DIRICHLET, GridSpec
from linops.InnerProductSpace import InnerProductSpace
from linops.LinearMap import LinearMap, adjoint
from linops.OrthonormalBasis import range_basis
from linops.Projector import projector_onto
from linops.utils import dense


@pytest.fixture
def torus_2d() -> GridSpec:
    return GridSpec(d=2, N=8)


@pytest.fixture
def torus_3d() -> GridSpec:
    return GridSpec(d=3, N=4)


@pytest.fixture
def fine_torus_2d() -> GridSpec:
    return GridSpec(d=2, N=64)


@pytest.fixture
def square() -> GridSpec:
    return GridSpec(d=2, N=4, L=1.0, bc=DIRICHLET)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


def euclidean(dim: int, label: str = "") -> InnerProductSpace:
    return InnerProductSpace.identity(dim, label)


def matrix_map(entries, domain=None, codomain=None, label: str = "A") -> LinearMap:
    entries = np.asarray(entries, dtype=np.float64)
    domain = domain or euclidean(entries.shape[1])
    codomain = codomain or euclidean(entries.shape[0])
    return LinearMap(domain, codomain, entries, label)


def circle_poincare(N: int) -> float:
    return (math.pi / N) / math.sin(math.pi / N)


def random_spd_space(rng: np.random.Generator, dim: int) -> InnerProductSpace:
    factor = rng.standard_normal((dim, dim))
    return InnerProductSpace(dim, factor @ factor.T + dim * np.eye(dim), "random")


def harmonic_dimension_oracle(S) -> int:
    """dim H1 - rank A0 - rank A1, with ranks from numpy on the raw matrices"""
    rank0 = np.linalg.matrix_rank(dense(S.A0.entries)) if S.H0.dim and S.H1.dim else 0
    rank1 = np.linalg.matrix_rank(dense(S.A1.entries)) if S.H1.dim and S.H2.dim else 0
    return S.H1.dim - int(rank0) - int(rank1)


def projector_product_oracle(S) -> int:
    """Multiplicity of the eigenvalue 1 of (I - P_exact)(I - P_coexact)"""
    identity = np.eye(S.H1.dim)
    exact = projector_onto(range_basis(S.A0)).matrix
    coexact = projector_onto(range_basis(adjoint(S.A1))).matrix
    eigenvalues = np.linalg.eigvals((identity - exact) @ (identity - coexact))
    return int(np.count_nonzero(np.abs(eigenvalues - 1.0) < 1e-8))

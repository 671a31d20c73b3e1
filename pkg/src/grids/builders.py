from complexes.ShortSequence import ShortSequence
from .BaseGridComplex import BaseGridComplex
from .DirichletDeRham import DirichletDeRham
from .GridSpec import PERIODIC, GridSpec
from .PeriodicDeRham import PeriodicDeRham
from .PeriodicGradGrad import PeriodicGradGrad


def derham_complex(spec: GridSpec) -> BaseGridComplex:
    """Backend for the de Rham complex matching the boundary condition"""
    if spec.bc == PERIODIC:
        return PeriodicDeRham(spec)
    return DirichletDeRham(spec)


def build_derham(spec: GridSpec) -> ShortSequence:
    return derham_complex(spec).build()


def build_gradgrad(spec: GridSpec) -> tuple[ShortSequence, ShortSequence]:
    first, second = PeriodicGradGrad(spec).sequences()
    return first, second

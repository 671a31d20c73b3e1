"""
Exception hierarchy shared by all packages.

Every error knows the CLI exit code it maps to and can render itself as a
machine-readable payload for standard error.
"""

from typing import Any, Dict


class DivCurlError(Exception):
    """Base class for all errors raised by the toolkit"""

    exit_code: int = 1

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details = details

    @property
    def name(self) -> str:
        name = self.__class__.__name__
        return name[: -len("Error")] if name.endswith("Error") else name

    def to_dict(self) -> Dict[str, Any]:
        return {"error": self.name, "message": self.message, "details": self.details}


class ValidationError(DivCurlError):
    """Input rejected before any numerical work happened"""

    exit_code = 1


class ConfigError(ValidationError):
    """Run configuration could not be parsed or validated"""

    def __init__(self, message: str, problems: list[str] | None = None, **details: Any):
        self.problems = list(problems or [])
        if self.problems:
            message = f"{message}: " + "; ".join(self.problems)
        super().__init__(message, problems=self.problems, **details)


class GridSpecError(ValidationError):
    pass


class UnsupportedBCError(ValidationError):
    pass


class UnsupportedDimError(ValidationError):
    pass


class InvalidSpaceError(ValidationError):
    """Gram matrix is malformed, non-symmetric or not positive definite"""


class SpaceMismatchError(ValidationError):
    pass


class DimensionMismatchError(ValidationError):
    pass


class AliasingError(ValidationError):
    pass


class FamilyError(ValidationError):
    """Oscillatory family is malformed (bad expression, non-zero micro mean, ...)"""


class NumericalError(DivCurlError):
    """A numerical assertion about the discrete objects failed"""

    exit_code = 2


class NotASequenceError(NumericalError):
    def __init__(self, residual: float, bound: float):
        super().__init__(
            f"A1*A0 does not vanish: residual {residual:.3e} exceeds {bound:.3e}",
            residual=residual,
            bound=bound,
        )
        self.residual = residual
        self.bound = bound


class TrivialRangeError(NumericalError):
    def __init__(self, message: str = "trivial range: no Poincaré constant"):
        super().__init__(message)


class DecompositionError(NumericalError):
    """A projector or reduced-operator invariant is violated"""

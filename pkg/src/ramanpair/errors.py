"""Exception hierarchy shared by all modules.

Numerical failures carry the (module, operation, sample) triple so that the
command-line layer can report exactly where a computation broke down.
"""

from __future__ import annotations


class ConfigError(ValueError):
    """Invalid configuration, parameter override or grid specification."""


class NumericalError(ArithmeticError):
    """Base class for numerical failures.

    Attributes mirror the report printed by the CLI: the module and operation
    that failed and a mapping of sample coordinates (omega, z, Δτ_p, ...).
    """

    def __init__(self, message, module="", operation="", sample=None):
        self.module = module
        self.operation = operation
        self.sample = dict(sample or {})
        super().__init__(message)

    def describe(self) -> str:
        coords = ", ".join(f"{k}={v!r}" for k, v in self.sample.items())
        return f"{self.module}.{self.operation} failed at ({coords}): {self.args[0]}"


class DegenerateParameterError(NumericalError):
    """A composite detuning or denominator that must be nonzero vanished."""


class PoleError(NumericalError):
    """D(omega) vanishes at the requested frequency."""


class DegenerateModeError(NumericalError):
    """The two eigenmodes coincide (U+ = U- or W+ = W-)."""


class BranchFlipError(NumericalError):
    """Square-root branch tracking could not pair neighbouring samples."""


class ConvergenceError(NumericalError):
    """An iterative refinement (ODE step doubling, quadrature) did not settle."""


class CutoffError(NumericalError):
    """Fock-space truncation is too small for the requested accuracy."""


class GeneratorMismatchError(NumericalError):
    """The truncated generator does not reproduce the mode equations."""


class LogDomainError(NumericalError):
    """An amplitude vanished so its logarithm is undefined."""


class ZeroDipoleError(NumericalError):
    """A transition dipole moment of zero was supplied."""

"""Exception types raised by the numerical modules."""


class FermiSzegoError(Exception):
    """Base class for all package errors."""


class ValidationError(FermiSzegoError, ValueError):
    """Malformed input (grid, config, potential)."""


class NumericalError(FermiSzegoError, ArithmeticError):
    """A numerical routine could not deliver a trustworthy result."""


class BoxTooSmall(ValidationError):
    pass


class EigenSolveError(NumericalError):
    pass


class AmbiguousFermiLevel(NumericalError):
    def __init__(self, mu, eigenvalue, gap_tol):
        self.mu = mu
        self.eigenvalue = eigenvalue
        self.gap_tol = gap_tol
        super().__init__(
            f"Fermi level {mu!r} is within {gap_tol:.3g} of eigenvalue {eigenvalue!r}"
        )


class MultiCutDetected(NumericalError):
    def __init__(self, energy, components):
        self.energy = energy
        self.components = components
        super().__init__(
            f"{{V <= {energy!r}}} has {len(components)} components: {components}"
        )


class EmptyDroplet(NumericalError):
    pass


class DegenerateEdge(NumericalError):
    pass


class OutOfDroplet(ValidationError):
    pass


class SingularDiagonal(NumericalError):
    pass


class SymbolTooLarge(NumericalError):
    pass


class NormTooLarge(NumericalError):
    pass


class NumericalDegeneracy(NumericalError):
    pass


class NotMultiCut(ValidationError):
    pass


class SeparationFailed(NumericalError):
    pass


class TruncationWarning(UserWarning):
    """Fourier tail above the configured threshold."""

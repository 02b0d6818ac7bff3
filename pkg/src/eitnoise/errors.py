"""Exception hierarchy shared by all eitnoise modules."""


class EITError(Exception):
    """Base class for every error raised by eitnoise."""


class NoConvergence(EITError):
    """An iterative solver failed to converge within its budget."""


class DegenerateSteadyState(NoConvergence):
    """The steady-state manifold is not unique (e.g. probe and control both off)."""


class DegenerateDenominator(EITError, ZeroDivisionError):
    """A closed-form expression hit a vanishing denominator."""


# Alias used by the population-exchange helpers.
DivisionDegenerate = DegenerateDenominator


class NoRoot(EITError):
    """A bracketing root search found no sign change."""


class GridMismatch(EITError, ValueError):
    """Two frequency grids that must coincide do not."""


class DegenerateConditioning(EITError, ZeroDivisionError):
    """A conditional variance was requested on a zero-variance quadrature."""


class StepUnderflow(EITError):
    """The adaptive integrator could not make progress.

    Attributes
    ----------
    stiff_ratio : float
        Fastest rate of the system times the requested integration span.
    """

    def __init__(self, message, stiff_ratio=float("nan")):
        super().__init__(message)
        self.stiff_ratio = stiff_ratio

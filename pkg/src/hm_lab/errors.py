"""Exception hierarchy shared by every module of the laboratory."""


class HMLabError(Exception):
    """Base class for all errors raised by hm_lab."""


class DomainError(HMLabError, ValueError):
    """An argument lies outside the domain of the operation."""


class OutOfChartError(DomainError):
    """A point does not lie in the chart r > r_plus."""


class StepTooLargeError(DomainError):
    """A finite-difference stencil would leave the chart."""


class UnsupportedDimensionError(DomainError):
    """The operation is only defined for other dimensions."""


class InversionError(HMLabError):
    """Inverting the profile V failed outside its monotone neighbourhood."""


class ConvergenceError(HMLabError):
    """A limit, quadrature or extrapolation did not converge."""

"""Exception hierarchy for isoradial.

Every failure mode that callers are expected to branch on gets its own
class; plain ValueError is reserved for programming errors (bad argument
types, malformed shapes).
"""


class IsoradialError(Exception):
    """Base class for all package-specific errors."""


class DomainError(IsoradialError, ValueError):
    """Argument outside the mathematical domain of the function."""


class InvalidDensityError(IsoradialError):
    """Density profile violates its contract (negative values, bad table)."""


class DivergentMassError(IsoradialError):
    """The radial mass integral of f(r) r^(n-1) does not converge."""


class DisconnectedSupportError(IsoradialError):
    """supp(f) is not an interval, so no monotone transport exists."""


class DimensionMismatchError(IsoradialError):
    """Operands were built for different ambient dimensions."""


class OutOfRangeError(IsoradialError):
    """Query point has no grid coverage on the tabulated map."""


class NonSmoothDensityError(IsoradialError):
    """Finite differences of log f are too noisy for curvature estimates."""


class UnboundedAtZeroError(IsoradialError):
    """The density profile is unbounded near the origin."""


class OverlappingIntervalsError(IsoradialError):
    """Interval union has intervals with overlapping interiors."""


class SupportBoundsError(IsoradialError):
    """Interval endpoint lies outside the open support of the measure."""


class DegenerateDrawError(IsoradialError):
    """A normal draw had vanishing norm twice in a row."""


class BoundViolationError(IsoradialError):
    """A randomized audit found a set violating the profile lower bound.

    Carries the full audit report in ``report`` (the witness set is
    ``report.witness``); this signals an implementation bug, not a
    property of the input measure.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report

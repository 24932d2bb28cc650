"""Exception and warning types shared across the package.

The CLI maps these onto exit codes: RangeError -> 2, NumericalError -> 3.
"""


class RevBesselError(Exception):
    """Base class for all package-specific errors."""


class RangeError(RevBesselError):
    """Parameters or evaluation point outside the admissible domain.

    Raised for alpha below the -1+delta margin, for evaluation at the
    singular point z=0, and for points excluded by a routine's precondition
    (e.g. the turning point itself).
    """


class TurningPointError(RangeError):
    """Evaluation too close to the turning point z1 for this routine."""


class NumericalError(RevBesselError):
    """A numerical process failed: non-convergence, precision exhaustion,
    or an internal consistency check tripping."""


class BranchError(NumericalError):
    """Closed-form and quadrature branch tracking disagree; the caller
    should fall back to the quadrature value."""


class SecularTermError(RevBesselError):
    """A trigonometric integrand carries a nonzero mean value.

    Integrating it would leave the trig-polynomial ring (a phi-linear term
    would appear), which violates a structural assumption of the exponent
    coefficient recursion.  Never silently dropped.
    """

    def __init__(self, coefficient, order=None):
        self.coefficient = coefficient
        self.order = order
        msg = "zero-frequency integrand coefficient is nonzero: %r" % (coefficient,)
        if order is not None:
            msg += " (at recursion order %s)" % order
        super().__init__(msg)


class RegionWarning(UserWarning):
    """Evaluation point lies outside the documented validity region for the
    chosen solution index; the value is still returned."""


class AccuracyWarning(UserWarning):
    """Two internal evaluation methods disagree beyond the expected level."""

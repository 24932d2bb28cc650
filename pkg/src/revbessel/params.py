"""Problem parameters and the arbitrary-precision value convention.

The pair (n, a) fixes everything else:

    u = n + 1/2,   alpha = (a - 2)/u,   sigma = sqrt(1 + alpha).

Admissibility requires alpha >= -1 + delta for some margin delta > 0, which
keeps the two turning points

    z_{1,2} = -alpha/2 +- i*sigma

strictly complex (sigma real positive).

u, alpha and sigma^2 are kept as exact ``Fraction`` values so that symbolic
coefficient tables and the oracle can evaluate them without rounding; float
mirrors are provided for the double-precision mapping pipeline.

Arbitrary-precision complex values ("BigComplex") are plain ``mpmath.mpc``
numbers.  The working precision travels with the mpmath context rather than
with each value; every oracle routine accepts a ``dps`` argument (decimal
digits, default 50) and performs its arithmetic inside ``mp.workdps``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

import mpmath

from .errors import RangeError

BigComplex = mpmath.mpc

DEFAULT_DELTA = 0.05
DEFAULT_DPS = 50


def exact_number(x: object) -> Fraction:
    """Convert a user-supplied number to an exact Fraction.

    Floats are read through their shortest decimal repr, so a = 1.2 means
    the exact rational 6/5 (not the binary double nearest to it).  This is
    the convention used throughout: parameters are decimal literals.
    """
    if isinstance(x, Rational):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise RangeError("parameter must be finite, got %r" % (x,))
        return Fraction(str(x))
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError("cannot convert %r to an exact rational" % (x,))


@dataclass(frozen=True)
class ProblemParams:
    """Degree/parameter pair with exact derived quantities.

    Attributes
    ----------
    n : nonnegative degree
    a : exact rational parameter
    delta : admissibility margin; requires alpha >= -1 + delta
    """

    n: int
    a: Fraction
    delta: float = DEFAULT_DELTA
    u: Fraction = field(init=False)
    alpha: Fraction = field(init=False)
    sigma_sq: Fraction = field(init=False)

    def __init__(self, n: int, a: object, delta: float = DEFAULT_DELTA) -> None:
        if not isinstance(n, int) or isinstance(n, bool) or n < 0:
            raise RangeError("degree n must be a nonnegative integer, got %r" % (n,))
        if not (0.0 < delta < 1.0):
            raise RangeError("delta must lie in (0, 1), got %r" % (delta,))
        a_exact = exact_number(a)
        u = Fraction(2 * n + 1, 2)
        alpha = (a_exact - 2) / u
        sigma_sq = 1 + alpha
        if alpha < -1 + Fraction(str(delta)):
            raise RangeError(
                "alpha = (a-2)/(n+1/2) = %s violates alpha >= -1 + delta "
                "(delta = %s)" % (float(alpha), delta)
            )
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "a", a_exact)
        object.__setattr__(self, "delta", float(delta))
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "sigma_sq", sigma_sq)

    # float mirrors for the double-precision pipeline

    @property
    def n_int(self) -> int:
        return self.n

    @property
    def a_float(self) -> float:
        return float(self.a)

    @property
    def u_float(self) -> float:
        return float(self.u)

    @property
    def alpha_float(self) -> float:
        return float(self.alpha)

    @property
    def sigma(self) -> float:
        return math.sqrt(float(self.sigma_sq))

    @property
    def z1(self) -> complex:
        """Upper turning point -alpha/2 + i*sigma."""
        return complex(-0.5 * self.alpha_float, self.sigma)

    @property
    def z2(self) -> complex:
        return complex(-0.5 * self.alpha_float, -self.sigma)

    def sigma_mp(self) -> mpmath.mpf:
        """sigma at the current mpmath working precision."""
        return mpmath.mp.sqrt(mpmath.mpf(self.sigma_sq.numerator) / self.sigma_sq.denominator)

    def __repr__(self) -> str:  # compact, used in test ids
        return "ProblemParams(n=%d, a=%s)" % (self.n, self.a)


def mpf_from_fraction(q: Fraction) -> mpmath.mpf:
    return mpmath.mpf(q.numerator) / mpmath.mpf(q.denominator)

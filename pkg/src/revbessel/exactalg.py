"""Exact arithmetic for the exponent-coefficient recursion.

Three layers:

  * ``QPoly``      polynomials in alpha with Fraction coefficients;
  * ``RatFunc``    QPoly divided by a power of (1+alpha), auto-reduced;
  * ``CoefField``  c0 + c1*sigma with c0, c1 RatFunc and sigma^2 = 1+alpha.

Fourier coefficients of real trigonometric polynomials in the e^{i k phi}
basis are complex, so the trig layer stores ``ComplexCoef`` pairs
(re + i*im, both CoefField).  ``TrigPoly`` is a sparse map from the Fourier
index k to such a coefficient.

Operations return new objects and never mutate their inputs.  Division is
only ever needed by rational scalars, by powers of (1+alpha), by sigma and
by ik during integration, so the full field inverse is deliberately not
implemented.
"""

from fractions import Fraction

from .errors import SecularTermError

_ZERO = Fraction(0)


def _as_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError("expected an exact rational, got %r" % (x,))


def _num(frac, like):
    """Fraction -> number in the arithmetic of ``like`` (float/mpf/mpc)."""
    return (0 * like + frac.numerator) / frac.denominator


def _imag_unit(like):
    """The imaginary unit in arithmetic compatible with ``like``."""
    try:
        import mpmath

        if isinstance(like, (mpmath.mpf, mpmath.mpc)):
            return mpmath.mpc(0, 1)
    except ImportError:  # pragma: no cover
        pass
    return 1j


class QPoly:
    """Polynomial in alpha, Fraction coefficients, index = degree."""

    __slots__ = ("c",)

    def __init__(self, coeffs=()):
        if isinstance(coeffs, (int, Fraction)):
            coeffs = (coeffs,)
        c = [_as_fraction(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.c = tuple(c)

    @property
    def is_zero(self):
        return not self.c

    def degree(self):
        return len(self.c) - 1

    def __eq__(self, other):
        return isinstance(other, QPoly) and self.c == other.c

    def __hash__(self):
        return hash(self.c)

    def __add__(self, other):
        n = max(len(self.c), len(other.c))
        return QPoly(
            [
                (self.c[i] if i < len(self.c) else _ZERO)
                + (other.c[i] if i < len(other.c) else _ZERO)
                for i in range(n)
            ]
        )

    def __neg__(self):
        return QPoly([-x for x in self.c])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            q = _as_fraction(other)
            return QPoly([x * q for x in self.c])
        if not self.c or not other.c:
            return QPoly(())
        out = [_ZERO] * (len(self.c) + len(other.c) - 1)
        for i, x in enumerate(self.c):
            if x == 0:
                continue
            for j, y in enumerate(other.c):
                out[i + j] += x * y
        return QPoly(out)

    __rmul__ = __mul__

    def divide_one_plus_alpha(self):
        """Return q with self = (1+alpha)*q, or None if not divisible."""
        if self.is_zero:
            return self
        # synthetic division by (alpha + 1); remainder = value at alpha = -1
        quot = [_ZERO] * (len(self.c) - 1)
        carry = _ZERO
        for i in range(len(self.c) - 1, 0, -1):
            carry = self.c[i] - carry
            quot[i - 1] = carry
        rem = self.c[0] - carry
        if rem != 0:
            return None
        return QPoly(quot)

    def eval(self, alpha):
        """Horner; exact for Fraction alpha, numeric otherwise."""
        if not self.c:
            return Fraction(0) if isinstance(alpha, Fraction) else 0 * alpha
        if isinstance(alpha, Fraction):
            acc = self.c[-1]
            for x in reversed(self.c[:-1]):
                acc = acc * alpha + x
            return acc
        acc = _num(self.c[-1], alpha)
        for x in reversed(self.c[:-1]):
            acc = acc * alpha + _num(x, alpha)
        return acc

    __call__ = eval

    def __repr__(self):
        return "QPoly(%r)" % (list(self.c),)


_OPA = QPoly((1, 1))  # 1 + alpha
_opa_cache = {0: QPoly((1,))}


def _opa_pow(k):
    if k not in _opa_cache:
        _opa_cache[k] = _opa_pow(k - 1) * _OPA
    return _opa_cache[k]


class RatFunc:
    """num / (1+alpha)^m, reduced so num is not divisible by (1+alpha)
    whenever m > 0."""

    __slots__ = ("num", "m")

    def __init__(self, num, m=0):
        if not isinstance(num, QPoly):
            num = QPoly(num)
        while m > 0 and not num.is_zero:
            q = num.divide_one_plus_alpha()
            if q is None:
                break
            num, m = q, m - 1
        if num.is_zero:
            m = 0
        self.num = num
        self.m = m

    @property
    def is_zero(self):
        return self.num.is_zero

    def __eq__(self, other):
        return isinstance(other, RatFunc) and self.num == other.num and self.m == other.m

    def __hash__(self):
        return hash((self.num, self.m))

    def __add__(self, other):
        m = max(self.m, other.m)
        a = self.num * _opa_pow(m - self.m)
        b = other.num * _opa_pow(m - other.m)
        return RatFunc(a + b, m)

    def __neg__(self):
        return RatFunc(-self.num, self.m)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return RatFunc(self.num * other, self.m)
        return RatFunc(self.num * other.num, self.m + other.m)

    __rmul__ = __mul__

    def div_one_plus_alpha(self, k=1):
        return RatFunc(self.num, self.m + k)

    def mul_one_plus_alpha(self, k=1):
        return RatFunc(self.num * _opa_pow(k), self.m)

    def eval(self, alpha):
        num = self.num.eval(alpha)
        if self.m == 0:
            return num
        return num / (1 + alpha) ** self.m

    def __repr__(self):
        return "RatFunc(%r, m=%d)" % (list(self.num.c), self.m)


RF_ZERO = RatFunc(QPoly(()))
RF_ONE = RatFunc(QPoly((1,)))


def rf_rational(q):
    return RatFunc(QPoly((_as_fraction(q),)))


class CoefField:
    """c0 + c1*sigma over Q(alpha), with sigma^2 = 1 + alpha."""

    __slots__ = ("c0", "c1")

    def __init__(self, c0=RF_ZERO, c1=RF_ZERO):
        if not isinstance(c0, RatFunc):
            c0 = RatFunc(c0)
        if not isinstance(c1, RatFunc):
            c1 = RatFunc(c1)
        self.c0 = c0
        self.c1 = c1

    @property
    def is_zero(self):
        return self.c0.is_zero and self.c1.is_zero

    def __eq__(self, other):
        return isinstance(other, CoefField) and self.c0 == other.c0 and self.c1 == other.c1

    def __hash__(self):
        return hash((self.c0, self.c1))

    def __add__(self, other):
        return CoefField(self.c0 + other.c0, self.c1 + other.c1)

    def __neg__(self):
        return CoefField(-self.c0, -self.c1)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CoefField(self.c0 * other, self.c1 * other)
        # (a0 + a1 s)(b0 + b1 s) = a0 b0 + (1+alpha) a1 b1 + (a0 b1 + a1 b0) s
        return CoefField(
            self.c0 * other.c0 + (self.c1 * other.c1).mul_one_plus_alpha(),
            self.c0 * other.c1 + self.c1 * other.c0,
        )

    __rmul__ = __mul__

    def mul_sigma(self):
        return CoefField(self.c1.mul_one_plus_alpha(), self.c0)

    def div_sigma(self):
        # 1/sigma = sigma/(1+alpha)
        return self.mul_sigma().div_one_plus_alpha()

    def div_one_plus_alpha(self, k=1):
        return CoefField(self.c0.div_one_plus_alpha(k), self.c1.div_one_plus_alpha(k))

    def eval(self, alpha, sigma):
        return self.c0.eval(alpha) + self.c1.eval(alpha) * sigma

    def __repr__(self):
        return "CoefField(%r, %r)" % (self.c0, self.c1)


CF_ZERO = CoefField()
CF_ONE = CoefField(RF_ONE)
CF_ALPHA = CoefField(RatFunc(QPoly((0, 1))))
CF_SIGMA = CoefField(RF_ZERO, RF_ONE)


def cf_rational(q):
    return CoefField(rf_rational(q))


class ComplexCoef:
    """re + i*im with both parts CoefField."""

    __slots__ = ("re", "im")

    def __init__(self, re=CF_ZERO, im=CF_ZERO):
        self.re = re
        self.im = im

    @property
    def is_zero(self):
        return self.re.is_zero and self.im.is_zero

    def __eq__(self, other):
        return isinstance(other, ComplexCoef) and self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __add__(self, other):
        return ComplexCoef(self.re + other.re, self.im + other.im)

    def __neg__(self):
        return ComplexCoef(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, CoefField)):
            return ComplexCoef(self.re * other, self.im * other)
        return ComplexCoef(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def times_i(self):
        return ComplexCoef(-self.im, self.re)

    def conjugate(self):
        return ComplexCoef(self.re, -self.im)

    def eval_parts(self, alpha, sigma):
        return self.re.eval(alpha, sigma), self.im.eval(alpha, sigma)

    def eval(self, alpha, sigma):
        re, im = self.eval_parts(alpha, sigma)
        return re + _imag_unit(re) * im

    def __repr__(self):
        return "ComplexCoef(%r, %r)" % (self.re, self.im)


CC_ZERO = ComplexCoef()
CC_ONE = ComplexCoef(CF_ONE)


class TrigPoly:
    """Sparse Fourier polynomial sum_k c_k e^{i k phi}, c_k ComplexCoef."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        d = {}
        if coeffs:
            for k, v in coeffs.items():
                if not v.is_zero:
                    d[int(k)] = v
        self.coeffs = d

    def __eq__(self, other):
        return isinstance(other, TrigPoly) and self.coeffs == other.coeffs

    @property
    def is_zero(self):
        return not self.coeffs

    def indices(self):
        return sorted(self.coeffs)

    def get(self, k):
        return self.coeffs.get(k, CC_ZERO)

    def __add__(self, other):
        d = dict(self.coeffs)
        for k, v in other.coeffs.items():
            w = d.get(k)
            d[k] = v if w is None else w + v
        return TrigPoly(d)

    def __neg__(self):
        return TrigPoly({k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, CoefField, ComplexCoef)):
            return TrigPoly({k: v * other for k, v in self.coeffs.items()})
        out = {}
        for k1, v1 in self.coeffs.items():
            for k2, v2 in other.coeffs.items():
                k = k1 + k2
                p = v1 * v2
                w = out.get(k)
                out[k] = p if w is None else w + p
        return TrigPoly(out)

    __rmul__ = __mul__

    def diff(self):
        """d/dphi: c_k -> i k c_k."""
        return TrigPoly({k: v.times_i() * k for k, v in self.coeffs.items() if k != 0})

    def integrate(self):
        """Antiderivative vanishing at phi = 0.

        The mean coefficient must vanish identically, otherwise the
        antiderivative would contain a phi-linear term.
        """
        c0 = self.coeffs.get(0)
        if c0 is not None and not c0.is_zero:
            raise SecularTermError(c0)
        out = {}
        const = CC_ZERO
        for k, v in self.coeffs.items():
            if k == 0:
                continue
            # e^{ik phi} integrates to e^{ik phi}/(ik); 1/(ik) = -i/k
            w = (-v.times_i()) * Fraction(1, k)
            out[k] = w
            const = const - w
        if not const.is_zero:
            out[0] = const
        return TrigPoly(out)

    def value_at_zero(self):
        """Exact value at phi = 0 (sum of all coefficients)."""
        acc = CC_ZERO
        for v in self.coeffs.values():
            acc = acc + v
        return acc

    def is_real_form(self):
        """True when c_{-k} = conj(c_k) for all k (real for real phi)."""
        for k, v in self.coeffs.items():
            if self.get(-k) != v.conjugate():
                return False
        return True

    def eval(self, alpha, sigma, expiphi, expmiphi):
        """Numeric value given e^{i phi} and e^{-i phi}.

        Both exponentials are inputs (rather than inverting one) because at
        complex phi the reciprocal loses accuracy once |e^{i phi}| drifts
        from 1.
        """
        kmax = max((abs(k) for k in self.coeffs), default=0)
        pk = {0: 1}
        cur = 1
        for k in range(1, kmax + 1):
            cur = cur * expiphi
            pk[k] = cur
        cur = 1
        for k in range(1, kmax + 1):
            cur = cur * expmiphi
            pk[-k] = cur
        acc = 0 * expiphi
        J = _imag_unit(expiphi)
        for k, v in self.coeffs.items():
            re, im = v.eval_parts(alpha, sigma)
            acc = acc + (re + J * im) * pk[k]
        return acc

    def to_cos_sin(self):
        """({k: a_k}, {k: b_k}) with value = a_0 + sum_k (a_k cos + b_k sin).

        Assumes real form, where c_k = (a_k - i b_k)/2 for k > 0;
        a_k and b_k come out as CoefField entries.
        """
        a = {}
        b = {}
        for k in self.indices():
            if k < 0:
                continue
            v = self.coeffs[k]
            if k == 0:
                a[0] = v.re
                continue
            a[k] = v.re * 2
            b[k] = v.im * Fraction(-2)
        return a, b

    def __repr__(self):
        return "TrigPoly(%r)" % (self.coeffs,)


CF_HALF = cf_rational(Fraction(1, 2))
CF_MHALF = cf_rational(Fraction(-1, 2))

# sin = -(i/2) e^{i phi} + (i/2) e^{-i phi}; cos = (e^{i phi} + e^{-i phi})/2
SIN = TrigPoly({1: ComplexCoef(CF_ZERO, CF_MHALF), -1: ComplexCoef(CF_ZERO, CF_HALF)})
COS = TrigPoly({1: ComplexCoef(CF_HALF), -1: ComplexCoef(CF_HALF)})
ONE_TP = TrigPoly({0: CC_ONE})


def tp_const(cf):
    """Constant TrigPoly from a CoefField."""
    return TrigPoly({0: ComplexCoef(cf)})

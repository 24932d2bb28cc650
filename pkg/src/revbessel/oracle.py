"""High-precision reference evaluation of theta_n and the w solutions.

Everything here is direct: finite sums with exact rational coefficients,
a tail-bounded Kummer series, and (for the integrity metric) an
independent ODE integration.  No asymptotics.  The rest of the package is
validated against this module.

Conventions.  theta_n(z; a) is the degree-n polynomial with positive
rational coefficients; w0, w1, wm1 are the three solutions of

    w'' = (1 + (a-2)/z + nu/z^2) w,      nu = (2n+a)(2n+a-2)/4,

recessive respectively at +infinity, -infinity, and 0.  All fractional
powers are principal (arg z in (-pi, pi]).  w1 is *defined* through the
connection formula; the ODE route exists so the formula can be checked
against something it was not built from.
"""

import math
from fractions import Fraction

import mpmath
from mpmath import mp

from .errors import NumericalError, RangeError
from .params import ProblemParams, mpf_from_fraction

_coeff_cache = {}


def _theta_coeffs(params):
    """Exact Fractions c_k multiplying z^(n-k), k = 0..n."""
    key = (params.n, params.a)
    got = _coeff_cache.get(key)
    if got is not None:
        return got
    n = params.n
    base = Fraction(n) + params.a - 1
    out = []
    c = Fraction(1)
    for k in range(n + 1):
        out.append(c)
        # c_{k+1}/c_k = C(n,k+1)/C(n,k) * (base+k) / 2
        c = c * (n - k) * (base + k) / (2 * (k + 1))
    _coeff_cache[key] = tuple(out)
    return _coeff_cache[key]


def _to_mpc(z):
    if isinstance(z, Fraction):
        return mpmath.mpc(mpf_from_fraction(z))
    return mpmath.mpc(z)


def _mpfr(q):
    return mpf_from_fraction(q) if isinstance(q, Fraction) else mpmath.mpf(q)


def theta_direct(params, z, dps=None):
    """theta_n(z; a) by Horner over exact coefficients."""
    with mp.workdps(dps or mp.dps):
        coeffs = _theta_coeffs(params)
        zz = _to_mpc(z)
        if zz == 0:
            v = mpmath.mpc(_mpfr(coeffs[-1]))
            return v if params.n > 0 else mpmath.mpc(1)
        acc = mpmath.mpc(_mpfr(coeffs[0]))
        for c in coeffs[1:]:
            acc = acc * zz + _mpfr(c)
        return acc


def w0_direct(params, z, dps=None):
    """2^(1-n-a) z^(1-n-a/2) e^(-z) theta_n(z;a); recessive at +infinity."""
    zz = _to_mpc(z)
    if zz == 0:
        raise RangeError("w0 has a branch point at z = 0")
    with mp.workdps(dps or mp.dps):
        n = params.n
        expo = 1 - n - params.a / 2          # exact Fraction
        lg = _mpfr(1 - n - params.a) * mpmath.log(mpmath.mpf(2)) + _mpfr(expo) * mpmath.log(zz) - zz
        return mpmath.exp(lg) * theta_direct(params, zz)


def w_minus1_direct(params, z, tol=None, dps=None):
    """z^(n+a/2) e^(-z) Mreg(n+a-1, 2n+a, 2z); recessive at 0.

    Mreg is the regularised Kummer series summed with an explicit
    geometric majorant on the tail.  Internally boosts precision when the
    argument sits far into the left half-plane, where the series loses
    |e^{2z}|-many digits to cancellation.
    """
    zz = _to_mpc(z)
    if zz == 0:
        return mpmath.mpc(0)
    dps0 = dps or mp.dps
    if tol is None:
        tol = mpmath.mpf(10) ** (-(dps0 - 2))
    x = 2 * zz
    # digits lost to alternating-sign cancellation, crude upper estimate
    boost = int(0.4343 * float(abs(x) - x.real)) + 10
    work = dps0 + boost
    n = params.n
    b = Fraction(n) + params.a - 1
    cpar = Fraction(2 * n) + params.a
    with mp.workdps(work):
        x = 2 * _to_mpc(z)
        bf = _mpfr(b)
        cf = _mpfr(cpar)
        term = 1 / mpmath.gamma(cf)
        total = term
        biggest = abs(term)
        k = 0
        tolw = mpmath.mpf(tol)
        while True:
            term = term * x * (bf + k) / ((cf + k) * (k + 1))
            total += term
            at = abs(term)
            if at > biggest:
                biggest = at
            # majorant ratio for everything past k+1
            k += 1
            r = abs(x) * (abs(bf) + k) / ((cf + k) * (k + 1))
            if r < 0.5:
                tail = at * r / (1 - r)
                if tail <= tolw * (abs(total) + at):
                    break
            if k > 100000:
                raise NumericalError("Kummer series failed to meet tail bound")
        if abs(total) < biggest * mpmath.mpf(10) ** (-(work - 8)):
            raise NumericalError(
                "Kummer sum cancelled to noise; raise the working precision"
            )
        pref = mpmath.exp(_mpfr(Fraction(n) + params.a / 2) * mpmath.log(_to_mpc(z)) - _to_mpc(z))
        out = pref * total
    return +out


def _bracket(params, z, dps):
    """w^(-1) - (-1)^(n+1) (e^(a pi i)/n!) w^(0), with cancellation retry."""
    n = params.n

    def attempt(work):
        with mp.workdps(work):
            w0 = w0_direct(params, z)
            wm = w_minus1_direct(params, z)
            phase = mpmath.expjpi(_mpfr(params.a)) / mpmath.factorial(n)
            if n % 2 == 0:
                phase = -phase
            t2 = phase * w0
            val = wm - t2
            big = abs(wm) + abs(t2)
            lost = 0.0
            if val != 0:
                lost = max(0.0, float(mpmath.log10(big / abs(val))))
            return +val, lost

    val, lost = attempt(dps + 15)
    if lost > 6:
        val, _ = attempt(dps + int(lost) + 15)
    return val


def w1_direct(params, z, dps=None):
    """Gamma(n+a-1) * [w^(-1) - (-1)^(n+1) (e^(a pi i)/n!) w^(0)].

    Recessive at -infinity.  The subtraction is evaluated at boosted
    precision when the two pieces nearly cancel, so the result is stable
    under precision doubling.
    """
    dps0 = dps or mp.dps
    val = _bracket(params, z, dps0)
    with mp.workdps(dps0 + 15):
        out = mpmath.gamma(_mpfr(Fraction(params.n) + params.a - 1)) * val
    return +out


def _nu(params):
    b = Fraction(2 * params.n) + params.a
    return b * (b - 2) / 4


def _w1_seed(params, t0, digits):
    """Value and derivative of w1 at large negative real t0 from the
    exponential series w1 ~ 2^(-n-1) t^(a/2-1) e^t sum c_m t^(-m)."""
    rho = params.a / 2 - 1
    beta = rho * (rho - 1) - _nu(params)
    rhof = _mpfr(rho)
    betaf = _mpfr(beta)
    tinv = 1 / mpmath.mpf(t0)
    c = mpmath.mpf(1)
    v = mpmath.mpf(1)
    vp = mpmath.mpf(0)
    floor = mpmath.mpf(10) ** (-(digits + 6))
    prev = mpmath.inf
    m = 0
    while True:
        m += 1
        c = c * ((m - 1) * (m - 2 * rhof) + betaf) / (2 * m)
        term = c * tinv**m
        at = abs(term)
        if at > prev:
            raise NumericalError("seed series diverged before reaching target accuracy")
        v += term
        vp += -m * c * tinv ** (m + 1)
        prev = at
        if at < floor * abs(v):
            break
        if m > 20 * digits + 200:
            raise NumericalError("seed series too slow; seed point not deep enough")
    t0c = mpmath.mpc(t0)
    lead = mpmath.exp(
        -(params.n + 1) * mpmath.log(mpmath.mpf(2)) + rhof * mpmath.log(t0c) + t0c
    )
    w = lead * v
    dw = lead * (vp + (1 + rhof / t0c) * v)
    return w, dw


def _march_segment(params, w, dw, t_from, t_to, digits):
    """Taylor-series ODE stepping along the straight segment [t_from, t_to].

    Radius of convergence at each center is |center| (the singularity sits
    at the origin), so steps are capped at 0.35 of that.
    """
    af = _mpfr(params.a)
    nuf = _mpfr(_nu(params))
    cur = mpmath.mpc(t_from)
    target = mpmath.mpc(t_to)
    floor = mpmath.mpf(10) ** (-(digits + 6))
    jcap = 12 * digits + 400
    while True:
        d = target - cur
        ad = abs(d)
        if ad == 0:
            return w, dw
        h_allowed = mpmath.mpf("0.35") * abs(cur)
        if h_allowed <= 0:
            raise NumericalError("integration path hit the origin")
        h = min(ad, h_allowed)
        s = d / ad * h
        p0 = cur * cur + (af - 2) * cur + nuf
        p1 = 2 * cur + af - 2
        c2 = cur * cur
        b = [w, dw]
        ws = w + dw * s
        dws = mpmath.mpc(dw)
        spow = s * s
        j = 0
        small = 0
        while True:
            bj = b[j]
            bj1 = b[j + 1]
            bjm1 = b[j - 1] if j >= 1 else 0
            bjm2 = b[j - 2] if j >= 2 else 0
            new = (
                p0 * bj
                + p1 * bjm1
                + bjm2
                - 2 * cur * (j + 1) * j * bj1
                - j * (j - 1) * bj
            ) / (c2 * (j + 2) * (j + 1))
            b.append(new)
            inc = new * spow
            ws += inc
            dws += (j + 2) * new * spow / s
            spow *= s
            j += 1
            scale = abs(ws) + abs(w) + abs(dws) * h
            if abs(inc) < floor * scale:
                small += 1
                if small >= 3:
                    break
            else:
                small = 0
            if j > jcap:
                raise NumericalError("Taylor step failed to converge")
        cur += s
        w, dw = ws, dws


def w1_ode(params, z, dps=None):
    """Independent w^(1): seeded from its exponential behaviour far on the
    negative axis and marched to z along a path over the origin.

    Marching toward increasing Re t follows the locally dominant solution,
    which keeps the relative error flat.  For targets in the lower
    half-plane the conjugate point is integrated and the result
    conjugated (a is real).
    """
    dps0 = dps or mp.dps
    digits = dps0 + 12
    with mp.workdps(digits + 8):
        zz = _to_mpc(z)
        if zz == 0:
            raise RangeError("w1 has a branch point at z = 0")
        flip = zz.imag < 0
        if flip:
            zz = mpmath.conj(zz)
        R = max(50.0, float(_nu(params)) + 20.0, 1.1513 * digits + 15.0, float(abs(zz)) + 30.0)
        t0 = mpmath.mpf(-math.ceil(R))
        w, dw = _w1_seed(params, t0, digits)
        Y = max(6.0, float(zz.imag) + 2.0)
        path = [t0, t0 + mpmath.mpc(0, Y), mpmath.mpc(zz.real, Y), zz]
        # drop a zero-length final leg when the target already sits at height Y
        for i in range(len(path) - 1):
            if path[i] != path[i + 1]:
                w, dw = _march_segment(params, w, dw, path[i], path[i + 1], digits)
        if flip:
            w = mpmath.conj(w)
    return +w


def connection_residual(params, z, dps=None):
    """Relative defect of the three-solution connection identity, with
    w^(1) supplied by the ODE route rather than by the identity itself.

    Returns a float.  Internally escalates precision until the
    near-cancelling right-hand side retains full accuracy.
    """
    P = dps or mp.dps
    n = params.n

    def attempt(work):
        with mp.workdps(work):
            w0 = w0_direct(params, z)
            wm = w_minus1_direct(params, z)
            w1i = w1_ode(params, z)
            g = mpmath.gamma(_mpfr(Fraction(n) + params.a - 1))
            phase = mpmath.expjpi(_mpfr(params.a)) / mpmath.factorial(n)
            if n % 2 == 0:
                phase = -phase
            t1 = w1i / g
            t2 = phase * w0
            lhs = wm
            rhs = t1 + t2
            if lhs == 0:
                return float("inf"), 0.0
            lost = float(mpmath.log10((abs(t1) + abs(t2)) / abs(lhs)))
            res = float(abs(lhs - rhs) / abs(lhs))
            return res, max(0.0, lost)

    res, lost = attempt(P + 40)
    if lost > 8:
        res, _ = attempt(P + int(lost) + 40)
    return res

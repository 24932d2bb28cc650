"""Airy-type coefficient functions A, B and the main theta evaluation.

Away from the turning point A and B come straight from the exp/cosh and
exp/sinh forms; inside a disc around z1 the singular pieces of those
forms cancel order by order, and the analytic coefficients A_s, B_s are
recovered by discrete Cauchy means over a circle.  An independent
oracle route solves for (A, B) from two linearly independent solution
pairs and Airy Wronskians, which is what the expansion forms are tested
against.
"""

import cmath
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np
from mpmath import mp

from . import airy, mapping, oracle
from .errors import (AccuracyWarning, BranchError, NumericalError,
                     RangeError, TurningPointError)
from .lg_coeffs import cached_tables, eval_trig

__all__ = ["DTable", "ABValue", "QTable", "d_coeffs", "cal_E", "q_coeffs",
           "AB_away", "AB_near", "ab_oracle", "theta_airy", "omega",
           "omega_hat", "tau_lower"]

R0_FACTOR = 0.45
CAUCHY_M = 128
_REP_TOL = 1e-10


@dataclass(frozen=True)
class DTable:
    d: dict           # odd s -> Fraction, s = 1, 3, ..., 2S-1
    S: int


@dataclass(frozen=True)
class ABValue:
    A: complex
    B: complex
    regime: str       # "away" or "near"
    S: int


@dataclass(frozen=True)
class QTable:
    S: int
    E: dict           # s -> cal E_s
    E_tilde: dict
    q: dict
    q_tilde: dict
    A: dict           # s -> A_s = q_tilde_{2s}
    B: dict           # s -> B_s = zeta^{-1/2} q_{2s+1}


def _kappa(two_m):
    """(2^{1-2m} - 1) B_{2m} / (2m (2m-1)); the Gamma(x+1/2) Stirling
    tail coefficient."""
    p, q = mpmath.bernfrac(two_m)
    b = Fraction(int(p), int(q))
    return (Fraction(1, 2 ** (two_m - 1)) - 1) * b / (two_m * (two_m - 1))


def d_coeffs(params, S):
    """First S constants d_1, d_3, ..., d_{2S-1}, exact in alpha.

    The first four use the printed closed forms; beyond that the value
    comes from the Stirling series of the log-Gamma ratio: the non-series
    parts of the half-difference cancel identically, leaving
    d_{2s+1} = (kappa_{2s+2}/2) (1 - (1+alpha)^{-(2s+1)}).
    """
    al = params.alpha
    omp = 1 + al
    d = {}
    for s in range(S):
        k = 2 * s + 1
        if k == 1:
            d[k] = -al / (48 * omp)
        elif k == 3:
            d[k] = 7 * al * (3 + 3 * al + al ** 2) / (5760 * omp ** 3)
        elif k == 5:
            d[k] = (-31 * al * (5 + 10 * al + 10 * al ** 2 + 5 * al ** 3
                                + al ** 4) / (80640 * omp ** 5))
        elif k == 7:
            d[k] = (127 * al * (7 + 21 * al + 35 * al ** 2 + 35 * al ** 3
                                + 21 * al ** 4 + 7 * al ** 5 + al ** 6)
                    / (430080 * omp ** 7))
        else:
            d[k] = _kappa(k + 1) / 2 * (1 - omp ** (-k))
    return DTable(d=d, S=S)


def cal_E(params, z, S):
    """(list of cal E_s, list of cal E-tilde_s), s = 1..S, 0-indexed.

    cal E_s = E_s + (-1)^s a_s / (s xi^s), tilde with the primed Airy
    sequence.  Blows up at the turning point by design.
    """
    z = complex(z)
    xiv = mapping.xi(params, z)
    if xiv == 0:
        raise TurningPointError("cal E_s has a pole at xi = 0")
    sp, cp = mapping.phi_trig(params, z)
    tbl = cached_tables(8 if S <= 8 else S)
    co = airy.airy_coeffs(max(S, 2))
    plain, tilde = [], []
    xs = 1.0
    for s in range(1, S + 1):
        xs = xs * xiv
        ev = eval_trig(tbl.E[s], params, sp, cp)
        sgn = -1 if s % 2 else 1
        plain.append(ev + sgn * float(co.a[s]) / (s * xs))
        tilde.append(ev + sgn * float(co.a_tilde[s]) / (s * xs))
    return plain, tilde


def _exp_series(c):
    """q_s of exp(sum c_s/u^s) = sum q_s/u^s: the standard log-derivative
    recursion, 1-based dict in, 1-based dict out."""
    S = max(c)
    q = {1: c[1]}
    for s in range(2, S + 1):
        acc = c[s]
        for j in range(1, s):
            acc += (j / s) * c[j] * q[s - j]
        q[s] = acc
    return q


def q_coeffs(params, z, S):
    """Regular re-expansion coefficients at z, d-shift applied to the odd
    inputs so the result matches the cosh/sinh forms term by term."""
    z = complex(z)
    plain, tilde = cal_E(params, z, S)
    dt = d_coeffs(params, (S + 1) // 2)
    c, ct = {}, {}
    for s in range(1, S + 1):
        dv = float(dt.d[s]) if s % 2 else 0.0
        c[s] = plain[s - 1] + dv
        ct[s] = tilde[s - 1] + dv
    q = _exp_series(c)
    qt = _exp_series(ct)
    szi = 1.0 / mapping.sqrt_zeta_analytic(params, z)
    A = {s: qt[2 * s] for s in range(1, S // 2 + 1)}
    B = {s: szi * q[2 * s + 1] for s in range((S + 1) // 2)}
    return QTable(S=S, E={s: plain[s - 1] for s in range(1, S + 1)},
                  E_tilde={s: tilde[s - 1] for s in range(1, S + 1)},
                  q=q, q_tilde=qt, A=A, B=B)


def _r0(params, r0=None):
    return r0 if r0 is not None else R0_FACTOR * abs(params.z1)


def AB_away(params, z, S=6):
    """Slowly varying coefficient pair by the exp/cosh and exp/sinh forms.

    Even orders feed the exponential, odd orders (plus the d constants)
    the hyperbolic factor; B carries the extra u^{-1/3} zeta^{-1/2}.
    """
    z = complex(z)
    if z.imag < 0:
        raise RangeError("lower half-plane evaluation goes through the "
                         "conjugation identity, not through AB_away")
    if abs(z - params.z1) < 0.998 * _r0(params):
        raise TurningPointError("too close to z1 for the away forms; "
                                "switch to AB_near")
    u = params.u_float
    plain, tilde = cal_E(params, z, S)
    dt = d_coeffs(params, (S + 1) // 2)
    ev_t = ev_p = 0j
    od_t = od_p = 0j
    for s in range(2, S + 1, 2):
        ev_t += tilde[s - 1] / u ** s
        ev_p += plain[s - 1] / u ** s
    for s in range(1, S + 1, 2):
        dv = float(dt.d[s])
        od_t += (tilde[s - 1] + dv) / u ** s
        od_p += (plain[s - 1] + dv) / u ** s
    A = cmath.exp(ev_t) * cmath.cosh(od_t)
    szi = 1.0 / mapping.sqrt_zeta_analytic(params, z)
    B = u ** (-1.0 / 3.0) * szi * cmath.exp(ev_p) * cmath.sinh(od_p)
    return ABValue(A=A, B=B, regime="away", S=S)


_circle_cache = {}


def _circle_tables(params, S, M, r0):
    """DFT tables of the A_s, B_s samples on the circle |t - z1| = r0.

    The samples are continuous around the circle (the d constants cancel
    the constant terms of the odd tables, so crossing the cut flips
    E_odd + d and sqrt(zeta) coherently and every A_s, B_s is
    single-valued), hence the DFT converges spectrally and yields Taylor
    coefficients in (z - z1)/r0.
    """
    key = (params, S, M, round(r0, 14))
    if key not in _circle_cache:
        z1 = params.z1
        nodes = [z1 + r0 * cmath.exp(2j * math.pi * (m + 0.5) / M)
                 for m in range(M)]
        As = {s: np.empty(M, dtype=complex) for s in range(1, S // 2 + 1)}
        Bs = {s: np.empty(M, dtype=complex) for s in range((S + 1) // 2)}
        for m, t in enumerate(nodes):
            qt = q_coeffs(params, t, S)
            for s in As:
                As[s][m] = qt.A[s]
            for s in Bs:
                Bs[s][m] = qt.B[s]
        k = np.arange(M)
        shift = np.exp(-1j * math.pi * k / M)

        def dft(arr):
            return np.fft.fft(arr) / M * shift

        _circle_cache[key] = ({s: dft(As[s]) for s in As},
                              {s: dft(Bs[s]) for s in Bs})
    return _circle_cache[key]


def _disc_eval(chat, w):
    """Sum of the Taylor series chat at w = (z - z1)/r0, |w| <= 1.

    This is the discrete Cauchy integral of the circle samples with the
    geometric tail of the kernel removed; the plain node mean loses O(1)
    accuracy near the rim.
    """
    return complex(np.dot(chat, w ** np.arange(len(chat))))


def AB_near(params, z, S=6, r0=None, M=CAUCHY_M):
    """Coefficient pair inside the turning-point disc.

    Every coefficient A_s, B_s is analytic there and gets rebuilt at z
    from its circle samples via the discrete Cauchy integral in DFT
    form; a doubled-M pass guards against aliasing.
    """
    z = complex(z)
    rr = _r0(params, r0)
    if abs(z - params.z1) > rr * (1.0 + 1e-9):
        raise RangeError("point is not inside the near disc")
    u = params.u_float
    w = (z - params.z1) / rr
    acc = {}
    for mm in (M, 2 * M):
        a_chat, b_chat = _circle_tables(params, S, mm, rr)
        a_here = {s: _disc_eval(a_chat[s], w) for s in a_chat}
        b_here = {s: _disc_eval(b_chat[s], w) for s in b_chat}
        acc[mm] = (a_here, b_here)
    worst = 0.0
    for s in acc[M][0]:
        worst = max(worst, abs(acc[M][0][s] - acc[2 * M][0][s]))
    for s in acc[M][1]:
        worst = max(worst, abs(acc[M][1][s] - acc[2 * M][1][s]))
    if worst > 1e-8:
        warnings.warn("Cauchy sample aliasing %.2e; M too small" % worst,
                      AccuracyWarning)
    a_here, b_here = acc[2 * M]
    A = 1.0 + sum(a_here[s] / u ** (2 * s) for s in a_here)
    B = u ** (-4.0 / 3.0) * sum(b_here[s] / u ** (2 * s) for s in b_here)
    return ABValue(A=A, B=B, regime="near", S=S)


def _log_pre(params, wp):
    """log of the common prefactor shared by the script-A/B pair."""
    n, a, u = params.n, params.a, params.u
    with mp.workdps(wp):
        afl = mpmath.mpf(a.numerator) / a.denominator
        ufl = mpmath.mpf(u.numerator) / u.denominator
        return (5j * mpmath.pi / 6 + (ufl + afl) * 1j * mpmath.pi / 2
                + mpmath.log(ufl) / 6 - (n - 1) * mpmath.log(2)
                + (mpmath.log(mpmath.pi) - afl * mpmath.log(2)
                   - mpmath.loggamma(n + 1)
                   - mpmath.loggamma(n + afl - 1)) / 2)


def _rep_pair(params, z, which, wp):
    """(script A, script B) from one pair of solution representations."""
    n = params.n
    u = params.u_float
    with mp.workdps(wp):
        afl = mpmath.mpf(params.a.numerator) / params.a.denominator
        uz = mpmath.mpc(u) * z
        x = mpmath.mpf(u) ** mpmath.mpf("2/3") * \
            mpmath.mpc(mapping.zeta_analytic(params, z))
        q4 = 1.0 / mpmath.mpc(mapping.quarter_power_R(params, z))
        ai0, aip0 = airy.airy_eval(0, x, dps=wp)
        sgn_n = -1 if n % 2 else 1
        gam = mpmath.gamma(n + afl - 1)
        if which == "upper":
            ai1, aip1 = airy.airy_eval(1, x, dps=wp)
            c0 = sgn_n * mpmath.exp((afl + mpmath.mpf(1) / 6) * 1j *
                                    mpmath.pi) / mpmath.factorial(n)
            c1 = mpmath.exp(-1j * mpmath.pi / 6) / gam
            w0 = oracle.w0_direct(params, uz, dps=wp)
            w1 = oracle.w1_direct(params, uz, dps=wp)
            calA = 2 * mpmath.pi * q4 * (c0 * w0 * aip1 - c1 * w1 * aip0)
            calB = -2 * mpmath.pi * q4 * (c0 * w0 * ai1 - c1 * w1 * ai0)
        elif which == "lower":
            aim, aipm = airy.airy_eval(-1, x, dps=wp)
            c0 = sgn_n * mpmath.exp((afl + mpmath.mpf(1) / 2) * 1j *
                                    mpmath.pi) / mpmath.factorial(n)
            cm = mpmath.exp(-1j * mpmath.pi / 6)
            w0 = oracle.w0_direct(params, uz, dps=wp)
            wm = oracle.w_minus1_direct(params, uz, dps=wp)
            calA = 2 * mpmath.pi * q4 * (c0 * w0 * aipm - cm * wm * aip0)
            calB = -2 * mpmath.pi * q4 * (c0 * w0 * aim - cm * wm * ai0)
        elif which == "zero_minus":
            ai1, aip1 = airy.airy_eval(1, x, dps=wp)
            aim, aipm = airy.airy_eval(-1, x, dps=wp)
            c1 = 1j / gam
            cm = mpmath.exp(1j * mpmath.pi / 6)
            w1 = oracle.w1_direct(params, uz, dps=wp)
            wm = oracle.w_minus1_direct(params, uz, dps=wp)
            calA = 2 * mpmath.pi * q4 * (c1 * w1 * aipm - cm * wm * aip1)
            calB = -2 * mpmath.pi * q4 * (c1 * w1 * aim - cm * wm * ai1)
        else:
            raise ValueError("unknown representation %r" % which)
        scale = mpmath.exp(_log_pre(params, wp))
        return calA / scale, calB / scale


def ab_oracle(params, z, dps=None, representation=None):
    """Reference (A, B) solved from oracle solution values.

    Default path builds the pair from the plus-infinity and minus-infinity
    recessive solutions and cross-checks against the pair using the
    zero-recessive one; a persistent disagreement is a branch fault, not
    a rounding problem, and is raised as such.
    """
    z = complex(z)
    if z.imag < 0:
        raise RangeError("oracle comparison is defined on the closed "
                         "upper half-plane")
    wp = dps or 50
    if representation == "zero_minus":
        xiv = mapping.xi(params, z)
        wp = wp + int(2 * params.u_float * abs(xiv.real) / math.log(10)) + 10
        A, B = _rep_pair(params, z, "zero_minus", wp)
        return complex(A), complex(B)
    if representation in ("upper", "lower"):
        A, B = _rep_pair(params, z, representation, wp)
        return complex(A), complex(B)
    xiv = mapping.xi(params, z)
    # left of the barrier every representation assembles (A, B) out of
    # exponentially large, nearly cancelling products; budget the lost
    # digits up front instead of discovering them in the cross-check
    esc = int(2 * params.u_float * max(0.0, -xiv.real) / math.log(10))
    for attempt_dps in (wp + esc, wp + esc + 30):
        Au, Bu = _rep_pair(params, z, "upper", attempt_dps)
        Al, Bl = _rep_pair(params, z, "lower", attempt_dps)
        num = max(abs(Au - Al), abs(Bu - Bl))
        den = max(abs(Au), abs(Bu), mpmath.mpf("1e-300"))
        if num / den <= _REP_TOL:
            return complex(Au), complex(Bu)
    raise BranchError("representation mismatch %.2e between the two "
                      "oracle constructions of (A, B)" % float(num / den))


def _core_value(params, z, A, B, wp):
    """Eq-of-theorem assembly: prefactor, quartic root, Airy pair."""
    n = params.n
    u = params.u_float
    with mp.workdps(wp):
        afl = mpmath.mpf(params.a.numerator) / params.a.denominator
        ufl = mpmath.mpf(params.u.numerator) / params.u.denominator
        zeta = mapping.zeta_analytic(params, z)
        x = ufl ** mpmath.mpf("2/3") * mpmath.mpc(zeta)
        ai, aip = airy.airy_eval(0, x, dps=wp)
        q4 = mpmath.mpc(mapping.quarter_power_R(params, z))
        lg = (mpmath.log(ufl) / 6 - (ufl + afl + 2) * 1j * mpmath.pi / 2
              + (afl * mpmath.log(2) + mpmath.log(mpmath.pi)
                 + mpmath.loggamma(n + 1)
                 - mpmath.loggamma(n + afl - 1)) / 2
              + (n + afl / 2 - 1) * mpmath.log(ufl * mpmath.mpc(z))
              + ufl * mpmath.mpc(z))
        return mpmath.exp(lg) * q4 * (ai * mpmath.mpc(A)
                                      + aip * mpmath.mpc(B))


def theta_airy(params, z, S=6, dps=None):
    """Airy-type value of theta_n(u z; a); the package's main surface.

    Picks the away or near coefficient route by distance to z1, assembles
    the prefactor in log form, and reflects the lower half-plane through
    conjugation.  Returns machine complex unless dps asks for more.
    """
    z = complex(z)
    if z == 0:
        raise RangeError("z = 0 is a branch point of the scaled variable")
    if z.imag < 0:
        v = theta_airy(params, complex(z.real, -z.imag), S=S, dps=dps)
        return v.conjugate()
    if abs(z - params.z1) < _r0(params):
        ab = AB_near(params, z, S=S)
    else:
        ab = AB_away(params, z, S=S)
    wp = dps or 30
    val = _core_value(params, z, ab.A, ab.B, wp)
    if dps is not None:
        return val
    try:
        return complex(val)
    except (OverflowError, ValueError):
        raise NumericalError("theta overflows a double at z = %r; pass "
                             "dps for arbitrary-precision output" % z)


_CUSP_RATIO = 1e-8


def omega(params, z, S=6):
    """log10 relative error of the S-truncated evaluation against the
    direct sum; NaN marks a cusp (the direct value sits on a zero)."""
    z = complex(z)
    approx = theta_airy(params, z, S=S, dps=40)
    with mp.workdps(60):
        exact = oracle.theta_direct(params, mpmath.mpc(params.u_float) * z,
                                    dps=60)
        if abs(exact) < _CUSP_RATIO * abs(approx):
            return math.nan
        return float(mpmath.log(abs((exact - approx) / exact), 10))


def tau_lower(params):
    """Angle of z1; the inner endpoint of the upper Stokes arc."""
    return math.pi / 2 + math.atan(params.alpha_float /
                                   (2 * params.sigma))


@lru_cache(maxsize=32)
def _ah_arrays(params):
    tr = mapping.trace_stokes(params, "AH")
    pts = np.asarray(tr.points)
    ang = np.angle(pts)
    rad = np.abs(pts)
    keep = np.concatenate(([True], np.diff(ang) > 0))
    return ang[keep], rad[keep]


def _ah_point(params, tau):
    """z(tau) = r(tau) e^{i tau} on the upper Stokes arc, polished onto
    Re xi = 0 along the ray."""
    t0 = tau_lower(params)
    if tau < t0 - 1e-12 or tau > math.pi + 1e-12:
        raise RangeError("tau outside [arg z1, pi]")
    tau = min(max(tau, t0), math.pi)
    ang, rad = _ah_arrays(params)
    r = float(np.interp(tau, ang, rad))
    e = cmath.exp(1j * tau)
    if abs(r * e - params.z1) > 2 * params.delta:
        for _ in range(3):
            zc = r * e
            g = mapping.xi(params, zc).real
            Zv, _side = mapping.big_Z(params, zc)
            dg = (e * Zv / zc).real
            if dg == 0:
                break
            step = g / dg
            r -= step
            if abs(step) < 1e-13 * r:
                break
    return r * e


def omega_hat(params, tau, S=7):
    """log10 relative error along the upper Stokes arc using the regular
    re-expansion truncations (A-terms to floor(S/2), B-terms one longer)."""
    z = _ah_point(params, tau)
    u = params.u_float
    kA = S // 2
    kB = (S - 1) // 2
    if abs(z - params.z1) < _r0(params):
        rr = _r0(params)
        w = (z - params.z1) / rr
        a_chat, b_chat = _circle_tables(params, S, 2 * CAUCHY_M, rr)
        a_here = {s: _disc_eval(a_chat[s], w) for s in a_chat}
        b_here = {s: _disc_eval(b_chat[s], w) for s in b_chat}
    else:
        qt = q_coeffs(params, z, S)
        a_here, b_here = qt.A, qt.B
    A = 1.0 + sum(a_here[s] / u ** (2 * s) for s in a_here if s <= kA)
    B = u ** (-4.0 / 3.0) * sum(b_here[s] / u ** (2 * s)
                                for s in b_here if s <= kB)
    approx = _core_value(params, z, A, B, 40)
    with mp.workdps(60):
        exact = oracle.theta_direct(params, mpmath.mpc(u) * z, dps=60)
        if abs(exact) < _CUSP_RATIO * abs(approx):
            return math.nan
        return float(mpmath.log(abs((exact - approx) / exact), 10))

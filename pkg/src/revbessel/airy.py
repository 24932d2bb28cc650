"""Complex Airy functions Ai_l, Ai_l' for l = 0, +1, -1.

Ai_l(w) = Ai(w exp(-2 pi i l / 3)); the derivative returned is d/dw of
that, chain-rule factor included, so the usual Wronskian identities hold
with respect to w.

Two evaluation routes: a Maclaurin series summed in arbitrary precision
(with enough guard digits to absorb the cancellation that sets in once
the argument leaves the decaying sector), and the exponent-form
asymptotic series, used only where optimal truncation delivers full
working accuracy.  The crossover is therefore accuracy-driven rather
than a fixed radius.
"""

import cmath
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath

from .errors import AccuracyWarning

__all__ = ["AiryCoeffTable", "airy_coeffs", "airy_eval"]

LOG10E = math.log10(math.e)

# asymptotics kick in here (double precision); see _use_asymptotic
ASYM_RADIUS = 9.0
ASYM_SECTOR = math.pi / 3 + 0.15
# dual-evaluation consistency band around the crossover
BAND_LO, BAND_HI = 8.5, 9.5
BAND_TOL = 1e-12


@dataclass(frozen=True)
class AiryCoeffTable:
    a: tuple          # a[s] for s = 0..S, a[0] unused (zero)
    a_tilde: tuple
    S: int


@lru_cache(maxsize=None)
def airy_coeffs(S):
    """Exact rational coefficient sequences of the exponent-form series.

    Both satisfy the same quadratic recursion
        a_{s+1} = (s+1)/2 * a_s + (1/2) sum_{j=1}^{s-1} a_j a_{s-j},
    seeded with a_1 = a_2 = 5/72 and atilde_1 = atilde_2 = -7/72.
    """
    if S < 2:
        raise ValueError("need S >= 2")

    def run(seed):
        c = [Fraction(0), seed, seed]
        for s in range(2, S):
            nxt = Fraction(s + 1, 2) * c[s]
            nxt += Fraction(1, 2) * sum(c[j] * c[s - j] for j in range(1, s))
            c.append(nxt)
        return tuple(c[: S + 1])

    return AiryCoeffTable(a=run(Fraction(5, 72)),
                          a_tilde=run(Fraction(-7, 72)), S=S)


def _maclaurin(v, dps):
    # Ai = c1*f + c2*g with the standard pair of 0F1-type series.
    with mpmath.workdps(dps):
        v = mpmath.mpc(v)
        c1 = mpmath.mpf(3) ** mpmath.mpf("-2/3") / mpmath.gamma(mpmath.mpf("2/3"))
        c2 = -(mpmath.mpf(3) ** mpmath.mpf("-1/3")) / mpmath.gamma(mpmath.mpf("1/3"))
        v3 = v * v * v
        # f, g and their derivatives share term recurrences in v^3
        tf = mpmath.mpc(1)          # term of f:  3^k (1/3)_k v^{3k}/(3k)!
        tg = v                      # term of g:  3^k (2/3)_k v^{3k+1}/(3k+1)!
        f = tf
        g = tg
        fp = mpmath.mpc(0)          # f' = sum 3^k (1/3)_k v^{3k-1}/(3k-1)!
        gp = mpmath.mpc(1)          # g' = sum 3^k (2/3)_k (3k+1) v^{3k}/(3k+1)!
        tgp = mpmath.mpc(1)
        k = 0
        eps = mpmath.mpf(10) ** (-(dps + 5))
        scale = max(abs(f), abs(g), mpmath.mpf(1))
        while True:
            k += 1
            tf = tf * v3 / (3 * k * (3 * k - 1))
            f += tf
            tfp = tf * (3 * k) / v if v != 0 else mpmath.mpc(0)
            fp += tfp
            tg = tg * v3 / (3 * k * (3 * k + 1))
            g += tg
            tgp = tgp * v3 / (3 * k * (3 * k - 2))
            gp += tgp
            m = max(abs(tf), abs(tg))
            scale = max(scale, abs(f), abs(g))
            if m < eps * scale and k > 3:
                break
            if k > 4000:
                raise RuntimeError("Airy Maclaurin series did not converge")
        ai = c1 * f + c2 * g
        aip = c1 * fp + c2 * gp
        return ai, aip


def _asym_terms(xia, coeffs):
    # optimally truncated sum of (-1)^s c_s / (s xia^s)
    total = 0j
    prev = abs(xia) * 1e9
    for s in range(1, len(coeffs)):
        t = (-1) ** s * float(coeffs[s]) / (s * xia ** s)
        if abs(t) >= prev:
            break
        total += t
        prev = abs(t)
    return total


def _asym(v, table):
    # exponent-form expansion; principal branches throughout
    xia = (2.0 / 3.0) * v ** 1.5
    q = v ** 0.25
    ai = cmath.exp(-xia + _asym_terms(xia, table.a)) / (2 * math.sqrt(math.pi) * q)
    aip = -q * cmath.exp(-xia + _asym_terms(xia, table.a_tilde)) / (2 * math.sqrt(math.pi))
    return ai, aip


def _asym_mp(v, table, dps):
    with mpmath.workdps(dps):
        v = mpmath.mpc(v)
        xia = mpmath.mpf(2) / 3 * v ** mpmath.mpf("3/2")
        q = v ** mpmath.mpf("1/4")
        tot_a = mpmath.mpc(0)
        tot_t = mpmath.mpc(0)
        prev = mpmath.inf
        for s in range(1, len(table.a)):
            base = (-1) ** s / (s * xia ** s)
            ta = base * mpmath.mpf(table.a[s].numerator) / table.a[s].denominator
            if abs(ta) >= prev:
                break
            tot_a += ta
            tot_t += base * mpmath.mpf(table.a_tilde[s].numerator) / table.a_tilde[s].denominator
            prev = abs(ta)
        root = 2 * mpmath.sqrt(mpmath.pi)
        ai = mpmath.exp(-xia + tot_a) / (root * q)
        aip = -q * mpmath.exp(-xia + tot_t) / root
        return ai, aip


def _series_dps(v, target_dps):
    # digits lost to cancellation grow like (4/3)|v|^{3/2} log10(e)
    return int(target_dps + (4.0 / 3.0) * abs(v) ** 1.5 * LOG10E + 15)


def _use_asymptotic(v, dps=None):
    if abs(cmath.phase(v)) > ASYM_SECTOR:
        return False
    if dps is None:
        return abs(v) >= ASYM_RADIUS
    return (2.0 / 3.0) * abs(v) ** 1.5 >= 0.5 * math.log(10) * (dps + 5)


@lru_cache(maxsize=None)
def _asym_table():
    return airy_coeffs(40)


def airy_eval(l, w, dps=None):
    """(Ai_l(w), Ai_l'(w)).

    l picks the rotated solution (0, 1 or -1).  With dps set, the pair is
    computed and returned at that many digits (mpmath complex); otherwise
    machine precision complex.
    """
    if l not in (0, 1, -1):
        raise ValueError("rotation index must be 0, 1 or -1")
    rot = cmath.exp(-2j * math.pi * l / 3)
    if dps is not None:
        with mpmath.workdps(dps + 10):
            rot_mp = mpmath.exp(-2 * mpmath.pi * mpmath.mpc(0, 1) * l / 3)
            v = mpmath.mpc(w) * rot_mp
            if _use_asymptotic(complex(v), dps):
                ai, aip = _asym_mp(v, _asym_table(), dps + 10)
            else:
                ai, aip = _maclaurin(v, _series_dps(complex(v), dps))
            return ai, aip * rot_mp

    v = complex(w) * rot
    if _use_asymptotic(v):
        ai, aip = _asym(v, _asym_table())
        if BAND_LO <= abs(v) <= BAND_HI:
            ai2, aip2 = _maclaurin(v, _series_dps(v, 18))
            ai2, aip2 = complex(ai2), complex(aip2)
            num = max(abs(ai - ai2), abs(aip - aip2))
            den = max(abs(ai2), abs(aip2), 1e-300)
            if num / den > BAND_TOL:
                warnings.warn(
                    "Airy crossover disagreement %.2e at |v|=%.3f"
                    % (num / den, abs(v)), AccuracyWarning)
                ai, aip = ai2, aip2
    else:
        ai, aip = _maclaurin(v, _series_dps(v, 18))
        ai, aip = complex(ai), complex(aip)
    return ai, aip * rot

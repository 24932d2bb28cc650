"""Direct-sum reference solutions.

The polynomial itself has the closed coefficient form

    sum_k C(n,k) (n+a-1)_k / 2^k  z^{n-k}

which is rederived here with Fraction arithmetic and used as the anchor
for everything else in the module.
"""

from fractions import Fraction
from math import comb

import mpmath
import pytest
from mpmath import mp

from revbessel import oracle
from revbessel.params import ProblemParams


def poly_coeffs(n, a):
    """out[k] multiplies z^{n-k}; exact rationals."""
    out = []
    for k in range(n + 1):
        poch = Fraction(1)
        for j in range(k):
            poch *= n + a - 1 + j
        out.append(Fraction(comb(n, k)) * poch / 2 ** k)
    return out


def poly_eval(cs, z):
    n = len(cs) - 1
    acc = mpmath.mpc(0)
    for k, c in enumerate(cs):
        acc += mpmath.mpf(c.numerator) / c.denominator * mpmath.mpc(z) ** (n - k)
    return acc


@pytest.mark.parametrize("n,a", [(2, Fraction(6, 5)), (5, Fraction(6, 5)),
                                 (12, Fraction(5)), (20, Fraction(6, 5))])
def test_direct_sum_matches_coefficient_form(n, a):
    p = ProblemParams(n, a)
    cs = poly_coeffs(n, a)
    with mp.workdps(60):
        for z in (mpmath.mpc("0.7", "0.3"), mpmath.mpc(-2), mpmath.mpc("0.01")):
            got = oracle.theta_direct(p, z, dps=60)
            want = poly_eval(cs, z)
            assert abs(got - want) <= 1e-55 * abs(want)


def test_value_at_origin_pochhammer():
    # theta_n(0) = (n+a-1)_n / 2^n
    for n in range(1, 7):
        p = ProblemParams(n, Fraction(6, 5))
        want = poly_coeffs(n, Fraction(6, 5))[n]
        got = oracle.theta_direct(p, 0, dps=40)
        with mp.workdps(40):
            ref = mpmath.mpf(want.numerator) / want.denominator
            assert abs(got - ref) < 1e-38 * ref


@pytest.mark.parametrize("n", [2, 3, 5, 8])
def test_ode_satisfied_exactly(n):
    """z th'' - (2n+a-2+2z) th' + 2n th = 0, checked on exact coefficients."""
    a = Fraction(6, 5)
    cs = poly_coeffs(n, a)           # cs[k] * z^{n-k}
    c = {n - k: v for k, v in enumerate(cs)}

    def term(d, shift):
        # coefficient dict of z^shift * d-th derivative
        out = {}
        for deg, v in c.items():
            if deg < d:
                continue
            fac = Fraction(1)
            for i in range(d):
                fac *= deg - i
            out[deg - d + shift] = out.get(deg - d + shift, Fraction(0)) + fac * v
        return out

    resid = {}
    for part, w in ((term(2, 1), Fraction(1)),
                    (term(1, 0), -(2 * n + a - 2)),
                    (term(1, 1), Fraction(-2)),
                    (term(0, 0), Fraction(2 * n))):
        for deg, v in part.items():
            resid[deg] = resid.get(deg, Fraction(0)) + w * v
    assert all(v == 0 for v in resid.values())


def test_frozen_values():
    p = ProblemParams(20, Fraction(6, 5))
    with mp.workdps(60):
        v = oracle.theta_direct(p, mpmath.mpc("2.5", "0.5"), dps=60)
        ref = mpmath.mpc("1937540156058774741350192.455433219774143",
                         "1002674162474304377568570.997736469553491")
        assert abs(v - ref) < 1e-30 * abs(ref)
        w0 = oracle.w0_direct(p, mpmath.mpc(3), dps=60)
        assert abs(w0 - mpmath.mpf("64282556.27270494077597854077667471895585")) \
            < 1e-30 * abs(w0)
        w1 = oracle.w1_direct(p, mpmath.mpc(3), dps=60)
        ref1 = mpmath.mpc("-4714992.88652436075279049905897649915374",
                          "-3425642.851302702733778986780687194058946")
        assert abs(w1 - ref1) < 1e-30 * abs(w1)
        wm = oracle.w_minus1_direct(p, mpmath.mpc(3), dps=60)
        refm = mpmath.mpf("4.133443982953746312188838018452906358322e-39")
        assert abs(wm - refm) < 1e-30 * abs(wm)


def test_w_minus1_against_library_hypergeometric():
    """Independent route: regularised Kummer function from mpmath itself."""
    p = ProblemParams(7, Fraction(6, 5))
    n, a = 7, Fraction(6, 5)
    with mp.workdps(50):
        b = mpmath.mpf((n + a - 1).numerator) / (n + a - 1).denominator
        cpar = mpmath.mpf((2 * n + a).numerator) / (2 * n + a).denominator
        for z in (mpmath.mpc("1.5"), mpmath.mpc("-0.8", "0.6"),
                  mpmath.mpc("0.1", "2.0")):
            got = oracle.w_minus1_direct(p, z, dps=50)
            pref = z ** (n + mpmath.mpf(a.numerator) / a.denominator / 2) \
                * mpmath.exp(-z)
            want = pref * mpmath.hyp1f1(b, cpar, 2 * z) / mpmath.gamma(cpar)
            assert abs(got - want) < 1e-44 * abs(want)


def test_w1_two_routes_agree():
    p = ProblemParams(10, Fraction(6, 5))
    with mp.workdps(50):
        for z in (mpmath.mpc(2), mpmath.mpc("-1.5", "0.5")):
            direct = oracle.w1_direct(p, z, dps=50)
            marched = oracle.w1_ode(p, z, dps=50)
            assert abs(direct - marched) < 1e-40 * abs(direct)


def test_recessive_normalisation_at_plus_infinity():
    # w0 ~ z^{n+a/2} e^{-z} (2z)^{-(n+a-1)} far to the right
    p = ProblemParams(6, Fraction(6, 5))
    with mp.workdps(40):
        z = mpmath.mpf(3000)
        got = oracle.w0_direct(p, z, dps=40)
        lead = z ** (6 + mpmath.mpf("0.6")) * mpmath.exp(-z) \
            * (2 * z) ** (-mpmath.mpf("6.2"))
        # next-order correction is about 19/z
        assert abs(got / lead - 1) < 0.01


def test_connection_residual_spots():
    for n, a, z in ((10, Fraction(6, 5), mpmath.mpc(1)),
                    (2, Fraction(5), mpmath.mpc("-2", "0.5"))):
        res = oracle.connection_residual(ProblemParams(n, a), z, dps=50)
        assert res < 1e-30


def test_conjugation_exact():
    # real-coefficient solutions reflect; the minus-infinity one carries a
    # one-sided phase and is deliberately excluded
    p = ProblemParams(9, Fraction(6, 5))
    with mp.workdps(40):
        z = mpmath.mpc("1.3", "0.8")
        for fn in (oracle.theta_direct, oracle.w0_direct,
                   oracle.w_minus1_direct):
            v = fn(p, z, dps=40)
            vc = fn(p, mpmath.conj(z), dps=40)
            assert abs(vc - mpmath.conj(v)) <= 1e-38 * abs(v)

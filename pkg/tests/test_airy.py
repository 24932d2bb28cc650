"""Checks for the rotated Airy evaluator and its coefficient tables."""

import cmath
import math
import warnings
from fractions import Fraction

import mpmath
import pytest

from revbessel import airy
from revbessel.errors import AccuracyWarning


def test_coefficient_seeds_and_low_orders():
    t = airy.airy_coeffs(8)
    assert t.a[1] == t.a[2] == Fraction(5, 72)
    assert t.a_tilde[1] == t.a_tilde[2] == Fraction(-7, 72)
    # one recursion step by hand
    assert t.a[3] == Fraction(3, 2) * Fraction(5, 72) + Fraction(1, 2) * Fraction(5, 72) ** 2
    assert t.a[3] == Fraction(1105, 10368)
    assert t.a_tilde[3] == Fraction(-1463, 10368)
    assert t.a[7] == Fraction(1282031525, 214990848)
    assert t.a_tilde[8] == Fraction(-89374187, 3359232)


def test_exponent_series_reproduces_poincare_coefficients():
    """exp of the a-series must give the classical u_s (and v_s) sequence."""
    S = 8
    t = airy.airy_coeffs(S)
    u = [Fraction(1)]
    for s in range(1, S + 1):
        u.append(u[-1] * Fraction((6 * s - 5) * (6 * s - 1), 72 * s))
    v = [Fraction(1)] + [-Fraction(6 * s + 1, 6 * s - 1) * u[s] for s in range(1, S + 1)]

    def exp_series(coeffs):
        # B = exp(A) with A_s = (-1)^s coeffs[s]/s, via n B_n = sum k A_k B_{n-k}
        A = [Fraction(0)] + [Fraction((-1) ** s) * coeffs[s] / s for s in range(1, S + 1)]
        B = [Fraction(1)]
        for n in range(1, S + 1):
            B.append(sum(k * A[k] * B[n - k] for k in range(1, n + 1)) / n)
        return B

    got_u = exp_series(t.a)
    got_v = exp_series(t.a_tilde)
    for s in range(S + 1):
        assert got_u[s] == Fraction(-1) ** s * u[s]
        assert got_v[s] == Fraction(-1) ** s * v[s]


def test_sign_pattern_flagged_not_failed():
    t = airy.airy_coeffs(12)
    bad = [s for s in range(1, 13) if not (t.a[s] > 0 > t.a_tilde[s])]
    if bad:
        warnings.warn("coefficient sign pattern broken at %r" % bad)


def test_coeffs_reject_tiny_order():
    with pytest.raises(ValueError):
        airy.airy_coeffs(1)
    with pytest.raises(ValueError):
        airy.airy_eval(2, 1.0)


def test_values_at_origin():
    ai, aip = airy.airy_eval(0, 0.0)
    assert abs(ai - 3 ** (-2.0 / 3.0) / math.gamma(2.0 / 3.0)) < 1e-15
    assert abs(aip + 3 ** (-1.0 / 3.0) / math.gamma(1.0 / 3.0)) < 1e-15


def test_rotation_identity_random(rng):
    # Ai - e^{pi i/3} Ai_1 - e^{-pi i/3} Ai_{-1} = 0
    pts = rng.uniform(-3, 3, size=(50, 2))
    for x, y in pts:
        w = complex(x, y)
        s = (
            airy.airy_eval(0, w)[0]
            - cmath.exp(1j * math.pi / 3) * airy.airy_eval(1, w)[0]
            - cmath.exp(-1j * math.pi / 3) * airy.airy_eval(-1, w)[0]
        )
        assert abs(s) < 1e-13


def test_wronskian_constant_over_grid(rng):
    # constancy only; measured constant is e^{i pi/6}/(2 pi) for (0,1)
    pts = [complex(x, y) for x, y in rng.uniform(-4, 4, size=(12, 2))]
    ref = None
    for w in pts:
        a0, d0 = airy.airy_eval(0, w)
        a1, d1 = airy.airy_eval(1, w)
        wr = a0 * d1 - d0 * a1
        ref = wr if ref is None else ref
        assert abs(wr - ref) < 1e-12


def test_decay_normalisation_large_positive():
    prev = None
    for w in (20.0, 50.0, 100.0):
        ai, _ = airy.airy_eval(0, w)
        ratio = ai * 2 * math.sqrt(math.pi) * w**0.25 * math.exp((2.0 / 3.0) * w**1.5)
        # leading correction is -(5/72)/xi_airy
        assert abs(ratio - 1) < 1.2 * (5.0 / 72.0) / ((2.0 / 3.0) * w**1.5)
        if prev is not None:
            assert abs(ratio - 1) < prev
        prev = abs(ratio - 1)


def test_derivative_definition_chain_rule():
    w = 1.3 + 0.4j
    h = 1e-6
    _, dp = airy.airy_eval(1, w)
    fd = (airy.airy_eval(1, w + h)[0] - airy.airy_eval(1, w - h)[0]) / (2 * h)
    assert abs(dp - fd) < 1e-9


@pytest.mark.parametrize("w", [2.0, -3.0 + 1j, 12.0, 9.0j])
@pytest.mark.parametrize("l", [0, 1, -1])
def test_high_precision_matches_reference(w, l):
    got, gotp = airy.airy_eval(l, w, dps=35)
    with mpmath.workdps(45):
        rot = mpmath.exp(-2j * mpmath.pi * l / 3)
        ref = mpmath.airyai(mpmath.mpc(w) * rot)
        refp = mpmath.airyai(mpmath.mpc(w) * rot, derivative=1) * rot
        assert abs(got - ref) < mpmath.mpf("1e-30") * abs(ref)
        assert abs(gotp - refp) < mpmath.mpf("1e-30") * abs(refp)


def _route_disagreement(v):
    s_ai, s_aip = airy._maclaurin(v, airy._series_dps(v, 18))
    a_ai, a_aip = airy._asym(v, airy._asym_table())
    num = max(abs(a_ai - complex(s_ai)), abs(a_aip - complex(s_aip)))
    return num / max(abs(s_ai), abs(s_aip))


ANNULUS = [
    r * cmath.exp(1j * ang)
    for r in (4.0, 5.0, 6.0)
    for ang in (0.0, 0.7, 1.4, 2 * math.pi / 3)
]


@pytest.mark.xfail(
    strict=True,
    reason="optimal truncation of the asymptotic series floors near 2e-5 at "
    "|w| = 4; double-precision agreement to 1e-10 is not reachable there, "
    "which is why the production crossover sits at |w| = 9",
)
def test_crossover_agreement_inner_annulus():
    for v in ANNULUS:
        assert _route_disagreement(v) < 1e-10


def test_crossover_agreement_envelope():
    # what the two routes actually deliver: the smallest-term envelope
    for v in ANNULUS:
        bound = 10 * math.exp(-(4.0 / 3.0) * abs(v) ** 1.5)
        assert _route_disagreement(v) < bound
    # and at the production radius the envelope is below 1e-12
    for ang in (0.0, 0.6, 1.0):
        assert _route_disagreement(9.0 * cmath.exp(1j * ang)) < 1e-12


def test_inner_annulus_public_values_stay_accurate():
    # the evaluator never uses the weak branch there
    for v in ANNULUS:
        got, _ = airy.airy_eval(0, v)
        with mpmath.workdps(40):
            ref = mpmath.airyai(mpmath.mpc(v))
            assert abs(got - ref) < mpmath.mpf("1e-12") * abs(ref)


def test_band_guard_warns_and_falls_back(monkeypatch):
    monkeypatch.setattr(airy, "BAND_TOL", 1e-16)
    v = 9.0 + 0j
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        got, _ = airy.airy_eval(0, v)
    assert any(isinstance(r.message, AccuracyWarning) for r in rec)
    ref = complex(airy._maclaurin(v, airy._series_dps(v, 18))[0])
    assert got == ref

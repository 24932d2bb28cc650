"""Exact trig-polynomial arithmetic underneath the coefficient tables."""

import cmath
import math
from fractions import Fraction

import pytest

from revbessel.errors import SecularTermError
from revbessel.exactalg import (COS, ONE_TP, SIN, QPoly, RatFunc, TrigPoly,
                                cf_rational, tp_const)


def test_qpoly_arithmetic():
    p = QPoly((1, 2))          # 1 + 2a
    q = QPoly((0, 0, 3))       # 3a^2
    assert (p * q).c == (Fraction(0), Fraction(0), Fraction(3), Fraction(6))
    assert (p - p).is_zero
    assert p(Fraction(1, 2)) == Fraction(2)
    assert (p + q).degree() == 2


def test_qpoly_divide_one_plus_alpha():
    p = QPoly((1, 1)) * QPoly((2, 0, 5))
    q = p.divide_one_plus_alpha()
    assert q == QPoly((2, 0, 5))
    assert QPoly((1, 2)).divide_one_plus_alpha() is None


def test_sin_cos_pythagoras():
    assert SIN * SIN + COS * COS == ONE_TP


def test_trig_eval_matches_cmath(rng):
    tp = SIN * SIN * COS + COS * COS * Fraction(3, 7)
    alpha = Fraction(-8, 205)
    sigma = math.sqrt(1 + float(alpha))
    for _ in range(10):
        phi = rng.uniform(-math.pi, math.pi) + 1j * rng.uniform(-0.4, 0.4)
        e = cmath.exp(1j * phi)
        got = tp.eval(float(alpha), sigma, e, 1 / e)
        want = (cmath.sin(phi) ** 2 * cmath.cos(phi)
                + 3 / 7 * cmath.cos(phi) ** 2)
        assert abs(got - want) < 1e-14


def test_integrate_then_diff_roundtrip():
    tp = SIN * COS * COS + SIN * Fraction(2, 3)
    anti = tp.integrate()
    assert anti.diff() == tp


def test_integrate_rejects_constant_mean():
    # cos^2 has mean 1/2; a phi-linear antiderivative would leave the ring
    with pytest.raises(SecularTermError) as err:
        (COS * COS).integrate()
    assert err.value.coefficient is not None


def test_integral_constant_fixes_value_at_zero():
    anti = (SIN * COS).integrate()
    assert anti.value_at_zero().is_zero


def test_real_form_detection():
    assert (SIN * COS + COS).is_real_form()


def test_to_cos_sin_roundtrip():
    tp = SIN * SIN * SIN + COS * Fraction(5, 2)
    a, b = tp.to_cos_sin()
    alpha, sigma = 1 / 3, math.sqrt(1 + 1 / 3)
    phi = 0.6180339887
    want = tp.eval(alpha, sigma, cmath.exp(1j * phi), cmath.exp(-1j * phi))
    acc = 0.0
    for k, cf in a.items():
        acc += cf.eval(alpha, sigma) * math.cos(k * phi)
    for k, cf in b.items():
        acc += cf.eval(alpha, sigma) * math.sin(k * phi)
    assert abs(acc - want.real) < 1e-14
    assert abs(want.imag) < 1e-14


def test_ratfunc_structure():
    rf = RatFunc(QPoly((0, 5)), 1)      # 5a / (1+a)
    assert rf.num == QPoly((0, 5))
    assert rf.m == 1
    two = rf + rf
    assert two.num == QPoly((0, 10))


def test_tp_const_is_constant():
    c = tp_const(cf_rational(Fraction(3, 4)))
    assert c.indices() == [0]

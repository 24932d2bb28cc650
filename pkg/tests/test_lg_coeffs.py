"""Exact-table checks plus a numeric probe of F_s = dE_s/dxi."""

from fractions import Fraction

import pytest

from revbessel import lg_coeffs, mapping, uniform_airy
from revbessel.params import ProblemParams

# printed closed forms, as the dump renders them
E1_E2_LINES = [
    "E 1 cos 0 : (a)/(48(1+a)) , 0",
    "E 1 cos 1 : (-3a)/(64(1+a)) , 0",
    "E 1 cos 3 : (5a)/(192(1+a)) , 0",
    "E 1 sin 1 : 0 , (-1)/(32(1+a))",
    "E 1 sin 3 : 0 , 5/(96(1+a))",
    "E 2 cos 0 : (-7a^2-12a-12)/(1024(1+a)^2) , 0",
    "E 2 cos 2 : (27a^2+20a+20)/(2048(1+a)^2) , 0",
    "E 2 cos 4 : (-9a^2+12a+12)/(1024(1+a)^2) , 0",
]


def test_dump_first_two_orders(tables8):
    text = lg_coeffs.dump_tables(tables8, kinds=("E",))
    for line in E1_E2_LINES:
        assert line in text, line


def test_no_secular_terms_through_order_eight(tables8):
    # construction would have raised SecularTermError otherwise
    assert tables8.S == 8
    assert sorted(tables8.E) == list(range(1, 9))
    assert sorted(tables8.F) == list(range(1, 9))


def test_tables_stay_in_real_form(tables8):
    for s in range(1, 9):
        assert tables8.E[s].is_real_form()
        assert tables8.F[s].is_real_form()
    assert tables8.G.is_real_form()


def test_kernel_matches_its_closed_form(params20, tables8):
    # G = cos sin^2/(2 sigma) - alpha sin^3/(4(1+alpha))
    al = params20.alpha_float
    sg = params20.sigma
    z = 1.2 + 0.7j
    sp, cp = mapping.phi_trig(params20, z)
    got = lg_coeffs.eval_trig(tables8.G, params20, sp, cp)
    want = cp * sp**2 / (2 * sg) - al * sp**3 / (4 * (1 + al))
    assert abs(got - want) < 1e-14


@pytest.mark.parametrize("s", [1, 3, 5, 7])
def test_odd_constant_terms_are_minus_d(tables8, s):
    """The phi-mean of each odd E_s equals -d_s, exactly in alpha."""
    const = tables8.E[s].get(0)
    assert const.im.is_zero
    assert const.re.c1.is_zero
    for al in (Fraction(-8, 205), Fraction(0), Fraction(3, 2), Fraction(7)):
        p = ProblemParams(20, 2 + Fraction(41, 2) * al)
        assert p.alpha == al
        d = uniform_airy.d_coeffs(p, (s + 1) // 2).d[s]
        assert const.re.c0.eval(al) == -d


def test_mean_free_after_removing_constant(tables8):
    # integrate() succeeded during the build, so nothing here can have a
    # nonzero mean once its k=0 part is dropped; spot-check via diff.
    e5 = tables8.E[5]
    back = e5.diff().integrate()
    for k in back.indices():
        if k != 0:
            assert back.get(k) == e5.get(k)


@pytest.mark.parametrize("z", [2.2 + 0.4j, -1.4 + 1.1j, 0.5 + 0.3j, 4 + 2j])
def test_F_is_xi_derivative_of_E(params20, tables8, z):
    h = 1e-6
    xiv = mapping.xi(params20, z)
    zp = mapping.invert_xi(params20, xiv + h, z)
    zm = mapping.invert_xi(params20, xiv - h, z)
    for s in (1, 2, 4):
        ep = lg_coeffs.eval_trig(tables8.E[s], params20, *flip(params20, zp))
        em = lg_coeffs.eval_trig(tables8.E[s], params20, *flip(params20, zm))
        fd = (ep - em) / (2 * h)
        fv = lg_coeffs.eval_trig(tables8.F[s], params20, *flip(params20, z))
        assert abs(fd - fv) < 1e-5 * max(1e-3, abs(fv))


def flip(params, z):
    return mapping.phi_trig(params, z)


def test_rebuild_at_lower_order_agrees(tables8):
    small = lg_coeffs.build_tables(3)
    for s in (1, 2, 3):
        for k in small.E[s].indices():
            assert small.E[s].get(k) == tables8.E[s].get(k)
        for k in small.F[s].indices():
            assert small.F[s].get(k) == tables8.F[s].get(k)


def test_order_must_be_at_least_two():
    with pytest.raises(ValueError):
        lg_coeffs.compute_E(1)

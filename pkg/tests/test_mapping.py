import cmath
import math
from fractions import Fraction

import pytest

from revbessel import mapping
from revbessel.errors import RangeError, TurningPointError
from revbessel.params import ProblemParams

SAMPLE_POINTS = [2 + 0.3j, -3 + 1j, 0.4 + 0.1j, -0.2 + 2j, 7 + 0.01j]


def test_xi_vanishes_at_turning_point(params20):
    assert abs(mapping.xi(params20, params20.z1)) < 1e-10
    assert abs(mapping.xi_closed(params20, params20.z1)) < 1e-10


@pytest.mark.parametrize("z", SAMPLE_POINTS)
def test_closed_form_matches_quadrature(params20, z):
    a = mapping.xi_closed(params20, z)
    b = mapping.xi_quadrature(params20, z)
    assert abs(a - b) < 1e-9


@pytest.mark.parametrize("z", [1.5 + 0.4j, -2 + 0.8j, 0.6 + 0.6j])
def test_xi_derivative_is_Z_over_z(params20, z):
    # central difference against the defining ODE dxi/dz = Z/z
    h = 1e-6
    d = (mapping.xi(params20, z + h) - mapping.xi(params20, z - h)) / (2 * h)
    Z, _ = mapping.big_Z(params20, z)
    assert abs(d - Z / z) < 1e-7 * abs(Z / z)


@pytest.mark.parametrize("z", SAMPLE_POINTS)
def test_invert_xi_roundtrip(params20, z):
    target = mapping.xi(params20, z)
    back = mapping.invert_xi(params20, target, z + 0.2)
    assert abs(back - z) < 1e-10


def test_zeta_cube_relation(params20):
    """zeta and its analytic square root satisfy (2/3) zeta^{3/2} = xi."""
    for z in SAMPLE_POINTS:
        xiv = mapping.xi(params20, z)
        ze = mapping.zeta_analytic(params20, z)
        sq = mapping.sqrt_zeta_analytic(params20, z)
        assert abs(sq * sq - ze) < 1e-12 * max(1.0, abs(ze))
        assert abs(2.0 / 3.0 * ze * sq - xiv) < 1e-12 * max(1.0, abs(xiv))


def test_zeta_of_xi_conventions():
    assert mapping.zeta_of_xi(0) == 0
    v = mapping.zeta_of_xi(1.5)
    assert v.imag == 0 and v.real == pytest.approx(2.25 ** (2.0 / 3.0))
    # negative real xi sits on zeta's upper cut edge
    w = mapping.zeta_of_xi(-1.5)
    assert cmath.phase(w) == pytest.approx(2 * math.pi / 3)


def test_quarter_power_fourth_root(params20):
    # R^4 = zeta/f, including just off the turning point
    for z in [2 + 0.3j, params20.z1 + 1e-3, params20.z1 + 0.2 + 0.1j]:
        R = mapping.quarter_power_R(params20, z)
        fv, _, _ = mapping.f_g_psi(params20, z)
        ze = mapping.zeta_analytic(params20, z)
        assert abs(R**4 - ze / fv) < 1e-10 * abs(ze / fv)


def test_f_g_psi_values(params20):
    al = params20.alpha_float
    z = 1.7 + 0.4j
    fv, gv, psiv = mapping.f_g_psi(params20, z)
    w = z + al / 2
    assert abs(fv - (w * w + 1 + al) / (z * z)) < 1e-15
    assert abs(gv + 1 / (4 * z * z)) < 1e-16
    assert cmath.isfinite(psiv)
    with pytest.raises(RangeError):
        mapping.f_g_psi(params20, 0)
    # psi has a triple pole at the turning points
    _, _, near = mapping.f_g_psi(params20, params20.z1 + 1e-6)
    assert abs(near) > 1e15


def test_phi_identities(params20):
    z = 0.9 + 0.7j
    sp, cp = mapping.phi_trig(params20, z)
    assert abs(sp * sp + cp * cp - 1) < 1e-14
    ei, emi = mapping.phi_exponentials(params20, z)
    assert abs(ei * emi - 1) < 1e-14
    assert abs((ei + emi) / 2 - cp) < 1e-14
    assert abs((ei - emi) / 2j - sp) < 1e-14
    with pytest.raises(TurningPointError):
        mapping.phi_trig(params20, params20.z1)


def test_upper_half_plane_contract(params20):
    with pytest.raises(RangeError):
        mapping.big_Z(params20, 1 - 1j)
    with pytest.raises(RangeError):
        mapping.xi(params20, 1 - 1j)
    # map_point reflects instead
    m = mapping.map_point(params20, 2 - 0.5j)
    mu = mapping.map_point(params20, 2 + 0.5j)
    assert m.xi == mu.xi.conjugate()
    assert m.zeta == mu.zeta.conjugate()
    assert m.Z_val == mu.Z_val.conjugate()


def test_map_point_internal_consistency(params20):
    m = mapping.map_point(params20, 1.3 + 0.8j)
    assert abs(m.Z_val**2 - m.z**2 * m.f_val) < 1e-13
    assert abs(m.zeta - mapping.zeta_of_xi(m.xi)) < 1e-13
    assert m.side_of_cut in ("right", "left", "on_cut")
    assert abs(m.sin_phi**2 + m.cos_phi**2 - 1) < 1e-13


def test_trace_rejects_unknown_branch(params20):
    with pytest.raises(RangeError):
        mapping.trace_stokes(params20, "ZZ")


def test_anti_stokes_to_negative_axis(params20):
    """The branch heading left lands on the negative axis at xi = -pi i/2."""
    pl = mapping.trace_stokes(params20, "AH")
    end = pl.points[-1]
    assert end.imag == 0 and end.real < 0
    assert abs(end.real - (-0.6431044914925468)) < 1e-9
    assert abs(pl.xi_values[-1] + 1j * math.pi / 2) < 1e-10
    assert max(abs(q.real) for q in pl.xi_values) < 1e-10


def test_anti_stokes_to_positive_axis(params20):
    pl = mapping.trace_stokes(params20, "AD")
    end = pl.points[-1]
    assert end.imag == 0 and end.real > 0
    assert max(abs(q.real) for q in pl.xi_values) < 1e-10
    # recorded xi values agree with fresh evaluation mid-curve
    k = len(pl.points) // 2
    assert abs(pl.xi_values[k] - mapping.xi(params20, pl.points[k])) < 1e-10


def test_other_degree_and_weight():
    # nothing above is special to one parameter pair
    p = ProblemParams(7, Fraction(5, 2))
    assert abs(mapping.xi(p, p.z1)) < 1e-10
    z = 1.1 + 0.9j
    assert abs(mapping.xi_closed(p, z) - mapping.xi_quadrature(p, z)) < 1e-9

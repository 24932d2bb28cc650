import cmath
import math

import pytest

from revbessel import lg_solutions as lg
from revbessel import oracle
from revbessel.errors import RangeError, RegionWarning, TurningPointError


def test_branch_phase_is_unity_for_all_four(params20):
    for key in lg.REFERENCE_NAME:
        assert lg._branch_phase(params20, key) == 1


def test_zero_side_constants_differ_by_quarter_turn(params20):
    cm = lg.matching_constant(params20, -1, sign="-", log=True)
    cp = lg.matching_constant(params20, -1, sign="+", log=True)
    d = cm - cp
    assert abs(d.imag - math.pi / 2) < 1e-12
    assert abs(d.real) < 1e-3


def test_log_form_consistent(params20):
    c = lg.matching_constant(params20, 0, log=True)
    assert abs(lg.matching_constant(params20, 0) - cmath.exp(c)) < 1e-12 * abs(
        cmath.exp(c)
    )


@pytest.mark.parametrize(
    "j,sign,z,tol",
    [
        (0, None, 3.0, 1e-8),
        (1, None, -3.0, 1e-8),
        (-1, "+", 0.15, 1e-8),
        (-1, "-", -0.15, 1e-8),
    ],
)
def test_all_solutions_match_their_oracles(params20, j, sign, z, tol):
    u = params20.u_float
    got = lg.lg_eval(params20, j, z, N=5, sign=sign).value
    fn = {0: oracle.w0_direct, 1: oracle.w1_direct, -1: oracle.w_minus1_direct}[j]
    ref = complex(fn(params20, u * z, dps=40))
    assert abs(got - ref) < tol * abs(ref)


def test_bound_dominates_true_error(params20):
    """The computed eta must stay above the measured deviation, order by
    order, and shrink as the truncation deepens."""
    u = params20.u_float
    ref = complex(oracle.w0_direct(params20, 3 * u, dps=40))
    prev_eta = None
    for N in (2, 3, 4, 5):
        got = lg.lg_eval(params20, 0, 3.0, N=N).value
        measured = abs(got - ref) / abs(ref)
        rep = lg.eta_bound(params20, 0, N, 3.0)
        assert rep.eta >= measured
        if prev_eta is not None:
            assert rep.eta < prev_eta
        prev_eta = rep.eta
    assert prev_eta < 1e-9


def test_bound_report_fields(params20):
    rep = lg.eta_bound(params20, 0, 3, 3.0)
    assert rep.Phi > 0 and rep.Psi >= 0 and rep.eta > 0
    assert rep.reference_point == "plus_inf"
    assert len(rep.path) >= 2


def test_order_validation(params20):
    with pytest.raises(RangeError):
        lg.eta_bound(params20, 0, 1, 3.0)
    with pytest.raises(RangeError):
        lg.eta_bound(params20, 0, 9, 3.0)
    with pytest.raises(RangeError):
        lg.lg_eval(params20, 0, 3.0, N=1)


def test_invalid_index_rejected(params20):
    with pytest.raises(ValueError):
        lg.lg_eval(params20, 2, 3.0)
    with pytest.raises(ValueError):
        lg.lg_eval(params20, -1, 0.15)  # missing side


def test_turning_point_and_origin_guards(params20):
    with pytest.raises(TurningPointError):
        lg.lg_eval(params20, 0, complex(params20.z1) + 0.01)
    with pytest.raises(RangeError):
        lg.lg_eval(params20, 0, 0.0)


def test_region_warning_in_excluded_lens(params20):
    assert not lg.region_check(params20, 0, -0.4 + 0.3j)
    with pytest.warns(RegionWarning):
        lg.lg_eval(params20, 0, -0.4 + 0.3j)
    # and silent where admissible
    assert lg.region_check(params20, 0, 3.0)


def test_reflection_is_exact(params20):
    up = lg.lg_eval(params20, 0, 2 + 0.7j)
    dn = lg.lg_eval(params20, 0, 2 - 0.7j)
    assert dn.value == up.value.conjugate()
    assert dn.log_value == up.log_value.conjugate()


def test_high_precision_exponential(params20):
    # same point with and without mpmath finishing
    a = lg.lg_eval(params20, 0, 3.0, N=5)
    b = lg.lg_eval(params20, 0, 3.0, N=5, dps=40)
    assert abs(complex(b.value) - a.value) < 1e-12 * abs(a.value)

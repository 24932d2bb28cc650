"""Exponential-form solutions of the transformed equation, their matching
constants, and computable error bounds.

Four solutions are carried: index 0 (recessive as z -> +inf), index 1
(recessive as z -> -inf), and the two index -1 forms (both recessive at
z = 0, approached from the right or the left).  Each is

    C * f^{-1/4}(a,z) * exp(s*u*xi + sum_{s=1}^{N-1} (+-1)^s E_s / u^s)

with the sign pattern fixed by the recessive direction.  Error control
comes from path integrals of the F_s along monotone-Re(xi) polygons.
"""

import cmath
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np

from . import mapping, oracle
from .errors import (NumericalError, RangeError, RegionWarning,
                     TurningPointError)
from .lg_coeffs import cached_tables, eval_trig

__all__ = ["LGResult", "BoundReport", "matching_constant", "lg_eval",
           "eta_bound", "region_check"]

LOG2 = math.log(2.0)
REFERENCE_NAME = {(0, None): "plus_inf", (1, None): "minus_inf",
                  (-1, "+"): "zero_plus", (-1, "-"): "zero_minus"}
# exponent sign and alternating flag per solution index
_SIGNS = {(0, None): (-1, True), (1, None): (1, False),
          (-1, "+"): (1, False), (-1, "-"): (-1, True)}
_ANCHOR = {(0, None): 3.0, (1, None): -3.0, (-1, "+"): 0.15, (-1, "-"): -0.15}

PATH_TAIL = 100.0


@dataclass
class LGResult:
    value: complex
    N: int
    exponent_sum: complex
    eta_bound: float = None
    log_value: complex = None


@dataclass
class BoundReport:
    Phi: float
    Psi: float
    eta: float
    path: list
    reference_point: str


def _key(j, sign):
    if j in (0, 1):
        return (j, None)
    if j == -1:
        if sign not in ("+", "-"):
            raise ValueError("index -1 needs sign '+' or '-'")
        return (-1, sign)
    raise ValueError("solution index must be 0, 1 or -1")


def matching_constant(params, j, sign=None, log=False):
    """C_n^{(j)} tying the exponential-form solution to w^{(j)}.

    Magnitude and phase are assembled in log form so large n and u do not
    overflow; set log=True for the raw complex logarithm.
    """
    key = _key(j, sign)
    u = params.u_float
    al = params.alpha_float
    n = params.n_int
    a = params.a_float
    half_ualpha = 0.5 * u * al
    if key == (0, None):
        re = -0.5 * LOG2 - 0.5 * u * math.log(4 * (1 + al)) \
            + half_ualpha * (1 - math.log(2 * u * (1 + al)))
        im = -0.5 * u * (1 + al) * math.pi
    elif key == (1, None):
        re = -0.5 * LOG2 + 0.5 * u * math.log((1 + al) / 4) \
            + half_ualpha * (math.log(0.5 * u * (1 + al)) - 1)
        im = 0.5 * u * (1 + al) * math.pi
    elif key == (-1, "+"):
        re = 0.5 * u * math.log(1 + al) - (n + 1) * LOG2 \
            - math.lgamma(n + a - 1) \
            + half_ualpha * (math.log(0.5 * u * (1 + al)) - 1)
        im = 0.5 * u * (1 + al) * math.pi
    else:
        re = -0.5 * LOG2 - 0.5 * u * math.log(4 * (1 + al)) \
            - math.lgamma(n + 1) \
            + half_ualpha * (1 - math.log(2 * u * (1 + al)))
        im = 0.5 * math.pi + 0.5 * u * (1 + al) * math.pi
    c = complex(re, im)
    return c if log else cmath.exp(c)


def _value_key(params, key, z):
    """Formula selection.  The two index -1 variants denote one solution;
    which defining series applies at z is decided by the side of the cut
    joined with the upward Stokes arc, because xi flips across the cut
    and the recessive exponential trades places there."""
    if key[0] != -1:
        return key
    sc = mapping._scale(params)
    cut = np.asarray(mapping._cut_polyline(params))
    if mapping._dist_to_polyline(z, cut) < 1e-9 * sc:
        return (-1, "+")      # on-cut values take the right-side limit
    right = _ray_hits(z, _af_barrier(params)) % 2 == 0
    return (-1, "+") if right else (-1, "-")


def _raw_log(params, key, N, z):
    """Everything except the calibration phase, as one complex log."""
    tables = cached_tables(8)
    if N - 1 > tables.S:
        raise RangeError("truncation order beyond the computed tables")
    xi_val = mapping.xi(params, z)
    Zv, _ = mapping.big_Z(params, z)
    sp, cp = mapping.phi_trig(params, z)
    u = params.u_float
    esign, alternating = _SIGNS[key]
    total = 0j
    for s in range(1, N):
        term = eval_trig(tables.E[s], params, sp, cp) / u ** s
        if alternating and s % 2 == 1:
            term = -term
        total += term
    j, sign = key
    log_c = matching_constant(params, j, sign, log=True)
    # f^{-1/4} = (Z/z)^{-1/2}; arg(Z/z) stays in [-pi/2, pi/2] off the cut,
    # so the principal square root is the continuous one
    log_f = -0.5 * cmath.log(Zv / z)
    return log_c + log_f + esign * u * xi_val + total, total


@lru_cache(maxsize=None)
def _branch_phase(params, key):
    """One-point oracle calibration of the fourth-root phase, snapped to a
    power of i.  Comes out 1 when the principal branch already matches."""
    z0 = _ANCHOR[key]
    raw, _ = _raw_log(params, key, 5, complex(z0))
    uz = params.u_float * z0
    j, sign = key
    if key == (0, None):
        ref = oracle.w0_direct(params, uz, dps=40)
    elif key == (1, None):
        ref = oracle.w1_direct(params, uz, dps=40)
    else:
        ref = oracle.w_minus1_direct(params, uz, dps=40)
    with mpmath.workdps(40):
        ratio = mpmath.mpc(ref) / mpmath.exp(mpmath.mpc(raw))
        ratio = complex(ratio)
    k = int(round(cmath.phase(ratio) / (0.5 * math.pi))) % 4
    phase = 1j ** k
    if abs(ratio / phase - 1) > 0.3:
        raise NumericalError(
            "branch calibration failed for index %s%s: ratio %s"
            % (j, sign or "", ratio))
    return phase


def lg_eval(params, j, z, N=5, sign=None, dps=None):
    """Exponential-form approximation to w^{(j)}(uz; a).

    N is the truncation order (N-1 series terms).  The eta_bound field is
    left unset; eta_bound() below computes it separately.  With dps set
    the final exponential is taken in mpmath arithmetic, which matters
    once u*Re(xi) approaches the double-precision exponent range.
    """
    key = _key(j, sign)
    if N < 2:
        raise RangeError("need N >= 2")
    z = complex(z)
    if z.imag < 0:
        r = lg_eval(params, j, z.conjugate(), N=N, sign=sign, dps=dps)
        return LGResult(value=r.value.conjugate(), N=N,
                        exponent_sum=r.exponent_sum.conjugate(),
                        log_value=r.log_value.conjugate())
    if abs(z - complex(params.z1)) < params.delta:
        raise TurningPointError("z too close to the turning point")
    if z == 0:
        raise RangeError("z = 0 is a singular point")
    if not region_check(params, j, z, sign=sign):
        warnings.warn("z outside the validity region for index %s%s"
                      % (j, sign or ""), RegionWarning)
    vkey = _value_key(params, key, z)
    raw, total = _raw_log(params, vkey, N, z)
    phase = _branch_phase(params, vkey)
    if dps is not None:
        with mpmath.workdps(dps):
            value = mpmath.exp(mpmath.mpc(raw)) * phase
    else:
        if abs(raw.real) > 700:
            with mpmath.workdps(30):
                value = complex(mpmath.exp(mpmath.mpc(raw))) * phase
        else:
            value = cmath.exp(raw) * phase
    return LGResult(value=value, N=N, exponent_sum=total,
                    log_value=raw + complex(0.0, cmath.phase(phase)))


def _default_path(params, key, xi_z):
    al = params.alpha_float
    if key == (0, None):
        ref = complex(xi_z.real + PATH_TAIL, -0.5 * (1 + al) * math.pi)
    elif key == (1, None):
        ref = complex(xi_z.real - PATH_TAIL, -0.5 * math.pi)
    elif key == (-1, "+"):
        ref = complex(xi_z.real - PATH_TAIL, -0.5 * (1 + al) * math.pi)
    else:
        ref = complex(xi_z.real + PATH_TAIL, -0.5 * math.pi)
    path = [ref, xi_z]
    # keep the segment clear of xi = 0
    seg = xi_z - ref
    t = max(0.0, min(1.0, (-(ref.conjugate() * seg).real) / abs(seg) ** 2))
    foot = ref + t * seg
    if 0 < t < 1 and abs(foot) < 0.3:
        perp = 1j * seg / abs(seg)
        cand = foot + 0.6 * perp
        other = foot - 0.6 * perp
        mid = cand if abs(cand) > abs(other) else other
        path = [ref, mid, xi_z]
    return path


_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


def _collect_F(params, tables, N, nodes, hints):
    vals = np.empty((len(nodes), N), dtype=complex)
    z_prev = hints
    for i, xv in enumerate(nodes):
        zv = mapping.invert_xi(params, xv, z_prev)
        z_prev = zv
        sp, cp = mapping.phi_trig(params, zv)
        for s in range(1, N + 1):
            vals[i, s - 1] = eval_trig(tables.F[s], params, sp, cp)
    return vals


def eta_bound(params, j, N, z, path=None, sign=None):
    """Bound eta on the error of lg_eval along a xi-plane polygon.

    Phi and Psi integrate |F_k| products over the z-image of the path
    (|t^{-1} Z dt| is just |d xi|); eta then follows from the standard
    nonlinear estimate.  The default path runs straight from the
    reference image, truncated where the integrands are negligible.
    """
    key = _key(j, sign)
    tables = cached_tables(8)
    if N < 2 or N > tables.S:
        raise RangeError("N must lie in 2..%d" % tables.S)
    refname = REFERENCE_NAME[key]
    z = complex(z)
    reflect = z.imag < 0
    if reflect:
        z = z.conjugate()
        if path is not None:
            path = [complex(p).conjugate() for p in path]
    xi_z = mapping.xi(params, z)
    if path is None:
        path = _default_path(params, key, xi_z)
    path = [complex(p) for p in path]
    if len(path) < 2 or all(abs(p - path[0]) < 1e-14 for p in path):
        return BoundReport(Phi=0.0, Psi=0.0, eta=0.0, path=path,
                           reference_point=refname)
    res = [p.real for p in path]
    if not (all(x >= y - 1e-12 for x, y in zip(res, res[1:]))
            or all(x <= y + 1e-12 for x, y in zip(res, res[1:]))):
        raise NumericalError("Re(xi) is not monotone along the path")
    for a, b in zip(path, path[1:]):
        seg = b - a
        t = max(0.0, min(1.0, (-(a.conjugate() * seg).real) / abs(seg) ** 2))
        if abs(a + t * seg) < 1e-9:
            raise NumericalError("path passes through xi = 0")

    u = params.u_float

    def assemble(level):
        ints_pair = np.zeros((N, N))   # int |F_k F_m|, 1-based shifted
        ints_single = np.zeros(N + 1)  # int |F_s|, s = 1..N
        # march from the z end backwards so invert_xi always has a hint
        hint = z
        for a, b in zip(path[::-1], path[::-1][1:]):
            seg = b - a
            L = abs(seg)
            if L == 0:
                continue
            panels = max(1, int(math.ceil(L / 4.0))) * 2 ** level
            nodes = []
            weights = []
            for p in range(panels):
                t0 = p / panels
                t1 = (p + 1) / panels
                mid = 0.5 * (t0 + t1)
                half = 0.5 * (t1 - t0)
                for x, wgt in zip(_GL_X, _GL_W):
                    nodes.append(a + (mid + half * x) * seg)
                    weights.append(wgt * half * L)
            F = _collect_F(params, tables, N, nodes, hint)
            hint = mapping.invert_xi(params, nodes[-1], hint)
            absF = np.abs(F)
            w = np.array(weights)
            for s in range(1, N + 1):
                ints_single[s] += float(np.sum(w * absF[:, s - 1]))
            for k in range(1, N):
                for m in range(1, N):
                    ints_pair[k, m] += float(
                        np.sum(w * absF[:, k - 1] * absF[:, m - 1]))
        Phi = 2.0 * ints_single[N]
        for s in range(1, N):
            inner = 0.0
            for k in range(s, N):
                inner += ints_pair[k, s + N - k - 1]
            Phi += inner / u ** s
        Psi = 4.0 * sum(ints_single[s + 1] / u ** s for s in range(0, N - 1))
        return Phi, Psi

    Phi, Psi = assemble(0)
    for level in (1, 2, 3):
        Phi2, Psi2 = assemble(level)
        if (abs(Phi2 - Phi) <= 1e-3 * max(Phi2, 1e-300)
                and abs(Psi2 - Psi) <= 1e-3 * max(Psi2, 1e-300)):
            Phi, Psi = Phi2, Psi2
            break
        Phi, Psi = Phi2, Psi2
    else:
        raise NumericalError("bound quadrature did not settle")
    t = Phi / u ** N
    eta = t * math.exp(Psi / u + t)
    return BoundReport(Phi=Phi, Psi=Psi, eta=eta, path=path,
                       reference_point=refname)


@lru_cache(maxsize=None)
def _lens_polygon(params, which):
    """Closed polygon (cut, Stokes arc, real-axis return) bounding the
    region excluded for index 0 ('AH') or index 1 ('AD')."""
    cut = np.asarray(mapping._cut_polyline(params))[::-1]   # 0 -> z1
    arc = mapping.trace_stokes(params, which).points
    poly = list(cut) + list(arc) + [0j]
    return np.asarray(poly, dtype=complex)


@lru_cache(maxsize=None)
def _af_barrier(params):
    cut = np.asarray(mapping._cut_polyline(params))[::-1]   # 0 -> z1
    arc = mapping.trace_stokes(params, "AF").points
    top = arc[-1] + 1j * (10.0 * mapping._scale(params) + 40.0)
    return np.concatenate([cut, np.asarray(arc), [top]])


def _point_in_polygon(z, poly):
    x, y = z.real, z.imag
    inside = False
    n = len(poly)
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        if (p.imag > y) != (q.imag > y):
            xc = p.real + (y - p.imag) * (q.real - p.real) / (q.imag - p.imag)
            if x < xc:
                inside = not inside
    return inside


def _ray_hits(z, arr):
    hits = 0
    for p, q in zip(arr, arr[1:]):
        if (p.imag > z.imag) != (q.imag > z.imag):
            xc = p.real + (z.imag - p.imag) * (q.real - p.real) / (q.imag - p.imag)
            if xc > z.real:
                hits += 1
    return hits


def region_check(params, j, z, sign=None):
    """Admissibility of z for the chosen solution index.

    Index 0 excludes the lens between the branch cut and the Stokes arc
    into the negative axis; index 1 the mirror lens on the positive side;
    the two index -1 solutions live right/left of the cut joined with the
    upward Stokes arc (points on that arc belong to neither).
    """
    key = _key(j, sign)
    z = complex(z)
    if z.imag < 0:
        z = z.conjugate()
    sc = mapping._scale(params)
    if abs(z - complex(params.z1)) < 1e-9 * sc:
        return False
    if key in ((0, None), (1, None)):
        poly = _lens_polygon(params, "AH" if key[0] == 0 else "AD")
        d = mapping._dist_to_polyline(z, poly)
        if d < 1e-9 * sc:
            return False
        return not _point_in_polygon(z, poly)
    barrier = _af_barrier(params)
    af = np.asarray(mapping.trace_stokes(params, "AF").points)
    if mapping._dist_to_polyline(z, af) < 1e-9 * sc:
        return False
    # rightward ray from a right-side point clears the barrier entirely
    right = _ray_hits(z, barrier) % 2 == 0
    return right if key == (-1, "+") else not right

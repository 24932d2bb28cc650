"""Conformal-map layer: f, g, psi, Z, xi, zeta, phi and the Stokes geometry.

Everything runs in double precision (downstream consumers promote to
arbitrary precision where the exponentials demand it).  The closed upper
half-plane is the native domain; lower half-plane queries are answered by
Schwarz reflection.

Branch bookkeeping, in construction order:

  1. the cut (the level curve Im xi = 0 joining the turning point z1 to
     the origin) is traced once per parameter set by local analytic
     continuation of int sqrt(f), which needs no global branch choice;
  2. Z(z) is then sign*principal_sqrt((z+alpha/2)^2+1+alpha), the sign
     flipping exactly across the barrier cut+ray{Re z = -alpha/2,
     Im z >= sigma}, which reproduces the required behaviour: Z > 0 on the
     positive axis, Z < 0 on the negative axis, Z ~ z at infinity,
     discontinuous only across the cut;
  3. xi has a closed form in Z with principal logarithms; close to the
     cut the principal choices can break, so a quadrature fallback backs
     it up.
"""

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BranchError, NumericalError, RangeError, TurningPointError

_gauss_cache = {}


def _gauss(n):
    if n not in _gauss_cache:
        x, w = np.polynomial.legendre.leggauss(n)
        _gauss_cache[n] = (x, w)
    return _gauss_cache[n]


def _scale(params):
    return 1.0 + abs(params.z1)


def turning_points(params):
    """(z1, z2) = -alpha/2 +- i sigma."""
    return params.z1, params.z2


def f_g_psi(params, z):
    """The comparison-equation coefficients f, g and the error term psi."""
    z = complex(z)
    if z == 0:
        raise RangeError("f and g have a double pole at z = 0")
    al = params.alpha_float
    w = z + al / 2
    core = w * w + 1 + al
    fv = core / (z * z)
    gv = -1 / (4 * z * z)
    if abs(core) < 1e-26:
        raise TurningPointError("psi is singular at the turning points")
    psi = -z * (4 * z**3 - (4 + 3 * al) * (4 + al) * z - al * (2 + al) ** 2) / (
        16 * core**3
    )
    return fv, gv, psi


def _sqrt_f_raw(params, z):
    """principal sqrt((z+alpha/2)^2+1+alpha)/z; caller fixes the sign."""
    al = params.alpha_float
    w = z + al / 2
    return cmath.sqrt(w * w + 1 + al) / z


def _cone_directions(params):
    """Directions at z1 of the level curves of xi ~ (2/3) c (z-z1)^{3/2}.

    Returns (cut_dir, upper_dir, {AF: dir, AD: dir, AH: dir}) where
    cut_dir and upper_dir point along the two curves on which xi is real
    and negative (the cut running to the origin; its sibling running into
    the upper-left).  The enumeration uses the principal branch; the
    labels do not depend on the sign choice because flipping c permutes
    the same direction sets.
    """
    z1, z2 = params.z1, params.z2
    fp = (z1 - z2) / (z1 * z1)          # f'(z1)
    argc = cmath.phase(cmath.sqrt(fp))

    def fold(t):
        while t <= -math.pi:
            t += 2 * math.pi
        while t > math.pi:
            t -= 2 * math.pi
        return t

    neg = []
    for k in range(-3, 4):
        th = fold(2.0 / 3.0 * (k * math.pi - argc))
        if math.cos(1.5 * th + argc) < 0 and not any(abs(fold(th - q)) < 1e-9 for q in neg):
            neg.append(th)
    re0 = sorted(
        {round(fold(2.0 / 3.0 * ((k + 0.5) * math.pi - argc)), 12) for k in range(-3, 4)}
    )
    target = cmath.phase(-z1)
    cut_dir = min(neg, key=lambda t: abs(fold(t - target)))
    upper_dir = max(neg, key=lambda t: abs(fold(t - cut_dir)))
    # AF climbs to +i inf, AD exits toward the positive axis, AH to the negative
    stokes = list(re0)
    af = max(stokes, key=math.sin)
    stokes.remove(af)
    ad = max(stokes, key=math.cos)
    stokes.remove(ad)
    ah = stokes[0]
    return cut_dir, upper_dir, {"AF": af, "AD": ad, "AH": ah}


def _seg_int(params, za, zb, s_prev, n=16):
    """int sqrt(f) dz along [za, zb], branch continued from s_prev at za.

    Returns (integral, sqrt_f at zb).
    """
    x, w = _gauss(n)
    half = (zb - za) / 2
    mid = (zb + za) / 2
    acc = 0j
    s_run = s_prev
    for xi_, wi in zip(x, w):
        zp = mid + half * xi_
        r = _sqrt_f_raw(params, zp)
        if abs(r - s_run) > abs(r + s_run):
            r = -r
        s_run = r
        acc += wi * r
    r_end = _sqrt_f_raw(params, zb)
    if abs(r_end - s_run) > abs(r_end + s_run):
        r_end = -r_end
    return acc * half, r_end


def _seed_leg(params, direction, r0):
    """int sqrt(f) from z1 to z1 + r0 e^{i direction} with the square-root
    substitution z = z1 + t^2 L killing the branch-point singularity.

    The branch is anchored at the far end (t=1) by the principal value and
    continued inward; the integrand vanishes at t=0, so no choice is
    needed there.  Returns (xi_value, sqrt_f at the far end).
    """
    z1 = params.z1
    L = r0 * cmath.exp(1j * direction)
    x, w = _gauss(24)
    # walk nodes from t=1 side inward so continuity starts at the anchor
    order = np.argsort(-x)
    zb = z1 + L
    s_anchor = _sqrt_f_raw(params, zb)
    s_run = s_anchor
    acc = 0j
    for idx in order:
        t = (x[idx] + 1) / 2
        if t == 0:
            continue
        zp = z1 + t * t * L
        r = _sqrt_f_raw(params, zp)
        if abs(r - s_run) > abs(r + s_run):
            r = -r
        s_run = r
        acc += w[idx] * r * 2 * t * L / 2
    return acc, s_anchor


def _trace_level(params, which):
    """Continuation of a level curve of xi from z1.

    which in {'cut','upper','AD','AH','AF'}; for 'cut' and 'upper' the
    tracked level is Im xi = 0, otherwise Re xi = 0.  Returns
    (points, xi_values) with the tracer-local branch of xi (sign fixed
    only up to a global flip).
    """
    cut_dir, upper_dir, stokes_dirs = _cone_directions(params)
    on_im = which in ("cut", "upper")
    direction = {"cut": cut_dir, "upper": upper_dir}.get(which) if on_im else stokes_dirs[which]
    sc = _scale(params)
    lvl = (lambda q: q.imag) if on_im else (lambda q: q.real)
    r0 = 1e-4 * sc
    xi_val, s_run = _seed_leg(params, direction, r0)
    z = params.z1 + r0 * cmath.exp(1j * direction)
    # polish the seed onto the level curve (the cone direction is only the
    # tangent at z1; at radius r0 the curve has already drifted)
    for _ in range(4):
        err = lvl(xi_val)
        if abs(err) < 1e-16 * max(1e-3, abs(xi_val)):
            break
        unit = (z - params.z1) / abs(z - params.z1)
        perp = 1j * unit
        grad = s_run * perp
        gl = grad.imag if on_im else grad.real
        if gl == 0:
            break
        z = z + (-err / gl) * perp
        direction = cmath.phase(z - params.z1)
        xi_val, s_run = _seed_leg(params, direction, abs(z - params.z1))
    pts = [params.z1]
    xis = [0j]
    tangent = cmath.exp(1j * direction)
    maxpts = 4000
    big = 60.0 * sc
    while len(pts) < maxpts:
        pts.append(z)
        xis.append(xi_val)
        # termination tests
        if which == "cut" and abs(z) < 1e-9 * sc:
            pts.append(0j)
            xis.append(xi_val)  # formally -inf; never used
            break
        if which in ("AD", "AH") and abs(z.imag) < 1e-13 * sc and len(pts) > 4:
            break
        if which in ("AF", "upper") and abs(z) > big:
            break
        h = min(0.35 * abs(z - params.z1), 0.3 * abs(z), 0.05 * sc * max(1.0, abs(z) / sc))
        # the barrier curves feed side tests downstream; keep their chords
        # tight so the polyline stays close to the true curve
        if which == "cut":
            h = max(min(h, 0.008 * sc), 2e-10 * sc)
        elif which == "upper":
            h = min(h, 0.15 * sc)
        # predictor: dz making d xi = sqrt(f) dz real (level Im) or imaginary
        # (level Re), aligned with the running tangent
        unit = s_run.conjugate() / abs(s_run)
        if not on_im:
            unit *= 1j
        step = h * unit
        cand = (step, -step)
        d = max(cand, key=lambda c: (c * tangent.conjugate()).real / abs(c))
        znew = z + d
        # axis crossing for the Stokes terminators
        if which in ("AD", "AH") and znew.imag < 0:
            frac = z.imag / (z.imag - znew.imag)
            znew = z + frac * d
            if abs(znew - z) < 1e-15 * sc:
                z = complex(znew.real, 0.0)
                continue
        dxi, s_new = _seg_int(params, z, znew, s_run, n=12)
        xi_new = xi_val + dxi
        # corrector: push the level back to zero transversally
        for _ in range(6):
            err = lvl(xi_new)
            if abs(err) < 1e-13 * max(1.0, abs(xi_new)):
                break
            perp = 1j * (znew - z) / abs(znew - z)
            if which in ("AD", "AH") and abs(znew.imag) < 1e-13 * sc:
                perp = 1.0 + 0j  # stay on the axis, slide along it
            grad = s_new * perp
            gl = grad.imag if on_im else grad.real
            if gl == 0:
                break
            move = -err / gl * perp
            if abs(move) > 0.5 * abs(znew - z):
                move *= 0.5 * abs(znew - z) / abs(move)
            dxi2, s2 = _seg_int(params, znew, znew + move, s_new, n=8)
            znew = znew + move
            xi_new = xi_new + dxi2
            s_new = s2
        tangent = (znew - z) / abs(znew - z)
        z, xi_val, s_run = znew, xi_new, s_new
        if which in ("AD", "AH") and abs(z.imag) < 1e-13 * sc and len(pts) > 4:
            z = complex(z.real, 0.0)
            pts.append(z)
            xis.append(xi_val)
            break
    else:
        raise NumericalError("level-curve trace exceeded the step budget")
    return pts, xis


_barrier_cache = {}


def _cache_slot(params):
    return _barrier_cache.setdefault((params.n, params.a), {})


def _cut_polyline(params):
    """Traced cut from z1 down to 0, cached per parameter set."""
    got = _cache_slot(params)
    if "cut" not in got:
        pts, _ = _trace_level(params, "cut")
        got["cut"] = np.array(pts, dtype=complex)
    return got["cut"]


def _upper_polyline(params):
    """The sibling level curve Im xi = 0, Re xi < 0 running from z1 into
    the upper left; the principal-branch Airy variable jumps across it."""
    got = _cache_slot(params)
    if "upper" not in got:
        pts, _ = _trace_level(params, "upper")
        got["upper"] = np.array(pts, dtype=complex)
    return got["upper"]


def _h_ray_parity(arr, z):
    """Crossing parity of the horizontal rightward ray from z with arr."""
    y, x = z.imag, z.real
    ya, yb = arr.imag[:-1], arr.imag[1:]
    xa, xb = arr.real[:-1], arr.real[1:]
    hit = (ya > y) != (yb > y)
    if not np.any(hit):
        return 0
    tt = (y - ya[hit]) / (yb[hit] - ya[hit])
    xint = xa[hit] + tt * (xb[hit] - xa[hit])
    return int(np.sum(xint > x)) % 2


def _joined_barrier(params):
    """The two negative level curves joined through z1 into one polyline
    from the origin out to the upper left.  Together they form the full
    branch line of the principal Airy variable; the plane splits into just
    two components across it."""
    got = _cache_slot(params)
    if "joined" not in got:
        cut = _cut_polyline(params)
        upper = _upper_polyline(params)
        got["joined"] = np.concatenate([cut[::-1], upper[1:]])
    return got["joined"]


def _joined_flag(params):
    """Ray parity of the positive-cross side of the joined barrier.

    Measured once at a mid-cut station with probes far enough out that
    ray casting against the chords is trustworthy; lets nearest-segment
    side tests stand in for ray casting close to the curve.
    """
    got = _cache_slot(params)
    if "flag" not in got:
        arr = _joined_barrier(params)
        cut_len = len(_cut_polyline(params))
        idx = max(1, min(cut_len // 2, len(arr) - 2))
        m = arr[idx]
        t = arr[idx + 1] - arr[idx - 1]
        t = t / abs(t)
        eps = 0.02 * _scale(params)
        pa, pb = m + eps * 1j * t, m - eps * 1j * t
        ra, rb = _h_ray_parity(arr, pa), _h_ray_parity(arr, pb)
        if ra == rb:
            raise NumericalError("barrier orientation probe is degenerate")
        got["flag"] = ra
    return got["flag"]


def _barrier_parity(params, z):
    """Even-odd side of the joined barrier.

    Inside a narrow band around the curve the chords cannot be ray-cast
    reliably, so the side comes from the nearest segment instead; the
    z1 junction is excluded from that shortcut (quadratically small
    chord error makes ray casting fine there).
    """
    arr = _joined_barrier(params)
    d, cross, i = _nearest_side(z, arr)
    join = len(_cut_polyline(params)) - 1
    if d < 0.02 * _scale(params) and abs(i - join) > 3:
        flag = _joined_flag(params)
        return flag if cross >= 0 else 1 - flag
    return _h_ray_parity(arr, z)


def _measure_delta(params, arr):
    """Phase step of the principal Airy variable across a traced curve.

    Probes both sides at a mid-curve station; the analytic continuation of
    zeta is smooth there, so the ratio of principal values on the two
    sides is a cube root of unity.  Returns its argument snapped to
    +-2 pi/3.
    """
    idx = len(arr) // 3
    m = arr[idx]
    d = arr[idx + 1] - arr[idx - 1]
    nrm = 1j * d / abs(d)
    eps = 2e-3 * _scale(params)
    pa, pb = m + eps * nrm, m - eps * nrm
    if _barrier_parity(params, pa) == 1:
        far, near = pa, pb
    else:
        far, near = pb, pa
    z_far = zeta_of_xi(xi(params, far))
    z_near = zeta_of_xi(xi(params, near))
    ratio = z_near / z_far
    if abs(abs(ratio) - 1) > 2e-2:
        raise NumericalError("zeta branch probe failed (|ratio| = %.6f)" % abs(ratio))
    raw = cmath.phase(ratio)
    snapped = 2 * math.pi / 3 * (1 if raw > 0 else -1)
    if abs(raw - snapped) > 0.1:
        raise NumericalError("zeta branch probe off-lattice (arg = %.6f)" % raw)
    return snapped


def _zeta_delta(params):
    """Branch-phase step, identical along both halves of the branch line."""
    got = _cache_slot(params)
    if "delta" not in got:
        d1 = _measure_delta(params, _cut_polyline(params))
        d2 = _measure_delta(params, _upper_polyline(params))
        if abs(d1 - d2) > 1e-9:
            raise NumericalError("inconsistent zeta branch steps along the branch line")
        got["delta"] = d1
    return got["delta"]


def zeta_phase_angle(params, z):
    """arg of the cube-root-of-unity factor turning the principal Airy
    variable into the branch analytic at z1 (0 where they coincide)."""
    z = complex(z)
    if z.imag < 0:
        return -zeta_phase_angle(params, complex(z.real, -z.imag))
    if _barrier_parity(params, z) == 1:
        return _zeta_delta(params)
    return 0.0


def zeta_analytic(params, z, xi_val=None):
    """The Airy variable on the branch analytic at z1 (Schwarz-reflected
    in the lower half-plane).  zeta_of_xi gives the principal value with
    its cut conventions; this applies the component phase correction."""
    z = complex(z)
    if z.imag < 0:
        return zeta_analytic(params, complex(z.real, -z.imag)).conjugate()
    if xi_val is None:
        xi_val = xi(params, z)
    ang = zeta_phase_angle(params, z)
    base = zeta_of_xi(xi_val)
    return base * cmath.exp(1j * ang) if ang else base


def _dist_to_polyline(p, arr):
    return _nearest_side(p, arr)[0]


def _nearest_side(p, arr):
    """(distance, cross sign, segment index) of p against a polyline."""
    a = arr[:-1]
    b = arr[1:]
    ab = b - a
    denom = (ab * ab.conjugate()).real
    denom = np.where(denom == 0, 1.0, denom)
    t = ((p - a) * ab.conjugate()).real / denom
    t = np.clip(t, 0.0, 1.0)
    proj = a + t * ab
    d = np.abs(p - proj)
    i = int(np.argmin(d))
    seg = ab[i] if ab[i] != 0 else (1 + 0j)
    cr = ((p - a[i]) / seg).imag
    return float(d[i]), (1 if cr >= 0 else -1), i


def _side_of_barrier(params, z):
    """+1 right of the cut+ray barrier, -1 left, 'on' within cut tolerance.

    Horizontal even-odd ray casting against the traced cut plus the
    vertical ray above z1.  Points on the real axis never reach the
    barrier and are classified by sign directly.
    """
    sc = _scale(params)
    if z.imag == 0:
        if z.real == 0:
            raise RangeError("z = 0 is a singular point")
        return 1 if z.real > 0 else -1
    arr = _cut_polyline(params)
    d, cross, i = _nearest_side(z, arr)
    if d < 1e-9 * sc:
        return "on"
    # in the chord-ambiguity band decide by the nearest segment; near z1
    # (segment 0 end) the vertical seam takes over, so fall through there
    if d < 0.02 * sc and i > 3:
        flag = _cut_flag(params)
        par = flag if cross >= 0 else 1 - flag
        return -1 if par else 1
    return -1 if _zbar_parity(params, z) else 1


def _zbar_parity(params, z):
    """Ray parity against the cut plus the vertical seam above z1."""
    arr = _cut_polyline(params)
    y, x = z.imag, z.real
    crossings = 0
    ya = arr.imag[:-1]
    yb = arr.imag[1:]
    xa = arr.real[:-1]
    xb = arr.real[1:]
    hit = (ya > y) != (yb > y)
    if np.any(hit):
        tt = (y - ya[hit]) / (yb[hit] - ya[hit])
        xint = xa[hit] + tt * (xb[hit] - xa[hit])
        crossings += int(np.sum(xint > x))
    z1 = params.z1
    if y >= z1.imag and x < z1.real:
        crossings += 1
    return crossings % 2


def _cut_flag(params):
    """Seam parity of the positive-cross side of the cut polyline."""
    got = _cache_slot(params)
    if "cut_flag" not in got:
        arr = _cut_polyline(params)
        idx = len(arr) // 2
        m = arr[idx]
        t = arr[idx + 1] - arr[idx - 1]
        t = t / abs(t)
        eps = 0.02 * _scale(params)
        pa, pb = m + eps * 1j * t, m - eps * 1j * t
        ra, rb = _zbar_parity(params, pa), _zbar_parity(params, pb)
        if ra == rb:
            raise NumericalError("cut orientation probe is degenerate")
        got["cut_flag"] = ra
    return got["cut_flag"]


def big_Z(params, z):
    """(Z, side) with the paper's branch; side in {'right','left','on_cut'}."""
    z = complex(z)
    if z == 0:
        raise RangeError("Z is defined for z != 0")
    if z.imag < 0:
        raise RangeError("big_Z expects Im z >= 0; reflect externally")
    al = params.alpha_float
    w = z + al / 2
    root = cmath.sqrt(w * w + 1 + al)
    s = _side_of_barrier(params, z)
    if s == "on":
        return root, "on_cut"
    return (root if s == 1 else -root), ("right" if s == 1 else "left")


def _snap_neg_axis(w):
    """Nudge arguments that rounding left just under the negative real axis
    back onto its upper side, so principal logs pick arg = +pi."""
    if w.real < 0 and w.imag < 0 and abs(w.imag) < 1e-13 * abs(w):
        return complex(w.real, 0.0)
    return w


def xi_closed(params, z, verify=False):
    """Closed-form xi (principal logarithms over the big_Z branch).

    Near the cut the principal choices can go off-sheet; such points are
    detected (log arguments close to their cuts, or z close to the traced
    cut) and double-checked against quadrature, raising on disagreement.
    """
    z = complex(z)
    if z == 0:
        raise RangeError("xi diverges at z = 0")
    al = params.alpha_float
    Z, side = big_Z(params, z)
    arg1 = _snap_neg_axis((4 * Z + 2 * al * (Z + z + 2) + 4 + al * al) / z)
    arg2 = _snap_neg_axis(2 * Z + 2 * z + al)
    val = (
        Z
        - (1 + al / 2) * cmath.log(arg1)
        + (al / 2) * cmath.log(arg2)
        + 0.5 * math.log(1 + al)
        + (2 + al / 2) * math.log(2)
        - 0.5 * (1 + al) * math.pi * 1j
    )
    suspicious = verify or side == "on_cut"
    if not suspicious:
        for targ in (arg1, arg2):
            if targ.real < 0 and abs(targ.imag) < 0.05 * abs(targ):
                suspicious = True
                break
    if not suspicious and z.imag > 0:
        sc = _scale(params)
        if abs(z - params.z1) < 0.35 * sc or abs(z) < 0.2 * sc:
            if _dist_to_polyline(z, _cut_polyline(params)) < 0.05 * sc:
                suspicious = True
    if suspicious:
        ref = xi_quadrature(params, z)
        if abs(val - ref) > 1e-8 * max(1.0, abs(ref)):
            raise BranchError(
                "closed-form xi is off-branch here (|closed - quadrature| = %.3e)"
                % abs(val - ref)
            )
    return val


def _detour_waypoints(params, z):
    """Piecewise-linear path z -> ... -> z1 avoiding the cut and the origin."""
    z1 = params.z1
    sc = _scale(params)
    arr = _cut_polyline(params)

    def bad(seg_a, seg_b):
        # segment-origin distance (skip when an endpoint IS near 0: that is
        # the integration target, handled by adaptive refinement)
        ab = seg_b - seg_a
        t = max(0.0, min(1.0, ((0 - seg_a) * ab.conjugate()).real / abs(ab) ** 2))
        dorig = abs(seg_a + t * ab)
        if dorig < 0.25 * min(abs(seg_a), abs(seg_b), sc) and 0.02 < t < 0.98:
            return True
        # crossing test against the cut, ignoring the shared z1 endpoint
        a2 = arr[:-1]
        b2 = arr[1:]
        d1 = ab
        d2 = b2 - a2
        denom = (d1.real * d2.imag - d1.imag * d2.real)
        with np.errstate(divide="ignore", invalid="ignore"):
            t1 = ((a2 - seg_a).real * d2.imag - (a2 - seg_a).imag * d2.real) / denom
            t2 = ((a2 - seg_a).real * d1.imag - (a2 - seg_a).imag * d1.real) / denom
        ok = np.isfinite(t1) & np.isfinite(t2)
        crossing = ok & (t1 > 1e-9) & (t1 < 1 - 1e-9) & (t2 > 1e-9) & (t2 < 1 - 1e-9)
        if np.any(crossing):
            ends = abs(seg_b - z1) < 1e-12 * sc
            if ends:
                # tolerate intersections within the seed radius of z1
                keep = crossing & (np.abs(seg_a + t1 * d1 - z1) > 1e-3 * sc)
                return bool(np.any(keep))
            return True
        return False

    if not bad(z, z1):
        return [z, z1]
    # push the midpoint off the chord, first toward z's own side of the cut
    # (the side the whole path must stay on), then the other side, then
    # radially outward as a last resort
    base = (z + z1) / 2
    chord = (z1 - z) / abs(z1 - z)
    s = _side_of_barrier(params, z)
    sides = (-1j * chord, 1j * chord) if s != -1 else (1j * chord, -1j * chord)
    candidates = [d * r * sc for r in (0.35, 0.7, 1.4, 2.8) for d in sides]
    if abs(base) > 1e-12:
        candidates += [base / abs(base) * r * sc for r in (0.7, 1.4, 2.8, 5.0)]
    for off in candidates:
        w = base + off
        if w.imag < 0:
            continue
        if not bad(z, w) and not bad(w, z1):
            return [z, w, z1]
    raise NumericalError("could not route a quadrature path around the cut")


def _adaptive_leg(params, za, zb, s_start, tol, depth=0):
    """Adaptive straight-segment integral with branch continuity.

    Refines by bisection comparing one 16-node panel against two 8-node
    halves.  Returns (integral, sqrt_f at zb).
    """
    whole, _ = _seg_int(params, za, zb, s_start, n=16)
    mid = (za + zb) / 2
    left, s_mid = _seg_int(params, za, mid, s_start, n=8)
    right, s_end = _seg_int(params, mid, zb, s_mid, n=8)
    # the tolerance cannot be pushed below panel-level rounding noise
    accept = max(tol, 1e-15 * (1.0 + abs(whole)))
    if abs(whole - (left + right)) < accept:
        fine, s_fin = _seg_int(params, za, zb, s_start, n=32)
        return fine, s_fin
    if depth > 40:
        raise NumericalError("quadrature failed to converge on a leg")
    child_tol = max(tol / 2, 5e-16)
    li, s_mid2 = _adaptive_leg(params, za, mid, s_start, child_tol, depth + 1)
    ri, s_end2 = _adaptive_leg(params, mid, zb, s_mid2, child_tol, depth + 1)
    return li + ri, s_end2


def xi_quadrature(params, z, tol=1e-13):
    """xi by numerical integration of sqrt(f) from z1.

    Integrates backward from z (where the branch of sqrt(f) = Z/z is known
    from the side rule) to z1, with a square-root substitution on the last
    leg so the turning-point endpoint is regular; then negates.
    """
    z = complex(z)
    if z == 0:
        raise RangeError("xi diverges at z = 0")
    if z.imag < 0:
        return xi_quadrature(params, complex(z.real, -z.imag), tol).conjugate()
    z1 = params.z1
    sc = _scale(params)
    if abs(z - z1) < 1e-13 * sc:
        return 0j
    Z, _side = big_Z(params, z)
    s_here = Z / z
    path = _detour_waypoints(params, z)
    # keep the square-root-substituted panel short: break the last leg at a
    # small standoff from z1 so one fixed Gauss panel is ample there
    standoff = 0.02 * sc
    if abs(path[-2] - z1) > standoff:
        u = (path[-2] - z1) / abs(path[-2] - z1)
        path.insert(-1, z1 + standoff * u)
    total = 0j
    s_run = s_here
    for i in range(len(path) - 1):
        a, b = path[i], path[i + 1]
        last = i == len(path) - 2
        if not last:
            seg, s_run = _adaptive_leg(params, a, b, s_run, tol)
            total += seg
            continue
        # final approach into z1: z = z1 + t^2 L, t from 1 to 0
        L = a - z1
        x, w = _gauss(32)
        order = np.argsort(-x)
        acc = 0j
        for idx in order:
            t = (x[idx] + 1) / 2
            if t == 0:
                continue
            zp = z1 + t * t * L
            r = _sqrt_f_raw(params, zp)
            if abs(r - s_run) > abs(r + s_run):
                r = -r
            s_run = r
            acc += w[idx] * r * 2 * t * L / 2
        # t runs 1 -> 0 while the leg is oriented a -> z1: the Gauss sum
        # above is the 0 -> 1 integral, i.e. z1 -> a; subtract it
        total -= acc
    return -total


def xi(params, z):
    """Branch-safe xi: closed form, quadrature when the former is off-sheet."""
    try:
        return xi_closed(params, z)
    except BranchError:
        return xi_quadrature(params, z)


def zeta_of_xi(xi_val):
    """zeta = (3 xi / 2)^(2/3), principal, negative-real xi snapped to the
    upper side so arg zeta = 2 pi/3 there."""
    if xi_val == 0:
        return 0j
    w = 1.5 * complex(xi_val)
    if w.real < 0 and w.imag <= 0 and abs(w.imag) < 1e-13 * abs(w):
        w = complex(w.real, 0.0)
    return cmath.exp(2.0 / 3.0 * cmath.log(w))


def phi_trig(params, z):
    """(sin phi, cos phi) = (sigma/Z, (z+alpha/2)/Z)."""
    z = complex(z)
    sc = _scale(params)
    if min(abs(z - params.z1), abs(z - params.z2)) < 1e-12 * sc:
        raise TurningPointError("phi is singular at the turning points")
    Z, _ = big_Z(params, z)
    return params.sigma / Z, (z + params.alpha_float / 2) / Z


def phi_exponentials(params, z):
    """(e^{i phi}, e^{-i phi}) = ((z-z2)/Z, (z-z1)/Z); exact complements."""
    z = complex(z)
    sc = _scale(params)
    if min(abs(z - params.z1), abs(z - params.z2)) < 1e-12 * sc:
        raise TurningPointError("phi is singular at the turning points")
    Z, _ = big_Z(params, z)
    return (z - params.z2) / Z, (z - params.z1) / Z


def invert_xi(params, xi_target, z_hint):
    """Solve xi(z) = xi_target by damped Newton (dz = z/Z * dxi).

    Half-steps on residual growth; near the turning point the seed is
    replaced by the local (3 xi/(2c))^(2/3) model when Newton stalls.
    """
    target = complex(xi_target)

    def solve(z0):
        z = complex(z0)
        res_prev = None
        for _ in range(60):
            cur = xi(params, z)
            res = cur - target
            if abs(res) < 1e-12:
                return z
            Z, _ = big_Z(params, z)
            step = -res * z / Z
            if res_prev is not None and abs(res) > abs(res_prev):
                step *= 0.5
            limit = 0.6 * abs(z)
            if abs(step) > limit:
                step *= limit / abs(step)
            z = z + step
            if z.imag < 0:
                z = complex(z.real, 0.0)
            res_prev = res
        return None

    out = solve(z_hint)
    if out is None:
        z1 = params.z1
        c = cmath.sqrt((z1 - params.z2) / (z1 * z1))
        w = cmath.exp(2.0 / 3.0 * cmath.log(3 * target / (2 * c))) if target != 0 else 0j
        out = solve(z1 + w)
    if out is None:
        raise NumericalError("xi inversion did not converge")
    back = xi(params, out)
    if abs(back - target) > 1e-9 * max(1.0, abs(target)):
        raise BranchError("xi inversion converged on a different sheet")
    return out


@dataclass
class StokesPolyline:
    branch: str
    points: list
    xi_values: list


def trace_stokes(params, branch):
    """Level curve Re xi = 0 from z1 for branch in {'AD','AH','AF'}.

    AD ends on the positive real axis, AH on the negative axis at the
    point where xi = -pi i/2, AF is truncated at large |z|.  The recorded
    xi values carry the global branch (checked against the closed form).
    """
    if branch not in ("AD", "AH", "AF"):
        raise RangeError("branch must be one of AD, AH, AF")
    pts, xis = _trace_level(params, branch)
    # match the tracer-local branch of xi to the global one
    probe_idx = min(len(pts) - 1, max(2, len(pts) // 3))
    ref = xi(params, pts[probe_idx])
    got = xis[probe_idx]
    if abs(got) > 0:
        ratio = ref / got
        if abs(ratio + 1) < abs(ratio - 1):
            xis = [-q for q in xis]
    # final on-axis polish for the terminating branches
    if branch in ("AD", "AH"):
        x_end = pts[-1].real
        for _ in range(50):
            cur = xi(params, complex(x_end, 0.0))
            Z, _ = big_Z(params, complex(x_end, 0.0))
            d = cur.real / (Z / x_end).real
            x_end -= d
            if abs(d) < 1e-13 * max(1.0, abs(x_end)):
                break
        pts[-1] = complex(x_end, 0.0)
        xis[-1] = xi(params, pts[-1])
    return StokesPolyline(branch=branch, points=pts, xi_values=xis)


@dataclass
class MapPoint:
    z: complex
    f_val: complex
    g_val: complex
    psi_val: complex
    Z_val: complex
    xi: complex
    zeta: complex
    sin_phi: complex
    cos_phi: complex
    side_of_cut: str


def map_point(params, z):
    """All mapped quantities at one point; lower half-plane by reflection."""
    z = complex(z)
    if z.imag < 0:
        m = map_point(params, complex(z.real, -z.imag))
        return MapPoint(
            z=z,
            f_val=m.f_val.conjugate(),
            g_val=m.g_val.conjugate(),
            psi_val=m.psi_val.conjugate(),
            Z_val=m.Z_val.conjugate(),
            xi=m.xi.conjugate(),
            zeta=m.zeta.conjugate(),
            sin_phi=m.sin_phi.conjugate(),
            cos_phi=m.cos_phi.conjugate(),
            side_of_cut=m.side_of_cut,
        )
    fv, gv, psiv = f_g_psi(params, z)
    Z, side = big_Z(params, z)
    xival = xi(params, z)
    zeta = zeta_of_xi(xival)
    sp, cp = params.sigma / Z, (z + params.alpha_float / 2) / Z
    return MapPoint(
        z=z,
        f_val=fv,
        g_val=gv,
        psi_val=psiv,
        Z_val=Z,
        xi=xival,
        zeta=zeta,
        sin_phi=sp,
        cos_phi=cp,
        side_of_cut=side,
    )


def sqrt_zeta_analytic(params, z, xi_val=None, zeta_val=None):
    """zeta^{1/2} consistent with the analytic branch: 3 xi / (2 zeta).

    Single-valued wherever xi and zeta are, positive where both are, and
    it squares to zeta by the defining cube relation.  Unbounded at the
    turning point (as zeta^{1/2}'s reciprocal appears in the second
    slowly-varying factor, which is what actually stays finite there).
    """
    z = complex(z)
    if z.imag < 0:
        return sqrt_zeta_analytic(params, complex(z.real, -z.imag)).conjugate()
    if xi_val is None:
        xi_val = xi(params, z)
    if zeta_val is None:
        zeta_val = zeta_analytic(params, z, xi_val=xi_val)
    if zeta_val == 0:
        raise TurningPointError("zeta^{1/2} has no finite reciprocal at z1")
    return 1.5 * xi_val / zeta_val


def _turning_slope(params):
    """zeta'(z1): the cube root of f'(z1) picked out by a ring probe."""
    got = _cache_slot(params)
    if "c1" not in got:
        z1, z2 = params.z1, params.z2
        fp = (z1 - z2) / (z1 * z1)
        sc = _scale(params)
        est = 0j
        # ring averages kill the even Taylor neighbours; two radii kill
        # the rho^2 term as well
        for rho, wgt in ((2e-3 * sc, -1.0 / 3.0), (1e-3 * sc, 4.0 / 3.0)):
            ring = 0j
            for kk in range(6):
                zp = z1 + rho * cmath.exp(2j * math.pi * (kk + 0.5) / 6)
                ring += zeta_analytic(params, zp) / (zp - z1)
            est += wgt * ring / 6
        base = cmath.exp(cmath.log(fp) / 3)
        best = min(
            (base * cmath.exp(2j * math.pi * m / 3) for m in range(3)),
            key=lambda c: abs(c - est),
        )
        if abs(best - est) > 1e-5 * abs(best):
            raise NumericalError("turning point slope probe off-lattice")
        got["c1"] = best
    return got["c1"]


def _w_ratio(params, z, xi_val=None):
    """zeta/f with the analytic zeta; the turning-point zeros cancel."""
    z1, z2 = params.z1, params.z2
    if abs(z - z1) < 1e-9 * _scale(params):
        return _turning_slope(params) * z * z / (z - z2)
    fv = (z - z1) * (z - z2) / (z * z)
    return zeta_analytic(params, z, xi_val=xi_val) / fv


def _track_phase(params, a, b, w_a, phase_a, depth=0):
    """Continue arg(zeta/f) from a to b, halving until single-winding."""
    w_b = _w_ratio(params, b)
    r = w_b / w_a
    if abs(r) > 1e-12 and 0.1 < abs(r) < 10.0 and abs(cmath.phase(r)) < 0.9:
        return w_b, phase_a + cmath.phase(r)
    if depth > 48:
        raise NumericalError("phase tracking failed to settle")
    m = (a + b) / 2
    w_m, phase_m = _track_phase(params, a, m, w_a, phase_a, depth + 1)
    return _track_phase(params, m, b, w_m, phase_m, depth + 1)


def quarter_power_R(params, z, xi_val=None):
    """(zeta/f)^{1/4}, single-valued, principal on the far positive axis.

    zeta/f is analytic and zero-free off the real axis (simple zeros of
    numerator and denominator cancel at the turning points), so a global
    quartic root exists; its phase is carried by continuous tracking from
    a right-axis reference where the principal root is the right one.
    Finite at z1 itself.
    """
    z = complex(z)
    if z == 0:
        raise RangeError("the quarter power diverges at z = 0")
    if z.imag < 0:
        return quarter_power_R(params, complex(z.real, -z.imag)).conjugate()
    sc = _scale(params)
    zr = complex(2.0 * sc, 0.0)
    w_ref = _w_ratio(params, zr)
    w_z = _w_ratio(params, z, xi_val=xi_val)
    height = 2.5 * sc + max(0.0, z.imag)
    path = [zr, complex(zr.real, height), complex(z.real, height), z]
    phase = cmath.phase(w_ref)
    w_run = w_ref
    for i in range(len(path) - 1):
        w_run, phase = _track_phase(params, path[i], path[i + 1], w_run, phase)
    return cmath.exp(0.25 * (math.log(abs(w_z)) + 1j * phase))

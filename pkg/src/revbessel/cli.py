"""Command line front end.

Every numeric field is printed with %.17g and complex quantities are split
into _re/_im columns, so repeated runs of the same command are byte
identical.  The z arguments are in turning-point scale: eval reports the
polynomial at the scaled argument u*z.

Exit codes: 0 success, 2 bad usage or out-of-range parameters, 3 numerical
failure.
"""

import argparse
import json
import math
import multiprocessing
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import mp

from . import lg_coeffs, lg_solutions, mapping, oracle, uniform_airy
from .errors import NumericalError, RangeError, RevBesselError
from .params import DEFAULT_DPS, ProblemParams

def parse_complex(text):
    """Read a 're+imi' literal ('2', '-1.5', '0.5i', '1-2i', '1e-3+2i')."""
    t = text.strip().replace(" ", "").lower()
    if t.endswith("i"):
        t = t[:-1] + "j"
    if t.endswith("j") and (len(t) == 1 or t[-2] in "+-"):
        t = t[:-1] + "1j"
    try:
        return complex(t)
    except ValueError:
        raise argparse.ArgumentTypeError("cannot parse complex literal %r" % text)


def parse_count(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("count must be >= 0")
    return v


@dataclass(frozen=True)
class RunConfig:
    """Resolved options shared by the data-producing subcommands."""
    params: ProblemParams
    S: int
    N: int
    dps: int
    workers: int
    fmt: str
    output: str


def _fmt(x):
    return "%.17g" % x


def _write_table(cfg, header, rows):
    """rows: list of lists, entries float or str; strings pass through."""
    if cfg.fmt == "json":
        recs = []
        for row in rows:
            rec = {}
            for key, val in zip(header, row):
                if isinstance(val, float):
                    rec[key] = None if not math.isfinite(val) else val
                else:
                    rec[key] = val
            recs.append(rec)
        text = json.dumps(recs, indent=2) + "\n"
    else:
        lines = [",".join(header)]
        for row in rows:
            lines.append(",".join(
                _fmt(v) if isinstance(v, float) else str(v) for v in row))
        text = "\n".join(lines) + "\n"
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


EVAL_HEADER = ["z_re", "z_im", "theta_re", "theta_im",
               "approx_re", "approx_im", "omega"]


def _eval_point(task):
    """One grid point -> one eval row; top level so pools can pickle it."""
    n, a, delta, z, S, dps = task
    params = ProblemParams(n, a, delta)
    u = params.u_float
    approx = complex(uniform_airy.theta_airy(params, z, S=S, dps=dps))
    with mp.workdps(dps + 10):
        exact_mp = oracle.theta_direct(params, mpmath.mpc(u) * z, dps=dps + 10)
        if abs(exact_mp) < 1e-8 * abs(approx):
            om = math.nan
        else:
            om = float(mpmath.log(abs((exact_mp - approx) / exact_mp), 10))
        exact = complex(exact_mp)
    return [z.real, z.imag, exact.real, exact.imag,
            approx.real, approx.imag, om]


def _run_points(cfg, points):
    p = cfg.params
    tasks = [(p.n, p.a, p.delta, complex(z), cfg.S, cfg.dps) for z in points]
    if cfg.workers > 1 and len(tasks) > 1:
        with multiprocessing.Pool(cfg.workers) as pool:
            rows = pool.map(_eval_point, tasks, chunksize=1)
    else:
        rows = [_eval_point(t) for t in tasks]
    return rows


def _cmd_eval(cfg, args):
    _write_table(cfg, EVAL_HEADER, _run_points(cfg, args.z))
    return 0


def _parse_grid(spec):
    try:
        lo, hi, count = spec.split(":")
        lo, hi, count = float(lo), float(hi), int(count)
    except ValueError:
        raise RangeError("grid spec must be 'lo:hi:count', got %r" % spec)
    if count < 0:
        raise RangeError("grid count must be >= 0")
    if count == 0:
        return []
    if count == 1:
        return [lo]
    step = (hi - lo) / (count - 1)
    return [lo + k * step for k in range(count)]


def _cmd_scan_error(cfg, args):
    if args.ray is not None:
        try:
            deg, r0, r1, count = args.ray.split(":")
            deg, r0, r1, count = float(deg), float(r0), float(r1), int(count)
        except ValueError:
            raise RangeError("ray spec must be 'deg:r0:r1:count'")
        radii = _parse_grid("%s:%s:%d" % (r0, r1, max(count, 0)))
        rot = complex(math.cos(math.radians(deg)), math.sin(math.radians(deg)))
        points = [r * rot for r in radii]
    else:
        points = [complex(x, args.imag) for x in _parse_grid(args.grid)]
    for z in points:
        if z == 0:
            raise RangeError("the scan grid contains the singular point z=0")
    _write_table(cfg, EVAL_HEADER, _run_points(cfg, points))
    return 0


def _cmd_scan_stokes(cfg, args):
    p = cfg.params
    t0 = uniform_airy.tau_lower(p)
    taus = _parse_grid("%.17g:%.17g:%d" % (t0, math.pi, args.count))
    header = ["tau", "z_re", "z_im", "omega_hat", "cusp"]
    rows = []
    for t in taus:
        z = uniform_airy._ah_point(p, t)
        val = uniform_airy.omega_hat(p, t, S=cfg.S)
        rows.append([t, z.real, z.imag, val, int(math.isnan(val))])
    _write_table(cfg, header, rows)
    return 0


def _cmd_trace_stokes(cfg, args):
    tr = mapping.trace_stokes(cfg.params, args.branch)
    header = ["branch", "k", "z_re", "z_im", "xi_re", "xi_im"]
    rows = []
    for k, (z, x) in enumerate(zip(tr.points, tr.xi_values)):
        rows.append([args.branch, k, z.real, z.imag, x.real, x.imag])
    _write_table(cfg, header, rows)
    return 0


def _cmd_coeffs(cfg, args):
    if args.kind == "lg":
        text = lg_coeffs.dump_tables(lg_coeffs.cached_tables(args.S))
        if cfg.fmt == "json":
            text = json.dumps({"lines": text.rstrip("\n").split("\n")},
                              indent=2) + "\n"
        if cfg.output:
            with open(cfg.output, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return 0
    if args.kind == "airy":
        from . import airy
        tab = airy.airy_coeffs(args.S)
        header = ["s", "a", "a_tilde"]
        rows = [[s, str(tab.a[s]), str(tab.a_tilde[s])]
                for s in range(1, args.S + 1)]
        _write_table(cfg, header, rows)
        return 0
    # d constants; exact rationals for the printed range, floats beyond
    dt = uniform_airy.d_coeffs(cfg.params, args.S)
    header = ["s", "d"]
    rows = [[s, str(dt.d[s]) if isinstance(dt.d[s], Fraction) else float(dt.d[s])]
            for s in sorted(dt.d)]
    _write_table(cfg, header, rows)
    return 0


_BOUND_ORACLE = {0: oracle.w0_direct, 1: oracle.w1_direct,
                 -1: oracle.w_minus1_direct}


def _cmd_bounds(cfg, args):
    p = cfg.params
    u = p.u_float
    z = args.z
    header = ["j", "N", "eta", "measured"]
    rows = []
    with mp.workdps(cfg.dps):
        ref = _BOUND_ORACLE[args.j](p, mpmath.mpc(u) * z, dps=cfg.dps)
    for N in range(2, cfg.N + 1):
        rep = lg_solutions.eta_bound(p, args.j, N, z, sign=args.sign)
        got = lg_solutions.lg_eval(p, args.j, z, N=N, sign=args.sign,
                                   dps=cfg.dps).value
        with mp.workdps(cfg.dps):
            measured = float(abs((mpmath.mpc(got) - ref) / ref))
        rows.append([args.j, N, rep.eta, measured])
    _write_table(cfg, header, rows)
    return 0


def _add_common(sp, need_params=True):
    if need_params:
        sp.add_argument("--n", type=int, required=True, help="degree")
        sp.add_argument("--a", type=Fraction, required=True,
                        help="parameter a (decimal or p/q)")
        sp.add_argument("--delta", type=float, default=0.05,
                        help="admissibility margin (default 0.05)")
    sp.add_argument("--S", type=int, default=None,
                    help="expansion truncation order")
    sp.add_argument("--N", type=int, default=5,
                    help="exponent-sum truncation for the bound pipeline")
    sp.add_argument("--dps", type=int, default=None,
                    help="decimal digits for oracle comparisons "
                         "(default REVBESSEL_PRECISION or %d)" % DEFAULT_DPS)
    sp.add_argument("--workers", type=parse_count, default=1,
                    help="process count for grid evaluation")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--output", default=None, help="write here, not stdout")


def build_parser():
    ap = argparse.ArgumentParser(
        prog="revbessel",
        description="Uniform asymptotic evaluation of reverse generalised "
                    "Bessel polynomials at large degree.")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("eval", help="oracle and Airy-form values at points")
    _add_common(sp)
    sp.add_argument("--z", type=parse_complex, action="append", required=True,
                    help="evaluation point, repeatable ('1.5+0.5i')")

    sp = sub.add_parser("scan-error", help="error profile over a grid")
    _add_common(sp)
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--grid", help="real grid 'lo:hi:count'")
    g.add_argument("--ray", help="ray grid 'deg:r0:r1:count'")
    sp.add_argument("--imag", type=float, default=0.0,
                    help="imaginary offset for --grid points")

    sp = sub.add_parser("scan-stokes",
                        help="re-expansion error along the upper Stokes arc")
    _add_common(sp)
    sp.add_argument("--count", type=parse_count, default=40)

    sp = sub.add_parser("trace-stokes", help="export one traced level curve")
    _add_common(sp)
    sp.add_argument("--branch", choices=("AD", "AH", "AF"), required=True)

    sp = sub.add_parser("coeffs", help="dump coefficient tables")
    sp.add_argument("--kind", choices=("lg", "airy", "d"), required=True)
    sp.add_argument("--n", type=int, help="degree (kind=d)")
    sp.add_argument("--a", type=Fraction, help="parameter a (kind=d)")
    sp.add_argument("--delta", type=float, default=0.05)
    sp.add_argument("--S", type=int, default=8)
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--output", default=None)

    sp = sub.add_parser("bounds", help="error bound against measured error")
    _add_common(sp)
    sp.add_argument("--z", type=parse_complex, required=True)
    sp.add_argument("--j", type=int, choices=(0, 1, -1), default=0)
    sp.add_argument("--sign", choices=("+", "-"), default=None)

    return ap


_DEFAULT_S = {"scan-stokes": 7}


def build_config(args):
    if getattr(args, "n", None) is not None and getattr(args, "a", None) is not None:
        params = ProblemParams(args.n, args.a, getattr(args, "delta", 0.05))
    elif args.command in ("coeffs",) and args.kind != "d":
        params = None
    else:
        raise RangeError("--n and --a are required here")
    dps = getattr(args, "dps", None)
    if dps is None:
        dps = int(os.environ.get("REVBESSEL_PRECISION", DEFAULT_DPS))
    if dps < 15:
        raise RangeError("need at least 15 digits")
    S = getattr(args, "S", None)
    if S is None:
        S = _DEFAULT_S.get(args.command, 6)
    return RunConfig(params=params, S=S, N=getattr(args, "N", 5), dps=dps,
                     workers=getattr(args, "workers", 1),
                     fmt=getattr(args, "format", "csv"),
                     output=getattr(args, "output", None))


_DISPATCH = {
    "eval": _cmd_eval,
    "scan-error": _cmd_scan_error,
    "scan-stokes": _cmd_scan_stokes,
    "trace-stokes": _cmd_trace_stokes,
    "coeffs": _cmd_coeffs,
    "bounds": _cmd_bounds,
}


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        cfg = build_config(args)
        return _DISPATCH[args.command](cfg, args)
    except RangeError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except RevBesselError as exc:
        print("numerical failure: %s" % exc, file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

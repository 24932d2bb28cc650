"""Exponent coefficient tables E_s, F_s for the exponential expansions.

E_1 and E_2 are installed from their printed closed forms; higher orders
follow from the recursion

    E_{s+1} = G dE_s/dphi + int_0^phi G * sum_{j=1}^{s-1} E_j' E_{s-j}' dphi'

with G = cos sin^2/(2 sigma) - alpha sin^3/(4(1+alpha)).  All arithmetic is
exact (see exactalg); the integration step hard-fails if a secular term
ever shows up, since the whole scheme rests on the integrands staying
mean-free.

F_s = dE_s/dxi = -2 G dE_s/dphi.

The numbering is 1-based throughout: tables.E[s] is E_s.
"""

from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .exactalg import (
    CF_ALPHA,
    COS,
    ONE_TP,
    SIN,
    CoefField,
    QPoly,
    RatFunc,
    TrigPoly,
    cf_rational,
)
from .params import mpf_from_fraction

F2 = Fraction(2)
F5 = Fraction(5)
F6 = Fraction(6)


def build_G():
    """The kernel G(alpha, phi) of the recursion."""
    sin2 = SIN * SIN
    g1 = (COS * sin2) * cf_rational(Fraction(1, 2)).div_sigma()
    g2 = (sin2 * SIN) * (CF_ALPHA * Fraction(-1, 4)).div_one_plus_alpha()
    return g1 + g2


def _E1():
    # sin(5cos^2-2)/(24 sigma) + alpha(cos(5cos^2-6)+1)/(48(1+alpha))
    cos2 = COS * COS
    t1 = (SIN * (cos2 * F5 - ONE_TP * F2)) * cf_rational(Fraction(1, 24)).div_sigma()
    t2 = (COS * (cos2 * F5 - ONE_TP * F6) + ONE_TP) * (
        CF_ALPHA * Fraction(1, 48)
    ).div_one_plus_alpha()
    return t1 + t2


def _E2():
    # alpha cos sin^3 (3 - 5cos^2)/(16 sigma^3)
    #   + sin^2/(64(1+alpha)^2) * (5(4+4a-a^2)cos^4 + (7a^2-16a-16)cos^2 - 2a^2)
    cos2 = COS * COS
    sin2 = SIN * SIN
    s1 = (CF_ALPHA * Fraction(1, 16)).div_sigma().div_sigma().div_sigma()
    t1 = (COS * sin2 * SIN * (ONE_TP * Fraction(3) - cos2 * F5)) * s1
    p4 = CoefField(RatFunc(QPoly((20, 20, -5))))       # 5(4+4a-a^2)
    p2 = CoefField(RatFunc(QPoly((-16, -16, 7))))      # 7a^2-16a-16
    p0 = CoefField(RatFunc(QPoly((0, 0, -2))))         # -2a^2
    poly = cos2 * cos2 * p4 + cos2 * p2 + ONE_TP * p0
    t2 = (sin2 * poly) * cf_rational(Fraction(1, 64)).div_one_plus_alpha(2)
    return t1 + t2


@dataclass
class ExpansionTables:
    """Exact E_s, F_s tables up to order S, plus the kernel G.

    E and F are dicts keyed by s = 1..S.
    """

    S: int
    G: TrigPoly
    E: dict
    F: dict

    def __repr__(self):
        return "ExpansionTables(S=%d)" % self.S


def compute_E(S=8):
    """Build E_1..E_S exactly.  S >= 2."""
    if S < 2:
        raise ValueError("S must be >= 2")
    G = build_G()
    E = {1: _E1(), 2: _E2()}
    dE = {1: E[1].diff(), 2: E[2].diff()}
    for s in range(2, S):
        quad = TrigPoly()
        for j in range(1, s):
            quad = quad + dE[j] * dE[s - j]
        nxt = G * dE[s] + (G * quad).integrate()
        E[s + 1] = nxt
        dE[s + 1] = nxt.diff()
    return ExpansionTables(S=S, G=G, E=E, F={})


def compute_F(tables):
    """Fill in F_s = -2 G dE_s/dphi for every computed E_s."""
    F = {}
    for s, Es in tables.E.items():
        F[s] = (tables.G * Es.diff()) * Fraction(-2)
    return ExpansionTables(S=tables.S, G=tables.G, E=tables.E, F=F)


def build_tables(S=8):
    """compute_E followed by compute_F."""
    return compute_F(compute_E(S))


def eval_trig(p, params, sin_phi, cos_phi):
    """Evaluate a TrigPoly at numeric (possibly complex) trig values.

    e^{+-i phi} are formed as cos_phi +- i sin_phi, which stays exact in
    the off-axis case where both inputs are complex.
    """
    use_mp = isinstance(sin_phi, (mpmath.mpf, mpmath.mpc)) or isinstance(
        cos_phi, (mpmath.mpf, mpmath.mpc)
    )
    if use_mp:
        alpha = mpf_from_fraction(params.alpha)
        sigma = mpmath.sqrt(1 + alpha)
        J = mpmath.mpc(0, 1)
    else:
        alpha = params.alpha_float
        sigma = params.sigma
        J = 1j
    expi = cos_phi + J * sin_phi
    expmi = cos_phi - J * sin_phi
    return p.eval(alpha, sigma, expi, expmi)


def _poly_string(qp):
    """Integer-scaled polynomial in a, descending degree; returns (text, lcm)."""
    if qp.is_zero:
        return "0", 1
    from math import lcm

    den = 1
    for c in qp.c:
        den = lcm(den, c.denominator)
    terms = []
    for k in range(len(qp.c) - 1, -1, -1):
        c = qp.c[k] * den
        n = int(c)
        if n == 0:
            continue
        mag = abs(n)
        if k == 0:
            body = "%d" % mag
        elif k == 1:
            body = "a" if mag == 1 else "%da" % mag
        else:
            body = ("a^%d" % k) if mag == 1 else "%da^%d" % (mag, k)
        sign = "-" if n < 0 else "+"
        terms.append((sign, body))
    first_sign, first_body = terms[0]
    text = ("-" + first_body) if first_sign == "-" else first_body
    for sign, body in terms[1:]:
        text += sign + body
    return text, den


def _ratfunc_string(rf):
    if rf.is_zero:
        return "0"
    num, den = _poly_string(rf.num)
    if len(rf.num.c) > 1 or (rf.num.c and rf.num.c[0] < 0):
        num = "(%s)" % num
    if rf.m == 0 and den == 1:
        return num
    if rf.m == 0:
        return "%s/%d" % (num, den)
    opa = "(1+a)" if rf.m == 1 else "(1+a)^%d" % rf.m
    if den == 1:
        return "%s/%s" % (num, opa)
    return "%s/(%d%s)" % (num, den, opa)


def _coeffield_string(cf):
    return "%s , %s" % (_ratfunc_string(cf.c0), _ratfunc_string(cf.c1))


def dump_tables(tables, kinds=("E", "F"), out=None):
    """Write the tables as stable text lines.

    Real-form polynomials are printed per harmonic in the cos/sin basis so
    every number is a plain element of the coefficient field:

        E s cos k : c0 , c1
        E s sin k : c0 , c1

    where the value of the harmonic is (c0 + c1*s)*cos(k*phi) (resp. sin),
    s = sqrt(1+a), and each c is an integer polynomial in a (descending
    degree) over an integer times a power of (1+a).  Zero harmonics are
    skipped; k runs upward.
    """
    lines = []
    for kind in kinds:
        table = tables.E if kind == "E" else tables.F
        for s in sorted(table):
            a, b = table[s].to_cos_sin()
            for k in sorted(a):
                if not a[k].is_zero:
                    lines.append("%s %d cos %d : %s" % (kind, s, k, _coeffield_string(a[k])))
            for k in sorted(b):
                if not b[k].is_zero:
                    lines.append("%s %d sin %d : %s" % (kind, s, k, _coeffield_string(b[k])))
    text = "\n".join(lines) + "\n"
    if out is not None:
        out.write(text)
    return text


_table_cache = {}


def cached_tables(S=8):
    """Shared immutable tables; building S=8 takes a noticeable fraction
    of a second, so callers reuse one instance per S."""
    if S not in _table_cache:
        _table_cache[S] = build_tables(S)
    return _table_cache[S]

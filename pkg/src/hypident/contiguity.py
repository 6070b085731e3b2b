"""Three-term relations between contiguous hypergeometric series.

A step operator q(x)d/dx + r(x) sends F(a,b;c;x) to a scalar multiple of a
neighbour F(a+1,b;c;x), F(a-1,b;c;x), ... Composing steps and eliminating
every second derivative with the defining ODE

    d^2 -> -((c - (a+b+1)x)/(x(1-x))) d + ab/(x(1-x))

keeps the composite at order one.  Rescaling by the Pochhammer prefactors
turns the composite into the canonical pair (Q, R) with

    F(a+k,b+l;c+m;x) = Q(x) F(a+1,b+1;c+1;x) + R(x) F(a,b;c;x).

All coefficient arithmetic is exact (RationalFunction over Q).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exact import Poly, RationalFunction, ExactError, div_exact, poly_derivative
from . import numerics
from .numerics import as_mp

import mpmath


def _p(name):
    return Poly.var(name)


def _c(v):
    return Poly.const(Fraction(v))


def _rf(num, den=None):
    if den is None:
        den = _c(1)
    return RationalFunction(num, den)


@dataclass(frozen=True)
class ContiguityOperator:
    """First-order operator q(x) d/dx + r(x), coefficients in Q(a,b,c,x)."""

    q: RationalFunction
    r: RationalFunction

    def subs_params(self, da, db, dc):
        """Shift the symbolic parameters: a -> a+da, b -> b+db, c -> c+dc."""
        mapping = {
            "a": _p("a") + _c(da),
            "b": _p("b") + _c(db),
            "c": _p("c") + _c(dc),
        }
        return ContiguityOperator(self.q.subs(mapping), self.r.subs(mapping))

    def apply_numeric(self, f, fprime, point):
        a, b, c, x = point
        vals = {"a": a, "b": b, "c": c, "x": x}
        return rf_eval_mp(self.q, vals) * fprime + rf_eval_mp(self.r, vals) * f


IDENTITY_OP = None  # filled in below once helpers exist


def poly_eval_mp(p, vals):
    acc = mpmath.mpf(0)
    for e, coef in p.terms.items():
        t = as_mp(coef)
        for name, expo in zip(p.vars, e):
            if expo:
                t *= as_mp(vals[name]) ** expo
        acc += t
    return acc


def rf_eval_mp(rf, vals):
    den = poly_eval_mp(rf.den, vals)
    if den == 0:
        raise ZeroDivisionError("rational function pole at evaluation point")
    return poly_eval_mp(rf.num, vals) / den


def basic_operator(kind):
    """One parameter step: H raises, B lowers; index 1 acts on a, 2 on b,
    3 on c.  Effects on F(a,b;c;x):

        H1 -> a F(a+1,.)        B1 -> (1/(a-1)) F(a-1,.)
        H2 -> b F(.,b+1)        B2 -> (1/(b-1)) F(.,b-1)
        H3 -> (1/c) F(;c+1)     B3 -> (c-1) F(;c-1)
    """
    a, b, c, x = _p("a"), _p("b"), _p("c"), _p("x")
    one = _c(1)
    if kind == "H1":
        return ContiguityOperator(_rf(x), _rf(a))
    if kind == "H2":
        return ContiguityOperator(_rf(x), _rf(b))
    if kind == "B3":
        return ContiguityOperator(_rf(x), _rf(c - one))
    if kind == "H3":
        den = (c - a) * (c - b)
        return ContiguityOperator(_rf(one - x, den), _rf(c - a - b, den))
    if kind == "B1":
        den = (one - a) * (c - a)
        return ContiguityOperator(_rf(-(x * (one - x)), den), _rf(b * x + a - c, den))
    if kind == "B2":
        den = (one - b) * (c - b)
        return ContiguityOperator(_rf(-(x * (one - x)), den), _rf(a * x + b - c, den))
    raise ValueError("unknown operator kind %r" % kind)


def compose_reduced(outer, inner):
    """Order-one reduction of outer(inner(.)).

    The caller must already have substituted the outer operator's parameters
    to the inner operator's target.  The d^2 term arising from d(q1 .) is
    eliminated with the ODE rule at the base parameters.
    """
    q2, r2 = outer.q, outer.r
    q1, r1 = inner.q, inner.r
    a, b, c, x = _p("a"), _p("b"), _p("c"), _p("x")
    one = _c(1)
    xx = _rf(x * (one - x))
    if xx.num.is_zero():
        raise ExactError("reduction divides by the zero polynomial")
    pcoef = _rf(c - (a + b + one) * x)
    d2_to_d = _rf(Poly.const(Fraction(-1))) * pcoef / xx
    d2_to_1 = _rf(a * b) / xx

    q1x = q1.derivative("x")
    r1x = r1.derivative("x")
    d2 = q2 * q1
    q = q2 * q1x + q2 * r1 + r2 * q1 + d2 * d2_to_d
    r = q2 * r1x + r2 * r1 + d2 * d2_to_1
    return ContiguityOperator(q, r)


# -- fast composition lane --------------------------------------------------
# Reducing every intermediate rational function with a multivariate gcd makes
# long composites exponentially slow.  Internally the composite is kept as
# (qn, rn, factors): q = qn / prod(factors), r = rn / prod(factors), where
# every denominator factor is linear (step-operator denominators, x, 1-x).
# Cancellation is then a sequence of exact-division tests, no gcd at all.
# Crucially the only x-dependent factors are x and 1-x themselves, so the
# quotient-rule term of the derivative never needs the expanded denominator:
# (f/(x^al (1-x)^be g))' uses d/dx log den = al/x - be/(1-x).


class _FacOp:
    __slots__ = ("qn", "rn", "fac")

    def __init__(self, qn, rn, fac):
        self.qn = qn
        self.rn = rn
        self.fac = fac


_X = _p("x")
_ONE_MX = _c(1) - _p("x")


def _fac_cancel(op):
    out = []
    for f in op.fac:
        if f.is_constant():
            inv = 1 / f.const_value()
            op.qn = op.qn * inv
            op.rn = op.rn * inv
            continue
        q2 = div_exact(op.qn, f)
        if q2 is not None:
            r2 = div_exact(op.rn, f)
            if r2 is not None:
                op.qn, op.rn = q2, r2
                continue
        out.append(f)
    op.fac = out
    return op


def _step_facop(kind, da, db, dc):
    base = basic_operator(kind)
    shifted = base.subs_params(da, db, dc)
    # den of each step operator is a product of linear polynomials; recover
    # the factor list from the known shapes instead of factoring
    a = _p("a") + _c(da)
    b = _p("b") + _c(db)
    c = _p("c") + _c(dc)
    one = _c(1)
    if kind in ("H1", "H2", "B3"):
        fac = []
    elif kind == "H3":
        fac = [c - a, c - b]
    elif kind == "B1":
        fac = [one - a, c - a]
    elif kind == "B2":
        fac = [one - b, c - b]
    else:
        raise ValueError(kind)
    # constructor-normalized q, r have their own dens; align to prod(fac)
    target = _c(1)
    for f in fac:
        target = target * f
    qn = _rescale_to_target(shifted.q, target)
    rn = _rescale_to_target(shifted.r, target)
    return _FacOp(qn, rn, fac)


def _rescale_to_target(rf, target):
    mult = div_exact(target, rf.den)
    if mult is None:
        raise ExactError("step denominator does not divide its factor product")
    return rf.num * mult


def _fac_compose(outer, inner):
    """compose_reduced on the factored representation."""
    a, b, c, x = _p("a"), _p("b"), _p("c"), _p("x")
    one = _c(1)
    P = c - (a + b + one) * x
    xmx = x * (one - x)
    al = sum(1 for f in inner.fac if f == _X)
    be = sum(1 for f in inner.fac if f == _ONE_MX)
    w = _c(al) * (one - x) - _c(be) * x
    q1n, r1n, q2n, r2n = inner.qn, inner.rn, outer.qn, outer.rn
    q1nx = poly_derivative(q1n, "x")
    r1nx = poly_derivative(r1n, "x")
    qn = (
        q2n * (q1nx * xmx - q1n * w)
        + (q2n * r1n + r2n * q1n) * xmx
        - q2n * q1n * P
    )
    rn = q2n * (r1nx * xmx - r1n * w) + r2n * r1n * xmx + q2n * q1n * (a * b)
    fac = list(outer.fac) + list(inner.fac) + [_X, _ONE_MX]
    return _fac_cancel(_FacOp(qn, rn, fac))


IDENTITY_OP = None


def identity_operator():
    return ContiguityOperator(_rf(_c(0)), _rf(_c(1)))


@dataclass(frozen=True)
class ThreeTermRelation:
    klm: tuple
    Q: RationalFunction
    R: RationalFunction


def _pochhammer_rf(name, count):
    """(t, count) as an exact rational function of the symbol t."""
    t = _p(name)
    acc = _rf(_c(1))
    if count >= 0:
        for j in range(count):
            acc = acc * _rf(t + _c(j))
    else:
        for j in range(1, -count + 1):
            acc = acc / _rf(t - _c(j))
    return acc


def _step_sequence(k, l, m, order):
    moves = {
        "a": [("a", 1 if k > 0 else -1)] * abs(k),
        "b": [("b", 1 if l > 0 else -1)] * abs(l),
        "c": [("c", 1 if m > 0 else -1)] * abs(m),
    }
    seq = []
    for name in order:
        seq.extend(moves[name])
    return seq


_STEP_OP = {
    ("a", 1): "H1",
    ("a", -1): "B1",
    ("b", 1): "H2",
    ("b", -1): "B2",
    ("c", 1): "H3",
    ("c", -1): "B3",
}


def _shift_facop(k, l, m, order="abc"):
    comp = _FacOp(Poly.const(0), Poly.const(1), [])
    state = {"a": 0, "b": 0, "c": 0}
    for name, direction in _step_sequence(k, l, m, order):
        step = _step_facop(
            _STEP_OP[(name, direction)], state["a"], state["b"], state["c"]
        )
        state[name] += direction
        comp = _fac_compose(step, comp)
    return comp


def _assemble_rf(num, numfacs, denfacs):
    """num * prod(numfacs) / prod(denfacs) with per-factor cancellation.

    All denominator factors are linear, so exact-division tests give a fully
    reduced result without a multivariate gcd."""
    numfacs = list(numfacs)
    denfacs = list(denfacs)
    for f in list(denfacs):
        if f in numfacs:
            numfacs.remove(f)
            denfacs.remove(f)
    for f in numfacs:
        num = num * f
    left = []
    for f in denfacs:
        quo = div_exact(num, f)
        if quo is not None:
            num = quo
        else:
            left.append(f)
    den = Poly.const(1)
    for f in left:
        den = den * f
    return RationalFunction(num, den, reduce=False)


def _poch_factor_lists(name, count):
    """(t,count) as (numerator factors, denominator factors)."""
    t = _p(name)
    if count >= 0:
        return [t + _c(j) for j in range(count)], []
    return [], [t - _c(j) for j in range(1, -count + 1)]


def shift_operator(k, l, m, order="abc"):
    """Reduced composite sending F(a,b;c;x) to
    ((a,k)(b,l)/(c,m)) F(a+k,b+l;c+m;x)."""
    comp = _shift_facop(k, l, m, order)
    q = _assemble_rf(comp.qn, [], comp.fac)
    r = _assemble_rf(comp.rn, [], comp.fac)
    return ContiguityOperator(q, r)


def shift_relation(k, l, m, order="abc"):
    """Canonical (Q, R) with
    F(a+k,b+l;c+m;x) = Q F(a+1,b+1;c+1;x) + R F(a,b;c;x)."""
    if (k, l, m) == (0, 0, 0):
        return ThreeTermRelation((0, 0, 0), _rf(_c(0)), _rf(_c(1)))
    comp = _shift_facop(k, l, m, order)
    an, ad = _poch_factor_lists("a", k)
    bn, bd = _poch_factor_lists("b", l)
    cn, cd = _poch_factor_lists("c", m)
    # F(shifted) = ((c,m)/((a,k)(b,l))) (q d/dx + r) F and
    # dF/dx = (ab/c) F(a+1,b+1;c+1;x)
    num_R = cn + ad + bd
    den_R = cd + an + bn
    Q = _assemble_rf(
        comp.qn,
        num_R + [_p("a"), _p("b")],
        den_R + [_p("c")] + comp.fac,
    )
    R = _assemble_rf(comp.rn, num_R, den_R + comp.fac)
    return ThreeTermRelation((k, l, m), Q, R)


def relation_residual(rel, point, ctx=None):
    """|F(a+k,b+l;c+m;x) - Q F(a+1,b+1;c+1;x) - R F(a,b;c;x)| scaled by
    max(1, |F(a+k,b+l;c+m;x)|) at a numeric point (a, b, c, x)."""
    ctx = ctx or numerics.DEFAULT_CTX
    k, l, m = rel.klm
    with mpmath.workdps(ctx.dps + 10):
        a, b, c, x = (as_mp(v) for v in point)
        vals = {"a": a, "b": b, "c": c, "x": x}
        lhs = numerics.hyp2f1(a + k, b + l, c + m, x, ctx)
        f_up = numerics.hyp2f1(a + 1, b + 1, c + 1, x, ctx)
        f0 = numerics.hyp2f1(a, b, c, x, ctx)
        rhs = rf_eval_mp(rel.Q, vals) * f_up + rf_eval_mp(rel.R, vals) * f0
        return float(abs(lhs - rhs) / max(1, abs(lhs)))

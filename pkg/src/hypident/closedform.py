"""Closed forms for the telescoped two-term ladder.

On a family where the three-term relation loses its middle term, iterating
F(a+k,b+l;c+m;x) = R(x) F(a,b;c;x) down the ladder leaves the value of F
equal to the reciprocal product of the R-coefficients.  This module factors
that product into Pochhammer-symbol data (s_n_closed), instantiates the 24
transferred relations satisfied by the companion solutions of the
hypergeometric equation (degenerate_relations), specializes them at
terminating parameter values (terminating_identities), and takes the
n -> oo Gamma-ratio limit when the product converges (pochhammer_limit).

All manipulation here is exact; numeric checks go through `numerics`.
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .admissible import AdmissibleQuadruple, family_substitute
from .exact import (
    AlgebraicValue,
    ExactError,
    Poly,
    _rational_roots,
    poly_gcd,
)

_F0 = Fraction(0)
_F1 = Fraction(1)

SHIFT_VARS = ("a", "b", "c")
WORK_VARS = ("a", "b", "c", "n")
SUBS_VARS = ("a", "b", "c", "x", "n")


class ClosedFormError(ExactError):
    pass


def _fr(v):
    return v if isinstance(v, Fraction) else Fraction(v)


# ---------------------------------------------------------------------------
# expression trees
#
# Node kinds and their JSON layout mirror what numerics.eval_closed_form
# consumes: rational, algebraic, symbol, sum, product, power, Gamma,
# Pochhammer, sin, sqrt_pi.


class ClosedFormExpr:
    """Immutable expression tree with a flattened, sorted canonical form."""

    __slots__ = ("kind", "value", "children", "_key")

    def __init__(self, kind, value=None, children=()):
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "value", value)
        object.__setattr__(self, "children", tuple(children))
        object.__setattr__(self, "_key", None)

    def __setattr__(self, name, val):
        raise AttributeError("ClosedFormExpr is immutable")

    def key(self):
        if self._key is None:
            if self.kind == "rational":
                payload = (str(self.value),)
            elif self.kind == "algebraic":
                payload = (self.value.kind,) + self.value.sort_key()
            elif self.kind == "symbol":
                payload = (self.value,)
            else:
                payload = ()
            object.__setattr__(
                self,
                "_key",
                (self.kind, payload, tuple(ch.key() for ch in self.children)),
            )
        return self._key

    def __eq__(self, other):
        return isinstance(other, ClosedFormExpr) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return "ClosedFormExpr(%s)" % describe_expr(self)

    def to_json(self):
        k = self.kind
        if k == "rational":
            return {"node": "rational", "p": str(self.value)}
        if k == "algebraic":
            return self.value.to_json()
        if k == "symbol":
            return {"node": "symbol", "name": self.value}
        if k in ("sum", "product"):
            return {"node": k, "children": [c.to_json() for c in self.children]}
        if k == "power":
            return {
                "node": "power",
                "base": self.children[0].to_json(),
                "exponent": self.children[1].to_json(),
            }
        if k in ("Gamma", "sin"):
            return {"node": k, "child": self.children[0].to_json()}
        if k == "Pochhammer":
            return {
                "node": "Pochhammer",
                "shift": self.children[0].to_json(),
                "count": self.children[1].to_json(),
            }
        if k == "sqrt_pi":
            return {"node": "sqrt_pi"}
        raise ClosedFormError("unknown node kind %r" % k)


def expr_from_json(obj):
    node = obj["node"]
    if node == "rational":
        return cf_rat(Fraction(obj["p"]))
    if node == "algebraic":
        return cf_alg(AlgebraicValue.from_json(obj))
    if node == "symbol":
        return cf_sym(obj["name"])
    if node in ("sum", "product"):
        return ClosedFormExpr(node, children=[expr_from_json(c) for c in obj["children"]])
    if node == "power":
        return ClosedFormExpr(
            "power",
            children=(expr_from_json(obj["base"]), expr_from_json(obj["exponent"])),
        )
    if node in ("Gamma", "sin"):
        return ClosedFormExpr(node, children=(expr_from_json(obj["child"]),))
    if node == "Pochhammer":
        return ClosedFormExpr(
            "Pochhammer",
            children=(expr_from_json(obj["shift"]), expr_from_json(obj["count"])),
        )
    if node == "sqrt_pi":
        return ClosedFormExpr("sqrt_pi")
    raise ClosedFormError("unknown node %r" % node)


def cf_rat(v):
    return ClosedFormExpr("rational", value=_fr(v))


def cf_alg(v):
    if v.kind == "rational":
        return cf_rat(v.rat)
    return ClosedFormExpr("algebraic", value=v)


def cf_sym(name):
    return ClosedFormExpr("symbol", value=name)


def cf_sum(*terms):
    return ClosedFormExpr("sum", children=terms)


def cf_prod(*factors):
    return ClosedFormExpr("product", children=factors)


def cf_pow(base, expo):
    if isinstance(expo, (int, Fraction)):
        expo = cf_rat(expo)
    return ClosedFormExpr("power", children=(base, expo))


def cf_gamma(arg):
    return ClosedFormExpr("Gamma", children=(arg,))


def cf_poch(shift, count):
    return ClosedFormExpr("Pochhammer", children=(shift, count))


def cf_sin(arg):
    return ClosedFormExpr("sin", children=(arg,))


def cf_sqrt_pi():
    return ClosedFormExpr("sqrt_pi")


def _const_of(expr):
    # rational or algebraic leaf as AlgebraicValue, else None
    if expr.kind == "rational":
        return AlgebraicValue.from_rational(expr.value)
    if expr.kind == "algebraic":
        return expr.value
    return None


def canonical(expr):
    """Flatten nested sums/products, fold constants, sort commutative
    children.  Structural equality of canonical trees is the equality
    notion used by every golden comparison."""
    kids = [canonical(c) for c in expr.children]
    kind = expr.kind
    if kind in ("sum", "product"):
        flat = []
        for ch in kids:
            if ch.kind == kind:
                flat.extend(ch.children)
            else:
                flat.append(ch)
        consts = [c for c in flat if _const_of(c) is not None]
        rest = [c for c in flat if _const_of(c) is None]
        folded = None
        if consts:
            acc = _const_of(consts[0])
            ok = True
            for c in consts[1:]:
                try:
                    if kind == "sum":
                        acc = acc + _const_of(c)
                    else:
                        acc = acc * _const_of(c)
                except ExactError:
                    ok = False  # incompatible surds stay separate
                    break
            if ok:
                folded = acc
            else:
                rest = consts[1:] + rest
                folded = _const_of(consts[0])
        if kind == "product":
            if folded is not None and folded.is_zero():
                return cf_rat(0)
            if folded is not None and not folded.equals_rational(1):
                rest.insert(0, cf_alg(folded))
        else:
            if folded is not None and not folded.is_zero():
                rest.insert(0, cf_alg(folded))
        if not rest:
            return cf_rat(1) if kind == "product" else cf_rat(0)
        if len(rest) == 1:
            return rest[0]
        return ClosedFormExpr(kind, children=sorted(rest, key=lambda e: e.key()))
    if kind == "power":
        base, expo = kids
        if expo.kind == "rational":
            if expo.value == 0:
                return cf_rat(1)
            if expo.value == 1:
                return base
            if (
                expo.value.denominator == 1
                and base.kind == "rational"
                and (base.value != 0 or expo.value > 0)
            ):
                e = expo.value.numerator
                if abs(e) <= 64:
                    return cf_rat(base.value ** e)
            if expo.value.denominator == 1 and base.kind == "algebraic":
                e = expo.value.numerator
                if 0 < abs(e) <= 16 and not (e < 0 and base.value.is_zero()):
                    acc = AlgebraicValue.from_rational(1)
                    v = base.value if e > 0 else base.value.inverse()
                    for _ in range(abs(e)):
                        acc = acc * v
                    return cf_alg(acc)
        return ClosedFormExpr("power", children=(base, expo))
    if kids:
        return ClosedFormExpr(kind, value=expr.value, children=kids)
    return expr


def describe_expr(expr):
    k = expr.kind
    if k == "rational":
        return str(expr.value)
    if k == "algebraic":
        return repr(expr.value)
    if k == "symbol":
        return expr.value
    if k == "sum":
        return "(" + " + ".join(describe_expr(c) for c in expr.children) + ")"
    if k == "product":
        return "*".join(describe_expr(c) for c in expr.children)
    if k == "power":
        return "%s^(%s)" % (describe_expr(expr.children[0]), describe_expr(expr.children[1]))
    if k == "Gamma":
        return "Gamma(%s)" % describe_expr(expr.children[0])
    if k == "Pochhammer":
        return "(%s, %s)" % (describe_expr(expr.children[0]), describe_expr(expr.children[1]))
    if k == "sin":
        return "sin(%s)" % describe_expr(expr.children[0])
    if k == "sqrt_pi":
        return "sqrt(pi)"
    return "?"


def eval_expr(expr, bindings, ctx=None):
    from . import numerics

    return numerics.eval_closed_form(expr.to_json(), bindings, ctx or numerics.DEFAULT_CTX)


# ---------------------------------------------------------------------------
# surd-pair polynomial arithmetic: (p0, p1) stands for p0 + p1*sqrt(d)


def _pzero(vars=WORK_VARS):
    return Poly.const(0, vars)


def _pair_add(u, v):
    return (u[0] + v[0], u[1] + v[1])


def _pair_mul(u, v, d):
    hi = u[0] * v[1] + u[1] * v[0]
    lo = u[0] * v[0]
    if d:
        lo = lo + u[1] * v[1] * Fraction(d)
    return (lo, hi)


def _pair_is_zero(u):
    return u[0].is_zero() and u[1].is_zero()


def _pair_scale(u, s):
    return (u[0] * s, u[1] * s)


def _pair_deg_n(u):
    return max(u[0].degree("n"), u[1].degree("n"))


def _pair_coeffs_n(u):
    c0 = u[0].coeffs_in("n")
    c1 = u[1].coeffs_in("n")
    k = max(len(c0), len(c1))
    vars = u[0].vars
    c0 = c0 + [_pzero(vars)] * (k - len(c0))
    c1 = c1 + [_pzero(vars)] * (k - len(c1))
    return list(zip(c0, c1))


def _pair_subs(u, mapping, target=None):
    tv = target or u[0].vars
    return (u[0].subs(mapping, tv), u[1].subs(mapping, tv))


# ---------------------------------------------------------------------------
# splitting a polynomial into factors linear in n
#
# The factor shapes that actually occur are (n - rho) with rho polynomial of
# degree <= 2 in the free parameters and rational coefficients.  Roots are
# recovered by specializing the free parameters at rational sample points,
# reading off the rational roots in n, fitting a root function through the
# samples, and certifying the fit by exact synthetic division.

_FIT_POINTS = (
    Fraction(7, 5),
    Fraction(-11, 3),
    Fraction(13, 4),
    Fraction(19, 7),
    Fraction(-23, 9),
    Fraction(31, 8),
    Fraction(-37, 11),
    Fraction(41, 6),
)


def _specialized_roots(pair, point, d):
    """Rational roots in n of the pair specialized at `point`, or None when
    the specialization drops the n-degree (bad sample)."""
    vars = pair[0].vars
    mapping = {v: Poly.const(w, vars) for v, w in point.items()}
    s0 = pair[0].subs(mapping)
    s1 = pair[1].subs(mapping)
    if max(s0.degree("n"), s1.degree("n")) != _pair_deg_n(pair):
        return None
    # rational roots of p0 + p1*sqrt(d): common roots of both components
    if not d or s1.is_zero():
        uni = s0
    elif s0.is_zero():
        uni = s1
    else:
        uni = poly_gcd(s0, s1)
    coeffs = [c.const_value() for c in uni.coeffs_in("n")]
    if len(coeffs) <= 1:
        return []
    lcm = 1
    for c in coeffs:
        lcm = lcm * c.denominator // _gcd(lcm, c.denominator)
    roots, _ = _rational_roots([c * lcm for c in coeffs])
    return sorted(set(roots))


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def _good_samples(pair, frees, d, extra=0):
    """Base point plus one axis-perturbed point per free variable (plus
    `extra` more along the first axis), all preserving the n-degree."""
    for start in range(len(_FIT_POINTS) - len(frees) - extra - 1):
        base = {v: _FIT_POINTS[start + i] for i, v in enumerate(frees)}
        pts = [base]
        for i, v in enumerate(frees):
            p = dict(base)
            p[v] = _FIT_POINTS[(start + len(frees) + i) % len(_FIT_POINTS)] + i + 1
            pts.append(p)
        for j in range(extra):
            p = dict(base)
            p[frees[0]] = _FIT_POINTS[(start + 2 * len(frees) + j + 1) % len(_FIT_POINTS)] - j - 2
            pts.append(p)
        roots = [_specialized_roots(pair, p, d) for p in pts]
        if all(r is not None for r in roots):
            return pts, roots
    return None, None


def _root_candidates(pair, frees, d):
    """Candidate root functions rho (pairs of n-free polys), cheapest first."""
    vars = pair[0].vars
    if not frees:
        rts = _specialized_roots(pair, {}, d)
        return [(Poly.const(r, vars), _pzero(vars)) for r in (rts or [])]
    want_quad = len(frees) == 1
    pts, roots = _good_samples(pair, frees, d, extra=1 if want_quad else 0)
    if pts is None:
        return []
    base_pt, base_roots = pts[0], roots[0]
    cands = []
    seen = set()

    def push(poly):
        key = tuple(sorted(poly.terms.items()))
        if key not in seen:
            seen.add(key)
            cands.append((poly, _pzero(vars)))

    for r in base_roots:
        if all(r in rr for rr in roots[1:]):
            push(Poly.const(r, vars))
    naxes = len(frees)
    axis_roots = roots[1 : naxes + 1]
    for combo in itertools.product(base_roots, *axis_roots):
        r0 = combo[0]
        poly = Poly.const(r0, vars)
        for i, v in enumerate(frees):
            dv = pts[i + 1][v] - base_pt[v]
            coef = (combo[i + 1] - r0) / dv
            if coef:
                poly = poly + Poly.const(coef, vars) * (
                    Poly.var(v, vars) - Poly.const(base_pt[v], vars)
                )
        push(poly)
    if want_quad and len(pts) >= 3:
        v = frees[0]
        xs = [p[v] for p in pts[:3]]
        for ys in itertools.product(roots[0], roots[1], roots[2]):
            # Lagrange through three samples
            poly = _pzero(vars)
            for i in range(3):
                term = Poly.const(ys[i], vars)
                for j in range(3):
                    if i != j:
                        term = term * (Poly.var(v, vars) - Poly.const(xs[j], vars))
                        term = term * (1 / (xs[i] - xs[j]))
                poly = poly + term
            push(poly)
    return cands


def _divide_linear(pair, rho, d):
    """Exact synthetic division of the pair by (n - rho); None if it does
    not divide."""
    cs = _pair_coeffs_n(pair)
    deg = len(cs) - 1
    if deg < 1:
        return None
    vars = pair[0].vars
    quot = [None] * deg
    carry = cs[deg]
    for i in range(deg - 1, -1, -1):
        quot[i] = carry
        carry = _pair_add(cs[i], _pair_mul(carry, rho, d))
    if not _pair_is_zero(carry):
        return None
    n = Poly.var("n", vars)
    out0, out1 = _pzero(vars), _pzero(vars)
    for i, (q0, q1) in enumerate(quot):
        out0 = out0 + q0 * n ** i
        out1 = out1 + q1 * n ** i
    return (out0, out1)


def _linear_split(pair, d):
    """All root functions rho with (n - rho) dividing the pair, plus the
    unsplit remainder (n-free content in the clean case)."""
    frees = sorted(
        (set(pair[0].present_vars()) | set(pair[1].present_vars())) - {"n"}
    )
    roots = []
    work = pair
    while _pair_deg_n(work) >= 1:
        step = None
        for rho in _root_candidates(work, frees, d):
            quo = _divide_linear(work, rho, d)
            if quo is not None:
                step = (rho, quo)
                break
        if step is None:
            break
        roots.append(step[0])
        work = step[1]
    return roots, work


# ---------------------------------------------------------------------------
# Pochhammer products


@dataclass(frozen=True)
class PochFactor:
    """Pochhammer(shift, stride*n); the shift is a polynomial in the free
    parameters, with an optional sqrt(disc) component."""

    shift: Poly
    surd: Poly
    stride: int

    def key(self):
        return (_poly_key(self.shift), _poly_key(self.surd), self.stride)

    def describe(self):
        s = str(self.shift)
        if not self.surd.is_zero():
            s += " + (%s)*sqrt(d)" % self.surd
        cnt = "n" if self.stride == 1 else "%d*n" % self.stride
        return "(%s, %s)" % (s, cnt)

    def shift_expr(self, disc):
        main = _poly_to_expr(self.shift)
        if self.surd.is_zero():
            return main
        root = cf_alg(AlgebraicValue.quadratic(0, 1, disc))
        return canonical(cf_sum(main, cf_prod(_poly_to_expr(self.surd), root)))

    def count_expr(self):
        n = cf_sym("n")
        if self.stride == 1:
            return n
        return cf_prod(cf_rat(self.stride), n)


def _poly_key(p):
    # keyed by named monomials so rings of different arity compare equal
    out = []
    for e, c in p.terms.items():
        mono = tuple(
            (v, k) for v, k in zip(p.vars, e) if k
        )
        out.append((mono, str(c)))
    return tuple(sorted(out))


def _poly_to_expr(p):
    terms = []
    for e, coef in sorted(p.terms.items()):
        factors = [cf_rat(coef)]
        for name, ex in zip(p.vars, e):
            for _ in range(ex):
                factors.append(cf_sym(name))
        terms.append(cf_prod(*factors) if len(factors) > 1 else factors[0])
    if not terms:
        return cf_rat(0)
    return canonical(cf_sum(*terms))


def poch_factor(const, a=0, b=0, c=0, stride=1, surd_const=0, surd_a=0):
    """Convenience constructor: Pochhammer(const + a*'a' + b*'b' + c*'c'
    (+ surd part * sqrt(d)), stride*n)."""
    p = Poly.affine(
        {"a": _fr(a), "b": _fr(b), "c": _fr(c)}, _fr(const), SHIFT_VARS
    )
    s = Poly.affine({"a": _fr(surd_a)}, _fr(surd_const), SHIFT_VARS)
    return PochFactor(p, s, stride)


@dataclass(frozen=True)
class PochhammerProduct:
    """base^n * prod(num)/prod(den) of Pochhammer factors, with an optional
    unresolved rational-function tail prod_{j=1..n} u_den(j)/u_num(j)."""

    base: AlgebraicValue
    num_factors: tuple
    den_factors: tuple
    unresolved: tuple = None  # ((num0, num1), (den0, den1)) polys in n
    disc: int = 0

    def describe(self):
        num = "*".join(f.describe() for f in self.num_factors) or "1"
        den = "*".join(f.describe() for f in self.den_factors)
        s = "(%r)^n * %s" % (self.base, num)
        if den:
            s += " / (%s)" % den
        if self.unresolved is not None:
            s += " * <unresolved tail>"
        return s

    def canonical_key(self):
        """Equality modulus: strides split to 1 with the stride constant
        absorbed into the base, negative strides flipped across the
        fraction bar, identical factors cancelled."""
        base = self.base
        num, den = [], []
        for side, factors in (("num", self.num_factors), ("den", self.den_factors)):
            for f in factors:
                s = f.stride
                shift, surd = f.shift, f.surd
                if s == 0:
                    continue
                target = side
                if s < 0:
                    # (t, -q*n) = (-1)^(q*n) / (1 - t, q*n)
                    s = -s
                    shift = Poly.const(1, shift.vars) - shift
                    surd = -surd
                    target = "den" if side == "num" else "num"
                    if s % 2:
                        base = base * AlgebraicValue.from_rational(-1)
                scale = Fraction(s) ** s
                if side == "den":
                    scale = 1 / scale
                if s > 1:
                    base = base * AlgebraicValue.from_rational(scale)
                half = Fraction(1, s)
                for i in range(s):
                    piece = (
                        _poly_key(shift * half + Poly.const(Fraction(i, s), shift.vars)),
                        _poly_key(surd * half),
                    )
                    (num if target == "num" else den).append(piece)
        ncount, dcount = {}, {}
        for k in num:
            ncount[k] = ncount.get(k, 0) + 1
        for k in den:
            dcount[k] = dcount.get(k, 0) + 1
        for k in list(ncount):
            common = min(ncount.get(k, 0), dcount.get(k, 0))
            if common:
                ncount[k] -= common
                dcount[k] -= common
        numkey = tuple(sorted(k for k, v in ncount.items() for _ in range(v)))
        denkey = tuple(sorted(k for k, v in dcount.items() for _ in range(v)))
        basekey = (base.kind,) + base.sort_key()
        ukey = None
        if self.unresolved is not None:
            (u0, u1), (v0, v1) = self.unresolved
            ukey = (_poly_key(u0), _poly_key(u1), _poly_key(v0), _poly_key(v1))
        return (basekey, numkey, denkey, ukey)

    def to_expr(self):
        if self.unresolved is not None:
            raise ClosedFormError("unresolved tail has no closed expression")
        n = cf_sym("n")
        parts = []
        base = self.base
        if base.kind == "rational":
            if base.rat < 0:
                parts.append(cf_pow(cf_rat(-1), n))
                base = AlgebraicValue.from_rational(-base.rat)
            if base.rat != 1:
                parts.append(cf_pow(cf_rat(base.rat), n))
        else:
            parts.append(cf_pow(cf_alg(base), n))
        for f in self.num_factors:
            if f.stride:
                parts.append(cf_poch(f.shift_expr(self.disc), f.count_expr()))
        for f in self.den_factors:
            if f.stride:
                parts.append(cf_pow(cf_poch(f.shift_expr(self.disc), f.count_expr()), -1))
        if not parts:
            return cf_rat(1)
        return canonical(cf_prod(*parts))

    def evaluate(self, n, bindings, ctx=None):
        from . import numerics

        import mpmath

        ctx = ctx or numerics.DEFAULT_CTX
        with mpmath.workdps(ctx.dps + 10):
            acc = numerics.as_mp(self.base) ** n
            for f in self.num_factors:
                acc *= self._factor_value(f, n, bindings, ctx)
            for f in self.den_factors:
                acc /= self._factor_value(f, n, bindings, ctx)
            if self.unresolved is not None:
                (u0, u1), (v0, v1) = self.unresolved
                for j in range(1, n + 1):
                    acc *= self._tail_value((v0, v1), j, bindings, ctx)
                    acc /= self._tail_value((u0, u1), j, bindings, ctx)
            return acc

    def _factor_value(self, f, n, bindings, ctx):
        from . import numerics

        shift = _poly_eval_mp(f.shift, bindings)
        if not f.surd.is_zero():
            import mpmath

            shift += _poly_eval_mp(f.surd, bindings) * mpmath.sqrt(
                mpmath.mpc(self.disc)
            )
        return numerics.pochhammer_numeric(shift, f.stride * n, ctx)

    def _tail_value(self, pair, j, bindings, ctx):
        import mpmath

        vals = dict(bindings)
        vals["n"] = j
        v = _poly_eval_mp(pair[0], vals)
        if not pair[1].is_zero():
            v += _poly_eval_mp(pair[1], vals) * mpmath.sqrt(mpmath.mpc(self.disc))
        return v


def _poly_eval_mp(p, bindings):
    import mpmath

    from . import numerics

    acc = mpmath.mpf(0)
    for e, coef in p.terms.items():
        t = numerics.as_mp(coef)
        for name, ex in zip(p.vars, e):
            if ex:
                t *= numerics.as_mp(bindings[name]) ** ex
        acc += t
    return acc


def products_equal(p1, p2):
    return p1.canonical_key() == p2.canonical_key()


# ---------------------------------------------------------------------------
# the telescoped product


def _shifted_ratio(rel, quad):
    """Numerator/denominator pairs of the ladder ratio R with the step
    substitution (a,b,c) -> (a+(n-1)k, b+(n-1)l, c+(n-1)m) and the family
    applied; returns (num_pair, den_pair, disc)."""
    k, l, m = rel.klm
    step = Poly.var("n", SUBS_VARS) - Poly.const(1, SUBS_VARS)
    mapping = {}
    for name, cnt in zip(("a", "b", "c"), (k, l, m)):
        mapping[name] = Poly.var(name, SUBS_VARS) + step * cnt
    num = rel.R.num.subs(mapping, SUBS_VARS)
    den = rel.R.den.subs(mapping, SUBS_VARS)
    n0, n1, dn = family_substitute(num, quad)
    d0, d1, dd = family_substitute(den, quad)
    disc = dn or dd
    if dn and dd and dn != dd:
        raise ClosedFormError("substitution produced mixed surds")
    # family substitution is simultaneous, so re-pin a if b or c mapped to it
    drop = {"x": Poly.const(0, WORK_VARS)}
    if quad.a_value is not None:
        drop["a"] = Poly.const(quad.a_value, WORK_VARS)
    pn = (n0.subs(drop, WORK_VARS), n1.subs(drop, WORK_VARS))
    pd = (d0.subs(drop, WORK_VARS), d1.subs(drop, WORK_VARS))
    return pn, pd, (disc or 0)


def _const_root_step(rho):
    if not (rho[0].is_constant() and rho[1].is_zero()):
        return None
    v = rho[0].const_value()
    if v.denominator == 1 and v >= 1:
        return int(v)
    return None


def s_n_closed(rel, quad):
    """Pochhammer-product closed form of the reciprocal R-ladder product.

    Factors the stepped ratio into factors linear in the step index over
    the family's field, converts every factor into a Pochhammer symbol,
    folds constants into the base, and certifies the result against the
    exact telescoping identity.  Pieces that resist linear splitting are
    returned in `unresolved`.
    """
    pn, pd, disc = _shifted_ratio(rel, quad)
    if _pair_is_zero(pn):
        raise ClosedFormError("relation degenerates: ladder ratio is identically zero")
    if _pair_is_zero(pd):
        raise ClosedFormError("relation degenerates: ladder ratio has no finite value")
    roots_num, rest_num = _linear_split(pn, disc)
    roots_den, rest_den = _linear_split(pd, disc)
    for rho in roots_num:
        j0 = _const_root_step(rho)
        if j0 is not None:
            raise ClosedFormError(
                "relation degenerates: ladder ratio vanishes at step %d" % j0
            )
    for rho in roots_den:
        j0 = _const_root_step(rho)
        if j0 is not None:
            raise ClosedFormError(
                "relation degenerates: ladder ratio has a pole at step %d" % j0
            )

    def to_factor(rho):
        one = Poly.const(1, WORK_VARS)
        shift = (one - rho[0], -rho[1])
        return PochFactor(_restrict(shift[0]), _restrict(shift[1]), 1)

    num = [to_factor(r) for r in roots_den]
    den = [to_factor(r) for r in roots_num]
    num, den = _cancel_factors(num, den)

    unresolved = None
    base = AlgebraicValue.from_rational(1)
    nconst = rest_num[0].is_constant() and rest_num[1].is_constant()
    dconst = rest_den[0].is_constant() and rest_den[1].is_constant()
    if nconst and dconst:
        cn = AlgebraicValue.quadratic(
            rest_num[0].const_value(), rest_num[1].const_value(), disc
        )
        cd = AlgebraicValue.quadratic(
            rest_den[0].const_value(), rest_den[1].const_value(), disc
        )
        base = cd / cn
    else:
        unresolved = (rest_num, rest_den)

    prod = PochhammerProduct(
        base, tuple(num), tuple(den), unresolved=unresolved, disc=disc
    )
    if unresolved is None:
        _check_telescoping(prod, pn, pd, disc)
    return prod


def _restrict(p):
    # polys built over WORK_VARS; keep them there (n never appears in shifts)
    if p.degree("n") > 0:
        raise ClosedFormError("shift depends on the step index")
    return p


def _cancel_factors(num, den):
    out_num = list(num)
    out_den = []
    for f in den:
        for i, g in enumerate(out_num):
            if g.key() == f.key():
                del out_num[i]
                break
        else:
            out_den.append(f)
    return out_num, out_den


def _check_telescoping(prod, pn, pd, disc):
    """base * prod(t_i + n) * pn(n+1) == prod(u_j + n) * pd(n+1), the exact
    form of S(n+1)/S(n) * R(n+1) == 1 for stride-1 factors."""
    vars = WORK_VARS
    n = Poly.var("n", vars)
    one = Poly.const(1, vars)
    lhs = (Poly.const(prod.base.rat, vars), Poly.const(prod.base.coef, vars))
    for f in prod.num_factors:
        lhs = _pair_mul(lhs, (f.shift + n, f.surd), disc)
    shift_n = {"n": n + one}
    lhs = _pair_mul(lhs, _pair_subs(pn, shift_n), disc)
    rhs = (one, Poly.const(0, vars))
    for f in prod.den_factors:
        rhs = _pair_mul(rhs, (f.shift + n, f.surd), disc)
    rhs = _pair_mul(rhs, _pair_subs(pd, shift_n), disc)
    diff = _pair_add(lhs, _pair_scale(rhs, Fraction(-1)))
    if not _pair_is_zero(diff):
        raise ClosedFormError("telescoping certificate failed")


# ---------------------------------------------------------------------------
# affine parameter forms in the free symbols and the step count n


@dataclass(frozen=True)
class ParamForm:
    """sum(coef_v * v) + coef_n * n + const over the free parameter symbols."""

    coeffs: tuple  # sorted ((symbol, Fraction), ...), n excluded
    coef_n: Fraction = _F0
    const: Fraction = _F0

    @staticmethod
    def make(coeffs=None, coef_n=0, const=0):
        cc = tuple(
            sorted((v, _fr(w)) for v, w in (coeffs or {}).items() if w != 0)
        )
        return ParamForm(cc, _fr(coef_n), _fr(const))

    def coef(self, v):
        for name, w in self.coeffs:
            if name == v:
                return w
        return _F0

    def symbols(self):
        return tuple(name for name, _ in self.coeffs)

    def is_constant(self):
        return not self.coeffs and self.coef_n == 0

    def scale(self, s):
        s = _fr(s)
        return ParamForm.make(
            {v: w * s for v, w in self.coeffs}, self.coef_n * s, self.const * s
        )

    def plus(self, other):
        if isinstance(other, (int, Fraction)):
            return ParamForm(self.coeffs, self.coef_n, self.const + _fr(other))
        d = {v: w for v, w in self.coeffs}
        for v, w in other.coeffs:
            d[v] = d.get(v, _F0) + w
        return ParamForm.make(d, self.coef_n + other.coef_n, self.const + other.const)

    def shift_n(self, e):
        return ParamForm(self.coeffs, self.coef_n + _fr(e), self.const)

    def subst(self, var, repl):
        w = self.coef(var)
        if w == 0:
            return self
        rest = ParamForm.make(
            {v: u for v, u in self.coeffs if v != var}, self.coef_n, self.const
        )
        return rest.plus(repl.scale(w))

    def eval(self, n, bindings):
        from . import numerics

        acc = numerics.as_mp(self.const) + numerics.as_mp(self.coef_n) * n
        for v, w in self.coeffs:
            acc = acc + numerics.as_mp(w) * numerics.as_mp(bindings[v])
        return acc

    def to_expr(self):
        terms = []
        if self.const:
            terms.append(cf_rat(self.const))
        for v, w in self.coeffs:
            terms.append(cf_sym(v) if w == 1 else cf_prod(cf_rat(w), cf_sym(v)))
        if self.coef_n:
            terms.append(
                cf_sym("n") if self.coef_n == 1 else cf_prod(cf_rat(self.coef_n), cf_sym("n"))
            )
        if not terms:
            return cf_rat(0)
        return canonical(cf_sum(*terms))

    def describe(self):
        parts = []
        for v, w in self.coeffs:
            parts.append(v if w == 1 else "%s*%s" % (w, v))
        if self.coef_n:
            parts.append("n" if self.coef_n == 1 else "%s*n" % self.coef_n)
        if self.const or not parts:
            parts.append(str(self.const))
        return " + ".join(parts).replace("+ -", "- ")

    def proportional_to(self, other):
        """self == ratio * other -> ratio, else None."""
        pivot = None
        if other.coef_n:
            pivot = (self.coef_n, other.coef_n)
        elif other.coeffs:
            v, w = other.coeffs[0]
            pivot = (self.coef(v), w)
        elif other.const:
            pivot = (self.const, other.const)
        else:
            return None
        ratio = pivot[0] / pivot[1]
        if other.scale(ratio) == self:
            return ratio
        return None


def _paramform_to_poly(pf, vars=WORK_VARS):
    d = {v: w for v, w in pf.coeffs}
    if pf.coef_n:
        d["n"] = pf.coef_n
    return Poly.affine(d, pf.const, vars)


def _poly_to_paramform(p):
    if p.total_degree() > 1:
        return None
    coeffs = {}
    const = _F0
    coef_n = _F0
    for e, coef in p.terms.items():
        deg = sum(e)
        if deg == 0:
            const = coef
            continue
        name = p.vars[e.index(1)]
        if name == "n":
            coef_n = coef
        else:
            coeffs[name] = coef
    return ParamForm.make(coeffs, coef_n, const)


# ---------------------------------------------------------------------------
# hypergeometric evaluation descriptors


@dataclass(frozen=True)
class HypSpec:
    """F(upper1, upper2; lower; argument) with affine parameter forms."""

    upper1: ParamForm
    upper2: ParamForm
    lower: ParamForm
    argument: AlgebraicValue
    allow_extended: bool = False

    def describe(self):
        return "F(%s, %s; %s; %r)" % (
            self.upper1.describe(),
            self.upper2.describe(),
            self.lower.describe(),
            self.argument,
        )

    def at_n(self, n, bindings):
        return (
            self.upper1.eval(n, bindings),
            self.upper2.eval(n, bindings),
            self.lower.eval(n, bindings),
        )


def eval_hyp_spec(spec, n, bindings, ctx=None):
    from . import numerics

    ctx = ctx or numerics.DEFAULT_CTX
    u1, u2, lo = spec.at_n(n, bindings)
    x = numerics.as_mp(spec.argument)
    try:
        return numerics.hyp2f1(u1, u2, lo, x, ctx)
    except numerics.GammaPoleError:
        if not spec.allow_extended:
            raise
        for first, second in ((u1, u2), (u2, u1)):
            try:
                return numerics.hyp2f1_extended(first, second, lo, x, ctx)
            except numerics.NumericsError:
                continue
        raise


# ---------------------------------------------------------------------------
# the 24 transferred relations
#
# Parameter templates are integer-combination rows (coef_a, coef_b, coef_c,
# const); n-shift and Pochhammer-stride entries are rows (coef_k, coef_l,
# coef_m) contracted against the lattice point.

_A = (1, 0, 0, 0)
_B = (0, 1, 0, 0)
_C = (0, 0, 1, 0)

_POCH_V = (
    ((0, 0, 1, 0), (0, 0, 1)),
    ((-1, -1, 1, 0), (-1, -1, 1)),
)
_POCH_V_DEN = (
    ((-1, 0, 1, 0), (-1, 0, 1)),
    ((0, -1, 1, 0), (0, -1, 1)),
)
_POCH_IX = (
    ((0, 0, 1, 0), (0, 0, 1)),
    ((1, 0, -1, 1), (1, 0, -1)),
)
_POCH_IX_DEN = (
    ((0, 1, 0, 0), (0, 1, 0)),
    ((1, -1, 0, 1), (1, -1, 0)),
)
_POCH_XIII = (
    ((0, 0, 1, 0), (0, 0, 1)),
    ((0, 1, -1, 1), (0, 1, -1)),
)
_POCH_XIII_DEN = (
    ((1, 0, 0, 0), (1, 0, 0)),
    ((-1, 1, 0, 1), (-1, 1, 0)),
)
_POCH_XVII = (
    ((0, 0, 1, 0), (0, 0, 1)),
    ((1, 0, -1, 1), (1, 0, -1)),
    ((0, 1, -1, 1), (0, 1, -1)),
)
_POCH_XVII_DEN = (
    ((1, 0, 0, 0), (1, 0, 0)),
    ((0, 1, 0, 0), (0, 1, 0)),
    ((0, 0, -1, 2), (0, 0, -1)),
)
_POCH_XXI = (
    ((0, 0, 1, 0), (0, 0, 1)),
    ((1, 1, -1, 0), (1, 1, -1)),
)
_POCH_XXI_DEN = (
    ((1, 0, 0, 0), (1, 0, 0)),
    ((0, 1, 0, 0), (0, 1, 0)),
)

_TEMPLATES = {
    "i": dict(
        params=(_A, _B, _C),
        shifts=((1, 0, 0), (0, 1, 0), (0, 0, 1)),
        arg="x", poch=(), poch_den=(), sign=None, powers=(), group=1,
    ),
    "ii": dict(
        params=((-1, 0, 1, 0), (0, -1, 1, 0), _C),
        shifts=((-1, 0, 1), (0, -1, 1), (0, 0, 1)),
        arg="x", poch=(), poch_den=(), sign=None,
        powers=(("1-x", (-1, -1, 1)),), group=1,
    ),
    "iii": dict(
        params=(_A, (0, -1, 1, 0), _C),
        shifts=((1, 0, 0), (0, -1, 1), (0, 0, 1)),
        arg="x/(x-1)", poch=(), poch_den=(), sign=None,
        powers=(("1-x", (-1, 0, 0)),), group=1,
    ),
    "iv": dict(
        params=((-1, 0, 1, 0), _B, _C),
        shifts=((-1, 0, 1), (0, 1, 0), (0, 0, 1)),
        arg="x/(x-1)", poch=(), poch_den=(), sign=None,
        powers=(("1-x", (0, -1, 0)),), group=1,
    ),
    "v": dict(
        params=(_A, _B, (1, 1, -1, 1)),
        shifts=((1, 0, 0), (0, 1, 0), (1, 1, -1)),
        arg="1-x", poch=_POCH_V, poch_den=_POCH_V_DEN, sign=None,
        powers=(), group=2,
    ),
    "vi": dict(
        params=((1, 0, -1, 1), (0, 1, -1, 1), (1, 1, -1, 1)),
        shifts=((1, 0, -1), (0, 1, -1), (1, 1, -1)),
        arg="1-x", poch=_POCH_V, poch_den=_POCH_V_DEN, sign=None,
        powers=(("x", (0, 0, -1)),), group=2,
    ),
    "vii": dict(
        params=(_A, (1, 0, -1, 1), (1, 1, -1, 1)),
        shifts=((1, 0, 0), (1, 0, -1), (1, 1, -1)),
        arg="1-1/x", poch=_POCH_V, poch_den=_POCH_V_DEN, sign=None,
        powers=(("x", (-1, 0, 0)),), group=2,
    ),
    "viii": dict(
        params=((0, 1, -1, 1), _B, (1, 1, -1, 1)),
        shifts=((0, 1, -1), (0, 1, 0), (1, 1, -1)),
        arg="1-1/x", poch=_POCH_V, poch_den=_POCH_V_DEN, sign=None,
        powers=(("x", (0, -1, 0)),), group=2,
    ),
    "ix": dict(
        params=(_A, (1, 0, -1, 1), (1, -1, 0, 1)),
        shifts=((1, 0, 0), (1, 0, -1), (1, -1, 0)),
        arg="1/x", poch=_POCH_IX, poch_den=_POCH_IX_DEN, sign=(-1, -1, 1),
        powers=(("x", (-1, 0, 0)),), group=3,
    ),
    "x": dict(
        params=((0, -1, 0, 1), (0, -1, 1, 0), (1, -1, 0, 1)),
        shifts=((0, -1, 0), (0, -1, 1), (1, -1, 0)),
        arg="1/x", poch=_POCH_IX, poch_den=_POCH_IX_DEN, sign=(0, -1, 1),
        powers=(("-x", (0, 1, -1)), ("1-x", (-1, -1, 1))), group=3,
    ),
    "xi": dict(
        params=(_A, (0, -1, 1, 0), (1, -1, 0, 1)),
        shifts=((1, 0, 0), (0, -1, 1), (1, -1, 0)),
        arg="1/(1-x)", poch=_POCH_IX, poch_den=_POCH_IX_DEN, sign=(0, -1, 1),
        powers=(("1-x", (-1, 0, 0)),), group=3,
    ),
    "xii": dict(
        params=((1, 0, -1, 1), (0, -1, 0, 1), (1, -1, 0, 1)),
        shifts=((1, 0, -1), (0, -1, 0), (1, -1, 0)),
        arg="1/(1-x)", poch=_POCH_IX, poch_den=_POCH_IX_DEN, sign=(0, -1, 1),
        powers=(("-x", (0, 0, -1)), ("1-x", (-1, 0, 1))), group=3,
    ),
    "xiii": dict(
        params=((0, 1, -1, 1), _B, (-1, 1, 0, 1)),
        shifts=((0, 1, -1), (0, 1, 0), (-1, 1, 0)),
        arg="1/x", poch=_POCH_XIII, poch_den=_POCH_XIII_DEN, sign=(-1, -1, 1),
        powers=(("x", (0, -1, 0)),), group=4,
    ),
    "xiv": dict(
        params=((-1, 0, 0, 1), (-1, 0, 1, 0), (-1, 1, 0, 1)),
        shifts=((-1, 0, 0), (-1, 0, 1), (-1, 1, 0)),
        arg="1/x", poch=_POCH_XIII, poch_den=_POCH_XIII_DEN, sign=(-1, 0, 1),
        powers=(("-x", (1, 0, -1)), ("1-x", (-1, -1, 1))), group=4,
    ),
    "xv": dict(
        params=(_B, (-1, 0, 1, 0), (-1, 1, 0, 1)),
        shifts=((0, 1, 0), (-1, 0, 1), (-1, 1, 0)),
        arg="1/(1-x)", poch=_POCH_XIII, poch_den=_POCH_XIII_DEN, sign=(-1, 0, 1),
        powers=(("1-x", (0, -1, 0)),), group=4,
    ),
    "xvi": dict(
        params=((0, 1, -1, 1), (-1, 0, 0, 1), (-1, 1, 0, 1)),
        shifts=((0, 1, -1), (-1, 0, 0), (-1, 1, 0)),
        arg="1/(1-x)", poch=_POCH_XIII, poch_den=_POCH_XIII_DEN, sign=(-1, 0, 1),
        powers=(("-x", (0, 0, -1)), ("1-x", (0, -1, 1))), group=4,
    ),
    "xvii": dict(
        params=((1, 0, -1, 1), (0, 1, -1, 1), (0, 0, -1, 2)),
        shifts=((1, 0, -1), (0, 1, -1), (0, 0, -1)),
        arg="x", poch=_POCH_XVII, poch_den=_POCH_XVII_DEN, sign=None,
        powers=(("x", (0, 0, -1)),), group=5,
    ),
    "xviii": dict(
        params=((-1, 0, 0, 1), (0, -1, 0, 1), (0, 0, -1, 2)),
        shifts=((-1, 0, 0), (0, -1, 0), (0, 0, -1)),
        arg="x", poch=_POCH_XVII, poch_den=_POCH_XVII_DEN, sign=None,
        powers=(("x", (0, 0, -1)), ("1-x", (-1, -1, 1))), group=5,
    ),
    "xix": dict(
        params=((1, 0, -1, 1), (0, -1, 0, 1), (0, 0, -1, 2)),
        shifts=((1, 0, -1), (0, -1, 0), (0, 0, -1)),
        arg="x/(x-1)", poch=_POCH_XVII, poch_den=_POCH_XVII_DEN, sign=None,
        powers=(("x", (0, 0, -1)), ("1-x", (-1, 0, 1))), group=5,
    ),
    "xx": dict(
        params=((0, 1, -1, 1), (-1, 0, 0, 1), (0, 0, -1, 2)),
        shifts=((0, 1, -1), (-1, 0, 0), (0, 0, -1)),
        arg="x/(x-1)", poch=_POCH_XVII, poch_den=_POCH_XVII_DEN, sign=None,
        powers=(("x", (0, 0, -1)), ("1-x", (0, -1, 1))), group=5,
    ),
    "xxi": dict(
        params=((-1, 0, 1, 0), (0, -1, 1, 0), (-1, -1, 1, 1)),
        shifts=((-1, 0, 1), (0, -1, 1), (-1, -1, 1)),
        arg="1-x", poch=_POCH_XXI, poch_den=_POCH_XXI_DEN, sign=None,
        powers=(("1-x", (-1, -1, 1)),), group=6,
    ),
    "xxii": dict(
        params=((-1, 0, 0, 1), (0, -1, 0, 1), (-1, -1, 1, 1)),
        shifts=((-1, 0, 0), (0, -1, 0), (-1, -1, 1)),
        arg="1-x", poch=_POCH_XXI, poch_den=_POCH_XXI_DEN, sign=None,
        powers=(("x", (0, 0, -1)), ("1-x", (-1, -1, 1))), group=6,
    ),
    "xxiii": dict(
        params=((-1, 0, 1, 0), (-1, 0, 0, 1), (-1, -1, 1, 1)),
        shifts=((-1, 0, 1), (-1, 0, 0), (-1, -1, 1)),
        arg="1-1/x", poch=_POCH_XXI, poch_den=_POCH_XXI_DEN, sign=None,
        powers=(("x", (1, 0, -1)), ("1-x", (-1, -1, 1))), group=6,
    ),
    "xxiv": dict(
        params=((0, -1, 1, 0), (0, -1, 0, 1), (-1, -1, 1, 1)),
        shifts=((0, -1, 1), (0, -1, 0), (-1, -1, 1)),
        arg="1-1/x", poch=_POCH_XXI, poch_den=_POCH_XXI_DEN, sign=None,
        powers=(("x", (0, 1, -1)), ("1-x", (-1, -1, 1))), group=6,
    ),
}

RELATION_KINDS = tuple(_TEMPLATES)

# denominators of the companion-solution transfer coefficients; a factor
# vanishing identically on the family invalidates the whole group
_GROUP_DENOMS = {
    1: (),
    2: (("scalar", (-1, -1, 1, -1)), ("poch", (0, 0, 1, 0), (0, 0, 1)),
        ("poch", (-1, -1, 1, 0), (-1, -1, 1))),
    3: (("scalar", (0, 1, 0, 0)), ("poch", (0, 0, 1, 0), (0, 0, 1)),
        ("poch", (1, 0, -1, 1), (1, 0, -1))),
    4: (("scalar", (1, 0, 0, 0)), ("poch", (0, 0, 1, 0), (0, 0, 1)),
        ("poch", (0, 1, -1, 1), (0, 1, -1))),
    5: (("scalar", (1, 0, 0, 0)), ("scalar", (0, 1, 0, 0)),
        ("poch", (0, 0, 1, 0), (0, 0, 1)),
        ("poch", (1, 0, -1, 1), (1, 0, -1)),
        ("poch", (0, 1, -1, 1), (0, 1, -1))),
    6: (("scalar", (1, 0, 0, 0)), ("scalar", (0, 1, 0, 0)),
        ("poch", (0, 0, 1, 0), (0, 0, 1)),
        ("poch", (1, 1, -1, 0), (1, 1, -1))),
}


def _contract(combo, klm):
    return sum(c * v for c, v in zip(combo, klm))


def _instantiate_param(row, quad):
    ca, cb, cc, t = (Fraction(v) for v in row)
    out = ParamForm.make({}, 0, t)
    if ca:
        if quad.a_value is not None:
            out = out.plus(ca * quad.a_value)
        else:
            out = out.plus(ParamForm.make({"a": ca}))
    if cb:
        bf = quad.b_of_a
        contrib = ParamForm.make(
            {"a": cb * bf.coef_a, "b": cb * bf.coef_b}, 0, cb * bf.const
        )
        if quad.a_value is not None and contrib.coef("a"):
            contrib = contrib.subst("a", ParamForm.make({}, 0, quad.a_value))
        out = out.plus(contrib)
    if cc:
        cf = quad.c_of_a
        if cf is None:
            out = out.plus(ParamForm.make({"c": cc}))
        else:
            contrib = ParamForm.make({"a": cc * cf.coef_a, "b": cc * cf.coef_b},
                                     0, cc * cf.const)
            if quad.a_value is not None and contrib.coef("a"):
                contrib = contrib.subst("a", ParamForm.make({}, 0, quad.a_value))
            out = out.plus(contrib)
    return out


def _arg_value(x, tag):
    one = AlgebraicValue.from_rational(1)
    if tag == "x":
        return x
    if tag == "1-x":
        return one - x
    if tag == "-x":
        return AlgebraicValue.from_rational(0) - x
    if tag == "x/(x-1)":
        return x / (x - one)
    if tag == "1/x":
        return one / x
    if tag == "1/(1-x)":
        return one / (one - x)
    if tag == "1-1/x":
        return one - one / x
    raise ClosedFormError("unknown argument transform %r" % tag)


def _poch_vanishes(base, stride):
    """Whether Pochhammer(base, stride*n) is zero or undefined for some
    n >= 1 at an integer-constant base."""
    if base.denominator != 1:
        return False
    if stride > 0:
        return base <= 0
    if stride < 0:
        return base >= 1
    return False


def _find_vanishing_factor(quad, template, klm):
    for entry in _GROUP_DENOMS[template["group"]]:
        pf = _instantiate_param(entry[1], quad)
        if entry[0] == "scalar":
            if pf.is_constant() and pf.const == 0:
                return _row_name(entry[1])
            continue
        cnt = _contract(entry[2], klm)
        if cnt == 0 or not pf.is_constant():
            continue
        steps = range(cnt) if cnt > 0 else range(cnt, 0)
        if any((pf.const + i) == 0 for i in steps):
            return "(%s, %d)" % (_row_name(entry[1]), cnt)
    for row, combo in template["poch_den"]:
        e = _contract(combo, klm)
        pf = _instantiate_param(row, quad)
        if e and pf.is_constant() and _poch_vanishes(pf.const, e):
            return "(%s, %d*n)" % (_row_name(row), e)
    return None


def _row_name(row):
    names = ("a", "b", "c")
    parts = []
    for coef, name in zip(row[:3], names):
        if coef == 1:
            parts.append("+%s" % name)
        elif coef == -1:
            parts.append("-%s" % name)
        elif coef:
            parts.append("%+d*%s" % (coef, name))
    if row[3]:
        parts.append("%+d" % row[3])
    s = "".join(parts) or "0"
    return s[1:] if s.startswith("+") else s


@dataclass(frozen=True)
class DegenerateRelation:
    """One transferred two-term relation: F(lhs) = prefactor(n) * F(rhs)."""

    kind: str
    quadruple: AdmissibleQuadruple
    s_product: PochhammerProduct
    poch_num: tuple   # ((ParamForm, stride), ...)
    poch_den: tuple
    sign_stride: int  # extra (-1)^(stride*n)
    power_factors: tuple  # ((AlgebraicValue, stride), ...)
    lhs_spec: HypSpec
    rhs_spec: HypSpec
    valid: bool = True
    invalid_factor: str = None

    @property
    def prefactor(self):
        parts = [self.s_product.to_expr()]
        n = cf_sym("n")
        if self.sign_stride % 2:
            parts.append(cf_pow(cf_rat(-1), n))
        for pf, e in self.poch_num:
            parts.append(cf_poch(pf.to_expr(), _count_expr(e)))
        for pf, e in self.poch_den:
            parts.append(cf_pow(cf_poch(pf.to_expr(), _count_expr(e)), -1))
        for base, e in self.power_factors:
            parts.append(cf_pow(cf_alg(base), _count_expr(e)))
        return canonical(cf_prod(*parts))

    def describe(self):
        tagged = "" if self.valid else "  [invalid: %s]" % self.invalid_factor
        return "(%s) %s = S * %s%s" % (
            self.kind, self.lhs_spec.describe(), self.rhs_spec.describe(), tagged
        )


def _count_expr(e):
    n = cf_sym("n")
    return n if e == 1 else cf_prod(cf_rat(e), n)


def degenerate_relations(quad, rel):
    """Instantiate all 24 transfer templates on an admissible family.

    Templates whose transfer coefficient has an identically-vanishing
    denominator factor on this family come back with valid=False and the
    factor named; their hypergeometric content is still filled in.
    """
    klm = rel.klm
    sprod = s_n_closed(rel, quad)
    out = []
    for kind in RELATION_KINDS:
        t = _TEMPLATES[kind]
        params = [_instantiate_param(row, quad) for row in t["params"]]
        shifts = [_contract(combo, klm) for combo in t["shifts"]]
        invalid = _find_vanishing_factor(quad, t, klm)
        try:
            arg = _arg_value(quad.x, t["arg"])
        except (ExactError, ZeroDivisionError):
            arg = quad.x
            invalid = invalid or "argument transform %s" % t["arg"]
        lhs = HypSpec(params[0], params[1], params[2], arg)
        rhs = HypSpec(
            params[0].shift_n(shifts[0]),
            params[1].shift_n(shifts[1]),
            params[2].shift_n(shifts[2]),
            arg,
        )
        poch_num = tuple(
            (_instantiate_param(row, quad), _contract(combo, klm))
            for row, combo in t["poch"]
            if _contract(combo, klm)
        )
        poch_den = tuple(
            (_instantiate_param(row, quad), _contract(combo, klm))
            for row, combo in t["poch_den"]
            if _contract(combo, klm)
        )
        sign = _contract(t["sign"], klm) if t["sign"] else 0
        powers = []
        for tag, combo in t["powers"]:
            e = _contract(combo, klm)
            if not e:
                continue
            try:
                base = _arg_value(quad.x, tag)
            except (ExactError, ZeroDivisionError):
                invalid = invalid or "power base %s" % tag
                continue
            if base.is_zero():
                invalid = invalid or "power base %s" % tag
                continue
            powers.append((base, e))
        out.append(
            DegenerateRelation(
                kind=kind,
                quadruple=quad,
                s_product=sprod,
                poch_num=poch_num,
                poch_den=poch_den,
                sign_stride=sign,
                power_factors=tuple(powers),
                lhs_spec=lhs,
                rhs_spec=rhs,
                valid=invalid is None,
                invalid_factor=invalid,
            )
        )
    return out


def verify_degenerate(drel, n, bindings, ctx=None):
    """Relative residual of F(lhs) = prefactor(n) * F(rhs at n)."""
    from . import numerics

    import mpmath

    ctx = ctx or numerics.DEFAULT_CTX
    with mpmath.workdps(ctx.dps + 10):
        lhs = eval_hyp_spec(drel.lhs_spec, 0, bindings, ctx)
        vals = dict(bindings)
        vals["n"] = n
        pref = eval_expr(drel.prefactor, vals, ctx)
        rhs = eval_hyp_spec(drel.rhs_spec, n, bindings, ctx)
        return numerics.relative_residual(lhs, pref * rhs)


# ---------------------------------------------------------------------------
# terminating specializations


@dataclass(frozen=True)
class IdentityRecord:
    """A finished special value: F(lhs_spec) = rhs (times residual_f if the
    tail sum did not collapse)."""

    label: str
    lhs_spec: HypSpec
    rhs: ClosedFormExpr
    validity: str
    provenance: str = "derived"
    residual_f: HypSpec = None
    branch_notes: str = None

    def describe(self):
        tail = " * %s" % self.residual_f.describe() if self.residual_f else ""
        return "%s: %s = %s%s  [%s]" % (
            self.label,
            self.lhs_spec.describe(),
            describe_expr(self.rhs),
            tail,
            self.validity,
        )


def _sub_factor(factor, var, repl, disc):
    """Substitute into a stride-s Pochhammer factor; returns
    (factor', sign_parity_increment) with the full step-reversal rewrite
    (t - s*n, s*n) = (-1)^(s*n) (1 - t, s*n) applied when it fires."""
    main = _poly_to_paramform(factor.shift)
    if main is None or not factor.surd.is_zero():
        return None, 0
    sub = main.subst(var, repl)
    s = factor.stride
    if sub.coef_n == 0:
        return (sub, s), 0
    if sub.coef_n == -s:
        flipped = ParamForm.make(
            {v: -w for v, w in sub.coeffs}, 0, 1 - sub.const
        )
        return (flipped, s), s
    return (sub, s, "n"), 0  # shift keeps a symbolic n-dependence


def _collapse_rhs(target_kprime, other, lower, z):
    """Closed form of F(-k', other; lower; z) for k' <= 2, else None."""
    if target_kprime == 0:
        return cf_rat(1)
    zq = cf_alg(z)
    if target_kprime == 1:
        ratio = other.proportional_to(lower)
        if ratio is not None:
            val = AlgebraicValue.from_rational(1) - z * AlgebraicValue.from_rational(ratio)
            return cf_alg(val)
        if lower.is_constant() and z.kind == "rational":
            scaled = other.scale(-z.rat / lower.const)
            return scaled.plus(1).to_expr()
        return canonical(
            cf_sum(
                cf_rat(1),
                cf_prod(cf_rat(-1), zq, other.to_expr(), cf_pow(lower.to_expr(), -1)),
            )
        )
    if target_kprime == 2:
        t1 = cf_prod(cf_rat(-2), zq, other.to_expr(), cf_pow(lower.to_expr(), -1))
        t2 = cf_prod(
            cf_pow(zq, 2),
            other.to_expr(),
            other.plus(1).to_expr(),
            cf_pow(lower.to_expr(), -1),
            cf_pow(lower.plus(1).to_expr(), -1),
        )
        return canonical(cf_sum(cf_rat(1), t1, t2))
    return None


def terminating_identities(drel):
    """Terminating specializations of one transferred relation.

    For every free parameter entering an upper entry of the stepped side
    with a nonzero step coefficient e, substitutes the values driving that
    entry to -k' for k' = 0 .. max(|e|, 2) - 1, collapses the stepped
    factor when it ends after at most three terms, and reads off the
    resulting closed evaluation.  Invalid relations yield nothing.
    """
    if not drel.valid:
        return []
    out = []
    uppers = (drel.rhs_spec.upper1, drel.rhs_spec.upper2)
    seen = set()
    for idx, target in enumerate(uppers):
        e = target.coef_n
        if e == 0 or e.denominator != 1:
            continue
        for var in target.symbols():
            if var == "c":
                continue
            alpha = target.coef(var)
            for kp in range(max(abs(int(e)), 2)):
                repl = ParamForm.make(
                    {v: -w / alpha for v, w in target.coeffs if v != var},
                    -e / alpha,
                    (-kp - target.const) / alpha,
                )
                sig = (var, repl, kp)
                if sig in seen:
                    continue
                seen.add(sig)
                rec = _build_terminating(drel, idx, var, repl, kp)
                if rec is not None:
                    out.append(rec)
    return out


def _build_terminating(drel, idx, var, repl, kp):
    quad = drel.quadruple
    z = drel.rhs_spec.argument
    sprod = drel.s_product
    if sprod.unresolved is not None:
        return None

    sign_parity = drel.sign_stride
    poch_num, poch_den = [], []
    base = sprod.base
    if base.kind == "rational" and base.rat < 0:
        sign_parity += 1
        base = AlgebraicValue.from_rational(-base.rat)

    symbolic = []  # (side, ParamForm-with-n, stride)
    for side, factors in (("num", sprod.num_factors), ("den", sprod.den_factors)):
        for f in factors:
            res, flip = _sub_factor(f, var, repl, sprod.disc)
            if res is None:
                return None
            sign_parity += flip
            if len(res) == 3:
                symbolic.append((side, res[0], res[1]))
            else:
                (poch_num if side == "num" else poch_den).append(res)
    for pf, e in drel.poch_num:
        poch_num.append((pf.subst(var, repl), e))
    for pf, e in drel.poch_den:
        poch_den.append((pf.subst(var, repl), e))

    parts = []
    n = cf_sym("n")
    if not base.equals_rational(1):
        parts.append(cf_pow(cf_alg(base), n))
    if sign_parity % 2:
        parts.append(cf_pow(cf_rat(-1), n))
    for pf, e in poch_num:
        parts.append(cf_poch(pf.to_expr(), _count_expr(e)))
    for pf, e in poch_den:
        parts.append(cf_pow(cf_poch(pf.to_expr(), _count_expr(e)), -1))
    for side, pf, e in symbolic:
        node = cf_poch(pf.to_expr(), _count_expr(e))
        parts.append(node if side == "num" else cf_pow(node, -1))
    for bval, e in drel.power_factors:
        parts.append(cf_pow(cf_alg(bval), _count_expr(e)))

    uppers = [drel.rhs_spec.upper1.subst(var, repl), drel.rhs_spec.upper2.subst(var, repl)]
    lower = drel.rhs_spec.lower.subst(var, repl)
    target = uppers[idx]
    other = uppers[1 - idx]
    if not (target.is_constant() and target.const == -kp):
        return None
    collapse = _collapse_rhs(kp, other, lower, z)
    residual = None
    if collapse is not None:
        parts.append(collapse)
    else:
        residual = HypSpec(target, other, lower, z, allow_extended=True)

    lhs = HypSpec(
        drel.lhs_spec.upper1.subst(var, repl),
        drel.lhs_spec.upper2.subst(var, repl),
        drel.lhs_spec.lower.subst(var, repl),
        drel.lhs_spec.argument,
        allow_extended=True,
    )
    label = "%s (%s) %s=%s" % (quad.label, drel.kind, var, repl.describe())
    return IdentityRecord(
        label=label,
        lhs_spec=lhs,
        rhs=canonical(cf_prod(*parts)) if parts else cf_rat(1),
        validity="%s = %s, n in Z>=0" % (var, repl.describe()),
        residual_f=residual,
    )


def verify_identity(rec, n, bindings, ctx=None):
    """Relative residual of the record at step n with free symbols bound."""
    from . import numerics

    import mpmath

    ctx = ctx or numerics.DEFAULT_CTX
    with mpmath.workdps(ctx.dps + 10):
        lhs = eval_hyp_spec(rec.lhs_spec, n, bindings, ctx)
        vals = dict(bindings)
        vals["n"] = n
        rhs = eval_expr(rec.rhs, vals, ctx)
        if rec.residual_f is not None:
            rhs *= eval_hyp_spec(rec.residual_f, n, bindings, ctx)
        return numerics.relative_residual(lhs, rhs)


# ---------------------------------------------------------------------------
# n -> oo limit


@dataclass(frozen=True)
class LimitMarker:
    """Returned when the Gamma-ratio limit does not apply."""

    reason: str


def pochhammer_limit(prod):
    """lim_{n->oo} of the product as a Gamma ratio.

    Applies only when the base is exactly 1, all strides agree, the factor
    counts match, and the shift totals agree (the product then tends to
    prod Gamma(den shifts) / prod Gamma(num shifts)); anything else comes
    back as a LimitMarker, never an error.
    """
    if prod.unresolved is not None:
        return LimitMarker("unresolved tail")
    if not prod.base.equals_rational(1):
        return LimitMarker("base differs from 1: %r" % prod.base)
    strides = {f.stride for f in prod.num_factors} | {
        f.stride for f in prod.den_factors
    }
    if len(strides) > 1:
        return LimitMarker("mixed strides")
    if len(prod.num_factors) != len(prod.den_factors):
        return LimitMarker("factor counts differ")
    if not prod.num_factors:
        return cf_rat(1)
    tot_num = prod.num_factors[0].shift * 0
    tot_den = tot_num
    surd_num = tot_num
    surd_den = tot_num
    for f in prod.num_factors:
        tot_num = tot_num + f.shift
        surd_num = surd_num + f.surd
    for f in prod.den_factors:
        tot_den = tot_den + f.shift
        surd_den = surd_den + f.surd
    if tot_num != tot_den or surd_num != surd_den:
        return LimitMarker("shift totals differ: divergent power of n")
    parts = []
    for f in prod.den_factors:
        parts.append(cf_gamma(f.shift_expr(prod.disc)))
    for f in prod.num_factors:
        parts.append(cf_pow(cf_gamma(f.shift_expr(prod.disc)), -1))
    return canonical(cf_prod(*parts))

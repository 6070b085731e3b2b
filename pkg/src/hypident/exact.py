"""Exact sparse multivariate polynomial and rational-function arithmetic.

Everything in this module is exact: coefficients are `fractions.Fraction`,
and algebraic numbers are either rational, quadratic (p + q*sqrt(d) with d a
square-free integer), or "numeric" (an isolating box plus the witness
polynomial that pins the root; arithmetic on those is refused rather than
approximated).

Canonical forms
---------------
* Monomial order: graded lexicographic over an ordered variable tuple; the
  *later* a variable appears in the tuple, the more significant it is in the
  lex tie-break.  The default ring is ``("a", "b", "c", "x", "n")``.
* A polynomial is a term map {exponent tuple -> nonzero Fraction}; zero
  coefficients are never stored.
* A rational function is a pair num/den with gcd(num, den) = 1, den having
  integer coefficients with content 1 and positive leading coefficient.

The elimination routine projects a polynomial system onto one variable with
iterated pseudo-remainder resultants.  Its output may have extraneous roots
(callers filter by exact back-substitution) but never misses a projected
root: every step multiplies dropped contents back in, which keeps the
vanishing set a superset of the true projection.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd as _igcd

RING = ("a", "b", "c", "x", "n")

_F0 = Fraction(0)
_F1 = Fraction(1)


class ExactError(ValueError):
    """Raised when an operation would leave the supported exact domain."""


class UnderdeterminedError(ExactError):
    """Raised when elimination collapses to the zero polynomial."""


def _fr(v):
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    raise TypeError("expected int or Fraction, got %r" % (v,))


# ---------------------------------------------------------------------------
# polynomials


class Poly:
    """Sparse multivariate polynomial over Q with a fixed variable tuple."""

    __slots__ = ("vars", "terms")

    def __init__(self, vars, terms):
        self.vars = tuple(vars)
        # do not store zero coefficients
        self.terms = {e: c for e, c in terms.items() if c}

    # -- constructors ------------------------------------------------------

    @staticmethod
    def const(value, vars=RING):
        value = _fr(value)
        z = (0,) * len(vars)
        return Poly(vars, {z: value} if value else {})

    @staticmethod
    def var(name, vars=RING):
        i = vars.index(name)
        e = tuple(1 if j == i else 0 for j in range(len(vars)))
        return Poly(vars, {e: _F1})

    @staticmethod
    def affine(coeffs, const, vars=RING):
        """Linear polynomial sum(coeffs[v] * v) + const."""
        p = Poly.const(const, vars)
        for name, c in coeffs.items():
            p = p + Poly.var(name, vars) * _fr(c)
        return p

    # -- basic structure ---------------------------------------------------

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return all(not any(e) for e in self.terms)

    def const_value(self):
        if not self.terms:
            return _F0
        z = (0,) * len(self.vars)
        if set(self.terms) != {z}:
            raise ExactError("polynomial is not constant")
        return self.terms[z]

    def degree(self, name):
        i = self.vars.index(name)
        return max((e[i] for e in self.terms), default=-1)

    def total_degree(self):
        return max((sum(e) for e in self.terms), default=-1)

    def uses(self, name):
        return self.degree(name) > 0

    def present_vars(self):
        out = []
        for i, v in enumerate(self.vars):
            if any(e[i] for e in self.terms):
                out.append(v)
        return out

    @staticmethod
    def _order_key(e):
        # graded lex; later variables in the tuple are more significant
        return (sum(e), tuple(reversed(e)))

    def leading_term(self):
        if not self.terms:
            raise ExactError("zero polynomial has no leading term")
        e = max(self.terms, key=Poly._order_key)
        return e, self.terms[e]

    def integer_content(self):
        """Positive Fraction g with self/g integer-coefficient, content 1."""
        if not self.terms:
            return _F1
        num = 0
        den = 1
        for c in self.terms.values():
            num = _igcd(num, c.numerator)
            den = den * c.denominator // _igcd(den, c.denominator)
        return Fraction(num, den)

    # -- arithmetic --------------------------------------------------------

    def _check(self, other):
        if self.vars != other.vars:
            raise ExactError("mixed variable rings %r / %r" % (self.vars, other.vars))

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other, self.vars)
        self._check(other)
        t = dict(self.terms)
        for e, c in other.terms.items():
            s = t.get(e, _F0) + c
            if s:
                t[e] = s
            elif e in t:
                del t[e]
        return Poly(self.vars, t)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other, self.vars)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            q = _fr(other)
            if not q:
                return Poly(self.vars, {})
            return Poly(self.vars, {e: c * q for e, c in self.terms.items()})
        self._check(other)
        t = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(i + j for i, j in zip(e1, e2))
                s = t.get(e, _F0) + c1 * c2
                if s:
                    t[e] = s
                elif e in t:
                    del t[e]
        return Poly(self.vars, t)

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            raise ExactError("negative polynomial power")
        out = Poly.const(1, self.vars)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other, self.vars)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.vars == other.vars and self.terms == other.terms

    def __hash__(self):
        return hash((self.vars, frozenset(self.terms.items())))

    # -- views and maps ----------------------------------------------------

    def coeffs_in(self, name):
        """Coefficients [c0, c1, ..., cdeg] of powers of `name`.

        Explicit zero polynomials fill degrees with no terms, so the list
        always has length degree+1 (empty list for the zero polynomial).
        """
        i = self.vars.index(name)
        d = self.degree(name)
        if d < 0:
            if self.is_zero():
                return []
            d = 0
        out = [dict() for _ in range(d + 1)]
        for e, c in self.terms.items():
            re = e[:i] + (0,) + e[i + 1:]
            out[e[i]][re] = c
        return [Poly(self.vars, t) for t in out]

    def subs(self, mapping, target_vars=None):
        """Substitute variables by polynomials (or scalars) simultaneously.

        `mapping` is {name: Poly-in-target-ring | int | Fraction}; variables
        not mentioned must exist in the target ring under the same name.
        """
        tv = tuple(target_vars) if target_vars is not None else self.vars
        images = []
        for name in self.vars:
            if name in mapping:
                img = mapping[name]
                if isinstance(img, (int, Fraction)):
                    img = Poly.const(img, tv)
                if img.vars != tv:
                    raise ExactError("substitution image in wrong ring")
            else:
                img = Poly.var(name, tv)
            images.append(img)
        out = Poly(tv, {})
        pow_cache = [dict() for _ in images]

        def ipow(i, k):
            if k not in pow_cache[i]:
                pow_cache[i][k] = images[i] ** k
            return pow_cache[i][k]

        for e, c in self.terms.items():
            m = Poly.const(c, tv)
            for i, k in enumerate(e):
                if k:
                    m = m * ipow(i, k)
            out = out + m
        return out

    def eval_frac(self, point):
        """Evaluate at {name: Fraction}; all present variables must be bound."""
        total = _F0
        idx = {v: i for i, v in enumerate(self.vars)}
        for e, c in self.terms.items():
            t = c
            for name, val in point.items():
                k = e[idx[name]]
                if k:
                    t *= _fr(val) ** k
            # unbound variables with nonzero exponent are an error
            for i, k in enumerate(e):
                if k and self.vars[i] not in point:
                    raise ExactError("unbound variable %s" % self.vars[i])
            total += t
        return total

    def __repr__(self):
        if not self.terms:
            return "0"
        bits = []
        for e in sorted(self.terms, key=Poly._order_key, reverse=True):
            c = self.terms[e]
            mon = "*".join(
                "%s^%d" % (v, k) if k > 1 else v
                for v, k in zip(self.vars, e)
                if k
            )
            if mon:
                bits.append("%s*%s" % (c, mon) if c != 1 else mon)
            else:
                bits.append(str(c))
        return " + ".join(bits).replace("+ -", "- ")


# ---------------------------------------------------------------------------
# gcd / division / resultants


def div_exact(p, q):
    """Exact polynomial division p/q, or None when q does not divide p."""
    if q.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    if p.is_zero():
        return Poly(p.vars, {})
    p._check(q)
    eq, cq = q.leading_term()
    rem = p
    quo = Poly(p.vars, {})
    while not rem.is_zero():
        er, cr = rem.leading_term()
        de = tuple(i - j for i, j in zip(er, eq))
        if any(d < 0 for d in de):
            return None
        t = Poly(p.vars, {de: cr / cq})
        quo = quo + t
        rem = rem - t * q
    return quo


def _prem(p, q, name):
    """Pseudo-remainder of p by q in `name` (up to a content unit)."""
    dq = q.degree(name)
    lq = q.coeffs_in(name)[dq]
    i = p.vars.index(name)
    r = p
    while not r.is_zero():
        dr = r.degree(name)
        if dr < dq:
            break
        lr = r.coeffs_in(name)[dr]
        shift = tuple(dr - dq if j == i else 0 for j in range(len(p.vars)))
        r = r * lq - q * lr * Poly(p.vars, {shift: _F1})
    return r


def _primitive_in(p, name):
    """(content, primitive part) of p viewed as univariate in `name`."""
    cs = [c for c in p.coeffs_in(name) if not c.is_zero()]
    if not cs:
        return Poly(p.vars, {}), Poly(p.vars, {})
    g = cs[0]
    for c in cs[1:]:
        g = poly_gcd(g, c)
        if g.is_constant():
            break
    g = _unit_normal(g)
    pp = div_exact(p, g)
    return g, pp


def _unit_normal(p):
    """Scale to integer coefficients, content 1, positive leading coeff."""
    if p.is_zero():
        return p
    g = p.integer_content()
    _, lc = p.leading_term()
    if lc < 0:
        g = -g
    return p * (1 / g)


def poly_gcd(p, q):
    """Primitive gcd over Q (unit-normalized; gcd of constants is 1)."""
    if p.is_zero():
        return _unit_normal(q)
    if q.is_zero():
        return _unit_normal(p)
    if p.is_constant() or q.is_constant():
        return Poly.const(1, p.vars)
    common = [v for v in p.present_vars() if v in q.present_vars()]
    if not common:
        return Poly.const(1, p.vars)
    name = common[-1]
    cp, pp = _primitive_in(p, name)
    cq, qq = _primitive_in(q, name)
    cont = poly_gcd(cp, cq)
    if pp.degree(name) < qq.degree(name):
        pp, qq = qq, pp
    while True:
        r = _prem(pp, qq, name)
        if r.is_zero():
            _, g = _primitive_in(qq, name)
            return _unit_normal(cont * g)
        if r.degree(name) == 0:
            return _unit_normal(cont)
        _, r = _primitive_in(r, name)
        pp, qq = qq, r


def elim_resultant(p, q, name):
    """Eliminate `name` from the pair (p, q).

    Returns a polynomial not involving `name` that vanishes wherever p and q
    have a common zero (dropped contents are multiplied back in, so the
    result may gain extraneous factors but never loses projection points).
    Returns the zero polynomial when the pair shares a factor involving
    `name`.
    """
    dp, dq = p.degree(name), q.degree(name)
    if dp == 0 or dq == 0:
        raise ExactError("elim_resultant needs both degrees positive")
    if dp < dq:
        p, q = q, p
    dropped = Poly.const(1, p.vars)
    a, b = p, q
    while True:
        r = _prem(a, b, name)
        if r.is_zero():
            return Poly(p.vars, {})
        if r.degree(name) == 0:
            return _unit_normal(r * dropped)
        c, r = _primitive_in(r, name)
        if not c.is_constant():
            dropped = dropped * c
        a, b = b, r


def eliminate_to_univariate(polys, keep, order=None):
    """Project a polynomial system onto `keep` by iterated resultants.

    Returns a nonzero polynomial in `keep` alone whose root set contains the
    projection of the common zeros.  Raises UnderdeterminedError when the
    system gives no constraint on `keep` (projection is the whole line).
    """
    if not polys:
        raise UnderdeterminedError("empty system constrains nothing: " + keep)
    vars = polys[0].vars
    current = [p for p in polys if not p.is_zero()]
    for p in current:
        if p.is_constant():
            # inconsistent system: empty projection, any nonzero poly is valid
            return Poly.const(1, vars)
    if order is None:
        order = [v for v in reversed(vars) if v != keep]
    for name in order:
        involved = [p for p in current if p.uses(name)]
        passthrough = [p for p in current if not p.uses(name)]
        if not involved:
            continue
        if len(involved) == 1:
            # existentially solvable generically: no constraint carried over
            current = passthrough
            continue
        pivot = min(involved, key=lambda p: (p.degree(name), len(p.terms)))
        new = []
        for p in involved:
            if p is pivot:
                continue
            r = elim_resultant(pivot, p, name)
            if r.is_zero():
                # shared factor: fall back to the gcd's cofactor pair
                g = poly_gcd(pivot, p)
                for cand in (div_exact(pivot, g), div_exact(p, g), g):
                    if cand is not None and cand.uses(name) and cand is not pivot:
                        try:
                            r = elim_resultant(pivot, cand, name)
                        except ExactError:
                            r = Poly(vars, {})
                        if not r.is_zero():
                            break
                else:
                    continue
            if r.is_constant():
                if not r.is_zero():
                    return Poly.const(1, vars)
                continue
            new.append(r)
        current = passthrough
        for r in new:
            if r not in current:
                current.append(r)
    final = [p for p in current if not p.is_zero()]
    if not final:
        raise UnderdeterminedError(
            "system projects onto the whole %s-line (identically zero)" % keep
        )
    g = final[0]
    for p in final[1:]:
        g = poly_gcd(g, p)
    if g.is_constant():
        return Poly.const(1, vars)
    if set(g.present_vars()) - {keep}:
        raise UnderdeterminedError(
            "elimination left foreign variables %r" % (g.present_vars(),)
        )
    return _unit_normal(g)


# ---------------------------------------------------------------------------
# algebraic values


def _squarefree_int(n):
    """(s, d): n = s^2 * d with d square-free (sign stays on d)."""
    if n == 0:
        return 1, 0
    sign = -1 if n < 0 else 1
    n = abs(n)
    s = 1
    d = 1
    f = 2
    while f * f <= n:
        e = 0
        while n % f == 0:
            n //= f
            e += 1
        if e:
            s *= f ** (e // 2)
            if e % 2:
                d *= f
        f += 1 if f == 2 else 2
    d *= n
    return s, sign * d


class AlgebraicValue:
    """Exact number: rational, p + q*sqrt(d), or boxed numeric with witness.

    Arithmetic is closed for rational and same-discriminant quadratic
    values.  Mixing different discriminants, or any arithmetic touching a
    numeric-kind value, raises ExactError: the caller decides whether to
    degrade to floating point explicitly.
    """

    __slots__ = ("kind", "rat", "coef", "disc", "witness", "approx", "radius")

    def __init__(self, kind, rat=_F0, coef=_F0, disc=0, witness=(), approx=0j, radius=0.0):
        self.kind = kind
        self.rat = _fr(rat)
        self.coef = _fr(coef)
        self.disc = int(disc)
        self.witness = tuple(_fr(w) for w in witness)
        self.approx = complex(approx)
        self.radius = float(radius)
        if kind == "quadratic":
            if self.coef == 0 or self.disc in (0, 1):
                raise ExactError("degenerate quadratic value")
        elif kind == "rational":
            pass
        elif kind == "numeric":
            if not self.witness:
                raise ExactError("numeric value needs a witness polynomial")
        else:
            raise ExactError("unknown kind %r" % kind)

    # -- constructors ------------------------------------------------------

    @staticmethod
    def from_rational(v):
        return AlgebraicValue("rational", rat=_fr(v))

    @staticmethod
    def quadratic(p, q, d):
        """p + q*sqrt(d); d is made square-free, q*sqrt-part normalized."""
        p, q = _fr(p), _fr(q)
        s, d = _squarefree_int(d)
        q = q * s
        if d == 0 or q == 0:
            return AlgebraicValue.from_rational(p)
        if d == 1:
            return AlgebraicValue.from_rational(p + q)
        return AlgebraicValue("quadratic", rat=p, coef=q, disc=d)

    @staticmethod
    def boxed(witness, approx, radius):
        return AlgebraicValue("numeric", witness=witness, approx=approx, radius=radius)

    # -- predicates --------------------------------------------------------

    def is_exact(self):
        return self.kind != "numeric"

    def is_zero(self):
        if self.kind == "rational":
            return self.rat == 0
        if self.kind == "quadratic":
            return False  # coef != 0 by construction
        if abs(self.approx) > self.radius:
            return False
        raise ExactError("numeric value straddles zero: indeterminate")

    def equals_rational(self, v):
        v = _fr(v)
        if self.kind == "rational":
            return self.rat == v
        if self.kind == "quadratic":
            return False
        if abs(self.approx - complex(v)) > self.radius:
            return False
        raise ExactError("numeric value straddles %s: indeterminate" % v)

    # -- arithmetic (exact kinds only) -------------------------------------

    def _parts(self, disc):
        if self.kind == "rational":
            return self.rat, _F0
        if self.kind == "quadratic":
            if disc != self.disc:
                raise ExactError("mixing sqrt(%d) with sqrt(%d)" % (self.disc, disc))
            return self.rat, self.coef
        raise ExactError("arithmetic on numeric-kind value")

    def _join_disc(self, other):
        d1 = self.disc if self.kind == "quadratic" else 0
        d2 = other.disc if other.kind == "quadratic" else 0
        if d1 and d2 and d1 != d2:
            raise ExactError("mixing sqrt(%d) with sqrt(%d)" % (d1, d2))
        return d1 or d2

    @staticmethod
    def _make(p, q, d):
        if q == 0 or d == 0:
            return AlgebraicValue.from_rational(p)
        return AlgebraicValue("quadratic", rat=p, coef=q, disc=d)

    def __add__(self, other):
        other = _coerce_alg(other)
        d = self._join_disc(other)
        p1, q1 = self._parts(d)
        p2, q2 = other._parts(d)
        return AlgebraicValue._make(p1 + p2, q1 + q2, d)

    __radd__ = __add__

    def __neg__(self):
        if self.kind == "numeric":
            raise ExactError("arithmetic on numeric-kind value")
        return AlgebraicValue._make(-self.rat, -self.coef, self.disc)

    def __sub__(self, other):
        return self + (-_coerce_alg(other))

    def __rsub__(self, other):
        return _coerce_alg(other) + (-self)

    def __mul__(self, other):
        other = _coerce_alg(other)
        d = self._join_disc(other)
        p1, q1 = self._parts(d)
        p2, q2 = other._parts(d)
        return AlgebraicValue._make(p1 * p2 + q1 * q2 * d, p1 * q2 + q1 * p2, d)

    __rmul__ = __mul__

    def inverse(self):
        if self.kind == "rational":
            if self.rat == 0:
                raise ZeroDivisionError("inverse of zero")
            return AlgebraicValue.from_rational(1 / self.rat)
        if self.kind == "quadratic":
            nrm = self.rat * self.rat - self.coef * self.coef * self.disc
            if nrm == 0:
                raise ZeroDivisionError("inverse of zero norm")
            return AlgebraicValue._make(self.rat / nrm, -self.coef / nrm, self.disc)
        raise ExactError("arithmetic on numeric-kind value")

    def __truediv__(self, other):
        return self * _coerce_alg(other).inverse()

    def __rtruediv__(self, other):
        return _coerce_alg(other) * self.inverse()

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = AlgebraicValue.from_rational(other)
        if not isinstance(other, AlgebraicValue):
            return NotImplemented
        if self.kind == "numeric" or other.kind == "numeric":
            return (
                self.kind == other.kind == "numeric"
                and self.witness == other.witness
                and abs(self.approx - other.approx) <= self.radius + other.radius
            )
        return (
            self.rat == other.rat
            and self.coef == other.coef
            and (self.disc == other.disc or self.coef == 0)
        )

    def __hash__(self):
        if self.kind == "numeric":
            return hash(("numeric", self.witness, round(self.approx.real, 6), round(self.approx.imag, 6)))
        return hash((self.rat, self.coef, self.disc if self.coef else 0))

    def sort_key(self):
        if self.kind == "numeric":
            return (2, self.approx.real, self.approx.imag, 0, 0, 0)
        return (
            0 if self.kind == "rational" else 1,
            float(self.rat),
            float(self.coef),
            self.disc,
            self.rat,
            self.coef,
        )

    def is_real(self):
        if self.kind == "rational":
            return True
        if self.kind == "quadratic":
            return self.disc > 0
        return abs(self.approx.imag) <= self.radius

    def __repr__(self):
        if self.kind == "rational":
            return "Alg(%s)" % self.rat
        if self.kind == "quadratic":
            return "Alg(%s + %s*sqrt(%d))" % (self.rat, self.coef, self.disc)
        return "Alg(~%s in r=%g)" % (self.approx, self.radius)

    # -- serialization (corpus node vocabulary) ----------------------------

    def to_json(self):
        if self.kind == "rational":
            return {"node": "rational", "p": str(self.rat)}
        if self.kind == "quadratic":
            return {
                "node": "algebraic",
                "p": str(self.rat),
                "q": str(self.coef),
                "d": self.disc,
            }
        return {
            "node": "algebraic",
            "witness": [str(w) for w in self.witness],
            "re": repr(self.approx.real),
            "im": repr(self.approx.imag),
            "radius": repr(self.radius),
        }

    @staticmethod
    def from_json(obj):
        if obj["node"] == "rational":
            return AlgebraicValue.from_rational(Fraction(obj["p"]))
        if obj["node"] != "algebraic":
            raise ExactError("not an algebraic node: %r" % (obj,))
        if "witness" in obj:
            return AlgebraicValue.boxed(
                tuple(Fraction(w) for w in obj["witness"]),
                complex(float(obj["re"]), float(obj["im"])),
                float(obj["radius"]),
            )
        return AlgebraicValue.quadratic(Fraction(obj["p"]), Fraction(obj["q"]), obj["d"])


def _coerce_alg(v):
    if isinstance(v, AlgebraicValue):
        return v
    if isinstance(v, (int, Fraction)):
        return AlgebraicValue.from_rational(v)
    raise TypeError("cannot coerce %r to AlgebraicValue" % (v,))


ALG_ZERO = AlgebraicValue.from_rational(0)
ALG_ONE = AlgebraicValue.from_rational(1)


# ---------------------------------------------------------------------------
# rational functions


class RationalFunction:
    """num/den in canonical form (coprime; den integer, content 1, lc > 0)."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, reduce=True):
        # reduce=False is a trusted fast path for callers that have already
        # cancelled every common factor (e.g. products of known linears)
        if den is None:
            den = Poly.const(1, num.vars)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        num._check(den)
        if num.is_zero():
            den = Poly.const(1, num.vars)
        elif reduce:
            g = poly_gcd(num, den)
            if not g.is_constant():
                num = div_exact(num, g)
                den = div_exact(den, g)
        scale = den.integer_content()
        _, lc = den.leading_term()
        if lc < 0:
            scale = -scale
        inv = 1 / scale
        self.num = num * inv
        self.den = den * inv

    @staticmethod
    def const(v, vars=RING):
        return RationalFunction(Poly.const(v, vars))

    @staticmethod
    def of(p):
        return RationalFunction(p)

    def is_zero(self):
        return self.num.is_zero()

    def __add__(self, other):
        other = _coerce_rf(other, self.num.vars)
        return RationalFunction(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other):
        return self + (-_coerce_rf(other, self.num.vars))

    def __rsub__(self, other):
        return _coerce_rf(other, self.num.vars) + (-self)

    def __mul__(self, other):
        other = _coerce_rf(other, self.num.vars)
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce_rf(other, self.num.vars)
        if other.num.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return _coerce_rf(other, self.num.vars) / self

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, Poly)):
            other = _coerce_rf(other, self.num.vars)
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def subs(self, mapping, target_vars=None):
        num = self.num.subs(mapping, target_vars)
        den = self.den.subs(mapping, target_vars)
        return RationalFunction(num, den)

    def derivative(self, name):
        dn = poly_derivative(self.num, name)
        dd = poly_derivative(self.den, name)
        return RationalFunction(dn * self.den - self.num * dd, self.den * self.den)

    def __repr__(self):
        return "(%r) / (%r)" % (self.num, self.den)


def _coerce_rf(v, vars):
    if isinstance(v, RationalFunction):
        return v
    if isinstance(v, Poly):
        return RationalFunction(v)
    if isinstance(v, (int, Fraction)):
        return RationalFunction(Poly.const(v, vars))
    raise TypeError("cannot coerce %r to RationalFunction" % (v,))


def rf_normalize(num, den):
    """Spec-facing constructor: canonical num/den pair."""
    rf = RationalFunction(num, den)
    return rf.num, rf.den


def poly_derivative(p, name):
    i = p.vars.index(name)
    t = {}
    for e, c in p.terms.items():
        if e[i]:
            ne = e[:i] + (e[i] - 1,) + e[i + 1:]
            t[ne] = t.get(ne, _F0) + c * e[i]
    return Poly(p.vars, t)


# ---------------------------------------------------------------------------
# univariate factoring ladder


def _univar_coeffs(p, name):
    """Fraction coefficient list [c0..cd]; p must involve `name` only."""
    if set(p.present_vars()) - {name}:
        raise ExactError("polynomial is not univariate in %s" % name)
    cs = p.coeffs_in(name)
    return [c.const_value() for c in cs]


def _poly_from_coeffs(coeffs, name, vars):
    i = vars.index(name)
    t = {}
    for k, c in enumerate(coeffs):
        c = _fr(c)
        if c:
            e = tuple(k if j == i else 0 for j in range(len(vars)))
            t[e] = c
    return Poly(vars, t)


def _squarefree_part(coeffs):
    """Coefficient list of p / gcd(p, p'), ascending."""
    vars = ("t",)
    p = _poly_from_coeffs(coeffs, "t", vars)
    dp = poly_derivative(p, "t")
    g = poly_gcd(p, dp)
    if g.degree("t") <= 0:
        return list(coeffs)
    return _univar_coeffs(div_exact(p, g), "t")


def _rational_roots(coeffs):
    """Exact rational roots of an integer-coefficient list, found by
    numeric root isolation plus exact verification.

    A rational root missed by the reconstruction bound would simply stay in
    the unsplit remainder (degraded, never wrong).
    """
    import mpmath

    d = len(coeffs) - 1
    roots = []
    # strip x = 0 roots first
    while coeffs and coeffs[0] == 0:
        roots.append(_F0)
        coeffs = coeffs[1:]
    if len(coeffs) <= 1:
        return roots, coeffs
    # repeated roots stall the numeric solver; isolate on the squarefree part
    sf = _squarefree_part(coeffs)
    with mpmath.workdps(60):
        try:
            approx = mpmath.polyroots(
                [mpmath.mpf(c.numerator) / mpmath.mpf(c.denominator) for c in reversed(sf)],
                maxsteps=200,
                extraprec=120,
            )
        except mpmath.libmp.NoConvergence:
            return roots, coeffs
        for r in approx:
            if abs(mpmath.im(r)) > mpmath.mpf(10) ** -30:
                continue
            try:
                cand = Fraction(float(mpmath.re(r))).limit_denominator(10 ** 9)
            except (OverflowError, ValueError):
                continue
            if _eval_coeffs(coeffs, cand) == 0:
                while _eval_coeffs(coeffs, cand) == 0 and len(coeffs) > 1:
                    coeffs = _deflate(coeffs, cand)
                    roots.append(cand)
    return roots, coeffs


def _eval_coeffs(coeffs, v):
    total = _F0
    for c in reversed(coeffs):
        total = total * v + c
    return total


def _deflate(coeffs, root):
    """Synthetic division of an ascending coefficient list by (x - root)."""
    out = [_F0] * (len(coeffs) - 1)
    carry = _F0
    for k in range(len(coeffs) - 1, 0, -1):
        carry = coeffs[k] + carry * root
        out[k - 1] = carry
    if coeffs[0] + carry * root != 0:
        raise ExactError("deflation by non-root")
    return out


def factor_univariate(p, name):
    """Factor a univariate polynomial over Q as far as the exact ladder goes.

    Returns (unit, factors) with factors a list of (Poly, multiplicity,
    roots) where roots is a list of AlgebraicValue (empty for unsplit
    remainders of degree >= 3, whose roots come back boxed in the separate
    numeric sweep).  unit * prod(factor^mult) == p holds bit-exactly.
    """
    vars = p.vars
    if p.is_zero():
        raise ExactError("cannot factor the zero polynomial")
    coeffs = _univar_coeffs(p, name)
    unit = _fr(coeffs[-1])
    monic = [c / unit for c in coeffs]

    # multiplicity split via repeated gcd with the derivative
    factors = []
    work = monic
    while len(work) > 1:
        wpoly = _poly_from_coeffs(work, name, vars)
        dpoly = poly_derivative(wpoly, name)
        g = poly_gcd(wpoly, dpoly)
        sq = div_exact(wpoly, g)  # squarefree part
        sq_coeffs = _univar_coeffs(sq, name)
        lead = sq_coeffs[-1]
        sq_coeffs = [c / lead for c in sq_coeffs]
        factors.append(sq_coeffs)
        work = _univar_coeffs(g, name)
        lead = work[-1]
        work = [c / lead for c in work]

    # factors[i] divides factors[i-1]; convert to (squarefree piece, mult)
    pieces = []
    for i, f in enumerate(factors):
        nxt = factors[i + 1] if i + 1 < len(factors) else [Fraction(1)]
        fp = _poly_from_coeffs(f, name, vars)
        np_ = _poly_from_coeffs(nxt, name, vars)
        piece = div_exact(fp, np_)
        if piece is None:
            raise ExactError("squarefree tower broke")
        if piece.total_degree() > 0:
            pieces.append((piece, i + 1))

    out = []
    for piece, mult in pieces:
        cs = _univar_coeffs(piece, name)
        roots, rest = _rational_roots(list(cs))
        for r in roots:
            lin = _poly_from_coeffs([-r, _F1], name, vars)
            out.append((lin, mult, [AlgebraicValue.from_rational(r)]))
        if len(rest) - 1 == 1:
            r = -rest[0] / rest[1]
            lin = _poly_from_coeffs([-r, _F1], name, vars)
            out.append((lin, mult, [AlgebraicValue.from_rational(r)]))
        elif len(rest) - 1 == 2:
            out.append(_quadratic_piece(rest, mult, name, vars))
        elif len(rest) - 1 == 4:
            split = _quartic_split([c / rest[-1] for c in rest])
            if split is None:
                rem = _poly_from_coeffs([c / rest[-1] for c in rest], name, vars)
                out.append((rem, mult, _boxed_roots([c / rest[-1] for c in rest])))
            else:
                for quad_cs in split:
                    out.append(_quadratic_piece(quad_cs, mult, name, vars))
        elif len(rest) - 1 >= 3:
            lead = rest[-1]
            rem = _poly_from_coeffs([c / lead for c in rest], name, vars)
            out.append((rem, mult, _boxed_roots([c / lead for c in rest])))
    return unit, out


def _quadratic_piece(rest, mult, name, vars):
    c0, c1, c2 = rest
    quad = _poly_from_coeffs([c0 / c2, c1 / c2, _F1], name, vars)
    # roots (-B +- sqrt(B^2-4C))/2 for x^2 + Bx + C
    B, C = c1 / c2, c0 / c2
    disc = B * B - 4 * C
    s, d = _squarefree_int(disc.numerator * disc.denominator)
    rootlist = []
    for sgn in (1, -1):
        rootlist.append(
            AlgebraicValue.quadratic(
                -B / 2, Fraction(sgn * s, 2 * disc.denominator), d
            )
        )
    return (quad, mult, rootlist)


def _sqrt_fraction(v):
    """Exact square root of a nonnegative Fraction, or None."""
    import math

    if v < 0:
        return None
    rn = math.isqrt(v.numerator)
    rd = math.isqrt(v.denominator)
    if rn * rn != v.numerator or rd * rd != v.denominator:
        return None
    return Fraction(rn, rd)


def _quartic_split(cs):
    """Split a monic rational quartic into two monic rational quadratics.

    Searches rational roots y0 of the resolvent cubic; y0 = beta + gamma for
    x^4+p x^3+q x^2+r x+s = (x^2+al x+beta)(x^2+de x+gamma).  Returns a pair
    of coefficient lists [c0, c1, 1] or None when no rational split exists.
    """
    s0, r, q, p, lead = cs
    assert lead == 1
    resolvent = [
        -(p * p * s0 - 4 * q * s0 + r * r),
        p * r - 4 * s0,
        -q,
        Fraction(1),
    ]
    ys, _ = _rational_roots(resolvent)
    seen = set()
    for y0 in ys:
        if y0 in seen:
            continue
        seen.add(y0)
        disc = p * p - 4 * (q - y0)
        root = _sqrt_fraction(disc)
        if root is None:
            continue
        for sgn in (1, -1):
            al = (p + sgn * root) / 2
            de = p - al
            # beta+gamma = y0, al*gamma + de*beta = r, beta*gamma = s0
            if al != de:
                gamma = (r - de * y0) / (al - de)
                beta = y0 - gamma
            else:
                if y0 * y0 - 4 * s0 < 0:
                    continue
                half = _sqrt_fraction(y0 * y0 - 4 * s0)
                if half is None:
                    continue
                beta = (y0 + half) / 2
                gamma = y0 - beta
            if (
                al + de == p
                and beta + gamma + al * de == q
                and al * gamma + de * beta == r
                and beta * gamma == s0
            ):
                return ([beta, al, Fraction(1)], [gamma, de, Fraction(1)])
    return None


def _boxed_roots(coeffs):
    """Isolated numeric roots (witness polynomial kept) for degree >= 3."""
    import mpmath

    with mpmath.workdps(60):
        rts = mpmath.polyroots(
            [mpmath.mpf(c.numerator) / mpmath.mpf(c.denominator) for c in reversed(coeffs)],
            maxsteps=400,
            extraprec=200,
        )
        rts = [complex(r) for r in rts]
    if len(rts) > 1:
        sep = min(
            abs(r1 - r2)
            for i, r1 in enumerate(rts)
            for r2 in rts[i + 1:]
        )
    else:
        sep = 1.0
    rad = max(sep / 10.0, 1e-40)
    return [AlgebraicValue.boxed(tuple(coeffs), r, rad) for r in rts]


def verify_factorization(p, name, unit, factors):
    """Bit-exact reconstruction check used by tests and callers."""
    prod = Poly.const(unit, p.vars)
    for f, mult, _roots in factors:
        prod = prod * f ** mult
    return prod == p


def poly_roots_exact(p, name):
    """All roots of a univariate polynomial as AlgebraicValues."""
    _, factors = factor_univariate(p, name)
    roots = []
    for _f, mult, rts in factors:
        for r in rts:
            roots.extend([r] * mult)
    return roots

"""Arbitrary-precision evaluation engine.

Built directly on mpmath's mpf/mpc arithmetic (the substrate), but the two
special functions that everything hinges on are implemented here from
scratch so they can serve as one leg of dual-route checks:

* ``gamma``   - Spouge's approximation plus reflection, coefficients cached
  per precision, relative error held to ~10^-working.
* ``hyp2f1``  - region dispatch: terminating/truncated sums, the defining
  series for |x| <= 0.7, the x/(x-1) pullback, connection formulas in 1-x,
  1/x, 1/(1-x) and 1-1/x (with two-point averaging across removable
  integer-parameter degeneracies), the x=1 closed form, and a Taylor-step
  ODE continuation fallback for the zone near exp(+-i pi/3) that no
  connection formula reaches.

Branch convention: principal branch everywhere; for real x on the cut
(x > 1) values are the limit from Im x > 0, implemented by an imaginary
nudge far below the reporting precision.

mpmath's own gamma/hyp2f1 are never called here; tests use them as an
independent oracle.  mpmath.quad (tanh-sinh) is used for the Euler-integral
route of ``hyp3f2_unit`` when plain summation cannot reach tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
from mpmath import mpf, mpc

from .exact import AlgebraicValue, ExactError

BigComplex = mpmath.mpc


class NumericsError(ValueError):
    pass


class GammaPoleError(NumericsError):
    pass


class DivergenceError(NumericsError):
    pass


class PrecisionLossError(NumericsError):
    def __init__(self, msg, achieved_digits):
        super().__init__(msg)
        self.achieved_digits = achieved_digits


class OutOfRegionError(NumericsError):
    pass


@dataclass(frozen=True)
class PrecisionContext:
    """Explicit precision state: nothing here reads or mutates globals
    except through mpmath.workdps scopes that restore on exit."""

    working: int = 30
    guard: int = 10
    max_terms: int = 400000

    def __post_init__(self):
        if self.working < 10:
            raise NumericsError("working precision must be at least 10 digits")
        if self.guard < 5:
            raise NumericsError("guard digits must be at least 5")

    @property
    def dps(self):
        return self.working + self.guard

    @property
    def eps(self):
        """Perturbation size for removable integer-parameter degeneracies."""
        return mpf(10) ** (-(self.working // 2))

    @property
    def sum_tol(self):
        return mpf(10) ** (-self.dps)

    @property
    def pass_threshold(self):
        return mpf(10) ** (5 - self.working)


DEFAULT_CTX = PrecisionContext()


# ---------------------------------------------------------------------------
# conversions


def as_mp(v):
    """Convert exact scalars and Python numbers to mpf/mpc losslessly."""
    if isinstance(v, (mpf, mpc)):
        return v
    if isinstance(v, int):
        return mpf(v)
    if isinstance(v, Fraction):
        return mpf(v.numerator) / mpf(v.denominator)
    if isinstance(v, float):
        return mpf(v)
    if isinstance(v, complex):
        return mpc(v.real, v.imag)
    if isinstance(v, AlgebraicValue):
        if v.kind == "rational":
            return as_mp(v.rat)
        if v.kind == "quadratic":
            if v.disc >= 0:
                root = mpmath.sqrt(mpf(v.disc))
            else:
                root = mpc(0, mpmath.sqrt(mpf(-v.disc)))
            return as_mp(v.rat) + as_mp(v.coef) * root
        # numeric kind: polish the boxed root against its witness
        coeffs = [as_mp(c) for c in reversed(v.witness)]
        try:
            return _polish_root(coeffs, v.approx)
        except (ValueError, ZeroDivisionError):
            return mpc(v.approx)
    raise TypeError("cannot convert %r to mp value" % (v,))


def _polish_root(coeffs_desc, approx):
    def f(t):
        return mpmath.polyval(coeffs_desc, t)

    return mpmath.findroot(f, mpc(approx))


def _nearest_int(v, tol):
    """Integer n with |v - n| < tol, else None (complex-safe)."""
    v = as_mp(v)
    re = mpmath.re(v)
    im = mpmath.im(v)
    if abs(im) >= tol:
        return None
    n = int(mpmath.nint(re))
    if abs(re - n) < tol:
        return n
    return None


def _is_real(v):
    return abs(mpmath.im(as_mp(v))) == 0


# ---------------------------------------------------------------------------
# gamma


_SPOUGE_CACHE = {}


def _spouge_coeffs(a, dps):
    key = (a, dps)
    if key not in _SPOUGE_CACHE:
        with mpmath.workdps(dps + 10):
            c = [mpmath.sqrt(2 * mpmath.pi)]
            fact = mpf(1)
            for k in range(1, a):
                ck = ((-1) ** (k - 1)) / fact * mpmath.power(a - k, k - mpf(1) / 2) * mpmath.exp(a - k)
                c.append(ck)
                fact *= k
        _SPOUGE_CACHE[key] = c
    return _SPOUGE_CACHE[key]


def gamma(z, ctx=DEFAULT_CTX):
    """Gamma via Spouge's formula with reflection for Re z < 1/2.

    Relative error is held below ~10^-working.  Exact nonpositive integers
    raise GammaPoleError.
    """
    with mpmath.workdps(ctx.dps + 10):
        z = as_mp(z)
        pole = _nearest_int(z, mpf(10) ** (-(ctx.dps + 5)))
        if pole is not None and pole <= 0:
            raise GammaPoleError("gamma pole at nonpositive integer %d" % pole)
        if mpmath.re(z) < mpf(1) / 2:
            # reflection: gamma(z) gamma(1-z) = pi / sin(pi z)
            s = mpmath.sin(mpmath.pi * z)
            val = mpmath.pi / (s * gamma(1 - z, ctx))
            return +val
        a = int(mpf("1.26") * (ctx.dps + 10)) + 4
        c = _spouge_coeffs(a, ctx.dps)
        w = z - 1
        acc = c[0]
        for k in range(1, a):
            acc += c[k] / (w + k)
        val = mpmath.power(w + a, w + mpf(1) / 2) * mpmath.exp(-(w + a)) * acc
        return +val


def _gamma_ratio(nums, dens, ctx):
    """prod gamma(nums) / prod gamma(dens)."""
    acc = mpf(1)
    for v in nums:
        acc *= gamma(v, ctx)
    for v in dens:
        acc /= gamma(v, ctx)
    return acc


# ---------------------------------------------------------------------------
# 2F1: terminating / truncated sums


def _finite_sum_f21(a, b, c, x, nterms, ctx):
    """sum_{j=0}^{nterms} (a,j)(b,j)/((c,j) j!) x^j with pole checks.

    Integer parameters must arrive snapped to exact mp integers so that a
    vanishing numerator factor zeroes the running term exactly and a
    vanishing denominator factor is seen as a true pole."""
    with mpmath.workdps(ctx.dps + 10):
        a, b, c, x = (as_mp(v) for v in (a, b, c, x))
        total = mpf(1)
        t = mpc(1)
        for j in range(nterms):
            if t == 0:
                break
            cj = c + j
            if cj == 0:
                raise GammaPoleError(
                    "lower-parameter pole inside finite sum at j=%d" % j
                )
            t = t * (a + j) * (b + j) / (cj * (j + 1)) * x
            total += t
        return +total


def hyp2f1_extended(a, b, c, x, ctx=DEFAULT_CTX):
    """Truncated-series value for nonpositive integers a, c with c < a.

    The sum runs to |a| inclusive; the constraint c < a <= 0 keeps every
    denominator factor nonzero up to that point.
    """
    ia = _nearest_int(a, mpf(10) ** (-(ctx.dps)))
    ic = _nearest_int(c, mpf(10) ** (-(ctx.dps)))
    if ia is None or ic is None or ia > 0 or ic >= ia:
        raise NumericsError(
            "extended definition needs integers c < a <= 0, got a=%s c=%s" % (a, c)
        )
    return _finite_sum_f21(ia, b, ic, x, abs(ia), ctx)


# ---------------------------------------------------------------------------
# 2F1: series and connection formulas


def _series_f21(a, b, c, x, ctx, cap=None):
    with mpmath.workdps(ctx.dps + 10):
        a, b, c, x = (as_mp(v) for v in (a, b, c, x))
        tol = ctx.sum_tol
        total = mpc(1)
        t = mpc(1)
        small = 0
        cap = cap or ctx.max_terms
        for j in range(cap):
            cj = c + j
            if cj == 0:
                raise GammaPoleError("lower parameter hits pole at j=%d" % j)
            t = t * (a + j) * (b + j) / (cj * (j + 1)) * x
            total += t
            if abs(t) < tol * max(1, abs(total)):
                small += 1
                if small >= 3:
                    return +total
            else:
                small = 0
        achieved = -mpmath.log10(abs(t) / max(1, abs(total)))
        raise PrecisionLossError(
            "series did not converge within %d terms" % cap, int(achieved)
        )


def _pow_principal(base, expo):
    base = as_mp(base)
    expo = as_mp(expo)
    if base == 0:
        if mpmath.re(expo) > 0:
            return mpf(0)
        raise NumericsError("0 raised to a nonpositive power")
    return mpmath.exp(expo * mpmath.log(base))


def _int_degenerate(v, ctx):
    return _nearest_int(v, mpf(10) ** (-(ctx.working // 2) - 2))


def _richardson(fn, ctx):
    """Average fn(+eps) and fn(-eps) at doubled working precision."""
    hi = PrecisionContext(
        working=2 * ctx.working + 10, guard=ctx.guard, max_terms=ctx.max_terms
    )
    e = ctx.eps
    with mpmath.workdps(hi.dps + 10):
        v = (fn(e, hi) + fn(-e, hi)) / 2
    return v


def _connect_1mx(a, b, c, x, ctx):
    """Connection in powers of 1-x; removable pole when c-a-b is integer."""
    if _int_degenerate(c - a - b, ctx) is not None:
        return _richardson(
            lambda e, hictx: _connect_1mx(a, b, c + e, x, hictx), ctx
        )
    w = 1 - x
    g1 = _gamma_ratio([c, c - a - b], [c - a, c - b], ctx)
    g2 = _gamma_ratio([c, a + b - c], [a, b], ctx)
    f1 = _series_f21(a, b, a + b + 1 - c, w, ctx)
    f2 = _series_f21(c - a, c - b, c - a - b + 1, w, ctx)
    return g1 * f1 + g2 * _pow_principal(w, c - a - b) * f2


def _connect_inv_x(a, b, c, x, ctx):
    """Connection in powers of 1/x; removable pole when a-b is integer."""
    if _int_degenerate(a - b, ctx) is not None:
        return _richardson(
            lambda e, hictx: _connect_inv_x(a + e, b, c, x, hictx), ctx
        )
    w = 1 / x
    g1 = _gamma_ratio([c, b - a], [b, c - a], ctx)
    g2 = _gamma_ratio([c, a - b], [a, c - b], ctx)
    f1 = _series_f21(a, a + 1 - c, a + 1 - b, w, ctx)
    f2 = _series_f21(b, b + 1 - c, b + 1 - a, w, ctx)
    return g1 * _pow_principal(-x, -a) * f1 + g2 * _pow_principal(-x, -b) * f2


def _connect_inv_1mx(a, b, c, x, ctx):
    """Connection in powers of 1/(1-x); removable pole when a-b is integer."""
    if _int_degenerate(a - b, ctx) is not None:
        return _richardson(
            lambda e, hictx: _connect_inv_1mx(a + e, b, c, x, hictx), ctx
        )
    w = 1 / (1 - x)
    g1 = _gamma_ratio([c, b - a], [b, c - a], ctx)
    g2 = _gamma_ratio([c, a - b], [a, c - b], ctx)
    f1 = _series_f21(a, c - b, a - b + 1, w, ctx)
    f2 = _series_f21(b, c - a, b - a + 1, w, ctx)
    return g1 * _pow_principal(1 - x, -a) * f1 + g2 * _pow_principal(1 - x, -b) * f2


def _connect_1m_inv_x(a, b, c, x, ctx):
    """Connection in powers of 1-1/x; removable pole when c-a-b is integer."""
    if _int_degenerate(c - a - b, ctx) is not None:
        return _richardson(
            lambda e, hictx: _connect_1m_inv_x(a, b, c + e, x, hictx), ctx
        )
    w = 1 - 1 / x
    g1 = _gamma_ratio([c, c - a - b], [c - a, c - b], ctx)
    g2 = _gamma_ratio([c, a + b - c], [a, b], ctx)
    f1 = _series_f21(a, a + 1 - c, a + b + 1 - c, w, ctx)
    f2 = _series_f21(c - a, 1 - a, c + 1 - a - b, w, ctx)
    return (
        g1 * _pow_principal(x, -a) * f1
        + g2 * _pow_principal(x, a - c) * _pow_principal(1 - x, c - a - b) * f2
    )


# ---------------------------------------------------------------------------
# 2F1: Taylor-step ODE continuation (also the monodromy oracle)


def _taylor_step(a, b, c, x0, f0, f1, h, ctx):
    """Transport (f, f') from x0 to x0+h with the hypergeometric ODE."""
    A0 = x0 * (1 - x0)
    A1 = 1 - 2 * x0
    B0 = c - (a + b + 1) * x0
    fs = [f0, f1]
    tol = ctx.sum_tol
    F = f0 + f1 * h
    dF = f1
    hp = h
    small = 0
    for j in range(ctx.max_terms):
        f_nxt = -(
            ((A1 * j + B0) * (j + 1)) * fs[j + 1]
            - (j * (j - 1) + (a + b + 1) * j + a * b) * fs[j]
        ) / (A0 * (j + 2) * (j + 1))
        fs.append(f_nxt)
        hp = hp * h
        term = f_nxt * hp
        F += term
        dF += (j + 2) * f_nxt * hp / h
        if abs(term) < tol * max(1, abs(F)):
            small += 1
            if small >= 3:
                return F, dF
        else:
            small = 0
        if j > 5000:
            break
    raise PrecisionLossError("Taylor step failed to converge", ctx.working // 2)


def _segment_clearance(u, v):
    """Distance of segment [u, v] from the singular points 0 and 1."""

    def dist(p):
        d = v - u
        L2 = abs(d) ** 2
        if L2 == 0:
            return abs(p - u)
        t = mpmath.re((p - u) * mpmath.conj(d)) / L2
        t = max(0, min(1, t))
        return abs(p - (u + t * d))

    return min(dist(mpc(0)), dist(mpc(1)))


def ode_transport(a, b, c, path, f0, f1, ctx=DEFAULT_CTX):
    """Analytically continue (f, f') along a piecewise-linear path.

    The path must keep clear of the singular points 0 and 1; steps are
    capped at 0.35 of the local distance to the nearest singularity.
    """
    with mpmath.workdps(ctx.dps + 10):
        a, b, c = (as_mp(v) for v in (a, b, c))
        pos = mpc(path[0])
        f, df = mpc(f0), mpc(f1)
        for target in path[1:]:
            target = mpc(target)
            while abs(target - pos) > 0:
                r = mpf("0.35") * min(abs(pos), abs(pos - 1))
                if r == 0:
                    raise NumericsError("continuation path hit a singular point")
                d = target - pos
                step = d if abs(d) <= r else d / abs(d) * r
                f, df = _taylor_step(a, b, c, pos, f, df, step, ctx)
                pos += step
        return f, df


def _continuation_path(z):
    """Waypoint path from 1/4 to z staying clear of 0 and 1."""
    start = mpc(mpf(1) / 4)
    z = mpc(z)
    if _segment_clearance(start, z) > mpf("0.2"):
        return [start, z]
    lift = mpc(0, mpf("0.85")) if mpmath.im(z) >= 0 else mpc(0, mpf("-0.85"))
    return [start, start + lift, z + lift, z]


def _continuation_f21(a, b, c, x, ctx):
    inner = PrecisionContext(ctx.working + 10, ctx.guard, ctx.max_terms)
    x0 = mpf(1) / 4
    f0 = _series_f21(a, b, c, x0, inner)
    d0 = (
        as_mp(a) * as_mp(b) / as_mp(c)
        * _series_f21(as_mp(a) + 1, as_mp(b) + 1, as_mp(c) + 1, x0, inner)
    )
    f, _df = ode_transport(a, b, c, _continuation_path(x), f0, d0, inner)
    return f


# ---------------------------------------------------------------------------
# 2F1: dispatch


def hyp2f1(a, b, c, x, ctx=DEFAULT_CTX):
    """Gauss hypergeometric function on the principal branch.

    Real x > 1 (the cut) is treated as the limit from Im x > 0.  Terminating
    and truncated cases are summed exactly; other regions dispatch to the
    series, argument pullbacks, connection formulas, or ODE continuation.
    """
    with mpmath.workdps(ctx.dps + 10):
        am, bm, cm, xm = (as_mp(v) for v in (a, b, c, x))
        itol = mpf(10) ** (-(ctx.dps))
        if xm == 0:
            return mpf(1)
        if am == 0 or bm == 0:
            return mpf(1)

        ia = _nearest_int(am, itol)
        ib = _nearest_int(bm, itol)
        ic = _nearest_int(cm, itol)

        # snap near-integer parameters so finite sums see exact zeros
        if ia is not None:
            am = mpf(ia)
        if ib is not None:
            bm = mpf(ib)
        if ic is not None:
            cm = mpf(ic)

        # terminating sums (exact, no branch issues); a pole of the lower
        # parameter before truncation is a genuine error here, the
        # truncated c < a <= 0 reading lives in hyp2f1_extended
        neg_a = ia is not None and ia <= 0
        neg_b = ib is not None and ib <= 0
        neg_c = ic is not None and ic <= 0
        if neg_a or neg_b:
            stop = max(i for i in (ia if neg_a else None, ib if neg_b else None)
                       if i is not None)
            return _finite_sum_f21(am, bm, cm, xm, -stop, ctx)
        if neg_c:
            raise GammaPoleError("2F1 undefined: lower parameter %d" % ic)

        if xm == 1:
            if mpmath.re(cm - am - bm) <= 0:
                raise DivergenceError(
                    "series at x=1 diverges: Re(c-a-b) = %s <= 0"
                    % mpmath.nstr(mpmath.re(cm - am - bm), 8)
                )
            return _gamma_ratio([cm, cm - am - bm], [cm - am, cm - bm], ctx)

        # cut convention: approach real x > 1 from above
        if mpmath.im(xm) == 0 and mpmath.re(xm) > 1:
            xm = mpc(xm, mpf(10) ** (-(ctx.dps + 25)))

        lim = mpf("0.7")
        if abs(xm) <= lim:
            return _series_f21(am, bm, cm, xm, ctx)
        w = xm / (xm - 1)
        if abs(w) <= lim:
            return _pow_principal(1 - xm, -am) * _series_f21(am, cm - bm, cm, w, ctx)
        if abs(1 - xm) <= lim:
            return _connect_1mx(am, bm, cm, xm, ctx)
        if abs(1 / xm) <= lim:
            return _connect_inv_x(am, bm, cm, xm, ctx)
        if abs(1 / (1 - xm)) <= lim:
            return _connect_inv_1mx(am, bm, cm, xm, ctx)
        if abs(1 - 1 / xm) <= lim:
            return _connect_1m_inv_x(am, bm, cm, xm, ctx)
        return _continuation_f21(am, bm, cm, xm, ctx)


_ROUTES = {
    "series": lambda a, b, c, x, ctx: _series_f21(a, b, c, x, ctx),
    "pfaff": lambda a, b, c, x, ctx: _pow_principal(1 - as_mp(x), -as_mp(a))
    * _series_f21(a, as_mp(c) - as_mp(b), c, as_mp(x) / (as_mp(x) - 1), ctx),
    "onemx": _connect_1mx,
    "invx": _connect_inv_x,
    "continuation": _continuation_f21,
}


def hyp2f1_via(route, a, b, c, x, ctx=DEFAULT_CTX):
    """Force a specific evaluation route (dual-route consistency checks)."""
    with mpmath.workdps(ctx.dps + 10):
        return _ROUTES[route](a, b, c, x, ctx)


def hyp2f1_derivative(a, b, c, x, ctx=DEFAULT_CTX):
    """d/dx 2F1: contiguous shift identity, not finite differences."""
    with mpmath.workdps(ctx.dps + 10):
        am, bm, cm = (as_mp(v) for v in (a, b, c))
        return am * bm / cm * hyp2f1(am + 1, bm + 1, cm + 1, x, ctx)


# ---------------------------------------------------------------------------
# 3F2 at unit argument


def hyp3f2_unit(upper, lower, ctx=DEFAULT_CTX):
    """3F2(upper; lower; 1).

    Terminating cases sum exactly.  Otherwise convergence requires
    s = Re(sum(lower) - sum(upper)) > 0; plain summation is used when its
    tail bound can reach tolerance inside the term budget, and the Euler
    beta-integral of a 2F1 kernel (tanh-sinh quadrature) otherwise.
    """
    if len(upper) != 3 or len(lower) != 2:
        raise NumericsError("3F2 takes 3 upper and 2 lower parameters")
    with mpmath.workdps(ctx.dps + 10):
        a1, a2, a3 = (as_mp(v) for v in upper)
        b1, b2 = (as_mp(v) for v in lower)
        itol = mpf(10) ** (-(ctx.dps))
        for bv in (b1, b2):
            ibv = _nearest_int(bv, itol)
            if ibv is not None and ibv <= 0:
                raise GammaPoleError("3F2 lower parameter %d" % ibv)
        ints = [_nearest_int(v, itol) for v in (a1, a2, a3)]
        negs = [i for i in ints if i is not None and i <= 0]
        if negs:
            N = abs(max(negs))
            total = mpf(1)
            t = mpf(1)
            for j in range(N):
                t = t * (a1 + j) * (a2 + j) * (a3 + j) / ((b1 + j) * (b2 + j) * (1 + j))
                total += t
            return +total
        s = mpmath.re(b1 + b2 - a1 - a2 - a3)
        if s <= 0:
            raise DivergenceError("3F2 at 1 diverges: Re(s) = %s <= 0" % mpmath.nstr(s, 8))

        # plain summation when the j^-(s+1) tail can finish in budget
        need = (ctx.dps + 2) / float(s)
        if need < mpmath.log10(ctx.max_terms):
            tol = ctx.sum_tol
            total = mpc(1)
            t = mpc(1)
            for j in range(ctx.max_terms):
                t = t * (a1 + j) * (a2 + j) * (a3 + j) / ((b1 + j) * (b2 + j) * (1 + j))
                total += t
                if j > 4 and abs(t) * (j / s) < tol * abs(total):
                    return +total
            raise PrecisionLossError("3F2 summation exhausted its budget", ctx.working // 2)

        # Euler route: pick an (upper, lower) pair with positive real parts
        pairs = []
        for i, ai in enumerate((a1, a2, a3)):
            for j, bj in enumerate((b1, b2)):
                if mpmath.re(ai) > 0 and mpmath.re(bj - ai) > 0:
                    pairs.append((i, j))
        if not pairs:
            raise PrecisionLossError(
                "no admissible Euler pairing for 3F2 parameters", ctx.working // 2
            )
        i, j = pairs[0]
        return _euler_3f2((a1, a2, a3), (b1, b2), i, j, ctx)


def _euler_3f2(uppers, lowers, i, j, ctx):
    """Beta-kernel integral for 3F2 at 1, folded onto [0, 1/2] twice.

    Tanh-sinh nodes near an endpoint only carry relative accuracy in the
    distance to 0, so the half near t=1 is mirrored (s = 1-t) and the 2F1
    kernel at argument 1-s is expanded through its connection formula as
    explicit power series in s.  That keeps every integrand evaluation
    accurate to working precision right into the singular endpoints.
    """
    ai = uppers[i]
    bj = lowers[j]
    u1, u2 = (v for k, v in enumerate(uppers) if k != i)
    v = next(w for k, w in enumerate(lowers) if k != j)
    deg = _int_degenerate(v - u1 - u2, ctx)
    if deg is not None:
        def shifted(e, hictx):
            lows = list(lowers)
            lows[1 - j] = v + e
            return _euler_3f2(uppers, tuple(lows), i, j, hictx)

        return _richardson(shifted, ctx)
    pref = gamma(bj, ctx) / (gamma(ai, ctx) * gamma(bj - ai, ctx))
    g1 = _gamma_ratio([v, v - u1 - u2], [v - u1, v - u2], ctx)
    g2 = _gamma_ratio([v, u1 + u2 - v], [u1, u2], ctx)

    # substitute t = exp(-w) on each half so the integration variable keeps
    # full relative precision at the singular endpoint
    def f_left(w):
        t = mpmath.exp(-w)
        return (
            mpmath.exp(-ai * w)
            * mpmath.power(1 - t, bj - ai - 1)
            * _series_f21(u1, u2, v, t, ctx)
        )

    def f_right(w):
        s = mpmath.exp(-w)
        kern = g1 * _series_f21(u1, u2, u1 + u2 + 1 - v, s, ctx) + (
            g2
            * mpmath.exp(-(v - u1 - u2) * w)
            * _series_f21(v - u1, v - u2, v - u1 - u2 + 1, s, ctx)
        )
        return mpmath.exp(-(bj - ai) * w) * mpmath.power(1 - s, ai - 1) * kern

    cut = [mpmath.log(2), mpmath.inf]
    val = mpmath.quad(f_left, cut, maxdegree=10) + mpmath.quad(
        f_right, cut, maxdegree=10
    )
    return pref * val


# ---------------------------------------------------------------------------
# Appell F1 on the unit bidisk


def appell_f1(a, b1, b2, c, x, y, ctx=DEFAULT_CTX):
    """F1(a; b1, b2; c; x, y) by row-wise summation over the x-index."""
    with mpmath.workdps(ctx.dps + 10):
        am, b1m, b2m, cm, xm, ym = (as_mp(v) for v in (a, b1, b2, c, x, y))
        if abs(xm) >= 1 or abs(ym) >= 1:
            raise OutOfRegionError(
                "F1 double series needs |x| < 1 and |y| < 1, got |x|=%s |y|=%s"
                % (mpmath.nstr(abs(xm), 6), mpmath.nstr(abs(ym), 6))
            )
        tol = ctx.sum_tol
        total = mpc(0)
        coef = mpc(1)  # (a,m)(b1,m)/((c,m) m!) x^m
        small = 0
        for m in range(ctx.max_terms):
            row = coef * hyp2f1(am + m, b2m, cm + m, ym, ctx)
            total += row
            if abs(row) < tol * max(1, abs(total)):
                small += 1
                if small >= 4:
                    return +total
            else:
                small = 0
            coef = coef * (am + m) * (b1m + m) / ((cm + m) * (1 + m)) * xm
        raise PrecisionLossError("F1 summation exhausted its budget", ctx.working // 2)


# ---------------------------------------------------------------------------
# monodromy


def monodromy_loop_x1(a, b, c, ctx=DEFAULT_CTX):
    """Matrix of the counterclockwise loop around x=1 on the basis
    (F(a,b;c;x), x^{1-c} F(a+1-c,b+1-c;2-c;x)), as a row-vector action."""
    with mpmath.workdps(ctx.dps + 10):
        am, bm, cm = (as_mp(v) for v in (a, b, c))
        p11 = _gamma_ratio([cm, cm - am - bm], [cm - am, cm - bm], ctx)
        p12 = _gamma_ratio([2 - cm, cm - am - bm], [1 - am, 1 - bm], ctx)
        p21 = _gamma_ratio([cm, am + bm - cm], [am, bm], ctx)
        p22 = _gamma_ratio([am + bm - cm, 2 - cm], [am + 1 - cm, bm + 1 - cm], ctx)
        lam = mpmath.exp(2 * mpmath.pi * mpmath.mpc(0, 1) * (cm - am - bm))
        det = p11 * p22 - p12 * p21
        # P^{-1} A P with A = diag(1, lam)
        m11 = (p22 * p11 - p12 * lam * p21) / det
        m12 = (p22 * p12 - p12 * lam * p22) / det
        m21 = (-p21 * p11 + p11 * lam * p21) / det
        m22 = (-p21 * p12 + p11 * lam * p22) / det
        return ((+m11, +m12), (+m21, +m22))


def loop_transport_x1(a, b, c, ctx=DEFAULT_CTX, radius=Fraction(1, 2), points=16):
    """Independent oracle: transport the same basis around the loop with
    Taylor-step ODE continuation and read off the matrix numerically."""
    with mpmath.workdps(ctx.dps + 15):
        am, bm, cm = (as_mp(v) for v in (a, b, c))
        r = as_mp(radius)
        xs = 1 - r
        inner = PrecisionContext(ctx.working + 10, ctx.guard, ctx.max_terms)

        # basis values and derivatives at the start point
        y1 = _series_f21(am, bm, cm, xs, inner)
        dy1 = am * bm / cm * _series_f21(am + 1, bm + 1, cm + 1, xs, inner)
        f5 = _series_f21(am + 1 - cm, bm + 1 - cm, 2 - cm, xs, inner)
        df5 = (
            (am + 1 - cm) * (bm + 1 - cm) / (2 - cm)
            * _series_f21(am + 2 - cm, bm + 2 - cm, 3 - cm, xs, inner)
        )
        y5 = mpmath.power(xs, 1 - cm) * f5
        dy5 = (1 - cm) * mpmath.power(xs, -cm) * f5 + mpmath.power(xs, 1 - cm) * df5

        path = [
            1 + r * mpmath.exp(mpmath.mpc(0, 1) * (mpmath.pi + 2 * mpmath.pi * k / points))
            for k in range(points + 1)
        ]
        e1 = ode_transport(am, bm, cm, path, y1, dy1, inner)
        e5 = ode_transport(am, bm, cm, path, y5, dy5, inner)

        w11, w12 = y1, y5
        w21, w22 = dy1, dy5
        det = w11 * w22 - w12 * w21
        v11, v12 = e1[0], e5[0]
        v21, v22 = e1[1], e5[1]
        # M = W^{-1} V for column-vector (value, derivative) frames gives the
        # row-vector action matrix directly
        m11 = (w22 * v11 - w12 * v21) / det
        m21 = (-w21 * v11 + w11 * v21) / det
        m12 = (w22 * v12 - w12 * v22) / det
        m22 = (-w21 * v12 + w11 * v22) / det
        return ((+m11, +m12), (+m21, +m22))


# ---------------------------------------------------------------------------
# closed-form expression evaluation


def eval_closed_form(expr, bindings, ctx=DEFAULT_CTX):
    """Evaluate a closed-form expression tree (dict or node object).

    Symbols are looked up in `bindings`; Pochhammer counts must evaluate to
    integers; powers are principal-branch.
    """
    if hasattr(expr, "to_json"):
        expr = expr.to_json()
    with mpmath.workdps(ctx.dps + 10):
        return _eval_node(expr, bindings, ctx)


def _eval_node(node, bindings, ctx):
    if isinstance(node, (int, Fraction)):
        return as_mp(node)
    kind = node["node"]
    if kind == "rational":
        return as_mp(Fraction(node["p"]))
    if kind == "algebraic":
        return as_mp(AlgebraicValue.from_json(node))
    if kind == "symbol":
        name = node["name"]
        if name not in bindings:
            raise NumericsError("unbound symbol %r" % name)
        return as_mp(bindings[name])
    if kind == "sum":
        return sum((_eval_node(ch, bindings, ctx) for ch in node["children"]), mpf(0))
    if kind == "product":
        acc = mpf(1)
        for ch in node["children"]:
            acc *= _eval_node(ch, bindings, ctx)
        return acc
    if kind == "power":
        base = _eval_node(node["base"], bindings, ctx)
        expo = _eval_node(node["exponent"], bindings, ctx)
        k = _nearest_int(expo, mpf(10) ** (-(ctx.dps)))
        if k is not None:
            if base == 0 and k <= 0:
                raise NumericsError("0^%d in closed form" % k)
            return mpmath.power(base, k)
        return _pow_principal(base, expo)
    if kind == "Gamma":
        return gamma(_eval_node(node["child"], bindings, ctx), ctx)
    if kind == "Pochhammer":
        shift = _eval_node(node["shift"], bindings, ctx)
        cnt = _eval_node(node["count"], bindings, ctx)
        k = _nearest_int(cnt, mpf(10) ** (-(ctx.dps)))
        if k is None:
            raise NumericsError("Pochhammer count %s is not an integer" % cnt)
        return pochhammer_numeric(shift, k, ctx)
    if kind == "sin":
        return mpmath.sin(_eval_node(node["child"], bindings, ctx))
    if kind == "sqrt_pi":
        return mpmath.sqrt(mpmath.pi)
    raise NumericsError("unknown closed-form node %r" % kind)


def pochhammer_numeric(t, k, ctx=DEFAULT_CTX):
    """(t, k) for integer k (negative k via the reciprocal product)."""
    with mpmath.workdps(ctx.dps + 10):
        t = as_mp(t)
        if k >= 0:
            acc = mpf(1)
            for j in range(k):
                acc *= t + j
            return acc
        acc = mpf(1)
        for j in range(1, -k + 1):
            f = t - j
            if f == 0:
                raise GammaPoleError("Pochhammer reciprocal hit zero factor")
            acc *= f
        return 1 / acc


# ---------------------------------------------------------------------------
# verification report


@dataclass
class VerificationReport:
    label: str
    passed: bool
    residual: float
    digits: int
    samples: int
    notes: list = field(default_factory=list)

    def to_json(self):
        return {
            "label": self.label,
            "passed": self.passed,
            "residual": self.residual,
            "digits": self.digits,
            "samples": self.samples,
            "notes": list(self.notes),
        }


def relative_residual(lhs, rhs):
    return float(abs(lhs - rhs) / max(1, abs(lhs)))

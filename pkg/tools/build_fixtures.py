"""Build the shipped fixture corpus.

Writes src/hypident/data/fixtures.json.  Each entry states one special value
F(upper1, upper2; lower; x) = closed form.  Transcribed entries were entered
by hand from the published tables for the families in question; the one
derived entry is produced by the package's own pipeline and pairs up with
its transcribed twin so the coherence check has something to compare.

Run from the repository root:  python3 tools/build_fixtures.py
"""

import os
import sys
from fractions import Fraction as F

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from hypident import admissible, contiguity, corpus
from hypident.closedform import (
    HypSpec,
    ParamForm,
    canonical,
    cf_alg,
    cf_gamma,
    cf_poch,
    cf_pow,
    cf_prod,
    cf_rat,
    cf_sin,
    cf_sqrt_pi,
    cf_sym,
    degenerate_relations,
    terminating_identities,
)
from hypident.exact import AlgebraicValue

OUT = os.path.join(os.path.dirname(__file__), "..", "src", "hypident", "data", "fixtures.json")


def pf(coeffs=None, const=0):
    return ParamForm.make(coeffs or {}, 0, const)


def alg(p, q, d):
    return AlgebraicValue.quadratic(F(p), F(q), d)


def num(v):
    return AlgebraicValue.from_rational(F(v))


def spec(u1, u2, lo, x, ext=False):
    if not isinstance(x, AlgebraicValue):
        x = num(x)
    return HypSpec(upper1=u1, upper2=u2, lower=lo, argument=x, allow_extended=ext)


def gam(form):
    return cf_gamma(form.to_expr())


def poch(form, count):
    if isinstance(count, str):
        count = cf_sym(count)
    return cf_poch(form.to_expr(), count)


def inv(expr):
    return cf_pow(expr, -1)


def pw(base, expo):
    if not isinstance(base, type(cf_rat(0))):
        base = cf_rat(F(base))
    if isinstance(expo, ParamForm):
        expo = expo.to_expr()
    elif isinstance(expo, (int, F)):
        expo = cf_rat(expo)
    elif isinstance(expo, str):
        expo = cf_sym(expo)
    return cf_pow(base, expo)


def sin_pi(form):
    # sin(form * pi); pi enters as the square of sqrt(pi)
    return cf_sin(cf_prod(form.to_expr(), cf_pow(cf_sqrt_pi(), 2)))


def count(stride):
    return cf_prod(cf_rat(stride), cf_sym("n"))


_QUAD_CACHE = {}


def family(k, l, m, b, c, x):
    """Find the enumerated family matching the stated quadruple."""
    if (k, l, m) not in _QUAD_CACHE:
        _QUAD_CACHE[(k, l, m)] = admissible.admissible_quadruples(k, l, m)[0]
    b_form = admissible.FREE_B if b == "free" else admissible.AffineForm(F(b[0]), F(0), F(b[1]))
    c_form = None if c is None else admissible.AffineForm(F(c[0]), F(0), F(c[1]))
    if not isinstance(x, AlgebraicValue):
        x = num(x)
    for quad in _QUAD_CACHE[(k, l, m)]:
        if quad.b_of_a == b_form and quad.c_of_a == c_form and quad.x == x:
            return quad
    raise SystemExit("no enumerated family matches (%d,%d,%d) %s %s %s" % (k, l, m, b, c, x))


ENTRIES = []


def entry(label, klm, quad, kind, case, indices, lhs, rhs, notes=""):
    if isinstance(quad, dict):
        desc = quad
    else:
        # name the entry after the enumerated family, not a guessed ordinal
        desc = corpus.quad_descriptor(quad)
        label = ("%s %s %s" % (quad.label, kind, case)).strip()
    ENTRIES.append(
        corpus.CorpusEntry(
            label=label,
            klm=klm,
            quadruple=desc,
            kind=kind,
            case={"text": case, "indices": list(indices)},
            lhs=lhs,
            rhs=canonical(rhs),
            branch_notes=notes,
            source="transcribed",
        )
    )


A = {"a": 1}
B = {"b": 1}
C = {"c": 1}
N = {"n": 1}


# -- ladder points on the c axis: the two classical summation formulas ------

free_quad = {
    "a": None,
    "b": {"a": "0", "b": "1", "const": "0"},
    "c": None,
    "x": num(1).to_json(),
}

entry(
    "gauss",
    (0, 0, 1),
    free_quad,
    "transcribed",
    "Re(c - a - b) > 0",
    (),
    spec(pf(A), pf(B), pf(C), 1),
    cf_prod(
        gam(pf(C)),
        gam(pf({"a": -1, "b": -1, "c": 1})),
        inv(gam(pf({"a": -1, "c": 1}))),
        inv(gam(pf({"b": -1, "c": 1}))),
    ),
    notes="series converges only on the stated half plane",
)

entry(
    "chu",
    (0, 1, 1),
    free_quad,
    "transcribed",
    "b = -n",
    ("n",),
    spec(pf(A), pf({"n": -1}), pf(C), 1),
    cf_prod(poch(pf({"a": -1, "c": 1}), "n"), inv(poch(pf(C), "n"))),
)


# -- (1,2,2), base (a, b, 2a, 2) --------------------------------------------

q122 = family(1, 2, 2, "free", (2, 0), 2)

entry(
    "1,2,2-1 v",
    (1, 2, 2),
    q122,
    "v",
    "",
    (),
    spec(pf(A), pf(B), pf({"a": -1, "b": 1}, 1), -1),
    cf_prod(
        pw(2, pf({"a": -2})),
        gam(pf({"a": -1, "b": F(1, 2)}, F(1, 2))),
        gam(pf({"a": -1, "b": 1}, 1)),
        inv(gam(pf({"b": F(1, 2)}, F(1, 2)))),
        inv(gam(pf({"a": -2, "b": 1}, 1))),
    ),
)

entry(
    "1,2,2-1 vii",
    (1, 2, 2),
    q122,
    "vii",
    "",
    (),
    spec(pf(A), pf({"a": -1}, 1), pf({"a": -1, "b": 1}, 1), F(1, 2)),
    cf_prod(
        pw(2, pf({"a": -1})),
        gam(pf({"a": -1, "b": F(1, 2)}, F(1, 2))),
        gam(pf({"a": -1, "b": 1}, 1)),
        inv(gam(pf({"b": F(1, 2)}, F(1, 2)))),
        inv(gam(pf({"a": -2, "b": 1}, 1))),
    ),
)

entry(
    "1,2,2-1 viii",
    (1, 2, 2),
    q122,
    "viii",
    "",
    (),
    spec(pf(B), pf({"a": -2, "b": 1}, 1), pf({"a": -1, "b": 1}, 1), F(1, 2)),
    cf_prod(
        pw(2, pf({"a": -2, "b": 1})),
        gam(pf({"a": -1, "b": F(1, 2)}, F(1, 2))),
        gam(pf({"a": -1, "b": 1}, 1)),
        inv(gam(pf({"b": F(1, 2)}, F(1, 2)))),
        inv(gam(pf({"a": -2, "b": 1}, 1))),
    ),
)

entry(
    "1,2,2-1 i a=-1-n",
    (1, 2, 2),
    q122,
    "i",
    "a=-1-n",
    ("n",),
    spec(pf({"n": -1}, -1), pf(B), pf({"n": -2}, -2), 2, ext=True),
    cf_prod(
        pf({"b": 1, "n": 2}, 1).to_expr(),
        poch(pf({"b": F(1, 2)}, F(1, 2)), "n"),
        inv(poch(pf({}, F(3, 2)), "n")),
    ),
    notes="upper and lower entries are nonpositive integers; extended sum",
)

entry(
    "1,2,2-1 i b=-2n",
    (1, 2, 2),
    q122,
    "i",
    "b=-2*n",
    ("n",),
    spec(pf(A), pf({"n": -2}), pf({"a": 2}), 2, ext=True),
    cf_prod(poch(pf({}, F(1, 2)), "n"), inv(poch(pf(A, F(1, 2)), "n"))),
)

entry(
    "1,2,2-1 v a=n1+2 b=-2n2",
    (1, 2, 2),
    q122,
    "v",
    "a=n1+2, b=-2*n2",
    ("n1", "n2"),
    spec(pf({"n1": 1}, 2), pf({"n2": -2}), pf({"n1": -1, "n2": -2}, -1), -1, ext=True),
    cf_prod(
        poch(pf({}, F(1, 2)), "n2"),
        poch(pf({"n1": 1}, 2), "n2"),
        inv(poch(pf({"n1": F(1, 2)}, 1), "n2")),
        inv(poch(pf({"n1": F(1, 2)}, F(3, 2)), "n2")),
    ),
)

entry(
    "1,2,2-1 v a=n1+2 b=-2n2-1",
    (1, 2, 2),
    q122,
    "v",
    "a=n1+2, b=-2*n2-1",
    ("n1", "n2"),
    spec(pf({"n1": 1}, 2), pf({"n2": -2}, -1), pf({"n1": -1, "n2": -2}, -2), -1, ext=True),
    cf_rat(0),
)

entry(
    "1,2,2-1 vii a=n1+1 b=-n2-1",
    (1, 2, 2),
    q122,
    "vii",
    "a=n1+1, b=-n2-1",
    ("n1", "n2"),
    spec(pf({"n1": 1}, 1), pf({"n1": -1}), pf({"n1": -1, "n2": -1}, -1), F(1, 2), ext=True),
    cf_prod(
        poch(pf({"n1": 1, "n2": 1}, 2), "n1"),
        inv(pw(2, pf({"n1": 1}))),
        inv(poch(pf({"n2": F(1, 2)}, 1), "n1")),
    ),
)


# -- (1,3,2), base (a, 3a-1, 2a, (1 -/+ sqrt(-3))/2) ------------------------

q132m = family(1, 3, 2, (3, -1), (2, 0), alg(F(1, 2), F(-1, 2), -3))
q132p = family(1, 3, 2, (3, -1), (2, 0), alg(F(1, 2), F(1, 2), -3))

entry(
    "1,3,2-2 i a=-1-n",
    (1, 3, 2),
    q132p,
    "i",
    "a=-1-n",
    ("n",),
    spec(pf({"n": -1}, -1), pf({"n": -3}, -4), pf({"n": -2}, -2), alg(F(1, 2), F(1, 2), -3), ext=True),
    cf_prod(
        pw(cf_alg(alg(0, -1, -1)), pf(N, 1)),
        pw(3, pf({"n": F(3, 2)}, F(1, 2))),
        poch(pf({}, F(5, 3)), "n"),
        inv(pw(2, pf({"n": 2}))),
        inv(poch(pf({}, F(3, 2)), "n")),
    ),
    notes="argument above the real axis; extended sum",
)

entry(
    "1,3,2-1 i a=-1-n",
    (1, 3, 2),
    q132m,
    "i",
    "a=-1-n",
    ("n",),
    spec(pf({"n": -1}, -1), pf({"n": -3}, -4), pf({"n": -2}, -2), alg(F(1, 2), F(-1, 2), -3), ext=True),
    cf_prod(
        pw(cf_alg(alg(0, 1, -1)), pf(N, 1)),
        pw(3, pf({"n": F(3, 2)}, F(1, 2))),
        poch(pf({}, F(5, 3)), "n"),
        inv(pw(2, pf({"n": 2}))),
        inv(poch(pf({}, F(3, 2)), "n")),
    ),
    notes="argument below the real axis; extended sum",
)


# -- (1,2,3), base (a, 2a-1/3, 3a, 9) ---------------------------------------

q123 = family(1, 2, 3, (2, F(-1, 3)), (3, 0), 9)

entry(
    "1,2,3-1 vii",
    (1, 2, 3),
    q123,
    "vii",
    "",
    (),
    spec(pf(A), pf({"a": -2}, 1), pf({}, F(2, 3)), F(8, 9)),
    cf_prod(cf_rat(2), pw(3, pf({"a": -1})), sin_pi(pf({"a": -1}, F(5, 6)))),
)

entry(
    "1,2,3-1 ix",
    (1, 2, 3),
    q123,
    "ix",
    "",
    (),
    spec(pf(A), pf({"a": -2}, 1), pf({"a": -1}, F(4, 3)), F(1, 9)),
    cf_prod(
        pw(3, pf({"a": -1})),
        cf_sqrt_pi(),
        gam(pf({"a": -1}, F(4, 3))),
        inv(pw(2, pf({"a": -2}, F(1, 3)))),
        inv(gam(pf({}, F(2, 3)))),
        inv(gam(pf({"a": -1}, F(7, 6)))),
    ),
)

entry(
    "1,2,3-1 x",
    (1, 2, 3),
    q123,
    "x",
    "",
    (),
    spec(pf({"a": -2}, F(4, 3)), pf(A, F(1, 3)), pf({"a": -1}, F(4, 3)), F(1, 9)),
    cf_prod(
        pw(3, pf({"a": -1}, F(2, 3))),
        cf_sqrt_pi(),
        gam(pf({"a": -1}, F(4, 3))),
        inv(pw(2, pf({"a": -2}, F(4, 3)))),
        inv(gam(pf({}, F(2, 3)))),
        inv(gam(pf({"a": -1}, F(7, 6)))),
    ),
)

entry(
    "1,2,3-1 xxiii",
    (1, 2, 3),
    q123,
    "xxiii",
    "",
    (),
    spec(pf({"a": 2}), pf({"a": -1}, 1), pf({}, F(4, 3)), F(8, 9)),
    cf_prod(
        pw(3, pf(A, -1)),
        cf_sqrt_pi(),
        gam(pf({}, F(1, 6))),
        inv(cf_rat(2)),
        inv(gam(pf({"a": -1}, F(7, 6)))),
        inv(gam(pf(A, F(1, 2)))),
    ),
)

entry(
    "1,2,3-1 v a=-n",
    (1, 2, 3),
    q123,
    "v",
    "a=-n",
    ("n",),
    spec(pf({"n": -1}), pf({"n": -2}, F(-1, 3)), pf({}, F(2, 3)), -8),
    pw(-3, count(3)),
)


# -- (1,3,3), base (a, 3a-1/2, 3a, -3) --------------------------------------

q133 = family(1, 3, 3, (3, F(-1, 2)), (3, 0), -3)
q133_3 = family(1, 3, 3, (3, 1), (3, 0), F(3, 2))

entry(
    "1,3,3-1 iii",
    (1, 3, 3),
    q133,
    "iii",
    "",
    (),
    spec(pf({}, F(1, 2)), pf(A), pf({"a": 3}), F(3, 4)),
    cf_prod(
        cf_alg(alg(0, F(2, 3), 3)),
        gam(pf(A, F(1, 3))),
        gam(pf(A, F(2, 3))),
        inv(pw(gam(pf(A, F(1, 2))), 2)),
    ),
)

entry(
    "1,3,3-1 ix",
    (1, 3, 3),
    q133,
    "ix",
    "",
    (),
    spec(pf(A), pf({"a": -2}, 1), pf({"a": -2}, F(3, 2)), F(-1, 3)),
    cf_prod(
        pw(2, pf({"a": -2}, F(3, 2))),
        gam(pf({"a": -1}, F(5, 4))),
        gam(pf({"a": -1}, F(3, 4))),
        inv(pw(3, pf({"a": -1}, 1))),
        inv(gam(pf({"a": -1}, F(7, 6)))),
        inv(gam(pf({"a": -1}, F(5, 6)))),
    ),
)

entry(
    "1,3,3-1 xi",
    (1, 3, 3),
    q133,
    "xi",
    "",
    (),
    spec(pf({}, F(1, 2)), pf(A), pf({"a": -2}, F(3, 2)), F(1, 4)),
    cf_prod(
        cf_alg(alg(0, 2, 2)),
        gam(pf({"a": -1}, F(5, 4))),
        gam(pf({"a": -1}, F(3, 4))),
        inv(cf_rat(3)),
        inv(gam(pf({"a": -1}, F(7, 6)))),
        inv(gam(pf({"a": -1}, F(5, 6)))),
    ),
)

entry(
    "1,3,3-1 xiii",
    (1, 3, 3),
    q133,
    "xiii",
    "",
    (),
    spec(pf({}, F(1, 2)), pf({"a": 3}, F(-1, 2)), pf({"a": 2}, F(1, 2)), F(-1, 3)),
    cf_prod(
        pw(2, pf({"a": -2}, 1)),
        cf_sqrt_pi(),
        gam(pf({"a": 2}, F(1, 2))),
        cf_alg(alg(0, F(1, 3), 3)),
        inv(pw(gam(pf(A, F(1, 2))), 2)),
    ),
)

entry(
    "1,3,3-1 v a=-n",
    (1, 3, 3),
    q133,
    "v",
    "a=-n",
    ("n",),
    spec(pf({"n": -1}), pf({"n": -3}, F(-1, 2)), pf({"n": -1}, F(1, 2)), 4),
    pw(-3, count(3)),
)

entry(
    "1,3,3-1 vii a=-n",
    (1, 3, 3),
    q133,
    "vii",
    "a=-n",
    ("n",),
    spec(pf({"n": -1}), pf({"n": 2}, 1), pf({"n": -1}, F(1, 2)), F(4, 3)),
    pw(3, count(2)),
)

entry(
    "1,3,3-3 viii",
    (1, 3, 3),
    q133_3,
    "viii",
    "",
    (),
    spec(pf({}, 2), pf({"b": 6}), pf({"b": 2}, F(5, 3)), F(1, 3)),
    pf({"b": 3}, 1).to_expr(),
    notes="also the second one-variable shadow of the two-variable fusion",
)

entry(
    "1,3,3-1 xix",
    (1, 3, 3),
    q133,
    "xix",
    "",
    (),
    spec(pf({"a": 3}), pf({"a": 2}), pf({"a": 3}, F(1, 2)), F(3, 4)),
    cf_prod(
        pw(2, pf({"a": 4})),
        gam(pf(A, F(1, 6))),
        gam(pf(A, F(5, 6))),
        cf_alg(alg(0, F(1, 3), 3)),
        inv(gam(pf(A, F(1, 3)))),
        inv(gam(pf(A, F(2, 3)))),
    ),
    notes="upper shadow of the two-variable fusion; a avoids -3/2 - integers",
)

entry(
    "1,3,3-1 xii",
    (1, 3, 3),
    q133,
    "xii",
    "",
    (),
    spec(pf({"a": 3}), pf({"a": 2}), pf({"a": 2}, F(1, 2)), F(1, 4)),
    cf_prod(
        pw(2, pf({"a": 4}, 1)),
        cf_sqrt_pi(),
        gam(pf({"a": 2}, F(1, 2))),
        inv(pw(3, pf({"a": 3}, F(1, 2)))),
        inv(gam(pf(A, F(1, 3)))),
        inv(gam(pf(A, F(2, 3)))),
    ),
    notes="lower shadow of the two-variable fusion",
)


# -- (1,4,3), base (a, 4a-1/2, 3a, -1) --------------------------------------

q143 = family(1, 4, 3, (4, F(-1, 2)), (3, 0), -1)

entry(
    "1,4,3-2 i",
    (1, 4, 3),
    q143,
    "i",
    "",
    (),
    spec(pf(A), pf({"a": 4}, F(-1, 2)), pf({"a": 3}), -1),
    cf_prod(
        pw(2, pf({"a": -6}, F(3, 4))),
        cf_sqrt_pi(),
        gam(pf({}, F(3, 4))),
        gam(pf(A, F(1, 3))),
        gam(pf(A, F(2, 3))),
        inv(pw(3, pf({"a": -3}, F(3, 8)))),
        inv(gam(pf({}, F(11, 24)))),
        inv(gam(pf({}, F(19, 24)))),
        inv(gam(pf(A, F(3, 8)))),
        inv(gam(pf(A, F(5, 8)))),
    ),
)

entry(
    "1,4,3-2 i a=-1-n",
    (1, 4, 3),
    q143,
    "i",
    "a=-1-n",
    ("n",),
    spec(pf({"n": -1}, -1), pf({"n": -4}, F(-9, 2)), pf({"n": -3}, -3), -1, ext=True),
    cf_prod(
        cf_rat(5),
        pw(2, pf({"n": 6}, -1)),
        poch(pf({}, F(13, 8)), "n"),
        poch(pf({}, F(11, 8)), "n"),
        inv(pw(3, count(3))),
        inv(poch(pf({}, F(5, 3)), "n")),
        inv(poch(pf({}, F(4, 3)), "n")),
    ),
    notes="upper and lower entries are nonpositive integers; extended sum",
)


# -- (1,3,4), base (a, 3a-1/2, 4a, -8) --------------------------------------

q134 = family(1, 3, 4, (3, F(-1, 2)), (4, 0), -8)

entry(
    "1,3,4-3 xi",
    (1, 3, 4),
    q134,
    "xi",
    "",
    (),
    spec(pf(A), pf(A, F(1, 2)), pf({"a": -2}, F(3, 2)), F(1, 9)),
    cf_prod(
        pw(2, pf({"a": -6}, 1)),
        cf_sqrt_pi(),
        gam(pf({"a": -2}, F(3, 2))),
        inv(pw(3, pf({"a": -5}, 1))),
        inv(gam(pf({"a": -1}, F(7, 6)))),
        inv(gam(pf({"a": -1}, F(5, 6)))),
    ),
)

entry(
    "1,3,4-3 xii",
    (1, 3, 4),
    q134,
    "xii",
    "",
    (),
    spec(pf({"a": -3}, 1), pf({"a": -3}, F(3, 2)), pf({"a": -2}, F(3, 2)), F(1, 9)),
    cf_prod(
        pw(F(4, 3), pf({"a": 3}, -1)),
        cf_sqrt_pi(),
        gam(pf({"a": -2}, F(3, 2))),
        inv(gam(pf({"a": -1}, F(7, 6)))),
        inv(gam(pf({"a": -1}, F(5, 6)))),
    ),
)


# -- (2,4,4), base (a, 2a-1/2, 2a, -2+2*sqrt(2)) ----------------------------

q244 = family(2, 4, 4, (2, F(-1, 2)), (2, 0), alg(-2, 2, 2))

entry(
    "2,4,4-2 v",
    (2, 4, 4),
    q244,
    "v",
    "",
    (),
    spec(pf(A), pf({"a": 2}, F(-1, 2)), pf(A, F(1, 2)), alg(3, -2, 2)),
    cf_prod(
        pw(2, pf({"a": -3}, F(3, 4))),
        pw(cf_alg(alg(-1, 1, 2)), pf({"a": -2}, F(1, 2))),
        cf_sqrt_pi(),
        gam(pf(A, F(1, 2))),
        inv(gam(pf({"a": F(1, 2)}, F(3, 8)))),
        inv(gam(pf({"a": F(1, 2)}, F(5, 8)))),
    ),
)

entry(
    "2,4,4-2 vii",
    (2, 4, 4),
    q244,
    "vii",
    "",
    (),
    spec(pf(A), pf({"a": -1}, 1), pf(A, F(1, 2)), alg(F(1, 2), F(-1, 2), 2)),
    cf_prod(
        pw(2, pf({"a": -2}, F(3, 4))),
        pw(cf_alg(alg(-1, 1, 2)), pf({"a": -1}, F(1, 2))),
        cf_sqrt_pi(),
        gam(pf(A, F(1, 2))),
        inv(gam(pf({"a": F(1, 2)}, F(3, 8)))),
        inv(gam(pf({"a": F(1, 2)}, F(5, 8)))),
    ),
)


# -- (2,5,4), base (a, 5a/2-1, 2a, (-1+sqrt(5))/2) --------------------------

q254 = family(2, 5, 4, (F(5, 2), -1), (2, 0), alg(F(-1, 2), F(1, 2), 5))

entry(
    "2,5,4-1 ii",
    (2, 5, 4),
    q254,
    "ii",
    "",
    (),
    spec(pf(A), pf({"a": F(-1, 2)}, 1), pf({"a": 2}), alg(F(-1, 2), F(1, 2), 5)),
    cf_prod(
        pw(5, pf({"a": F(-5, 4)}, F(1, 2))),
        pw(cf_alg(alg(-1, 1, 5)), pf({"a": F(1, 2)}, -1)),
        pw(2, pf({"a": F(3, 2)}, F(1, 5))),
        gam(pf({}, F(3, 5))),
        gam(pf({}, F(4, 5))),
        gam(pf(A, F(1, 2))),
        inv(gam(pf({}, F(9, 10)))),
        inv(gam(pf({"a": F(1, 2)}, F(2, 5)))),
        inv(gam(pf({"a": F(1, 2)}, F(3, 5)))),
    ),
)


# -- (1,5,5), base (a, 5a+1, 5a, 5/4) ---------------------------------------

q155 = family(1, 5, 5, (5, 1), (5, 0), F(5, 4))

entry(
    "1,5,5-2 v",
    (1, 5, 5),
    q155,
    "v",
    "",
    (),
    spec(pf(A), pf({"a": 5}, 1), pf(A, 2), F(-1, 4)),
    cf_prod(pw(2, pf({"a": 10})), pw(5, pf({"a": -5})), pf(A, 1).to_expr()),
)

entry(
    "1,5,5-2 vii",
    (1, 5, 5),
    q155,
    "vii",
    "",
    (),
    spec(pf(A), pf({"a": -4}, 1), pf(A, 2), F(1, 5)),
    cf_prod(pw(2, pf({"a": 8})), pw(5, pf({"a": -4})), pf(A, 1).to_expr()),
)

entry(
    "1,5,5-2 i a=-1/5-n",
    (1, 5, 5),
    q155,
    "i",
    "a=-1/5-n",
    ("n",),
    spec(pf({"n": -1}, F(-1, 5)), pf({"n": -5}), pf({"n": -5}, -1), F(5, 4)),
    cf_prod(
        pw(-5, count(5)),
        poch(pf({}, F(1, 5)), "n"),
        poch(pf({}, F(9, 5)), count(4)),
        inv(pw(2, count(10))),
        inv(poch(pf({}, 2), count(5))),
    ),
)


# -- (1,5,6), base (a, 5a-1/2, 6a, -4) --------------------------------------

q156 = family(1, 5, 6, (5, F(-1, 2)), (6, 0), -4)

entry(
    "1,5,6-1 xi",
    (1, 5, 6),
    q156,
    "xi",
    "",
    (),
    spec(pf(A), pf(A, F(1, 2)), pf({"a": -4}, F(3, 2)), F(1, 5)),
    cf_prod(
        pw(5, pf({"a": 6})),
        gam(pf({}, F(4, 5))),
        gam(pf({}, F(6, 5))),
        gam(pf({"a": -4}, F(3, 2))),
        inv(pw(2, pf({"a": 10}))),
        inv(gam(pf({}, F(3, 2)))),
        inv(gam(pf({"a": -2}, F(4, 5)))),
        inv(gam(pf({"a": -2}, F(6, 5)))),
    ),
)

entry(
    "1,5,6-1 xvi",
    (1, 5, 6),
    q156,
    "xvi",
    "",
    (),
    spec(pf({"a": -1}, 1), pf({"a": -1}, F(1, 2)), pf({"a": 4}, F(1, 2)), F(1, 5)),
    cf_prod(
        pw(2, pf({"a": 10}, -5)),
        gam(pf({}, F(7, 5))),
        gam(pf({}, F(8, 5))),
        gam(pf({"a": 4}, F(1, 2))),
        inv(pw(5, pf({"a": 6}, -3))),
        inv(gam(pf({}, F(5, 2)))),
        inv(gam(pf({"a": 2}, F(2, 5)))),
        inv(gam(pf({"a": 2}, F(3, 5)))),
    ),
)


# -- (1,6,6), base (a, 6a+1, 6a, 6/5) ---------------------------------------

q166 = family(1, 6, 6, (6, 1), (6, 0), F(6, 5))

entry(
    "1,6,6-1 i a=-1/6-n",
    (1, 6, 6),
    q166,
    "i",
    "a=-1/6-n",
    ("n",),
    spec(pf({"n": -1}, F(-1, 6)), pf({"n": -6}), pf({"n": -6}, -1), F(6, 5)),
    cf_prod(
        pw(-1, "n"),
        pw(2, count(6)),
        pw(3, count(6)),
        poch(pf({}, F(1, 6)), "n"),
        poch(pf({}, F(11, 6)), count(5)),
        inv(pw(5, count(6))),
        inv(poch(pf({}, 2), count(6))),
    ),
)

entry(
    "1,6,6-1 i a=-1/3-n",
    (1, 6, 6),
    q166,
    "i",
    "a=-1/3-n",
    ("n",),
    spec(pf({"n": -1}, F(-1, 3)), pf({"n": -6}, -1), pf({"n": -6}, -2), F(6, 5)),
    cf_prod(
        pw(-1, "n"),
        pw(2, pf({"n": 6}, 2)),
        pw(3, count(6)),
        poch(pf({}, F(1, 3)), "n"),
        poch(pf({}, F(8, 3)), count(5)),
        inv(pw(5, pf({"n": 6}, 1))),
        inv(poch(pf({}, 3), count(6))),
    ),
)


# -- (3,3,6), base (a, a-1/2, 2a, 4) and its x=4 partners -------------------

q336 = family(3, 3, 6, (1, F(-1, 2)), (2, 0), 4)

entry(
    "3,3,6 vii",
    (3, 3, 6),
    q336,
    "vii",
    "",
    (),
    spec(pf(A), pf({"a": -1}, 1), pf({}, F(1, 2)), F(3, 4)),
    cf_prod(cf_rat(2), sin_pi(pf({"a": F(2, 3)}, F(1, 6)))),
)

entry(
    "3,3,6 ix",
    (3, 3, 6),
    q336,
    "ix",
    "",
    (),
    spec(pf(A), pf({"a": -1}, 1), pf({}, F(3, 2)), F(1, 4)),
    cf_prod(
        cf_rat(2),
        sin_pi(pf({"a": F(1, 3)}, F(-1, 6))),
        inv(pf({"a": 2}, -1).to_expr()),
    ),
)

entry(
    "3,3,6 v a=-3n",
    (3, 3, 6),
    q336,
    "v",
    "a=-3*n",
    ("n",),
    spec(pf({"n": -3}), pf({"n": -3}, F(-1, 2)), pf({}, F(1, 2)), -3),
    pw(2, count(6)),
)


# -- (2,4,6), base (a, 2a-1/3, 3a, -9+6*sqrt(3)) ----------------------------

q246 = family(2, 4, 6, (2, F(-1, 3)), (3, 0), alg(-9, 6, 3))

entry(
    "2,4,6-6 v",
    (2, 4, 6),
    q246,
    "v",
    "",
    (),
    spec(pf(A), pf({"a": 2}, F(-1, 3)), pf({}, F(2, 3)), alg(10, -6, 3)),
    cf_prod(
        pw(3, pf({"a": F(-9, 4)}, F(3, 8))),
        pw(cf_alg(alg(-1, 1, 3)), pf({"a": -3}, F(1, 2))),
        cf_sqrt_pi(),
        gam(pf({}, F(2, 3))),
        inv(pw(2, pf({"a": F(-3, 2)}, F(1, 4)))),
        inv(gam(pf({"a": F(-1, 2)}, F(3, 4)))),
        inv(gam(pf({"a": F(1, 2)}, F(5, 12)))),
    ),
)

entry(
    "2,4,6-6 vii",
    (2, 4, 6),
    q246,
    "vii",
    "",
    (),
    spec(pf(A), pf({"a": -2}, 1), pf({}, F(2, 3)), alg(F(2, 3), F(-2, 9), 3)),
    cf_prod(
        pw(3, pf({"a": F(-3, 4)}, F(3, 8))),
        pw(cf_alg(alg(-1, 1, 3)), pf({"a": -1}, F(1, 2))),
        cf_sqrt_pi(),
        gam(pf({}, F(2, 3))),
        inv(pw(2, pf({"a": F(-1, 2)}, F(1, 4)))),
        inv(gam(pf({"a": F(-1, 2)}, F(3, 4)))),
        inv(gam(pf({"a": F(1, 2)}, F(5, 12)))),
    ),
)


# -- (3,5,6), base (a, 5a/3-1/2, 2a, -8+4*sqrt(5)) --------------------------

q356 = family(3, 5, 6, (F(5, 3), F(-1, 2)), (2, 0), alg(-8, 4, 5))

entry(
    "3,5,6-3 vi",
    (3, 5, 6),
    q356,
    "vi",
    "",
    (),
    spec(
        pf({"a": -1}, 1),
        pf({"a": F(-1, 3)}, F(1, 2)),
        pf({"a": F(2, 3)}, F(1, 2)),
        alg(9, -4, 5),
    ),
    cf_prod(
        pw(5, pf({"a": F(-5, 6)})),
        pw(cf_alg(alg(-1, 1, 5)), pf(A, -2)),
        gam(pf({"a": F(1, 3)}, F(1, 4))),
        gam(pf({"a": F(1, 3)}, F(3, 4))),
        inv(pw(2, pf({"a": F(-5, 3)}, F(-1, 2)))),
        inv(gam(pf({"a": F(1, 3)}, F(3, 10)))),
        inv(gam(pf({"a": F(1, 3)}, F(7, 10)))),
    ),
)


ENTRIES.append(None)  # placeholder replaced below by the derived twin


def derived_twin():
    """Pipeline output for the (1,2,2) step-down case, twin of the table row."""
    rel = contiguity.shift_relation(1, 2, 2)
    for drel in degenerate_relations(q122, rel):
        if drel.kind != "i":
            continue
        for rec in terminating_identities(drel):
            if rec.residual_f is None and rec.label.endswith("b=-2*n"):
                return corpus.record_to_entry(rec, (1, 2, 2), q122, "i")
    raise SystemExit("derived twin not found")


def main():
    twin = derived_twin()
    ENTRIES[ENTRIES.index(None)] = twin
    # the transcribed twin mirrors the derived case text so the coherence
    # check puts both in one bucket
    for e in ENTRIES:
        if e is not twin and e.label == "1,2,2-1 i b=-2*n":
            assert e.case["text"] == twin.case["text"], (
                e.case["text"],
                twin.case["text"],
            )
    flags = corpus.coherence_flags(ENTRIES)
    if flags:
        raise SystemExit("coherence flags at build time: %s" % flags)
    os.makedirs(os.path.dirname(OUT), exist_ok=True)
    corpus.corpus_save(ENTRIES, OUT)
    print("wrote %d entries to %s" % (len(ENTRIES), OUT))


if __name__ == "__main__":
    main()

import time
from fractions import Fraction as Q

from hypident.admissible import AdmissibleQuadruple, AffineForm, FREE_B
from hypident.closedform import (
    LimitMarker, canonical, cf_rat, degenerate_relations, describe_expr,
    eval_expr, pochhammer_limit, poch_factor, PochhammerProduct,
    products_equal, s_n_closed, terminating_identities, verify_degenerate,
    verify_identity,
)
from hypident.contiguity import shift_relation
from hypident.exact import AlgebraicValue as AV

t0 = time.time()

def quad(label, klm, b_of_a, c_of_a, x, a_value=None):
    frees = {"a"} if a_value is None else set()
    if b_of_a == FREE_B:
        frees.add("b")
    if c_of_a is None:
        frees.add("c")
    return (
        AdmissibleQuadruple(label, b_of_a, c_of_a, x, frozenset(frees), a_value),
        shift_relation(*klm),
    )

def af(ca=0, cb=0, t=0):
    return AffineForm(Q(ca), Q(cb), Q(t))

def expect(base, num, den, disc=0):
    if isinstance(base, (int, Q)):
        base = AV.from_rational(base)
    return PochhammerProduct(base, tuple(num), tuple(den), disc=disc)

CASES = [
    ("(1,2,2)", (1, 2, 2), FREE_B, af(2), AV.from_rational(2),
     expect(-1, [poch_factor(Q(1, 2), b=Q(1, 2))], [poch_factor(Q(1, 2), a=1)])),
    ("(1,2,3)", (1, 2, 3), af(2, 0, Q(-1, 3)), af(3), AV.from_rational(9),
     expect(-4, [poch_factor(Q(1, 2), a=1)], [poch_factor(Q(2, 3), a=1)])),
    ("(1,3,2)", (1, 3, 2), af(3, 0, -1), af(2), AV.quadratic(Q(1, 2), Q(1, 2), -3),
     expect(AV.quadratic(0, Q(-3, 4), -3),
            [poch_factor(Q(1, 3), a=1)], [poch_factor(Q(1, 2), a=1)], disc=-3)),
    ("(1,3,3)", (1, 3, 3), af(3, 0, Q(-1, 2)), af(3), AV.from_rational(-3),
     expect(4, [poch_factor(Q(1, 2), a=1), poch_factor(Q(1, 2), a=1)],
            [poch_factor(Q(1, 3), a=1), poch_factor(Q(2, 3), a=1)])),
    ("(1,4,3)", (1, 4, 3), af(4, 0, Q(-1, 2)), af(3), AV.from_rational(-1),
     expect(Q(64, 27), [poch_factor(Q(3, 8), a=1), poch_factor(Q(5, 8), a=1)],
            [poch_factor(Q(1, 3), a=1), poch_factor(Q(2, 3), a=1)])),
    ("(1,5,6)", (1, 5, 6), af(5, 0, Q(-1, 2)), af(6), AV.from_rational(-4),
     expect(Q(3125, 729),
            [poch_factor(Q(1, 5), a=1), poch_factor(Q(4, 5), a=1),
             poch_factor(Q(3, 10), a=1), poch_factor(Q(7, 10), a=1)],
            [poch_factor(Q(1, 3), a=1), poch_factor(Q(2, 3), a=1),
             poch_factor(Q(1, 6), a=1), poch_factor(Q(5, 6), a=1)])),
    ("(2,5,4)", (2, 5, 4), af(Q(5, 2), 0, -1), af(2), AV.quadratic(Q(-1, 2), Q(1, 2), 5),
     expect(AV.quadratic(Q(625, 128), Q(-275, 128), 5),
            [poch_factor(Q(2, 5), a=Q(1, 2)), poch_factor(Q(3, 5), a=Q(1, 2))],
            [poch_factor(Q(1, 4), a=Q(1, 2)), poch_factor(Q(3, 4), a=Q(1, 2))],
            disc=5)),
    ("(1,6,6)", (1, 6, 6), af(6, 0, 1), af(6), AV.from_rational(Q(6, 5)),
     expect(Q(-1, 5),
            [poch_factor(1, a=1), poch_factor(Q(1, 5), a=1), poch_factor(Q(2, 5), a=1),
             poch_factor(Q(3, 5), a=1), poch_factor(Q(4, 5), a=1)],
            [poch_factor(Q(1, 6), a=1), poch_factor(Q(2, 6), a=1), poch_factor(Q(3, 6), a=1),
             poch_factor(Q(4, 6), a=1), poch_factor(Q(5, 6), a=1)])),
    ("(0,1,1)x1", (0, 1, 1), FREE_B, None, AV.from_rational(1),
     expect(1, [poch_factor(0, a=-1, c=1)], [poch_factor(0, c=1)])),
    ("(0,0,1)x1", (0, 0, 1), FREE_B, None, AV.from_rational(1),
     expect(1, [poch_factor(0, a=-1, c=1), poch_factor(0, b=-1, c=1)],
            [poch_factor(0, c=1), poch_factor(0, a=-1, b=-1, c=1)])),
]

for label, klm, b_of_a, c_of_a, x, want in CASES:
    qd, rel = quad(label, klm, b_of_a, c_of_a, x)
    got = s_n_closed(rel, qd)
    ok = products_equal(got, want)
    print("%-10s S match=%s  %s" % (label, ok, got.describe()))
    assert ok, (got.canonical_key(), want.canonical_key())

# n -> oo limits
qd, rel = quad("(0,0,1)x1", (0, 0, 1), FREE_B, None, AV.from_rational(1))
lim = pochhammer_limit(s_n_closed(rel, qd))
print("gauss limit:", describe_expr(lim))
qd, rel = quad("(1,2,2)", (1, 2, 2), FREE_B, af(2), AV.from_rational(2))
mk = pochhammer_limit(s_n_closed(rel, qd))
print("base!=1 limit marker:", isinstance(mk, LimitMarker), getattr(mk, "reason", None))

# degenerate relations: numeric residual check on (1,3,3)
qd, rel = quad("(1,3,3)", (1, 3, 3), af(3, 0, Q(-1, 2)), af(3), AV.from_rational(-3))
rels = degenerate_relations(qd, rel)
assert len(rels) == 24 and all(r.valid for r in rels)
binds = {"a": Q(1, 5)}
for r in rels:
    if r.kind in ("i", "iii", "ix", "xi", "xvii"):
        for n in (0, 1, 2):
            res = verify_degenerate(r, n, binds, None)
            print("  (1,3,3) kind %-5s n=%d residual %.2e" % (r.kind, n, res))
            assert res < 1e-20, (r.kind, n, res)

# validity flags: a pinned to 0 invalidates the groups dividing by a
qd0 = AdmissibleQuadruple("azero", FREE_B, None, AV.from_rational(Q(1, 3)),
                          frozenset({"b", "c"}), a_value=Q(0))
rels0 = degenerate_relations(qd0, shift_relation(0, 1, 1))
bad = [r.kind for r in rels0 if not r.valid]
print("invalid kinds at a=0:", bad)
assert bad == ["xiii", "xiv", "xv", "xvi", "xvii", "xviii", "xix", "xx",
               "xxi", "xxii", "xxiii", "xxiv"], bad
assert all(r.invalid_factor == "a" for r in rels0 if not r.valid)

# terminating specializations of (1,2,2)(i)
qd, rel = quad("(1,2,2)", (1, 2, 2), FREE_B, af(2), AV.from_rational(2))
drel = [r for r in degenerate_relations(qd, rel) if r.kind == "i"][0]
recs = terminating_identities(drel)
for rec in recs:
    print("  ", rec.describe())
binds = {"a": Q(1, 3), "b": Q(1, 7)}
for rec in recs:
    for n in (0, 1, 2, 5):
        res = verify_identity(rec, n, binds, None)
        assert res < 1e-20, (rec.label, n, res)
print("terminating residuals ok; total %.1fs" % (time.time() - t0))

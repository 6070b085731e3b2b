"""Symmetry group of shift triples and its fundamental domain.

The five generators acting on integer triples (k, l, m):

    s1: (k,l,m) -> (m-k, l, m)
    s2: (k,l,m) -> (k, l, k+l-m)
    s3: (k,l,m) -> (l, k, m)
    s4: (k,l,m) -> (m-k, m-l, m)
    s5: (k,l,m) -> (-k, -l, -m)

generate a group of order 48 acting with generically free orbits; the cone

    0 <= k+l-m <= l-k <= m

picks one representative from each orbit (lexicographic minimum on the
boundary, where an orbit can meet the cone more than once).
"""

from __future__ import annotations

GENERATORS = ("s1", "s2", "s3", "s4", "s5")


def apply_generator(g, p):
    k, l, m = p
    if g == "s1":
        return (m - k, l, m)
    if g == "s2":
        return (k, l, k + l - m)
    if g == "s3":
        return (l, k, m)
    if g == "s4":
        return (m - k, m - l, m)
    if g == "s5":
        return (-k, -l, -m)
    raise ValueError("unknown generator %r" % g)


def orbit(p):
    """Closure of {p} under the generators; its size divides 48."""
    p = tuple(p)
    seen = {p}
    frontier = [p]
    while frontier:
        q = frontier.pop()
        for g in GENERATORS:
            r = apply_generator(g, q)
            if r not in seen:
                seen.add(r)
                frontier.append(r)
    return seen


def in_fundamental_domain(p):
    k, l, m = p
    return 0 <= k + l - m <= l - k <= m


def canonical_representative(p):
    """The unique orbit member inside the cone (lex-least on boundaries)."""
    members = sorted(q for q in orbit(p) if in_fundamental_domain(q))
    if not members:
        raise AssertionError("orbit of %r misses the fundamental domain" % (p,))
    return members[0]


def enumerate_representatives(m_max, include_zero=False):
    """All cone triples with m <= m_max, ordered by (m, k, l).

    The all-zero triple gives the trivial relation and is excluded unless
    include_zero is set.
    """
    if m_max < 0:
        raise ValueError("m_max must be nonnegative")
    out = []
    for m in range(0, m_max + 1):
        for k in range(0, m // 2 + 1):
            for l in range(m - k, m + k + 1):
                if (k, l, m) == (0, 0, 0) and not include_zero:
                    continue
                out.append((k, l, m))
    return out

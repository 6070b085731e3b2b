"""Fixture corpus handling and seeded batch verification.

A corpus file is a UTF-8 JSON document ``{"schema_version": 1, "entries":
[...]}``.  Each entry records one special-value identity F(upper1, upper2;
lower; x) = closed form, together with the lattice point and base quadruple
it belongs to, the relation tag it went through, and the parameter
constraint under which it holds.  Entries round-trip bit-exactly through
save/load.

batch_verify draws seeded rational parameter samples per entry (integer
indices from a small pool, everything else generic rationals), evaluates
both sides at the configured working precision and aggregates pass/fail
plus the worst relative residual.  Reports are deterministic for a fixed
seed: per-entry sample streams are derived from (seed, label), so the
outcome does not depend on entry order or parallelism.
"""

import concurrent.futures
import hashlib
import json
import random
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from . import closedform, numerics
from .closedform import (
    ClosedFormExpr,
    HypSpec,
    ParamForm,
    RELATION_KINDS,
    expr_from_json,
)
from .exact import AlgebraicValue

SCHEMA_VERSION = 1

_SOURCES = ("derived", "transcribed")
_INDEX_POOL = (0, 1, 2, 5)
_MAX_DRAWS = 80


class CorpusError(ValueError):
    """Malformed corpus document; the message names the offending field."""


# ---------------------------------------------------------------------------
# serialization of parameter forms and evaluation descriptors


def paramform_to_json(pf):
    return {
        "coeffs": {v: str(w) for v, w in pf.coeffs},
        "n": str(pf.coef_n),
        "const": str(pf.const),
    }


def _fraction(text, where):
    try:
        return Fraction(str(text))
    except (ValueError, ZeroDivisionError):
        raise CorpusError("%s: %r is not a rational number" % (where, text))


def paramform_from_json(obj, where):
    if not isinstance(obj, dict):
        raise CorpusError("%s: expected an object, found %r" % (where, type(obj).__name__))
    coeffs = obj.get("coeffs", {})
    if not isinstance(coeffs, dict):
        raise CorpusError("%s.coeffs: expected an object" % where)
    return ParamForm.make(
        {str(v): _fraction(w, "%s.coeffs.%s" % (where, v)) for v, w in coeffs.items()},
        _fraction(obj.get("n", 0), "%s.n" % where),
        _fraction(obj.get("const", 0), "%s.const" % where),
    )


def hyp_spec_to_json(spec):
    return {
        "upper1": paramform_to_json(spec.upper1),
        "upper2": paramform_to_json(spec.upper2),
        "lower": paramform_to_json(spec.lower),
        "argument": spec.argument.to_json(),
        "extended": spec.allow_extended,
    }


def hyp_spec_from_json(obj, where):
    if not isinstance(obj, dict):
        raise CorpusError("%s: expected an object" % where)
    for name in ("upper1", "upper2", "lower", "argument"):
        if name not in obj:
            raise CorpusError("%s: missing field %r" % (where, name))
    try:
        arg = AlgebraicValue.from_json(obj["argument"])
    except (KeyError, ValueError, TypeError) as exc:
        raise CorpusError("%s.argument: %s" % (where, exc))
    return HypSpec(
        upper1=paramform_from_json(obj["upper1"], where + ".upper1"),
        upper2=paramform_from_json(obj["upper2"], where + ".upper2"),
        lower=paramform_from_json(obj["lower"], where + ".lower"),
        argument=arg,
        allow_extended=bool(obj.get("extended", False)),
    )


# ---------------------------------------------------------------------------
# corpus entries


@dataclass(frozen=True)
class CorpusEntry:
    """One stored identity plus the context needed to re-derive it."""

    label: str
    klm: tuple
    quadruple: dict  # descriptor of the base quadruple, kept verbatim
    kind: str  # relation tag "i".."xxiv", or "transcribed"
    case: dict  # {"text": readable constraint, "indices": [integer symbols]}
    lhs: HypSpec
    rhs: ClosedFormExpr
    branch_notes: str = ""
    source: str = "derived"

    def indices(self):
        return tuple(self.case.get("indices", ()))

    def free_symbols(self):
        """All symbols entering either side, indices included."""
        names = set()
        for pf in (self.lhs.upper1, self.lhs.upper2, self.lhs.lower):
            names.update(pf.symbols())
        _collect_symbols(self.rhs, names)
        return tuple(sorted(names))

    def to_json(self):
        return {
            "label": self.label,
            "klm": list(self.klm),
            "quadruple": self.quadruple,
            "kind": self.kind,
            "case": {
                "text": self.case.get("text", ""),
                "indices": list(self.case.get("indices", ())),
            },
            "lhs": hyp_spec_to_json(self.lhs),
            "rhs": self.rhs.to_json(),
            "branch_notes": self.branch_notes,
            "source": self.source,
        }


def _collect_symbols(expr, names):
    if expr.kind == "symbol":
        names.add(expr.value)
    for ch in expr.children:
        _collect_symbols(ch, names)


def entry_from_json(obj, where="entry"):
    if not isinstance(obj, dict):
        raise CorpusError("%s: expected an object" % where)
    for name in ("label", "klm", "quadruple", "kind", "case", "lhs", "rhs"):
        if name not in obj:
            raise CorpusError("%s: missing field %r" % (where, name))
    label = obj["label"]
    if not isinstance(label, str) or not label:
        raise CorpusError("%s.label: expected a non-empty string" % where)
    where = "entry %r" % label
    klm = obj["klm"]
    if (
        not isinstance(klm, list)
        or len(klm) != 3
        or not all(isinstance(v, int) and not isinstance(v, bool) for v in klm)
    ):
        raise CorpusError("%s.klm: expected three integers" % where)
    kind = obj["kind"]
    if kind != "transcribed" and kind not in RELATION_KINDS:
        raise CorpusError("%s.kind: %r is not a relation tag" % (where, kind))
    case = obj["case"]
    if not isinstance(case, dict) or not isinstance(case.get("text", ""), str):
        raise CorpusError("%s.case: expected {text, indices}" % where)
    indices = case.get("indices", [])
    if not isinstance(indices, list) or not all(isinstance(v, str) for v in indices):
        raise CorpusError("%s.case.indices: expected a list of symbol names" % where)
    if not isinstance(obj["quadruple"], dict):
        raise CorpusError("%s.quadruple: expected an object" % where)
    source = obj.get("source", "derived")
    if source not in _SOURCES:
        raise CorpusError("%s.source: %r is not one of %s" % (where, source, list(_SOURCES)))
    notes = obj.get("branch_notes", "")
    if not isinstance(notes, str):
        raise CorpusError("%s.branch_notes: expected a string" % where)
    try:
        rhs = expr_from_json(obj["rhs"])
    except (KeyError, ValueError, TypeError) as exc:
        raise CorpusError("%s.rhs: %s" % (where, exc))
    return CorpusEntry(
        label=label,
        klm=tuple(klm),
        quadruple=obj["quadruple"],
        kind=kind,
        case={"text": case.get("text", ""), "indices": list(indices)},
        lhs=hyp_spec_from_json(obj["lhs"], where + ".lhs"),
        rhs=rhs,
        branch_notes=notes,
        source=source,
    )


def corpus_to_json(entries):
    seen = set()
    for e in entries:
        if e.label in seen:
            raise CorpusError("duplicate label %r" % e.label)
        seen.add(e.label)
    return {
        "schema_version": SCHEMA_VERSION,
        "entries": [e.to_json() for e in entries],
    }


def corpus_from_json(doc):
    if not isinstance(doc, dict):
        raise CorpusError("corpus document: expected an object at top level")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise CorpusError(
            "schema_version: expected %d, found %r" % (SCHEMA_VERSION, version)
        )
    raw = doc.get("entries")
    if not isinstance(raw, list):
        raise CorpusError("entries: expected a list")
    entries = []
    seen = set()
    for i, obj in enumerate(raw):
        entry = entry_from_json(obj, "entry #%d" % i)
        if entry.label in seen:
            raise CorpusError("entry #%d: duplicate label %r" % (i, entry.label))
        seen.add(entry.label)
        entries.append(entry)
    return entries


def corpus_loads(text):
    try:
        doc = json.loads(text)
    except ValueError as exc:
        raise CorpusError("corpus file is not valid JSON: %s" % exc)
    return corpus_from_json(doc)


def corpus_load(path):
    with open(path, "r", encoding="utf-8") as fh:
        return corpus_loads(fh.read())


def corpus_dumps(entries):
    return json.dumps(corpus_to_json(entries), ensure_ascii=False, indent=1) + "\n"


def corpus_save(entries, path):
    text = corpus_dumps(entries)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


# ---------------------------------------------------------------------------
# run configuration and reports


@dataclass(frozen=True)
class RunConfig:
    digits: int = 45
    samples: int = 3
    seed: int = 0
    jobs: int = 1
    fmt: str = "text"

    def __post_init__(self):
        if self.digits < 15:
            raise ValueError("working digits must be at least 15, got %d" % self.digits)
        if self.samples < 1:
            raise ValueError("samples must be positive, got %d" % self.samples)
        if self.jobs < 1:
            raise ValueError("jobs must be positive, got %d" % self.jobs)
        if self.fmt not in ("text", "json"):
            raise ValueError("format must be 'text' or 'json', got %r" % self.fmt)

    def tolerance(self):
        # ten digits of slack against the working precision
        return 10.0 ** (-(self.digits - 10))


@dataclass(frozen=True)
class EntryReport:
    label: str
    ok: bool
    worst: float
    residuals: tuple = ()
    samples: tuple = ()  # one {symbol: value string} per sample
    error: str = ""

    def to_json(self, seed):
        out = {
            "label": self.label,
            "ok": self.ok,
            "worst": self.worst,
            "residuals": list(self.residuals),
            "samples": [dict(s) for s in self.samples],
            "seed": seed,
        }
        if self.error:
            out["error"] = self.error
        return out


@dataclass(frozen=True)
class RunReport:
    entries: tuple
    seed: int
    digits: int
    samples: int
    flags: tuple = ()  # coherence flags, pairs of labels

    @property
    def passed(self):
        return sum(1 for e in self.entries if e.ok)

    @property
    def failed(self):
        return sum(1 for e in self.entries if not e.ok)

    @property
    def worst(self):
        return max((e.worst for e in self.entries), default=0.0)

    @property
    def ok(self):
        return self.failed == 0

    def summary_json(self):
        return {
            "summary": True,
            "passed": self.passed,
            "failed": self.failed,
            "worst": self.worst,
            "seed": self.seed,
            "digits": self.digits,
            "samples": self.samples,
            "coherence_flags": [list(f) for f in self.flags],
        }

    def lines(self, fmt="text"):
        out = []
        if fmt == "json":
            for e in self.entries:
                out.append(json.dumps(e.to_json(self.seed), sort_keys=True))
            out.append(json.dumps(self.summary_json(), sort_keys=True))
            return out
        for e in self.entries:
            if e.error:
                out.append("FAIL %s  %s" % (e.label, e.error))
            else:
                out.append(
                    "%s %s  worst=%.3e" % ("PASS" if e.ok else "FAIL", e.label, e.worst)
                )
        for a, b in self.flags:
            out.append("COHERENCE %s disagrees with %s" % (b, a))
        out.append(
            "passed=%d failed=%d worst=%.3e seed=%d digits=%d samples=%d"
            % (self.passed, self.failed, self.worst, self.seed, self.digits, self.samples)
        )
        return out


# ---------------------------------------------------------------------------
# seeded sampling


def _entry_rng(seed, label):
    digest = hashlib.sha256(("%d\x1f%s" % (seed, label)).encode("utf-8")).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def _draw_bindings(rng, indices, frees):
    binds = {}
    for name in indices:
        binds[name] = _INDEX_POOL[rng.randrange(len(_INDEX_POOL))]
    for name in frees:
        binds[name] = Fraction(rng.randrange(-24, 25), rng.randrange(2, 13))
    return binds


def _residual(entry, binds, ctx):
    with mpmath.workdps(ctx.dps + 10):
        lhs = closedform.eval_hyp_spec(entry.lhs, 0, binds, ctx)
        rhs = closedform.eval_expr(entry.rhs, binds, ctx)
    return numerics.relative_residual(lhs, rhs)


def verify_entry(entry, cfg):
    """Sample the entry cfg.samples times; every sample must meet tolerance."""
    ctx = numerics.PrecisionContext(working=cfg.digits)
    rng = _entry_rng(cfg.seed, entry.label)
    indices = entry.indices()
    frees = tuple(v for v in entry.free_symbols() if v not in indices)
    tol = cfg.tolerance()
    residuals = []
    used = []
    for _ in range(cfg.samples):
        result = None
        for _attempt in range(_MAX_DRAWS):
            binds = _draw_bindings(rng, indices, frees)
            try:
                result = (binds, _residual(entry, binds, ctx))
                break
            except (numerics.NumericsError, ZeroDivisionError):
                continue
        if result is None:
            return EntryReport(
                label=entry.label,
                ok=False,
                worst=float("inf"),
                residuals=tuple(residuals),
                samples=tuple(used),
                error="no valid sample in %d draws" % _MAX_DRAWS,
            )
        binds, res = result
        residuals.append(res)
        used.append(tuple(sorted((k, str(v)) for k, v in binds.items())))
    return EntryReport(
        label=entry.label,
        ok=all(r <= tol for r in residuals),
        worst=max(residuals),
        residuals=tuple(residuals),
        samples=tuple(used),
    )


def _verify_star(packed):
    entry, cfg = packed
    return verify_entry(entry, cfg)


def batch_verify(entries, cfg=None):
    """Verify every entry; the report is ordered by label and reproducible."""
    cfg = cfg or RunConfig()
    ordered = sorted(entries, key=lambda e: e.label)
    if cfg.jobs > 1 and len(ordered) > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            reports = list(pool.map(_verify_star, [(e, cfg) for e in ordered]))
    else:
        reports = [verify_entry(e, cfg) for e in ordered]
    return RunReport(
        entries=tuple(reports),
        seed=cfg.seed,
        digits=cfg.digits,
        samples=cfg.samples,
        flags=tuple(coherence_flags(ordered)),
    )


# ---------------------------------------------------------------------------
# building entries from the derivation pipeline


def quad_descriptor(quad):
    """JSON-ready description of a base quadruple."""

    def aff(form):
        if form is None:
            return None
        return {
            "a": str(form.coef_a),
            "b": str(form.coef_b),
            "const": str(form.const),
        }

    return {
        "a": None if quad.a_value is None else str(quad.a_value),
        "b": aff(quad.b_of_a),
        "c": aff(quad.c_of_a),
        "x": quad.x.to_json(),
    }


def _reify_n(pf):
    # ladder-count dependence becomes an explicit index symbol "n"
    if pf.coef_n == 0:
        return pf
    d = {v: w for v, w in pf.coeffs}
    d["n"] = d.get("n", 0) + pf.coef_n
    return ParamForm.make(d, 0, pf.const)


def record_to_entry(rec, klm, quad, kind, source="derived"):
    """Corpus entry for a fully collapsed terminating identity record."""
    if rec.residual_f is not None:
        raise CorpusError("record %r has an uncollapsed factor" % rec.label)
    spec = rec.lhs_spec
    lhs = HypSpec(
        upper1=_reify_n(spec.upper1),
        upper2=_reify_n(spec.upper2),
        lower=_reify_n(spec.lower),
        argument=spec.argument,
        allow_extended=spec.allow_extended,
    )
    case_text = rec.label.split(") ", 1)[1] if ") " in rec.label else ""
    return CorpusEntry(
        label=rec.label,
        klm=tuple(klm),
        quadruple=quad_descriptor(quad),
        kind=kind,
        case={"text": case_text, "indices": ["n"]},
        lhs=lhs,
        rhs=closedform.canonical(rec.rhs),
        branch_notes=rec.branch_notes or "",
        source=source,
    )


def derived_entries(k, l, m):
    """Every collapsed terminating identity at one lattice point."""
    from . import admissible, contiguity

    rel = contiguity.shift_relation(k, l, m)
    quads, _excluded = admissible.admissible_quadruples(k, l, m)
    out = []
    seen = set()
    for quad in quads:
        if quad.numeric_only:
            continue
        try:
            drels = closedform.degenerate_relations(quad, rel)
        except closedform.ClosedFormError:
            continue  # family with a degenerate ladder ratio
        for drel in drels:
            if not drel.valid:
                continue
            for rec in closedform.terminating_identities(drel):
                if rec.residual_f is not None:
                    continue
                if rec.label in seen:
                    continue
                seen.add(rec.label)
                out.append(record_to_entry(rec, (k, l, m), quad, drel.kind))
    return out


# ---------------------------------------------------------------------------
# coherence between derived and transcribed entries


def coherence_flags(entries):
    """Pairs of labels sharing (klm, quadruple, kind, case) whose canonical
    right sides differ structurally."""
    groups = {}
    for e in entries:
        key = (
            tuple(e.klm),
            json.dumps(e.quadruple, sort_keys=True),
            e.kind,
            e.case.get("text", ""),
        )
        groups.setdefault(key, []).append(e)
    flags = []
    for group in groups.values():
        if len(group) < 2:
            continue
        base = group[0]
        base_key = closedform.canonical(base.rhs).key()
        base_lhs = base.lhs
        for other in group[1:]:
            if (
                closedform.canonical(other.rhs).key() != base_key
                or other.lhs != base_lhs
            ):
                flags.append((base.label, other.label))
    return sorted(flags)

"""Command line: ``germwork <command> <input.json|catalog:NAME> [flags]``.

Every command turns its document into a list of named checks, runs them
(optionally on a thread pool) and prints a report ordered by check name.
Exit status: 0 when no check fails, 1 when some check fails, 2 for usage or
schema errors.
"""

from __future__ import annotations

import argparse
import random
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import algebra, constellation, core, germs, lattice, proper
from .catalog import NAMES, WorkspaceDocument
from .category import (
    SLICE_GUARD,
    category_to_dot,
    check_category_axioms,
    enumerate_slices,
    slice_product,
    slice_semigroup,
)
from .documents import dump_document, dumps, resolve
from .errors import (
    GermworkError,
    IncompatibleKind,
    NoRestrictionZero,
    SchemaError,
    TooLarge,
    UnknownName,
)

COMMANDS = ("check", "analyze", "germs", "booleanize", "esn", "decompose", "algebra-iso", "pr", "export")
RANDOM_ROUNDS = 100


@dataclass
class Check:
    name: str
    status: str
    detail: object = None
    witness: list | None = None
    seconds: float = 0.0

    def to_json(self, timings=False):
        doc = {"name": self.name, "status": self.status}
        if self.detail is not None:
            doc["detail"] = self.detail
        if self.witness is not None:
            doc["witness"] = self.witness
        if timings:
            doc["seconds"] = round(self.seconds, 6)
        return doc


@dataclass
class Options:
    ring: algebra.Ring = algebra.Q
    force: bool = False
    seed: int = 0
    axioms: tuple = ()
    jobs: int = 1
    timings: bool = False

    @property
    def guard(self):
        return 1 << 40 if self.force else SLICE_GUARD


@dataclass
class Report:
    command: str
    inputs: dict
    checks: list = field(default_factory=list)
    timings: dict | None = None

    @property
    def ok(self):
        return all(c.status != "fail" for c in self.checks)

    def to_json(self):
        doc = {
            "command": self.command,
            "inputs": self.inputs,
            "checks": [c.to_json(self.timings is not None) for c in self.checks],
            "status": "pass" if self.ok else "fail",
        }
        if self.timings is not None:
            doc["timings"] = self.timings
        return doc

    def to_text(self):
        lines = []
        for c in self.checks:
            line = f"{c.status.upper():4} {c.name}"
            if c.detail is not None:
                line += f": {c.detail}"
            if c.witness is not None:
                line += f"  witness {c.witness}"
            lines.append(line)
        lines.append(f"{'PASS' if self.ok else 'FAIL'} {self.command}")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# helpers


def _labels(S, witness):
    if witness is None:
        return None
    return [S.label(w) for w in witness]


def _verdict(ok, detail=None, witness=None):
    return ("pass" if ok else "fail"), detail, witness


def _info(detail):
    return "info", detail, None


def _violation(S, v):
    if v is None:
        return _verdict(True)
    return _verdict(False, v.law, _labels(S, v.witness) if S is not None else list(v.witness))


def _need(doc, *kinds):
    if doc.kind not in kinds:
        raise IncompatibleKind(f"this command takes {' or '.join(kinds)}, not {doc.kind}")


# ---------------------------------------------------------------------------
# commands: each returns a list of (name, thunk); a thunk returns (status, detail, witness)


def plan_check(doc, opt):
    obj = doc.payload
    if doc.kind == "semigroup":
        S = obj
        if S.star is None:
            return [("associative", lambda: _verdict(True))]
        classes = opt.axioms or ("restriction",)
        for c in classes:
            if c not in core.AXIOM_CLASSES:
                raise SchemaError(f"unknown axiom class {c!r}; known: {', '.join(core.AXIOM_CLASSES)}")
        return [(f"axioms:{c}", lambda c=c: _violation(S, core.check_axioms(S, c))) for c in classes]
    if doc.kind == "semilattice":
        return _semilattice_checks(obj)
    if doc.kind == "action":
        return [("action laws", lambda: _violation(None, germs.check_action(obj)))]
    if doc.kind == "partial-action":
        A, fam = obj
        out = [("premorphism", lambda: _violation(None, proper.partial_action_violation(A)))]
        if fam is not None:
            out.append(("proper (P1, P2)", lambda: _proper_action(A, fam)))
        return out
    if doc.kind == "constellation":
        return [
            ("constellation", lambda: _violation(None, constellation.check_constellation(obj))),
            ("inductive", lambda: _violation(None, constellation.check_inductive(obj))),
        ]
    if doc.kind == "category":
        return [("category axioms", lambda: _category_axioms(obj))]
    raise IncompatibleKind(doc.kind)


def _category_axioms(C):
    v = check_category_axioms(C)
    return _verdict(v is None, v)


def _proper_action(A, fam):
    try:
        proper.check_proper_partial_action(A, fam)
    except proper.NotProperAction as exc:
        return _verdict(False, f"{type(exc).__name__}: {exc}", _witness(exc))
    return _verdict(True)


def _witness(exc):
    w = getattr(exc, "witness", None)
    return None if w is None else [int(x) if isinstance(x, (int,)) else str(x) for x in w]


def _semilattice_checks(E):
    def filt():
        fs = lattice.filters(E)
        return _verdict(len(fs) == E.size, f"{len(fs)} filters, {E.size} elements")

    def gba():
        B, _ = lattice.booleanization(E)
        return _verdict(B.is_powerset(), f"{B.size} members")

    def psi():
        ideals = lattice.order_ideals(E)
        for I in ideals:
            U = lattice.order_ideal_psi_inv(E, I)
            if lattice.order_ideal_psi(E, U) != I or lattice.order_ideal_psi_inv(E, lattice.order_ideal_psi(E, U)) != U:
                return _verdict(False, "round trip fails", lattice.bits(I))
        return _verdict(True, f"{len(ideals)} ideals")

    return [("filters principal, count = |E|", filt), ("booleanization is the powerset", gba), ("Psi round trips", psi)]


def plan_analyze(doc, opt):
    _need(doc, "semigroup")
    S = doc.payload

    def classes():
        if S.star is None:
            return _info([])
        return _info(sorted(k for k, v in core.classify(S).items() if v is None))

    def restriction_only(fn):
        def run():
            if S.star is None or core.check_axioms(S, "restriction") is not None:
                return _info("n/a")
            return fn()

        return run

    def _boolean():
        try:
            return _info(core.check_boolean_restriction(S).ok)
        except NoRestrictionZero:
            return _info("False (no zero projection)")

    out = [
        ("size", lambda: _info(S.size)),
        ("signature", lambda: _info(S.signature)),
        ("axiom classes", classes),
        ("projections", restriction_only(lambda: _info(len(core.projections(S))))),
        ("local units", restriction_only(lambda: _info(core.has_local_units(S)))),
        ("proper", restriction_only(lambda: _info(core.is_proper(S)))),
        ("F-restriction", restriction_only(lambda: _info(core.is_f_restriction(S)))),
        ("boolean", restriction_only(_boolean)),
        ("sigma agrees with congruence closure", restriction_only(lambda: (core.sigma(S), _verdict(True))[1])),
        ("derived identities", restriction_only(lambda: _violation(S, core.check_derived_identities(S)))),
    ]
    return out


def plan_germs(doc, opt):
    _need(doc, "semigroup", "action")
    if doc.kind == "action":
        A = doc.payload

        def build():
            G = germs.germ_category(A)
            return _info(f"{G.size} arrows, {len(G.category.units)} units")

        def theta():
            r = germs.theta_embedding(germs.germ_category(A))
            return _verdict(r.morphism, "injective" if r.injective else "not injective")

        return [("germ category", build), ("theta is a morphism", theta)]
    S = doc.payload
    cache = {}

    def G():
        if "G" not in cache:
            cache["G"] = germs.universal_category(S)
        return cache["G"]

    def arrows():
        return _verdict(G().size == S.size, f"{G().size} arrows, |S| = {S.size}")

    def iota():
        r = germs.theta_embedding(G())
        return _verdict(r.injective and r.morphism)

    def plus():
        r = germs.theta_embedding(G())
        if r.preserves_plus is None:
            return _info("not a range semigroup")
        return _verdict(r.preserves_plus)

    def oplus():
        r = germs.range_oplus(S)
        w = None if r.violation is None else _labels(S, r.violation.witness)
        law = None if r.violation is None else r.violation.law
        return "info", {"table": [S.label(e) for e in r.table], "range": r.is_range, "law": law}, w

    return [
        ("arrows = |S|", arrows),
        ("iota injective morphism", iota),
        ("plus preserved", plus),
        ("oplus", oplus),
    ]


def plan_booleanize(doc, opt):
    _need(doc, "semigroup", "semilattice")
    if doc.kind == "semilattice":
        return _semilattice_checks(doc.payload)
    S = doc.payload
    E, _ = lattice.semilattice_from_semigroup(S)
    out = _semilattice_checks(E)

    def boolean():
        G = germs.universal_category(S)
        B = slice_semigroup(G.category, guard=opt.guard)
        return _verdict(True, f"{B.semigroup.size} compact slices")

    def extend():
        alpha, T = germs.identity_alpha(S)
        psi = germs.booleanization_extend(S, alpha, T, guard=opt.guard)
        ok = all(psi(U) == U for U in T.slices)
        return _verdict(ok, "extension of iota is the identity" if ok else "extension differs")

    return out + [("slices form a Boolean restriction semigroup", boolean), ("universal extension", extend)]


def plan_esn(doc, opt):
    _need(doc, "semigroup", "constellation")
    if doc.kind == "constellation":
        Q = doc.payload

        def back():
            S = constellation.T_of(Q)
            return _verdict(constellation.P_of(S).same_tables(Q))

        return [("P(T(Q)) = Q", back)]
    S = doc.payload

    def there():
        # T(P(S)) carries no range operation, so compare the (·, *) reduct
        return _verdict(constellation.T_of(constellation.P_of(S)).same_tables(S.without_plus()))

    def back():
        Q = constellation.P_of(S)
        return _verdict(constellation.P_of(constellation.T_of(Q)).same_tables(Q))

    def slices():
        G = germs.universal_category(S)
        B = slice_semigroup(G.category, guard=opt.guard)
        constellation.slice_constellation(G.category, B.slices)
        return _verdict(True, f"{len(B.slices)} slices")

    return [("T(P(S)) = S", there), ("P(T(P(S))) = P(S)", back), ("slice constellation clauses", slices)]


def plan_decompose(doc, opt):
    _need(doc, "semigroup", "partial-action")
    if doc.kind == "partial-action":
        A, fam = doc.payload
        if fam is None:
            raise SchemaError("a partial-action document needs a family for decompose")

        def product():
            P = proper.partial_action_product(A, fam)
            return _verdict(True, f"{P.semigroup.size} pairs, onto monoid: {P.onto_monoid}")

        return [("partial action product clauses", product)]
    S = doc.payload

    def decomp():
        D = proper.decompose_proper(S)
        return _verdict(True, f"S/sigma has {D.quotient.size} elements, {len(D.projections)} projections")

    def crit():
        return _info(proper.f_restriction_criterion(S))

    def iso():
        r = proper.check_germ_iso(S, germs.spectral_action(S))
        return _verdict(True, f"{len(r.mapping)} arrows")

    return [("structure isomorphism", decomp), ("F-restriction criterion", crit), ("germ isomorphism", iso)]


def plan_algebra(doc, opt):
    _need(doc, "semigroup", "category")
    if doc.kind == "category":
        C = doc.payload
        return [("bislice span = slice span", lambda: _verdict(algebra.groupoid_span_check(C, opt.ring)))]
    S = doc.payload
    cache = {}

    def report():
        if "r" not in cache:
            cache["r"] = algebra.F_iso(S, opt.ring)
        return cache["r"]

    def mult():
        r = report()
        return _verdict(r.multiplicative, None, _labels(S, r.failure))

    def unitri():
        r = report()
        M = [list(row) for row in r.matrix]
        return _verdict(r.unitriangular, {"order": [S.label(s) for s in r.order], **algebra.matrix_to_json(M, opt.ring)})

    def dims():
        r = report()
        return _verdict(r.dimension == r.arrows, f"dim KS = {r.dimension}, dim KC(S) = {r.arrows}")

    def expansion():
        return _verdict(report().expansion and report().inverse_verified)

    def convolution():
        rng = random.Random(opt.seed)
        G = germs.universal_category(S)
        C = G.category
        sl = enumerate_slices(C, guard=opt.guard)
        for _ in range(RANDOM_ROUNDS):
            U, V = rng.choice(sl), rng.choice(sl)
            lhs = algebra.convolution(algebra.indicator(C, U, opt.ring), algebra.indicator(C, V, opt.ring))
            if lhs != algebra.indicator(C, slice_product(C, U, V), opt.ring):
                return _verdict(False, "chi_U * chi_V != chi_UV", [U, V])
        return _verdict(True, f"{RANDOM_ROUNDS} random slice pairs")

    return [
        ("F multiplicative", mult),
        ("change of basis unitriangular", unitri),
        ("dimensions", dims),
        ("indicator expansion and inverse", expansion),
        ("random slice convolutions", convolution),
    ]


def plan_pr(doc, opt):
    _need(doc, "semigroup")
    S = doc.payload

    def run():
        r = proper.petrich_reilly(S)
        return _verdict(True, f"{r.semigroup.size} pairs; gamma, ([s], s*) and D_e identities verified")

    return [("Petrich-Reilly", run)]


PLANS = {
    "check": plan_check,
    "analyze": plan_analyze,
    "germs": plan_germs,
    "booleanize": plan_booleanize,
    "esn": plan_esn,
    "decompose": plan_decompose,
    "algebra-iso": plan_algebra,
    "pr": plan_pr,
}


def _execute(name, thunk, S=None):
    t0 = time.perf_counter()
    try:
        status, detail, witness = thunk()
    except (TooLarge, IncompatibleKind, SchemaError):
        raise
    except GermworkError as exc:
        status, detail, witness = "fail", f"{type(exc).__name__}: {exc}", _witness(exc)
        # witnesses raised by semigroup-level code are element indices
        if S is not None and witness is not None and all(isinstance(w, int) and w < S.size for w in witness):
            witness = _labels(S, witness)
    return Check(name, status, detail, witness, time.perf_counter() - t0)


def run(command, doc: WorkspaceDocument, opt: Options | None = None, ref=None):
    """Build the report for a command; raises on usage and schema errors."""
    opt = opt or Options()
    if command not in PLANS:
        raise SchemaError(f"unknown command {command!r}")
    t0 = time.perf_counter()
    plan = PLANS[command](doc, opt)
    S = doc.payload if doc.kind == "semigroup" else None
    if opt.jobs > 1:
        with ThreadPoolExecutor(max_workers=opt.jobs) as pool:
            checks = list(pool.map(lambda p: _execute(*p, S=S), plan))
    else:
        checks = [_execute(*p, S=S) for p in plan]
    checks.sort(key=lambda c: c.name)
    inputs = {"document": ref or doc.name, "kind": doc.kind, "name": doc.name, "seed": opt.seed}
    if command == "algebra-iso":
        inputs["ring"] = opt.ring.spec
    if opt.axioms:
        inputs["axioms"] = list(opt.axioms)
    timings = {"total": round(time.perf_counter() - t0, 6)} if opt.timings else None
    return Report(command, inputs, checks, timings)


def export(doc: WorkspaceDocument, fmt="json"):
    if fmt == "json":
        return dump_document(doc)
    if fmt == "dot":
        if doc.kind == "category":
            return category_to_dot(doc.payload, "C")
        if doc.kind == "semigroup":
            return category_to_dot(germs.universal_category(doc.payload).category, "C")
        if doc.kind == "action":
            return category_to_dot(germs.germ_category(doc.payload).category, "C")
        raise IncompatibleKind(f"no DOT view of a {doc.kind}")
    raise SchemaError(f"export has no {fmt!r} format")


# ---------------------------------------------------------------------------
# entry point


def build_parser():
    p = argparse.ArgumentParser(
        prog="germwork",
        description="Construct and verify finite restriction semigroups, germ categories and their algebras.",
        epilog="catalog names: " + ", ".join(NAMES),
    )
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("input", help="path to a JSON document or catalog:NAME")
    p.add_argument("--ring", default="q", help="q, z or zp:<p> (algebra-iso)")
    p.add_argument("--axioms", default=None, help="comma-separated axiom classes for check")
    p.add_argument("--force", action="store_true", help="lift size guards")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized rounds")
    p.add_argument("--format", choices=("json", "text", "dot"), default=None)
    p.add_argument("--jobs", type=int, default=1, help="worker threads for independent checks")
    p.add_argument("--timings", action="store_true", help="include wall-clock timings")
    p.add_argument("-o", "--output", default=None, help="write output here instead of stdout")
    return p


def _emit(text, path):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        ring = algebra.parse_ring(args.ring)
        if args.jobs < 1:
            raise SchemaError("--jobs must be at least 1")
        opt = Options(
            ring=ring,
            force=args.force,
            seed=args.seed,
            axioms=tuple(a for a in (args.axioms or "").split(",") if a),
            jobs=args.jobs,
            timings=args.timings,
        )
        doc = resolve(args.input, force=args.force)
        if args.command == "export":
            _emit(export(doc, args.format or "json"), args.output)
            return 0
        if args.format == "dot":
            raise SchemaError("--format dot is only for export")
        report = run(args.command, doc, opt, ref=args.input)
    except (SchemaError, IncompatibleKind, UnknownName, TooLarge) as exc:
        hint = " (use --force)" if isinstance(exc, TooLarge) else ""
        print(f"germwork: {type(exc).__name__}: {exc}{hint}", file=sys.stderr)
        return 2
    if args.format == "text":
        _emit(report.to_text(), args.output)
    else:
        _emit(dumps(report.to_json()), args.output)
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())

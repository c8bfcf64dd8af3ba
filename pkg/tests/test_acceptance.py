"""One test per acceptance criterion; each prints a single PASS/FAIL line."""

import random
import time
from itertools import permutations

import pytest

from germwork import catalog
from germwork.algebra import Q, Z, F_iso, Ring, arrow_element, convolution, indicator
from germwork.category import enumerate_slices, pair_groupoid, slice_product, slice_semigroup
from germwork.cli import COMMANDS, Options, run
from germwork.constellation import P_of, T_of, check_inductive, slice_constellation
from germwork.core import check_axioms, find_isomorphism
from germwork.documents import dumps, resolve
from germwork.errors import GermworkError, NotProper, TooLarge
from germwork.germs import iota, range_oplus, spectral_action, theta_embedding, universal_category
from germwork.lattice import FinSemilattice, booleanization, filters, order_ideal_psi, order_ideal_psi_inv, order_ideals
from germwork.proper import check_germ_iso, decompose_proper, partial_action_product, petrich_reilly

import oracles
from conftest import LOCAL_UNITS, RESTRICTION
from test_proper import E_UNITARY, PROPER, action, clause_failures

pytestmark = pytest.mark.acceptance

FULL_SLICE_LIMIT = 128


@pytest.fixture
def verdict(capsys):
    """Call with (number, ok, detail, seconds, budget); prints one line, then asserts."""

    def report(n, ok, detail, seconds, budget=None):
        in_time = budget is None or seconds < budget
        status = "PASS" if ok and in_time else "FAIL"
        limit = f" (budget {budget:g}s)" if budget is not None else ""
        with capsys.disabled():
            print(f"\n[acceptance {n:2d}] {status} {detail}; {seconds:.2f}s{limit}")
        assert ok, detail
        assert in_time, f"took {seconds:.2f}s, budget {budget}s"

    return report


def test_01_axiom_suites(verdict):
    t0 = time.perf_counter()
    ok = True
    for name in ["pt:2", "pt:3"]:
        S = catalog.semigroup(name)
        ok &= check_axioms(S, "restriction") is None and check_axioms(S, "range") is None
        ok &= check_axioms(S, "corestriction") is not None
    for name in ["i:2", "i:3"]:
        ok &= check_axioms(catalog.semigroup(name), "inverse") is None
    R = catalog.semigroup("r:2")
    ok &= check_axioms(R, "biEhresmann") is None
    ok &= check_axioms(R, "restriction") is not None and check_axioms(R, "corestriction") is not None
    verdict(1, ok, "pt:2/pt:3 range not corestriction, i:2/i:3 inverse, r:2 biEhresmann only",
            time.perf_counter() - t0, 5)


def test_02_finitary_universal_category(verdict):
    t0 = time.perf_counter()
    ok = True
    for name in LOCAL_UNITS:
        S = catalog.semigroup(name)
        G = universal_category(S)
        point = {e: p for p, e in enumerate(oracles.projections(S))}
        arrows = {G.germ(s, point[S.star[s]]) for s in range(S.size)}
        ok &= G.category.size == S.size and arrows == set(range(S.size))
    verdict(2, ok, f"|C(S)| = |S| and s -> [s,(s*)^] bijective on {len(LOCAL_UNITS)} entries",
            time.perf_counter() - t0, 5)


def test_03_embedding(verdict):
    t0 = time.perf_counter()
    ok, ranged = True, 0
    for name in LOCAL_UNITS:
        S = catalog.semigroup(name)
        G = universal_category(S)
        rep = theta_embedding(G)
        images = [iota(G, s) for s in range(S.size)]
        C = G.category
        ok &= rep.injective and len(set(images)) == S.size
        ok &= all(slice_product(C, images[s], images[t]) == images[S.mul[s][t]]
                  for s in range(S.size) for t in range(S.size))
        if rep.preserves_plus is not None:
            ranged += 1
            ok &= rep.preserves_plus
    verdict(3, ok, f"iota injective and multiplicative on {len(LOCAL_UNITS)} entries, + kept on {ranged} range entries",
            time.perf_counter() - t0, 10)


def test_04_oplus_counterexample(verdict):
    t0 = time.perf_counter()
    S = catalog.semigroup("paper-4")
    idx = {S.label(s): s for s in range(S.size)}
    f, g = idx["f"], idx["g"]
    rep = range_oplus(S)
    table = [S.label(rep.table[idx[x]]) for x in ["∅", "f", "g", "1"]]
    fg = S.mul[f][g]
    lhs = rep.table[fg]
    rhs = rep.table[S.mul[f][rep.table[g]]]
    ok = (table == ["∅", "f", "1", "1"] and S.label(lhs) == "∅" and S.label(rhs) == "f"
          and not rep.is_range)
    verdict(4, ok, f"oplus table {table}, (fg)+ = {S.label(lhs)} vs (f g+)+ = {S.label(rhs)}",
            time.perf_counter() - t0, 5)


def test_05_esn_round_trips(verdict):
    t0 = time.perf_counter()
    ok, full = True, 0
    for name in RESTRICTION:
        S = catalog.semigroup(name)
        Qc = P_of(S)
        ok &= T_of(Qc).same_tables(S.without_plus()) and P_of(T_of(Qc)).same_tables(Qc)
    for name in LOCAL_UNITS:
        G = universal_category(catalog.semigroup(name))
        C = G.category
        ok &= check_inductive(slice_constellation(C, [iota(G, s) for s in range(C.size)])) is None
        try:
            B = slice_semigroup(C, guard=FULL_SLICE_LIMIT)
        except TooLarge:
            continue
        full += 1
        ok &= check_inductive(slice_constellation(C, B.slices)) is None
    verdict(5, ok, f"T(P(S)) and P(T(Q)) on {len(RESTRICTION)} entries; slice clauses on iota images "
            f"of {len(LOCAL_UNITS)} and full slice sets of {full}", time.perf_counter() - t0, 30)


def test_06_pair_groupoid(verdict):
    t0 = time.perf_counter()
    C = pair_groupoid(2)
    slices, bis = enumerate_slices(C), enumerate_slices(C, bislices=True)
    B = slice_semigroup(C)
    Bb = slice_semigroup(C, bislices=True)
    ok = (len(slices) == 9 and len(bis) == 7
          and find_isomorphism(B.semigroup, catalog.semigroup("pt:2").without_plus()) is not None
          and find_isomorphism(Bb.semigroup, catalog.semigroup("i:2"), ("star", "plus")) is not None)
    verdict(6, ok, f"{len(slices)} slices = PT(2), {len(bis)} bislices = I(2)", time.perf_counter() - t0, 1)


def test_07_proper_structure(verdict):
    t0 = time.perf_counter()
    ok = True
    for name in PROPER:
        S = catalog.semigroup(name)
        D = decompose_proper(S)
        R = D.product.semigroup
        ok &= all(R.mul[D.psi[s]][D.psi[t]] == D.psi[S.mul[s][t]]
                  for s in range(S.size) for t in range(S.size))
        ok &= all(R.star[D.psi[s]] == D.psi[S.star[s]] for s in range(S.size))
        ok &= clause_failures(D.product) == []
        iso = check_germ_iso(S, spectral_action(S))
        ok &= iso.transformation.category.size == iso.germs.category.size
    built = [
        partial_action_product(action("group:2", 2, [(0, 1), (0, 1)]), [0b01, 0b11]),
        partial_action_product(action("group:2", 2, [(0, 1), (0, None)]), [0b01, 0b11]),
        partial_action_product(action("group:2", 3, [(0, 1, 2), (1, 0, 2)]), [0b000, 0b100, 0b011, 0b111]),
    ]
    ok &= all(clause_failures(Pp) == [] for Pp in built)
    try:
        decompose_proper(catalog.semigroup("i:2"))
        ok = False
    except NotProper:
        pass
    verdict(7, ok, f"decomposition, five clauses and germ iso on {len(PROPER)} proper entries; i:2 refused",
            time.perf_counter() - t0, 30)


def test_08_petrich_reilly(verdict):
    t0 = time.perf_counter()
    ok = True
    for name in E_UNITARY:
        S = catalog.semigroup(name)
        PR = petrich_reilly(S)
        R, Dp = PR.semigroup, PR.decomposition.product.semigroup
        ok &= all(R.mul[PR.iso[a]][PR.iso[b]] == PR.iso[S.mul[a][b]]
                  for a in range(S.size) for b in range(S.size))
        ok &= all(Dp.mul[PR.gamma[a]][PR.gamma[b]] == PR.gamma[R.mul[a][b]]
                  for a in range(R.size) for b in range(R.size))
        A, E, P = PR.decomposition.induced.partial, PR.decomposition.semilattice, PR.decomposition.projections
        for t, m in enumerate(PR.psi_maps):
            for e, v in m.items():
                ok &= A.image_of(t, E.down[P.index(e)]) == E.down[P.index(v)]
    verdict(8, ok, f"gamma and s -> ([s], s*) isomorphisms, image identities on {len(E_UNITARY)} entries",
            time.perf_counter() - t0, 10)


def test_09_algebra_isomorphism(verdict):
    t0 = time.perf_counter()
    ok, pairs = True, 0
    for ring in (Q, Z, Ring("zp", 2)):
        for name in LOCAL_UNITS:
            S = catalog.semigroup(name)
            r = F_iso(S, ring)
            pairs += S.size ** 2
            ok &= r.ok and r.dimension == r.arrows == S.size
    verdict(9, ok, f"F multiplicative ({pairs} pair checks), unitriangular, dim KS = dim KC(S) over Q, Z, Z/2",
            time.perf_counter() - t0, 10)


def random_slice(C, rng):
    by_dom = {}
    for a in range(C.size):
        by_dom.setdefault(C.dom[a], []).append(a)
    U = 0
    for arrows in by_dom.values():
        pick = rng.randrange(len(arrows) + 1)
        if pick < len(arrows):
            U |= 1 << arrows[pick]
    return U


def test_10_convolution_laws(verdict):
    t0 = time.perf_counter()
    rng = random.Random(0)
    ok = True
    cats = [universal_category(catalog.semigroup(n)).category for n in LOCAL_UNITS]
    cats += [catalog.category(f"pair-groupoid:{k}") for k in (1, 2, 3)]
    for C in cats:
        for _ in range(100):
            U, V = random_slice(C, rng), random_slice(C, rng)
            ok &= convolution(indicator(C, U), indicator(C, V)) == indicator(C, slice_product(C, U, V))
    C = universal_category(catalog.semigroup("i:2")).category
    for _ in range(100):
        f, g, h = ({a: rng.randint(-2, 2) for a in rng.sample(range(C.size), 3)} for _ in range(3))
        x, y, z = (arrow_element(C, d) for d in (f, g, h))
        left = convolution(convolution(x, y), z)
        ok &= left == convolution(x, convolution(y, z))
        ok &= left.as_dict() == oracles.triple_sum(C, f, g, h)
    verdict(10, ok, f"chi_U * chi_V = chi_UV on {len(cats)} categories; 100 associativity triples",
            time.perf_counter() - t0, 10)


def all_semilattices(max_size):
    """Every finite meet-semilattice up to isomorphism, grown by adding maximal elements."""
    out = {1: [((True,),)]}
    for n in range(2, max_size + 1):
        seen, found = set(), []
        for L in out[n - 1]:
            m = n - 1
            for D in range(1, 1 << m):
                members = [i for i in range(m) if D >> i & 1]
                if any(not (D >> j & 1) for i in members for j in range(m) if L[j][i]):
                    continue
                if not all(any(all(L[k][j] for k in members if L[k][y]) for j in members if L[j][y])
                           for y in range(m)):
                    continue
                M = [list(r) + [bool(D >> i & 1)] for i, r in enumerate(L)] + [[False] * m + [True]]
                key = min(tuple(tuple(M[p[i]][p[j]] for j in range(n)) for i in range(n))
                          for p in permutations(range(n)))
                if key not in seen:
                    seen.add(key)
                    found.append(tuple(tuple(r) for r in key))
        out[n] = found
    return [L for n in sorted(out) for L in out[n]]


def as_semilattice(L):
    n = len(L)
    meet = [[max((k for k in range(n) if L[k][i] and L[k][j]), key=lambda k: sum(L[x][k] for x in range(n)))
             for j in range(n)] for i in range(n)]
    return FinSemilattice(tuple(tuple(r) for r in meet))


def test_11_semilattice_layer(verdict):
    t0 = time.perf_counter()
    orders = all_semilattices(6)
    counts = [sum(len(L) == n for L in orders) for n in range(1, 7)]
    ok = counts == [1, 1, 2, 5, 15, 53]
    for L in orders:
        E = as_semilattice(L)
        F = filters(E)
        ok &= len(F) == E.size and all(f.members == frozenset(i for i in range(E.size) if E.up[f.generator(E)] >> i & 1)
                                       for f in F)
        B, _ = booleanization(E)
        ok &= B.is_powerset()
        for ideal in order_ideals(E):
            U = order_ideal_psi_inv(E, ideal)
            ok &= order_ideal_psi(E, U) == ideal and order_ideal_psi_inv(E, order_ideal_psi(E, U)) == U
    verdict(11, ok, f"{len(orders)} semilattices of size <= 6 (counts {counts})", time.perf_counter() - t0, 5)


def test_12_determinism(verdict):
    t0 = time.perf_counter()
    ok, n = True, 0
    for name in ["paper-4", "exg:2x2", "pse:z3", "chain:3", "r:2", "pair-groupoid:2"]:
        doc = resolve(f"catalog:{name}")
        for command in COMMANDS:
            if command == "export":
                continue
            try:
                texts = [dumps(run(command, doc, Options(jobs=j)).to_json()) for j in (1, 1, 8)]
            except GermworkError as exc:  # incompatible kinds: the CLI would exit 2
                texts = [type(exc).__name__] * 3
            ok &= texts[0] == texts[1] == texts[2]
            n += 1
    verdict(12, ok, f"{n} command/input reports byte-identical over two runs and jobs 1 vs 8",
            time.perf_counter() - t0, 30)

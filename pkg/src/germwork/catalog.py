"""Built-in example structures, addressed by name.

Semigroups: ``trivial``, ``pt:n``, ``i:n`` (n <= 4), ``r:2``, ``paper-4``,
``nolu:3``, ``exg:KxM``, ``chain:k``, ``antichain:k``, ``free:k``,
``group:m``, ``pse:swap``, ``pse:small``, ``pse:z3``, ``act:t2``.
Categories: ``pair-groupoid:n``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from itertools import product

from .category import FiniteCategory, pair_groupoid
from .core import PartialMap, UnarySemigroup, build_from_elements, build_from_table, permute
from .errors import UnknownName
from .lattice import antichain_with_bottom, chain, free_semilattice, semilattice_as_semigroup


@dataclass(frozen=True)
class WorkspaceDocument:
    kind: str
    name: str
    payload: object


def partial_maps(n):
    return sorted(
        (PartialMap(n, im) for im in product([None, *range(n)], repeat=n)),
        key=PartialMap.sort_key,
    )


def _map_semigroup(maps, n):
    from .core import map_label

    return build_from_elements(
        maps,
        lambda a, b: a.compose(b),
        lambda m: PartialMap.identity(n, m.domain),
        lambda m: PartialMap.identity(n, m.codomain),
        labels=[map_label(m) for m in maps],
        maps=maps,
    )


def full_partial_transformations(n):
    """PT(n) with star and plus; (n+1)^n elements."""
    return _map_semigroup(partial_maps(n), n)


def symmetric_inverse_monoid(n):
    """I(n): partial injections, with star and plus."""
    return _map_semigroup([m for m in partial_maps(n) if m.is_injective()], n)


def binary_relations(n):
    """All relations on n points.  A pair (y, x) means x is related to y."""
    pts = [(y, x) for y in range(n) for x in range(n)]
    rels = []
    for bitsel in range(1 << len(pts)):
        rels.append(frozenset(p for i, p in enumerate(pts) if (bitsel >> i) & 1))

    def mul(r, s):  # s first
        return frozenset((z, x) for (y, x) in s for (z, w) in r if w == y)

    def star(r):
        return frozenset((x, x) for (_, x) in r)

    def plus(r):
        return frozenset((y, y) for (y, _) in r)

    def label(r):
        return "".join("1" if p in r else "0" for p in pts)

    return build_from_elements(rels, mul, star, plus, labels=[label(r) for r in rels])


def four_element():
    """S = {∅, f, g, 1} in PT({a, b}); f = id on {a}, g sends a to b."""
    from .core import generate_in_pt

    f = PartialMap(2, (0, None))
    g = PartialMap(2, (1, None))
    one = PartialMap.identity(2)
    S = generate_in_pt(2, [f, g, one], ("star",))
    order = [S.maps.index(m) for m in (PartialMap.identity(2, ()), f, g, one)]
    S = permute(S, order)
    return UnarySemigroup(S.mul, S.star, None, ("∅", "f", "g", "1"), S.maps)


def no_local_units():
    """{∅, f, g} from the four-element example: g has no left unit."""
    from .core import generate_in_pt

    f = PartialMap(2, (0, None))
    g = PartialMap(2, (1, None))
    S = generate_in_pt(2, [f, g], ("star",))
    order = [S.maps.index(m) for m in (PartialMap.identity(2, ()), f, g)]
    S = permute(S, order)
    return UnarySemigroup(S.mul, S.star, None, ("∅", "f", "g"), S.maps)


def chain_times_cyclic(k, m):
    """E x Z/m with E a k-chain; (e, g)* = (e, 0)."""
    elems = [(e, g) for e in range(k) for g in range(m)]
    return build_from_elements(
        elems,
        lambda a, b: (min(a[0], b[0]), (a[1] + b[1]) % m),
        lambda a: (a[0], 0),
        lambda a: (a[0], 0),
        labels=[f"c{e}g{g}" for e, g in elems],
    )


def cyclic_group(m):
    elems = list(range(m))
    return build_from_table(
        [[(a + b) % m for b in elems] for a in elems],
        [0] * m,
        [0] * m,
        labels=[f"g{a}" for a in elems],
    )


def trivial():
    return build_from_table([[0]], [0], [0], labels=["1"])


def p_semigroup(group_perms, meet, labels, Y):
    """McAlister P-semigroup P(G, X, Y) with X a finite meet-semilattice.

    ``group_perms`` lists G as permutations of X (order automorphisms, the
    first being the identity), ``Y`` an order ideal and subsemilattice of X.
    Elements are pairs (A, g) with A in Y and g^-1 A in Y; the product is
    (A, g)(B, h) = (A ∧ gB, gh).  This is test scaffolding for E-unitary
    inverse semigroups.
    """
    G = [tuple(p) for p in group_perms]
    gpos = {p: i for i, p in enumerate(G)}

    def gmul(i, j):
        return gpos[tuple(G[i][G[j][x]] for x in range(len(meet)))]

    def ginv(i):
        inv = [0] * len(meet)
        for x, y in enumerate(G[i]):
            inv[y] = x
        return gpos[tuple(inv)]

    Yset = set(Y)
    elems = [(A, g) for g in range(len(G)) for A in sorted(Yset) if G[ginv(g)][A] in Yset]

    def mul(a, b):
        (A, g), (B, h) = a, b
        return (meet[A][G[g][B]], gmul(g, h))

    def star(a):
        A, g = a
        return (G[ginv(g)][A], 0)

    def plus(a):
        return (a[0], 0)

    return build_from_elements(
        elems, mul, star, plus, labels=[f"({labels[A]},g{g})" for A, g in elems]
    )


def transformations_on_subsets():
    """T(2) acting totally on {0, 1}, with E all four subsets.

    The partial action product has 16 pairs (t, e); it is proper, F-restriction
    and not inverse.
    """
    from .proper import MonoidPartialAction, partial_action_product, reduced_monoid

    maps = [PartialMap(2, im) for im in ((0, 1), (1, 0), (0, 0), (1, 1))]
    T = build_from_elements(
        maps, lambda a, b: a.compose(b), labels=["id", "sw", "c0", "c1"]
    )
    A = MonoidPartialAction(reduced_monoid(T), 2, tuple(maps))
    fam = (0b00, 0b01, 0b10, 0b11)
    return partial_action_product(A, fam, ["0", "a", "b", "ab"]).semigroup


def _swap_data(Y):
    # X = {0, a, b} with 0 below a and b; Z/2 swaps a and b
    meet = [[0, 0, 0], [0, 1, 0], [0, 0, 2]]
    perms = [(0, 1, 2), (0, 2, 1)]
    return p_semigroup(perms, meet, ["0", "a", "b"], Y)


def _z3_data():
    meet = [[0, 0, 0, 0], [0, 1, 0, 0], [0, 0, 2, 0], [0, 0, 0, 3]]
    r = (0, 2, 3, 1)
    r2 = (0, 3, 1, 2)
    return p_semigroup([(0, 1, 2, 3), r, r2], meet, ["0", "a", "b", "c"], [0, 1, 2])


_PATTERNS = [
    (r"trivial", lambda m: trivial()),
    (r"pt:([1-4])", lambda m: full_partial_transformations(int(m[1]))),
    (r"i:([1-4])", lambda m: symmetric_inverse_monoid(int(m[1]))),
    (r"r:2", lambda m: binary_relations(2)),
    (r"paper-4", lambda m: four_element()),
    (r"nolu:3", lambda m: no_local_units()),
    (r"exg:(\d+)x(\d+)", lambda m: chain_times_cyclic(int(m[1]), int(m[2]))),
    (r"chain:(\d+)", lambda m: semilattice_as_semigroup(chain(int(m[1])))),
    (r"antichain:(\d+)", lambda m: semilattice_as_semigroup(antichain_with_bottom(int(m[1])))),
    (r"free:(\d+)", lambda m: semilattice_as_semigroup(free_semilattice(int(m[1])))),
    (r"group:(\d+)", lambda m: cyclic_group(int(m[1]))),
    (r"pse:swap", lambda m: _swap_data([0, 1, 2])),
    (r"pse:small", lambda m: _swap_data([0, 1])),
    (r"pse:z3", lambda m: _z3_data()),
    (r"act:t2", lambda m: transformations_on_subsets()),
]

CATEGORY_PATTERNS = [
    (r"pair-groupoid:(\d+)", lambda m: pair_groupoid(int(m[1]))),
]

# Instances used by the "every catalog semigroup" sweeps.  pt:4 and i:4 are
# left out to keep exhaustive O(n^3) sweeps at desk scale; they remain
# available by name.
SWEEP = (
    "trivial",
    "pt:1",
    "pt:2",
    "pt:3",
    "i:1",
    "i:2",
    "i:3",
    "r:2",
    "paper-4",
    "nolu:3",
    "exg:2x2",
    "exg:2x3",
    "exg:3x2",
    "chain:2",
    "chain:3",
    "antichain:2",
    "antichain:3",
    "free:2",
    "free:3",
    "group:1",
    "group:3",
    "pse:swap",
    "pse:small",
    "pse:z3",
    "act:t2",
)

NAMES = (
    "trivial",
    "pt:n (n<=4)",
    "i:n (n<=4)",
    "r:2",
    "paper-4",
    "nolu:3",
    "exg:KxM",
    "chain:k",
    "antichain:k",
    "free:k",
    "group:m",
    "pse:swap",
    "pse:small",
    "pse:z3",
    "act:t2",
    "pair-groupoid:n",
)


@lru_cache(maxsize=None)
def semigroup(name: str) -> UnarySemigroup:
    for pat, build in _PATTERNS:
        m = re.fullmatch(pat, name)
        if m:
            return build(m)
    raise UnknownName(f"no catalog semigroup called {name!r}")


@lru_cache(maxsize=None)
def category(name: str) -> FiniteCategory:
    for pat, build in CATEGORY_PATTERNS:
        m = re.fullmatch(pat, name)
        if m:
            return build(m)
    raise UnknownName(f"no catalog category called {name!r}")


def catalog(name: str) -> WorkspaceDocument:
    for pat, _ in CATEGORY_PATTERNS:
        if re.fullmatch(pat, name):
            return WorkspaceDocument("category", name, category(name))
    return WorkspaceDocument("semigroup", name, semigroup(name))


def sweep():
    """(name, semigroup) pairs of the sweep list."""
    return [(n, semigroup(n)) for n in SWEEP]

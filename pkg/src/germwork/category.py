"""Finite categories, slices and slice semigroups.

Arrows are ``0..n-1``.  A product ``xy`` (y first) is defined when
``ran(y) == dom(x)``; identities are arrows that equal their own dom.  A
slice is a bitmask of arrows on which ``dom`` is injective; a bislice has
``ran`` injective too.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product as iproduct

from .core import UnarySemigroup, build_from_table, check_axioms, check_boolean_restriction
from .errors import GermworkError, NotASlice, NotGroupoid, SizeMismatch, TooLarge
from .lattice import bits

SLICE_GUARD = 200_000


@dataclass(frozen=True)
class FiniteCategory:
    """``dom``/``ran`` map arrows to identity arrows; ``comp[(x, y)] = xy``."""

    dom: tuple
    ran: tuple
    comp: dict = field(hash=False)
    labels: tuple | None = None

    @property
    def size(self):
        return len(self.dom)

    def label(self, a):
        return self.labels[a] if self.labels is not None else str(a)

    @cached_property
    def units(self):
        return tuple(sorted(set(self.dom) | set(self.ran)))

    def composable(self, x, y):
        return self.ran[y] == self.dom[x]

    def compose(self, x, y):
        """``xy`` or None."""
        return self.comp.get((x, y))

    @cached_property
    def by_dom(self):
        out = {u: [] for u in self.units}
        for a in range(self.size):
            out[self.dom[a]].append(a)
        return out

    @cached_property
    def by_ran(self):
        out = {u: [] for u in self.units}
        for a in range(self.size):
            out[self.ran[a]].append(a)
        return out

    def inverse(self, x):
        for y in self.by_dom[self.ran[x]]:
            if self.comp.get((y, x)) == self.dom[x] and self.comp.get((x, y)) == self.ran[x]:
                return y
        return None

    def is_groupoid(self):
        return all(self.inverse(x) is not None for x in range(self.size))

    def to_json(self):
        doc = {
            "arrows": self.size,
            "dom": list(self.dom),
            "ran": list(self.ran),
            "compose": sorted([x, y, z] for (x, y), z in self.comp.items()),
        }
        if self.labels is not None:
            doc["labels"] = list(self.labels)
        return doc

    @classmethod
    def from_json(cls, doc):
        comp = {(int(x), int(y)): int(z) for x, y, z in doc["compose"]}
        labels = doc.get("labels")
        C = cls(tuple(doc["dom"]), tuple(doc["ran"]), comp, None if labels is None else tuple(labels))
        v = check_category_axioms(C)
        if v is not None:
            raise GermworkError(f"not a category: {v}")
        return C


def check_category_axioms(C: FiniteCategory):
    """Return None or a description of the first failed axiom."""
    n = C.size
    if len(C.ran) != n:
        raise SizeMismatch("dom and ran differ in length")
    for u in C.units:
        if C.dom[u] != u or C.ran[u] != u:
            return f"unit {u} is not its own dom and ran"
    for (x, y), z in C.comp.items():
        if not C.composable(x, y):
            return f"product {x}.{y} defined but ran({y}) != dom({x})"
    for x in range(n):
        for y in range(n):
            z = C.comp.get((x, y))
            if C.composable(x, y):
                if z is None:
                    return f"product {x}.{y} missing"
                if C.dom[z] != C.dom[y] or C.ran[z] != C.ran[x]:
                    return f"dom/ran of {x}.{y} wrong"
    for x in range(n):
        if C.comp.get((C.ran[x], x)) != x or C.comp.get((x, C.dom[x])) != x:
            return f"identity law fails at {x}"
    for (x, y), xy in C.comp.items():
        for z in C.by_ran[C.dom[y]]:
            if C.comp[(xy, z)] != C.comp[(x, C.comp[(y, z)])]:
                return f"associativity fails at ({x}, {y}, {z})"
    return None


def category_from_partial_table(arrows, dom, ran, mul, labels=None):
    """Build a FiniteCategory from concrete hashable arrows.

    ``dom``/``ran`` map an arrow to an arrow, ``mul(x, y)`` is called only
    when ``ran(y) == dom(x)``.
    """
    index = {a: i for i, a in enumerate(arrows)}
    d = tuple(index[dom(a)] for a in arrows)
    r = tuple(index[ran(a)] for a in arrows)
    comp = {}
    for i, x in enumerate(arrows):
        for j, y in enumerate(arrows):
            if r[j] == d[i]:
                comp[(i, j)] = index[mul(x, y)]
    C = FiniteCategory(d, r, comp, None if labels is None else tuple(labels))
    v = check_category_axioms(C)
    if v is not None:
        raise GermworkError(f"not a category: {v}")
    return C


def pair_groupoid(n):
    """Arrows (y, x) from x to y on n objects."""
    arrows = [(y, x) for y in range(n) for x in range(n)]
    return category_from_partial_table(
        arrows,
        lambda a: (a[1], a[1]),
        lambda a: (a[0], a[0]),
        lambda a, b: (a[0], b[1]),
        labels=[f"{y}<-{x}" for y, x in arrows],
    )


# ---------------------------------------------------------------------------
# slices


def is_slice(C: FiniteCategory, U: int):
    seen = set()
    for a in bits(U):
        if C.dom[a] in seen:
            return False
        seen.add(C.dom[a])
    return True


def is_bislice(C: FiniteCategory, U: int):
    if not is_slice(C, U):
        return False
    rans = [C.ran[a] for a in bits(U)]
    return len(rans) == len(set(rans))


def _require_slice(C, U):
    if U < 0 or U >> C.size:
        raise NotASlice("mask names arrows outside the category")
    if not is_slice(C, U):
        raise NotASlice("dom is not injective on the set", tuple(bits(U)))


def slice_product(C: FiniteCategory, U: int, V: int):
    """``UV = {xy : x in U, y in V, composable}``."""
    _require_slice(C, U)
    _require_slice(C, V)
    out = 0
    by_dom = {C.dom[x]: x for x in bits(U)}
    for y in bits(V):
        x = by_dom.get(C.ran[y])
        if x is not None:
            out |= 1 << C.comp[(x, y)]
    if not is_slice(C, out):
        raise GermworkError("internal: product of slices is not a slice")
    return out


def slice_star(C: FiniteCategory, U: int):
    """``U* = dom(U)`` as a set of identity arrows."""
    _require_slice(C, U)
    out = 0
    for a in bits(U):
        out |= 1 << C.dom[a]
    return out


def slice_ran(C: FiniteCategory, U: int):
    """``U+ = ran(U)`` as a set of identity arrows."""
    out = 0
    for a in bits(U):
        out |= 1 << C.ran[a]
    return out


def enumerate_slices(C: FiniteCategory, bislices=False, guard=SLICE_GUARD):
    """All slices (or bislices) as sorted bitmasks, the empty slice first.

    A slice picks at most one arrow per dom-unit, so the candidates are a
    product over per-unit buckets.
    """
    buckets = [[None] + C.by_dom[u] for u in C.units]
    count = 1
    for b in buckets:
        count *= len(b)
    if not bislices and count > guard:
        raise TooLarge(f"{count} slices exceed the guard of {guard}")
    out = []
    if bislices:
        # depth-first with used-ran pruning
        def walk(i, mask, used):
            if len(out) > guard:
                raise TooLarge(f"more than {guard} bislices")
            if i == len(buckets):
                out.append(mask)
                return
            for a in buckets[i]:
                if a is None:
                    walk(i + 1, mask, used)
                elif C.ran[a] not in used:
                    walk(i + 1, mask | (1 << a), used | {C.ran[a]})

        walk(0, 0, frozenset())
    else:
        for choice in iproduct(*buckets):
            m = 0
            for a in choice:
                if a is not None:
                    m |= 1 << a
            out.append(m)
    out.sort(key=lambda m: (bin(m).count("1"), bits(m)))
    return out


def slice_label(C, U):
    if U == 0:
        return "{}"
    return "{" + ",".join(C.label(a) for a in bits(U)) + "}"


@dataclass(frozen=True)
class SliceSemigroup:
    semigroup: UnarySemigroup
    slices: tuple
    category: FiniteCategory

    def index(self, U):
        return self.slices.index(U)

    @cached_property
    def position(self):
        return {U: i for i, U in enumerate(self.slices)}


def slice_semigroup(C: FiniteCategory, bislices=False, guard=SLICE_GUARD, check=True):
    """Slices (or bislices) under UV and U* (and U+ for bislices).

    For all slices the result must pass the Boolean restriction checks; for
    bislices it must be a birestriction semigroup.
    """
    slices = enumerate_slices(C, bislices=bislices, guard=guard)
    if len(slices) > 4096:
        raise TooLarge(f"{len(slices)} slices; table construction refused")
    pos = {U: i for i, U in enumerate(slices)}
    mul = [[pos[slice_product(C, U, V)] for V in slices] for U in slices]
    star = [pos[slice_star(C, U)] for U in slices]
    plus = [pos[slice_ran(C, U)] for U in slices] if bislices else None
    S = build_from_table(mul, star, plus, labels=[slice_label(C, U) for U in slices])
    if check:
        if bislices:
            v = check_axioms(S, "birestriction")
            if v is not None:
                raise GermworkError(f"internal: bislices fail {v.describe(S)}")
        else:
            rep = check_boolean_restriction(S)
            if not rep.ok:
                raise GermworkError(f"internal: slices fail {rep.describe(S)}")
    return SliceSemigroup(S, tuple(slices), C)


# ---------------------------------------------------------------------------
# export


def category_to_dot(C: FiniteCategory, name="C"):
    """Units as nodes, every arrow (identities too, as loops) as an edge dom -> ran."""
    lines = [f"digraph {name} {{"]
    for u in C.units:
        lines.append(f'  u{u} [label="{C.label(u)}"];')
    for a in range(C.size):
        lines.append(f'  u{C.dom[a]} -> u{C.ran[a]} [label="{C.label(a)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def groupoid_inverse_table(C: FiniteCategory):
    inv = [C.inverse(x) for x in range(C.size)]
    if any(v is None for v in inv):
        raise NotGroupoid("some arrow has no inverse")
    return inv

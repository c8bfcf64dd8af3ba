"""Finite unary and bi-unary semigroups.

A semigroup lives on the dense carrier ``0..n-1``.  Multiplication is a
table, the unary operations ``*`` (domain) and ``+`` (range) are arrays.
Derived relations (natural order, compatibility, sigma) are numpy boolean
matrices wrapped in :class:`ElementRelation`.

Partial maps compose with the right factor acting first,
``(st)(x) = s(t(x))``, which makes ``x x* = x`` read "first restrict to the
domain, then apply x".
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Callable, Hashable, Iterable, Sequence

import numpy as np

from .errors import (
    GermworkError,
    NoRestrictionZero,
    NonAssociative,
    NotCompatible,
    SchemaError,
    SignatureTooWeak,
    SizeMismatch,
    TooLarge,
)

SIZE_GUARD = 4096

# ---------------------------------------------------------------------------
# partial maps


@dataclass(frozen=True)
class PartialMap:
    """Partial self-map of ``{0..ground-1}``; ``image[x] is None`` off the domain."""

    ground: int
    image: tuple

    def __post_init__(self):
        if len(self.image) != self.ground:
            raise SizeMismatch(f"map has {len(self.image)} entries, ground is {self.ground}")
        for v in self.image:
            if v is not None and not (0 <= v < self.ground):
                raise SizeMismatch(f"image value {v} outside ground set")

    @classmethod
    def identity(cls, ground, subset=None):
        keep = range(ground) if subset is None else set(subset)
        return cls(ground, tuple(x if x in keep else None for x in range(ground)))

    @classmethod
    def from_dict(cls, ground, mapping):
        return cls(ground, tuple(mapping.get(x) for x in range(ground)))

    def __call__(self, x):
        return self.image[x]

    @property
    def domain(self):
        return frozenset(x for x, v in enumerate(self.image) if v is not None)

    @property
    def codomain(self):
        """The image set (points actually hit)."""
        return frozenset(v for v in self.image if v is not None)

    def compose(self, other):
        """``self . other``: apply ``other`` first."""
        if other.ground != self.ground:
            raise SizeMismatch("maps on different ground sets")
        return PartialMap(
            self.ground,
            tuple(None if v is None else self.image[v] for v in other.image),
        )

    def restrict(self, subset):
        keep = set(subset)
        return PartialMap(
            self.ground, tuple(v if x in keep else None for x, v in enumerate(self.image))
        )

    def is_restriction_of(self, other):
        return all(v is None or other.image[x] == v for x, v in enumerate(self.image))

    def is_injective(self):
        vals = [v for v in self.image if v is not None]
        return len(vals) == len(set(vals))

    def inverse(self):
        if not self.is_injective():
            raise GermworkError("map is not injective")
        inv = [None] * self.ground
        for x, v in enumerate(self.image):
            if v is not None:
                inv[v] = x
        return PartialMap(self.ground, tuple(inv))

    def sort_key(self):
        return tuple(-1 if v is None else v for v in self.image)

    def to_json(self):
        return {"ground": self.ground, "map": list(self.image)}

    @classmethod
    def from_json(cls, doc):
        return cls(int(doc["ground"]), tuple(doc["map"]))


# ---------------------------------------------------------------------------
# semigroups


@dataclass(frozen=True)
class Violation:
    """A failed law together with the lexicographically first witness."""

    law: str
    witness: tuple

    def describe(self, S=None):
        if S is None:
            names = [str(w) for w in self.witness]
        else:
            names = [S.label(w) for w in self.witness]
        return f"{self.law} fails at ({', '.join(names)})"


def _first_true(mask):
    idx = np.argwhere(mask)
    if len(idx) == 0:
        return None
    return tuple(int(v) for v in idx[0])


def _associativity_witness(M):
    n = M.shape[0]
    for a in range(n):
        left = M[M[a]]  # (ab)c indexed [b, c]
        right = M[a][M]  # a(bc) indexed [b, c]
        bad = _first_true(left != right)
        if bad is not None:
            return (a,) + bad
    return None


@dataclass(frozen=True)
class UnarySemigroup:
    """Finite semigroup with optional star and plus tables.

    Construction verifies table shapes and associativity.  Inputs larger than
    ``SIZE_GUARD`` are refused unless ``force`` is set.
    """

    mul: tuple
    star: tuple | None = None
    plus: tuple | None = None
    labels: tuple | None = None
    maps: tuple | None = None
    force: bool = field(default=False, compare=False, repr=False)

    def __post_init__(self):
        n = len(self.mul)
        if n == 0:
            raise SizeMismatch("empty carrier")
        if n > SIZE_GUARD and not self.force:
            raise TooLarge(f"{n} elements exceeds the guard of {SIZE_GUARD}; use force")
        for row in self.mul:
            if len(row) != n:
                raise SizeMismatch("multiplication table is not square")
        for name in ("star", "plus", "labels", "maps"):
            t = getattr(self, name)
            if t is not None and len(t) != n:
                raise SizeMismatch(f"{name} table has {len(t)} entries, carrier has {n}")
        if self.plus is not None and self.star is None:
            raise SizeMismatch("a plus table needs a star table")
        for t in (self.star, self.plus):
            if t is not None and any(not (0 <= v < n) for v in t):
                raise SizeMismatch("unary table value out of range")
        if any(not (0 <= v < n) for row in self.mul for v in row):
            raise SizeMismatch("product value out of range")
        bad = _associativity_witness(self.M)
        if bad is not None:
            a, b, c = bad
            raise NonAssociative(f"(ab)c != a(bc) at a={a}, b={b}, c={c}", witness=bad)

    # --- basic accessors ---------------------------------------------------
    @property
    def size(self):
        return len(self.mul)

    def __len__(self):
        return len(self.mul)

    @property
    def signature(self):
        if self.star is None:
            return "plain"
        if self.plus is None:
            return "star"
        return "star-plus"

    @cached_property
    def M(self):
        return np.array(self.mul, dtype=np.int64)

    @cached_property
    def ST(self):
        if self.star is None:
            raise SignatureTooWeak("semigroup has no star")
        return np.array(self.star, dtype=np.int64)

    @cached_property
    def PL(self):
        if self.plus is None:
            raise SignatureTooWeak("semigroup has no plus")
        return np.array(self.plus, dtype=np.int64)

    def label(self, i):
        return self.labels[i] if self.labels is not None else str(i)

    def index_of(self, label):
        if self.labels is None:
            return int(label)
        return self.labels.index(label)

    def prod(self, a, b):
        return self.mul[a][b]

    def product(self, elems):
        it = iter(elems)
        acc = next(it)
        for x in it:
            acc = self.mul[acc][x]
        return acc

    def same_tables(self, other):
        return (self.mul, self.star, self.plus) == (other.mul, other.star, other.plus)

    def with_plus(self, plus):
        return UnarySemigroup(self.mul, self.star, tuple(plus), self.labels, self.maps, self.force)

    def without_plus(self):
        return UnarySemigroup(self.mul, self.star, None, self.labels, self.maps, self.force)

    def to_json(self):
        doc = {"size": self.size, "mul": [list(r) for r in self.mul]}
        if self.star is not None:
            doc["star"] = list(self.star)
        if self.plus is not None:
            doc["plus"] = list(self.plus)
        if self.labels is not None:
            doc["labels"] = list(self.labels)
        if self.maps is not None:
            doc["maps"] = [m.to_json() for m in self.maps]
        return doc

    @classmethod
    def from_json(cls, doc, force=False):
        size = int(doc.get("size", len(doc["mul"])))
        if size != len(doc["mul"]):
            raise SizeMismatch("size field disagrees with table")
        maps = doc.get("maps")
        return build_from_table(
            doc["mul"],
            doc.get("star"),
            doc.get("plus"),
            labels=doc.get("labels"),
            maps=None if maps is None else [PartialMap.from_json(m) for m in maps],
            force=force,
        )


def build_from_table(mul, star=None, plus=None, labels=None, maps=None, force=False):
    """Build a semigroup from plain nested lists, checking shape and associativity."""
    return UnarySemigroup(
        tuple(tuple(int(v) for v in row) for row in mul),
        None if star is None else tuple(int(v) for v in star),
        None if plus is None else tuple(int(v) for v in plus),
        None if labels is None else tuple(str(v) for v in labels),
        None if maps is None else tuple(maps),
        force,
    )


def build_from_elements(
    elements: Sequence[Hashable],
    mul: Callable,
    star: Callable | None = None,
    plus: Callable | None = None,
    labels=None,
    maps=None,
    force=False,
):
    """Tabulate operations given on concrete hashable elements.

    Raises if some operation leaves the element list.
    """
    index = {e: i for i, e in enumerate(elements)}
    if len(index) != len(elements):
        raise SizeMismatch("duplicate elements")

    def look(v):
        try:
            return index[v]
        except KeyError:
            raise GermworkError(f"operation leaves the carrier: {v!r}") from None

    table = [[look(mul(a, b)) for b in elements] for a in elements]
    st = None if star is None else [look(star(a)) for a in elements]
    pl = None if plus is None else [look(plus(a)) for a in elements]
    return build_from_table(table, st, pl, labels=labels, maps=maps, force=force)


def permute(S: UnarySemigroup, order: Sequence[int]):
    """Relabel so that new element ``i`` is old element ``order[i]``."""
    order = list(order)
    if sorted(order) != list(range(S.size)):
        raise SizeMismatch("order is not a permutation")
    pos = {old: new for new, old in enumerate(order)}
    mul = [[pos[S.mul[a][b]] for b in order] for a in order]
    st = None if S.star is None else [pos[S.star[a]] for a in order]
    pl = None if S.plus is None else [pos[S.plus[a]] for a in order]
    labels = None if S.labels is None else [S.labels[a] for a in order]
    maps = None if S.maps is None else [S.maps[a] for a in order]
    return build_from_table(mul, st, pl, labels, maps, force=S.force)


def generate_in_pt(ground: int, generators: Iterable[PartialMap], close_under=("star",)):
    """Close a set of partial maps under composition and the requested unary ops.

    ``star`` is the identity on the domain, ``plus`` the identity on the image.
    Elements are sorted by their image vector (undefined counts as -1), so the
    empty map comes first.  Each element keeps its concrete map in ``maps``.
    """
    close_under = set(close_under)
    unknown = close_under - {"star", "plus"}
    if unknown:
        raise SchemaError(f"unknown closure operations: {sorted(unknown)}")
    if "plus" in close_under and "star" not in close_under:
        raise SchemaError("closing under plus alone is not supported")

    def unary(m):
        out = []
        if "star" in close_under:
            out.append(PartialMap.identity(ground, m.domain))
        if "plus" in close_under:
            out.append(PartialMap.identity(ground, m.codomain))
        return out

    seen = []
    known = set()
    queue = deque()

    def add(m):
        if m.ground != ground:
            raise SizeMismatch("generator on a different ground set")
        if m not in known:
            known.add(m)
            queue.append(m)

    for g in generators:
        add(g)
    if not queue:
        add(PartialMap.identity(ground))
    while queue:
        m = queue.popleft()
        seen.append(m)
        for u in unary(m):
            add(u)
        for x in list(seen):
            add(m.compose(x))
            add(x.compose(m))
    elems = sorted(seen, key=PartialMap.sort_key)
    star = (lambda m: PartialMap.identity(ground, m.domain)) if "star" in close_under else None
    plus = (lambda m: PartialMap.identity(ground, m.codomain)) if "plus" in close_under else None
    return build_from_elements(
        elems,
        lambda a, b: a.compose(b),
        star,
        plus,
        labels=[map_label(m) for m in elems],
        maps=elems,
    )


def map_label(m: PartialMap):
    """``"1-"`` for the map sending point 0 to 1 with point 1 undefined."""
    return "".join("-" if v is None else str(v) for v in m.image)


# ---------------------------------------------------------------------------
# axiom checks


def _need(S, sig):
    order = {"plain": 0, "star": 1, "star-plus": 2}
    if order[S.signature] < order[sig]:
        raise SignatureTooWeak(f"check needs signature {sig}, semigroup has {S.signature}")


def _law_tables(S):
    """All star/plus laws as (name, mask-builder) pairs, built lazily."""
    n = S.size
    M = S.M
    ar = np.arange(n)
    X = ar[:, None]
    Y = ar[None, :]

    def star_laws():
        st = S.ST
        A = M[st[X], st[Y]]
        return [
            ("x x* = x", lambda: (M[ar, st] != ar)[:, None] & (Y == 0)),
            ("x* y* = y* x*", lambda: A != A.T),
            ("(x* y*)* = x* y*", lambda: st[A] != A),
            ("(xy)* = (x* y)*", lambda: st[M] != st[M[st[X], Y]]),
        ]

    def restriction_law():
        st = S.ST
        return [("x* y = y (xy)*", lambda: M[st[X], Y] != M[Y, st[M]])]

    def plus_laws():
        pl = S.PL
        B = M[pl[X], pl[Y]]
        return [
            ("x+ x = x", lambda: (M[pl, ar] != ar)[:, None] & (Y == 0)),
            ("x+ y+ = y+ x+", lambda: B != B.T),
            ("(x+ y+)+ = x+ y+", lambda: pl[B] != B),
            ("(xy)+ = (x y+)+", lambda: pl[M] != pl[M[X, pl[Y]]]),
        ]

    def corestriction_law():
        pl = S.PL
        return [("x y+ = (xy)+ x", lambda: M[X, pl[Y]] != M[pl[M], X])]

    def linking_laws():
        st, pl = S.ST, S.PL
        return [
            ("(x+)* = x+", lambda: (st[pl] != pl)[:, None] & (Y == 0)),
            ("(x*)+ = x*", lambda: (pl[st] != st)[:, None] & (Y == 0)),
        ]

    return star_laws, restriction_law, plus_laws, corestriction_law, linking_laws


AXIOM_CLASSES = (
    "ehresmann",
    "restriction",
    "coehresmann",
    "corestriction",
    "biEhresmann",
    "birestriction",
    "range",
    "inverse",
)


def check_axioms(S: UnarySemigroup, which: str):
    """Exhaustively check one axiom class; return None or the first Violation."""
    if which not in AXIOM_CLASSES:
        raise ValueError(f"unknown axiom class {which!r}")
    if which == "inverse":
        return _check_inverse(S)
    star_laws, restriction_law, plus_laws, corestriction_law, linking_laws = _law_tables(S)
    needs = {
        "ehresmann": ("star", [star_laws]),
        "restriction": ("star", [star_laws, restriction_law]),
        "coehresmann": ("star-plus", [plus_laws]),
        "corestriction": ("star-plus", [plus_laws, corestriction_law]),
        "biEhresmann": ("star-plus", [star_laws, plus_laws, linking_laws]),
        "birestriction": (
            "star-plus",
            [star_laws, plus_laws, linking_laws, restriction_law, corestriction_law],
        ),
        "range": ("star-plus", [star_laws, plus_laws, linking_laws, restriction_law]),
    }
    sig, groups = needs[which]
    _need(S, sig)
    for group in groups:
        for name, build in group():
            bad = _first_true(build())
            if bad is not None:
                if name in ("x x* = x", "x+ x = x", "(x+)* = x+", "(x*)+ = x*"):
                    bad = bad[:1]
                return Violation(name, bad)
    return None


def inverse_table(S: UnarySemigroup):
    """For each a, the list of b with aba = a and bab = b."""
    M = S.M
    ar = np.arange(S.size)
    ok = (M[M, ar[:, None]] == ar[:, None]) & (M[M.T, ar[None, :]] == ar[None, :])
    return [list(np.nonzero(row)[0]) for row in ok]


def _check_inverse(S):
    for a, inv in enumerate(inverse_table(S)):
        if len(inv) != 1:
            return Violation(f"unique inverse ({len(inv)} found)", (a,))
    if S.star is not None:
        for a, (b,) in enumerate(inverse_table(S)):
            if S.star[a] != S.mul[b][a]:
                return Violation("a* = a^-1 a", (a,))
    return None


def inverses(S: UnarySemigroup):
    """The inverse map of an inverse semigroup."""
    out = []
    for a, inv in enumerate(inverse_table(S)):
        if len(inv) != 1:
            raise GermworkError(f"element {S.label(a)} has {len(inv)} inverses", (a,))
        out.append(int(inv[0]))
    return out


def classify(S: UnarySemigroup):
    """Run every axiom class the signature allows; map name -> Violation or None."""
    out = {}
    for which in AXIOM_CLASSES:
        try:
            out[which] = check_axioms(S, which)
        except SignatureTooWeak:
            continue
    return out


def check_derived_identities(S: UnarySemigroup):
    """Consequences that every restriction (resp. birestriction) semigroup satisfies.

    ``(se)* = s* e`` for projections e; with a plus table also ``es = s (es)*``.
    """
    P = projections(S)
    for s in range(S.size):
        for e in P:
            if S.star[S.mul[s][e]] != S.mul[S.star[s]][e]:
                return Violation("(se)* = s* e", (s, e))
    if S.plus is not None:
        for s in range(S.size):
            for e in P:
                if S.mul[e][s] != S.mul[s][S.star[S.mul[e][s]]]:
                    return Violation("es = s (es)*", (s, e))
    return None


def require(S, which):
    v = check_axioms(S, which)
    if v is not None:
        raise GermworkError(f"not {which}: {v.describe(S)}", v.witness)


# ---------------------------------------------------------------------------
# projections, relations


def projections(S: UnarySemigroup):
    """Sorted list of s with s* = s.  Verifies they form a semilattice."""
    st = S.ST
    P = [int(i) for i in np.nonzero(st == np.arange(S.size))[0]]
    for e in P:
        if S.mul[e][e] != e:
            raise GermworkError(f"projection {S.label(e)} is not idempotent", (e,))
    pset = set(P)
    for e, f in combinations(P, 2):
        if S.mul[e][f] != S.mul[f][e] or S.mul[e][f] not in pset:
            raise GermworkError("projections do not form a semilattice", (e, f))
    return P


@dataclass(frozen=True, eq=False)
class ElementRelation:
    kind: str
    matrix: np.ndarray

    def holds(self, a, b):
        return bool(self.matrix[a, b])

    @property
    def pairs(self):
        return frozenset((int(a), int(b)) for a, b in np.argwhere(self.matrix))

    def __eq__(self, other):
        return isinstance(other, ElementRelation) and np.array_equal(self.matrix, other.matrix)

    def __hash__(self):
        return hash((self.kind, self.matrix.tobytes()))

    def classes(self):
        """Equivalence classes, each sorted, ordered by least member."""
        n = self.matrix.shape[0]
        seen = [False] * n
        out = []
        for a in range(n):
            if not seen[a]:
                cls = [int(b) for b in np.nonzero(self.matrix[a])[0]]
                for b in cls:
                    seen[b] = True
                out.append(cls)
        return out


def order_matrix(S: UnarySemigroup):
    """``L[s, t]`` iff ``s <= t`` iff ``s = t s*``."""
    n = S.size
    ar = np.arange(n)
    return S.M[ar[None, :], S.ST[:, None]] == ar[:, None]


def natural_order(S: UnarySemigroup):
    L = order_matrix(S)
    _verify_order(S, L)
    return ElementRelation("order", L)


def _verify_order(S, L):
    n = S.size
    if not L.diagonal().all():
        raise GermworkError("natural order is not reflexive")
    if (L & L.T & ~np.eye(n, dtype=bool)).any():
        raise GermworkError("natural order is not antisymmetric")
    Li = L.astype(np.int64)
    if ((Li @ Li > 0) & ~L).any():
        raise GermworkError("natural order is not transitive")
    st = S.ST
    # a <= b implies a* <= b*
    a, b = np.nonzero(L)
    if not L[st[a], st[b]].all():
        raise GermworkError("a <= b does not give a* <= b*")


def compatibility_matrix(S: UnarySemigroup):
    M, st = S.M, S.ST
    ar = np.arange(S.size)
    A = M[ar[:, None], st[None, :]]  # s t*
    return A == A.T


def compatibility(S: UnarySemigroup):
    return ElementRelation("compatibility", compatibility_matrix(S))


def meet_of_compatible(S: UnarySemigroup, elems: Sequence[int]):
    """Meet of pairwise compatible elements: ``s1 e`` with ``e = s1* ... sn*``."""
    elems = list(elems)
    if not elems:
        raise ValueError("need at least one element")
    C = compatibility_matrix(S)
    for a, b in combinations(elems, 2):
        if not C[a, b]:
            raise NotCompatible(f"{S.label(a)} and {S.label(b)} are not compatible", (a, b))
    e = S.product(S.star[s] for s in elems)
    m = S.mul[elems[0]][e]
    L = order_matrix(S)
    lower = np.logical_and.reduce([L[:, s] for s in elems])
    if not lower[m] or not L[lower, m].all():
        raise GermworkError("internal: computed meet is not the greatest lower bound")
    return m


def sigma_matrix(S: UnarySemigroup):
    """a sigma b iff some c lies below both."""
    L = order_matrix(S).astype(np.int64)
    return (L.T @ L) > 0


def sigma(S: UnarySemigroup, cross_check=True):
    R = sigma_matrix(S)
    if cross_check:
        O = sigma_closure_oracle(S)
        if not np.array_equal(R, O):
            a, b = _first_true(R != O)
            raise GermworkError("internal: sigma disagrees with the congruence closure", (a, b))
    return ElementRelation("sigma", R)


def sigma_closure_oracle(S: UnarySemigroup):
    """Least congruence (for product and star) collapsing all projections.

    Union-find with a queue of merged pairs; each merged pair is pushed through
    left and right translations and the star.
    """
    n = S.size
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    queue = deque()

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
            queue.append((a, b))

    P = projections(S)
    for e in P[1:]:
        union(P[0], e)
    mul, st = S.mul, S.star
    while queue:
        a, b = queue.popleft()
        union(st[a], st[b])
        for c in range(n):
            union(mul[c][a], mul[c][b])
            union(mul[a][c], mul[b][c])
    roots = np.array([find(x) for x in range(n)])
    return roots[:, None] == roots[None, :]


def is_proper(S: UnarySemigroup):
    """Definition route and compatibility route; they must agree."""
    R = sigma_matrix(S)
    st = S.ST
    same_star = st[:, None] == st[None, :]
    by_def = not (R & same_star & ~np.eye(S.size, dtype=bool)).any()
    by_compat = check_proper_via_compat(S)
    if by_def != by_compat:
        raise GermworkError("internal: the two properness tests disagree")
    return by_def


def check_proper_via_compat(S: UnarySemigroup):
    return bool(np.array_equal(compatibility_matrix(S), sigma_matrix(S)))


# ---------------------------------------------------------------------------
# units, quotients


def identity_element(S: UnarySemigroup):
    M = S.M
    ar = np.arange(S.size)
    for e in range(S.size):
        if np.array_equal(M[e], ar) and np.array_equal(M[:, e], ar):
            return e
    return None


def zero_element(S: UnarySemigroup):
    M = S.M
    for z in range(S.size):
        if (M[z] == z).all() and (M[:, z] == z).all():
            return z
    return None


def has_local_units(S: UnarySemigroup):
    P = projections(S)
    M = S.M
    for s in range(S.size):
        if not any(M[e, s] == s for e in P) or not any(M[s, f] == s for f in P):
            return False
    return True


def adjoin_identity(S: UnarySemigroup):
    """``S`` itself when it already has an identity, else ``S`` plus a fresh 1."""
    if identity_element(S) is not None:
        return S
    n = S.size
    mul = [list(r) + [i] for i, r in enumerate(S.mul)]
    mul.append(list(range(n)) + [n])
    st = None if S.star is None else list(S.star) + [n]
    pl = None if S.plus is None else list(S.plus) + [n]
    labels = None if S.labels is None else list(S.labels) + ["1"]
    maps = None
    if S.maps is not None:
        maps = list(S.maps) + [PartialMap.identity(S.maps[0].ground)]
    return build_from_table(mul, st, pl, labels, maps, force=S.force)


def quotient_by_sigma(S: UnarySemigroup):
    """Maximum reduced quotient: returns (S/sigma, class index per element)."""
    classes = sigma(S).classes()
    cls_of = [0] * S.size
    for i, c in enumerate(classes):
        for x in c:
            cls_of[x] = i
    reps = [c[0] for c in classes]
    mul = [[cls_of[S.mul[a][b]] for b in reps] for a in reps]
    st = [cls_of[S.star[a]] for a in reps]
    labels = ["[" + S.label(c[0]) + "]" for c in classes]
    Q = build_from_table(mul, st, labels=labels)
    # projection map must be a (., *)-morphism
    for a in range(S.size):
        if cls_of[S.star[a]] != Q.star[cls_of[a]]:
            raise GermworkError("internal: quotient map does not preserve star")
        for b in range(S.size):
            if cls_of[S.mul[a][b]] != Q.mul[cls_of[a]][cls_of[b]]:
                raise GermworkError("internal: quotient map does not preserve product")
    if len(projections(Q)) != 1:
        raise GermworkError("internal: quotient is not reduced")
    return Q, tuple(cls_of)


def is_f_restriction(S: UnarySemigroup):
    L = order_matrix(S)
    for cls in sigma(S, cross_check=False).classes():
        sub = L[np.ix_(cls, cls)]
        if not sub.all(axis=0).any():
            return False
    return True


def sigma_class_maxima(S: UnarySemigroup):
    """Per sigma-class the maximum element, or None when the class has none."""
    L = order_matrix(S)
    out = []
    for cls in sigma(S, cross_check=False).classes():
        sub = L[np.ix_(cls, cls)]
        tops = np.nonzero(sub.all(axis=0))[0]
        out.append(cls[tops[0]] if len(tops) else None)
    return out


# ---------------------------------------------------------------------------
# Boolean restriction semigroups


@dataclass(frozen=True)
class BooleanReport:
    ok: bool
    failed: str | None = None
    witness: tuple | None = None

    def describe(self, S=None):
        if self.ok:
            return "Boolean restriction semigroup"
        names = self.witness if S is None else tuple(S.label(w) for w in self.witness)
        return f"{self.failed} fails at {names}"


def join_table(S: UnarySemigroup, L=None, within=None):
    """``J[s, t]`` = least upper bound of s and t (or -1).

    ``within`` restricts both arguments and candidate bounds to a subset.
    """
    n = S.size
    if L is None:
        L = order_matrix(S)
    J = np.full((n, n), -1, dtype=np.int64)
    allowed = np.ones(n, dtype=bool)
    if within is not None:
        allowed = np.zeros(n, dtype=bool)
        allowed[list(within)] = True
    args = np.nonzero(allowed)[0]
    for s in args:
        for t in args:
            if t < s:
                J[s, t] = J[t, s]
                continue
            ub = np.nonzero(L[s] & L[t] & allowed)[0]
            if len(ub) == 0:
                continue
            tops = ub[L[np.ix_(ub, ub)].all(axis=1)]
            if len(tops):
                J[s, t] = tops[0]
    return J


def check_boolean_restriction(S: UnarySemigroup):
    """Check BR1 (compatible joins), BR2 (projections form a GBA), BR3 (right distributivity)."""
    z = zero_element(S)
    if z is None or S.star[z] != z:
        raise NoRestrictionZero("no zero that is a projection")
    L = order_matrix(S)
    C = compatibility_matrix(S)
    J = join_table(S, L)
    n = S.size
    for s in range(n):
        for t in range(n):
            if C[s, t] and J[s, t] < 0:
                return BooleanReport(False, "BR1 compatible join exists", (s, t))
    # BR2 on P(S) with its own order
    P = projections(S)
    JP = join_table(S, L, within=P)
    M = S.M
    for e in P:
        for f in P:
            if JP[e, f] < 0:
                return BooleanReport(False, "BR2 projections form a lattice", (e, f))
    for e in P:
        for f in P:
            for g in P:
                lhs = M[e, JP[f, g]]
                rhs = JP[M[e, f], M[e, g]]
                if lhs != rhs:
                    return BooleanReport(False, "BR2 distributivity", (e, f, g))
    for e in P:
        for f in P:
            if L[e, f] and not any(M[g, e] == z and JP[g, e] == f for g in P):
                return BooleanReport(False, "BR2 relative complement", (e, f))
    # BR3
    for s in range(n):
        for t in range(s, n):
            if not C[s, t]:
                continue
            j = J[s, t]
            for u in range(n):
                su, tu = M[s, u], M[t, u]
                if J[su, tu] != M[j, u]:
                    return BooleanReport(False, "BR3 (s v t)u = su v tu", (s, t, u))
    return BooleanReport(True)


# ---------------------------------------------------------------------------
# morphisms


def morphism_violation(S: UnarySemigroup, T: UnarySemigroup, f, unary=("star",)):
    """None if ``f`` (a sequence indexed by S) preserves product and the listed unary ops."""
    for op in unary:
        a_tab, b_tab = getattr(S, op), getattr(T, op)
        if a_tab is None or b_tab is None:
            raise SignatureTooWeak(f"both sides need {op}")
        for a in range(S.size):
            if f[a_tab[a]] != b_tab[f[a]]:
                return Violation(f"{op} preserved", (a,))
    for a in range(S.size):
        for b in range(S.size):
            if f[S.mul[a][b]] != T.mul[f[a]][f[b]]:
                return Violation("product preserved", (a, b))
    return None


def _invariant(S, a, unary):
    power = [a]
    while True:
        nxt = S.mul[power[-1]][a]
        if nxt in power:
            break
        power.append(nxt)
    sig = [len(power), S.mul[a][a] == a]
    for op in unary:
        sig.append(getattr(S, op)[a] == a)
    return tuple(sig)


def find_isomorphism(S: UnarySemigroup, T: UnarySemigroup, unary=("star",)):
    """An isomorphism S -> T as a tuple, or None.  Backtracking with forced products."""
    if S.size != T.size:
        return None
    inv_s = [_invariant(S, a, unary) for a in range(S.size)]
    inv_t = [_invariant(T, a, unary) for a in range(T.size)]
    if sorted(inv_s) != sorted(inv_t):
        return None
    n = S.size

    def extend(f, used, a, b):
        # assign a -> b and close under products and unary ops
        stack = [(a, b)]
        f, used = dict(f), set(used)
        while stack:
            x, y = stack.pop()
            if x in f:
                if f[x] != y:
                    return None
                continue
            if y in used or inv_s[x] != inv_t[y]:
                return None
            f[x] = y
            used.add(y)
            for op in unary:
                stack.append((getattr(S, op)[x], getattr(T, op)[y]))
            for z, w in list(f.items()):
                stack.append((S.mul[x][z], T.mul[y][w]))
                stack.append((S.mul[z][x], T.mul[w][y]))
        return f, used

    def search(f, used):
        if len(f) == n:
            return f
        a = next(x for x in range(n) if x not in f)
        for b in range(n):
            if b in used:
                continue
            r = extend(f, used, a, b)
            if r is not None:
                out = search(*r)
                if out is not None:
                    return out
        return None

    f = search({}, set())
    if f is None:
        return None
    iso = tuple(f[a] for a in range(n))
    if morphism_violation(S, T, iso, unary) is not None:
        raise GermworkError("internal: isomorphism search returned a non-morphism")
    return iso

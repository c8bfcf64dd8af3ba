"""Finite meet-semilattices, their spectra and Booleanization.

In the finite case every filter is principal, so a spectrum point is stored as
the generator ``e`` of the filter ``e↑``.  The set ``D_e`` of points whose
filter contains ``e`` is then ``{f : f <= e}``.  Subsets of the spectrum are
Python ints used as bitmasks over generators (bit ``f`` set means the point
``f↑`` is in the set); helpers convert to sorted index lists for output.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations

import numpy as np

from .errors import Degenerate, GermworkError, NotBelow, NotMeetMorphism, SizeMismatch, TooLarge

FILTER_GUARD = 20


def bits(mask):
    """Sorted list of set bit positions."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def mask_of(items):
    m = 0
    for i in items:
        m |= 1 << i
    return m


@dataclass(frozen=True)
class FinSemilattice:
    meet: tuple
    labels: tuple | None = None

    def __post_init__(self):
        n = len(self.meet)
        if any(len(r) != n for r in self.meet):
            raise SizeMismatch("meet table is not square")
        m = self.meet
        for a in range(n):
            if m[a][a] != a:
                raise GermworkError(f"meet is not idempotent at {a}", (a,))
            for b in range(n):
                if m[a][b] != m[b][a]:
                    raise GermworkError("meet is not commutative", (a, b))
        A = np.array(m)
        for a in range(n):
            if not np.array_equal(A[A[a]], A[a][A]):
                raise GermworkError("meet is not associative", (a,))

    @property
    def size(self):
        return len(self.meet)

    def label(self, i):
        return self.labels[i] if self.labels is not None else str(i)

    @cached_property
    def leq(self):
        """``leq[e, f]`` iff ``e <= f`` iff ``e ∧ f = e``."""
        A = np.array(self.meet)
        return A == np.arange(self.size)[:, None]

    @cached_property
    def down(self):
        """``down[e]`` = bitmask of ``{f : f <= e}`` (this is ``D_e``)."""
        return tuple(mask_of(np.nonzero(self.leq[:, e])[0]) for e in range(self.size))

    @cached_property
    def up(self):
        return tuple(mask_of(np.nonzero(self.leq[e])[0]) for e in range(self.size))

    @property
    def full(self):
        return (1 << self.size) - 1

    def lower_covers(self, e):
        """Maximal elements strictly below e."""
        below = [f for f in range(self.size) if f != e and self.leq[f, e]]
        return [f for f in below if not any(g != f and self.leq[f, g] for g in below)]

    def maximal_elements(self, mask):
        items = bits(mask)
        return [e for e in items if not any(g != e and self.leq[e, g] for g in items)]

    def top(self):
        for e in range(self.size):
            if self.leq[:, e].all():
                return e
        return None

    def to_json(self):
        doc = {"size": self.size, "meet": [list(r) for r in self.meet]}
        if self.labels is not None:
            doc["labels"] = list(self.labels)
        return doc

    @classmethod
    def from_json(cls, doc):
        labels = doc.get("labels")
        return cls(
            tuple(tuple(int(v) for v in r) for r in doc["meet"]),
            None if labels is None else tuple(labels),
        )


def semilattice_from_semigroup(S):
    """``P(S)`` as a FinSemilattice, plus the list mapping its indices into S."""
    from .core import projections

    P = projections(S)
    pos = {e: i for i, e in enumerate(P)}
    meet = tuple(tuple(pos[S.mul[e][f]] for f in P) for e in P)
    return FinSemilattice(meet, tuple(S.label(e) for e in P)), P


def semilattice_as_semigroup(E: FinSemilattice):
    """E as a semigroup with star and plus both the identity."""
    from .core import build_from_table

    ident = list(range(E.size))
    return build_from_table(E.meet, ident, ident, labels=E.labels)


# ---------------------------------------------------------------------------
# filters and spectrum


@dataclass(frozen=True)
class Filter:
    members: frozenset

    def generator(self, E):
        """The minimum member; exists because filters of a finite E are principal."""
        for g in self.members:
            if all(E.leq[g, h] for h in self.members):
                return g
        raise GermworkError("filter has no minimum")


def filters(E: FinSemilattice):
    """All filters by brute force over subsets; each one is checked principal."""
    n = E.size
    if n > FILTER_GUARD:
        raise TooLarge(f"filter enumeration over {n} elements")
    up, meet = E.up, E.meet
    out = []
    for mask in range(1, 1 << n):
        items = bits(mask)
        if any(up[e] & ~mask for e in items):
            continue
        if any(not (mask >> meet[a][b]) & 1 for a, b in combinations(items, 2)):
            continue
        out.append(Filter(frozenset(items)))
    for F in out:
        g = F.generator(E)
        if mask_of(F.members) != up[g]:
            raise GermworkError("filter is not principal")
    if len(out) != n:
        raise GermworkError(f"{len(out)} filters for {n} elements")
    return sorted(out, key=lambda F: F.generator(E))


def spectrum(E: FinSemilattice):
    """Spectrum points, each identified with the generator of its filter."""
    return list(range(E.size))


def basic_open(E: FinSemilattice, e, fs=()):
    """``D_e`` minus ``D_f`` for each f in fs (each f must lie below e)."""
    for f in fs:
        if not E.leq[f, e]:
            raise NotBelow(f"{E.label(f)} is not below {E.label(e)}", (f, e))
    out = E.down[e]
    for f in fs:
        out &= ~E.down[f]
    return out


# ---------------------------------------------------------------------------
# Booleanization


@dataclass(frozen=True)
class SetAlgebra:
    """A finite generalized Boolean algebra of point subsets, given by its atoms."""

    points: int
    atoms: tuple

    @property
    def size(self):
        return 1 << len(self.atoms)

    def members(self):
        k = len(self.atoms)
        for sel in range(1 << k):
            m = 0
            for i in range(k):
                if (sel >> i) & 1:
                    m |= self.atoms[i]
            yield m

    def is_powerset(self):
        return sorted(self.atoms) == [1 << i for i in range(self.points)]


def close_under_boolean_ops(generators, limit=1 << 16):
    """Brute closure of a family of masks under union, intersection, difference."""
    fam = set(generators) | {0}
    frontier = set(fam)
    while frontier:
        new = set()
        for a in frontier:
            for b in list(fam):
                for c in (a | b, a & b, a & ~b, b & ~a):
                    if c not in fam and c not in new:
                        new.add(c)
        fam |= new
        frontier = new
        if len(fam) > limit:
            raise TooLarge("closure exceeds limit")
    return sorted(fam)


def _atoms_of(generators, points):
    """Partition of the union of the generators into the atoms of the ring they span."""
    blocks = [g for g in {mask for mask in generators if mask}]
    atoms = []
    universe = 0
    for g in blocks:
        universe |= g
    for x in range(points):
        if not (universe >> x) & 1:
            continue
        sig = tuple((g >> x) & 1 for g in blocks)
        atoms.append((sig, x))
    groups = {}
    for sig, x in atoms:
        groups[sig] = groups.get(sig, 0) | (1 << x)
    return tuple(sorted(groups.values()))


def booleanization(E: FinSemilattice):
    """The GBA generated by the sets D_e, plus the embedding e ↦ D_e.

    Asserts the result is the full powerset of the spectrum, and that the
    embedding is injective and meet-preserving.
    """
    n = E.size
    iota = E.down
    if len(set(iota)) != n:
        raise GermworkError("e -> D_e is not injective")
    for a in range(n):
        for b in range(n):
            if iota[E.meet[a][b]] != iota[a] & iota[b]:
                raise GermworkError("e -> D_e does not preserve meets", (a, b))
    B = SetAlgebra(n, _atoms_of(iota, n))
    # each singleton is a basic set D_{e; lower covers of e}
    for e in range(n):
        if basic_open(E, e, E.lower_covers(e)) != 1 << e:
            raise GermworkError("singleton is not a basic set", (e,))
    if not B.is_powerset():
        raise GermworkError("generated algebra is not the powerset")
    return B, iota


@dataclass(frozen=True)
class GBAMorphism:
    """Union-preserving map from point subsets of a spectrum to subsets of ``m`` points."""

    atom_images: tuple
    target_points: int

    def __call__(self, mask):
        out = 0
        for x in bits(mask):
            out |= self.atom_images[x]
        return out


def extend_to_gba_morphism(E: FinSemilattice, alpha, target_points, exhaustive_limit=10):
    """Extend a non-degenerate meet morphism ``alpha: E -> 2^m`` to B(E).

    ``alpha[e]`` is a bitmask over ``target_points``.  The extension is built
    from singletons ``ψ({e}) = α(e) minus the α of everything strictly below e``
    and re-derived through the second decomposition of each set into pieces
    ``D_{e; F_e}`` (e in U, F_e the maximal elements below e outside U).
    """
    n = E.size
    alpha = tuple(alpha)
    if len(alpha) != n:
        raise SizeMismatch("alpha must have one image per element")
    for a in range(n):
        for b in range(n):
            if alpha[E.meet[a][b]] != alpha[a] & alpha[b]:
                raise NotMeetMorphism(f"alpha fails at {E.label(a)}, {E.label(b)}", (a, b))
    full = (1 << target_points) - 1
    union = 0
    for x in alpha:
        union |= x
    if union != full:
        raise Degenerate("image of alpha generates a proper ideal")
    singles = []
    for e in range(n):
        below = 0
        for f in range(n):
            if f != e and E.leq[f, e]:
                below |= alpha[f]
        singles.append(alpha[e] & ~below)
    psi = GBAMorphism(tuple(singles), target_points)

    def second(U):
        out = 0
        for e in bits(U):
            outside = mask_of(f for f in range(n) if f != e and E.leq[f, e] and not (U >> f) & 1)
            F = E.maximal_elements(outside)
            piece = alpha[e]
            for f in F:
                piece &= ~alpha[f]
            out |= piece
        return out

    if n <= exhaustive_limit:
        members = range(1 << n)
    else:
        members = [E.down[e] for e in range(n)] + [1 << e for e in range(n)]
    for U in members:
        if psi(U) != second(U):
            raise GermworkError("internal: the two decompositions disagree", (U,))
    # a union-preserving map from atoms is a GBA morphism iff atom images are disjoint
    for a, b in combinations(range(n), 2):
        if singles[a] & singles[b]:
            raise GermworkError("internal: atom images overlap", (a, b))
    for e in range(n):
        if psi(E.down[e]) != alpha[e]:
            raise GermworkError("internal: alpha != psi . iota", (e,))
    return psi


# ---------------------------------------------------------------------------
# order ideals


def is_order_ideal(E: FinSemilattice, mask):
    return all(not (E.down[e] & ~mask) for e in bits(mask))


def order_ideals(E: FinSemilattice):
    if E.size > FILTER_GUARD:
        raise TooLarge("ideal enumeration")
    return [m for m in range(1 << E.size) if is_order_ideal(E, m)]


def order_ideal_psi(E: FinSemilattice, U):
    """``Ψ(U) = {f : D_f ⊆ U}`` for U a union of basic sets D_e."""
    if not is_order_ideal(E, U):
        raise GermworkError("set is not a union of basic sets D_e")
    out = 0
    for f in range(E.size):
        if not (E.down[f] & ~U):
            out |= 1 << f
    return out


def order_ideal_psi_inv(E: FinSemilattice, ideal):
    if not is_order_ideal(E, ideal):
        raise GermworkError("not an order ideal")
    out = 0
    for e in bits(ideal):
        out |= E.down[e]
    return out


def is_principal_ideal(E: FinSemilattice, ideal):
    return any(E.down[e] == ideal for e in range(E.size))


# ---------------------------------------------------------------------------
# standard semilattices


def chain(k):
    return FinSemilattice(
        tuple(tuple(min(a, b) for b in range(k)) for a in range(k)),
        tuple(f"c{a}" for a in range(k)),
    )


def antichain_with_bottom(k):
    """Bottom 0 and k pairwise incomparable atoms."""
    n = k + 1
    meet = tuple(tuple(a if a == b else 0 for b in range(n)) for a in range(n))
    return FinSemilattice(meet, ("0",) + tuple(f"a{i}" for i in range(1, n)))


def free_semilattice(k):
    """Nonempty subsets of k generators, meet is union (2^k - 1 elements)."""
    subsets = sorted((m for m in range(1, 1 << k)), key=lambda m: (-bin(m).count("1"), m))
    pos = {m: i for i, m in enumerate(subsets)}
    meet = tuple(tuple(pos[a | b] for b in subsets) for a in subsets)
    labels = tuple("".join(chr(ord("a") + i) for i in bits(m)) for m in subsets)
    return FinSemilattice(meet, labels)

"""Actions of restriction semigroups, germs, and the universal category.

An action assigns to every element ``s`` a partial map ``θ_s`` of a finite
set ``X`` with ``dom θ_s = X_{s*}``.  Germs ``[s, x]`` are pairs modulo
"agree below a common lower bound"; they form a category with
``dom [s,x] = [s*, x]``, ``ran [s,x] = [e, θ_s(x)]`` and
``[s,x][t,y] = [st, y]`` when ``x = θ_t(y)``.

The spectral action lives on the spectrum of ``P(S)``: point ``p`` stands for
the principal filter of the p-th projection.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .category import (
    FiniteCategory,
    SliceSemigroup,
    check_category_axioms,
    is_bislice,
    is_slice,
    slice_product,
    slice_ran,
    slice_semigroup,
    slice_star,
)
from .core import (
    PartialMap,
    UnarySemigroup,
    Violation,
    check_axioms,
    has_local_units,
    order_matrix,
    projections,
)
from .errors import (
    DegenerateOnProjections,
    GermworkError,
    InvalidAction,
    NoLocalUnits,
    NotMorphism,
    NotRange,
    SizeMismatch,
)
from .lattice import bits, extend_to_gba_morphism, semilattice_from_semigroup

VERIFY_LIMIT = 3000


@dataclass(frozen=True)
class RestrictionAction:
    semigroup: UnarySemigroup
    space: int
    theta: tuple
    point_labels: tuple | None = None
    spectral: bool = False

    def __post_init__(self):
        if len(self.theta) != self.semigroup.size:
            raise SizeMismatch("one partial map per element is required")
        for m in self.theta:
            if m.ground != self.space:
                raise SizeMismatch("partial map on the wrong ground set")

    def point_label(self, x):
        return self.point_labels[x] if self.point_labels is not None else str(x)

    @cached_property
    def in_domain(self):
        """``D[s, x]`` iff θ_s is defined at x."""
        D = np.zeros((self.semigroup.size, self.space), dtype=bool)
        for s, m in enumerate(self.theta):
            for x in m.domain:
                D[s, x] = True
        return D

    def domain(self, s):
        return self.theta[s].domain

    def to_json(self):
        return {
            "space": self.space,
            "theta": [m.to_json() for m in self.theta],
        }


def check_action(A: RestrictionAction):
    """None, or the first failing law with its witness.

    Laws in order: ``θ_{s*}`` is the identity on ``dom θ_s``; ``θ_{st} = θ_s θ_t``;
    every point lies in some ``X_e``.
    """
    S = A.semigroup
    th = A.theta
    for s in range(S.size):
        e = th[S.star[s]]
        if e.domain != th[s].domain:
            return Violation("dom theta_s = dom theta_{s*}", (s,))
        if any(e(x) != x for x in e.domain):
            return Violation("theta_{s*} is an identity", (s,))
    for s in range(S.size):
        for t in range(S.size):
            lhs = th[S.mul[s][t]]
            rhs = th[s].compose(th[t])
            if lhs != rhs:
                x = next(x for x in range(A.space) if lhs(x) != rhs(x))
                return Violation("theta_{st} = theta_s theta_t", (s, t, x))
    covered = set()
    for e in projections(S):
        covered |= th[e].domain
    for x in range(A.space):
        if x not in covered:
            return Violation("non-degenerate", (x,))
    return None


def require_action(A):
    v = check_action(A)
    if v is not None:
        raise InvalidAction(f"{v.law} fails at {v.witness}", v.witness)


def tautological_action(S: UnarySemigroup):
    """A subsemigroup of PT(X) acting on X by its own maps."""
    if S.maps is None:
        raise GermworkError("semigroup carries no concrete maps")
    n = S.maps[0].ground
    return RestrictionAction(S, n, tuple(S.maps))


def spectral_action(S: UnarySemigroup):
    """Action on the spectrum of P(S); point p is the filter of the p-th projection.

    ``dom β_s = D_{s*}`` and ``β_s(e↑) = f↑`` with ``f`` the least projection
    h such that ``(hs)* >= e``.
    """
    if not has_local_units(S):
        raise NoLocalUnits("spectral action needs local units")
    P = projections(S)
    pos = {e: i for i, e in enumerate(P)}
    L = order_matrix(S)
    theta = []
    for s in range(S.size):
        img = [None] * len(P)
        for p, e in enumerate(P):
            if not L[e, S.star[s]]:
                continue
            cands = [h for h in P if L[e, S.star[S.mul[h][s]]]]
            low = [h for h in cands if all(L[h, k] for k in cands)]
            if len(low) != 1:
                raise GermworkError(
                    f"no least projection for {S.label(s)} at {S.label(e)}", (s, e)
                )
            img[p] = pos[low[0]]
        theta.append(PartialMap(len(P), tuple(img)))
    labels = tuple(S.label(e) + "^" for e in P)
    return RestrictionAction(S, len(P), tuple(theta), labels, spectral=True)


# ---------------------------------------------------------------------------
# germ category


@dataclass(frozen=True)
class GermCategory:
    category: FiniteCategory
    reps: tuple
    action: RestrictionAction
    lookup: dict
    unit_of_point: tuple

    @property
    def size(self):
        return self.category.size

    def germ(self, s, x):
        """Arrow index of ``[s, x]``."""
        try:
            return self.lookup[(s, x)]
        except KeyError:
            raise GermworkError(f"point {x} is not in the domain of {s}") from None

    @cached_property
    def point_of_unit(self):
        return {u: x for x, u in enumerate(self.unit_of_point)}

    def slice_of(self, s, points=None):
        """``(s, V)``: germs of s at the points of V (default all of dom θ_s)."""
        V = self.action.domain(s) if points is None else points
        m = 0
        for x in V:
            m |= 1 << self.germ(s, x)
        return m

    def units_mask(self, points):
        m = 0
        for x in points:
            m |= 1 << self.unit_of_point[x]
        return m


def canonical_germ(A: RestrictionAction, s, x, L=None):
    """The least ``u <= s`` with x in ``X_{u*}``; it represents ``[s, x]``."""
    S = A.semigroup
    if L is None:
        L = order_matrix(S)
    D = A.in_domain
    cand = np.nonzero(L[:, s] & D[S.ST, x])[0]
    if len(cand) == 0:
        raise GermworkError(f"{x} not in the domain of {S.label(s)}", (s, x))
    sub = L[np.ix_(cand, cand)]
    low = cand[sub.all(axis=1)]
    if len(low) != 1:
        raise GermworkError("germ class has no least representative", (s, x))
    return int(low[0]), x


def germs_equal_by_definition(A: RestrictionAction, s, t, x, L=None):
    """``[s,x] = [t,x]`` iff some u below both has x in ``X_{u*}``."""
    S = A.semigroup
    if L is None:
        L = order_matrix(S)
    D = A.in_domain
    return bool((L[:, s] & L[:, t] & D[S.ST, x]).any())


def germ_category(A: RestrictionAction, verify=True):
    """Category of germs of an action; arrows sorted by canonical (u, x)."""
    require_action(A)
    S = A.semigroup
    L = order_matrix(S)
    pairs = [(s, x) for s in range(S.size) for x in sorted(A.domain(s))]
    canon = {p: canonical_germ(A, p[0], p[1], L) for p in pairs}
    reps = sorted(set(canon.values()))
    index = {r: i for i, r in enumerate(reps)}
    lookup = {p: index[canon[p]] for p in pairs}
    P = projections(S)
    unit_of_point = []
    for x in range(A.space):
        e = next(e for e in P if x in A.domain(e))
        unit_of_point.append(lookup[(e, x)])
    for x in range(A.space):
        for e in P:
            if x in A.domain(e) and lookup[(e, x)] != unit_of_point[x]:
                raise GermworkError("internal: unit germs at a point differ")
    dom = tuple(unit_of_point[x] for (u, x) in reps)
    ran = tuple(unit_of_point[A.theta[u](x)] for (u, x) in reps)
    comp = {}
    for i, (u, x) in enumerate(reps):
        for j, (v, y) in enumerate(reps):
            if A.theta[v](y) == x:
                comp[(i, j)] = lookup[(S.mul[u][v], y)]
    labels = tuple(f"[{S.label(u)},{A.point_label(x)}]" for (u, x) in reps)
    C = FiniteCategory(dom, ran, comp, labels)
    v = check_category_axioms(C)
    if v is not None:
        raise GermworkError(f"internal: germs do not form a category: {v}")
    if len(set(unit_of_point)) != A.space or set(unit_of_point) != set(C.units):
        raise GermworkError("internal: units are not in bijection with points")
    G = GermCategory(C, tuple(reps), A, lookup, tuple(unit_of_point))
    if verify and len(pairs) <= VERIFY_LIMIT:
        _verify_representative_independence(G, pairs)
    return G


def _verify_representative_independence(G, pairs):
    A = G.action
    S = A.semigroup
    by_point = {}
    for t, y in pairs:
        by_point.setdefault(A.theta[t](y), []).append((t, y))
    for s, x in pairs:
        a = G.lookup[(s, x)]
        for t, y in by_point.get(x, ()):
            b = G.lookup[(t, y)]
            if G.category.comp[(a, b)] != G.lookup[(S.mul[s][t], y)]:
                raise GermworkError("internal: germ product depends on representatives")


def universal_category(S: UnarySemigroup, verify=True):
    """Germs of the spectral action; arrow i is ``[i, (i*)↑]``."""
    A = spectral_action(S)
    G = germ_category(A, verify=verify)
    P = projections(S)
    pos = {e: i for i, e in enumerate(P)}
    for i, (u, p) in enumerate(G.reps):
        e = P[p]
        if S.mul[u][e] != u:
            raise GermworkError("internal: spectral germ is not in the form (se, e)")
    if G.size != S.size:
        raise GermworkError(f"internal: {G.size} arrows for {S.size} elements")
    for s in range(S.size):
        if G.germ(s, pos[S.star[s]]) != s:
            raise GermworkError("internal: s -> [s, s*^] is not the identity labelling")
    return G


def iota(G: GermCategory, s):
    """``ι(s) = (s, D_{s*})`` as a slice of the universal category."""
    return G.slice_of(s)


# ---------------------------------------------------------------------------
# Θ and ⊕


@dataclass(frozen=True)
class ThetaReport:
    images: tuple
    injective: bool
    morphism: bool
    preserves_plus: bool | None


def theta_embedding(G: GermCategory):
    """``Θ(s) = (s, X_{s*})`` and its morphism properties, checked on slices."""
    A = G.action
    S = A.semigroup
    C = G.category
    imgs = tuple(G.slice_of(s) for s in range(S.size))
    for s, U in enumerate(imgs):
        if not is_slice(C, U):
            raise GermworkError("internal: Θ(s) is not a slice", (s,))
    morphism = True
    for s in range(S.size):
        if slice_star(C, imgs[s]) != imgs[S.star[s]]:
            morphism = False
            break
        for t in range(S.size):
            if slice_product(C, imgs[s], imgs[t]) != imgs[S.mul[s][t]]:
                morphism = False
                break
        if not morphism:
            break
    if not morphism:
        raise GermworkError("internal: Θ is not a (.,*)-morphism")
    for e in projections(S):
        if any(a not in C.units for a in bits(imgs[e])):
            raise GermworkError("internal: Θ(e) contains a non-unit", (e,))
    plus = None
    if S.plus is not None and check_axioms(S, "range") is None:
        plus = all(slice_ran(C, imgs[s]) == imgs[S.plus[s]] for s in range(S.size))
    return ThetaReport(imgs, len(set(imgs)) == len(imgs), morphism, plus)


def oplus_table(S: UnarySemigroup):
    """``s⊕`` = least projection e with ``(es)* >= s*``."""
    if not has_local_units(S):
        raise NoLocalUnits("⊕ needs local units")
    P = projections(S)
    L = order_matrix(S)
    out = []
    for s in range(S.size):
        cands = [e for e in P if L[S.star[s], S.star[S.mul[e][s]]]]
        low = [e for e in cands if all(L[e, f] for f in cands)]
        if len(low) != 1:
            raise GermworkError(f"no least projection for {S.label(s)}", (s,))
        out.append(low[0])
    return tuple(out)


@dataclass(frozen=True)
class OplusReport:
    table: tuple
    violation: Violation | None

    @property
    def is_range(self):
        return self.violation is None


def range_oplus(S: UnarySemigroup):
    """⊕ table and whether ``(S, ., *, ⊕)`` satisfies the range axioms."""
    table = oplus_table(S)
    T = UnarySemigroup(S.mul, S.star, table, S.labels)
    return OplusReport(table, check_axioms(T, "range"))


def underlying_category(S: UnarySemigroup):
    """Arrows S, ``dom s = s*``, ``ran s = s+``, ``st`` defined when ``s* = t+``.

    Also verifies that ``s -> [s, (s*)↑]`` is an isomorphism onto the
    universal category.
    """
    if S.plus is None or check_axioms(S, "range") is not None:
        raise NotRange("underlying category needs a range semigroup")
    comp = {}
    for s in range(S.size):
        for t in range(S.size):
            if S.star[s] == S.plus[t]:
                comp[(s, t)] = S.mul[s][t]
    U = FiniteCategory(tuple(S.star), tuple(S.plus), comp, S.labels)
    v = check_category_axioms(U)
    if v is not None:
        raise GermworkError(f"internal: underlying structure is not a category: {v}")
    G = universal_category(S)
    C = G.category
    P = projections(S)
    pos = {e: i for i, e in enumerate(P)}
    f = [G.germ(s, pos[S.star[s]]) for s in range(S.size)]
    if sorted(f) != list(range(C.size)):
        raise GermworkError("internal: s -> [s, s*^] is not bijective")
    for s in range(S.size):
        if C.dom[f[s]] != f[U.dom[s]] or C.ran[f[s]] != f[U.ran[s]]:
            raise GermworkError("internal: iso does not commute with dom/ran", (s,))
    for (s, t), st in comp.items():
        if C.comp.get((f[s], f[t])) != f[st]:
            raise GermworkError("internal: iso does not preserve products", (s, t))
    if len(comp) != len(C.comp):
        raise GermworkError("internal: composable pairs differ")
    return U, G, tuple(f)


# ---------------------------------------------------------------------------
# universal property


@dataclass(frozen=True)
class Extension:
    """ψ from slices of the universal category of S into the slices of a target."""

    source: GermCategory
    target: SliceSemigroup
    table: dict

    def __call__(self, U):
        return self.table[U]


def booleanization_extend(S: UnarySemigroup, alpha, T: SliceSemigroup, guard=4096):
    """Extend ``alpha: S -> T`` (slice masks of T's category) through ι.

    Decomposition one sends each arrow ``[t, (t*)↑]`` to ``α(t)`` minus the
    ``α(tf)`` for projections ``f < t*`` and takes unions.  Decomposition two
    cuts a slice into blocks ``(s, V)`` with s maximal and applies
    ``α(s) ψ_E(V)``, ψ_E being the lattice-level extension on projections.
    Any disagreement is a hard error.
    """
    alpha = tuple(alpha)
    D = T.category
    if len(alpha) != S.size:
        raise SizeMismatch("alpha needs one image per element")
    for s in range(S.size):
        if not is_slice(D, alpha[s]):
            raise NotMorphism(f"image of {S.label(s)} is not a slice", (s,))
        if slice_star(D, alpha[s]) != alpha[S.star[s]]:
            raise NotMorphism(f"alpha does not preserve star at {S.label(s)}", (s,))
        for t in range(S.size):
            if slice_product(D, alpha[s], alpha[t]) != alpha[S.mul[s][t]]:
                raise NotMorphism("alpha does not preserve products", (s, t))
    P = projections(S)
    E, _ = semilattice_from_semigroup(S)
    units = list(D.units)
    upos = {u: i for i, u in enumerate(units)}

    def to_unit_bits(mask):
        return sum(1 << upos[a] for a in bits(mask))

    def from_unit_bits(m):
        return sum(1 << units[i] for i in bits(m))

    covered = 0
    for e in P:
        covered |= alpha[e]
    if covered != sum(1 << u for u in units):
        raise DegenerateOnProjections("alpha of the projections misses some units")
    try:
        psiE = extend_to_gba_morphism(E, [to_unit_bits(alpha[e]) for e in P], len(units))
    except GermworkError as err:
        raise DegenerateOnProjections(str(err)) from err

    G = universal_category(S)
    C = G.category
    B = slice_semigroup(C, guard=guard)
    L = order_matrix(S)
    pos = {e: i for i, e in enumerate(P)}

    def single(a):
        t, p = G.reps[a]
        e = P[p]
        out = alpha[t]
        for f in P:
            if f != e and L[f, e]:
                out &= ~alpha[S.mul[t][f]]
        return out

    singles = [single(a) for a in range(C.size)]

    def first(U):
        out = 0
        for a in bits(U):
            if out & singles[a]:
                raise GermworkError("internal: images of distinct arrows overlap")
            out |= singles[a]
        return out

    def second(U):
        arrows = set(bits(U))
        heads = [s for s in range(S.size) if s in arrows]  # [s, (s*)↑] = arrow s
        tops = [s for s in heads if not any(t != s and L[s, t] for t in heads)]
        out = 0
        used = set()
        for s in tops:
            V = [x for x in range(len(P)) if L[P[x], S.star[s]] and G.germ(s, x) in arrows]
            used |= {G.germ(s, x) for x in V}
            Vmask = sum(1 << x for x in V)
            out |= slice_product(D, alpha[s], from_unit_bits(psiE(Vmask)))
        if used != arrows:
            raise GermworkError("internal: blocks do not cover the slice")
        return out

    table = {}
    for U in B.slices:
        a, b = first(U), second(U)
        if a != b:
            raise GermworkError("internal: the two decompositions of psi disagree", (U,))
        if not is_slice(D, a):
            raise GermworkError("internal: psi value is not a slice", (U,))
        table[U] = a
    psi = Extension(G, T, table)
    for s in range(S.size):
        if psi(iota(G, s)) != alpha[s]:
            raise GermworkError("internal: alpha != psi . iota", (s,))
    for U in B.slices:
        if psi(slice_star(C, U)) != slice_star(D, psi(U)):
            raise GermworkError("internal: psi does not preserve star", (U,))
        for V in B.slices:
            if psi(slice_product(C, U, V)) != slice_product(D, psi(U), psi(V)):
                raise GermworkError("internal: psi does not preserve products", (U, V))
    unit_mask = sum(1 << u for u in C.units)
    unit_slices = [U for U in B.slices if not (U & ~unit_mask)]
    for U in unit_slices:
        pts = sum(1 << G.point_of_unit[a] for a in bits(U))
        if to_unit_bits(psi(U)) != psiE(pts):
            raise GermworkError("internal: psi on projections is not the lattice extension")
    return psi


def identity_alpha(S: UnarySemigroup):
    """ι itself, with target the full slice semigroup of the universal category."""
    G = universal_category(S)
    T = slice_semigroup(G.category)
    return [iota(G, s) for s in range(S.size)], T


def bislice_images(G: GermCategory):
    """Whether every ι(s) is a bislice (expected for birestriction inputs)."""
    return all(is_bislice(G.category, G.slice_of(s)) for s in range(G.action.semigroup.size))

"""Constellations: partial products with right identities, and the P/T passage.

``pp[s][t]`` is the product ``s·t`` or None when undefined.  The order is a
boolean matrix, restrictions ``s|_e`` and corestrictions ``_e|s`` are dicts.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .category import FiniteCategory, is_slice, slice_label, slice_product, slice_ran, slice_star
from .core import UnarySemigroup, Violation, build_from_table, check_axioms, order_matrix
from .errors import GermworkError, NotInductive, SizeMismatch
from .lattice import bits


@dataclass(frozen=True, eq=False)
class Constellation:
    pp: tuple
    star: tuple
    order: np.ndarray
    restriction: dict = field(default_factory=dict)
    corestriction: dict = field(default_factory=dict)
    labels: tuple | None = None

    def __post_init__(self):
        n = len(self.pp)
        if any(len(r) != n for r in self.pp) or len(self.star) != n:
            raise SizeMismatch("constellation tables have inconsistent sizes")
        if self.order.shape != (n, n):
            raise SizeMismatch("order matrix has the wrong shape")

    @property
    def size(self):
        return len(self.pp)

    def label(self, i):
        return self.labels[i] if self.labels is not None else str(i)

    @property
    def projections(self):
        return sorted(set(self.star))

    def same_tables(self, other):
        return (
            self.pp == other.pp
            and self.star == other.star
            and np.array_equal(self.order, other.order)
            and self.restriction == other.restriction
            and self.corestriction == other.corestriction
        )

    def to_json(self):
        doc = {
            "size": self.size,
            "product": [list(r) for r in self.pp],
            "star": list(self.star),
            "order": [[int(a), int(b)] for a, b in np.argwhere(self.order)],
        }
        if self.labels is not None:
            doc["labels"] = list(self.labels)
        return doc

    @classmethod
    def from_json(cls, doc):
        n = int(doc["size"])
        pp = tuple(tuple(None if v is None else int(v) for v in r) for r in doc["product"])
        star = tuple(int(v) for v in doc["star"])
        order = np.zeros((n, n), dtype=bool)
        if "order" in doc:
            for a, b in doc["order"]:
                order[a, b] = True
            Q = cls(pp, star, order, labels=_labels(doc))
        else:
            Q = cls(pp, star, order, labels=_labels(doc))
        return with_derived_tables(Q)


def _labels(doc):
    lab = doc.get("labels")
    return None if lab is None else tuple(lab)


def with_derived_tables(Q: Constellation):
    """Fill restriction and corestriction tables by search (O3, O4)."""
    L = Q.order
    P = Q.projections
    restr = {}
    cores = {}
    for s in range(Q.size):
        for e in P:
            if L[e, Q.star[s]]:
                cands = [r for r in range(Q.size) if L[r, s] and Q.star[r] == e]
                if len(cands) == 1:
                    restr[(s, e)] = cands[0]
            below = [t for t in range(Q.size) if L[t, s] and Q.pp[e][t] is not None]
            tops = [t for t in below if all(L[u, t] for u in below)]
            if len(tops) == 1:
                cores[(e, s)] = tops[0]
    return Constellation(Q.pp, Q.star, Q.order, restr, cores, Q.labels)


def check_constellation(Q: Constellation):
    """(Q1)-(Q4); None or the first Violation."""
    n = Q.size
    pp = Q.pp
    for s in range(n):
        for t in range(n):
            st = pp[s][t]
            if st is None:
                continue
            for u in range(n):
                if pp[st][u] is not None:
                    tu = pp[t][u]
                    if tu is None or pp[s][tu] != pp[st][u]:
                        return Violation("Q1 (s.t).u exists => s.(t.u) = (s.t).u", (s, t, u))
    for s in range(n):
        for t in range(n):
            if pp[s][t] is None:
                continue
            for u in range(n):
                if pp[t][u] is not None and pp[pp[s][t]][u] is None:
                    return Violation("Q2 s.t, t.u exist => (s.t).u exists", (s, t, u))
    # right identities are sought among the projections (the image of star):
    # over all elements, P(PT(2)) already has non-projection right identities
    P = sorted(set(Q.star))
    for e in P:
        if Q.star[e] != e:
            return Violation("Q3 projections are their own star", (e,))
    for s in range(n):
        rights = [e for e in P if pp[s][e] == s]
        if rights != [Q.star[s]]:
            return Violation("Q3 unique right identity s*", (s,))
    for s in range(n):
        e = Q.star[s]
        for t in range(n):
            if pp[e][t] is not None and pp[e][t] != t:
                return Violation("Q4 s*.t exists => s*.t = t", (s, t))
    return None


def check_inductive(Q: Constellation):
    """Constellation laws, the order laws (O1)-(O6) and (I)."""
    v = check_constellation(Q)
    if v is not None:
        return v
    n = Q.size
    L = Q.order
    pp = Q.pp
    if not L.diagonal().all():
        return Violation("order is reflexive", (int(np.argmin(L.diagonal())),))
    if (L & L.T & ~np.eye(n, dtype=bool)).any():
        a, b = np.argwhere(L & L.T & ~np.eye(n, dtype=bool))[0]
        return Violation("order is antisymmetric", (int(a), int(b)))
    Li = L.astype(np.int64)
    bad = (Li @ Li > 0) & ~L
    if bad.any():
        a, c = np.argwhere(bad)[0]
        return Violation("order is transitive", (int(a), int(c)))
    defined = [(s, u) for s in range(n) for u in range(n) if pp[s][u] is not None]
    for s, u in defined:
        for t in np.nonzero(L[s])[0]:
            for v in np.nonzero(L[u])[0]:
                tv = pp[t][v]
                if tv is not None and not L[pp[s][u], tv]:
                    return Violation("O1 products respect the order", (s, int(t), u, int(v)))
    for s in range(n):
        for t in np.nonzero(L[s])[0]:
            if not L[Q.star[s], Q.star[t]]:
                return Violation("O2 s <= t => s* <= t*", (s, int(t)))
    P = Q.projections
    for s in range(n):
        for e in P:
            if L[e, Q.star[s]]:
                cands = [r for r in range(n) if L[r, s] and Q.star[r] == e]
                if len(cands) != 1 or Q.restriction.get((s, e)) != cands[0]:
                    return Violation("O3 restriction s|e", (s, e))
    for s in range(n):
        for e in P:
            below = [t for t in range(n) if L[t, s] and pp[e][t] is not None]
            tops = [t for t in below if all(L[u, t] for u in below)]
            if len(tops) != 1 or Q.corestriction.get((e, s)) != tops[0]:
                return Violation("O4 corestriction e|s", (e, s))
    cor = Q.corestriction
    for s, t in defined:
        for e in P:
            lhs = Q.star[cor[(e, pp[s][t])]]
            rhs = Q.star[cor[(Q.star[cor[(e, s)]], t)]]
            if lhs != rhs:
                return Violation("O5 (e|(s.t))* = ((e|s)*|t)*", (s, t, e))
    for e in P:
        for f in P:
            if (e, f) in Q.restriction and Q.restriction[(e, f)] != cor[(f, e)]:
                return Violation("O6 e|f = f|e", (e, f))
    Pset = set(P)
    for e in P:
        for f in P:
            m = cor[(f, e)]
            lower = [g for g in P if L[g, e] and L[g, f]]
            if m not in Pset or m not in lower or not all(L[g, m] for g in lower):
                return Violation("I projections meet as e ∧ f = f|e", (e, f))
    return None


def P_of(S: UnarySemigroup):
    """Inductive constellation of a restriction semigroup: s∘t = st iff s*t = t."""
    n = S.size
    mul, st = S.mul, S.star
    pp = tuple(
        tuple(mul[s][t] if mul[st[s]][t] == t else None for t in range(n)) for s in range(n)
    )
    L = order_matrix(S)
    P = sorted(set(st))
    restr = {(s, e): mul[s][e] for s in range(n) for e in P if L[e, st[s]]}
    cores = {(e, s): mul[e][s] for e in P for s in range(n)}
    Q = Constellation(pp, tuple(st), L, restr, cores, S.labels)
    searched = with_derived_tables(Q)
    if searched.corestriction != cores or searched.restriction != restr:
        raise GermworkError("internal: es is not the maximal t <= s with e.t defined")
    v = check_inductive(Q)
    if v is not None:
        raise GermworkError(f"internal: P(S) is not inductive: {v.describe()}")
    return Q


def T_of(Q: Constellation):
    """Restriction semigroup of an inductive constellation under s ⊗ t = s·(_{s*}|t)."""
    v = check_inductive(Q)
    if v is not None:
        raise NotInductive(f"not an inductive constellation: {v.describe()}", v.witness)
    n = Q.size
    mul = []
    for s in range(n):
        row = []
        for t in range(n):
            u = Q.corestriction[(Q.star[s], t)]
            p = Q.pp[s][u]
            if p is None:
                raise GermworkError("internal: pseudoproduct undefined", (s, t))
            row.append(p)
        mul.append(row)
    S = build_from_table(mul, Q.star, labels=Q.labels)
    v = check_axioms(S, "restriction")
    if v is not None:
        raise GermworkError(f"internal: T(Q) is not restriction: {v.describe(S)}")
    return S


def slice_constellation(C: FiniteCategory, family):
    """Constellation of a (., *)-closed family of slices, defined set-theoretically.

    ``s∘t`` exists iff ``dom(s) ⊇ ran(t)``; order is inclusion;
    ``s|_e = {x in s : dom x in e}``; ``_e|s = {x in s : ran x in e}``.
    Each clause is compared against the semigroup route P(S).
    """
    family = list(family)
    pos = {U: i for i, U in enumerate(family)}
    if len(pos) != len(family):
        raise GermworkError("family has repeated slices")
    for U in family:
        if not is_slice(C, U):
            raise GermworkError("family member is not a slice")
    n = len(family)
    try:
        mul = [[pos[slice_product(C, U, V)] for V in family] for U in family]
        star = [pos[slice_star(C, U)] for U in family]
    except KeyError:
        raise GermworkError("family is not closed under product and star") from None
    S = build_from_table(mul, star, labels=[slice_label(C, U) for U in family])

    def dom_set(U):
        return {C.dom[a] for a in bits(U)}

    def ran_set(U):
        return {C.ran[a] for a in bits(U)}

    pp = tuple(
        tuple(
            pos[slice_product(C, U, V)] if dom_set(U) >= ran_set(V) else None for V in family
        )
        for U in family
    )
    order = np.array([[not (U & ~V) for V in family] for U in family], dtype=bool)
    P = sorted(set(star))
    restr = {}
    cores = {}
    for i, U in enumerate(family):
        for e in P:
            units = set(bits(family[e]))
            if units <= dom_set(U):
                restr[(i, e)] = pos[sum(1 << a for a in bits(U) if C.dom[a] in units)]
            cores[(e, i)] = pos[sum(1 << a for a in bits(U) if C.ran[a] in units)]
    Q = Constellation(pp, tuple(star), order, restr, cores, S.labels)
    ref = P_of(S)
    if ref.pp != Q.pp:
        raise GermworkError("clause 1 fails: composability is not dom(s) ⊇ ran(t)")
    if not np.array_equal(ref.order, Q.order):
        raise GermworkError("clause 2 fails: order is not inclusion")
    if ref.restriction != Q.restriction:
        raise GermworkError("clause 3 fails: s|e is not {x in s : dom x in e}")
    if ref.corestriction != Q.corestriction:
        raise GermworkError("clause 4 fails: e|s is not {x in s : ran x in e}")
    return Q


@dataclass(frozen=True)
class RadiantReport:
    radiant: bool
    strong: bool
    isomorphism: bool
    failed: str | None = None


def check_radiant(Q: Constellation, R: Constellation, rho):
    """Ordered-radiant conditions (1)-(4), then (1'), (3') and bijectivity."""
    rho = list(rho)
    n = Q.size

    def fail(msg):
        return RadiantReport(False, False, False, msg)

    for s in range(n):
        for t in range(n):
            st = Q.pp[s][t]
            if st is not None and R.pp[rho[s]][rho[t]] != rho[st]:
                return fail(f"(1) at ({s}, {t})")
    for s in range(n):
        if rho[Q.star[s]] != R.star[rho[s]]:
            return fail(f"(2) at {s}")
    for s in range(n):
        for t in range(n):
            if Q.order[s, t] and not R.order[rho[s], rho[t]]:
                return fail(f"(3) at ({s}, {t})")
    for s in range(n):
        for e in Q.projections:
            if rho[Q.corestriction[(e, s)]] != R.corestriction[(rho[e], rho[s])]:
                return fail(f"(4) at ({e}, {s})")
    strong = True
    why = None
    for s in range(n):
        for t in range(n):
            if (Q.pp[s][t] is None) != (R.pp[rho[s]][rho[t]] is None):
                strong, why = False, f"(1') at ({s}, {t})"
                break
            if Q.order[s, t] != R.order[rho[s], rho[t]]:
                strong, why = False, f"(3') at ({s}, {t})"
                break
        if not strong:
            break
    iso = strong and sorted(rho) == list(range(R.size))
    return RadiantReport(True, strong, iso, why)

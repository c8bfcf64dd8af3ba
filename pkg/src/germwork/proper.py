"""Proper restriction semigroups and partial monoid actions.

For a proper ``S`` acting on ``X``, the reduced quotient ``T = S/σ`` acts
partially on ``X`` by ``θ̄_t(x) = θ_u(x)`` for any ``u`` in the class ``t``
whose domain contains ``x``.  A partial action of a monoid that is proper
with respect to a family ``E`` of subsets yields the restriction semigroup of
pairs ``(t, e)`` with ``(s, e)(t, f) = (st, α_t⁻¹(e) ∩ f)`` and
``(s, e)* = (1, e)``.  Every proper restriction semigroup with local units is
such a product, built from ``S/σ``, ``P(S)`` and the induced spectral action.

Subsets of the (finite) space are bitmasks; the family ``E`` is a tuple of
distinct masks closed under intersection.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .category import FiniteCategory, check_category_axioms
from .core import (
    PartialMap,
    UnarySemigroup,
    Violation,
    build_from_elements,
    check_axioms,
    has_local_units,
    identity_element,
    inverses,
    is_f_restriction,
    is_proper,
    morphism_violation,
    order_matrix,
    projections,
    quotient_by_sigma,
    require,
    sigma_matrix,
)
from .errors import (
    GermworkError,
    InvalidAction,
    NoLocalUnits,
    NotEUnitary,
    NotProper,
    NotProperAction,
    P1Violation,
    P2Violation,
    SchemaError,
    SizeMismatch,
)
from .germs import RestrictionAction, germ_category, require_action, spectral_action
from .lattice import (
    bits,
    is_principal_ideal,
    mask_of,
    order_ideal_psi,
    semilattice_from_semigroup,
)


# ---------------------------------------------------------------------------
# partial actions of monoids


def reduced_monoid(T: UnarySemigroup):
    """T with star constantly 1.  T must have an identity; an existing star must agree."""
    one = identity_element(T)
    if one is None:
        raise GermworkError("a monoid needs an identity element")
    if T.star is None:
        return UnarySemigroup(T.mul, (one,) * T.size, None, T.labels, T.maps, T.force)
    if any(v != one for v in T.star):
        raise GermworkError("monoid is not reduced: star is not constantly 1")
    return T


@dataclass(frozen=True)
class MonoidPartialAction:
    """One partial map of ``{0..space-1}`` per monoid element."""

    monoid: UnarySemigroup
    space: int
    alpha: tuple
    point_labels: tuple | None = None

    def __post_init__(self):
        if len(self.alpha) != self.monoid.size:
            raise SizeMismatch("one partial map per monoid element is required")
        for m in self.alpha:
            if m.ground != self.space:
                raise SizeMismatch("partial map on the wrong ground set")

    @cached_property
    def one(self):
        one = identity_element(self.monoid)
        if one is None:
            raise GermworkError("acting semigroup has no identity")
        return one

    @cached_property
    def domains(self):
        return tuple(mask_of(m.domain) for m in self.alpha)

    def preimage(self, t, target):
        """``α_t⁻¹(target)`` as a mask."""
        return mask_of(x for x, v in enumerate(self.alpha[t].image) if v is not None and (target >> v) & 1)

    def image_of(self, t, subset):
        out = 0
        for x in bits(subset):
            v = self.alpha[t](x)
            if v is None:
                raise GermworkError(f"point {x} outside the domain of alpha_{t}")
            out |= 1 << v
        return out

    def point_label(self, x):
        return self.point_labels[x] if self.point_labels is not None else str(x)

    def to_json(self, family=None):
        doc = {
            "monoid": self.monoid.to_json(),
            "space": self.space,
            "alpha": [m.to_json() for m in self.alpha],
        }
        if family is not None:
            doc["family"] = [bits(e) for e in family]
        if self.point_labels is not None:
            doc["point_labels"] = list(self.point_labels)
        return doc

    @classmethod
    def from_json(cls, doc):
        """Returns ``(action, family or None)``."""
        try:
            T = UnarySemigroup.from_json(doc["monoid"])
            n = int(doc["space"])
            alpha = tuple(PartialMap.from_json(m) for m in doc["alpha"])
            labels = doc.get("point_labels")
            A = cls(reduced_monoid(T), n, alpha, None if labels is None else tuple(labels))
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad partial-action document: {exc}") from None
        fam = doc.get("family")
        family = None if fam is None else tuple(mask_of(e) for e in fam)
        return A, family


def partial_action_violation(A: MonoidPartialAction):
    """None, or the first failure of ``α_1 = id`` and ``α_s α_t <= α_st``."""
    ident = A.alpha[A.one]
    if ident != PartialMap.identity(A.space):
        x = next(x for x in range(A.space) if ident(x) != x)
        return Violation("alpha_1 = id", (x,))
    T, al = A.monoid, A.alpha
    for s in range(T.size):
        for t in range(T.size):
            st = al[T.mul[s][t]]
            for x in al[t].domain:
                y = al[s](al[t](x))
                if y is not None and st(x) != y:
                    return Violation("alpha_s alpha_t <= alpha_st", (s, t, x))
    return None


def require_partial_action(A: MonoidPartialAction):
    v = partial_action_violation(A)
    if v is not None:
        raise InvalidAction(f"{v.law} fails at {v.witness}", v.witness)


# ---------------------------------------------------------------------------
# the action induced on S/σ


@dataclass(frozen=True)
class InducedAction:
    """θ̄ together with the quotient data it was built from.

    ``chosen[(t, x)]`` is the least u in the class t with x in dom θ_u.
    """

    partial: MonoidPartialAction
    cls_of: tuple
    chosen: dict


def theta_bar_conflicts(S: UnarySemigroup, A: RestrictionAction):
    """Quadruples ``(t, x, u, v)`` with u, v in the class t and ``θ_u(x) != θ_v(x)``."""
    _, cls_of = quotient_by_sigma(S)
    seen = {}
    out = []
    for u in range(S.size):
        for x in sorted(A.domain(u)):
            key = (cls_of[u], x)
            if key in seen:
                v = seen[key]
                if A.theta[u](x) != A.theta[v](x):
                    out.append((cls_of[u], x, v, u))
            else:
                seen[key] = u
    return out


def _improper_pair(S):
    R = sigma_matrix(S)
    for a in range(S.size):
        for b in range(a + 1, S.size):
            if R[a, b] and S.star[a] == S.star[b]:
                return a, b
    return None


def induced_partial_action(S: UnarySemigroup, A: RestrictionAction, check_proper=True):
    """The partial action θ̄ of ``S/σ`` on the space of ``A``.

    With ``check_proper`` a non-proper S is refused up front; without it the
    representatives are compared and the first disagreement is reported.
    """
    require(S, "restriction")
    require_action(A)
    if check_proper and not is_proper(S):
        raise NotProper(
            "semigroup is not proper: sigma-related elements with equal stars",
            _improper_pair(S),
        )
    conflicts = theta_bar_conflicts(S, A)
    if conflicts:
        t, x, u, v = conflicts[0]
        if is_proper(S):
            raise GermworkError("internal: representatives disagree on a proper semigroup")
        raise NotProper(
            f"theta_{S.label(u)} and theta_{S.label(v)} disagree at {A.point_label(x)}",
            (u, v, x),
        )
    Q, cls_of = quotient_by_sigma(S)
    if identity_element(Q) is None:
        raise NoLocalUnits("S/sigma has no identity; S needs local units")
    T = reduced_monoid(Q)
    image = [[None] * A.space for _ in range(T.size)]
    chosen = {}
    for u in range(S.size):
        t = cls_of[u]
        for x in sorted(A.domain(u)):
            if (t, x) not in chosen:
                chosen[(t, x)] = u
                image[t][x] = A.theta[u](x)
    bar = MonoidPartialAction(
        T, A.space, tuple(PartialMap(A.space, tuple(r)) for r in image), A.point_labels
    )
    v = partial_action_violation(bar)
    if v is not None:
        raise GermworkError(f"internal: induced action is not a premorphism: {v.law}", v.witness)
    return InducedAction(bar, cls_of, chosen)


# ---------------------------------------------------------------------------
# partial transformation category


@dataclass(frozen=True)
class TransformationCategory:
    category: FiniteCategory
    arrows: tuple
    index: dict


def transformation_category(A: MonoidPartialAction):
    """Arrows ``(t, x)`` with x in dom α_t, sorted by (t, x).

    ``dom(t, x) = (1, x)``, ``ran(t, x) = (1, α_t(x))`` and
    ``(s, x)(t, y) = (st, y)`` when ``α_t(y) = x``.
    """
    require_partial_action(A)
    T, one = A.monoid, A.one
    arrows = tuple((t, x) for t in range(T.size) for x in sorted(A.alpha[t].domain))
    index = {a: i for i, a in enumerate(arrows)}
    dom = tuple(index[(one, x)] for (t, x) in arrows)
    ran = tuple(index[(one, A.alpha[t](x))] for (t, x) in arrows)
    by_target = {}
    for j, (t, y) in enumerate(arrows):
        by_target.setdefault(A.alpha[t](y), []).append(j)
    comp = {}
    for i, (s, x) in enumerate(arrows):
        for j in by_target.get(x, ()):
            t, y = arrows[j]
            comp[(i, j)] = index[(T.mul[s][t], y)]
    labels = tuple(f"({T.label(t)},{A.point_label(x)})" for (t, x) in arrows)
    C = FiniteCategory(dom, ran, comp, labels)
    v = check_category_axioms(C)
    if v is not None:
        raise GermworkError(f"internal: transformation category fails: {v}")
    return TransformationCategory(C, arrows, index)


@dataclass(frozen=True)
class GermIso:
    """``mapping[i]`` is the germ arrow for transformation arrow i."""

    mapping: tuple
    transformation: TransformationCategory
    germs: object


def check_germ_iso(S: UnarySemigroup, A: RestrictionAction):
    """Build ``f(t, x) = [u, x]`` from ``S/σ ⋉ X`` to ``S ⋉ X`` and verify it is an iso."""
    ind = induced_partial_action(S, A)
    TC = transformation_category(ind.partial)
    G = germ_category(A)
    mapping = tuple(G.germ(ind.chosen[a], a[1]) for a in TC.arrows)
    C, D = TC.category, G.category
    if sorted(mapping) != list(range(D.size)):
        raise GermworkError("internal: f is not a bijection onto the germs")
    for i in range(C.size):
        if mapping[C.dom[i]] != D.dom[mapping[i]] or mapping[C.ran[i]] != D.ran[mapping[i]]:
            raise GermworkError("internal: f does not commute with dom/ran", (i,))
    for (i, j), k in C.comp.items():
        if D.comp.get((mapping[i], mapping[j])) != mapping[k]:
            raise GermworkError("internal: f does not preserve products", (i, j))
    if len(D.comp) != len(C.comp):
        raise GermworkError("internal: f^-1 does not preserve composability")
    return GermIso(mapping, TC, G)


# ---------------------------------------------------------------------------
# proper partial actions and the partial action product


@dataclass(frozen=True)
class ProperActionWitness:
    """The family E, each dom α_t, and the members of E covering it."""

    family: tuple
    domains: tuple
    covers: tuple


def _check_family(family, space):
    fam = tuple(family)
    if len(set(fam)) != len(fam):
        raise NotProperAction("family has repeated members")
    full = (1 << space) - 1
    members = set(fam)
    for e in fam:
        if e & ~full:
            raise NotProperAction("family member outside the space")
        for f in fam:
            if e & f not in members:
                raise NotProperAction(
                    "family is not closed under intersection", (fam.index(e), fam.index(f))
                )
    return fam


def check_proper_partial_action(A: MonoidPartialAction, family):
    """(P1) and (P2) over all t, e, f; raises P1Violation or P2Violation."""
    require_partial_action(A)
    fam = _check_family(family, A.space)
    members = {e: i for i, e in enumerate(fam)}
    covers = []
    for t in range(A.monoid.size):
        d = A.domains[t]
        inside = [i for i, e in enumerate(fam) if not e & ~d]
        union = 0
        for i in inside:
            union |= fam[i]
        if union != d:
            x = bits(d & ~union)[0]
            raise P1Violation(
                f"dom alpha_{A.monoid.label(t)} is not a union of family members "
                f"(point {A.point_label(x)} uncovered)",
                (t, x),
            )
        covers.append(tuple(i for i in inside))
        for i in inside:
            for j, f in enumerate(fam):
                if A.preimage(t, f) & fam[i] not in members:
                    raise P2Violation(
                        f"alpha_{A.monoid.label(t)}^-1(f) ∩ e is not in the family", (t, i, j)
                    )
    return ProperActionWitness(fam, A.domains, tuple(covers))


@dataclass(frozen=True)
class PairProduct:
    """Restriction semigroup on pairs ``(t, i)`` meaning ``(t, family[i])``."""

    semigroup: UnarySemigroup
    pairs: tuple
    action: MonoidPartialAction
    family: tuple
    onto_monoid: bool

    @cached_property
    def index(self):
        return {p: k for k, p in enumerate(self.pairs)}


def _mask_label(A, e):
    return "{" + ",".join(A.point_label(x) for x in bits(e)) + "}"


def partial_action_product(A: MonoidPartialAction, family, family_labels=None):
    """Pairs ``(t, e)`` with ``e ⊆ dom α_t``; every structural clause is verified."""
    W = check_proper_partial_action(A, family)
    fam = W.family
    T, one = A.monoid, A.one
    members = {e: i for i, e in enumerate(fam)}
    pairs = [(t, i) for t in range(T.size) for i, e in enumerate(fam) if not e & ~A.domains[t]]

    def mul(a, b):
        (s, i), (t, j) = a, b
        return (T.mul[s][t], members[A.preimage(t, fam[i]) & fam[j]])

    def star(a):
        return (one, a[1])

    if family_labels is None:
        family_labels = [_mask_label(A, e) for e in fam]
    labels = [f"({T.label(t)},{family_labels[i]})" for t, i in pairs]
    S = build_from_elements(pairs, mul, star, labels=labels)
    onto = {t for t, _ in pairs} == set(range(T.size))
    out = PairProduct(S, tuple(pairs), A, fam, onto)
    v = product_clause_violation(out)
    if v is not None:
        raise GermworkError(f"internal: partial action product fails: {v}")
    return out


def product_clause_violation(Pp: PairProduct):
    """None, or the first failing structural clause of a partial action product.

    (1) restriction axioms; (2) projections are exactly the (1, e) and
    e -> (1, e) turns intersection into product; (3) (s,e) <= (t,f) iff s = t
    and e ⊆ f; (4) σ-related iff equal monoid part, and the class map to the
    monoid is an injective morphism; (5) proper.
    """
    S, pairs, fam = Pp.semigroup, Pp.pairs, Pp.family
    T, one = Pp.action.monoid, Pp.action.one
    v = check_axioms(S, "restriction")
    if v is not None:
        return f"(1) {v.describe(S)}"
    P = projections(S)
    expected = sorted(Pp.index[(one, i)] for i in range(len(fam)))
    if P != expected:
        return "(2) projections are not the pairs (1, e)"
    members = {e: i for i, e in enumerate(fam)}
    for i, e in enumerate(fam):
        for j, f in enumerate(fam):
            if S.mul[Pp.index[(one, i)]][Pp.index[(one, j)]] != Pp.index[(one, members[e & f])]:
                return "(2) e -> (1, e) does not preserve meets"
    L = order_matrix(S)
    for a, (s, i) in enumerate(pairs):
        for b, (t, j) in enumerate(pairs):
            if bool(L[a, b]) != (s == t and not fam[i] & ~fam[j]):
                return f"(3) order differs at {S.label(a)}, {S.label(b)}"
    R = sigma_matrix(S)
    for a, (s, _) in enumerate(pairs):
        for b, (t, _) in enumerate(pairs):
            if bool(R[a, b]) != (s == t):
                return f"(4) sigma differs at {S.label(a)}, {S.label(b)}"
    for a, (s, _) in enumerate(pairs):
        if pairs[S.star[a]][0] != one:
            return "(4) class map does not preserve star"
        for b, (t, _) in enumerate(pairs):
            if pairs[S.mul[a][b]][0] != T.mul[s][t]:
                return "(4) class map does not preserve product"
    if not is_proper(S):
        return "(5) not proper"
    return None


# ---------------------------------------------------------------------------
# structure theorem


@dataclass(frozen=True)
class Decomposition:
    """``S ≅ S/σ ⋉ ι(P(S))`` via ``psi[s] = ([s]σ, D_{s*})``.

    ``u1[(t, i)]`` is the element ``s e`` witnessing ``D_e = D_{u*}`` for the
    pair (t, D_e); ``domain_ideals[t]`` is ``Ψ(dom β̄_t)`` as a mask over P(S).
    """

    quotient: UnarySemigroup
    cls_of: tuple
    semilattice: object
    projections: tuple
    induced: InducedAction
    product: PairProduct
    psi: tuple
    u1: dict
    domain_ideals: tuple


def decompose_proper(S: UnarySemigroup):
    require(S, "restriction")
    if not has_local_units(S):
        raise NoLocalUnits("the structure theorem needs local units")
    if not is_proper(S):
        raise NotProper("semigroup is not proper", _improper_pair(S))
    beta = spectral_action(S)
    ind = induced_partial_action(S, beta)
    E, P = semilattice_from_semigroup(S)
    pos = {e: i for i, e in enumerate(P)}
    fam = tuple(E.down)
    prod = partial_action_product(ind.partial, fam, ["D_" + S.label(e) for e in P])
    cls_of = ind.cls_of
    psi = tuple(prod.index[(cls_of[s], pos[S.star[s]])] for s in range(S.size))
    if sorted(psi) != list(range(S.size)) or prod.semigroup.size != S.size:
        raise GermworkError("internal: psi is not a bijection")
    v = morphism_violation(S, prod.semigroup, psi)
    if v is not None:
        raise GermworkError(f"internal: psi fails: {v.law}", v.witness)
    L = order_matrix(S)
    u1 = {}
    for k, (t, i) in enumerate(prod.pairs):
        e = P[i]
        s = next(s for s in range(S.size) if cls_of[s] == t and L[e, S.star[s]])
        u = S.mul[s][e]
        if cls_of[u] != t or S.star[u] != e or psi[u] != k:
            raise GermworkError("internal: u = se does not witness the pair", (s, e))
        u1[(t, i)] = u
    ideals = []
    T = ind.partial.monoid
    for t in range(T.size):
        ideal = order_ideal_psi(E, ind.partial.domains[t])
        expected = mask_of(
            i for i, e in enumerate(P) if any(cls_of[u] == t and L[e, S.star[u]] for u in range(S.size))
        )
        if ideal != expected:
            raise GermworkError("internal: domain ideal differs from the stars below the class", (t,))
        ideals.append(ideal)
    return Decomposition(T, cls_of, E, tuple(P), ind, prod, psi, u1, tuple(ideals))


def f_restriction_criterion(S: UnarySemigroup):
    """Every ``Ψ(dom β̄_t)`` principal; must agree with "every σ-class has a maximum"."""
    D = decompose_proper(S)
    by_ideals = all(is_principal_ideal(D.semilattice, m) for m in D.domain_ideals)
    by_maxima = is_f_restriction(S)
    if by_ideals != by_maxima:
        raise GermworkError("internal: the two F-restriction tests disagree")
    return by_ideals


# ---------------------------------------------------------------------------
# E-unitary inverse semigroups


@dataclass(frozen=True)
class PetrichReilly:
    """``S/σ ⋉_ψ E(S)`` on pairs ``(t, e)``, and its links to S and to the D_e product.

    ``gamma[k]`` sends pair k to ``(t, D_e)`` in ``decomposition.product``;
    ``iso[s]`` is the pair ``([s]σ, s*)``.
    """

    semigroup: UnarySemigroup
    pairs: tuple
    psi_maps: tuple
    gamma: tuple
    iso: tuple
    decomposition: Decomposition


def petrich_reilly(S: UnarySemigroup):
    if S.star is None or check_axioms(S, "inverse") is not None:
        raise NotEUnitary("semigroup is not an inverse semigroup")
    if not is_proper(S):
        raise NotEUnitary("inverse semigroup is not E-unitary", _improper_pair(S))
    D = decompose_proper(S)
    T, cls_of, P = D.quotient, D.cls_of, list(D.projections)
    pos = {e: i for i, e in enumerate(P)}
    inv = inverses(S)
    L = order_matrix(S)

    # ψ_t(e) = u e u⁻¹ for any u in the class t with e <= u*
    psi_maps = []
    for t in range(T.size):
        m = {}
        for u in range(S.size):
            if cls_of[u] != t:
                continue
            for e in P:
                if L[e, S.star[u]]:
                    val = S.mul[S.mul[u][e]][inv[u]]
                    if m.setdefault(e, val) != val:
                        raise GermworkError("internal: psi_t depends on the representative", (u, e))
        if len(set(m.values())) != len(m):
            raise GermworkError("internal: psi_t is not injective", (t,))
        psi_maps.append(m)
    back = [{v: k for k, v in m.items()} for m in psi_maps]
    Tinv = inverses(T)

    pairs = [(t, e) for t in range(T.size) for e in P if e in psi_maps[t]]

    def mul(a, b):
        (s, e), (t, f) = a, b
        return (T.mul[s][t], back[t][S.mul[psi_maps[t][f]][e]])

    def inverse(a):
        s, e = a
        return (Tinv[s], psi_maps[s][e])

    def star(a):
        return mul(inverse(a), a)

    labels = [f"({T.label(t)},{S.label(e)})" for t, e in pairs]
    R = build_from_elements(pairs, mul, star, labels=labels)
    v = check_axioms(R, "inverse")
    if v is not None:
        raise GermworkError(f"internal: psi-product is not inverse: {v.describe(R)}")
    index = {p: k for k, p in enumerate(pairs)}
    if [index[inverse(p)] for p in pairs] != inverses(R):
        raise GermworkError("internal: (s,e)^-1 = (s^-1, psi_s(e)) fails")

    prod = D.product
    gamma = tuple(prod.index[(t, pos[e])] for t, e in pairs)
    if sorted(gamma) != list(range(prod.semigroup.size)):
        raise GermworkError("internal: gamma is not a bijection")
    v = morphism_violation(R, prod.semigroup, gamma)
    if v is not None:
        raise GermworkError(f"internal: gamma fails: {v.law}", v.witness)

    iso = tuple(index[(cls_of[s], S.star[s])] for s in range(S.size))
    if sorted(iso) != list(range(S.size)):
        raise GermworkError("internal: s -> ([s], s*) is not a bijection")
    v = morphism_violation(S, R, iso)
    if v is not None:
        raise GermworkError(f"internal: s -> ([s], s*) fails: {v.law}", v.witness)

    _check_domain_identities(D, psi_maps, back)
    return PetrichReilly(R, tuple(pairs), tuple(psi_maps), gamma, iso, D)


def _check_domain_identities(D, psi_maps, back):
    """``e ∈ dom ψ_t ⇔ D_e ⊆ dom β̄_t`` (same for ranges), ``β̄_t(D_e) = D_{ψ_t(e)}``
    and ``β̄_t⁻¹(D_e) = D_{ψ_t⁻¹(e)}``."""
    A = D.induced.partial
    E, P = D.semilattice, D.projections
    for t in range(A.monoid.size):
        dom, ran = A.domains[t], mask_of(A.alpha[t].codomain)
        for i, e in enumerate(P):
            De = E.down[i]
            if (e in psi_maps[t]) != (not De & ~dom):
                raise GermworkError("internal: domain equivalence fails", (t, e))
            if (e in back[t]) != (not De & ~ran):
                raise GermworkError("internal: range equivalence fails", (t, e))
            if e in psi_maps[t]:
                if A.image_of(t, De) != E.down[P.index(psi_maps[t][e])]:
                    raise GermworkError("internal: image of D_e differs", (t, e))
            if e in back[t]:
                if A.preimage(t, De) != E.down[P.index(back[t][e])]:
                    raise GermworkError("internal: preimage of D_e differs", (t, e))

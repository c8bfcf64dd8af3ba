import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from germwork import catalog
from germwork.core import (
    PartialMap,
    adjoin_identity,
    build_from_table,
    check_axioms,
    check_boolean_restriction,
    check_derived_identities,
    check_proper_via_compat,
    compatibility,
    find_isomorphism,
    generate_in_pt,
    has_local_units,
    identity_element,
    is_f_restriction,
    is_proper,
    meet_of_compatible,
    natural_order,
    order_matrix,
    permute,
    projections,
    quotient_by_sigma,
    sigma,
    sigma_class_maxima,
)
from germwork.errors import (
    NoRestrictionZero,
    NonAssociative,
    NotCompatible,
    SignatureTooWeak,
    SizeMismatch,
    TooLarge,
)

import oracles
from conftest import LOCAL_UNITS, RESTRICTION

pt2_maps = st.tuples(*[st.sampled_from([None, 0, 1])] * 2)
pt3_maps = st.tuples(*[st.sampled_from([None, 0, 1, 2])] * 3)


def closure(ground, images, with_identity=False):
    gens = [PartialMap(ground, im) for im in images]
    if with_identity:
        gens.append(PartialMap.identity(ground))
    return generate_in_pt(ground, gens)


# --- construction -----------------------------------------------------------


def test_trivial_monoid_from_table():
    S = build_from_table([[0]], [0])
    assert S.size == 1 and S.signature == "star"
    assert check_axioms(S, "restriction") is None


def test_two_chain_semilattice_is_restriction():
    S = build_from_table([[0, 0], [0, 1]], [0, 1])
    assert check_axioms(S, "restriction") is None


def test_nonassociative_table_rejected_with_witness():
    # (0*0)*1 = 1*1 = 0 but 0*(0*1) = 0*0 = 1
    with pytest.raises(NonAssociative) as err:
        build_from_table([[1, 0], [0, 0]])
    assert len(err.value.witness) == 3


def test_shape_errors():
    with pytest.raises(SizeMismatch):
        build_from_table([[0, 0], [0]])
    with pytest.raises(SizeMismatch):
        build_from_table([[0]], [0, 0])
    with pytest.raises(SizeMismatch):
        build_from_table([[0]], None, [0])


def test_size_guard(monkeypatch):
    import germwork.core as core

    monkeypatch.setattr(core, "SIZE_GUARD", 1)
    with pytest.raises(TooLarge):
        build_from_table([[0, 0], [0, 1]], [0, 1])
    assert build_from_table([[0, 0], [0, 1]], [0, 1], force=True).size == 2


def test_json_round_trip_keeps_tables():
    S = catalog.semigroup("paper-4")
    T = type(S).from_json(S.to_json())
    assert T == S


# --- generation in PT(X) ---------------------------------------------------


def test_all_partial_maps_on_two_points_give_pt2():
    S = closure(2, oracles.all_partial_maps(2))
    assert S.size == 9
    assert S.same_tables(catalog.semigroup("pt:2").without_plus())


def test_four_element_generated_from_f_and_g():
    # f is the identity on a, g sends a to b; the identity is a generator too
    S = closure(2, [(0, None), (1, None)], with_identity=True)
    assert S.size == 4
    ref = catalog.semigroup("paper-4")
    order = [S.maps.index(m) for m in ref.maps]
    assert permute(S, order).same_tables(ref)
    assert ref.labels == ("∅", "f", "g", "1")


def test_empty_generators_give_trivial_monoid():
    S = generate_in_pt(1, [])
    assert S.size == 1 and identity_element(S) == 0


def test_plus_closure_requires_star():
    from germwork.errors import SchemaError

    with pytest.raises(SchemaError):
        generate_in_pt(2, [], close_under=("plus",))


def test_composition_is_right_factor_first():
    f = PartialMap(2, (0, None))
    g = PartialMap(2, (1, None))
    assert f.compose(g).image == (None, None)
    assert g.compose(f).image == (1, None)


# --- axiom classes ---------------------------------------------------------


def test_pt2_is_restriction():
    assert check_axioms(catalog.semigroup("pt:2"), "restriction") is None


def test_relations_fail_restriction_with_frozen_witness():
    S = catalog.semigroup("r:2")
    v = check_axioms(S, "restriction")
    assert v.law == "x* y = y (xy)*"
    assert [S.label(w) for w in v.witness] == ["1000", "1010"]
    assert check_axioms(S, "corestriction") is not None
    assert check_axioms(S, "biEhresmann") is None


def test_i2_is_inverse():
    assert check_axioms(catalog.semigroup("i:2"), "inverse") is None


def test_range_check_needs_plus():
    with pytest.raises(SignatureTooWeak):
        check_axioms(catalog.semigroup("paper-4"), "range")


def test_unknown_axiom_class():
    with pytest.raises(ValueError):
        check_axioms(catalog.semigroup("trivial"), "semiring")


@pytest.mark.parametrize("name", RESTRICTION)
def test_derived_identities_hold(name):
    assert check_derived_identities(catalog.semigroup(name)) is None


@pytest.mark.parametrize("name", [n for n in RESTRICTION if catalog.semigroup(n).size <= 40])
def test_associativity_by_brute_force(name):
    S = catalog.semigroup(name)
    n = S.size
    assert all(
        S.mul[S.mul[a][b]][c] == S.mul[a][S.mul[b][c]]
        for a in range(n)
        for b in range(n)
        for c in range(n)
    )


# --- projections and order -------------------------------------------------


def test_projection_counts():
    assert len(projections(catalog.semigroup("pt:2"))) == 4
    assert projections(catalog.semigroup("group:3")) == [0]
    assert projections(catalog.semigroup("free:3")) == list(range(7))


@pytest.mark.parametrize("name", ["pt:2", "pt:3", "i:3", "paper-4"])
def test_order_is_map_restriction(name):
    S = catalog.semigroup(name)
    L = natural_order(S)
    for a in range(S.size):
        for b in range(S.size):
            assert L.holds(a, b) == S.maps[a].is_restriction_of(S.maps[b])


def test_order_on_semilattice_and_reduced_monoid():
    E = catalog.semigroup("chain:3")
    L = order_matrix(E)
    assert all(L[a, b] == (E.mul[a][b] == a) for a in range(3) for b in range(3))
    assert np.array_equal(order_matrix(catalog.semigroup("group:3")), np.eye(3, dtype=bool))


@pytest.mark.parametrize("name", RESTRICTION)
def test_order_matches_oracle(name):
    S = catalog.semigroup(name)
    assert natural_order(S).pairs == oracles.order_pairs(S)


# --- compatibility and meets -----------------------------------------------


def test_meet_of_one_element_is_itself():
    S = catalog.semigroup("pt:2")
    assert all(meet_of_compatible(S, [s]) == s for s in range(S.size))


def test_meet_of_two_restrictions_restricts_to_common_domain():
    S = catalog.semigroup("pt:3")
    a = S.index_of("01-")
    b = S.index_of("0-2")
    assert S.label(meet_of_compatible(S, [a, b])) == "0--"


def test_incompatible_pair_raises():
    S = catalog.semigroup("pt:2")
    with pytest.raises(NotCompatible) as err:
        meet_of_compatible(S, [S.index_of("0-"), S.index_of("1-")])
    assert err.value.witness == (S.index_of("0-"), S.index_of("1-"))


def test_compatibility_is_reflexive_and_symmetric():
    C = compatibility(catalog.semigroup("pt:3")).matrix
    assert C.diagonal().all() and (C == C.T).all()


# --- sigma and properness --------------------------------------------------


def test_sigma_basic_shapes():
    assert len(sigma(catalog.semigroup("chain:3")).classes()) == 1
    assert len(sigma(catalog.semigroup("group:3")).classes()) == 3
    assert sigma(catalog.semigroup("paper-4")).classes() == [[0, 1, 2, 3]]


@pytest.mark.parametrize("name", RESTRICTION)
def test_sigma_matches_lower_bound_oracle(name):
    S = catalog.semigroup(name)
    assert sigma(S).pairs == oracles.common_lower_bound(S)


@pytest.mark.parametrize("name", [n for n in RESTRICTION if catalog.semigroup(n).size <= 34])
def test_sigma_matches_fixpoint_congruence(name):
    S = catalog.semigroup(name)
    assert sigma(S).pairs == oracles.congruence_fixpoint(S)


def test_proper_examples():
    assert is_proper(catalog.semigroup("chain:3"))
    assert not is_proper(catalog.semigroup("i:2"))
    assert is_proper(catalog.semigroup("exg:2x2"))


@pytest.mark.parametrize("name", RESTRICTION)
def test_proper_iff_compatibility_is_sigma(name):
    S = catalog.semigroup(name)
    assert is_proper(S) == check_proper_via_compat(S)


# --- units and quotients ---------------------------------------------------


def test_local_units_and_identity():
    assert has_local_units(catalog.semigroup("group:3"))
    assert has_local_units(catalog.semigroup("i:3"))
    S = catalog.semigroup("nolu:3")
    assert not has_local_units(S)
    S1 = adjoin_identity(S)
    assert S1.size == 4
    assert check_axioms(S1, "restriction") is None
    assert has_local_units(S1)
    M = catalog.semigroup("pt:2")
    assert adjoin_identity(M) is M


def test_quotients():
    Q, _ = quotient_by_sigma(catalog.semigroup("chain:3"))
    assert Q.size == 1
    Q, cls = quotient_by_sigma(catalog.semigroup("exg:2x3"))
    assert find_isomorphism(Q, catalog.semigroup("group:3").without_plus()) is not None
    G = catalog.semigroup("group:3")
    Q, cls = quotient_by_sigma(G)
    assert Q.mul == G.mul and cls == (0, 1, 2)


def test_f_restriction_examples():
    assert is_f_restriction(catalog.semigroup("exg:2x2"))
    assert is_f_restriction(catalog.semigroup("chain:3"))
    assert not is_f_restriction(catalog.semigroup("antichain:2"))
    assert not is_f_restriction(catalog.semigroup("free:2"))
    assert is_f_restriction(catalog.semigroup("group:3"))
    S = catalog.semigroup("exg:2x2")
    assert [S.label(m) for m in sigma_class_maxima(S)] == ["c1g0", "c1g1"]


# --- Boolean restriction semigroups ----------------------------------------


def test_two_chain_is_boolean():
    assert check_boolean_restriction(catalog.semigroup("chain:2")).ok


def test_three_chain_fails_br2():
    rep = check_boolean_restriction(catalog.semigroup("chain:3"))
    assert not rep.ok and rep.failed.startswith("BR2")


def test_boolean_check_needs_zero():
    with pytest.raises(NoRestrictionZero):
        check_boolean_restriction(catalog.semigroup("group:3"))


# --- isomorphism helper ----------------------------------------------------


def test_find_isomorphism_on_permuted_copy():
    S = catalog.semigroup("i:2")
    order = [3, 1, 6, 0, 5, 2, 4]
    T = permute(S, order)
    f = find_isomorphism(S, T)
    assert f is not None
    assert find_isomorphism(S, catalog.semigroup("pt:2")) is None


# --- properties on random subsemigroups of PT(X) ---------------------------


@given(st.lists(pt3_maps, min_size=1, max_size=3))
def test_generated_semigroups_are_restriction(images):
    S = closure(3, images)
    assert check_axioms(S, "restriction") is None
    assert check_derived_identities(S) is None


@given(st.lists(pt3_maps, min_size=1, max_size=3))
def test_generated_order_is_restriction_of_maps(images):
    S = closure(3, images)
    L = order_matrix(S)
    for a in range(S.size):
        for b in range(S.size):
            assert bool(L[a, b]) == S.maps[a].is_restriction_of(S.maps[b])


@given(st.lists(pt2_maps, min_size=1, max_size=3))
def test_generated_sigma_matches_fixpoint(images):
    S = closure(2, images)
    assert sigma(S).pairs == oracles.congruence_fixpoint(S)
    assert is_proper(S) == check_proper_via_compat(S)


@given(st.lists(pt3_maps, min_size=1, max_size=3), st.data())
def test_meet_is_greatest_lower_bound(images, data):
    S = closure(3, images)
    a = data.draw(st.integers(0, S.size - 1))
    b = data.draw(st.integers(0, S.size - 1))
    if not oracles.compatible(S, a, b):
        with pytest.raises(NotCompatible):
            meet_of_compatible(S, [a, b])
        return
    m = meet_of_compatible(S, [a, b])
    assert oracles.leq(S, m, a) and oracles.leq(S, m, b)
    for c in range(S.size):
        if oracles.leq(S, c, a) and oracles.leq(S, c, b):
            assert oracles.leq(S, c, m)


@given(st.lists(pt3_maps, min_size=1, max_size=3))
def test_quotient_is_reduced_morphic_image(images):
    S = closure(3, images, with_identity=True)
    Q, cls = quotient_by_sigma(S)
    assert len(projections(Q)) == 1
    for a in range(S.size):
        assert cls[S.star[a]] == Q.star[cls[a]]

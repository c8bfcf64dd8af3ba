import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from germwork import catalog
from germwork.category import enumerate_slices, slice_semigroup
from germwork.constellation import (
    Constellation,
    P_of,
    T_of,
    check_constellation,
    check_inductive,
    check_radiant,
    slice_constellation,
    with_derived_tables,
)
from germwork.core import PartialMap, check_axioms, generate_in_pt, quotient_by_sigma
from germwork.errors import NotInductive
from germwork.germs import iota, universal_category

import oracles
from conftest import LOCAL_UNITS, RESTRICTION

pt3_maps = st.tuples(*[st.sampled_from([None, 0, 1, 2])] * 3)


def test_trivial_constellation_is_inductive():
    assert check_inductive(P_of(catalog.semigroup("trivial"))) is None


def test_pt2_constellation_is_inductive():
    Q = P_of(catalog.semigroup("pt:2"))
    assert check_constellation(Q) is None and check_inductive(Q) is None


def test_two_right_identities_break_q3():
    # a left-zero band on two projections: each is a right identity of the other
    pp = ((0, 0), (1, 1))
    Q = Constellation(pp, (0, 1), np.eye(2, dtype=bool))
    v = check_constellation(Q)
    assert v.law == "Q3 unique right identity s*" and v.witness == (0,)


def test_semilattice_composes_downwards():
    S = catalog.semigroup("free:3")
    Q = P_of(S)
    for s in range(S.size):
        for t in range(S.size):
            assert (Q.pp[s][t] is not None) == oracles.leq(S, t, s)
            if Q.pp[s][t] is not None:
                assert Q.pp[s][t] == t


def test_four_element_is_inductive():
    assert check_inductive(P_of(catalog.semigroup("paper-4"))) is None


@pytest.mark.parametrize("name", ["pt:2", "pt:3", "i:3", "exg:2x3"])
def test_range_composability_is_plus_below_star(name):
    S = catalog.semigroup(name)
    Q = P_of(S)
    for s in range(S.size):
        for t in range(S.size):
            assert (Q.pp[s][t] is not None) == oracles.leq(S, S.plus[t], S.star[s])


def test_reversed_inequality_does_not_describe_composability():
    # in PT(2) the empty map composes after anything whose range is empty only
    S = catalog.semigroup("pt:2")
    Q = P_of(S)
    empty, ident = S.index_of("--"), S.index_of("01")
    assert Q.pp[empty][ident] is None
    assert oracles.leq(S, S.star[empty], S.plus[ident])


@pytest.mark.parametrize("name", RESTRICTION)
def test_T_of_P_is_identity(name):
    S = catalog.semigroup(name)
    assert T_of(P_of(S)).same_tables(S.without_plus())


def test_one_element_constellation_gives_trivial_monoid():
    Q = Constellation(((0,),), (0,), np.ones((1, 1), dtype=bool), {(0, 0): 0}, {(0, 0): 0})
    S = T_of(Q)
    assert S.mul == ((0,),) and S.star == (0,)


@pytest.mark.parametrize("name", ["i:2", "paper-4", "act:t2"])
def test_P_of_T_is_identity(name):
    Q = P_of(catalog.semigroup(name))
    assert P_of(T_of(Q)).same_tables(Q)


def test_non_inductive_is_refused():
    pp = ((0, 0), (1, 1))
    Q = Constellation(pp, (0, 1), np.eye(2, dtype=bool))
    with pytest.raises(NotInductive):
        T_of(Q)


@pytest.mark.parametrize("name", RESTRICTION)
def test_pseudoproduct_is_always_defined(name):
    Q = P_of(catalog.semigroup(name))
    for s in range(Q.size):
        for t in range(Q.size):
            assert Q.pp[s][Q.corestriction[(Q.star[s], t)]] is not None


@pytest.mark.parametrize("name", ["paper-4", "pt:2", "i:3"])
def test_corestriction_is_maximal_by_search(name):
    S = catalog.semigroup(name)
    Q = P_of(S)
    for e in sorted(set(S.star)):
        for s in range(S.size):
            below = [t for t in range(S.size) if oracles.leq(S, t, s) and S.mul[e][t] == t]
            top = [t for t in below if all(oracles.leq(S, u, t) for u in below)]
            assert top == [Q.corestriction[(e, s)]] == [S.mul[e][s]]


@given(st.lists(pt3_maps, min_size=1, max_size=3))
def test_round_trips_on_random_semigroups(images):
    S = generate_in_pt(3, [PartialMap(3, im) for im in images])
    Q = P_of(S)
    assert T_of(Q).same_tables(S)
    assert P_of(T_of(Q)).same_tables(Q)


def test_json_round_trip_rederives_tables():
    Q = P_of(catalog.semigroup("paper-4"))
    R = Constellation.from_json(Q.to_json())
    assert R.same_tables(Q)
    doc = Q.to_json()
    del doc["order"]
    assert Constellation.from_json(doc).pp == Q.pp


# --- slice constellations --------------------------------------------------


@pytest.mark.parametrize("name", ["paper-4", "pt:2", "exg:2x2", "i:2", "act:t2"])
def test_iota_image_clauses(name):
    S = catalog.semigroup(name)
    G = universal_category(S)
    family = [iota(G, s) for s in range(S.size)]
    Q = slice_constellation(G.category, family)
    assert check_inductive(Q) is None


def test_projections_compose_by_intersection():
    G = universal_category(catalog.semigroup("free:3"))
    C = G.category
    family = [iota(G, s) for s in range(7)]
    Q = slice_constellation(C, family)
    for i, U in enumerate(family):
        for j, V in enumerate(family):
            if Q.pp[i][j] is not None:
                assert family[Q.pp[i][j]] == U & V


def test_pair_groupoid_slices_form_a_constellation():
    C = catalog.category("pair-groupoid:2")
    Q = slice_constellation(C, enumerate_slices(C))
    assert Q.size == 9 and check_inductive(Q) is None


# --- radiants --------------------------------------------------------------


def test_identity_radiant_is_isomorphism():
    Q = P_of(catalog.semigroup("pt:2"))
    rep = check_radiant(Q, Q, range(Q.size))
    assert rep.radiant and rep.strong and rep.isomorphism


@pytest.mark.parametrize("name", LOCAL_UNITS)
def test_P_of_iota_is_isomorphism(name):
    S = catalog.semigroup(name)
    G = universal_category(S)
    family = [iota(G, s) for s in range(S.size)]
    rep = check_radiant(P_of(S), slice_constellation(G.category, family), range(S.size))
    assert rep.isomorphism


def test_collapsing_morphism_is_radiant_not_strong():
    S = catalog.semigroup("exg:2x2")
    Q, cls = quotient_by_sigma(S)
    rep = check_radiant(P_of(S), P_of(Q), cls)
    assert rep.radiant and not rep.strong and not rep.isomorphism


def test_non_radiant_map_is_reported():
    S = catalog.semigroup("chain:2")
    rep = check_radiant(P_of(S), P_of(S), [1, 0])
    assert not rep.radiant

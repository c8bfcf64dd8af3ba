from itertools import combinations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from germwork.errors import Degenerate, GermworkError, NotBelow, NotMeetMorphism
from germwork.lattice import (
    FinSemilattice,
    antichain_with_bottom,
    basic_open,
    bits,
    booleanization,
    chain,
    close_under_boolean_ops,
    extend_to_gba_morphism,
    filters,
    free_semilattice,
    is_order_ideal,
    mask_of,
    order_ideal_psi,
    order_ideal_psi_inv,
    order_ideals,
    spectrum,
)


def intersection_semilattice(masks):
    """Close a family of subsets under intersection; meet is intersection."""
    fam = set(masks)
    while True:
        new = {a & b for a in fam for b in fam} | fam
        if new == fam:
            break
        fam = new
    elems = sorted(fam)
    pos = {m: i for i, m in enumerate(elems)}
    meet = tuple(tuple(pos[a & b] for b in elems) for a in elems)
    return FinSemilattice(meet), elems


semilattices = st.lists(st.integers(0, 15), min_size=1, max_size=5).map(
    lambda ms: intersection_semilattice(ms)[0]
)
small_semilattices = semilattices.filter(lambda E: E.size <= 6)


def brute_filters(E):
    n = E.size
    out = []
    for r in range(1, n + 1):
        for items in combinations(range(n), r):
            s = set(items)
            up = all(f in s for e in s for f in range(n) if E.leq[e, f])
            closed = all(E.meet[a][b] in s for a in s for b in s)
            if up and closed:
                out.append(frozenset(s))
    return out


def brute_ideals(E):
    n = E.size
    return [
        m
        for m in range(1 << n)
        if all(not E.leq[f, e] or (m >> f) & 1 for e in bits(m) for f in range(n))
    ]


CATALOG = [chain(1), chain(2), chain(3), antichain_with_bottom(3), free_semilattice(2), free_semilattice(3)]


# --- filters ---------------------------------------------------------------


def test_filter_counts_on_small_examples():
    assert len(filters(chain(1))) == 1
    F = filters(chain(2))
    assert [sorted(f.members) for f in F] == [[0, 1], [1]]
    assert len(filters(free_semilattice(2))) == 3


@pytest.mark.parametrize("E", CATALOG, ids=lambda E: f"n{E.size}")
def test_filters_match_brute_force(E):
    assert {f.members for f in filters(E)} == set(brute_filters(E))


@given(semilattices)
def test_filters_are_principal_and_counted(E):
    F = filters(E)
    assert len(F) == E.size == len(spectrum(E))
    for f in F:
        g = f.generator(E)
        assert mask_of(f.members) == E.up[g]


# --- basic open sets -------------------------------------------------------


def test_top_of_two_chain_is_everything():
    E = chain(2)
    assert basic_open(E, E.top()) == 0b11


def test_removing_lower_covers_leaves_a_singleton():
    for E in CATALOG:
        for e in range(E.size):
            assert basic_open(E, e, E.lower_covers(e)) == 1 << e


def test_subtracting_something_not_below_fails():
    E = antichain_with_bottom(2)
    with pytest.raises(NotBelow):
        basic_open(E, 1, [2])


@given(semilattices, st.data())
def test_d_is_a_meet_embedding(E, data):
    a = data.draw(st.integers(0, E.size - 1))
    b = data.draw(st.integers(0, E.size - 1))
    assert E.down[E.meet[a][b]] == E.down[a] & E.down[b]
    assert (E.down[a] == E.down[b]) == (a == b)


# --- Booleanization --------------------------------------------------------


def test_two_chain_generates_four_sets():
    B, _ = booleanization(chain(2))
    assert B.size == 4
    assert close_under_boolean_ops(chain(2).down) == [0, 1, 2, 3]


def test_one_point_booleanization():
    B, iota = booleanization(chain(1))
    assert sorted(B.members()) == [0, 1] and iota == (1,)


def test_antichain_with_bottom_generates_powerset_of_four_points():
    E = antichain_with_bottom(3)
    B, _ = booleanization(E)
    assert B.points == 4 and B.size == 16
    assert len(close_under_boolean_ops(E.down)) == 16


@given(semilattices)
def test_generated_algebra_is_the_powerset(E):
    B, _ = booleanization(E)
    assert B.is_powerset()
    assert len(close_under_boolean_ops(E.down)) == 1 << E.size


# --- universal property ----------------------------------------------------


def test_extension_of_d_is_identity():
    E = free_semilattice(2)
    psi = extend_to_gba_morphism(E, E.down, E.size)
    assert all(psi(U) == U for U in range(1 << E.size))


def test_two_chain_into_two_points():
    # bottom goes to one atom, top to both points
    E = chain(2)
    psi = extend_to_gba_morphism(E, [0b01, 0b11], 2)
    assert psi(0b01) == 0b01 and psi(0b10) == 0b10 and psi(0b11) == 0b11


def test_zero_map_is_degenerate():
    with pytest.raises(Degenerate):
        extend_to_gba_morphism(chain(2), [0, 0], 1)


def test_non_meet_map_is_rejected():
    with pytest.raises(NotMeetMorphism):
        extend_to_gba_morphism(antichain_with_bottom(2), [0b00, 0b01, 0b01], 1)


@given(small_semilattices, st.integers(1, 3), st.data())
def test_extension_preserves_differences(E, m, data):
    # a meet morphism into 2^m: pick a point-wise filter for each target point
    gens = [data.draw(st.integers(0, E.size - 1)) for _ in range(m)]
    alpha = [sum(1 << j for j, g in enumerate(gens) if E.leq[g, e]) for e in range(E.size)]
    try:
        psi = extend_to_gba_morphism(E, alpha, m)
    except Degenerate:
        return
    for U in range(1 << E.size):
        for V in range(1 << E.size):
            assert psi(U & ~V) == psi(U) & ~psi(V)
    assert all(psi(E.down[e]) == alpha[e] for e in range(E.size))


# --- order ideals ----------------------------------------------------------


def test_psi_of_basic_set_is_principal_ideal():
    E = free_semilattice(3)
    for e in range(E.size):
        assert order_ideal_psi(E, E.down[e]) == E.down[e]


def test_whole_semilattice_is_whole_spectrum():
    E = antichain_with_bottom(3)
    assert order_ideal_psi_inv(E, (1 << E.size) - 1) == (1 << E.size) - 1


def test_psi_rejects_non_ideal():
    with pytest.raises(GermworkError):
        order_ideal_psi_inv(chain(2), 0b10)


@given(small_semilattices)
def test_psi_round_trips_on_all_ideals(E):
    ideals = order_ideals(E)
    assert ideals == brute_ideals(E)
    for ideal in ideals:
        U = order_ideal_psi_inv(E, ideal)
        assert order_ideal_psi(E, U) == ideal
        assert order_ideal_psi_inv(E, order_ideal_psi(E, U)) == U
        assert is_order_ideal(E, ideal)

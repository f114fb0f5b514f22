import math

import pytest
from hypothesis import given, strategies as st

from nilorbit.perm import CycleStats, Permutation, cycle_stats


perms = st.integers(1, 12).flatmap(lambda n: st.permutations(range(n))).map(Permutation)


def test_identity_stats():
    assert cycle_stats(Permutation.identity(5)) == CycleStats(5, 5, 1)


def test_transposition_stats():
    g = Permutation.from_cycles(4, (0, 1))
    assert cycle_stats(g) == CycleStats(3, 2, 2)
    assert str(g) == "1 0 2 3"


def test_text_round_trip():
    g = Permutation.parse("2 0 1 3")
    assert Permutation.parse(str(g)) == g
    assert g(0) == 2


def test_right_action_convention():
    g = Permutation.from_cycles(3, (0, 1))
    h = Permutation.from_cycles(3, (1, 2))
    # apply g then h: 0 -> 1 -> 2
    assert (g * h)(0) == 2


def test_rejects_non_bijection():
    with pytest.raises(ValueError):
        Permutation([0, 0, 1])
    with pytest.raises(ValueError):
        Permutation.identity(3) * Permutation.identity(4)


def _recount_cycles(images):
    """n(g) = degree minus the points that are not the smallest of their cycle."""
    n = len(images)
    not_leader = 0
    for i in range(n):
        j = images[i]
        smallest = i
        while j != i:
            smallest = min(smallest, j)
            j = images[j]
        not_leader += smallest != i
    return n - not_leader


@given(perms)
def test_cycle_count_matches_recount(g):
    st_ = cycle_stats(g)
    assert st_.cycle_count == _recount_cycles(g.images)
    assert st_.fixed_points <= st_.cycle_count <= g.degree
    assert st_.cycle_count == st_.fixed_points + len(g.cycles())


@given(perms)
def test_inverse_and_order(g):
    assert (g * g.inverse()).is_identity()
    assert (g ** g.order).is_identity()
    assert g.order == math.lcm(*(len(c) for c in g.cycles(include_fixed=True)))
    assert cycle_stats(g).element_order == g.order


@given(perms, perms)
def test_conjugate_preserves_cycle_type(g, h):
    if g.degree != h.degree:
        return
    c = g.conjugate(h)
    assert sorted(map(len, c.cycles())) == sorted(map(len, g.cycles()))
    assert c == h.inverse() * g * h

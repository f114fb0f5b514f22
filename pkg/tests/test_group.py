import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nilorbit.field import SemilinearMap, make_field
from nilorbit.group import (
    DegreeMismatch,
    GroupTooLarge,
    PermutationGroup,
    are_conjugate_subgroups,
    build_group,
    classify,
    cyclic_group,
    is_nilpotent,
    is_primitive,
    is_solvable,
    orbit_partition,
    order_profile,
    prime_factors,
    symmetric_group,
    trivial_group,
)
from nilorbit.perm import Permutation
from nilorbit.zoo import wreath_product


def closure(gens):
    """Brute-force closure of a generator set (independent of the chain)."""
    n = gens[0].degree
    seen = {Permutation.identity(n)}
    frontier = list(seen)
    while frontier:
        new = []
        for a in frontier:
            for g in gens:
                b = a * g
                if b not in seen:
                    seen.add(b)
                    new.append(b)
        frontier = new
    return seen


def test_s4_order(s4):
    assert s4.order == 24
    assert build_group([Permutation.from_cycles(4, (0, 1)), Permutation.from_cycles(4, (0, 1, 2, 3))]).order == 24


def test_identity_group():
    assert build_group([Permutation.identity(5)]).order == 1


def test_gamma8_from_all_maps():
    F = make_field(2, 3)
    maps = [SemilinearMap(F, a, j).permutation() for j in range(3) for a in range(1, 8)]
    assert len(set(maps)) == 21
    assert build_group(maps).order == 21
    assert closure(maps) == set(maps)


def test_degree_mismatch():
    with pytest.raises(DegreeMismatch):
        build_group([Permutation.identity(3), Permutation.identity(4)])


def test_element_cap():
    G = PermutationGroup(symmetric_group(8).generators, cap=100)
    with pytest.raises(GroupTooLarge):
        G.elements


def test_membership(s4):
    a4 = build_group([Permutation.from_cycles(4, (0, 1, 2)), Permutation.from_cycles(4, (1, 2, 3))])
    assert a4.order == 12
    assert a4.contains(Permutation.from_cycles(4, (0, 1), (2, 3)))
    assert not a4.contains(Permutation.from_cycles(4, (0, 1)))
    assert all(s4.contains(g) for g in a4.element_list())


def test_orbit_examples():
    assert orbit_partition(trivial_group(4)) == [[0], [1], [2], [3]]
    assert orbit_partition(symmetric_group(5)) == [list(range(5))]
    from nilorbit.field import make_gamma

    gamma9, _ = make_gamma(3, 2)
    assert sorted(len(o) for o in orbit_partition(gamma9)) == [1, 8]


def test_classify_examples():
    s3 = classify(symmetric_group(3))
    assert s3.is_solvable and not s3.is_nilpotent
    d8 = build_group([Permutation.from_cycles(4, (0, 1, 2, 3)), Permutation.from_cycles(4, (0, 2))])
    f = classify(d8)
    assert d8.order == 8 and f.is_nilpotent and not f.is_abelian
    assert f.is_transitive and not f.is_primitive
    assert classify(symmetric_group(4)).is_primitive
    assert not classify(symmetric_group(5)).is_solvable
    assert classify(trivial_group(3)).smallest_prime_divisor is None


def test_order_profiles(s4):
    assert order_profile(cyclic_group(4)) == {1: 1, 2: 1, 4: 2}
    assert order_profile(s4) == {1: 1, 2: 9, 3: 8, 4: 6}


def test_conjugacy_examples(s4):
    c4 = build_group([Permutation.from_cycles(4, (0, 1, 2, 3))])
    v4 = build_group([Permutation.from_cycles(4, (0, 1), (2, 3)), Permutation.from_cycles(4, (0, 2), (1, 3))])
    ok, w = are_conjugate_subgroups(c4, c4, s4)
    assert ok and w.is_identity()
    assert not are_conjugate_subgroups(c4, v4, s4)[0]
    st0, st1 = s4.stabilizer(0), s4.stabilizer(3)
    ok, w = are_conjugate_subgroups(st0, st1, s4)
    assert ok
    assert all(st1.contains(g.conjugate(w)) for g in st0.generators)


def test_wreath_examples():
    c2 = cyclic_group(2)
    assert wreath_product(c2, trivial_group(1)).order == 2
    d8 = wreath_product(c2, c2)
    assert d8.order == 8 and not classify(d8).is_abelian
    w = wreath_product(symmetric_group(3), c2)
    assert w.order == 72 and w.degree == 6
    assert not is_primitive(w)
    for g in w.generators:
        blocks = [{g(i) for i in b} for b in ({0, 1, 2}, {3, 4, 5})]
        assert all(b in ({0, 1, 2}, {3, 4, 5}) for b in blocks)


small_groups = st.integers(2, 7).flatmap(
    lambda n: st.lists(st.permutations(range(n)).map(Permutation), min_size=1, max_size=3)
)


@settings(max_examples=60, deadline=None)
@given(small_groups)
def test_chain_order_matches_closure(gens):
    G = build_group(gens)
    assert G.order == len(closure(gens))
    assert G.order == G.elements.size


def _sylow_normal_oracle(G):
    """Nilpotent iff for every p the p-elements number exactly |G|_p (each Sylow normal)."""
    elems = G.element_list()
    for p, e in prime_factors(G.order).items():
        count = 0
        for g in elems:
            o = g.order
            while o % p == 0:
                o //= p
            count += o == 1
        if count != p**e:
            return False
    return True


@settings(max_examples=60, deadline=None)
@given(small_groups)
def test_nilpotency_oracle(gens):
    G = build_group(gens)
    assert is_nilpotent(G) == _sylow_normal_oracle(G)
    f = classify(G)
    if f.is_nilpotent:
        assert f.is_solvable
    if f.is_abelian:
        assert f.is_nilpotent
    if f.is_primitive:
        assert f.is_transitive
    if G.order > 1:
        assert G.order % f.smallest_prime_divisor == 0


@settings(max_examples=40, deadline=None)
@given(small_groups, st.integers(0, 2))
def test_orbits_refine_under_subgroups(gens, k):
    G = build_group(gens)
    H = build_group(gens[: k + 1][:1])
    big = {p: i for i, orb in enumerate(orbit_partition(G)) for p in orb}
    for orb in orbit_partition(H):
        assert len({big[p] for p in orb}) == 1
    assert sorted(p for o in orbit_partition(G) for p in o) == list(range(G.degree))

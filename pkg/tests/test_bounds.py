import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from nilorbit.bounds import (
    DEFAULT_CONSTANTS,
    BoundConstants,
    Truth,
    crude_twice_cycle_bound,
    cube_bound_holds,
    inequality_one,
    inequality_one_fraction,
)

C = DEFAULT_CONSTANTS


def test_beta_enclosure():
    beta = C.beta()
    exact = math.log(32) / math.log(9)
    assert beta.a <= exact <= beta.b
    assert float(beta.b - beta.a) < 1e-15


def test_threshold_at_96():
    # n^(β+1)/2 <= 2^(n/6) fails at 95 and holds from 96 on
    assert C.order_bound_vs_power_of_two(95, Fraction(95, 6)) is Truth.FALSE
    assert C.order_bound_vs_power_of_two(96, Fraction(96, 6)) is Truth.TRUE
    assert C.order_bound_vs_power_of_two(97, Fraction(97, 6)) is Truth.TRUE
    assert all(C.order_bound_vs_power_of_two(n, Fraction(n, 6)) is Truth.FALSE for n in range(30, 96))


@given(st.integers(97, 4096))
def test_scan_never_indeterminate(n):
    assert C.order_bound_vs_power_of_two(n, Fraction(n, 6)) is Truth.TRUE


@given(st.integers(2, 2000), st.integers(2, 200))
def test_interval_agrees_with_floats(order, n):
    t = C.within_order_bound(order, n)
    slack = math.log(2 * order) - (math.log(32) / math.log(9) + 1) * math.log(n)
    if abs(slack) > 1e-9:
        assert t is (Truth.TRUE if slack < 0 else Truth.FALSE)


def test_tiny_precision_escalates():
    low = BoundConstants(precision_bits=8, max_precision_bits=8)
    assert low.order_bound_vs_power_of_two(97, Fraction(97, 6)) is Truth.INDETERMINATE
    assert BoundConstants(precision_bits=8).order_bound_vs_power_of_two(97, Fraction(97, 6)) is Truth.TRUE


def test_cube_bound():
    assert not cube_bound_holds(11)
    assert cube_bound_holds(13)
    assert all(cube_bound_holds(n) for n in range(13, 600))
    assert not any(cube_bound_holds(n) for n in range(2, 12))


def test_inequality_one_examples():
    # degree 27 hand case: 81^3 * (2^15)^2 <= 2^54
    assert inequality_one(81, 27, 30)
    # 3^12 * 2^34 <= 2^54 < 3^12 * 2^35
    assert inequality_one(81, 27, 34)
    assert not inequality_one(81, 27, 35)
    assert crude_twice_cycle_bound(16, 2) == 24
    assert crude_twice_cycle_bound(27, 3) == 36


@given(st.integers(1, 10**6), st.integers(1, 80), st.integers(0, 160))
def test_fraction_form_matches_integer_form(order, n, b):
    assert inequality_one_fraction(order, n, Fraction(b)) == inequality_one(order, n, b)


@settings(deadline=None)
@given(st.integers(1, 10**4), st.integers(2, 60), st.fractions(0, 120, max_denominator=12))
def test_fraction_form_matches_logs(order, n, tb):
    lhs = 3 * math.log2(order) + float(tb)
    if abs(lhs - 2 * n) > 1e-9:
        assert inequality_one_fraction(order, n, tb) == (lhs < 2 * n)

"""Exact and interval comparisons involving β = log 32 / log 9.

β is irrational, so inequalities such as ``n**(β+1)/2 <= 2**(n/6)`` are
decided by comparing logarithms in interval arithmetic. A comparison whose
enclosing interval contains zero is reported as indeterminate after the
precision has been raised a few times.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from mpmath import iv


class Truth(str, enum.Enum):
    TRUE = "true"
    FALSE = "false"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class BoundConstants:
    """β held as the exact pair (32, 9) meaning log 32 / log 9."""

    beta_num: int = 32
    beta_den: int = 9
    precision_bits: int = 64
    max_precision_bits: int = 512

    def beta(self):
        """Interval enclosure of β at the current interval precision."""
        return iv.log(self.beta_num) / iv.log(self.beta_den)

    def _decide(self, make_diff) -> Truth:
        """Evaluate an interval ``make_diff()`` and test diff <= 0."""
        prec = self.precision_bits
        while prec <= self.max_precision_bits:
            old = iv.prec
            iv.prec = prec
            try:
                diff = make_diff()
            finally:
                iv.prec = old
            if diff.b <= 0:
                return Truth.TRUE
            if diff.a > 0:
                return Truth.FALSE
            prec *= 2
        return Truth.INDETERMINATE

    def order_bound_vs_power_of_two(self, n: int, exponent: Fraction) -> Truth:
        """Decide n**(β+1)/2 <= 2**exponent."""
        exponent = Fraction(exponent)

        def diff():
            lhs = (self.beta() + 1) * iv.log(n) - iv.log(2)
            rhs = iv.mpf(exponent.numerator) / exponent.denominator * iv.log(2)
            return lhs - rhs

        return self._decide(diff)

    def within_order_bound(self, order: int, n: int) -> Truth:
        """Decide order <= n**(β+1)/2."""

        def diff():
            return iv.log(2 * order) - (self.beta() + 1) * iv.log(n)

        return self._decide(diff)

    def within_stabilizer_bound(self, order: int, n: int) -> Truth:
        """Decide order <= n**β/2 (the point-stabilizer form)."""

        def diff():
            return iv.log(2 * order) - self.beta() * iv.log(n)

        return self._decide(diff)


DEFAULT_CONSTANTS = BoundConstants()


def cube_bound_holds(n: int) -> bool:
    """n**3 <= 2**(n-1), exactly."""
    return n**3 <= 2 ** (n - 1)


def inequality_one(order: int, n: int, twice_cycle_bound: int) -> bool:
    """|H|^3 * (2^b)^2 <= 2^(2n) with 2b given as an integer exponent."""
    return order**3 * 2**twice_cycle_bound <= 2 ** (2 * n)


def crude_twice_cycle_bound(n: int, p: int) -> Fraction:
    """2 * (p+1)n/(2p) = (p+1)n/p."""
    return Fraction((p + 1) * n, p)


def inequality_one_fraction(order: int, n: int, twice_bound: Fraction) -> bool:
    """|H|^3 * 2^(twice_bound) <= 2^(2n) for a rational exponent, decided exactly.

    Writing twice_bound = a/b, the test is |H|^(3b) * 2^a <= 2^(2nb).
    """
    twice_bound = Fraction(twice_bound)
    a, b = twice_bound.numerator, twice_bound.denominator
    return order ** (3 * b) * 2**a <= 2 ** (2 * n * b)

"""GF(p^k) arithmetic and the semilinear groups Γ(p^k) ≥ Γ0(p^k).

Field elements are integers in ``range(p**k)``: the base-p digits of an
element are the coefficients of its polynomial representative, constant
term first. The same encoding identifies GF(p^k) with GF(p)^k, so the
semilinear maps built here act on exactly the points a
:class:`~nilorbit.linear.LinearModule` of dimension k uses.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from nilorbit.group import PermutationGroup, is_prime, prime_factors
from nilorbit.perm import Permutation

FIELD_SIZE_CAP = 2**20


class FieldError(ValueError):
    pass


def _poly_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def poly_mod(a: list[int], m: list[int], p: int) -> list[int]:
    a = _poly_trim([c % p for c in a])
    inv_lead = pow(m[-1], -1, p)
    while len(a) >= len(m):
        coef = a[-1] * inv_lead % p
        shift = len(a) - len(m)
        for i, c in enumerate(m):
            a[shift + i] = (a[shift + i] - coef * c) % p
        _poly_trim(a)
    return a


def poly_mul(a: list[int], b: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _poly_trim(out)


def is_irreducible(poly: list[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree ≤ deg/2."""
    deg = len(poly) - 1
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            if not poly_mod(list(poly), list(low) + [1], p):
                return False
    return True


def lex_least_irreducible(p: int, k: int) -> list[int]:
    """Monic irreducible of degree k, least when coefficients are read constant term first."""
    for low in itertools.product(range(p), repeat=k):
        cand = list(low) + [1]
        if is_irreducible(cand, p):
            return cand
    raise FieldError(f"no irreducible polynomial of degree {k} over GF({p})")  # pragma: no cover


@dataclass(frozen=True)
class FieldSpec:
    characteristic: int
    extension_degree: int
    modulus: tuple[int, ...] = field(compare=True)

    @property
    def p(self) -> int:
        return self.characteristic

    @property
    def k(self) -> int:
        return self.extension_degree

    @property
    def size(self) -> int:
        return self.characteristic**self.extension_degree

    def to_poly(self, a: int) -> list[int]:
        return [(a // self.p**i) % self.p for i in range(self.k)]

    def from_poly(self, coeffs) -> int:
        return sum(int(c) % self.p * self.p**i for i, c in enumerate(coeffs))

    @cached_property
    def digits(self) -> np.ndarray:
        """(size, k) array of base-p digits of every element."""
        idx = np.arange(self.size, dtype=np.int64)
        return np.stack([(idx // self.p**i) % self.p for i in range(self.k)], axis=1)

    @cached_property
    def _weights(self) -> np.ndarray:
        return np.array([self.p**i for i in range(self.k)], dtype=np.int64)

    def add(self, a, b):
        d = (self.digits[np.asarray(a)] + self.digits[np.asarray(b)]) % self.p
        return d @ self._weights

    def neg(self, a):
        return ((-self.digits[np.asarray(a)]) % self.p) @ self._weights

    def _slow_mul(self, a: int, b: int) -> int:
        return self.from_poly(poly_mod(poly_mul(self.to_poly(a), self.to_poly(b), self.p), list(self.modulus), self.p))

    @cached_property
    def primitive_element(self) -> int:
        q1 = self.size - 1
        factors = list(prime_factors(q1)) if q1 > 1 else []
        for g in range(1, self.size):
            if all(self._slow_pow(g, q1 // r) != 1 for r in factors):
                return g
        raise FieldError("no primitive element")  # pragma: no cover

    def _slow_pow(self, a: int, e: int) -> int:
        out, base = 1, a
        while e:
            if e & 1:
                out = self._slow_mul(out, base)
            base = self._slow_mul(base, base)
            e >>= 1
        return out

    @cached_property
    def _exp_log(self) -> tuple[np.ndarray, np.ndarray]:
        q1 = self.size - 1
        exp = np.zeros(q1, dtype=np.int64)
        log = np.full(self.size, -1, dtype=np.int64)
        # multiplication by the primitive element as a k x k matrix on digit vectors
        w = self.primitive_element
        mat = np.array([self.to_poly(self._slow_mul(w, self.p**i)) for i in range(self.k)]).T
        cur = np.zeros(self.k, dtype=np.int64)
        cur[0] = 1
        for e in range(q1):
            x = int(cur @ self._weights)
            exp[e] = x
            log[x] = e
            cur = (mat @ cur) % self.p
        return exp, log

    @property
    def exp_table(self) -> np.ndarray:
        return self._exp_log[0]

    @property
    def log_table(self) -> np.ndarray:
        return self._exp_log[1]

    def mul(self, a, b):
        a, b = np.asarray(a), np.asarray(b)
        exp, log = self._exp_log
        q1 = self.size - 1
        out = exp[(log[a] + log[b]) % q1]
        return np.where((a == 0) | (b == 0), 0, out)

    def power(self, a, e: int):
        a = np.asarray(a)
        exp, log = self._exp_log
        q1 = self.size - 1
        out = exp[(log[a] * e) % q1]
        if e == 0:
            return np.ones_like(out)
        return np.where(a == 0, 0, out)

    def inverse(self, a):
        a = np.asarray(a)
        if np.any(a == 0):
            raise ZeroDivisionError("zero has no inverse")
        return self.power(a, self.size - 2)

    def element_order(self, a: int) -> int:
        if a == 0:
            raise ValueError("zero has no multiplicative order")
        q1 = self.size - 1
        e = int(self.log_table[a])
        from math import gcd

        return q1 // gcd(q1, e)


def make_field(p: int, k: int) -> FieldSpec:
    if not is_prime(p):
        raise FieldError(f"{p} is not prime")
    if k < 1:
        raise FieldError("extension degree must be positive")
    if p**k > FIELD_SIZE_CAP:
        raise FieldError(f"GF({p}^{k}) exceeds the size cap {FIELD_SIZE_CAP}")
    return FieldSpec(p, k, tuple(lex_least_irreducible(p, k)))


@dataclass(frozen=True)
class SemilinearMap:
    """x ↦ multiplier · x^(p^frobenius_exponent)."""

    field: FieldSpec
    multiplier: int
    frobenius_exponent: int = 0

    def __post_init__(self):
        if not 0 < self.multiplier < self.field.size:
            raise FieldError("multiplier must be a nonzero field element")
        if not 0 <= self.frobenius_exponent < self.field.k:
            raise FieldError("frobenius exponent out of range")

    def images(self) -> np.ndarray:
        F = self.field
        x = np.arange(F.size)
        return F.mul(self.multiplier, F.power(x, F.p**self.frobenius_exponent))

    def permutation(self) -> Permutation:
        return Permutation(self.images().tolist())

    def is_linear(self) -> bool:
        return self.frobenius_exponent == 0


def all_semilinear_maps(F: FieldSpec) -> list[SemilinearMap]:
    return [SemilinearMap(F, a, j) for j in range(F.k) for a in range(1, F.size)]


def make_gamma(p: int, k: int) -> tuple[PermutationGroup, PermutationGroup]:
    """Γ(p^k) and its multiplication subgroup Γ0(p^k), acting on field elements."""
    F = make_field(p, k)
    if F.size == 2:
        ident = Permutation.identity(2)
        return PermutationGroup([ident]), PermutationGroup([ident])
    scalar = SemilinearMap(F, F.primitive_element).permutation()
    gamma0 = PermutationGroup([scalar])
    gens = [scalar]
    if k > 1:
        gens.append(SemilinearMap(F, 1, 1).permutation())
    return PermutationGroup(gens), gamma0

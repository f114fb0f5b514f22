"""Power-set kernels: stabilized-subset counts and the Δ search.

Subsets of Ω are bitmasks. For an element h with cycles c_1..c_r the
subsets it stabilizes are exactly the 2^r unions of cycles, so summing over
h gives |stab_H(Δ)| for every Δ at once. A subset-max transform then
answers "best Δ inside Ω - Λ" for every Λ with one table lookup.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np

from nilorbit.group import PermutationGroup

MAX_SUBSET_DEGREE = 64
EXHAUSTIVE_DEGREE = 24


class SubsetError(ValueError):
    pass


def stabilized_subset_count(H: PermutationGroup) -> int:
    """|S(H^#)| = sum over g != 1 of 2^n(g)."""
    if H.degree > MAX_SUBSET_DEGREE:
        raise SubsetError(f"degree {H.degree} exceeds {MAX_SUBSET_DEGREE}")
    table = H.elements
    counts = table.cycle_counts
    total = sum(2 ** int(c) for c in counts)
    return total - 2**H.degree


def cycle_masks(row: np.ndarray) -> list[int]:
    """Bitmask of each cycle of the permutation given by an image row."""
    seen = np.zeros(row.size, dtype=bool)
    out = []
    for start in range(row.size):
        if seen[start]:
            continue
        mask, x = 0, start
        while not seen[x]:
            seen[x] = True
            mask |= 1 << x
            x = int(row[x])
        out.append(mask)
    return out


def stabilizer_sizes(H: PermutationGroup) -> np.ndarray:
    """Array over all 2^n masks of |stab_H(Δ)|."""
    n = H.degree
    if n > EXHAUSTIVE_DEGREE:
        raise SubsetError(f"degree {n} is too large for the exhaustive subset table")
    sizes = np.zeros(1 << n, dtype=np.int64)
    for row in H.elements.rows:
        unions = np.zeros(1, dtype=np.int64)
        for c in cycle_masks(row):
            unions = np.concatenate([unions, unions | c])
        sizes[unions] += 1
    return sizes


def popcounts(n: int) -> np.ndarray:
    pc = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        pc[1 << i:1 << (i + 1)] = pc[: 1 << i] + 1
    return pc


def subset_max(values: np.ndarray, n: int) -> np.ndarray:
    """out[S] = max over T ⊆ S of values[T]."""
    f = values.copy()
    for i in range(n):
        view = f.reshape(-1, 2, 1 << i)
        np.maximum(view[:, 1, :], view[:, 0, :], out=view[:, 1, :])
    return f


@dataclass
class SubsetProblem:
    group: PermutationGroup
    lam: frozenset = frozenset()

    @property
    def omega_size(self) -> int:
        return self.group.degree

    @property
    def m(self) -> int:
        return len(self.lam)

    @property
    def k_bound(self) -> int:
        """k = ceil(log2 |H|)."""
        return (self.group.order - 1).bit_length()

    def __post_init__(self):
        self.lam = frozenset(int(x) for x in self.lam)
        if any(not 0 <= x < self.group.degree for x in self.lam):
            raise SubsetError("Λ must be a subset of Ω")


def theorem_condition(index: int, m: int, order: int) -> bool:
    """index^2 * 2^(m-1) >= |H|, in integers."""
    return index * index * 2**m >= 2 * order


@dataclass
class DeltaResult:
    delta: frozenset
    index: int
    satisfied: bool
    exhaustive: bool = True


class SubsetSearch:
    """Precomputed best-Δ table for one group (degree ≤ 24)."""

    def __init__(self, H: PermutationGroup):
        self.group = H
        self.n = H.degree
        self.order = H.order
        self.full = (1 << self.n) - 1
        self.sizes = stabilizer_sizes(H)
        self.index = self.order // self.sizes
        self.pc = popcounts(self.n)

    @cached_property
    def best(self) -> np.ndarray:
        """Key encoding (index, fewest points, smallest mask), maximized over subsets."""
        n = self.n
        masks = np.arange(1 << n, dtype=np.int64)
        key = (self.index << (n + 7)) | ((n - self.pc) << n) | (self.full - masks)
        return subset_max(key, n)

    def decode(self, key: int) -> tuple[int, int]:
        n = self.n
        mask = self.full - (key & self.full)
        return key >> (n + 7), mask

    def find(self, lam_mask: int) -> tuple[int, int]:
        """(index, Δ mask) for the best Δ ⊆ Ω - Λ."""
        return self.decode(int(self.best[self.full ^ lam_mask]))

    def check_all(self, k: int) -> dict:
        """Test every Λ with |Λ| ≤ k; return failures and the tightest case."""
        n = self.n
        masks = np.arange(1 << n, dtype=np.int64)
        sel = self.pc <= k
        lam = masks[sel]
        m = self.pc[sel]
        idx = self.best[self.full ^ lam] >> (n + 7)
        # slack = index^2 * 2^m / (2|H|); compare in integers via object dtype only when needed
        lhs = idx.astype(object) ** 2 * (2 ** m.astype(object)) if self.order > 2**20 else idx**2 * (1 << m)
        ok = lhs >= 2 * self.order
        failures = lam[~np.asarray(ok, dtype=bool)]
        ratio = np.asarray(lhs, dtype=float) / (2 * self.order)
        tight = int(np.argmin(ratio))
        return {
            "tested": int(lam.size),
            "failures": [int(x) for x in failures[:10]],
            "failure_count": int(failures.size),
            "tightest_lambda": int(lam[tight]),
            "tightest_index": int(idx[tight]),
            "tightest_m": int(m[tight]),
        }


def mask_to_set(mask: int) -> frozenset:
    return frozenset(i for i in range(mask.bit_length()) if mask >> i & 1)


def set_to_mask(points) -> int:
    return sum(1 << int(x) for x in points)


def set_stabilizer_size(H: PermutationGroup, delta) -> int:
    rows = H.elements.rows
    member = np.zeros(H.degree, dtype=bool)
    pts = sorted(delta)
    member[pts] = True
    return int(np.count_nonzero(np.all(member[rows[:, pts]], axis=1)))


def _greedy(problem: SubsetProblem) -> DeltaResult:
    H = problem.group
    free = [x for x in range(H.degree) if x not in problem.lam]
    best_delta: frozenset = frozenset()
    best_index = 1
    current: set = set()
    for _ in free:
        scored = []
        for x in free:
            if x in current:
                continue
            cand = current | {x}
            scored.append((H.order // set_stabilizer_size(H, cand), -x, cand))
        if not scored:
            break
        idx, _, cand = max(scored, key=lambda t: (t[0], t[1]))
        current = cand
        if idx > best_index:
            best_index, best_delta = idx, frozenset(cand)
        if idx == H.order:
            break
    return DeltaResult(best_delta, best_index, theorem_condition(best_index, problem.m, H.order), exhaustive=False)


def find_delta(problem: SubsetProblem, search: Optional[SubsetSearch] = None) -> DeltaResult:
    """Δ ⊆ Ω - Λ of maximal index |H : stab_H(Δ)|.

    Exhaustive up to degree 24 (fewest points, then smallest mask among
    maximizers); beyond that a greedy search whose answer is advisory.
    """
    H = problem.group
    if H.degree > EXHAUSTIVE_DEGREE:
        return _greedy(problem)
    search = search or SubsetSearch(H)
    index, mask = search.find(set_to_mask(problem.lam))
    return DeltaResult(mask_to_set(mask), index, theorem_condition(index, problem.m, H.order))


def brute_force_subset_count(H: PermutationGroup) -> int:
    """Pairs (g, Γ) with g != 1 and Γ^g = Γ, by iterating all subsets."""
    n = H.degree
    rows = H.elements.rows
    ident = np.arange(n)
    count = 0
    for mask in range(1 << n):
        member = np.array([(mask >> i) & 1 for i in range(n)], dtype=bool)
        stable = np.all(member[rows] == member[None, :], axis=1)
        count += int(np.count_nonzero(stable)) - 1
    return count


def brute_force_best_index(H: PermutationGroup, lam: frozenset) -> int:
    """Max orbit length of H on subsets of Ω - Λ, by orbit enumeration."""
    n = H.degree
    rows = H.elements.rows
    free = [x for x in range(n) if x not in lam]
    best = 1
    seen = set()
    for r in range(len(free) + 1):
        for combo in itertools.combinations(free, r):
            key = frozenset(combo)
            if key in seen:
                continue
            orbit = {frozenset(int(row[x]) for x in combo) for row in rows}
            seen |= orbit
            best = max(best, len(orbit))
    return best

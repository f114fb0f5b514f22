"""Subgroup classes by cyclic extension.

Starting from the trivial group, every class representative U is extended
by the elements x of N_G(U) whose coset xU has prime order p, giving
V = U ∪ xU ∪ ... ∪ x^(p-1)U. Every solvable subgroup has a normal subgroup
of prime index, so this reaches each solvable subgroup; for solvable G it is
the full subgroup lattice. Candidates are deduplicated against the whole
conjugacy class (all conjugates of every kept representative are hashed),
one layer of equal composition length at a time.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional

import numpy as np

from nilorbit.group import (
    ElementTable,
    GroupError,
    PermutationGroup,
    prime_factors,
)
from nilorbit.perm import Permutation

log = logging.getLogger(__name__)

SUBGROUP_CAP = 25000
NILPOTENT_CAP = 10**6


class EnumerationTooLarge(GroupError):
    pass


class EnumerationTimeout(GroupError):
    pass


@dataclass
class SubgroupClass:
    """One conjugacy class of subgroups, held as ambient element ids."""

    ids: np.ndarray
    gens: list[int]
    class_size: int
    maximal: Optional[bool] = None

    @property
    def order(self) -> int:
        return int(self.ids.size)


@dataclass
class SubgroupList:
    ambient: PermutationGroup
    classes: list[SubgroupClass]
    complete: bool = True

    def __len__(self) -> int:
        return len(self.classes)

    @cached_property
    def representatives(self) -> list[PermutationGroup]:
        return [self.group(c) for c in self.classes]

    def group(self, cls: SubgroupClass) -> PermutationGroup:
        table = self.ambient.elements
        gens = [table.perm(i) for i in cls.gens] or [self.ambient.identity()]
        return PermutationGroup(gens, self.ambient.degree)

    def orders(self) -> list[int]:
        return [c.order for c in self.classes]


class _PrimePowers:
    """Per-prime masks of the elements whose order is a power of that prime."""

    def __init__(self, table: ElementTable):
        self.orders = table.orders
        self._masks: dict[int, np.ndarray] = {}

    def mask(self, p: int) -> np.ndarray:
        if p not in self._masks:
            o = self.orders.copy()
            while True:
                div = (o % p == 0) & (o > 1)
                if not div.any():
                    break
                o[div] //= p
            self._masks[p] = o == 1
        return self._masks[p]


def ids_are_nilpotent(ids: np.ndarray, powers: _PrimePowers) -> bool:
    """A finite group is nilpotent iff, for each prime p, its p-elements number |G|_p."""
    for p, e in prime_factors(int(ids.size)).items():
        if int(np.count_nonzero(powers.mask(p)[ids])) != p**e:
            return False
    return True


def normalizer_ids(table: ElementTable, subgroup: np.ndarray, gens: list[int], within: Optional[np.ndarray] = None) -> np.ndarray:
    members = np.zeros(table.size, dtype=bool)
    members[subgroup] = True
    cand = np.arange(table.size) if within is None else within
    for u in gens:
        cand = cand[members[table.conj(u, cand)]]
    return cand


def cyclic_extension(
    G: PermutationGroup,
    accept: Optional[Callable[[np.ndarray], bool]] = None,
    cap: int = SUBGROUP_CAP,
    deadline: Optional[float] = None,
) -> SubgroupList:
    """Solvable subgroups of G up to conjugacy, optionally filtered by ``accept``.

    ``accept`` must be inherited by subgroups (e.g. nilpotency); rejected
    candidates are not extended further. ``maximal`` is set on each class:
    True when no accepted extension of it exists.
    """
    if G.order > cap:
        raise EnumerationTooLarge(f"|G| = {G.order} exceeds the subgroup enumeration cap {cap}")
    table = G.elements
    gen_ids = sorted({table.id_of(g) for g in G.generators} - {table.identity})
    conj_maps = [table.conj(np.arange(table.size), s) for s in gen_ids]
    trivial = SubgroupClass(np.array([table.identity], dtype=np.intp), [], 1)
    if accept is not None and not accept(trivial.ids):
        return SubgroupList(G, [], True)
    result = [trivial]
    layer = [trivial]
    members = np.zeros(table.size, dtype=bool)
    while layer:
        seen: set[bytes] = set()
        rejected: set[bytes] = set()
        nxt: list[SubgroupClass] = []
        for U in layer:
            if deadline is not None and time.monotonic() > deadline:
                raise EnumerationTimeout("subgroup enumeration exceeded its time budget")
            members[:] = False
            members[U.ids] = True
            N = normalizer_ids(table, U.ids, U.gens)
            quotient = N.size // U.order
            cand = N[~members[N]]
            covered = np.zeros(table.size, dtype=bool)
            extended = False
            for p in sorted(prime_factors(quotient)):
                xp = table.power(cand, p)
                for x in cand[members[xp]].tolist():
                    if covered[x]:
                        continue
                    V = table.coset_union(U.ids, x, p)
                    covered[V] = True
                    key = V.astype(np.int32).tobytes()
                    if key in seen:
                        extended = True
                        continue
                    if key in rejected:
                        continue
                    if accept is not None and not accept(V):
                        rejected.add(key)
                        continue
                    extended = True
                    size = _record_class(V, conj_maps, seen)
                    nxt.append(SubgroupClass(V, U.gens + [x], size))
            U.maximal = not extended
        log.debug("layer done: %d classes", len(nxt))
        result.extend(nxt)
        layer = nxt
    result.sort(key=lambda c: (c.order, c.ids.tolist()))
    return SubgroupList(G, result, True)


def _record_class(V: np.ndarray, conj_maps: list[np.ndarray], seen: set[bytes]) -> int:
    """Hash every conjugate of V into ``seen``; return the class size."""
    start = V.astype(np.int32)
    seen.add(start.tobytes())
    queue = [start]
    count = 1
    while queue:
        W = queue.pop()
        for cmap in conj_maps:
            img = np.sort(cmap[W]).astype(np.int32)
            key = img.tobytes()
            if key not in seen:
                seen.add(key)
                queue.append(img)
                count += 1
    return count


def subgroups_up_to_conjugacy(G: PermutationGroup, cap: int = SUBGROUP_CAP, deadline: Optional[float] = None) -> SubgroupList:
    """All solvable subgroups of G up to G-conjugacy (the full list when G is solvable)."""
    return cyclic_extension(G, cap=cap, deadline=deadline)


def nilpotent_subgroups(G: PermutationGroup, cap: int = NILPOTENT_CAP, deadline: Optional[float] = None) -> SubgroupList:
    """Nilpotent subgroups of G up to conjugacy, with maximality flags."""
    if G.order > cap:
        raise EnumerationTooLarge(f"|G| = {G.order} exceeds the nilpotent enumeration cap {cap}")
    powers = _PrimePowers(G.elements)
    return cyclic_extension(G, accept=lambda ids: ids_are_nilpotent(ids, powers), cap=cap, deadline=deadline)


@dataclass
class LargestNilpotent:
    degree: int
    order: int
    witnesses: list[tuple[int, PermutationGroup]] = field(default_factory=list)


def largest_nilpotent_order(degree: int, catalog_entries, deadline: Optional[float] = None) -> LargestNilpotent:
    """Max |H| over nilpotent H ≤ G for every catalog entry G of the degree.

    All classes attaining the maximum are kept as (entry index, subgroup).
    """
    entries = [e for e in catalog_entries if e.degree == degree]
    if not entries:
        raise ValueError(f"no catalog entries of degree {degree}")
    best = LargestNilpotent(degree, 0)
    for idx, entry in enumerate(entries):
        subs = nilpotent_subgroups(entry.group, deadline=deadline)
        top = max(subs.orders())
        if top > best.order:
            best = LargestNilpotent(degree, top)
        if top == best.order:
            best.witnesses.extend((idx, subs.group(c)) for c in subs.classes if c.order == top)
    return best


def largest_nilpotent_affine(G: PermutationGroup, complement: PermutationGroup, p: int, deadline: Optional[float] = None) -> tuple[int, PermutationGroup]:
    """Largest nilpotent order in an affine group G = V ⋊ K without enumerating G.

    A nilpotent H ≤ G is H_p × H_p' with H_p' conjugate into K (complements
    of the normal Hall subgroup V in V·H_p' are conjugate) and H_p inside a
    Sylow p-subgroup of C_G(H_p') = C_V(Q) ⋊ C_K(Q). So the answer is the
    maximum over nilpotent p'-subgroups Q ≤ K of |Q|·|C_V(Q)|·|C_K(Q)|_p.
    Returns the order and the best Q.
    """
    K = complement
    table = K.elements
    subs = nilpotent_subgroups(K, deadline=deadline)
    all_ids = np.arange(table.size)
    best, best_q = 0, K.identity()
    witness = None
    for cls in subs.classes:
        if cls.order % p == 0:
            continue
        fixed = np.ones(K.degree, dtype=bool)
        cent = all_ids
        for q in cls.gens:
            perm = np.asarray(table.perm(q).images)
            fixed &= perm == np.arange(K.degree)
            cent = cent[table.conj(q, cent) == q]
        cent_p = 1
        c = int(cent.size)
        while c % p == 0:
            c //= p
            cent_p *= p
        value = cls.order * int(np.count_nonzero(fixed)) * cent_p
        if value > best:
            best, witness = value, cls
    if witness is not None:
        best_q = subs.group(witness)
    return best, best_q

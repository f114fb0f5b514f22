"""Permutation groups given by generators.

Each group owns a deterministic Schreier-Sims stabilizer chain (base points
chosen as the smallest point moved by the element that needs them) giving
exact orders and membership. Groups small enough to enumerate also expose an
:class:`ElementTable`, a numpy array of all elements sorted by base images,
which the subgroup and orbit searches use for vectorised products.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from nilorbit.perm import Permutation

ENUMERATION_CAP = 10**7


class GroupError(Exception):
    pass


class DegreeMismatch(GroupError, ValueError):
    pass


class GroupTooLarge(GroupError):
    pass


def _mul(a: tuple, b: tuple) -> tuple:
    return tuple([b[i] for i in a])


def _inv(a: tuple) -> tuple:
    out = [0] * len(a)
    for i, j in enumerate(a):
        out[j] = i
    return tuple(out)


def _first_moved(a: tuple) -> int:
    for i, j in enumerate(a):
        if i != j:
            return i
    return -1


class StabilizerChain:
    """Base, per-level strong generators and transversals.

    ``reps[l][pt]`` is a coset representative ``u`` with ``u(base[l]) == pt``;
    ``gens[l]`` generates the pointwise stabilizer of ``base[:l]``.
    """

    def __init__(self, degree: int, generators: Iterable[tuple] = (), base_prefix: Sequence[int] = ()):
        self.degree = degree
        self.identity = tuple(range(degree))
        self.base: list[int] = []
        self.gens: list[list[tuple]] = []
        self.reps: list[dict[int, tuple]] = []
        self.inv_reps: list[dict[int, tuple]] = []
        self._checked: list[set] = []
        for b in base_prefix:
            self._new_level(b)
        for g in generators:
            self.add_generator(tuple(g))

    def copy(self) -> StabilizerChain:
        new = StabilizerChain.__new__(StabilizerChain)
        new.degree = self.degree
        new.identity = self.identity
        new.base = list(self.base)
        new.gens = [list(g) for g in self.gens]
        new.reps = [dict(r) for r in self.reps]
        new.inv_reps = [dict(r) for r in self.inv_reps]
        new._checked = [set(c) for c in self._checked]
        return new

    def _new_level(self, point: int) -> None:
        self.base.append(point)
        self.gens.append([])
        self.reps.append({point: self.identity})
        self.inv_reps.append({point: self.identity})
        self._checked.append(set())

    def _extend_orbit(self, level: int) -> None:
        reps, inv_reps, gens = self.reps[level], self.inv_reps[level], self.gens[level]
        queue = list(reps)
        i = 0
        while i < len(queue):
            beta = queue[i]
            i += 1
            u = reps[beta]
            for s in gens:
                gamma = s[beta]
                if gamma not in reps:
                    r = _mul(u, s)
                    reps[gamma] = r
                    inv_reps[gamma] = _inv(r)
                    queue.append(gamma)

    def sift(self, g: tuple, start: int = 0) -> tuple[tuple, int]:
        for level in range(start, len(self.base)):
            b = g[self.base[level]]
            inv = self.inv_reps[level].get(b)
            if inv is None:
                return g, level
            g = _mul(g, inv)
        return g, len(self.base)

    def _add_residue(self, residue: tuple, start: int, stop: int) -> None:
        if stop == len(self.base):
            self._new_level(_first_moved(residue))
        for level in range(start, stop + 1):
            self.gens[level].append(residue)
            self._extend_orbit(level)

    def add_generator(self, g: tuple) -> bool:
        """Insert ``g`` and re-complete the chain; False if g was already a member."""
        residue, level = self.sift(g)
        if residue == self.identity:
            return False
        self._add_residue(residue, 0, level)
        self._complete()
        return True

    def _check_level(self, i: int) -> Optional[int]:
        reps, inv_reps, gens, checked = self.reps[i], self.inv_reps[i], self.gens[i], self._checked[i]
        for beta in list(reps):
            u = reps[beta]
            for idx, s in enumerate(gens):
                if (beta, idx) in checked:
                    continue
                checked.add((beta, idx))
                h = _mul(_mul(u, s), inv_reps[s[beta]])
                residue, j = self.sift(h, i + 1)
                if residue != self.identity:
                    self._add_residue(residue, i + 1, j)
                    return j
        return None

    def _complete(self) -> None:
        i = len(self.base) - 1
        while i >= 0:
            j = self._check_level(i)
            i = i - 1 if j is None else j

    @property
    def order(self) -> int:
        return math.prod(len(r) for r in self.reps)

    def transversal_sizes(self) -> list[int]:
        return [len(r) for r in self.reps]

    def contains(self, g: tuple) -> bool:
        residue, _ = self.sift(g)
        return residue == self.identity

    def strong_generators(self) -> list[tuple]:
        seen, out = set(), []
        for level in self.gens:
            for g in level:
                if g not in seen:
                    seen.add(g)
                    out.append(g)
        return out

    def enumerate_rows(self) -> np.ndarray:
        """All group elements as rows of images (deepest transversal applied first)."""
        dtype = np.uint8 if self.degree <= 256 else np.uint16
        rows = np.arange(self.degree, dtype=dtype)[None, :]
        for level in reversed(range(len(self.base))):
            trans = np.array(list(self.reps[level].values()), dtype=dtype)
            # x * u for x in rows, u in trans: (x*u)(i) = u[x[i]]
            rows = trans[:, rows].reshape(-1, self.degree)
        return rows


class ElementTable:
    """Every element of a group as a row, sorted by a base-image code.

    Element ids are row positions. Products, inverses and conjugates of ids
    are computed on base images only and looked up by binary search.
    """

    def __init__(self, chain: StabilizerChain, cap: int = ENUMERATION_CAP):
        if chain.order > cap:
            raise GroupTooLarge(f"group order {chain.order} exceeds enumeration cap {cap}")
        self.degree = chain.degree
        self.base = np.array(chain.base or [0], dtype=np.intp)
        rows = chain.enumerate_rows()
        k = len(self.base)
        if self.degree**k < 2**62:
            self._weights = np.array([self.degree**i for i in range(k)], dtype=np.int64)
            self._hashed = False
        else:
            rng = np.random.default_rng(0x5EED)
            self._weights = rng.integers(1, 2**62, size=k, dtype=np.int64) | 1
            self._hashed = True
        codes = self._encode(rows[:, self.base])
        order = np.argsort(codes, kind="stable")
        self.rows = np.ascontiguousarray(rows[order])
        self.codes = codes[order]
        if len(self.codes) > 1 and np.any(self.codes[1:] == self.codes[:-1]):
            raise GroupError("base-image code collision")
        self.size = len(self.rows)
        self.identity = int(self.lookup(np.arange(self.degree)[None, self.base])[0])

    def _encode(self, base_images: np.ndarray) -> np.ndarray:
        with np.errstate(over="ignore"):
            return (base_images.astype(np.int64) * self._weights).sum(axis=1)

    def lookup(self, base_images: np.ndarray, strict: bool = True) -> np.ndarray:
        """Ids of the elements with the given base images (-1 when absent)."""
        base_images = np.atleast_2d(base_images)
        codes = self._encode(base_images)
        pos = np.searchsorted(self.codes, codes)
        pos = np.minimum(pos, self.size - 1)
        ok = self.codes[pos] == codes
        if self._hashed:
            ok &= np.all(self.rows[pos][:, self.base] == base_images, axis=1)
        if strict and not ok.all():
            raise GroupError("element not in table")
        return np.where(ok, pos, -1)

    def ids_of_rows(self, rows: np.ndarray, strict: bool = True) -> np.ndarray:
        rows = np.atleast_2d(rows)
        ids = self.lookup(rows[:, self.base], strict=strict)
        if not strict:
            hit = ids >= 0
            full = np.all(self.rows[np.where(hit, ids, 0)] == rows, axis=1)
            ids = np.where(hit & full, ids, -1)
        return ids

    def id_of(self, g: Permutation) -> int:
        return int(self.ids_of_rows(np.array(g.images)[None, :])[0])

    def perm(self, idx: int) -> Permutation:
        return Permutation(self.rows[int(idx)].tolist(), check=False)

    def mul(self, a, b) -> np.ndarray:
        """Ids of ``a[i] * b[i]`` (broadcasting)."""
        a, b = np.broadcast_arrays(np.asarray(a, dtype=np.intp), np.asarray(b, dtype=np.intp))
        shape = a.shape
        a, b = a.ravel(), b.ravel()
        mid = self.rows[a[:, None], self.base[None, :]]
        img = self.rows[b[:, None], mid]
        return self.lookup(img).reshape(shape)

    @cached_property
    def inverses(self) -> np.ndarray:
        inv_base = np.empty((self.size, len(self.base)), dtype=np.int64)
        for j, b in enumerate(self.base):
            inv_base[:, j] = np.argmax(self.rows == b, axis=1)
        return self.lookup(inv_base)

    def conj(self, x, g) -> np.ndarray:
        """Ids of ``g^-1 * x * g``."""
        g = np.asarray(g, dtype=np.intp)
        return self.mul(self.mul(self.inverses[g], x), g)

    def power(self, x, k: int) -> np.ndarray:
        x = np.asarray(x, dtype=np.intp)
        out = np.full(x.shape, self.identity, dtype=np.intp)
        base = x
        while k:
            if k & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            k >>= 1
        return out

    def _cycle_data(self) -> tuple[np.ndarray, np.ndarray]:
        n = self.degree
        ident = np.arange(n)
        orders = np.zeros(self.size, dtype=np.int64)
        fixsum = np.full(self.size, n, dtype=np.int64)
        active = np.arange(self.size)
        cur = self.rows.astype(np.int32)
        gen = self.rows
        k = 1
        while active.size:
            is_id = np.all(cur == ident, axis=1)
            orders[active[is_id]] = k
            keep = ~is_id
            active, cur = active[keep], cur[keep]
            fixsum[active] += np.count_nonzero(cur == ident, axis=1)
            cur = np.take_along_axis(gen[active].astype(np.int32), cur, axis=1)
            k += 1
        return orders, fixsum // orders

    @cached_property
    def _orders_and_cycles(self) -> tuple[np.ndarray, np.ndarray]:
        return self._cycle_data()

    @property
    def orders(self) -> np.ndarray:
        return self._orders_and_cycles[0]

    @property
    def cycle_counts(self) -> np.ndarray:
        """n(g) for each element id, fixed points counted as cycles."""
        return self._orders_and_cycles[1]

    @cached_property
    def fixed_point_counts(self) -> np.ndarray:
        return np.count_nonzero(self.rows == np.arange(self.degree), axis=1)

    def closure(self, gen_ids: Iterable[int]) -> np.ndarray:
        """Sorted ids of the subgroup generated by ``gen_ids``."""
        gens = np.unique(np.asarray(list(gen_ids), dtype=np.intp))
        members = np.zeros(self.size, dtype=bool)
        members[self.identity] = True
        frontier = np.array([self.identity], dtype=np.intp)
        while frontier.size:
            prod = self.mul(frontier[:, None], gens[None, :]).ravel()
            prod = np.unique(prod)
            new = prod[~members[prod]]
            members[new] = True
            frontier = new
        return np.flatnonzero(members)

    def coset_union(self, subgroup: np.ndarray, x: int, index: int) -> np.ndarray:
        """Sorted ids of U ∪ xU ∪ ... ∪ x^(index-1)U."""
        parts = [subgroup]
        xj = int(x)
        for _ in range(1, index):
            parts.append(self.mul(xj, subgroup))
            xj = int(self.mul(xj, x))
        return np.sort(np.concatenate(parts))


class PermutationGroup:
    """A permutation group with a completed stabilizer chain.

    The chain is built in the constructor, so instances are safe to share
    once created. Element enumeration is lazy and capped.
    """

    def __init__(
        self,
        generators: Sequence[Permutation],
        degree: Optional[int] = None,
        base_prefix: Sequence[int] = (),
        cap: int = ENUMERATION_CAP,
        _chain: Optional[StabilizerChain] = None,
    ):
        generators = list(generators)
        if degree is None:
            if not generators:
                raise ValueError("degree required for an empty generator list")
            degree = generators[0].degree
        for g in generators:
            if g.degree != degree:
                raise DegreeMismatch(f"generator of degree {g.degree} in a group of degree {degree}")
        self.degree = degree
        self.generators = generators
        self.cap = cap
        if _chain is None:
            _chain = StabilizerChain(degree, (g.images for g in generators), base_prefix)
        self.chain = _chain

    @property
    def order(self) -> int:
        return self.chain.order

    def __len__(self) -> int:
        return self.order

    def __repr__(self) -> str:
        return f"PermutationGroup(degree={self.degree}, order={self.order})"

    def contains(self, g: Permutation) -> bool:
        if g.degree != self.degree:
            raise DegreeMismatch("degree mismatch")
        return self.chain.contains(g.images)

    __contains__ = contains

    def identity(self) -> Permutation:
        return Permutation.identity(self.degree)

    def is_trivial(self) -> bool:
        return self.order == 1

    def nontrivial_generators(self) -> list[Permutation]:
        return [g for g in self.generators if not g.is_identity()]

    def with_generators(self, extra: Iterable[Permutation]) -> PermutationGroup:
        chain = self.chain.copy()
        gens = list(self.generators)
        for g in extra:
            if chain.add_generator(g.images):
                gens.append(g)
        return PermutationGroup(gens, self.degree, cap=self.cap, _chain=chain)

    def is_subgroup_of(self, other: PermutationGroup) -> bool:
        return all(other.contains(g) for g in self.generators)

    @cached_property
    def elements(self) -> ElementTable:
        return ElementTable(self.chain, self.cap)

    def element_list(self) -> list[Permutation]:
        t = self.elements
        return [t.perm(i) for i in range(t.size)]

    def strong_generators(self) -> list[Permutation]:
        return [Permutation(g, check=False) for g in self.chain.strong_generators()]

    def stabilizer(self, point: int) -> PermutationGroup:
        """Point stabilizer, read off a chain whose base starts at ``point``."""
        chain = self.chain
        if not chain.base or chain.base[0] != point:
            chain = StabilizerChain(self.degree, (g.images for g in self.generators), (point,))
        gens = [Permutation(g, check=False) for g in chain.gens[1]] if len(chain.base) > 1 else []
        return PermutationGroup(gens, self.degree, cap=self.cap)

    def orbit(self, point: int) -> list[int]:
        seen = {point}
        queue = [point]
        for x in queue:
            for g in self.generators:
                y = g.images[x]
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return sorted(seen)

    def generator_array(self) -> np.ndarray:
        if not self.generators:
            return np.arange(self.degree)[None, :]
        return np.array([g.images for g in self.generators])


def build_group(generators: Sequence[Permutation], cap: int = ENUMERATION_CAP) -> PermutationGroup:
    if not generators:
        raise ValueError("at least one generator is required; use the identity for the trivial group")
    return PermutationGroup(generators, cap=cap)


def trivial_group(degree: int) -> PermutationGroup:
    return PermutationGroup([Permutation.identity(degree)])


def symmetric_group(degree: int) -> PermutationGroup:
    if degree == 1:
        return trivial_group(1)
    gens = [Permutation.from_cycles(degree, (0, 1))]
    if degree > 2:
        gens.append(Permutation.from_cycles(degree, tuple(range(degree))))
    return PermutationGroup(gens)


def cyclic_group(n: int) -> PermutationGroup:
    return PermutationGroup([Permutation([(i + 1) % n for i in range(n)])])


def orbit_labels(degree: int, gen_rows: np.ndarray) -> np.ndarray:
    """Connected-component label of every point under the generator arrays."""
    gen_rows = np.atleast_2d(gen_rows)
    src = np.tile(np.arange(degree), len(gen_rows))
    dst = gen_rows.ravel().astype(np.int64)
    graph = coo_matrix((np.ones(src.size, dtype=np.int8), (src, dst)), shape=(degree, degree))
    _, labels = connected_components(graph, directed=True, connection="weak")
    return labels


def orbits_from_rows(degree: int, gen_rows: np.ndarray) -> list[list[int]]:
    labels = orbit_labels(degree, gen_rows)
    groups: dict[int, list[int]] = {}
    for pt, lab in enumerate(labels.tolist()):
        groups.setdefault(lab, []).append(pt)
    return sorted(groups.values(), key=lambda o: o[0])


def orbit_partition(G: PermutationGroup) -> list[list[int]]:
    return orbits_from_rows(G.degree, G.generator_array())


def minimal_block(G: PermutationGroup, a: int, b: int) -> list[int]:
    """The smallest block containing points ``a`` and ``b`` (union-find closure)."""
    parent = list(range(G.degree))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    gens = [g.images for g in G.generators]
    queue = [(a, b)]
    parent[find(b)] = find(a)
    while queue:
        x, y = queue.pop()
        for g in gens:
            rx, ry = find(g[x]), find(g[y])
            if rx != ry:
                parent[ry] = rx
                queue.append((g[x], g[y]))
    root = find(a)
    return [x for x in range(G.degree) if find(x) == root]


def is_transitive(G: PermutationGroup) -> bool:
    return len(orbit_partition(G)) == 1


def is_primitive(G: PermutationGroup) -> bool:
    if not is_transitive(G):
        return False
    return all(len(minimal_block(G, 0, x)) == G.degree for x in range(1, G.degree))


def commutator(a: Permutation, b: Permutation) -> Permutation:
    return a.inverse() * b.inverse() * a * b


def normal_closure(G: PermutationGroup, elements: Iterable[Permutation]) -> PermutationGroup:
    """Smallest normal subgroup of G containing ``elements``."""
    N = trivial_group(G.degree)
    queue = [e for e in elements if not e.is_identity()]
    while queue:
        x = queue.pop()
        if N.contains(x):
            continue
        N = N.with_generators([x])
        queue.extend(x.conjugate(g) for g in G.generators)
    return N


def derived_subgroup(G: PermutationGroup) -> PermutationGroup:
    gens = G.nontrivial_generators()
    return normal_closure(G, (commutator(a, b) for i, a in enumerate(gens) for b in gens[i + 1:]))


def derived_series(G: PermutationGroup) -> list[PermutationGroup]:
    series = [G]
    while True:
        D = derived_subgroup(series[-1])
        if D.order == series[-1].order:
            return series
        series.append(D)


def lower_central_series(G: PermutationGroup) -> list[PermutationGroup]:
    """G = γ1 ≥ γ2 ≥ ... until it stabilises; iterations bounded by log2|G|."""
    bound = max(1, G.order.bit_length())
    series = [G]
    gens = G.nontrivial_generators()
    for _ in range(bound + 1):
        cur = series[-1]
        nxt = normal_closure(G, (commutator(x, g) for x in cur.nontrivial_generators() for g in gens))
        if nxt.order == cur.order:
            return series
        series.append(nxt)
        if nxt.order == 1:
            return series
    raise GroupError("lower central series exceeded its log2 iteration bound")


def smallest_prime_divisor(n: int) -> Optional[int]:
    if n < 2:
        return None
    p = 2
    while p * p <= n:
        if n % p == 0:
            return p
        p += 1
    return n


def prime_factors(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def is_prime(n: int) -> bool:
    return n >= 2 and smallest_prime_divisor(n) == n


@dataclass(frozen=True)
class GroupFlags:
    is_transitive: bool
    is_primitive: bool
    is_solvable: bool
    is_nilpotent: bool
    is_abelian: bool
    smallest_prime_divisor: Optional[int]


def is_abelian(G: PermutationGroup) -> bool:
    gens = G.nontrivial_generators()
    return all(a * b == b * a for i, a in enumerate(gens) for b in gens[i + 1:])


def is_solvable(G: PermutationGroup) -> bool:
    return derived_series(G)[-1].order == 1


def is_nilpotent(G: PermutationGroup) -> bool:
    return lower_central_series(G)[-1].order == 1


def classify(G: PermutationGroup) -> GroupFlags:
    abelian = is_abelian(G)
    nilpotent = abelian or is_nilpotent(G)
    solvable = nilpotent or is_solvable(G)
    transitive = is_transitive(G)
    return GroupFlags(
        is_transitive=transitive,
        is_primitive=transitive and is_primitive(G),
        is_solvable=solvable,
        is_nilpotent=nilpotent,
        is_abelian=abelian,
        smallest_prime_divisor=smallest_prime_divisor(G.order),
    )


def order_profile(G: PermutationGroup) -> dict[int, int]:
    """Map element order -> number of elements of that order."""
    counts = Counter(G.elements.orders.tolist())
    return dict(sorted(counts.items()))


def element_ids_in(ambient: ElementTable, H: PermutationGroup) -> np.ndarray:
    """Sorted ambient ids of all elements of H (H must lie in the ambient group)."""
    return np.sort(ambient.ids_of_rows(H.elements.rows))


def are_conjugate_subgroups(
    A: PermutationGroup, B: PermutationGroup, ambient: PermutationGroup
) -> tuple[bool, Optional[Permutation]]:
    """Decide whether ``A^x == B`` for some x in ``ambient``; return a witness x.

    Cheap invariants (order, orbit lengths, order profile) are compared first;
    the search then tests every ambient element at once on the element table.
    """
    for H in (A, B):
        if not H.is_subgroup_of(ambient):
            raise GroupError("subgroup is not contained in the ambient group")
    if A.order != B.order:
        return False, None
    if sorted(map(len, orbit_partition(A))) != sorted(map(len, orbit_partition(B))):
        return False, None
    if A.order <= 10**5 and order_profile(A) != order_profile(B):
        return False, None
    if A.is_subgroup_of(B):
        return True, ambient.identity()
    table = ambient.elements
    in_b = np.zeros(table.size, dtype=bool)
    in_b[element_ids_in(table, B)] = True
    candidates = np.arange(table.size)
    for g in A.nontrivial_generators():
        gid = table.id_of(g)
        images = table.conj(gid, candidates)
        candidates = candidates[in_b[images]]
        if candidates.size == 0:
            return False, None
    return True, table.perm(candidates[0])

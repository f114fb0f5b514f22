"""Finite modules GF(p)^d as permutation domains.

Vector v with coordinates (v_0, ..., v_{d-1}) is point ``sum(v_i * p**i)``
(little-endian base p), so the zero vector is point 0. Matrices act on
column vectors: a matrix M sends v to M·v.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from nilorbit.field import FIELD_SIZE_CAP, FieldSpec
from nilorbit.group import PermutationGroup, is_prime, orbit_partition
from nilorbit.perm import Permutation


class ModuleError(ValueError):
    pass


def vector_digits(p: int, d: int) -> np.ndarray:
    idx = np.arange(p**d, dtype=np.int64)
    return np.stack([(idx // p**i) % p for i in range(d)], axis=1) if d else np.zeros((1, 0), dtype=np.int64)


def encode_vectors(vecs: np.ndarray, p: int) -> np.ndarray:
    d = vecs.shape[-1]
    return (np.asarray(vecs) % p) @ np.array([p**i for i in range(d)], dtype=np.int64)


def rank_mod_p(rows: np.ndarray, p: int) -> int:
    m = np.array(rows, dtype=np.int64) % p
    rank = 0
    n_rows, n_cols = m.shape
    for col in range(n_cols):
        pivot = next((r for r in range(rank, n_rows) if m[r, col]), None)
        if pivot is None:
            continue
        m[[rank, pivot]] = m[[pivot, rank]]
        m[rank] = m[rank] * pow(int(m[rank, col]), -1, p) % p
        others = np.arange(n_rows) != rank
        m[others] = (m[others] - np.outer(m[others, col], m[rank])) % p
        rank += 1
        if rank == n_rows:
            break
    return rank


def matrix_to_permutation(M: np.ndarray, p: int) -> Permutation:
    M = np.asarray(M, dtype=np.int64) % p
    d = M.shape[0]
    vecs = vector_digits(p, d)
    return Permutation(encode_vectors(vecs @ M.T, p).tolist(), check=False)


def permutation_to_matrix(g: Permutation, p: int, d: int) -> np.ndarray:
    """Columns are the images of the standard basis vectors."""
    cols = [vector_digits(p, d)[g.images[p**i]] for i in range(d)]
    return np.stack(cols, axis=1) if d else np.zeros((0, 0), dtype=np.int64)


def general_linear_generators(d: int, p: int) -> list[np.ndarray]:
    """Transvections e_ij plus one diagonal generator; together they generate GL(d, p)."""
    gens = []
    if p > 2:
        diag = np.eye(d, dtype=np.int64)
        diag[0, 0] = next(a for a in range(2, p) if all(pow(a, (p - 1) // r, p) != 1 for r in _primes(p - 1)))
        gens.append(diag)
    for i, j in itertools.permutations(range(d), 2):
        t = np.eye(d, dtype=np.int64)
        t[i, j] = 1
        gens.append(t)
    if d == 1 and p == 2:
        gens.append(np.eye(1, dtype=np.int64))
    return gens


def _primes(n: int) -> list[int]:
    return [q for q in range(2, n + 1) if n % q == 0 and is_prime(q)]


@dataclass
class LinearModule:
    """GF(p)^d together with a group acting by linear permutations of its points.

    ``components`` lists (p, d) for each summand; a module with several
    components of different characteristic is a cartesian product of point
    sets rather than a single vector space.
    """

    characteristic: int
    dimension: int
    acting_group: PermutationGroup
    components: tuple[tuple[int, int], ...] = ()
    label: str = ""

    def __post_init__(self):
        if not self.components:
            self.components = ((self.characteristic, self.dimension),)
        if self.acting_group.degree != self.size:
            raise ModuleError("acting group degree does not match the module size")

    @property
    def size(self) -> int:
        out = 1
        for p, d in self.components:
            out *= p**d
        return out

    @property
    def mixed(self) -> bool:
        return len({p for p, _ in self.components}) > 1

    @cached_property
    def vectors(self) -> np.ndarray:
        if self.mixed:
            raise ModuleError("mixed-characteristic module has no single coordinate system")
        return vector_digits(self.characteristic, self.dimension)

    def add_points(self, a, b):
        out = np.zeros(np.broadcast(np.asarray(a), np.asarray(b)).shape, dtype=np.int64)
        a, b = np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
        scale = 1
        for p, d in self.components:
            n = p**d
            va = vector_digits(p, d)[(a // scale) % n]
            vb = vector_digits(p, d)[(b // scale) % n]
            out += encode_vectors(va + vb, p) * scale
            scale *= n
        return out

    def basis_points(self) -> list[int]:
        pts, scale = [], 1
        for p, d in self.components:
            pts.extend(scale * p**i for i in range(d))
            scale *= p**d
        return pts

    def is_additive(self, g: Permutation) -> bool:
        img = np.array(g.images)
        if img[0] != 0:
            return False
        allv = np.arange(self.size)
        for e in self.basis_points():
            if not np.array_equal(img[self.add_points(allv, e)], self.add_points(img[allv], img[e])):
                return False
        return True

    def matrices(self) -> list[np.ndarray]:
        if self.mixed:
            raise ModuleError("mixed-characteristic module")
        return [permutation_to_matrix(g, self.characteristic, self.dimension) for g in self.acting_group.generators]

    def is_faithful(self) -> bool:
        # a permutation group acts faithfully on its own points
        return True

    def orbits(self) -> list[list[int]]:
        return orbit_partition(self.acting_group)

    def is_irreducible(self) -> bool:
        """No proper nonzero invariant subspace: the orbit of every nonzero vector spans V."""
        if self.mixed or len(self.components) > 1:
            return False
        if self.dimension == 0:
            return False
        vecs = self.vectors
        for orbit in self.orbits():
            if orbit == [0]:
                continue
            if rank_mod_p(vecs[orbit], self.characteristic) < self.dimension:
                return False
        return True

    def to_json(self) -> dict:
        return {
            "p": self.characteristic,
            "d": self.dimension,
            "matrices": [m.tolist() for m in self.matrices()],
        }


def _check_invertible(M: np.ndarray, p: int) -> None:
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ModuleError("matrices must be square")
    if rank_mod_p(M, p) < M.shape[0]:
        raise ModuleError(f"singular matrix mod {p}:\n{M}")


def make_linear_action(matrix_generators: Sequence, p: int, label: str = "") -> LinearModule:
    if not is_prime(p):
        raise ModuleError(f"{p} is not prime")
    mats = [np.asarray(m, dtype=np.int64) % p for m in matrix_generators]
    if not mats:
        raise ModuleError("at least one matrix is required")
    d = mats[0].shape[0]
    if p**d > FIELD_SIZE_CAP:
        raise ModuleError(f"module of size {p}^{d} exceeds the cap")
    for m in mats:
        _check_invertible(m, p)
        if m.shape[0] != d:
            raise ModuleError("matrices of different sizes")
    group = PermutationGroup([matrix_to_permutation(m, p) for m in mats])
    return LinearModule(p, d, group, label=label)


def module_from_group(group: PermutationGroup, p: int, d: int, label: str = "") -> LinearModule:
    """Wrap a permutation group on p^d points (e.g. a semilinear group) as a module."""
    mod = LinearModule(p, d, group, label=label)
    for g in group.generators:
        if not mod.is_additive(g):
            raise ModuleError("group does not act additively")
    return mod


def field_module(F: FieldSpec, group: PermutationGroup, label: str = "") -> LinearModule:
    return module_from_group(group, F.p, F.k, label)


def fixed_vector_count(g: Permutation, module: Optional[LinearModule] = None) -> int:
    """|C_V(g)|: the number of vectors fixed by a module permutation."""
    if module is not None and not module.is_additive(g):
        raise ModuleError("permutation is not additive on the module")
    img = np.asarray(g.images)
    return int(np.count_nonzero(img == np.arange(img.size)))


def centralizer_of_vector(H: PermutationGroup, v: int) -> PermutationGroup:
    """C_H(v), the stabilizer of point v, via a chain based at v."""
    return H.stabilizer(v)


def direct_sum_module(
    modules: Sequence[LinearModule],
    group_assignment: Union[str, Sequence[Sequence[Permutation]]] = "product",
) -> LinearModule:
    """V_1 ⊕ ... ⊕ V_r, with point ``v_1 + |V_1| v_2 + ...``.

    ``group_assignment="product"`` lets the summand groups act independently
    (the direct product). Otherwise pass generator tuples, one permutation per
    summand, for a group acting on all summands at once.
    """
    modules = [m for m in modules]
    if not modules:
        raise ModuleError("no summands")
    comps = tuple(c for m in modules for c in m.components if c[1] > 0) or modules[0].components
    sizes = [m.size for m in modules]
    total = int(np.prod(sizes))
    if total > FIELD_SIZE_CAP:
        raise ModuleError("direct sum exceeds the size cap")
    pts = np.arange(total)
    scales = np.cumprod([1] + sizes[:-1])
    coords = [(pts // s) % n for s, n in zip(scales, sizes)]

    def combine(perms: Sequence[Permutation]) -> Permutation:
        img = np.zeros(total, dtype=np.int64)
        for perm, c, s in zip(perms, coords, scales):
            img += np.asarray(perm.images)[c] * s
        return Permutation(img.tolist(), check=False)

    if group_assignment == "product":
        tuples = []
        for i, m in enumerate(modules):
            for g in m.acting_group.generators:
                tup = [mm.acting_group.identity() for mm in modules]
                tup[i] = g
                tuples.append(tup)
    else:
        tuples = [list(t) for t in group_assignment]
    gens = [combine(t) for t in tuples] or [Permutation.identity(total)]
    chars = {p for p, _ in comps}
    p = comps[0][0]
    dim = sum(d for _, d in comps) if len(chars) == 1 else 0
    label = " + ".join(m.label or f"GF({m.characteristic})^{m.dimension}" for m in modules)
    return LinearModule(p, dim, PermutationGroup(gens), components=comps, label=label)


def load_module(path: Union[str, Path]) -> LinearModule:
    """Read ``{"p": 3, "d": 2, "matrices": [[[...]]]}`` (row-major, entries mod p)."""
    data = json.loads(Path(path).read_text())
    return module_from_json(data)


def module_from_json(data: dict) -> LinearModule:
    p, d = int(data["p"]), int(data["d"])
    mats = data.get("matrices") or [np.eye(d, dtype=np.int64).tolist()]
    mod = make_linear_action(mats, p, label=data.get("label", ""))
    if mod.dimension != d:
        raise ModuleError("matrix size does not match d")
    return mod

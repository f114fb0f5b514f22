"""Group constructions and the catalog of solvable primitive groups.

A solvable primitive group of degree n = p^d is an affine group V ⋊ H with
V = GF(p)^d acting by translations and H ≤ GL(d, p) irreducible and
solvable; two such groups are conjugate in Sym(n) exactly when their point
stabilizers are conjugate in GL(d, p). The catalog is therefore built from
GL-classes of irreducible solvable linear groups, found by one of:

* ``prime-degree``: d = 1, one subgroup of GF(p)^× per divisor of p - 1;
* ``exhaustive``: cyclic extension inside GL(d, p) when |GL(d, p)| ≤ 25000;
* ``semilinear``: subgroups of Γ(p^d); complete for GL(5, 2);
* ``maximal``: a few maximal solvable candidates (Γ(p^d) and imprimitive
  wreath products), used only for largest-subgroup questions at degrees
  where neither of the above is feasible.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import os
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from nilorbit.field import make_gamma
from nilorbit.group import (
    GroupFlags,
    PermutationGroup,
    are_conjugate_subgroups,
    classify,
    is_prime,
    order_profile,
    orbit_partition,
    prime_factors,
    symmetric_group,
)
from nilorbit.linear import (
    LinearModule,
    general_linear_generators,
    make_linear_action,
    module_from_group,
    vector_digits,
    encode_vectors,
)
from nilorbit.perm import Permutation
from nilorbit.subgroups import SUBGROUP_CAP, subgroups_up_to_conjugacy

log = logging.getLogger(__name__)

CATALOG_VERSION = 1
MAX_DEGREE = 128

TIER1_DEGREES = (2, 3, 4, 5, 7, 8, 9, 11, 16, 25, 27, 32)
TIER2_DEGREES = (49, 64, 81)

# (d, p) where the semilinear subgroups are all irreducible solvable groups:
# for GL(5, 2) there is no extraspecial type (5 does not divide 2^j - 1 for
# j < 4 with a field of dimension dividing 5) and no monomial irreducible
# group since GL(1, 2) is trivial.
SEMILINEAR_COMPLETE = {(5, 2)}


class CatalogError(Exception):
    pass


def gl_order(d: int, p: int) -> int:
    q = p**d
    return math.prod(q - p**i for i in range(d))


def prime_power(n: int) -> Optional[tuple[int, int]]:
    f = prime_factors(n)
    if len(f) != 1:
        return None
    (p, d), = f.items()
    return p, d


# ---------------------------------------------------------------- constructions


def wreath_product(H: PermutationGroup, S: PermutationGroup) -> PermutationGroup:
    """H ≀ S acting imprimitively on b blocks ``{j*a, ..., j*a + a-1}``."""
    a, b = H.degree, S.degree
    if a * b > 4096:
        raise CatalogError("wreath product degree too large")
    gens = []
    for j in range(b):
        for h in H.nontrivial_generators():
            img = list(range(a * b))
            for i in range(a):
                img[j * a + i] = j * a + h.images[i]
            gens.append(Permutation(img, check=False))
    for s in S.nontrivial_generators():
        gens.append(Permutation([s.images[j] * a + i for j in range(b) for i in range(a)], check=False))
    return PermutationGroup(gens or [Permutation.identity(a * b)], a * b)


def translations(p: int, d: int) -> list[Permutation]:
    vecs = vector_digits(p, d)
    out = []
    for i in range(d):
        shift = np.zeros(d, dtype=np.int64)
        shift[i] = 1
        out.append(Permutation(encode_vectors(vecs + shift, p).tolist(), check=False))
    return out


def affine_group(module: LinearModule) -> PermutationGroup:
    """V ⋊ H as a permutation group on the vectors of V."""
    gens = translations(module.characteristic, module.dimension)
    gens += module.acting_group.nontrivial_generators()
    return PermutationGroup(gens)


def imprimitive_linear(module: LinearModule, top: PermutationGroup) -> LinearModule:
    """W ≀ T acting on V^b for a module W of H and a permutation group T of degree b."""
    p, a = module.characteristic, module.dimension
    b = top.degree
    base = module.matrices()
    mats = []
    for j in range(b):
        for m in base:
            big = np.eye(a * b, dtype=np.int64)
            big[j * a:(j + 1) * a, j * a:(j + 1) * a] = m
            mats.append(big)
    for s in top.nontrivial_generators():
        big = np.zeros((a * b, a * b), dtype=np.int64)
        for j in range(b):
            big[s.images[j] * a:(s.images[j] + 1) * a, j * a:(j + 1) * a] = np.eye(a, dtype=np.int64)
        mats.append(big)
    return make_linear_action(mats, p, label=f"({module.label})wr{top.order}")


# ---------------------------------------------------------------- linear groups


def _prime_degree_subgroups(p: int) -> list[LinearModule]:
    w = next(a for a in range(1, p) if p == 2 or all(pow(a, (p - 1) // r, p) != 1 for r in prime_factors(p - 1)))
    out = []
    for m in sorted(x for x in range(1, p) if (p - 1) % x == 0):
        gen = pow(w, (p - 1) // m, p)
        out.append(make_linear_action([[[gen]]], p, label=f"C{m}"))
    return out


def _irreducible_classes(ambient: PermutationGroup, p: int, d: int, label: str) -> list[LinearModule]:
    subs = subgroups_up_to_conjugacy(ambient, cap=max(SUBGROUP_CAP, ambient.order))
    out = []
    for cls, rep in zip(subs.classes, subs.representatives):
        mod = LinearModule(p, d, rep, label=f"{label}#{cls.order}")
        if mod.is_irreducible():
            out.append(mod)
    return out


def _fingerprint(mod: LinearModule) -> tuple:
    G = mod.acting_group
    stab_orbits = tuple(sorted(len(o) for o in orbit_partition(G)))
    profile = tuple(order_profile(G).items()) if G.order <= 10**5 else ()
    return (G.order, stab_orbits, profile)


def irreducible_solvable_subgroups(d: int, p: int, route: Optional[str] = None) -> list[LinearModule]:
    """Irreducible solvable subgroups of GL(d, p) up to conjugacy, as modules."""
    if not is_prime(p) or d < 1:
        raise CatalogError(f"unsupported (d, p) = ({d}, {p})")
    route = route or default_route(d, p)
    if route == "prime-degree":
        return _prime_degree_subgroups(p)
    if route == "exhaustive":
        gl = make_linear_action(general_linear_generators(d, p), p).acting_group
        return _irreducible_classes(gl, p, d, f"GL({d},{p})")
    if route == "semilinear":
        gamma, _ = make_gamma(p, d)
        found = _irreducible_classes(gamma, p, d, f"Gamma({p}^{d})")
        seen, out = set(), []
        for mod in found:
            fp = _fingerprint(mod)
            if fp not in seen:
                seen.add(fp)
                out.append(mod)
        return out
    if route == "maximal":
        return maximal_candidates(d, p)
    raise CatalogError(f"unknown route {route!r}")


def default_route(d: int, p: int) -> str:
    if d == 1:
        return "prime-degree"
    if gl_order(d, p) <= SUBGROUP_CAP:
        return "exhaustive"
    if (d, p) in SEMILINEAR_COMPLETE:
        return "semilinear"
    return "maximal"


def _maximal_of(mods: list[LinearModule]) -> list[LinearModule]:
    """Modules whose group is not properly contained in another listed group (up to order)."""
    top = max(m.acting_group.order for m in mods)
    return [m for m in mods if m.acting_group.order == top]


def _solvable_transitive_tops(b: int) -> list[PermutationGroup]:
    if b <= 4:
        return [symmetric_group(b)]
    return []


def maximal_candidates(d: int, p: int) -> list[LinearModule]:
    """Large irreducible solvable subgroups: Γ(p^d) and W ≀ S_b for d = a*b, b ≤ 4."""
    gamma, _ = make_gamma(p, d)
    out = [module_from_group(gamma, p, d, label=f"Gamma({p}^{d})")]
    for a in range(1, d):
        if d % a:
            continue
        b = d // a
        if gl_order(a, p) > SUBGROUP_CAP and (a, p) not in SEMILINEAR_COMPLETE:
            continue
        inner = [m for m in irreducible_solvable_subgroups(a, p) if m.acting_group.order > 1]
        if not inner:
            continue
        for W in _maximal_of(inner):
            for T in _solvable_transitive_tops(b):
                out.append(imprimitive_linear(W, T))
    return out


# ---------------------------------------------------------------- catalog


@dataclass
class CatalogEntry:
    degree: int
    generators: list[Permutation]
    order: int
    flags: GroupFlags
    route: str

    @cached_property
    def group(self) -> PermutationGroup:
        return PermutationGroup(self.generators, self.degree)

    @property
    def prime(self) -> int:
        return prime_power(self.degree)[0]

    @property
    def dimension(self) -> int:
        return prime_power(self.degree)[1]

    def point_stabilizer(self) -> PermutationGroup:
        return self.group.stabilizer(0)

    def to_json(self) -> dict:
        f = self.flags
        return {
            "v": CATALOG_VERSION,
            "degree": self.degree,
            "gens": [str(g) for g in self.generators],
            "order": str(self.order),
            "flags": {
                "solvable": f.is_solvable,
                "primitive": f.is_primitive,
                "transitive": f.is_transitive,
                "nilpotent": f.is_nilpotent,
                "abelian": f.is_abelian,
                "smallest_prime": f.smallest_prime_divisor,
            },
            "route": self.route,
        }

    @classmethod
    def from_json(cls, data: dict, verify: bool = True) -> CatalogEntry:
        if data.get("v") != CATALOG_VERSION:
            raise CatalogError(f"catalog schema version {data.get('v')!r} is not {CATALOG_VERSION}")
        gens = [Permutation.parse(s) for s in data["gens"]]
        order = int(data["order"])
        fl = data["flags"]
        flags = GroupFlags(
            is_transitive=fl.get("transitive", True),
            is_primitive=fl["primitive"],
            is_solvable=fl["solvable"],
            is_nilpotent=fl.get("nilpotent", False),
            is_abelian=fl.get("abelian", False),
            smallest_prime_divisor=fl.get("smallest_prime"),
        )
        entry = cls(int(data["degree"]), gens, order, flags, data["route"])
        if verify and entry.group.order != order:
            raise CatalogError(f"order field {order} disagrees with generators (order {entry.group.order})")
        return entry

    def sort_key(self) -> tuple:
        return (self.order, [g.images for g in self.generators])


def entry_from_module(module: LinearModule, route: str) -> CatalogEntry:
    G = affine_group(module)
    flags = classify(G)
    gens = G.generators
    return CatalogEntry(G.degree, gens, G.order, flags, route)


def degree_tier(n: int) -> int:
    return 1 if n in TIER1_DEGREES else 2


def route_label(d: int, p: int, route: str) -> str:
    if route == "prime-degree":
        return f"AGL(1,{p})-subgroup"
    if route == "exhaustive":
        return f"AGL({d},{p})-subgroup"
    if route == "semilinear":
        return f"AΓL(1,{p**d})-subgroup"
    return "maximal-candidate"


def check_degree(n: int) -> tuple[int, int]:
    pp = prime_power(n) if n >= 2 else None
    if pp is None:
        raise CatalogError(f"degree {n} is not a prime power; no solvable primitive groups exist")
    if n > MAX_DEGREE:
        raise CatalogError(f"degree {n} exceeds the supported maximum {MAX_DEGREE}")
    return pp


def solvable_primitive_catalog(n: int, route: Optional[str] = None) -> tuple[list[CatalogEntry], dict]:
    """Entries for degree n plus metadata (route, tier, completeness)."""
    p, d = check_degree(n)
    route = route or default_route(d, p)
    mods = irreducible_solvable_subgroups(d, p, route)
    entries = [entry_from_module(m, route_label(d, p, route)) for m in mods]
    for e in entries:
        if not (e.flags.is_primitive and e.flags.is_solvable):
            raise CatalogError(f"constructed group of order {e.order} is not solvable primitive")
    entries.sort(key=CatalogEntry.sort_key)
    complete = route in ("prime-degree", "exhaustive") or (route == "semilinear" and (d, p) in SEMILINEAR_COMPLETE)
    meta = {
        "degree": n,
        "route": route,
        "tier": degree_tier(n),
        "completeness": "complete" if complete else "incomplete",
        "entries": len(entries),
    }
    return entries, meta


@dataclass
class Catalog:
    entries: dict[int, list[CatalogEntry]] = field(default_factory=dict)
    metadata: dict[int, dict] = field(default_factory=dict)

    def add_degree(self, n: int, entries: list[CatalogEntry], meta: dict) -> None:
        self.entries[n] = sorted(entries, key=CatalogEntry.sort_key)
        self.metadata[n] = meta

    def degrees(self) -> list[int]:
        return sorted(self.entries)

    def at(self, n: int) -> list[CatalogEntry]:
        return self.entries.get(n, [])

    def all_entries(self) -> list[CatalogEntry]:
        return [e for n in self.degrees() for e in self.entries[n]]

    def is_complete(self, n: int) -> bool:
        return self.metadata.get(n, {}).get("completeness") == "complete"


def catalog_store(catalog: Catalog, path: Union[str, Path]) -> None:
    """Write entries as JSON lines and the per-degree metadata next to them."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [json.dumps(e.to_json(), sort_keys=True) for e in catalog.all_entries()]
    path.write_text("".join(line + "\n" for line in lines))
    meta = {str(n): catalog.metadata.get(n, {}) for n in catalog.degrees()}
    _meta_path(path).write_text(json.dumps(meta, sort_keys=True, indent=1) + "\n")


def _meta_path(path: Path) -> Path:
    return path.with_name(path.name + ".meta.json")


def catalog_load(path: Union[str, Path], verify: bool = True) -> Catalog:
    path = Path(path)
    cat = Catalog()
    by_degree: dict[int, list[CatalogEntry]] = {}
    for lineno, line in enumerate(path.read_text().splitlines(), 1):
        if not line.strip():
            continue
        try:
            entry = CatalogEntry.from_json(json.loads(line), verify=verify)
        except (KeyError, ValueError) as exc:
            raise CatalogError(f"{path}:{lineno}: {exc}") from exc
        by_degree.setdefault(entry.degree, []).append(entry)
    meta: dict = {}
    if _meta_path(path).exists():
        meta = {int(k): v for k, v in json.loads(_meta_path(path).read_text()).items()}
    for n in sorted(set(by_degree) | set(meta)):
        cat.add_degree(n, by_degree.get(n, []), meta.get(n, {}))
    return cat


def build_catalog(degrees: Iterable[int]) -> Catalog:
    cat = Catalog()
    for n in sorted(set(degrees)):
        entries, meta = solvable_primitive_catalog(n)
        cat.add_degree(n, entries, meta)
    return cat


def catalog_fingerprint(degrees: Iterable[int]) -> str:
    """Hash of the construction parameters that determine a degree's catalog."""
    payload = json.dumps(
        {"v": CATALOG_VERSION, "degrees": sorted(set(degrees)), "cap": SUBGROUP_CAP}, sort_keys=True
    )
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def default_cache_dir() -> Path:
    return Path(os.environ.get("NILORBIT_CACHE", Path.home() / ".cache" / "nilorbit"))


class CatalogCache:
    """One JSON-lines file per degree plus a manifest keyed by construction hash."""

    def __init__(self, root: Union[str, Path, None] = None):
        self.root = Path(root) if root is not None else default_cache_dir()
        self.constructions = 0

    @property
    def manifest_path(self) -> Path:
        return self.root / "manifest.json"

    def manifest(self) -> dict:
        if self.manifest_path.exists():
            return json.loads(self.manifest_path.read_text())
        return {"v": CATALOG_VERSION, "degrees": {}}

    def _file(self, n: int) -> Path:
        return self.root / f"degree-{n:03d}.jsonl"

    def get(self, n: int, build: bool = True) -> tuple[list[CatalogEntry], dict]:
        man = self.manifest()
        rec = man["degrees"].get(str(n))
        if rec and rec.get("hash") == catalog_fingerprint([n]) and self._file(n).exists():
            cat = catalog_load(self._file(n), verify=False)
            return cat.at(n), rec["meta"]
        if not build:
            raise CatalogError(f"degree {n} is not cached")
        entries, meta = solvable_primitive_catalog(n)
        self.constructions += 1
        cat = Catalog()
        cat.add_degree(n, entries, meta)
        catalog_store(cat, self._file(n))
        man = self.manifest()
        man["degrees"][str(n)] = {"hash": catalog_fingerprint([n]), "meta": meta, "file": self._file(n).name}
        self.root.mkdir(parents=True, exist_ok=True)
        self.manifest_path.write_text(json.dumps(man, sort_keys=True, indent=1) + "\n")
        return entries, meta

    def catalog(self, degrees: Iterable[int]) -> Catalog:
        cat = Catalog()
        for n in sorted(set(degrees)):
            entries, meta = self.get(n)
            cat.add_degree(n, entries, meta)
        return cat


def dedup_by_conjugacy(entries: Sequence[CatalogEntry], ambient: PermutationGroup) -> list[CatalogEntry]:
    """Drop entries conjugate (inside ``ambient``) to an earlier one."""
    kept: list[CatalogEntry] = []
    for e in entries:
        if not any(are_conjugate_subgroups(e.group, k.group, ambient)[0] for k in kept):
            kept.append(e)
    return kept

"""Orbit sizes and centralizers of nilpotent subgroups on linear modules.

Two existence claims are checked for every nontrivial nilpotent H of a
solvable group acting on a module V:

* some v has p·|C_H(v)|^p ≤ |H|, with p the smallest prime dividing |H|;
* when |H| is even, some v has 2·|H| ≤ |v^H|^2.

Both only depend on the smallest centralizer, so each subgroup costs one
pass over its elements. The semilinear case table is reproduced from the
subgroups of Γ(p^n) with a prescribed intersection with Γ0(p^n).
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from nilorbit.field import make_gamma
from nilorbit.group import (
    ElementTable,
    PermutationGroup,
    is_nilpotent,
    orbit_partition,
    smallest_prime_divisor,
)
from nilorbit.linear import LinearModule, direct_sum_module, make_linear_action, general_linear_generators
from nilorbit.perm import format_perms
from nilorbit.report import VerificationReport
from nilorbit.subgroups import EnumerationTimeout, nilpotent_subgroups, subgroups_up_to_conjugacy
from nilorbit.zoo import gl_order, irreducible_solvable_subgroups

MAIN_THEOREM_GROUPS = ((2, 2), (2, 3), (3, 2), (2, 5), (3, 3))


@dataclass
class OrbitReport:
    max_orbit_size: int
    witness_point: int
    min_centralizer_order: int
    group_order: int
    orbit_count: int = 0
    verdicts: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.max_orbit_size * self.min_centralizer_order != self.group_order:
            raise AssertionError("orbit-stabilizer identity violated")


def orbit_extremes_on_module(H: PermutationGroup, module: Optional[LinearModule] = None) -> OrbitReport:
    """Largest orbit and smallest point stabilizer, one chain per orbit."""
    if module is not None and module.size != H.degree:
        raise ValueError("group and module sizes differ")
    orbits = orbit_partition(H)
    best_v, best_c = 0, H.order
    for orb in orbits:
        v = orb[0]
        c = H.order // len(orb)
        if c < best_c or (c == best_c and v < best_v):
            best_v, best_c = v, c
    return OrbitReport(H.order // best_c, best_v, best_c, H.order, len(orbits))


def centralizer_sizes(rows: np.ndarray) -> np.ndarray:
    """|C_H(v)| for every point v, from the element rows of H."""
    return np.count_nonzero(rows == np.arange(rows.shape[1]), axis=0)


def check_subgroup(order: int, rows: np.ndarray) -> dict:
    """Both theorem forms for one subgroup given by its element rows."""
    cent = centralizer_sizes(rows)
    v = int(np.argmin(cent))
    c = int(cent[v])
    p = smallest_prime_divisor(order)
    largest_orbit = order // c
    thm32 = p * c**p <= order
    thm31 = None
    if order % 2 == 0:
        thm31 = 2 * order <= largest_orbit**2
        if p == 2 and thm32 and not thm31:
            raise AssertionError("p = 2 form holds but the orbit form fails")
    return {"order": order, "p": p, "witness": v, "centralizer": c, "max_orbit": largest_orbit,
            "thm32": thm32, "thm31": thm31}


def main_theorems_on(G: PermutationGroup, deadline: Optional[float] = None) -> dict:
    """All nontrivial nilpotent classes of G checked on G's own points.

    G is a permutation group of the module points, so the action is faithful
    by construction.
    """
    subs = nilpotent_subgroups(G, deadline=deadline)
    table = G.elements
    results, failures = [], []
    for cls in subs.classes:
        if cls.order == 1:
            continue
        if deadline is not None and time.monotonic() > deadline:
            raise EnumerationTimeout("time budget exceeded")
        res = check_subgroup(cls.order, table.rows[cls.ids])
        results.append(res)
        if not res["thm32"] or res["thm31"] is False:
            failures.append(dict(res, generators=format_perms(subs.group(cls).nontrivial_generators())))
    return {"classes": len(results), "failures": failures, "results": results}


def maximal_irreducible_solvable(d: int, p: int) -> list[LinearModule]:
    """Irreducible solvable subgroups of GL(d, p) maximal under inclusion, up to conjugacy."""
    if d == 1:
        return irreducible_solvable_subgroups(1, p)[-1:]
    gl = make_linear_action(general_linear_generators(d, p), p).acting_group
    subs = subgroups_up_to_conjugacy(gl, cap=max(gl.order, 25000))
    table = gl.elements
    irr = []
    for cls, rep in zip(subs.classes, subs.representatives):
        mod = LinearModule(p, d, rep, label=f"GL({d},{p})#{cls.order}")
        if mod.is_irreducible():
            irr.append((cls, mod))
    everything = np.arange(table.size)
    out = []
    for cls, mod in irr:
        contained = False
        for big, _ in irr:
            if big.order <= cls.order or big.order % cls.order:
                continue
            members = np.zeros(table.size, dtype=bool)
            members[big.ids] = True
            ok = np.ones(table.size, dtype=bool)
            for u in cls.gens:
                ok &= members[table.conj(u, everything)]
            if ok.any():
                contained = True
                break
        if not contained:
            out.append(mod)
    return out


def natural_modules() -> list[LinearModule]:
    mods = []
    for d, p in MAIN_THEOREM_GROUPS:
        mods.extend(irreducible_solvable_subgroups(d, p))
    return mods


def direct_sum_pairs() -> list[LinearModule]:
    """V1 ⊕ V2 under M1 × M2 for maximal irreducible solvable M1, M2 of equal characteristic.

    Any nilpotent subgroup of G1 × G2 with G1, G2 irreducible solvable lies in
    such a product, so these pairs cover all pairwise direct sums.
    """
    maxima: dict[int, list[LinearModule]] = {}
    for d, p in MAIN_THEOREM_GROUPS:
        maxima.setdefault(p, []).extend(maximal_irreducible_solvable(d, p))
    out = []
    for p in sorted(maxima):
        for a, b in itertools.combinations_with_replacement(range(len(maxima[p])), 2):
            out.append(direct_sum_module([maxima[p][a], maxima[p][b]]))
    return out


def verify_main_theorems(
    modules: Sequence[LinearModule], deadline: Optional[float] = None, universe: Optional[dict] = None
) -> VerificationReport:
    start = time.monotonic()
    per_module, witnesses = [], []
    total = 0
    try:
        for mod in modules:
            res = main_theorems_on(mod.acting_group, deadline)
            total += res["classes"]
            per_module.append({"module": mod.label, "points": mod.size, "group_order": mod.acting_group.order,
                               "classes": res["classes"]})
            witnesses.extend(dict(f, module=mod.label) for f in res["failures"])
    except EnumerationTimeout:
        return VerificationReport("main-theorems", universe or {}, "incomplete", numbers={"reason": "time budget exceeded"},
                                  runtime_ms=int((time.monotonic() - start) * 1000), completeness="incomplete")
    verdict = "fail" if witnesses else "pass"
    numbers = {"modules": per_module, "subgroups_checked": total, "value": total, "verdict": verdict}
    return VerificationReport("main-theorems", universe or {"modules": len(per_module)}, verdict, witnesses, numbers,
                              int((time.monotonic() - start) * 1000), 1, "complete")


def main_theorem_universe() -> tuple[list[LinearModule], dict]:
    singles = natural_modules()
    pairs = direct_sum_pairs()
    universe = {
        "groups": [f"GL({d},{p})" for d, p in MAIN_THEOREM_GROUPS],
        "irreducible_modules": len(singles),
        "direct_sums": len(pairs),
    }
    return singles + pairs, universe


# ---------------------------------------------------------------- semilinear cases


@dataclass(frozen=True)
class GammaCase:
    """One row of the semilinear case table: |V| = p^n, |C| = c, |H/C| = f."""

    p: int
    n: int
    c_order: int
    quotient_order: int
    annotation: str
    orbit_size: Optional[int] = None

    @property
    def q_power(self) -> int:
        return self.p**self.n

    def __post_init__(self):
        if (self.p**self.n - 1) % self.c_order or self.n % self.quotient_order:
            raise ValueError("c must divide p^n - 1 and f must divide n")


# Annotations as listed in the source for each (|V|, |C|, |H/C|).
GAMMA_CASES = (
    GammaCase(2, 2, 3, 2, "not-nilpotent"),
    GammaCase(2, 3, 7, 3, "not-nilpotent"),
    GammaCase(3, 2, 8, 2, "orbit", 8),
    GammaCase(2, 4, 15, 4, "orbit", 15),
    GammaCase(2, 4, 3, 4, "regular-orbit"),
    GammaCase(2, 4, 5, 4, "not-nilpotent"),
    GammaCase(3, 3, 13, 3, "not-nilpotent"),
    GammaCase(3, 3, 2, 3, "regular-orbit"),
    GammaCase(2, 5, 31, 5, "orbit", 31),
    GammaCase(2, 6, 9, 6, "orbit", 27),
    GammaCase(2, 6, 7, 6, "orbit", 21),
    GammaCase(2, 7, 127, 7, "orbit", 127),
)


def gamma_subgroups(p: int, n: int, c: int, f: int, deadline: Optional[float] = None) -> list[dict]:
    """Classes of H ≤ Γ(p^n) with |H ∩ Γ0| = c and |H : H ∩ Γ0| = f."""
    gamma, gamma0 = make_gamma(p, n)
    table = gamma.elements
    in_g0 = np.zeros(table.size, dtype=bool)
    in_g0[table.closure([table.id_of(g) for g in gamma0.generators])] = True
    subs = subgroups_up_to_conjugacy(gamma, deadline=deadline)
    out = []
    for cls in subs.classes:
        if cls.order != c * f or int(in_g0[cls.ids].sum()) != c:
            continue
        H = subs.group(cls)
        orbit_sizes = sorted(len(o) for o in orbit_partition(H))
        rep = orbit_extremes_on_module(H)
        out.append({
            "order": cls.order,
            "nilpotent": is_nilpotent(H),
            "max_orbit": rep.max_orbit_size,
            "regular_orbit": rep.max_orbit_size == cls.order,
            "orbit_sizes": orbit_sizes,
            "orbit_inequality": 2 * cls.order <= rep.max_orbit_size**2,
            "witness_point": rep.witness_point,
            "generators": format_perms(H.nontrivial_generators()),
        })
    return out


def annotation_agrees(case: GammaCase, found: dict) -> bool:
    if case.annotation == "not-nilpotent":
        return not found["nilpotent"]
    if case.annotation == "regular-orbit":
        return found["regular_orbit"]
    return found["max_orbit"] == case.orbit_size


def gamma_case_report(
    p: int, n: int, cases: Optional[Sequence[GammaCase]] = None, deadline: Optional[float] = None
) -> VerificationReport:
    """All rows for |V| = p^n; rows whose classes disagree with the annotation become findings."""
    start = time.monotonic()
    rows = [c for c in (cases if cases is not None else GAMMA_CASES) if (c.p, c.n) == (p, n)]
    findings, numbers = [], {}
    try:
        for case in rows:
            found = gamma_subgroups(p, n, case.c_order, case.quotient_order, deadline)
            agree = bool(found) and all(annotation_agrees(case, h) for h in found)
            key = f"c={case.c_order},f={case.quotient_order}"
            numbers[key] = {
                "annotation": case.annotation if case.orbit_size is None else f"orbit {case.orbit_size}",
                "classes": found,
                "agrees": agree,
            }
            if not agree:
                findings.append({"q": p**n, "c": case.c_order, "f": case.quotient_order,
                                 "annotation": numbers[key]["annotation"], "classes": found})
    except EnumerationTimeout:
        return VerificationReport("gamma-cases", {"degree": p**n}, "incomplete", numbers={"reason": "time budget exceeded"},
                                  runtime_ms=int((time.monotonic() - start) * 1000), completeness="incomplete")
    verdict = "mismatch" if findings else "pass"
    numbers["verdict"] = verdict
    numbers["value"] = len(rows)
    return VerificationReport("gamma-cases", {"degree": p**n, "p": p, "n": n}, verdict, findings, numbers,
                              int((time.monotonic() - start) * 1000), 1, "complete")


def gamma_case_fields() -> list[tuple[int, int]]:
    seen = []
    for c in GAMMA_CASES:
        if (c.p, c.n) not in seen:
            seen.append((c.p, c.n))
    return seen

"""Verifiers for the cycle-count, order and subset claims on the catalog.

Each ``verify_*`` function returns a :class:`VerificationReport`. All
inequalities are decided in exact integer arithmetic except the ones
involving β, which go through :mod:`nilorbit.bounds`.
"""

from __future__ import annotations

import time
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from nilorbit.bounds import (
    DEFAULT_CONSTANTS,
    BoundConstants,
    Truth,
    crude_twice_cycle_bound,
    cube_bound_holds,
    inequality_one,
    inequality_one_fraction,
)
from nilorbit.group import PermutationGroup, is_prime, order_profile, symmetric_group, cyclic_group
from nilorbit.perm import format_perms
from nilorbit.report import VerificationReport
from nilorbit.subgroups import (
    EnumerationTimeout,
    SubgroupList,
    largest_nilpotent_affine,
    nilpotent_subgroups,
)
from nilorbit.subsets import SubsetSearch, mask_to_set, stabilized_subset_count
from nilorbit.zoo import (
    TIER1_DEGREES,
    CatalogEntry,
    degree_tier,
    prime_power,
    solvable_primitive_catalog,
    wreath_product,
)

# Largest nilpotent subgroup orders of solvable primitive groups, as tabulated in the source.
EXPECTED_LARGEST = {4: 8, 8: 8, 9: 27, 16: 128, 25: 32, 27: 81, 32: 32, 49: 96, 64: 1024, 81: 729}
# Degrees at which inequality (1) fails with the crude cycle bound, as stated in the source.
EXPECTED_INEQUALITY_FAILURES = {4, 8, 9, 16, 27}

# Affine groups above this order get the structural largest-nilpotent computation.
FULL_ENUMERATION_LIMIT = 20000
# Degrees where the Δ search runs over the whole power set.
SUBSET_EXHAUSTIVE_LIMIT = 16

CatalogSource = Callable[[int], tuple[list[CatalogEntry], dict]]

_memo: dict[int, tuple[list[CatalogEntry], dict]] = {}


def memo_catalog(n: int) -> tuple[list[CatalogEntry], dict]:
    if n not in _memo:
        _memo[n] = solvable_primitive_catalog(n)
    return _memo[n]


def _catalog(n: int, source: Optional[CatalogSource]) -> tuple[list[CatalogEntry], dict]:
    return (source or memo_catalog)(n)


def _ms(start: float) -> int:
    return int((time.monotonic() - start) * 1000)


def _check_deadline(deadline: Optional[float]) -> None:
    if deadline is not None and time.monotonic() > deadline:
        raise EnumerationTimeout("time budget exceeded")


def subgroup_witness(entry: CatalogEntry, H: PermutationGroup, **extra) -> dict:
    out = {
        "degree": entry.degree,
        "entry_order": entry.order,
        "entry_route": entry.route,
        "subgroup_order": H.order,
        "generators": format_perms(H.nontrivial_generators()),
    }
    out.update(extra)
    return out


def _universe(n: int, meta: dict) -> dict:
    return {"degree": n, "route": meta.get("route"), "entries": meta.get("entries")}


def _incomplete_report(claim: str, n: int, start: float, reason: str) -> VerificationReport:
    return VerificationReport(
        claim, {"degree": n}, "incomplete", numbers={"reason": reason}, runtime_ms=_ms(start),
        tier=degree_tier(n), completeness="incomplete",
    )


# ---------------------------------------------------------------- cycle counts


def lemma24_counts(group: PermutationGroup, p: int) -> dict:
    """Vectorised check of the cycle-count inequalities for every g != 1."""
    n = group.degree
    table = group.elements
    nc = table.cycle_counts.astype(object)
    s = table.fixed_point_counts.astype(object)
    o = table.orders.astype(object)
    nontriv = table.orders > 1
    ineq_a = 2 * nc <= n + s
    ineq_b = o * p * nc <= (p + o - 1) * n
    ineq_c = 4 * nc <= 3 * n
    s_int = table.fixed_point_counts
    with_fixed = nontriv & (s_int > 0)
    divides = np.ones(table.size, dtype=bool)
    divides[with_fixed] = (n // p) % s_int[with_fixed] == 0
    middle = o * p * (n + s) <= 2 * (p + o - 1) * n
    fails = {
        "two_n_le_n_plus_s": nontriv & ~ineq_a.astype(bool),
        "op_n_le_bound": nontriv & ~ineq_b.astype(bool),
        "four_n_le_three_n": nontriv & ~ineq_c.astype(bool),
        "fixed_divides_n_over_p": with_fixed & ~divides,
    }
    return {
        "elements": int(nontriv.sum()),
        "fails": fails,
        "middle_link_violations": int((nontriv & ~middle.astype(bool)).sum()),
        "max_cycle_count": int(table.cycle_counts[nontriv].max()) if nontriv.any() else 0,
        "table": table,
    }


def verify_lemma24(
    n: int,
    source: Optional[CatalogSource] = None,
    deadline: Optional[float] = None,
    include_imprimitive: bool = False,
) -> VerificationReport:
    """Cycle-count inequalities for every non-identity element of every entry of degree n."""
    start = time.monotonic()
    entries, meta = _catalog(n, source)
    p = prime_power(n)[0]
    witnesses = []
    totals = {"elements": 0, "middle_link_violations": 0, "max_cycle_count": 0}
    fail_counts = {}
    try:
        for entry in entries:
            _check_deadline(deadline)
            res = lemma24_counts(entry.group, p)
            totals["elements"] += res["elements"]
            totals["middle_link_violations"] += res["middle_link_violations"]
            totals["max_cycle_count"] = max(totals["max_cycle_count"], res["max_cycle_count"])
            for name, mask in res["fails"].items():
                cnt = int(mask.sum())
                fail_counts[name] = fail_counts.get(name, 0) + cnt
                for idx in np.flatnonzero(mask)[:3]:
                    g = res["table"].perm(int(idx))
                    witnesses.append({
                        "inequality": name,
                        "entry_order": entry.order,
                        "element": str(g),
                        "cycle_count": int(res["table"].cycle_counts[idx]),
                        "fixed_points": int(res["table"].fixed_point_counts[idx]),
                        "order": int(res["table"].orders[idx]),
                    })
    except EnumerationTimeout:
        return _incomplete_report("lemma24", n, start, "time budget exceeded")
    numbers = dict(totals, failures=fail_counts, value=totals["max_cycle_count"], three_quarter_bound=Fraction(3 * n, 4))
    numbers["three_quarter_bound"] = str(numbers["three_quarter_bound"])
    if include_imprimitive:
        numbers["imprimitive"] = imprimitive_lemma24()
    failed = any(fail_counts.values())
    verdict = "fail" if failed else ("pass" if meta.get("completeness") == "complete" else "incomplete-universe")
    numbers["verdict"] = verdict
    return VerificationReport(
        "lemma24", _universe(n, meta), verdict, witnesses, numbers, _ms(start), degree_tier(n), meta.get("completeness", "complete"),
    )


def imprimitive_examples() -> list[tuple[str, PermutationGroup]]:
    """Small solvable transitive imprimitive groups built as wreath products."""
    c2, c3, s3 = cyclic_group(2), cyclic_group(3), symmetric_group(3)
    s4 = symmetric_group(4)
    return [
        ("C2 wr C2", wreath_product(c2, c2)),
        ("C2 wr S3", wreath_product(c2, s3)),
        ("S3 wr C2", wreath_product(s3, c2)),
        ("C3 wr C2", wreath_product(c3, c2)),
        ("C2 wr S4", wreath_product(c2, s4)),
        ("S3 wr S3", wreath_product(s3, s3)),
        ("S4 wr C2", wreath_product(s4, c2)),
    ]


def imprimitive_lemma24() -> list[dict]:
    """The p-free inequalities on imprimitive examples; reported, not asserted."""
    out = []
    for name, G in imprimitive_examples():
        t = G.elements
        nt = t.orders > 1
        n = G.degree
        out.append({
            "group": name,
            "degree": n,
            "elements": int(nt.sum()),
            "two_n_le_n_plus_s_failures": int((nt & (2 * t.cycle_counts > n + t.fixed_point_counts)).sum()),
            "four_n_le_three_n_failures": int((nt & (4 * t.cycle_counts > 3 * n)).sum()),
        })
    return out


# ---------------------------------------------------------------- largest nilpotent


def largest_nilpotent(n: int, entries: list[CatalogEntry], deadline: Optional[float] = None) -> dict:
    """Largest nilpotent order over the entries with all witnesses of that order."""
    p = prime_power(n)[0]
    best, witnesses, routes = 0, [], set()
    for entry in entries:
        _check_deadline(deadline)
        if entry.order <= FULL_ENUMERATION_LIMIT:
            subs = nilpotent_subgroups(entry.group, deadline=deadline)
            top = max(subs.orders())
            found = [subgroup_witness(entry, subs.group(c), route="enumeration") for c in subs.classes if c.order == top]
            routes.add("enumeration")
        else:
            top, Q = largest_nilpotent_affine(entry.group, entry.point_stabilizer(), p, deadline=deadline)
            found = [{
                "degree": n, "entry_order": entry.order, "entry_route": entry.route, "subgroup_order": top,
                "route": "structural", "p_prime_part_generators": format_perms(Q.nontrivial_generators()),
                "p_prime_part_order": Q.order,
            }]
            routes.add("structural")
        if top > best:
            best, witnesses = top, []
        if top == best:
            witnesses.extend(found)
    return {"value": best, "witnesses": witnesses, "routes": sorted(routes)}


def verify_table1(n: int, source: Optional[CatalogSource] = None, deadline: Optional[float] = None) -> VerificationReport:
    start = time.monotonic()
    entries, meta = _catalog(n, source)
    try:
        res = largest_nilpotent(n, entries, deadline)
    except EnumerationTimeout:
        return _incomplete_report("table1", n, start, "time budget exceeded")
    expected = EXPECTED_LARGEST.get(n)
    complete = meta.get("completeness") == "complete"
    if expected is not None and res["value"] != expected:
        verdict = "mismatch"
    elif not complete:
        verdict = "incomplete-universe"
    else:
        verdict = "pass"
    numbers = {"value": res["value"], "expected": expected, "routes": res["routes"], "verdict": verdict}
    return VerificationReport(
        "table1", _universe(n, meta), verdict, res["witnesses"], numbers, _ms(start), degree_tier(n), meta.get("completeness", "complete"),
    )


def verify_nilpotent_order_bounds(
    n: int, source: Optional[CatalogSource] = None, deadline: Optional[float] = None, constants: BoundConstants = DEFAULT_CONSTANTS
) -> VerificationReport:
    """|H| ≤ 2^n and |H| ≤ n^(β+1)/2 for every nilpotent class of every entry."""
    start = time.monotonic()
    entries, meta = _catalog(n, source)
    p = prime_power(n)[0]
    witnesses, checked, indeterminate = [], 0, 0
    largest = 0
    stabilizer_bound = {"checked": 0, "exceeded": 0, "nilpotent_exceeded": 0}
    try:
        for entry in entries:
            _check_deadline(deadline)
            stab_order = entry.order // n
            stab_truth = constants.within_stabilizer_bound(stab_order, n)
            stabilizer_bound["checked"] += 1
            if stab_truth is not Truth.TRUE:
                stabilizer_bound["exceeded"] += 1
                if entry.flags.is_nilpotent:
                    stabilizer_bound["nilpotent_exceeded"] += 1
            if entry.order <= FULL_ENUMERATION_LIMIT:
                subs = nilpotent_subgroups(entry.group, deadline=deadline)
                orders = [(c.order, subs, c) for c in subs.classes]
            else:
                top, _ = largest_nilpotent_affine(entry.group, entry.point_stabilizer(), p, deadline=deadline)
                orders = [(top, None, None)]
            for order, subs, cls in orders:
                checked += 1
                largest = max(largest, order)
                ok_pow = order <= 2**n
                truth = constants.within_order_bound(order, n)
                if truth is Truth.INDETERMINATE:
                    indeterminate += 1
                if not ok_pow or truth is Truth.FALSE:
                    gens = format_perms(subs.group(cls).nontrivial_generators()) if subs is not None else []
                    witnesses.append({"entry_order": entry.order, "subgroup_order": order, "generators": gens,
                                      "power_of_two_bound": ok_pow, "beta_bound": truth.value})
    except EnumerationTimeout:
        return _incomplete_report("lemma25", n, start, "time budget exceeded")
    if witnesses:
        verdict = "fail"
    elif indeterminate:
        verdict = "indeterminate"
    elif meta.get("completeness") != "complete":
        verdict = "incomplete-universe"
    else:
        verdict = "pass"
    numbers = {
        "classes_checked": checked,
        "value": largest,
        "expected": EXPECTED_LARGEST.get(n),
        "indeterminate": indeterminate,
        "stabilizer_bound_informational": stabilizer_bound,
        "verdict": verdict,
    }
    return VerificationReport(
        "lemma25", _universe(n, meta), verdict, witnesses, numbers, _ms(start), degree_tier(n), meta.get("completeness", "complete"),
    )


# ---------------------------------------------------------------- subset theorem


def _nontrivial_nilpotent(entry: CatalogEntry, deadline) -> tuple[SubgroupList, list]:
    subs = nilpotent_subgroups(entry.group, deadline=deadline)
    return subs, [c for c in subs.classes if c.order > 1]


def subset_theorem_entry(entry: CatalogEntry, deadline: Optional[float] = None) -> dict:
    """Every nontrivial nilpotent class and every Λ with |Λ| ≤ k, for one entry."""
    n = entry.degree
    subs, classes = _nontrivial_nilpotent(entry, deadline)
    failures, tight = [], []
    tested = 0
    route = "exhaustive" if n <= SUBSET_EXHAUSTIVE_LIMIT else "inequality"
    table = entry.group.elements
    for cls in classes:
        _check_deadline(deadline)
        H = subs.group(cls)
        k = (cls.order - 1).bit_length()
        if route == "exhaustive":
            res = SubsetSearch(H).check_all(k)
            tested += res["tested"]
            lam = res["tightest_lambda"]
            search_index = res["tightest_index"]
            slack = Fraction(search_index**2 * 2 ** res["tightest_m"], 2 * cls.order)
            record = {"subgroup_order": cls.order, "k": k, "lambda": sorted(mask_to_set(lam)),
                      "index": search_index, "m": res["tightest_m"], "slack": str(slack),
                      "generators": format_perms(H.nontrivial_generators())}
            tight.append((slack, record))
            if res["failure_count"]:
                failures.append(dict(record, failing_lambdas=[sorted(mask_to_set(x)) for x in res["failures"]],
                                     failure_count=res["failure_count"]))
        else:
            ids = cls.ids[cls.ids != table.identity]
            max_nc = int(table.cycle_counts[ids].max())
            ok = inequality_one(cls.order, n, 2 * max_nc)
            tested += 1
            record = {"subgroup_order": cls.order, "max_cycle_count": max_nc, "inequality_one": ok,
                      "generators": format_perms(H.nontrivial_generators())}
            slack = Fraction(2 ** (2 * n), cls.order**3 * 2 ** (2 * max_nc))
            tight.append((slack, record))
            if not ok:
                failures.append(record)
    tight.sort(key=lambda t: (t[0], t[1]["subgroup_order"]))
    return {"route": route, "classes": len(classes), "tested": tested, "failures": failures,
            "hardest": [r for _, r in tight[:3]]}


def verify_subset_theorem(n: int, source: Optional[CatalogSource] = None, deadline: Optional[float] = None) -> VerificationReport:
    start = time.monotonic()
    entries, meta = _catalog(n, source)
    per_entry, witnesses = [], []
    try:
        for entry in entries:
            res = subset_theorem_entry(entry, deadline)
            per_entry.append({"entry_order": entry.order, "route": res["route"], "classes": res["classes"],
                              "tested": res["tested"], "hardest": res["hardest"]})
            witnesses.extend(dict(f, entry_order=entry.order) for f in res["failures"])
    except EnumerationTimeout:
        return _incomplete_report("thmperm2", n, start, "time budget exceeded")
    if witnesses:
        verdict = "fail"
    elif meta.get("completeness") != "complete":
        verdict = "incomplete-universe"
    else:
        verdict = "pass"
    numbers = {"entries": per_entry, "value": sum(e["classes"] for e in per_entry), "verdict": verdict}
    if n == 27:
        numbers["order_81_case"] = degree27_case(source).numbers
    tier = 1 if n in (2, 3, 4, 5, 7, 8, 9, 11) else 2
    return VerificationReport("thmperm2", _universe(n, meta), verdict, witnesses, numbers, _ms(start), tier,
                              meta.get("completeness", "complete"))


def _is_elementary_abelian_normal(ids: np.ndarray, table, within: np.ndarray) -> bool:
    """ids form an abelian subgroup of exponent p, normalised by every element of ``within``."""
    members = np.zeros(table.size, dtype=bool)
    members[ids] = True
    for x in within.tolist():
        if not members[table.conj(ids, x)].all():
            return False
    for a in ids.tolist():
        if not np.array_equal(table.mul(a, ids), table.mul(ids, a)):
            return False
    return True


def degree27_case(source: Optional[CatalogSource] = None) -> VerificationReport:
    """The order-81 nilpotent class at degree 27, checked through inequality (1)."""
    start = time.monotonic()
    entries, meta = _catalog(27, source)
    found, others_ok, others_max = [], True, 0
    witnesses = []
    for index, entry in enumerate(entries):
        subs, classes = _nontrivial_nilpotent(entry, None)
        table = entry.group.elements
        for cls in classes:
            if cls.order == 81:
                H = subs.group(cls)
                hid = cls.ids
                orders = table.orders[hid]
                nc3 = table.cycle_counts[hid][orders == 3]
                # a normal elementary abelian subgroup of order 27 with cyclic quotient of order 3
                ht = H.elements
                sub27 = [c for c in nilpotent_subgroups(H).classes if c.order == 27 and c.class_size == 1]
                base = any(
                    bool(np.all(ht.orders[c.ids] <= 3)) and _is_elementary_abelian_normal(c.ids, ht, np.arange(ht.size))
                    for c in sub27
                )
                found.append({
                    "entry_index": index,
                    "entry_order": entry.order,
                    "profile": order_profile(H),
                    "max_cycle_count_order3": int(nc3.max()),
                    "order3_elements": int(nc3.size),
                    "has_normal_c3_cubed": base,
                    "subset_count": stabilized_subset_count(H),
                    "generators": format_perms(H.nontrivial_generators()),
                })
            else:
                others_max = max(others_max, cls.order)
                crude = crude_twice_cycle_bound(27, 3)
                if not inequality_one_fraction(cls.order, 27, crude):
                    others_ok = False
                    witnesses.append({"entry_order": entry.order, "subgroup_order": cls.order})
    per_entry_unique = all(sum(1 for f in found if f["entry_index"] == i) <= 1 for i in range(len(entries)))
    hand = 81**3 * (2**15) ** 2 <= 2 ** (2 * 27)
    profile_ok = all(f["profile"] == {1: 1, 3: 44, 9: 36} for f in found)
    cycles_ok = all(f["max_cycle_count_order3"] <= 15 for f in found)
    structure_ok = all(f["has_normal_c3_cubed"] for f in found)
    count_ok = all(f["subset_count"] <= 80 * 2**15 for f in found)
    ok = bool(found) and hand and profile_ok and cycles_ok and structure_ok and others_ok and others_max <= 27 and per_entry_unique and count_ok
    numbers = {
        "order_81_classes": found,
        "one_class_per_entry": per_entry_unique,
        "other_classes_max_order": others_max,
        "others_satisfy_inequality_one": others_ok,
        "hand_inequality": hand,
        "hand_inequality_lhs": 81**3 * 2**30,
        "hand_inequality_rhs": 2**54,
    }
    if not ok and not witnesses:
        witnesses.append({"found": found})
    return VerificationReport("thmperm2-degree27", {"degree": 27}, "pass" if ok else "fail", witnesses, numbers,
                              _ms(start), 1, meta.get("completeness", "complete"))


# ---------------------------------------------------------------- global inequalities


def verify_global_inequalities(
    largest: dict[int, int],
    upper: int = 4096,
    constants: BoundConstants = DEFAULT_CONSTANTS,
    completeness: str = "complete",
    tier: int = 1,
) -> VerificationReport:
    """The asymptotic scans and the inequality-(1) failure set for the given largest orders."""
    start = time.monotonic()
    witnesses = []
    truths = {n: constants.order_bound_vs_power_of_two(n, Fraction(n, 6)) for n in range(2, upper + 1)}
    indeterminate = sorted(n for n, t in truths.items() if t is Truth.INDETERMINATE)
    failing = [n for n, t in truths.items() if t is not Truth.TRUE]
    threshold = (max(failing) + 1) if failing else 2
    holds_from_97 = all(truths[n] is Truth.TRUE for n in range(97, upper + 1))
    if not holds_from_97:
        witnesses.append({"scan": "beta", "failing_at_or_above_97": [n for n in failing if n >= 97][:10]})
    primes = [n for n in range(13, upper + 1) if is_prime(n)]
    cube_fail = [n for n in primes if not cube_bound_holds(n)]
    cube_refuted_at_11 = not cube_bound_holds(11)
    if cube_fail:
        witnesses.append({"scan": "cube", "failing_primes": cube_fail[:10]})
    crude_fail, three_quarter_fail = set(), set()
    per_degree = {}
    for n, h in sorted(largest.items()):
        p = prime_power(n)[0]
        crude = crude_twice_cycle_bound(n, p)
        ok = inequality_one_fraction(h, n, crude)
        ok34 = inequality_one_fraction(h, n, Fraction(3 * n, 2))
        per_degree[n] = {"largest": h, "crude_bound_holds": ok, "three_quarter_bound_holds": ok34}
        if not ok:
            crude_fail.add(n)
        if not ok34:
            three_quarter_fail.add(n)
    set_matches = crude_fail == EXPECTED_INEQUALITY_FAILURES
    if not set_matches:
        witnesses.append({"scan": "inequality_one", "failing_degrees": sorted(crude_fail)})
    numbers = {
        "beta_threshold": threshold,
        "beta_holds_97_to_upper": holds_from_97,
        "beta_indeterminate": indeterminate,
        "beta_failures_below_97": [n for n in failing if n < 97][-5:],
        "cube_fail_primes_13_to_upper": cube_fail,
        "cube_refuted_at_11": cube_refuted_at_11,
        "cube_values_at_11": [11**3, 2**10],
        "inequality_one": per_degree,
        "inequality_one_failures": sorted(crude_fail),
        "inequality_one_failures_three_quarter": sorted(three_quarter_fail),
        "upper": upper,
    }
    if indeterminate:
        verdict = "indeterminate"
    elif not (holds_from_97 and not cube_fail and cube_refuted_at_11 and set_matches):
        verdict = "fail"
        if not witnesses:
            witnesses.append({"scan": "cube", "refuted_at_11": cube_refuted_at_11})
    else:
        verdict = "pass"
    return VerificationReport("inequalities", {"scan": [2, upper], "degrees": sorted(largest)}, verdict, witnesses,
                              numbers, _ms(start), tier, completeness)

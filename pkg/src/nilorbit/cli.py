"""Command-line driver: catalogs, verification runs and report rendering.

Exit codes: 0 all verdicts pass, 1 some fail or mismatch, 2 configuration
error, 3 a requested degree (or run) could not be completed at its tier.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from nilorbit.group import is_prime
from nilorbit.report import VerificationReport, combine, read_reports, render_csv, render_text, write_report
from nilorbit.zoo import (
    MAX_DEGREE,
    TIER1_DEGREES,
    TIER2_DEGREES,
    CatalogCache,
    CatalogError,
    default_cache_dir,
    degree_tier,
    prime_power,
)

log = logging.getLogger("nilorbit")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_INCOMPLETE = 0, 1, 2, 3

CLAIMS = ("table1", "lemma24", "lemma25", "thmperm2", "inequalities", "gamma-cases", "main-theorems")

# Per-claim degrees: (tier-1 defaults, extra degrees allowed at tier 2).
CLAIM_DEGREES = {
    "table1": ((4, 8, 9, 25, 27, 32), (16, 49, 64, 81)),
    "lemma24": (TIER1_DEGREES, TIER2_DEGREES),
    "lemma25": (TIER1_DEGREES, TIER2_DEGREES),
    "thmperm2": ((2, 3, 4, 5, 7, 8, 9, 11), (16, 25, 27, 32)),
    "inequalities": ((4, 8, 9, 16, 25, 27, 32, 49), (64, 81)),
    "gamma-cases": ((4, 8, 9, 16, 27, 32, 64, 128), ()),
    "main-theorems": ((), ()),
}
MAIN_THEOREM_TASKS = ("GL(2,2)", "GL(2,3)", "GL(3,2)", "GL(2,5)", "GL(3,3)", "direct-sums")


class ConfigError(Exception):
    def __init__(self, message: str, code: int = EXIT_CONFIG):
        super().__init__(message)
        self.code = code


@dataclass
class RunConfig:
    claims: list[str]
    degrees: Optional[list[int]] = None
    tier: int = 1
    cache_dir: Path = field(default_factory=default_cache_dir)
    jobs: int = 1
    out: Optional[Path] = None
    csv: Optional[Path] = None
    max_seconds: Optional[float] = None
    imprimitive: bool = False

    def __post_init__(self):
        if self.jobs < 1:
            raise ConfigError("--jobs must be at least 1")
        if self.tier not in (1, 2):
            raise ConfigError("--tier must be 1 or 2")
        for c in self.claims:
            if c not in CLAIMS:
                raise ConfigError(f"unknown claim {c!r}; choose from {', '.join(CLAIMS)}")


def parse_degrees(text: Optional[str]) -> Optional[list[int]]:
    if text is None:
        return None
    try:
        return sorted({int(x) for x in text.replace(" ", "").split(",") if x})
    except ValueError as exc:
        raise ConfigError(f"bad degree list {text!r}") from exc


def claim_degrees(claim: str, config: RunConfig) -> list[int]:
    """Degrees to run for a claim, validated against the tier."""
    tier1, tier2 = CLAIM_DEGREES[claim]
    if config.degrees is None:
        return sorted(set(tier1) | (set(tier2) if config.tier == 2 else set()))
    allowed1 = set(tier1)
    if claim in ("lemma24", "lemma25", "table1"):
        allowed1 |= {n for n in range(2, MAX_DEGREE + 1) if is_prime(n)}
    allowed = allowed1 | (set(tier2) if config.tier == 2 else set())
    for n in config.degrees:
        if claim == "gamma-cases":
            if prime_power(n) is None:
                raise ConfigError(f"|V| = {n} is not a prime power")
            continue
        if n < 2 or prime_power(n) is None:
            raise ConfigError(f"degree {n} is not a prime power: no solvable primitive groups exist")
        if n in allowed:
            continue
        if n in tier2:
            raise ConfigError(f"degree {n} is tier 2 only for {claim}; rerun with --tier 2", EXIT_INCOMPLETE)
        raise ConfigError(f"degree {n} is not supported for {claim}")
    return list(config.degrees)


def plan_tasks(config: RunConfig) -> list[tuple[str, str]]:
    tasks = []
    for claim in config.claims:
        if claim == "main-theorems":
            tasks.extend((claim, key) for key in MAIN_THEOREM_TASKS)
        elif claim == "inequalities":
            degs = claim_degrees(claim, config)
            tasks.append((claim, ",".join(map(str, degs))))
        else:
            tasks.extend((claim, str(n)) for n in claim_degrees(claim, config))
    return tasks


def needed_catalog_degrees(tasks: Sequence[tuple[str, str]]) -> list[int]:
    degs = set()
    for claim, key in tasks:
        if claim in ("table1", "lemma24", "lemma25", "thmperm2"):
            degs.add(int(key))
        elif claim == "inequalities":
            degs |= {int(x) for x in key.split(",") if x}
    return sorted(degs)


def run_task(claim: str, key: str, cache_dir: str, max_seconds: Optional[float], imprimitive: bool = False) -> dict:
    """One unit of work; a pure function of its arguments (safe in a worker process)."""
    from nilorbit import modverify, verify

    deadline = time.monotonic() + max_seconds if max_seconds else None
    cache = CatalogCache(cache_dir)
    source = lambda n: cache.get(n, build=True)  # noqa: E731
    if claim == "table1":
        rep = verify.verify_table1(int(key), source, deadline)
    elif claim == "lemma24":
        rep = verify.verify_lemma24(int(key), source, deadline, include_imprimitive=imprimitive)
    elif claim == "lemma25":
        rep = verify.verify_nilpotent_order_bounds(int(key), source, deadline)
    elif claim == "thmperm2":
        rep = verify.verify_subset_theorem(int(key), source, deadline)
    elif claim == "inequalities":
        degs = [int(x) for x in key.split(",") if x]
        largest, complete = {}, True
        for n in degs:
            part = verify.verify_table1(n, source, deadline)
            if part.verdict == "incomplete":
                return part.to_json()
            largest[n] = part.numbers["value"]
            complete &= part.completeness == "complete"
        tier = max((degree_tier(n) for n in degs), default=1)
        rep = verify.verify_global_inequalities(largest, completeness="complete" if complete else "incomplete", tier=tier)
    elif claim == "gamma-cases":
        p, n = prime_power(int(key))
        rep = modverify.gamma_case_report(p, n, deadline=deadline)
    elif claim == "main-theorems":
        if key == "direct-sums":
            mods = modverify.direct_sum_pairs()
        else:
            d, p = (int(x) for x in key[3:-1].split(","))
            mods = modverify.irreducible_solvable_subgroups(d, p)
        rep = modverify.verify_main_theorems(mods, deadline, universe={"modules": key})
    else:  # pragma: no cover - validated earlier
        raise ConfigError(f"unknown claim {claim}")
    return rep.to_json()


def execute(config: RunConfig) -> tuple[list[VerificationReport], int]:
    tasks = plan_tasks(config)
    cache = CatalogCache(config.cache_dir)
    for n in needed_catalog_degrees(tasks):
        cache.get(n)
    args = [(c, k, str(config.cache_dir), config.max_seconds, config.imprimitive) for c, k in tasks]
    if config.jobs == 1 or len(args) <= 1:
        results = [run_task(*a) for a in args]
    else:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(run_task, *zip(*args)))
    by_claim: dict[str, list[VerificationReport]] = {}
    for (claim, _), data in zip(tasks, results):
        by_claim.setdefault(claim, []).append(VerificationReport.from_json(data))
    reports = []
    for claim in config.claims:
        parts = by_claim.get(claim, [])
        if claim in ("inequalities",) and len(parts) == 1:
            reports.append(parts[0])
        else:
            reports.append(combine(claim, parts))
    return reports, exit_code(reports, config)


def exit_code(reports: Sequence[VerificationReport], config: RunConfig) -> int:
    verdicts = set()
    for r in reports:
        verdicts.add(r.verdict)
        for nums in r.numbers.values():
            if isinstance(nums, dict) and "verdict" in nums:
                verdicts.add(nums["verdict"])
    if verdicts & {"fail", "mismatch"}:
        return EXIT_FAIL
    if "incomplete" in verdicts or "indeterminate" in verdicts:
        return EXIT_INCOMPLETE
    if "incomplete-universe" in verdicts and config.tier == 1:
        return EXIT_INCOMPLETE
    return EXIT_OK


def _emit(reports: list[VerificationReport], config: RunConfig) -> None:
    if config.out:
        data = [r.to_json() for r in reports]
        Path(config.out).parent.mkdir(parents=True, exist_ok=True)
        Path(config.out).write_text(json.dumps(data[0] if len(data) == 1 else data, sort_keys=True, indent=1) + "\n")
    if config.csv:
        Path(config.csv).write_text(render_csv(reports))
    sys.stdout.write(render_text(reports))


def cmd_verify(ns) -> int:
    config = RunConfig(
        claims=[ns.claim] if ns.claim != "all" else list(CLAIMS),
        degrees=parse_degrees(ns.degrees),
        tier=ns.tier,
        cache_dir=Path(ns.cache) if ns.cache else default_cache_dir(),
        jobs=ns.jobs,
        out=Path(ns.out) if ns.out else None,
        csv=Path(ns.csv) if ns.csv else None,
        max_seconds=ns.max_seconds,
        imprimitive=ns.imprimitive,
    )
    reports, code = execute(config)
    _emit(reports, config)
    return code


def cmd_catalog(ns) -> int:
    cache = CatalogCache(Path(ns.cache) if ns.cache else None)
    if ns.action == "build":
        degrees = parse_degrees(ns.degrees)
        if degrees is None:
            degrees = list(TIER1_DEGREES) + (list(TIER2_DEGREES) if ns.tier == 2 else [])
        for n in degrees:
            if n < 2 or prime_power(n) is None:
                raise ConfigError(f"degree {n} is not a prime power: no solvable primitive groups exist")
            if ns.tier == 1 and n in TIER2_DEGREES:
                raise ConfigError(f"degree {n} is tier 2 only; rerun with --tier 2", EXIT_INCOMPLETE)
        for n in degrees:
            entries, meta = cache.get(n)
            log.info("degree %d: %d entries (%s)", n, len(entries), meta["completeness"])
        sys.stdout.write(f"group constructions: {cache.constructions}\n")
    man = cache.manifest()
    sys.stdout.write(f"{'degree':>6}  {'entries':>7}  {'tier':>4}  {'completeness':<12}  route\n")
    for key in sorted(man["degrees"], key=int):
        meta = man["degrees"][key]["meta"]
        sys.stdout.write(f"{key:>6}  {meta['entries']:>7}  {meta['tier']:>4}  {meta['completeness']:<12}  {meta['route']}\n")
    return EXIT_OK


def cmd_report(ns) -> int:
    reports = read_reports(ns.file)
    if ns.csv:
        Path(ns.csv).write_text(render_csv(reports))
    sys.stdout.write(render_text(reports))
    return exit_code(reports, RunConfig(claims=[]))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nilorbit", description="Verify orbit and order bounds for nilpotent subgroups.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run one claim (or 'all')")
    v.add_argument("claim", choices=CLAIMS + ("all",))
    v.add_argument("--degrees")
    v.add_argument("--tier", type=int, default=1)
    v.add_argument("--cache")
    v.add_argument("--out")
    v.add_argument("--csv")
    v.add_argument("--jobs", type=int, default=1)
    v.add_argument("--max-seconds", type=float, dest="max_seconds")
    v.add_argument("--imprimitive", action="store_true", help="also report cycle counts on imprimitive wreath products")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("catalog", help="build or list cached catalogs")
    c.add_argument("action", choices=("build", "list"))
    c.add_argument("--degrees")
    c.add_argument("--tier", type=int, default=1)
    c.add_argument("--cache")
    c.set_defaults(func=cmd_catalog)

    r = sub.add_parser("report", help="render saved reports")
    r.add_argument("action", choices=("render",))
    r.add_argument("file")
    r.add_argument("--csv")
    r.set_defaults(func=cmd_report)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return ns.func(ns)
    except ConfigError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return exc.code
    except (CatalogError, OSError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

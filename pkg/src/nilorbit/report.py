"""Verification reports: JSON documents plus a CSV/text summary."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Iterable, Union

VERDICTS = ("pass", "fail", "mismatch", "indeterminate", "incomplete-universe", "incomplete")
SCHEMA_KEYS = ("claim", "universe", "verdict", "witnesses", "numbers", "runtime_ms", "tier", "completeness")


class ReportError(ValueError):
    pass


@dataclass
class VerificationReport:
    claim: str
    universe: dict
    verdict: str
    witnesses: list = field(default_factory=list)
    numbers: dict = field(default_factory=dict)
    runtime_ms: int = 0
    tier: int = 1
    completeness: str = "complete"

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ReportError(f"unknown verdict {self.verdict!r}")
        if self.verdict == "fail" and not self.witnesses:
            raise ReportError("a fail verdict needs a counterexample witness")

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_json(self) -> dict:
        return _jsonable(asdict(self))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=1) + "\n"

    @classmethod
    def from_json(cls, data: dict) -> VerificationReport:
        missing = [k for k in SCHEMA_KEYS if k not in data]
        if missing:
            raise ReportError(f"report is missing {missing}")
        return cls(**{k: data[k] for k in SCHEMA_KEYS})


def _jsonable(x: Any) -> Any:
    """Big integers become decimal strings when they exceed 2^53; sets become sorted lists."""
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, int):
        return str(x) if abs(x) > 2**53 else x
    if isinstance(x, float):
        return x
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (set, frozenset)):
        return [_jsonable(v) for v in sorted(x)]
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if hasattr(x, "item"):
        return _jsonable(x.item())
    return str(x)


def combine(claim: str, parts: list[VerificationReport], universe: dict | None = None) -> VerificationReport:
    """Merge per-degree reports of one claim into one, worst verdict first."""
    order = {"fail": 0, "mismatch": 1, "indeterminate": 2, "incomplete": 3, "incomplete-universe": 4, "pass": 5}
    parts = sorted(parts, key=lambda r: json.dumps(r.universe, sort_keys=True))
    verdict = min((r.verdict for r in parts), key=order.__getitem__, default="pass")
    witnesses = [w for r in parts for w in r.witnesses]
    numbers = {_part_key(r): dict(r.numbers, tier=r.tier, completeness=r.completeness) for r in parts}
    completeness = "complete" if all(r.completeness == "complete" for r in parts) else "incomplete"
    return VerificationReport(
        claim=claim,
        universe=universe or {"parts": [r.universe for r in parts]},
        verdict=verdict,
        witnesses=witnesses,
        numbers=numbers,
        runtime_ms=sum(r.runtime_ms for r in parts),
        tier=max((r.tier for r in parts), default=1),
        completeness=completeness,
    )


def _part_key(r: VerificationReport) -> str:
    if "degree" in r.universe:
        return f"degree {r.universe['degree']}"
    return json.dumps(r.universe, sort_keys=True)


def normalized(report: Union[dict, VerificationReport]) -> str:
    """JSON text with runtime fields zeroed, for determinism comparisons."""
    data = report.to_json() if isinstance(report, VerificationReport) else dict(report)

    def strip(x):
        if isinstance(x, dict):
            return {k: (0 if k in ("runtime_ms", "seconds") else strip(v)) for k, v in x.items()}
        if isinstance(x, list):
            return [strip(v) for v in x]
        return x

    return json.dumps(strip(data), sort_keys=True)


def write_report(report: VerificationReport, path: Union[str, Path]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report.dumps())


def read_reports(path: Union[str, Path]) -> list[VerificationReport]:
    data = json.loads(Path(path).read_text())
    items = data if isinstance(data, list) else [data]
    return [VerificationReport.from_json(d) for d in items]


CSV_HEADER = ["degree", "claim", "verdict", "tier", "completeness", "value"]


def summary_rows(reports: Iterable[VerificationReport]) -> list[list[str]]:
    rows = []
    for r in reports:
        per = r.numbers if r.numbers and all(k.startswith("degree ") for k in r.numbers) else None
        if per:
            for key, nums in per.items():
                deg = key.split()[1]
                verdict = nums.get("verdict", r.verdict) if isinstance(nums, dict) else r.verdict
                value = nums.get("value", "") if isinstance(nums, dict) else ""
                tier = nums.get("tier", r.tier) if isinstance(nums, dict) else r.tier
                comp = nums.get("completeness", r.completeness) if isinstance(nums, dict) else r.completeness
                rows.append([deg, r.claim, _mark(verdict), str(tier), comp, str(value)])
        else:
            rows.append(["", r.claim, _mark(r.verdict), str(r.tier), r.completeness, ""])
    rows.sort(key=lambda row: (row[1], int(row[0]) if row[0] else -1))
    return rows


def _mark(verdict: str) -> str:
    return {"pass": "PASS", "fail": "FAIL", "mismatch": "MISMATCH"}.get(verdict, verdict.upper())


def render_csv(reports: Iterable[VerificationReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    w.writerows(summary_rows(reports))
    return buf.getvalue()


def render_text(reports: Iterable[VerificationReport]) -> str:
    """Fixed-width text: a two-column (n, largest |H|) block per table1 report, then the summary rows."""
    reports = list(reports)
    out = []
    for r in reports:
        if r.claim == "table1":
            out.append(f"{'n':>4}  {'largest |H|':>12}")
            for key, nums in sorted(r.numbers.items(), key=lambda kv: int(kv[0].split()[1])):
                out.append(f"{key.split()[1]:>4}  {str(nums['value']):>12}")
            out.append("")
    rows = summary_rows(reports)
    widths = [max(len(h), *(len(row[i]) for row in rows)) if rows else len(h) for i, h in enumerate(CSV_HEADER)]
    out.append("  ".join(h.ljust(w) for h, w in zip(CSV_HEADER, widths)).rstrip())
    for row in rows:
        out.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
    return "\n".join(out) + "\n"

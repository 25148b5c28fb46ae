"""Structured pass/fail reports with deterministic JSON serialization."""

from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass
class LawCheck:
    """Result of one checked law or property."""

    law: str
    cases: int
    passed: bool
    counterexample: dict | None = None
    mode: str = "exhaustive"
    skipped: int = 0

    def to_dict(self) -> dict:
        out = {
            "law": self.law,
            "cases": self.cases,
            "passed": self.passed,
            "mode": self.mode,
        }
        if self.skipped:
            out["skipped"] = self.skipped
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        return out


@dataclass
class Report:
    """A named group of law checks plus the configuration that produced it."""

    name: str
    config: dict = field(default_factory=dict)
    results: list[LawCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def cases(self) -> int:
        return sum(r.cases for r in self.results)

    def add(self, law: str, cases: int, counterexample=None, mode="exhaustive", skipped=0):
        self.results.append(
            LawCheck(law, cases, counterexample is None, counterexample, mode, skipped)
        )

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "config": self.config,
            "passed": self.passed,
            "results": [r.to_dict() for r in sorted(self.results, key=lambda r: r.law)],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def merge_reports(name: str, reports: list[Report], config: dict | None = None) -> Report:
    """Flatten sub-reports into one, prefixing law names with the source name."""
    merged = Report(name, config or {})
    for rep in reports:
        for r in rep.results:
            merged.results.append(
                LawCheck(
                    f"{rep.name}.{r.law}",
                    r.cases,
                    r.passed,
                    r.counterexample,
                    r.mode,
                    r.skipped,
                )
            )
    return merged

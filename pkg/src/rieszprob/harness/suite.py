"""Running properties over seeded trials and assembling the report."""

from __future__ import annotations

import json
import time
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

from .config import SuiteConfig
from .instances import trial_rng
from .properties import PROPERTIES

MAX_RECORDED_FAILURES = 25


@dataclass(frozen=True)
class TrialOutcome:
    property_id: str
    trial: int
    passed: bool
    checks: int
    failure: Optional[dict] = None


def run_trial(cfg: SuiteConfig, property_id: str, trial: int) -> TrialOutcome:
    """Run one property on the instance drawn for ``trial``."""
    prop = PROPERTIES[property_id]
    rng = trial_rng(cfg.seed, property_id, trial)
    base = {"property": property_id, "trial": trial, "seed": cfg.seed}
    try:
        descriptor, reports = prop.run(rng, cfg)
    except Exception as exc:  # a raised domain error is a failed trial, not a crash
        base.update(error=f"{type(exc).__name__}: {exc}", traceback=traceback.format_exc(limit=3))
        return TrialOutcome(property_id, trial, False, 0, base)
    failed = [r for r in reports if not r.holds]
    if not failed:
        return TrialOutcome(property_id, trial, True, len(reports))
    worst = min(failed, key=lambda r: r.normalized_margin())
    base.update(instance=descriptor, check=worst.to_dict(), failed_checks=len(failed))
    return TrialOutcome(property_id, trial, False, len(reports), base)


def _run_property(cfg: SuiteConfig, property_id: str) -> List[TrialOutcome]:
    return [run_trial(cfg, property_id, i) for i in range(cfg.trials)]


@dataclass
class SuiteReport:
    config: dict
    results: List[dict]
    wall_time: float = field(default=0.0, compare=False)

    @property
    def failures(self) -> int:
        return sum(r["failures"] for r in self.results)

    @property
    def ok(self) -> bool:
        return self.failures == 0

    def to_dict(self) -> dict:
        return {"config": self.config, "properties": self.results, "all_passed": self.ok}

    def to_json(self) -> str:
        # timing is excluded so identical runs give identical bytes
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"

    def summary_lines(self) -> List[str]:
        lines = []
        for r in self.results:
            status = "PASS" if r["failures"] == 0 else "FAIL"
            lines.append(f"{status} {r['id']}: {r['passes']}/{r['trials']} trials, {r['checks']} checks")
        return lines


def run_suite(cfg: SuiteConfig, properties: Optional[Sequence[str]] = None) -> SuiteReport:
    """Run every selected property ``cfg.trials`` times.

    Trials draw from independent streams keyed by (seed, property, trial),
    so the report is the same for any ``cfg.workers``.
    """
    start = time.perf_counter()
    ids = list(properties or cfg.properties or PROPERTIES)
    if cfg.workers > 1 and cfg.trials > 0:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            outcomes = list(pool.map(_run_property, [cfg] * len(ids), ids))
    else:
        outcomes = [_run_property(cfg, pid) for pid in ids]
    results = []
    for pid, outs in zip(ids, outcomes):
        fails = [o.failure for o in outs if not o.passed]
        results.append(
            {
                "id": pid,
                "statement": PROPERTIES[pid].statement,
                "trials": len(outs),
                "passes": sum(o.passed for o in outs),
                "failures": len(fails),
                "checks": sum(o.checks for o in outs),
                "failure_records": fails[:MAX_RECORDED_FAILURES],
            }
        )
    echo = cfg.to_dict()
    echo.pop("workers")
    return SuiteReport(echo, results, time.perf_counter() - start)


def replay(record: Dict, cfg: Optional[SuiteConfig] = None) -> TrialOutcome:
    """Re-run the trial behind a failure record from a report."""
    cfg = cfg or SuiteConfig(seed=record["seed"], trials=1)
    return run_trial(cfg.replace(seed=record["seed"]), record["property"], record["trial"])

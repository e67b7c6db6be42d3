"""Run the numerical self-check suite behind ``spantrellis verify``."""

import json
import logging
from pathlib import Path

from .core._checks import CheckSelector, central_differences, relative_error
from .core.main import CHECKS, CheckName, CheckResult, VerifyConfig, VerifyReport

logger = logging.getLogger(__name__)

__all__ = [
    "CHECKS",
    "CheckName",
    "CheckResult",
    "VerifyConfig",
    "VerifyReport",
    "central_differences",
    "relative_error",
    "run_checks",
    "write_verify_report",
]


def run_checks(config: VerifyConfig | None = None, names: list[CheckName] | None = None) -> VerifyReport:
    """Run the named checks (all by default) in order.

    Raises:
        ValueError: If a name is not a known check.
    """
    config = config or VerifyConfig()
    selector = CheckSelector(config)
    checks = [selector.select(name) for name in (names or CHECKS)]
    results = []
    for check in checks:
        result = check.run()
        log = logger.info if result.passed else logger.error
        log("%s: %s (%s) in %.2fs", result.check, "pass" if result.passed else "FAIL", result.detail, result.seconds)
        results.append(result)
    return VerifyReport(results)


def write_verify_report(report: VerifyReport, out_dir: str | Path) -> Path:
    """Write verify.csv and verify.json; returns the JSON path."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    table = report.to_frame()
    table.to_csv(out_dir / "verify.csv", index=False)
    path = out_dir / "verify.json"
    payload = {
        "verdict": "pass" if report.passed else "fail",
        "checks": [
            {**row, "value": None if row["value"] == float("inf") else row["value"]}
            for row in table.to_dict(orient="records")
        ],
    }
    path.write_text(json.dumps(payload, indent=2), encoding="utf-8")
    return path

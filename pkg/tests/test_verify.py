import json

import numpy as np
import pandas as pd
import pytest

from spantrellis.verify.core.main import RESULT_COLUMNS
from spantrellis.verify.main import CHECKS, VerifyConfig, relative_error, run_checks, write_verify_report

FAST_CHECKS = ["enumeration", "duality", "loss-algebra", "lattice-gradients", "decoder-exactness", "round-trips", "metric-contracts"]


@pytest.fixture(scope="module")
def quick() -> VerifyConfig:
    return VerifyConfig.quick(seed=0)


@pytest.mark.parametrize("name", FAST_CHECKS)
def test_fast_checks_pass(quick, name):
    (result,) = run_checks(quick, [name]).results
    assert result.check == name
    assert result.passed, result.detail
    assert result.cases >= 1
    assert result.value <= result.threshold


def test_segment_uniformity_reports_a_p_value(quick):
    (result,) = run_checks(quick, ["segment-uniformity"]).results
    assert result.cases == 2000
    assert 0.0 <= result.value <= 1.0


def test_checks_are_reproducible(quick):
    first = run_checks(quick, ["enumeration", "decoder-exactness"]).to_frame()
    second = run_checks(quick, ["enumeration", "decoder-exactness"]).to_frame()
    pd.testing.assert_frame_equal(first.drop(columns="seconds"), second.drop(columns="seconds"))


def test_unknown_check(quick):
    with pytest.raises(ValueError, match="Invalid check"):
        run_checks(quick, ["monotonicity"])


def test_invalid_case_counts():
    with pytest.raises(ValueError, match="lattices"):
        VerifyConfig(lattices=0)


def test_report_files(tmp_path, quick):
    report = run_checks(quick, ["enumeration", "metric-contracts"])
    path = write_verify_report(report, tmp_path / "verify")

    record = json.loads(path.read_text(encoding="utf-8"))
    assert record["verdict"] == "pass"
    assert [c["check"] for c in record["checks"]] == ["enumeration", "metric-contracts"]
    table = pd.read_csv(tmp_path / "verify" / "verify.csv")
    assert list(table.columns) == RESULT_COLUMNS


@pytest.mark.slow
def test_quick_suite_runs_every_check(quick):
    report = run_checks(quick)
    assert [r.check for r in report.results] == list(CHECKS)
    assert not [r for r in report.failures() if r.check != "segment-uniformity"]


def test_relative_error_is_elementwise():
    # A sign error on a small entry is hidden by a norm ratio dominated by the large one.
    analytic, numeric = np.array([100.0, 0.01]), np.array([100.0, -0.01])
    assert relative_error(analytic, numeric) == pytest.approx(2.0)
    assert relative_error(np.array([0.0, 1.0]), np.array([1e-9, 1.0])) == pytest.approx(1e-6)
    assert relative_error(np.zeros(0), np.zeros(0)) == 0.0

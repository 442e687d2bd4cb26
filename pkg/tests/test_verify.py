import json

import pytest

from kindiv import bias, verify
from kindiv.errors import DomainError
from kindiv.verify import DEFAULT_MANIFEST, SUITES, SuiteReport, load_manifest, resolve_grid, run_suite


def test_every_suite_has_a_runner_and_grid():
    assert set(SUITES) == set(verify._RUNNERS)
    assert len(SUITES) == 11


def test_report_json_schema():
    report = run_suite("bijection", {"ks": [2, 3], "n_max": 12})
    data = json.loads(report.to_json())
    assert {"suite_name", "grid", "cases_run", "failures", "stats", "passed"} <= set(data)
    assert data["grid"] == {"ks": [2, 3], "n_max": 12}
    assert data["cases_run"] == 26 and data["passed"]


def test_reports_are_deterministic():
    a = run_suite("figure-3").to_json()
    b = run_suite("figure-3").to_json()
    assert a == b


def test_failures_make_report_fail():
    r = SuiteReport("x", {})
    assert r.passed
    r.check(False, {"a": 1}, "a == 2", "1")
    assert not r.passed
    assert r.failures[0] == {"inputs": {"a": 1}, "expected": "a == 2", "observed": "1", "kind": "mismatch"}


@pytest.mark.parametrize(
    "name, params",
    [
        ("exact-oracle", {"ks": [2, 3], "ts": [2, 5], "n_max": 14}),
        ("sum-identity", {"n_max": 60}),
        ("bijection", {}),
        ("digamma", {"recurrence_q_max": 6, "two_path_q_max": 5}),
        ("lemmas-5", {}),
        ("figure-3", {}),
        ("xi-transform", {"ks": [2, 3], "zs": ["1"]}),
        ("theorem-1.5", {"items": ["1", "3", "4", "5.4"], "item1_t_max": 12}),
        ("theorem-1.5", {"item": 5, "t_range": "3..12"}),
        ("figure-1", {"rows": [[3, 4, 1]], "ns": [10, 100]}),
    ],
)
def test_reduced_grids_pass(name, params):
    report = run_suite(name, params)
    assert report.cases_run > 0
    assert report.failures == []


def test_item_five_records_counts():
    report = run_suite("theorem-1.5", {"item": 5, "t_range": "3..8"})
    assert report.stats["order_counts"] == {3: 2, 4: 2, 5: 4, 6: 2, 7: 7, 8: 6}
    assert report.grid["items"] == ["5"]


def test_full_flag_extends_scan():
    grid = resolve_grid("theorem-1.5", {"full": True})
    assert grid["item5_t_max"] == verify.FULL_SCAN_T_MAX
    assert resolve_grid("theorem-1.5")["item5_t_max"] == 60


def test_probe_reports_gap_without_asserting():
    report = run_suite("conjecture-1-probe", {"t_max": 9})
    assert report.passed
    assert report.stats["unresolved"] == []
    assert float(report.stats["min_certified_gap"]) > 0


def test_unresolved_is_a_distinct_failure_kind(monkeypatch):
    monkeypatch.setattr(bias, "compare", lambda *a, **kw: bias.Comparison.UNRESOLVED)
    report = run_suite("theorem-1.5", {"items": ["1"], "item1_t_max": 4})
    assert report.failures
    assert {f["kind"] for f in report.failures} == {"unresolved"}


def test_unknown_suite_and_parameter():
    with pytest.raises(DomainError):
        run_suite("nope")
    with pytest.raises(DomainError):
        run_suite("bijection", {"bogus": 1})


def test_manifest_override(tmp_path):
    path = tmp_path / "m.json"
    path.write_text(json.dumps({"bijection": {"n_max": 8}}))
    manifest = load_manifest(path)
    assert manifest["bijection"]["n_max"] == 8
    assert manifest["bijection"]["ks"] == DEFAULT_MANIFEST["bijection"]["ks"]
    report = run_suite("bijection", manifest=manifest)
    assert report.grid["n_max"] == 8
    path.write_text(json.dumps({"nope": {}}))
    with pytest.raises(DomainError):
        load_manifest(path)


def test_round_half_even():
    from decimal import Decimal
    from fractions import Fraction

    assert verify.round_half_even(Fraction(98376607, 10**8), 5) == Decimal("0.98377")
    # exact ties go to the even digit
    assert verify.round_half_even(Fraction(15, 10**6), 5) == Decimal("0.00002")
    assert verify.round_half_even(Fraction(25, 10**6), 5) == Decimal("0.00002")

"""Check-suite orchestration: determinism, report schema, exit codes."""

import json

from betheforge.harness import (exit_code, format_table, registry, report,
                                run_case, run_suite)


def test_registry_names_are_unique_and_claimed():
    checks = registry()
    assert len(checks) > 50
    for ident, spec in checks.items():
        assert spec.claim
        assert " " not in ident


def test_filtered_run_and_report():
    cases = run_suite("sum_identity.*", seed=7)
    assert len(cases) == 14  # seven sizes, two backends
    doc = report(cases)
    assert doc["schema"] == 1
    assert doc["failed"] == 0
    assert doc["passed"] == 14
    assert exit_code(doc) == 0
    table = format_table(doc)
    assert "sum_identity.n6" in table
    json.dumps(doc)  # serializable


def test_unknown_filter_yields_empty():
    assert run_suite("no.such.check", seed=7) == []


def test_suite_determinism_modulo_runtime():
    a = report(run_suite("ybe.gl2", seed=7), include_runtime=False)
    b = report(run_suite("ybe.gl2", seed=7), include_runtime=False)
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
    c = report(run_suite("ybe.gl2", seed=8), include_runtime=False)
    assert json.dumps(a, sort_keys=True) != json.dumps(c, sort_keys=True)


def test_exact_cases_demand_exact_zero():
    case = run_case("unitarity.sp4", 7, "exact")
    assert case.status == "pass"
    assert case.residual == 0.0
    assert case.bound == 0.0


def test_skip_carries_reason():
    case = run_case("e2e.sp4.stretch", 7, "float")
    assert case.status == "skip"
    assert "weight-degenerate" in case.note


def test_failed_cases_sort_first():
    good = run_case("scalar.algebra", 7, "exact")
    bad = run_case("scalar.algebra", 7, "exact")
    bad.status = "fail"
    bad.identifier = "zzz.fake"
    doc = report([good, bad])
    assert doc["cases"][0]["id"] == "zzz.fake"
    assert exit_code(doc) == 1


def test_parallel_pool_matches_serial():
    serial = report(run_suite("unitarity.*", seed=7), include_runtime=False)
    pooled = report(run_suite("unitarity.*", seed=7, jobs=2),
                    include_runtime=False)
    assert json.dumps(serial, sort_keys=True) == json.dumps(pooled,
                                                            sort_keys=True)

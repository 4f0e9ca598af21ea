import json

from kcbilliards.verify import (
    check_analytic_vs_numeric,
    check_projection_correspondence,
    check_reflection_d_invariance,
    check_spherical_energy_identity,
    run_suite,
)


def test_individual_checks_pass():
    assert check_reflection_d_invariance(0, 2000).passed
    assert check_spherical_energy_identity(1, 2000).passed
    assert check_analytic_vs_numeric(2, 12).passed
    assert check_projection_correspondence(3).passed


def test_suite_reports_all_checks():
    report = run_suite(seed=7, cases=1000)
    assert report["passed"]
    names = {c["name"] for c in report["checks"]}
    assert names == {
        "reflection-D-invariance",
        "spherical-energy-identity",
        "analytic-vs-numeric-hit",
        "projection-correspondence",
    }


def test_suite_deterministic_for_seed():
    r1 = run_suite(seed=3, cases=800)
    r2 = run_suite(seed=3, cases=800)
    assert json.dumps(r1, sort_keys=True) == json.dumps(r2, sort_keys=True)


def test_injected_fault_fails_suite():
    report = run_suite(seed=0, cases=200, inject_fault=True)
    assert not report["passed"]

import pytest

from bandbounds.algebra import LaurentPoly2
from bandbounds.floquet import Potential, charpoly
from bandbounds.verify import (
    FAIL,
    FLAGGED,
    PASS,
    CheckResult,
    VerdictReport,
    check_corner_terms,
    check_derivative_support,
    check_eval_oracle,
    check_level_sets,
    check_newton_polytope,
    check_square_free,
    check_substitution_degree,
    check_support_bound,
    corner_coefficients,
    run_verify,
    self_tests,
)

from conftest import seeded


def test_verdict_overall_ignores_flagged():
    ok = CheckResult("a", PASS, "c", {})
    fl = CheckResult("b", FLAGGED, "c", {})
    bad = CheckResult("c", FAIL, "c", {})
    assert VerdictReport([fl, ok]).status == PASS
    assert VerdictReport([ok, bad]).status == FAIL
    assert [c.name for c in VerdictReport([bad, ok, fl]).checks] == ["a", "b", "c"]


@pytest.mark.parametrize("potential", [Potential.zero(4, 3), seeded(4, 3, 1), seeded(5, 3, 2)])
def test_structural_checks_pass(potential):
    assert check_support_bound(potential).status == PASS
    assert check_derivative_support(potential).status == PASS
    for lam in (0, "7/2"):
        assert check_corner_terms(potential, lam).status == PASS
        assert check_newton_polytope(potential, lam).status == PASS


def test_corner_magnitudes():
    q1, q2 = 4, 3
    corners = corner_coefficients(charpoly(seeded(q1, q2, 3)), q1, q2)
    assert len(corners) == 4
    assert all(c in ("1", "-1") for c in corners.values())


@pytest.mark.parametrize("q, expected", [((4, 3), (36, 35)), ((5, 3), (45, 44)), ((5, 4), (60, 59))])
def test_substitution_degree(q, expected):
    r = check_substitution_degree(seeded(*q, seed=1), -2)
    assert r.status == PASS
    assert (r.measured["degree"], r.measured["derivative_degree"]) == expected


def test_square_free_on_seeded_potentials():
    for seed in (1, 2):
        assert check_square_free(seeded(4, 3, seed), 0).status == PASS


def test_self_tests_fail_as_designed():
    results = self_tests(seeded(4, 3, 1))
    assert len(results) == 3
    assert all(r.status == PASS for r in results)  # each inner checker returned FAIL
    assert all(r.measured["checker"] == FAIL for r in results)


def test_support_checker_rejects_injected_exponent():
    p = seeded(4, 3, 1)
    bad = charpoly(p) + LaurentPoly2.monomial(4, 4)
    assert check_support_bound(p, bad).status == FAIL


def test_eval_oracle():
    r = check_eval_oracle(seeded(4, 3, 2), samples=20)
    assert r.status == PASS


def test_non_coprime_period_is_gated():
    p = seeded(3, 6, 1)
    assert check_support_bound(p).status == PASS
    assert check_corner_terms(p, 0).status == PASS
    assert check_square_free(p, 0).status == FLAGGED
    assert check_substitution_degree(p, 0).status == FLAGGED
    assert check_newton_polytope(p, 0).status == FLAGGED
    report, _ = run_verify(p, level_sets=False)
    assert report.status == PASS


def test_level_sets_free_operator_small_grid():
    checks, records, reports = check_level_sets(Potential.zero(4, 3), G=24, bands=[1, 12], recheck=False)
    byname = {c.name: c for c in checks}
    lo = byname["level_sets.band01.min"]
    assert lo.status == PASS and lo.measured["count"] == 1
    assert byname["level_sets.band12.max"].measured["count"] == 1
    assert all(r.count <= 48 for r in reports)


def test_run_verify_without_level_sets():
    report, extra = run_verify(seeded(4, 3, 1), level_sets=False)
    assert report.status == PASS
    assert extra == {"extrema": [], "level_sets": []}
    d = report.as_dict()
    assert d["overall"] == PASS and d["counts"][FAIL] == 0

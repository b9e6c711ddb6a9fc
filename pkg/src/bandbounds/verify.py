"""Executable checks of the structural claims and level-set bounds.

Each check returns one or more :class:`CheckResult` entries.  Self-tests feed
deliberately broken polynomials to the same checkers; they pass when the
violation is detected, which separates checker bugs from genuine failures.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional

import numpy as np

from .algebra import (
    LaurentPoly2,
    as_rational,
    eval_complex,
    gcd_constant_check,
    laurent_partial,
    shift_monomial,
    specialize_lambda,
    substitute_powers,
    total_degree,
)
from .bands import count_level_set, find_extrema, band_grid
from .floquet import Potential, build_numeric_batch, charpoly
from .polytope import diamond, mixed_volume, newton_polytope

PASS, FAIL, FLAGGED = "pass", "fail", "flagged"
DEFAULT_LAMBDAS = (Fraction(0), Fraction(-2), Fraction(7, 2))


@dataclass
class CheckResult:
    name: str
    status: str
    claim: str
    measured: dict[str, Any] = field(default_factory=dict)
    tolerance: Optional[dict[str, Any]] = None

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "status": self.status,
            "claim": self.claim,
            "measured": self.measured,
            "tolerance": self.tolerance,
        }


@dataclass
class VerdictReport:
    checks: list[CheckResult]

    def __post_init__(self):
        self.checks = sorted(self.checks, key=lambda c: c.name)

    @property
    def status(self) -> str:
        return PASS if all(c.status == PASS for c in self.checks if c.status != FLAGGED) else FAIL

    def get(self, name: str) -> CheckResult:
        return next(c for c in self.checks if c.name == name)

    def as_dict(self) -> dict:
        return {
            "overall": self.status,
            "counts": {s: sum(c.status == s for c in self.checks) for s in (PASS, FAIL, FLAGGED)},
            "checks": [c.as_dict() for c in self.checks],
        }


def _status(ok: bool) -> str:
    return PASS if ok else FAIL


def _lam_tag(lam: Fraction) -> str:
    return str(lam).replace("/", "_")


# -- exact checks ------------------------------------------------------------


def support_violations(poly: LaurentPoly2, q1: int, q2: int) -> list[tuple[int, int]]:
    return [(a, b) for a, b in poly.support() if abs(a) * q1 + abs(b) * q2 > q1 * q2]


def check_support_bound(potential: Potential, poly: LaurentPoly2 | None = None, name: str = "support_bound") -> CheckResult:
    """Every exponent of the symbolic charpoly satisfies |c1| q1 + |c2| q2 <= q1 q2."""
    q1, q2 = potential.period.q1, potential.period.q2
    poly = charpoly(potential) if poly is None else poly
    bad = support_violations(poly, q1, q2)
    return CheckResult(
        name,
        _status(not bad),
        "support bound |c1| q1 + |c2| q2 <= q1 q2, all lambda",
        {"support_size": len(poly.support()), "violations": [list(v) for v in bad]},
        {"exact": True},
    )


def corner_coefficients(poly: LaurentPoly2, q1: int, q2: int) -> dict[str, Optional[str]]:
    out = {}
    for e in ((q2, 0), (-q2, 0), (0, q1), (0, -q1)):
        c = poly.coefficient(*e)
        out[f"{e[0]},{e[1]}"] = None if c.is_zero() else str(c(0)) if c.degree == 0 else repr(c)
    return out


def check_corner_terms(potential: Potential, lam, poly: LaurentPoly2 | None = None, name: str | None = None) -> CheckResult:
    """The four corner terms survive specialization with coefficients of magnitude 1."""
    lam = as_rational(lam)
    q1, q2 = potential.period.q1, potential.period.q2
    poly = charpoly(potential) if poly is None else poly
    spec = specialize_lambda(poly, lam)
    corners = corner_coefficients(spec, q1, q2)
    ok = True
    for e in ((q2, 0), (-q2, 0), (0, q1), (0, -q1)):
        c = spec.coefficient(*e)
        ok &= c.degree == 0 and abs(c.coeffs[0]) == 1
        # the corner coefficient must not depend on lambda
        ok &= poly.coefficient(*e).degree == 0
    return CheckResult(
        name or f"corner_terms.lambda_{_lam_tag(lam)}",
        _status(ok),
        "corner terms z1^(+-q2), z2^(+-q1) present with lambda-free coefficients of magnitude 1",
        {"lambda": str(lam), "corners": corners},
        {"exact": True},
    )


def p1_at(potential: Potential, lam) -> LaurentPoly2:
    """z1^q2 z2^q1 P(z, lam) with lambda specialized."""
    q1, q2 = potential.period.q1, potential.period.q2
    return specialize_lambda(shift_monomial(charpoly(potential), q2, q1), lam)


def check_square_free(potential: Potential, lam, poly: LaurentPoly2 | None = None, name: str | None = None) -> CheckResult:
    """P1( . , lam) and its z1-derivative share no nonconstant factor."""
    lam = as_rational(lam)
    name = name or f"square_free.lambda_{_lam_tag(lam)}"
    claim = "P1(z, lam) and dP1/dz1 are coprime (square-free, no univariate factors)"
    if poly is None and not potential.period.coprime:
        return CheckResult(name, FLAGGED, claim, {"reason": "hypothesis unmet: periods are not coprime"})
    f = p1_at(potential, lam) if poly is None else poly
    coprime = gcd_constant_check(f, laurent_partial(f, "z1"))
    return CheckResult(name, _status(coprime), claim, {"lambda": str(lam), "gcd_is_constant": coprime}, {"exact": True})


def check_substitution_degree(potential: Potential, lam) -> CheckResult:
    """After z = (x1^q1, x2^q2), P1 has total degree 3 q1 q2 and its x1-derivative 3 q1 q2 - 1."""
    lam = as_rational(lam)
    q1, q2 = potential.period.q1, potential.period.q2
    name = f"substitution_degree.lambda_{_lam_tag(lam)}"
    claim = "deg P1(x1^q1, x2^q2) = 3 q1 q2 and deg of its x1-derivative = 3 q1 q2 - 1"
    if not potential.period.coprime:
        return CheckResult(name, FLAGGED, claim, {"reason": "hypothesis unmet: periods are not coprime"})
    sub = substitute_powers(p1_at(potential, lam), q1, q2)
    d0 = total_degree(sub)
    d1 = total_degree(laurent_partial(sub, "z1"))
    ok = d0 == 3 * q1 * q2 and d1 == 3 * q1 * q2 - 1
    return CheckResult(
        name, _status(ok), claim,
        {"lambda": str(lam), "degree": d0, "derivative_degree": d1, "expected": [3 * q1 * q2, 3 * q1 * q2 - 1]},
        {"exact": True},
    )


def check_newton_polytope(potential: Potential, lam) -> CheckResult:
    """Newton polygon of P( . , lam) is the diamond and MV(N, N) = 4 q1 q2."""
    lam = as_rational(lam)
    q1, q2 = potential.period.q1, potential.period.q2
    name = f"newton_polytope.lambda_{_lam_tag(lam)}"
    claim = "Newton polygon is hull{(+-q2, 0), (0, +-q1)} with MV(N, N) = 4 q1 q2"
    if not potential.period.coprime:
        return CheckResult(name, FLAGGED, claim, {"reason": "hypothesis unmet: periods are not coprime"})
    n = newton_polytope(specialize_lambda(charpoly(potential), lam))
    mv = mixed_volume(n, n)
    ok = n == diamond(q1, q2) and mv == 4 * q1 * q2
    return CheckResult(
        name,
        _status(ok),
        claim,
        {"lambda": str(lam), "vertices": [list(v) for v in n.vertices], "mixed_volume": mv, "expected": 4 * q1 * q2},
        {"exact": True},
    )


def check_derivative_support(potential: Potential) -> CheckResult:
    """Exponents of z1 dP/dz1 lie in the diamond, symbolically in lambda."""
    q1, q2 = potential.period.q1, potential.period.q2
    claim = "support of z1 dP/dz1 lies in the Newton polygon of P, all lambda"
    if not potential.period.coprime:
        return CheckResult("derivative_support", FLAGGED, claim, {"reason": "hypothesis unmet: periods are not coprime"})
    d = shift_monomial(laurent_partial(charpoly(potential), "z1"), 1, 0)
    n = diamond(q1, q2)
    outside = [list(e) for e in d.support() if not n.contains(e)]
    return CheckResult(
        "derivative_support",
        _status(not outside),
        claim,
        {"support_size": len(d.support()), "outside": outside},
        {"exact": True},
    )


def check_eval_oracle(potential: Potential, samples: int = 100, seed: int = 0, rtol: float = 1e-8) -> CheckResult:
    """Charpoly against LU determinants of the numeric Floquet matrix at random torus points."""
    rng = np.random.default_rng(seed)
    poly = charpoly(potential)
    Q = potential.period.Q
    k = rng.random((samples, 2))
    lam = rng.uniform(-6.0, 6.0, samples)
    mats = build_numeric_batch(potential, k[:, 0], k[:, 1]) - lam[:, None, None] * np.eye(Q)
    dets = np.linalg.det(mats)
    worst = 0.0
    for i in range(samples):
        z1, z2 = np.exp(2j * np.pi * k[i])
        val = eval_complex(poly, z1, z2, lam[i])
        worst = max(worst, abs(val - dets[i]) / max(abs(dets[i]), 1e-300))
    return CheckResult(
        "eval_oracle",
        _status(worst <= rtol),
        "exact charpoly agrees with the numeric determinant of D(z) - lambda I",
        {"samples": samples, "max_relative_error": worst},
        {"relative": rtol},
    )


# -- self-tests --------------------------------------------------------------


def self_tests(potential: Potential) -> list[CheckResult]:
    q1, q2 = potential.period.q1, potential.period.q2
    poly = charpoly(potential)
    out = []

    bad = poly + LaurentPoly2.monomial(q1, q1)  # |q1| q1 + |q1| q2 > q1 q2
    r = check_support_bound(potential, bad, name="x")
    out.append(CheckResult(
        "selftest.support_bound_detects_violation", _status(r.status == FAIL),
        "support checker rejects an injected out-of-bound exponent", {"injected": [q1, q1], "checker": r.status},
    ))

    corner = poly.coefficient(q2, 0)
    broken = poly - LaurentPoly2({(q2, 0): corner})
    r = check_corner_terms(potential, 0, broken, name="x")
    out.append(CheckResult(
        "selftest.corner_terms_detects_deletion", _status(r.status == FAIL),
        "corner checker rejects a polynomial with a deleted corner", {"deleted": [q2, 0], "checker": r.status},
    ))

    z1, z2 = LaurentPoly2.monomial(1, 0), LaurentPoly2.monomial(0, 1)
    planted = (z1 + z2) ** 2 * (z1 - z2)
    r = check_square_free(potential, 0, planted, name="x")
    out.append(CheckResult(
        "selftest.square_free_detects_square", _status(r.status == FAIL),
        "square-free checker rejects (z1 + z2)^2 (z1 - z2)", {"checker": r.status},
    ))
    return out


# -- level sets --------------------------------------------------------------


def check_level_sets(
    potential: Potential,
    G: int = 120,
    bands: Optional[list[int]] = None,
    tol_f: float = 1e-8,
    tol_p: float = 1e-6,
    tol_grad: float = 1e-4,
    recheck: bool = True,
) -> tuple[list[CheckResult], list, list]:
    """Count the level set of every global band extremum and compare with the bounds.

    Returns ``(checks, extremum_records, level_set_reports)``.  Level values of
    local but non-global extrema bound a region, so their level sets are not
    finite; they are listed in a flagged entry per band.
    """
    Q = potential.period.Q
    bands = list(range(1, Q + 1)) if bands is None else bands
    claim = "#{k : lambda_m(k) = lambda*} <= 4 q1 q2 <= 9 q1 q2 - 3 <= (2 q1 + q2)(2 q1 + q2 - 1)"
    checks, records, reports = [], [], []
    grid = band_grid(potential, G)
    for m in bands:
        ex = find_extrema(potential, m, G, grid)
        records.extend(ex)
        for kind in ("min", "max"):
            glob = [r for r in ex if r.kind == kind and r.scope == "global"]
            best = min(glob, key=lambda r: r.value if kind == "min" else -r.value)
            rep = count_level_set(potential, m, best.value, G, kind=kind, tol_f=tol_f, tol_p=tol_p,
                                  tol_grad=tol_grad, recheck=recheck)
            reports.append(rep)
            measured = {
                "band": m,
                "kind": kind,
                "lambda": best.value,
                "count": rep.count,
                "count_recheck": rep.count_recheck,
                "points": [[p.k1, p.k2] for p in rep.points],
                "residual_P": rep.residual_P,
                "residual_grad": rep.residual_grad,
                "verdicts": rep.verdicts,
                "flags": rep.flags,
            }
            if not potential.period.coprime:
                status = FLAGGED
            else:
                status = _status(rep.count >= 1 and rep.passed)
            checks.append(CheckResult(
                f"level_sets.band{m:02d}.{kind}", status, claim, measured,
                {"f": tol_f, "P_relative": tol_p, "grad_relative": tol_grad, "dedup_radius": 1e-5},
            ))
        local = [r for r in ex if r.scope == "local"]
        if local:
            checks.append(CheckResult(
                f"level_sets.band{m:02d}.local", FLAGGED,
                "non-global extremal values: level set not finite, bounds not applicable",
                {"values": [[r.kind, r.value] for r in local]},
            ))
        unconverged = [r for r in ex if not r.converged]
        if unconverged:
            checks.append(CheckResult(
                f"level_sets.band{m:02d}.unconverged", FLAGGED, "extremum refinement did not converge",
                {"records": [r.as_dict() for r in unconverged]},
            ))
    return checks, records, reports


# -- driver ------------------------------------------------------------------


def run_verify(
    potential: Potential,
    G: int = 120,
    lambdas=DEFAULT_LAMBDAS,
    level_sets: bool = True,
    tol_f: float = 1e-8,
    tol_grad: float = 1e-4,
    seed: int = 0,
) -> tuple[VerdictReport, dict]:
    """Run every check; returns the verdict report and the raw level-set data."""
    lambdas = [as_rational(x) for x in lambdas]
    checks = [check_support_bound(potential), check_derivative_support(potential), check_eval_oracle(potential, seed=seed)]
    for lam in lambdas:
        checks.append(check_corner_terms(potential, lam))
        checks.append(check_newton_polytope(potential, lam))
        checks.append(check_square_free(potential, lam))
        checks.append(check_substitution_degree(potential, lam))
    checks.extend(self_tests(potential))
    extra: dict = {"extrema": [], "level_sets": []}
    if level_sets:
        lc, records, reports = check_level_sets(potential, G, tol_f=tol_f, tol_grad=tol_grad)
        checks.extend(lc)
        extra = {"extrema": records, "level_sets": reports}
    return VerdictReport(checks), extra


import random

import numpy as np
import pytest

from bandbounds.bands import (
    DegenerateEigenvalueError,
    TorusPoint,
    band_gradient,
    band_grid,
    count_level_set,
    charpoly_residuals,
    eigenvalues_sorted,
    fd_gradient,
    find_extrema,
    torus_distance,
)
from bandbounds.bands import _derivatives
from bandbounds.floquet import Potential

from conftest import dense_floquet, free_bands, seeded


def test_torus_point_wraps():
    assert TorusPoint(1.25, -0.25) == TorusPoint(0.25, 0.75)
    assert torus_distance((0.99, 0.0), (0.01, 0.0)) == pytest.approx(0.02)


def test_eigenvalues_match_lapack_on_independent_matrix():
    p = seeded(4, 3, 3)
    r = random.Random(0)
    for _ in range(10):
        k = (r.random(), r.random())
        np.testing.assert_allclose(eigenvalues_sorted(p, k), np.linalg.eigvalsh(dense_floquet(p, *k)), atol=1e-11)


def test_free_bands_closed_form():
    p = Potential.zero(4, 3)
    for k1 in np.linspace(0, 1, 7):
        for k2 in np.linspace(0, 1, 5):
            np.testing.assert_allclose(eigenvalues_sorted(p, (k1, k2)), free_bands(4, 3, k1, k2), atol=1e-9)


def test_shift_by_constant_shifts_bands():
    p = seeded(4, 3, 4)
    k = (0.2, 0.6)
    np.testing.assert_allclose(eigenvalues_sorted(p.shifted(2), k), eigenvalues_sorted(p, k) + 2, atol=1e-12)


def test_band_grid_layout_and_continuity():
    p = seeded(4, 3, 1)
    g = band_grid(p, 40)
    assert g.values.shape == (40, 40, 12)
    np.testing.assert_allclose(g.values[5, 7], eigenvalues_sorted(p, (5 / 40, 7 / 40)), atol=1e-12)
    # bands are Lipschitz: |grad| <= ||dD/dk|| <= 4 pi
    step = np.abs(np.diff(g.values, axis=0)).max()
    assert step <= 4 * np.pi / 40 + 1e-9


def test_gradient_matches_finite_differences():
    p = seeded(4, 3, 2)
    r = random.Random(5)
    checked = 0
    while checked < 10:
        k = (r.random(), r.random())
        m = r.randint(1, 12)
        try:
            g = band_gradient(p, m, k)
        except DegenerateEigenvalueError:
            continue
        np.testing.assert_allclose(g, fd_gradient(p, m, k), atol=1e-5)
        checked += 1


def test_hessian_matches_finite_differences_of_gradient():
    p = seeded(4, 3, 2)
    k, h = np.array([0.37, 0.61]), 1e-5
    for m in (1, 6, 12):
        _, _, hess, gap = _derivatives(p, m, k)
        assert gap > 1e-3
        fd = np.column_stack(
            [(band_gradient(p, m, k + e) - band_gradient(p, m, k - e)) / (2 * h) for e in (np.array([h, 0]), np.array([0, h]))]
        )
        np.testing.assert_allclose(hess, fd, atol=1e-4)


def test_gradient_raises_at_degeneracy():
    # free bands 1 and 2 cross at k = 0 (-3 has multiplicity 2 there)
    with pytest.raises(DegenerateEigenvalueError):
        band_gradient(Potential.zero(4, 3), 2, (0.0, 0.0))


def test_free_extrema_locations():
    p = Potential.zero(4, 3)
    lo = [r for r in find_extrema(p, 1, 30) if r.kind == "min" and r.scope == "global"]
    assert len(lo) == 1
    assert lo[0].value == pytest.approx(-4, abs=1e-9)
    assert torus_distance((lo[0].k.k1, lo[0].k.k2), (0.0, 0.5)) < 1e-6
    hi = [r for r in find_extrema(p, 12, 30) if r.kind == "max" and r.scope == "global"]
    assert hi[0].value == pytest.approx(4, abs=1e-9)
    assert torus_distance((hi[0].k.k1, hi[0].k.k2), (0.0, 0.0)) < 1e-6


def test_find_extrema_validates_arguments():
    p = Potential.zero(3, 4)
    with pytest.raises(ValueError):
        find_extrema(p, 0, 30)
    with pytest.raises(ValueError):
        find_extrema(p, 1, 8)


def test_free_level_set_count_and_residuals():
    rep = count_level_set(Potential.zero(4, 3), 1, -4.0, G=30)
    assert rep.kind == "min"
    assert rep.count == 1 and rep.count_recheck == 1 and rep.stable
    assert rep.residual_P <= 1e-6 and rep.residual_grad <= 1e-4
    assert rep.passed


def test_non_extremal_level_is_flagged():
    rep = count_level_set(Potential.zero(4, 3), 1, -3.5, G=30, recheck=False)
    assert rep.kind is None
    assert rep.count >= 1
    assert any("extrem" in f for f in rep.flags)


def test_empty_level_set_is_flagged():
    rep = count_level_set(Potential.zero(4, 3), 1, -10.0, G=30, recheck=False)
    assert rep.count == 0 and not rep.passed


def test_charpoly_residuals_vanish_on_bands():
    p = seeded(4, 3, 1)
    k = (0.21, 0.43)
    lam = float(eigenvalues_sorted(p, k)[4])
    res_p, _ = charpoly_residuals(p, lam, [k])
    assert res_p[0] < 1e-10
    res_p, _ = charpoly_residuals(p, lam + 0.5, [k])
    assert res_p[0] > 1e-6

import cmath
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bandbounds.algebra import LaurentPoly2, eval_complex, specialize_lambda
from bandbounds.floquet import (
    Period,
    Potential,
    bareiss_determinant,
    build_numeric,
    build_numeric_batch,
    build_symbolic,
    charpoly,
    k_derivative_matrices,
)

from conftest import dense_floquet, seeded


def test_period_validation():
    assert Period(4, 3).coprime and not Period(4, 6).coprime
    assert Period(5, 4).descending() == (5, 4)
    assert Period(3, 7).Q == 21
    with pytest.raises(ValueError):
        Period(2, 3)


def test_potential_periodic_lookup():
    p = Potential.from_rows([[1, 2, 3], [4, 5, 6], [7, 8, 9]])
    assert p(1, 1) == 1 and p(4, 1) == 1 and p(0, 0) == 9 and p(2, 3) == 6


def test_symbolic_matrix_wraparound_entries():
    d = build_symbolic(Potential.zero(4, 3))
    assert d.entry((4, 2), (1, 2)) == LaurentPoly2.monomial(1, 0)
    assert d.entry((1, 2), (4, 2)) == LaurentPoly2.monomial(-1, 0)
    assert d.entry((2, 3), (2, 1)) == LaurentPoly2.monomial(0, 1)
    assert d.entry((2, 1), (2, 3)) == LaurentPoly2.monomial(0, -1)
    assert d.entry((2, 2), (3, 2)) == LaurentPoly2.constant(1)
    assert d.entry((2, 2), (3, 3)).is_zero()
    assert d.entry((2, 2), (2, 2)) == -LaurentPoly2.lam()


@pytest.mark.parametrize("q", [(3, 3), (4, 3), (3, 5)])
def test_numeric_matches_independent_builder(q):
    p = seeded(*q, seed=7)
    r = random.Random(0)
    for _ in range(5):
        k = (r.random(), r.random())
        np.testing.assert_allclose(build_numeric(p, k), dense_floquet(p, *k), atol=1e-14)


def test_numeric_batch_shape_and_hermitian():
    p = seeded(4, 3, 2)
    k1, k2 = np.meshgrid(np.linspace(0, 1, 3), np.linspace(0, 1, 5), indexing="ij")
    d = build_numeric_batch(p, k1, k2)
    assert d.shape == (3, 5, 12, 12)
    np.testing.assert_allclose(d, np.conj(np.swapaxes(d, -1, -2)), atol=0)


def test_bareiss_matches_numpy_on_integer_matrix():
    r = random.Random(3)
    m = [[r.randint(-4, 4) for _ in range(5)] for _ in range(5)]
    m[0][0] = 0  # exercise the pivot swap
    det = bareiss_determinant([[LaurentPoly2.constant(x) for x in row] for row in m])
    assert float(det.coefficient(0, 0)(0)) == pytest.approx(np.linalg.det(np.array(m, float)), abs=1e-6)


@pytest.mark.parametrize("q", [(3, 3), (4, 3), (3, 4)])
def test_charpoly_matches_lu_oracle(q):
    p = seeded(*q, seed=11)
    poly = charpoly(p)
    r = random.Random(1)
    for _ in range(20):
        k1, k2, lam = r.random(), r.random(), r.uniform(-6, 6)
        ref = np.linalg.det(dense_floquet(p, k1, k2) - lam * np.eye(p.period.Q))
        got = eval_complex(poly, cmath.exp(2j * cmath.pi * k1), cmath.exp(2j * cmath.pi * k2), lam)
        assert abs(got - ref) <= 1e-8 * max(1.0, abs(ref))


def test_charpoly_structure_zero_potential():
    poly = charpoly(Potential.zero(4, 3))
    assert poly.lambda_degree == 12
    assert poly.coefficient(0, 0).coeffs[-1] == 1  # (-1)^12
    for e1, e2 in poly.support():
        assert abs(e1) * 4 + abs(e2) * 3 <= 12
    for corner in [(3, 0), (-3, 0), (0, 4), (0, -4)]:
        c = poly.coefficient(*corner)
        assert c.degree == 0 and abs(c.coeffs[0]) == 1


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10_000), st.fractions(-3, 3, max_denominator=5), st.fractions(-3, 3, max_denominator=5))
def test_shift_covariance(seed, c, lam):
    # det(D_{V+c} - lam) = det(D_V - (lam - c))
    p = seeded(3, 3, seed)
    lhs = specialize_lambda(charpoly(p.shifted(c)), lam)
    rhs = specialize_lambda(charpoly(p), lam - c)
    assert lhs == rhs


def test_charpoly_has_real_coefficients_and_symmetry():
    # D(z)^H = D(1/conj z): P(z, lam) is real on the torus for real lam
    p = seeded(4, 3, 5)
    poly = charpoly(p)
    for _ in range(5):
        z1, z2 = cmath.exp(2j * random.random()), cmath.exp(2j * random.random())
        assert abs(eval_complex(poly, z1, z2, 0.3).imag) < 1e-8


def test_k_derivatives_match_finite_differences():
    period = Period(4, 3)
    p = Potential.zero(4, 3)
    k1, k2, h = 0.31, 0.77, 1e-5
    d1, d2, d11, d22 = k_derivative_matrices(period, k1, k2)
    fd1 = (build_numeric(p, (k1 + h, k2)) - build_numeric(p, (k1 - h, k2))) / (2 * h)
    fd2 = (build_numeric(p, (k1, k2 + h)) - build_numeric(p, (k1, k2 - h))) / (2 * h)
    fd11 = (build_numeric(p, (k1 + h, k2)) - 2 * build_numeric(p, (k1, k2)) + build_numeric(p, (k1 - h, k2))) / h**2
    np.testing.assert_allclose(d1, fd1, atol=1e-8)
    np.testing.assert_allclose(d2, fd2, atol=1e-8)
    np.testing.assert_allclose(d11, fd11, atol=1e-3)
    assert np.abs(d22).max() == pytest.approx(4 * np.pi**2)


def test_rational_potential_is_exact():
    p = Potential.from_rows([[Fraction(1, 3), 0, 0], [0, 0, 0], [0, 0, 0]])
    poly = charpoly(p)
    assert any(isinstance(c, Fraction) and c.denominator == 3 for c in poly.coefficient(0, 0).coeffs)

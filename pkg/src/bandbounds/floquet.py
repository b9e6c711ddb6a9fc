"""Floquet matrices of the periodic discrete Schrodinger operator on Z^2.

Sites of the fundamental cell are ``(m, n)`` with ``m in 1..q1`` and
``n in 1..q2``, ordered lexicographically.  Hopping across the cell
boundary in direction ``j`` picks up ``z_j = exp(2 pi i k_j)`` (or its
inverse), so the matrix is a Laurent polynomial in ``z`` with ``V - lambda``
on the diagonal.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .algebra import LaurentPoly2, UniPolyLambda, as_rational

__all__ = [
    "Period",
    "Potential",
    "SymbolicFloquetMatrix",
    "build_symbolic",
    "charpoly",
    "bareiss_determinant",
    "build_numeric",
    "build_numeric_batch",
    "k_derivative_matrices",
]


@dataclass(frozen=True)
class Period:
    q1: int
    q2: int

    def __post_init__(self):
        for q in (self.q1, self.q2):
            if not isinstance(q, int) or isinstance(q, bool):
                raise TypeError("periods must be integers")
        if self.q1 < 3 or self.q2 < 3:
            raise ValueError(f"periods must satisfy q1 >= 3 and q2 >= 3, got ({self.q1}, {self.q2})")

    @property
    def coprime(self) -> bool:
        return math.gcd(self.q1, self.q2) == 1

    @property
    def Q(self) -> int:
        return self.q1 * self.q2

    def descending(self) -> tuple[int, int]:
        """(max, min) of the two periods."""
        return (max(self.q1, self.q2), min(self.q1, self.q2))


@dataclass(frozen=True)
class Potential:
    """A (q1, q2)-periodic potential given by its values on one cell.

    ``values[m - 1][n - 1]`` is V(m, n).
    """

    period: Period
    values: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        q1, q2 = self.period.q1, self.period.q2
        if len(self.values) != q1 or any(len(row) != q2 for row in self.values):
            raise ValueError(f"potential table must be {q1} x {q2}")

    @classmethod
    def from_rows(cls, rows, q1: int | None = None, q2: int | None = None) -> "Potential":
        rows = [list(r) for r in rows]
        q1 = len(rows) if q1 is None else q1
        q2 = (len(rows[0]) if rows else 0) if q2 is None else q2
        period = Period(q1, q2)
        if len(rows) != q1:
            raise ValueError(f"expected {q1} rows, got {len(rows)}")
        table = []
        for m, row in enumerate(rows, start=1):
            if len(row) != q2:
                raise ValueError(f"row {m}: expected {q2} entries, got {len(row)}")
            table.append(tuple(as_rational(v) for v in row))
        return cls(period, tuple(table))

    @classmethod
    def zero(cls, q1: int, q2: int) -> "Potential":
        return cls.from_rows([[0] * q2 for _ in range(q1)])

    def __call__(self, m: int, n: int) -> Fraction:
        """V(m, n) for any integers, using periodicity."""
        return self.values[(m - 1) % self.period.q1][(n - 1) % self.period.q2]

    def shifted(self, c) -> "Potential":
        c = as_rational(c)
        return Potential(self.period, tuple(tuple(v + c for v in row) for row in self.values))

    def as_array(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.values])

    def rows_as_strings(self) -> list[list[str]]:
        return [[str(v) for v in row] for row in self.values]


def site_index(period: Period, m: int, n: int) -> int:
    """Zero-based row/column index of site (m, n), both 1-based."""
    return (m - 1) * period.q2 + (n - 1)


def _neighbors(period: Period, m: int, n: int):
    """Yield (m', n', e1, e2): the neighbor site and the z-exponent of the hop."""
    q1, q2 = period.q1, period.q2
    # (m+1, n): leaving through m = q1 lands on m' = 1 with factor z1
    yield (1, n, 1, 0) if m == q1 else (m + 1, n, 0, 0)
    yield (q1, n, -1, 0) if m == 1 else (m - 1, n, 0, 0)
    yield (m, 1, 0, 1) if n == q2 else (m, n + 1, 0, 0)
    yield (m, q2, 0, -1) if n == 1 else (m, n - 1, 0, 0)


@dataclass(frozen=True)
class SymbolicFloquetMatrix:
    period: Period
    entries: tuple[tuple[LaurentPoly2, ...], ...]

    @property
    def dimension(self) -> int:
        return self.period.Q

    def entry(self, row: tuple[int, int], col: tuple[int, int]) -> LaurentPoly2:
        """Entry at 1-based site labels ``row = (m, n)``, ``col = (m', n')``."""
        return self.entries[site_index(self.period, *row)][site_index(self.period, *col)]


def build_symbolic(potential: Potential) -> SymbolicFloquetMatrix:
    """Floquet matrix with ``V(m, n) - lambda`` on the diagonal."""
    period = potential.period
    Q = period.Q
    zero = LaurentPoly2()
    rows = [[zero] * Q for _ in range(Q)]
    for m in range(1, period.q1 + 1):
        for n in range(1, period.q2 + 1):
            r = site_index(period, m, n)
            rows[r][r] = LaurentPoly2({(0, 0): UniPolyLambda((potential(m, n), -1))})
            for mm, nn, e1, e2 in _neighbors(period, m, n):
                rows[r][site_index(period, mm, nn)] = LaurentPoly2.monomial(e1, e2)
    return SymbolicFloquetMatrix(period, tuple(tuple(r) for r in rows))


def bareiss_determinant(rows) -> LaurentPoly2:
    """Fraction-free Bareiss elimination over the Laurent ring.

    Every division is exact in an integral domain.  The leading principal
    minors of ``D - lambda I`` have lambda-leading term ``(-lambda)^k`` and are
    never zero, so no pivoting is needed for Floquet matrices; a zero pivot
    elsewhere falls back to a row swap.
    """
    a = [list(r) for r in rows]
    n = len(a)
    if n == 0:
        return LaurentPoly2.constant(1)
    sign = 1
    prev = LaurentPoly2.constant(1)
    for k in range(n - 1):
        if a[k][k].is_zero():
            swap = next((i for i in range(k + 1, n) if not a[i][k].is_zero()), None)
            if swap is None:
                return LaurentPoly2()
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        pivot = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            for j in range(k + 1, n):
                t = pivot * a[i][j]
                if not aik.is_zero() and not a[k][j].is_zero():
                    t = t - aik * a[k][j]
                a[i][j] = t.exact_quotient(prev) if not t.is_zero() else t
            a[i][k] = LaurentPoly2()
        prev = pivot
    det = a[n - 1][n - 1]
    return det if sign == 1 else -det


@functools.lru_cache(maxsize=64)
def charpoly(potential: Potential) -> LaurentPoly2:
    """Exact ``det(D_V(z) - lambda I)`` as a Laurent polynomial over Q[lambda]."""
    return bareiss_determinant(build_symbolic(potential).entries)


def _hop_table(period: Period):
    """Per site: list of (column index, e1, e2) for its four hops."""
    table = []
    for m in range(1, period.q1 + 1):
        for n in range(1, period.q2 + 1):
            table.append([(site_index(period, mm, nn), e1, e2) for mm, nn, e1, e2 in _neighbors(period, m, n)])
    return table


def build_numeric_batch(potential: Potential, k1, k2) -> np.ndarray:
    """Numeric Floquet matrices D_V(k) for arrays of quasimomenta.

    Returns an array of shape ``broadcast(k1, k2).shape + (Q, Q)``.
    """
    k1, k2 = np.broadcast_arrays(np.asarray(k1, dtype=float), np.asarray(k2, dtype=float))
    shape = k1.shape
    period = potential.period
    Q = period.Q
    z1 = np.exp(2j * np.pi * k1.ravel())
    z2 = np.exp(2j * np.pi * k2.ravel())
    out = np.zeros((z1.size, Q, Q), dtype=complex)
    diag = potential.as_array().ravel()
    out[:, np.arange(Q), np.arange(Q)] = diag
    phase = {(0, 0): 1.0, (1, 0): z1, (-1, 0): z1.conj(), (0, 1): z2, (0, -1): z2.conj()}
    for r, hops in enumerate(_hop_table(period)):
        for c, e1, e2 in hops:
            out[:, r, c] = phase[(e1, e2)]
    return out.reshape(shape + (Q, Q))


def build_numeric(potential: Potential, k) -> np.ndarray:
    """Hermitian matrix D_V(k) for a single quasimomentum ``k = (k1, k2)``."""
    k1, k2 = (k.k1, k.k2) if hasattr(k, "k1") else k
    return build_numeric_batch(potential, k1, k2)


def k_derivative_matrices(period: Period, k1: float, k2: float):
    """First and diagonal second derivatives of D_V(k) with respect to k1, k2.

    Returns ``(d1, d2, d11, d22)``; the mixed second derivative vanishes.
    """
    Q = period.Q
    z = (np.exp(2j * np.pi * k1), np.exp(2j * np.pi * k2))
    d = [np.zeros((Q, Q), dtype=complex) for _ in range(4)]
    for r, hops in enumerate(_hop_table(period)):
        for c, e1, e2 in hops:
            for j, e in enumerate((e1, e2)):
                if e:
                    w = z[j] if e > 0 else z[j].conjugate()
                    d[j][r, c] = 2j * np.pi * e * w
                    d[2 + j][r, c] = -4.0 * np.pi**2 * w
    return tuple(d)

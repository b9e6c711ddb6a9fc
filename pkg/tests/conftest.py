import cmath
import random

import numpy as np
import pytest

from bandbounds.cli import generate_potential
from bandbounds.floquet import Potential

SEEDS = (1, 2, 3, 4, 5)


def dense_floquet(potential: Potential, k1: float, k2: float) -> np.ndarray:
    """Independent Floquet matrix: apply the operator to each basis vector.

    A unit vector at site (m, n) is extended quasi-periodically,
    u(m + q1, n) = z1 u(m, n), and the four hops are read back inside the cell.
    """
    q1, q2 = potential.period.q1, potential.period.q2
    z1, z2 = cmath.exp(2j * cmath.pi * k1), cmath.exp(2j * cmath.pi * k2)
    Q = q1 * q2
    out = np.zeros((Q, Q), dtype=complex)

    def u(basis, m, n):
        # value of the quasi-periodic extension of basis at (m, n), 0-based
        a, b = divmod(m, q1)
        c, d = divmod(n, q2)
        return (z1**a) * (z2**c) * (1.0 if (b, d) == basis else 0.0)

    for bm in range(q1):
        for bn in range(q2):
            col = bm * q2 + bn
            for m in range(q1):
                for n in range(q2):
                    val = u((bm, bn), m + 1, n) + u((bm, bn), m - 1, n) + u((bm, bn), m, n + 1) + u((bm, bn), m, n - 1)
                    val += float(potential(m + 1, n + 1)) * u((bm, bn), m, n)
                    out[m * q2 + n, col] = val
    return out


def seeded(q1: int, q2: int, seed: int) -> Potential:
    return generate_potential(q1, q2, seed)


@pytest.fixture
def rng():
    return random.Random(12345)


@pytest.fixture
def zero43():
    return Potential.zero(4, 3)


def free_bands(q1: int, q2: int, k1: float, k2: float) -> np.ndarray:
    vals = [
        2 * np.cos(2 * np.pi * (k1 + j1) / q1) + 2 * np.cos(2 * np.pi * (k2 + j2) / q2)
        for j1 in range(q1)
        for j2 in range(q2)
    ]
    return np.sort(vals)


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)

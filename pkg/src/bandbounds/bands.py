"""Band functions on the Brillouin torus: scans, extrema and level sets.

``lambda_m(k)`` is the m-th smallest eigenvalue (1-based) of the Floquet
matrix D_V(k).  Grids sample ``k = (i/G, j/G)``.  Refinement uses the
Hellmann-Feynman gradient and the second-order perturbation Hessian of a
simple eigenvalue; at eigenvalue crossings it falls back to Nelder-Mead.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import minimize

from .algebra import specialize_lambda_float
from .floquet import Potential, build_numeric_batch, charpoly, k_derivative_matrices
from .jacobi import jacobi_eigh
from .polytope import BoundsReport, bounds_report

__all__ = [
    "TorusPoint",
    "BandGrid",
    "ExtremumRecord",
    "LevelSetReport",
    "DegenerateEigenvalueError",
    "torus_distance",
    "eigenvalues_sorted",
    "band_grid",
    "band_gradient",
    "fd_gradient",
    "find_extrema",
    "count_level_set",
    "charpoly_residuals",
]

GAP_TOL = 1e-8
DEDUP_RADIUS = 1e-5
TOL_F = 1e-8
TOL_P = 1e-6
TOL_GRAD = 1e-4
EXTREMUM_GRAD_TOL = 1e-9
MAX_ITER = 200


class DegenerateEigenvalueError(ArithmeticError):
    """The requested band touches a neighbouring band; its gradient is undefined."""


@dataclass(frozen=True)
class TorusPoint:
    k1: float
    k2: float

    def __post_init__(self):
        object.__setattr__(self, "k1", _wrap(self.k1))
        object.__setattr__(self, "k2", _wrap(self.k2))

    def as_array(self) -> np.ndarray:
        return np.array([self.k1, self.k2])

    def distance(self, other: "TorusPoint") -> float:
        return torus_distance((self.k1, self.k2), (other.k1, other.k2))


def _wrap(x: float) -> float:
    x = float(x) % 1.0
    return 0.0 if x == 1.0 else x


def torus_distance(a, b) -> float:
    d = np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)) % 1.0
    d = np.minimum(d, 1.0 - d)
    return float(np.hypot(d[0], d[1]))


def _as_k(k) -> np.ndarray:
    if isinstance(k, TorusPoint):
        return k.as_array()
    return np.asarray(k, dtype=float)


# -- eigenvalues --------------------------------------------------------------


def eigenvalues_sorted(potential: Potential, k) -> np.ndarray:
    k = _as_k(k)
    return jacobi_eigh(build_numeric_batch(potential, k[0], k[1]), vectors=False)


def _eig(potential: Potential, k: np.ndarray):
    return jacobi_eigh(build_numeric_batch(potential, k[0], k[1]))


@dataclass(frozen=True)
class BandGrid:
    """Sorted eigenvalues on the G x G grid; ``values[i, j]`` is at k = (i/G, j/G)."""

    G: int
    values: np.ndarray = field(repr=False)

    def band(self, m: int) -> np.ndarray:
        return self.values[:, :, m - 1]

    def k_of(self, i: int, j: int) -> TorusPoint:
        return TorusPoint(i / self.G, j / self.G)


@functools.lru_cache(maxsize=8)
def band_grid(potential: Potential, G: int) -> BandGrid:
    ks = np.arange(G) / G
    k1, k2 = np.meshgrid(ks, ks, indexing="ij")
    mats = build_numeric_batch(potential, k1, k2)
    vals = jacobi_eigh(mats, vectors=False)
    vals.setflags(write=False)
    return BandGrid(G, vals)


# -- derivatives --------------------------------------------------------------


def _gap(w: np.ndarray, idx: int) -> float:
    gaps = []
    if idx > 0:
        gaps.append(w[idx] - w[idx - 1])
    if idx < len(w) - 1:
        gaps.append(w[idx + 1] - w[idx])
    return min(gaps) if gaps else math.inf


def _derivatives(potential: Potential, m: int, k: np.ndarray):
    """Value, gradient, Hessian and spectral gap of band m at k."""
    w, v = _eig(potential, k)
    idx = m - 1
    gap = _gap(w, idx)
    d1, d2, d11, d22 = k_derivative_matrices(potential.period, k[0], k[1])
    u = v[:, idx]
    # matrix elements <u_n | dD/dk_j | u_m>
    x1 = v.conj().T @ (d1 @ u)
    x2 = v.conj().T @ (d2 @ u)
    grad = np.array([x1[idx].real, x2[idx].real])
    denom = w[idx] - w
    denom[idx] = np.inf
    with np.errstate(divide="ignore"):
        inv = np.where(np.abs(denom) > 0, 1.0 / denom, 0.0)
    hess = np.empty((2, 2))
    hess[0, 0] = (u.conj() @ d11 @ u).real + 2.0 * np.sum(np.abs(x1) ** 2 * inv)
    hess[1, 1] = (u.conj() @ d22 @ u).real + 2.0 * np.sum(np.abs(x2) ** 2 * inv)
    hess[0, 1] = hess[1, 0] = 2.0 * np.sum((np.conj(x1) * x2).real * inv)
    return w[idx], grad, hess, gap


def band_gradient(potential: Potential, m: int, k, gap_tol: float = GAP_TOL) -> np.ndarray:
    """Hellmann-Feynman gradient of lambda_m at k.

    Raises DegenerateEigenvalueError when lambda_m is within ``gap_tol`` of a
    neighbouring eigenvalue; use :func:`fd_gradient` there.
    """
    k = _as_k(k)
    w, v = _eig(potential, k)
    if _gap(w, m - 1) <= gap_tol:
        raise DegenerateEigenvalueError(f"band {m} is degenerate at k = {tuple(k)}")
    d1, d2, _, _ = k_derivative_matrices(potential.period, k[0], k[1])
    u = v[:, m - 1]
    return np.array([(u.conj() @ d1 @ u).real, (u.conj() @ d2 @ u).real])


def fd_gradient(potential: Potential, m: int, k, h: float = 1e-5) -> np.ndarray:
    k = _as_k(k)
    pts = np.array([k + [h, 0], k - [h, 0], k + [0, h], k - [0, h]])
    vals = jacobi_eigh(build_numeric_batch(potential, pts[:, 0], pts[:, 1]), vectors=False)[:, m - 1]
    return np.array([vals[0] - vals[1], vals[2] - vals[3]]) / (2 * h)


def _band_value(potential: Potential, m: int, k) -> float:
    return float(eigenvalues_sorted(potential, k)[m - 1])


# -- refinement ---------------------------------------------------------------


@dataclass
class _Refined:
    k: np.ndarray
    value: float
    residual: Optional[float]
    converged: bool
    degenerate: bool
    method: str


def _refine_extremum(potential: Potential, m: int, k0, kind: str, max_iter: int = MAX_ITER) -> _Refined:
    """Local minimum (kind='min') or maximum ('max') of lambda_m near k0."""
    s = 1.0 if kind == "min" else -1.0
    k = np.array(k0, dtype=float)
    val, g, H, gap = _derivatives(potential, m, k)
    for _ in range(max_iter):
        if gap <= GAP_TOL:
            break
        gn = float(np.hypot(*g))
        if gn <= EXTREMUM_GRAD_TOL:
            return _Refined(k % 1.0, val, gn, True, False, "newton")
        gs, Hs = s * g, s * H
        ev = np.linalg.eigvalsh(Hs)
        if ev[0] > 0:
            step = -np.linalg.solve(Hs, gs)
        else:
            step = -gs / max(abs(ev[-1]), abs(ev[0]), 1.0)
        norm = float(np.hypot(*step))
        if norm > 0.05:
            step *= 0.05 / norm
        for _ in range(40):
            trial = k + step
            tval, tg, tH, tgap = _derivatives(potential, m, trial)
            if s * tval <= s * val + 1e-14 * max(1.0, abs(val)):
                break
            step *= 0.5
        else:
            break
        k, val, g, H, gap = trial, tval, tg, tH, tgap
    return _nelder_mead(potential, m, k, s)


def _nelder_mead(potential: Potential, m: int, k: np.ndarray, s: float) -> _Refined:
    f = lambda x: s * _band_value(potential, m, x)
    step = 1e-3
    simplex = np.array([k, k + [step, 0.0], k + [0.0, step]])
    res = minimize(
        f, k, method="Nelder-Mead",
        options={"initial_simplex": simplex, "xatol": 1e-12, "fatol": 1e-15, "maxiter": 4000, "maxfev": 8000},
    )
    kf = np.asarray(res.x) % 1.0
    w, _ = _eig(potential, kf)
    degenerate = _gap(w, m - 1) <= 1e-6
    residual = None
    if not degenerate:
        residual = float(np.hypot(*band_gradient(potential, m, kf)))
    converged = bool(res.success) and (degenerate or residual <= 1e-6)
    return _Refined(kf, float(w[m - 1]), residual, converged, degenerate, "nelder-mead")


def _newton_level(potential: Potential, m: int, lam: float, k0, tol_f: float, max_iter: int = 60):
    """Newton iteration on f(k) = lambda_m(k) - lam along the gradient direction."""
    k = np.array(k0, dtype=float)
    for _ in range(max_iter):
        w, _ = _eig(potential, k)
        f = w[m - 1] - lam
        if abs(f) <= tol_f:
            return k % 1.0, float(f)
        try:
            g = band_gradient(potential, m, k)
        except DegenerateEigenvalueError:
            g = fd_gradient(potential, m, k)
        gg = float(g @ g)
        if gg == 0.0:
            break
        step = -f * g / gg
        norm = float(np.hypot(*step))
        if norm > 0.05:
            step *= 0.05 / norm
        k = k + step
    return None, None


# -- grid candidates ----------------------------------------------------------


def _neighbours(a: np.ndarray):
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di or dj:
                yield np.roll(np.roll(a, di, axis=0), dj, axis=1)


def _strict_local(a: np.ndarray, kind: str) -> np.ndarray:
    mask = np.ones(a.shape, dtype=bool)
    for nb in _neighbours(a):
        mask &= (a < nb) if kind == "min" else (a > nb)
    return mask


def _weak_local_min(a: np.ndarray) -> np.ndarray:
    mask = np.ones(a.shape, dtype=bool)
    for nb in _neighbours(a):
        mask &= a <= nb
    return mask


def _dedup(points: list, radius: float = DEDUP_RADIUS) -> list:
    kept: list = []
    for p in points:
        if all(torus_distance(p[0], q[0]) > radius for q in kept):
            kept.append(p)
    return kept


# -- extrema ------------------------------------------------------------------


@dataclass(frozen=True)
class ExtremumRecord:
    band: int
    k: TorusPoint
    value: float
    kind: str
    residual: Optional[float]
    converged: bool = True
    degenerate: bool = False
    method: str = "newton"
    scope: str = "local"

    def as_dict(self) -> dict:
        return {
            "band": self.band,
            "k": [self.k.k1, self.k.k2],
            "value": self.value,
            "kind": self.kind,
            "scope": self.scope,
            "residual": self.residual,
            "converged": self.converged,
            "degenerate": self.degenerate,
            "method": self.method,
        }


def find_extrema(potential: Potential, m: int, G: int = 120, grid: BandGrid | None = None) -> list[ExtremumRecord]:
    """Local extrema of band m from a G x G scan, refined and deduplicated.

    The grid's global minimum and maximum are always refined.  Records whose
    value matches the best refined value of their kind are marked global.
    """
    if G < 16:
        raise ValueError("grid size must be at least 16")
    Q = potential.period.Q
    if not 1 <= m <= Q:
        raise ValueError(f"band index must lie in 1..{Q}")
    grid = grid if grid is not None else band_grid(potential, G)
    vals = grid.band(m)
    records = []
    for kind in ("min", "max"):
        idx = set(zip(*np.nonzero(_strict_local(vals, kind))))
        extreme = np.unravel_index(np.argmin(vals) if kind == "min" else np.argmax(vals), vals.shape)
        idx.add((int(extreme[0]), int(extreme[1])))
        refined = []
        for i, j in sorted(idx):
            r = _refine_extremum(potential, m, (i / grid.G, j / grid.G), kind)
            refined.append((r.k, r))
        refined = _dedup(refined)
        best = min(r.value for _, r in refined) if kind == "min" else max(r.value for _, r in refined)
        for _, r in refined:
            scope = "global" if abs(r.value - best) <= 1e-9 * max(1.0, abs(best)) else "local"
            records.append(
                ExtremumRecord(m, TorusPoint(*r.k), r.value, kind, r.residual, r.converged, r.degenerate, r.method, scope)
            )
    records.sort(key=lambda r: (r.kind, r.value if r.kind == "min" else -r.value, r.k.k1, r.k.k2))
    return records


# -- level sets ---------------------------------------------------------------


def charpoly_residuals(potential: Potential, lam: float, points) -> tuple[list[float], list[float]]:
    """Relative |P(k, lam)| and |(z1 dP/dz1, z2 dP/dz2)| at each point.

    Both are divided by the 1-norm of the coefficients of P( . , lam), which
    bounds |P| on the torus.
    """
    coeffs = specialize_lambda_float(charpoly(potential), lam)
    if not coeffs:
        return [0.0] * len(points), [0.0] * len(points)
    exps = np.array(list(coeffs.keys()), dtype=float)
    c = np.array(list(coeffs.values()))
    scale = float(np.sum(np.abs(c)))
    res_p, res_g = [], []
    for p in points:
        k = _as_k(p)
        mono = c * np.exp(2j * np.pi * (exps @ k))
        res_p.append(abs(np.sum(mono)) / scale)
        res_g.append(float(np.hypot(abs(np.sum(mono * exps[:, 0])), abs(np.sum(mono * exps[:, 1])))) / scale)
    return res_p, res_g


def _infer_kind(vals: np.ndarray, lam: float) -> Optional[str]:
    slack = 1e-9 * max(1.0, abs(lam))
    if lam <= vals.min() + slack:
        return "min"
    if lam >= vals.max() - slack:
        return "max"
    return None


def _level_points(potential: Potential, m: int, lam: float, grid: BandGrid, kind: Optional[str], tol_f: float):
    vals = grid.band(m)
    d = np.abs(vals - lam)
    cand = _weak_local_min(d) | (d < 10 * tol_f)
    idx = sorted(zip(*np.nonzero(cand)))
    found = []
    for i, j in idx:
        k0 = (i / grid.G, j / grid.G)
        if kind is not None:
            r = _refine_extremum(potential, m, k0, kind)
            if abs(r.value - lam) <= tol_f:
                found.append((r.k, r.value))
        else:
            k, f = _newton_level(potential, m, lam, k0, tol_f)
            if k is not None:
                found.append((k, lam + f))
    found = _dedup(found)
    found.sort(key=lambda p: (p[0][0], p[0][1]))
    return [TorusPoint(*k) for k, _ in found]


@dataclass
class LevelSetReport:
    band: int
    lam: float
    kind: Optional[str]
    grid: int
    points: list[TorusPoint]
    count: int
    count_recheck: Optional[int]
    stable: bool
    bounds: Optional[BoundsReport]
    residual_P: Optional[float]
    residual_grad: Optional[float]
    verdicts: dict[str, bool]
    flags: list[str]

    @property
    def passed(self) -> bool:
        return bool(self.verdicts) and all(self.verdicts.values()) and not self.flags

    def as_dict(self) -> dict:
        return {
            "band": self.band,
            "lambda": self.lam,
            "kind": self.kind,
            "grid": self.grid,
            "points": [[p.k1, p.k2] for p in self.points],
            "count": self.count,
            "count_recheck": self.count_recheck,
            "stable": self.stable,
            "bounds": self.bounds.as_dict() if self.bounds else None,
            "residual_P": self.residual_P,
            "residual_grad": self.residual_grad,
            "verdicts": dict(self.verdicts),
            "flags": list(self.flags),
            "passed": self.passed,
        }


def count_level_set(
    potential: Potential,
    m: int,
    lam: float,
    G: int = 120,
    kind: Optional[str] = None,
    tol_f: float = TOL_F,
    tol_p: float = TOL_P,
    tol_grad: float = TOL_GRAD,
    recheck: bool = True,
) -> LevelSetReport:
    """Locate and count ``{k : lambda_m(k) = lam}`` and test it against the bounds.

    For an extremal ``lam`` (``kind`` given, or inferred when ``lam`` is at or
    beyond the sampled range of the band) every level point is a local
    extremum of the same kind, so candidates are refined as extrema and kept
    when their value matches ``lam``.  Otherwise Newton's method on
    ``lambda_m - lam`` is used and the report is flagged non-extremal.
    Counting is repeated on a 2G grid when ``recheck`` is set.
    """
    Q = potential.period.Q
    if not 1 <= m <= Q:
        raise ValueError(f"band index must lie in 1..{Q}")
    lam = float(lam)
    grid = band_grid(potential, G)
    if kind is None:
        kind = _infer_kind(grid.band(m), lam)
    flags = []
    if kind is None:
        flags.append("non-extremal: level value lies inside the band")
    points = _level_points(potential, m, lam, grid, kind, tol_f)
    count_recheck = None
    stable = True
    if recheck:
        count_recheck = len(_level_points(potential, m, lam, band_grid(potential, 2 * G), kind, tol_f))
        stable = count_recheck == len(points)
        if not stable:
            flags.append(f"unstable: count {len(points)} at G={G} but {count_recheck} at G={2 * G}")
    if not points:
        flags.append("empty: no candidate converged to the level value" + (" (non-extremal)" if kind else ""))
    res_p = res_g = None
    if points:
        rp, rg = charpoly_residuals(potential, lam, points)
        res_p, res_g = max(rp), max(rg)
        if res_p > tol_p:
            flags.append(f"residual_P {res_p:.3e} exceeds {tol_p:g}")
        if res_g > tol_grad:
            flags.append(f"residual_grad {res_g:.3e} exceeds {tol_grad:g}")
    bounds = None
    verdicts: dict[str, bool] = {}
    if potential.period.coprime:
        bounds = bounds_report(potential.period)
        verdicts = {name: len(points) <= b for name, b in bounds.items()}
    else:
        flags.append("hypothesis unmet: periods are not coprime")
    return LevelSetReport(
        band=m,
        lam=lam,
        kind=kind,
        grid=G,
        points=points,
        count=len(points),
        count_recheck=count_recheck,
        stable=stable,
        bounds=bounds,
        residual_P=res_p,
        residual_grad=res_g,
        verdicts=verdicts,
        flags=flags,
    )

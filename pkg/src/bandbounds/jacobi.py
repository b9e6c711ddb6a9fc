"""Cyclic Jacobi eigensolver for stacks of Hermitian matrices.

Each sweep visits every off-diagonal pair once, in round-robin order: a
round consists of disjoint pairs, so its rotations commute and are applied
to the whole batch at once.  Iteration stops when the off-diagonal Frobenius
norm of every matrix is at most ``tol`` times its Frobenius norm.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

__all__ = ["jacobi_eigh", "JacobiNotConverged"]


class JacobiNotConverged(RuntimeError):
    pass


@lru_cache(maxsize=None)
def _rounds(n: int) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    """Round-robin tournament schedule covering all pairs (p < q) of range(n)."""
    players = list(range(n)) + ([-1] if n % 2 else [])
    m = len(players)
    rounds = []
    for _ in range(m - 1):
        ps, qs = [], []
        for i in range(m // 2):
            a, b = players[i], players[m - 1 - i]
            if a >= 0 and b >= 0:
                ps.append(min(a, b))
                qs.append(max(a, b))
        rounds.append((np.array(ps), np.array(qs)))
        players = [players[0], players[-1]] + players[1:-1]
    return tuple(rounds)


@lru_cache(maxsize=None)
def _offmask(n: int) -> np.ndarray:
    return 1.0 - np.eye(n)


def _off_ratio(a: np.ndarray) -> np.ndarray:
    n = a.shape[-1]
    sq = np.abs(a) ** 2
    total = np.sum(sq, axis=(-2, -1))
    off = np.sum(sq * _offmask(n), axis=(-2, -1))
    return np.sqrt(off), np.sqrt(total)


_CHUNK = 256  # keeps per-round temporaries cache-resident


def jacobi_eigh(
    a: np.ndarray,
    vectors: bool = True,
    tol: float = 1e-13,
    max_sweeps: int = 60,
):
    """Eigen-decomposition of Hermitian matrices of shape ``(..., n, n)``.

    Returns ascending eigenvalues and, if ``vectors``, unit eigenvectors as
    columns (``w``, ``v`` with ``a @ v = v * w``).
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise ValueError("square matrices required")
    batch_shape = a.shape[:-2]
    n = a.shape[-1]
    flat = a.reshape((-1, n, n))
    parts = [_jacobi_block(flat[i : i + _CHUNK], vectors, tol, max_sweeps) for i in range(0, flat.shape[0], _CHUNK)]
    if not parts:
        parts = [_jacobi_block(flat, vectors, tol, max_sweeps)]
    if not vectors:
        return np.concatenate(parts).reshape(batch_shape + (n,))
    w = np.concatenate([p[0] for p in parts]).reshape(batch_shape + (n,))
    v = np.concatenate([p[1] for p in parts]).reshape(batch_shape + (n, n))
    return w, v


def _jacobi_block(a: np.ndarray, vectors: bool, tol: float, max_sweeps: int):
    n = a.shape[-1]
    a = 0.5 * (a + np.conj(np.swapaxes(a, -1, -2)))
    v = np.broadcast_to(np.eye(n, dtype=complex), a.shape).copy() if vectors else None
    schedule = _rounds(n) if n > 1 else ()

    active = np.arange(a.shape[0])
    for _ in range(max_sweeps):
        off, norm = _off_ratio(a[active])
        keep = off > tol * norm
        active = active[keep]
        if active.size == 0:
            break
        sub = a[active]
        vsub = v[active] if vectors else None
        for ps, qs in schedule:
            app = sub[:, ps, ps].real
            aqq = sub[:, qs, qs].real
            apq = sub[:, ps, qs]
            mag = np.abs(apq)
            nz = mag > 0.0
            safe = np.where(nz, mag, 1.0)
            phase = np.where(nz, apq / safe, 1.0)  # exp(i phi)
            diff = aqq - app
            # t = tan of the rotation angle, smaller root, written without overflow
            t = 2.0 * mag * np.where(diff >= 0, 1.0, -1.0) / (np.abs(diff) + np.hypot(diff, 2.0 * mag) + (~nz))
            t = np.where(nz, t, 0.0)
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            e = np.conj(phase)  # exp(-i phi)
            # A <- A U with U[:, p] = c e_p - s e^{-i phi} e_q, U[:, q] = s e_p + c e^{-i phi} e_q
            colp = sub[:, :, ps]
            colq = sub[:, :, qs]
            sub[:, :, ps] = c[:, None, :] * colp - (s * e)[:, None, :] * colq
            sub[:, :, qs] = s[:, None, :] * colp + (c * e)[:, None, :] * colq
            rowp = sub[:, ps, :]
            rowq = sub[:, qs, :]
            sub[:, ps, :] = c[:, :, None] * rowp - (s * phase)[:, :, None] * rowq
            sub[:, qs, :] = s[:, :, None] * rowp + (c * phase)[:, :, None] * rowq
            sub[:, ps, qs] = 0.0
            sub[:, qs, ps] = 0.0
            if vectors:
                vp = vsub[:, :, ps]
                vq = vsub[:, :, qs]
                vsub[:, :, ps] = c[:, None, :] * vp - (s * e)[:, None, :] * vq
                vsub[:, :, qs] = s[:, None, :] * vp + (c * e)[:, None, :] * vq
        a[active] = sub
        if vectors:
            v[active] = vsub
    else:
        off, norm = _off_ratio(a[active])
        if np.any(off > tol * norm):
            raise JacobiNotConverged(f"Jacobi did not converge in {max_sweeps} sweeps")

    w = np.real(a[:, np.arange(n), np.arange(n)])
    order = np.argsort(w, axis=-1, kind="stable")
    w = np.take_along_axis(w, order, axis=-1)
    if not vectors:
        return w
    return w, np.take_along_axis(v, order[:, None, :], axis=-1)

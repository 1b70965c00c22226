"""Dense real Schur decomposition (Hessenberg + Francis double-shift QR).

``real_schur_dense`` returns ``A = Q T Q^T`` with ``T`` quasi-upper-triangular;
2x2 diagonal blocks only hold complex-conjugate eigenvalue pairs. The native
sweep is plain numpy and is meant for the desk-scale sizes used in the tests;
``backend="lapack"`` hands the same contract to LAPACK for larger inputs.
"""
from __future__ import annotations

import numpy as np
import scipy.linalg

from .krylov import DENSE_GUARD, ConvergenceError

__all__ = [
    "hessenberg",
    "real_schur_dense",
    "schur_blocks",
    "schur_eigenvalues",
    "schur_right_eigenvector",
]

_EPS = np.finfo(float).eps


def _house(x):
    """Householder vector ``v`` (``v[0] = 1``) and ``beta`` with ``(I - beta v v^T) x = +-|x| e1``."""
    sigma = x[1:] @ x[1:]
    v = x.astype(float).copy()
    v[0] = 1.0
    if sigma == 0.0:
        return v, 0.0
    mu = np.sqrt(x[0] * x[0] + sigma)
    v0 = x[0] - mu if x[0] <= 0 else -sigma / (x[0] + mu)
    beta = 2.0 * v0 * v0 / (sigma + v0 * v0)
    v[1:] = x[1:] / v0
    return v, beta


def hessenberg(a):
    """Orthogonal reduction ``A = Q H Q^T`` with ``H`` upper Hessenberg."""
    h = np.array(a, dtype=float)
    n = h.shape[0]
    q = np.eye(n)
    for k in range(n - 2):
        v, beta = _house(h[k + 1:, k])
        if beta == 0.0:
            continue
        h[k + 1:, k:] -= beta * np.outer(v, v @ h[k + 1:, k:])
        h[:, k + 1:] -= beta * np.outer(h[:, k + 1:] @ v, v)
        q[:, k + 1:] -= beta * np.outer(q[:, k + 1:] @ v, v)
        h[k + 2:, k] = 0.0
    return h, q


def _rot(h, q, i, c, s):
    """Apply the plane rotation ``G = [[c, s], [-s, c]]`` as ``G^T H G`` on rows/cols ``i, i+1``."""
    rows = h[i:i + 2, :].copy()
    h[i, :] = c * rows[0] + s * rows[1]
    h[i + 1, :] = -s * rows[0] + c * rows[1]
    cols = h[:, i:i + 2].copy()
    h[:, i] = c * cols[:, 0] + s * cols[:, 1]
    h[:, i + 1] = -s * cols[:, 0] + c * cols[:, 1]
    qc = q[:, i:i + 2].copy()
    q[:, i] = c * qc[:, 0] + s * qc[:, 1]
    q[:, i + 1] = -s * qc[:, 0] + c * qc[:, 1]


def _split_real_block(h, q, i):
    """Triangularize the 2x2 block at ``i`` if its eigenvalues are real."""
    a, b, c, d = h[i, i], h[i, i + 1], h[i + 1, i], h[i + 1, i + 1]
    if c == 0.0:
        return
    p = 0.5 * (a - d)
    disc = p * p + b * c
    if disc < 0.0:
        return
    lam = 0.5 * (a + d) + (np.sqrt(disc) if p >= 0 else -np.sqrt(disc))
    x = np.array([b, lam - a])
    alt = np.array([lam - d, c])
    if np.abs(alt).sum() > np.abs(x).sum():
        x = alt
    r = np.hypot(x[0], x[1])
    if r == 0.0:
        return
    cs, sn = x[0] / r, x[1] / r
    _rot(h, q, i, cs, sn)
    h[i + 1, i] = 0.0


def _native_schur(a, max_sweeps_per_eig):
    h, q = hessenberg(a)
    n = h.shape[0]
    hnorm = max(np.abs(h).max(), 1e-300)
    ihi = n - 1
    its = 0
    total = 0
    cap = max_sweeps_per_eig * max(n, 1)
    while ihi > 0:
        lo = ihi
        while lo > 0:
            scale = abs(h[lo - 1, lo - 1]) + abs(h[lo, lo])
            if scale == 0.0:
                scale = hnorm
            if abs(h[lo, lo - 1]) <= _EPS * scale:
                h[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == ihi:
            ihi -= 1
            its = 0
            continue
        if lo == ihi - 1:
            _split_real_block(h, q, ihi - 1)
            ihi -= 2
            its = 0
            continue
        its += 1
        total += 1
        if total > cap:
            raise ConvergenceError(f"Francis QR did not converge after {total} sweeps")
        if its % 10 == 0:
            # exceptional shift breaks symmetric stagnation cycles
            ex = abs(h[ihi, ihi - 1]) + abs(h[ihi - 1, ihi - 2])
            s, t = 1.5 * ex, ex * ex
        else:
            s = h[ihi - 1, ihi - 1] + h[ihi, ihi]
            t = h[ihi - 1, ihi - 1] * h[ihi, ihi] - h[ihi - 1, ihi] * h[ihi, ihi - 1]
        x = h[lo, lo] * h[lo, lo] + h[lo, lo + 1] * h[lo + 1, lo] - s * h[lo, lo] + t
        y = h[lo + 1, lo] * (h[lo, lo] + h[lo + 1, lo + 1] - s)
        z = h[lo + 1, lo] * h[lo + 2, lo + 1]
        for k in range(lo, ihi - 1):
            v, beta = _house(np.array([x, y, z]))
            if beta != 0.0:
                r = max(lo, k - 1)
                blk = h[k:k + 3, r:]
                blk -= beta * np.outer(v, v @ blk)
                rr = min(k + 3, ihi)
                blk = h[: rr + 1, k:k + 3]
                blk -= beta * np.outer(blk @ v, v)
                qb = q[:, k:k + 3]
                qb -= beta * np.outer(qb @ v, v)
            x = h[k + 1, k]
            y = h[k + 2, k]
            if k < ihi - 2:
                z = h[k + 3, k]
        v, beta = _house(np.array([x, y]))
        if beta != 0.0:
            blk = h[ihi - 1:ihi + 1, ihi - 2:]
            blk -= beta * np.outer(v, v @ blk)
            blk = h[: ihi + 1, ihi - 1:ihi + 1]
            blk -= beta * np.outer(blk @ v, v)
            qb = q[:, ihi - 1:ihi + 1]
            qb -= beta * np.outer(qb @ v, v)
    t = np.triu(h, -1)
    return q, t


def real_schur_dense(a, *, backend: str = "native", dense_guard: int = DENSE_GUARD,
                     max_sweeps_per_eig: int = 30):
    """Real Schur form ``A = Q T Q^T``.

    Returns ``(Q, T)``; ``Q`` is orthogonal and ``T`` has only 1x1 and 2x2
    diagonal blocks, the latter carrying complex-conjugate pairs.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("real_schur_dense needs a square matrix")
    n = a.shape[0]
    if n > dense_guard:
        raise ValueError(f"n={n} exceeds dense_guard={dense_guard}")
    if n == 0:
        return np.zeros((0, 0)), np.zeros((0, 0))
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    if backend == "native":
        return _native_schur(a, max_sweeps_per_eig)
    if backend == "lapack":
        t, q = scipy.linalg.schur(a, output="real")
        return q, t
    raise ValueError(f"unknown backend {backend!r}")


def schur_blocks(t):
    """Start index and size (1 or 2) of every diagonal block of ``T``."""
    n = t.shape[0]
    scale = max(np.abs(t).max(), 1e-300) if n else 1.0
    blocks = []
    i = 0
    while i < n:
        if i + 1 < n and abs(t[i + 1, i]) > 100 * _EPS * scale:
            blocks.append((i, 2))
            i += 2
        else:
            blocks.append((i, 1))
            i += 1
    return blocks


def _block_eigs(t, i, size):
    if size == 1:
        return [complex(t[i, i])]
    a, b, c, d = t[i, i], t[i, i + 1], t[i + 1, i], t[i + 1, i + 1]
    half = 0.5 * (a + d)
    disc = 0.25 * (a - d) ** 2 + b * c
    if disc >= 0:
        r = np.sqrt(disc)
        return [complex(half + r), complex(half - r)]
    r = np.sqrt(-disc)
    return [complex(half, r), complex(half, -r)]


def schur_eigenvalues(t):
    """Eigenvalues with the diagonal position of their block: ``[(lam, i, size)]``."""
    out = []
    for i, size in schur_blocks(t):
        for lam in _block_eigs(t, i, size):
            out.append((lam, i, size))
    return out


def _solve_small(m, rhs, tiny):
    if m.shape[0] == 1:
        d = m[0, 0] if abs(m[0, 0]) > tiny else tiny
        return rhs / d
    try:
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        if abs(det) <= tiny * tiny:
            m = m + tiny * np.eye(2)
        return np.linalg.solve(m, rhs)
    except np.linalg.LinAlgError:
        return np.linalg.lstsq(m + tiny * np.eye(2), rhs, rcond=None)[0]


def schur_right_eigenvector(q, t, lam, i, size):
    """Right eigenvector of ``Q T Q^T`` for eigenvalue ``lam`` of block ``(i, size)``.

    Quasi-triangular back substitution on ``T - lam I`` followed by ``Q y``;
    normalized to unit 2-norm with its largest entry real and positive.
    """
    n = t.shape[0]
    tiny = max(np.abs(t).max(), 1.0) * _EPS * 10
    y = np.zeros(n, dtype=complex)
    if size == 1:
        y[i] = 1.0
    else:
        a, b, c, d = t[i, i], t[i, i + 1], t[i + 1, i], t[i + 1, i + 1]
        cand1 = np.array([b, lam - a], dtype=complex)
        cand2 = np.array([lam - d, c], dtype=complex)
        y[i:i + 2] = cand1 if np.abs(cand1).sum() >= np.abs(cand2).sum() else cand2
    blocks = [bl for bl in schur_blocks(t) if bl[0] < i]
    for j, bs in reversed(blocks):
        rhs = -(t[j:j + bs, j + bs:] @ y[j + bs:])
        m = t[j:j + bs, j:j + bs] - lam * np.eye(bs)
        y[j:j + bs] = _solve_small(m.astype(complex), rhs, tiny)
    x = q @ y
    x /= np.linalg.norm(x)
    p = int(np.argmax(np.abs(x)))
    x *= np.conj(x[p]) / abs(x[p])
    return x

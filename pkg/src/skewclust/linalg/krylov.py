"""Restarted Lanczos kernels: truncated SVD and symmetric eigenpairs.

Every kernel keeps the full Krylov basis together with its image under the
operator, so the Rayleigh-Ritz projection is formed explicitly and restarts
simply compress both blocks onto the wanted Ritz vectors (a Krylov-Schur style
thick restart). Reorthogonalization is full: every new vector is projected
against the whole basis twice.

Skew-symmetric inputs get their own path. Their singular values come in equal
pairs, and a bidiagonalization started from a single vector only ever sees one
direction of each degenerate pair. Lanczos on ``K`` itself does not have that
problem because ``K`` rotates each pair plane onto itself, so ``{w, Kw}`` spans
it. On a skew matrix, Golub-Kahan bidiagonalization produces exactly the odd
and even vectors of this Lanczos process, so the combined basis is the same
Krylov space with both copies of each singular value available.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

__all__ = [
    "TAU_SVD",
    "TAU_ORTH",
    "TAU_PAIR",
    "DENSE_CUTOFF",
    "DENSE_GUARD",
    "TruncatedSVD",
    "ConvergenceError",
    "RankDeficientError",
    "truncated_svd",
    "symmetric_eigs",
    "is_skew_symmetric",
]

TAU_SVD = 1e-10
TAU_ORTH = 1e-10
TAU_PAIR = 1e-6
DENSE_CUTOFF = 64
DENSE_GUARD = 10000
RANK_TOL = 1e-10


class ConvergenceError(RuntimeError):
    """Iteration cap reached; ``residuals`` holds the best relative residuals."""

    def __init__(self, message: str, residuals=None):
        super().__init__(message)
        self.residuals = None if residuals is None else np.asarray(residuals)


class RankDeficientError(ValueError):
    """More singular triplets requested than the matrix has nonzero values."""


@dataclass(frozen=True)
class TruncatedSVD:
    """Leading singular triplets ``A V = U diag(sigma)``.

    ``skew`` records that the input was skew-symmetric, in which case
    ``sigma`` comes in equal pairs and each pair's left vectors span one real
    Schur plane. ``residuals`` are ``max(|A v - s u|, |A^T u - s v|)``.
    """

    sigma: np.ndarray
    U: np.ndarray
    V: np.ndarray
    residuals: np.ndarray
    skew: bool = False
    method: str = "dense"
    restarts: int = 0
    matvecs: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def l(self) -> int:
        return int(self.sigma.shape[0])


def _as_operator(a):
    # accept SkewMatrix-like objects without importing graph (no cycle)
    if hasattr(a, "matrix") and hasattr(a, "tag"):
        a = a.matrix
    if sp.issparse(a):
        return sp.csr_matrix(a, dtype=float)
    return np.asarray(a, dtype=float)


def is_skew_symmetric(a, tol: float = 0.0) -> bool:
    a = _as_operator(a)
    if a.shape[0] != a.shape[1]:
        return False
    s = a + a.T
    if sp.issparse(s):
        s = sp.csr_matrix(s)
        if s.nnz == 0:
            return True
        dev = np.abs(s.data).max()
        scale = np.abs(a.data).max() if a.nnz else 0.0
    else:
        dev = np.abs(s).max() if s.size else 0.0
        scale = np.abs(a).max() if a.size else 0.0
    return dev <= tol * scale


def _orthogonalize(z, basis):
    """Project ``z`` off ``basis`` twice (classical Gram-Schmidt, repeated)."""
    if basis.shape[1] == 0:
        return z
    z = z - basis @ (basis.T @ z)
    z = z - basis @ (basis.T @ z)
    return z


def _fresh_direction(rng, basis, n):
    """Random unit vector orthogonal to ``basis`` (used on Krylov breakdown)."""
    for _ in range(5):
        z = _orthogonalize(rng.standard_normal(n), basis)
        nz = np.linalg.norm(z)
        if nz > 1e-8:
            return z / nz
    raise ConvergenceError("could not extend an orthonormal basis")


def _fix_signs(u, v):
    """Make the largest-magnitude entry of each left vector positive."""
    if u.size == 0:
        return u, v
    idx = np.argmax(np.abs(u), axis=0)
    sgn = np.sign(u[idx, np.arange(u.shape[1])])
    sgn[sgn == 0] = 1.0
    return u * sgn, v * sgn


def _basis_size(l, n, ncv):
    if ncv is None:
        ncv = max(2 * l + 24, 40)
    return int(min(n, max(ncv, l + 2)))


def _dense_svd(a, l, skew):
    dense = a.toarray() if sp.issparse(a) else np.array(a, dtype=float)
    U, s, Vt = np.linalg.svd(dense, full_matrices=False)
    U, V = U[:, :l], Vt[:l].T
    s = s[:l]
    U, V = _fix_signs(U, V)
    res = np.maximum(
        np.linalg.norm(dense @ V - U * s, axis=0),
        np.linalg.norm(dense.T @ U - V * s, axis=0),
    )
    return TruncatedSVD(s, U, V, res, skew=skew, method="dense")


def _pair_complete(p, s, limit):
    """Grow ``p`` so the kept block does not split a degenerate pair."""
    while p < limit and s[p - 1] - s[p] <= 1e-8 * max(s[0], 1e-300):
        p += 1
    return p


def _skew_lanczos_svd(k, l, ncv, max_restarts, tol, rng):
    n = k.shape[0]
    m = _basis_size(l, n, ncv)
    W = np.zeros((n, m))
    KW = np.zeros((n, m))
    w = rng.standard_normal(n)
    W[:, 0] = w / np.linalg.norm(w)
    nb, nk, matvecs = 1, 0, 0
    best = None
    for restart in range(max_restarts + 1):
        while nk < m:
            z = k @ W[:, nk]
            KW[:, nk] = z
            nk += 1
            matvecs += 1
            if nb < m:
                z = _orthogonalize(z, W[:, :nb])
                beta = np.linalg.norm(z)
                scale = max(np.linalg.norm(KW[:, nk - 1]), 1e-300)
                if beta <= 1e-10 * scale:
                    z = _fresh_direction(rng, W[:, :nb], n)
                else:
                    z = z / beta
                W[:, nb] = z
                nb += 1
        H = W.T @ KW
        H = 0.5 * (H - H.T)
        Y, s, Zt = np.linalg.svd(H)
        Z = Zt.T
        smax = max(s[0], 1e-300)
        res = np.maximum(
            np.linalg.norm(KW @ Z[:, :l] - (W @ Y[:, :l]) * s[:l], axis=0),
            np.linalg.norm(-KW @ Y[:, :l] - (W @ Z[:, :l]) * s[:l], axis=0),
        )
        if best is None or res.max() < best.max():
            best = res / smax
        if np.all(res <= tol * smax) or m == n:
            U = W @ Y[:, :l]
            V = W @ Z[:, :l]
            U, V = _fix_signs(U, V)
            return TruncatedSVD(
                s[:l].copy(), U, V, res, skew=True, method="lanczos",
                restarts=restart, matvecs=matvecs,
            )
        # thick restart onto the leading Ritz plane block
        p = min(m - 2, max(l + (m - l) // 2, l + 2))
        p = _pair_complete(p, s, m - 2)
        W[:, :p] = W @ Y[:, :p]
        KW[:, :p] = KW @ Y[:, :p]
        R = KW[:, :p] - W[:, :p] @ (W[:, :p].T @ KW[:, :p])
        j = int(np.argmax(np.linalg.norm(R, axis=0)))
        z = _orthogonalize(R[:, j], W[:, :p])
        nz = np.linalg.norm(z)
        if nz <= 1e-12 * smax:
            z = _fresh_direction(rng, W[:, :p], n)
        else:
            z = z / nz
        W[:, p] = z
        W[:, p + 1:] = 0.0
        KW[:, p:] = 0.0
        nb, nk = p + 1, p
    raise ConvergenceError(
        f"skew Lanczos did not converge in {max_restarts} restarts", best
    )


def _gkl_svd(a, l, ncv, max_restarts, tol, rng):
    nrow, ncol = a.shape
    m = _basis_size(l, min(nrow, ncol), ncv)
    at = a.T.tocsr() if sp.issparse(a) else a.T
    V = np.zeros((ncol, m))
    AV = np.zeros((nrow, m))
    U = np.zeros((nrow, m))
    ATU = np.zeros((ncol, m))
    v = rng.standard_normal(ncol)
    V[:, 0] = v / np.linalg.norm(v)
    start, matvecs = 0, 0
    best = None
    for restart in range(max_restarts + 1):
        for j in range(start, m):
            AV[:, j] = a @ V[:, j]
            matvecs += 1
            u = _orthogonalize(AV[:, j], U[:, :j])
            nu = np.linalg.norm(u)
            if nu <= 1e-10 * max(np.linalg.norm(AV[:, j]), 1e-300):
                u = _fresh_direction(rng, U[:, :j], nrow)
            else:
                u = u / nu
            U[:, j] = u
            ATU[:, j] = at @ u
            matvecs += 1
            if j + 1 < m:
                v = _orthogonalize(ATU[:, j], V[:, : j + 1])
                nv = np.linalg.norm(v)
                if nv <= 1e-10 * max(np.linalg.norm(ATU[:, j]), 1e-300):
                    v = _fresh_direction(rng, V[:, : j + 1], ncol)
                else:
                    v = v / nv
                V[:, j + 1] = v
        B = U.T @ AV
        X, s, Yt = np.linalg.svd(B)
        Y = Yt.T
        smax = max(s[0], 1e-300)
        res = np.maximum(
            np.linalg.norm(AV @ Y[:, :l] - (U @ X[:, :l]) * s[:l], axis=0),
            np.linalg.norm(ATU @ X[:, :l] - (V @ Y[:, :l]) * s[:l], axis=0),
        )
        if best is None or res.max() < best.max():
            best = res / smax
        if np.all(res <= tol * smax) or m == min(nrow, ncol):
            Uo, Vo = _fix_signs(U @ X[:, :l], V @ Y[:, :l])
            return TruncatedSVD(
                s[:l].copy(), Uo, Vo, res, skew=False, method="lanczos",
                restarts=restart, matvecs=matvecs,
            )
        p = min(m - 1, max(l + (m - l) // 2, l + 1))
        V[:, :p] = V @ Y[:, :p]
        AV[:, :p] = AV @ Y[:, :p]
        U[:, :p] = U @ X[:, :p]
        ATU[:, :p] = ATU @ X[:, :p]
        R = ATU[:, :p] - V[:, :p] @ (V[:, :p].T @ ATU[:, :p])
        j = int(np.argmax(np.linalg.norm(R, axis=0)))
        z = _orthogonalize(R[:, j], V[:, :p])
        nz = np.linalg.norm(z)
        if nz <= 1e-12 * smax:
            z = _fresh_direction(rng, V[:, :p], ncol)
        else:
            z = z / nz
        V[:, p] = z
        V[:, p + 1:] = 0.0
        U[:, p:] = 0.0
        AV[:, p:] = 0.0
        ATU[:, p:] = 0.0
        start = p
    raise ConvergenceError(f"GKL did not converge in {max_restarts} restarts", best)


def truncated_svd(
    a,
    l: int,
    *,
    max_iter: int = 500,
    tol: float = TAU_SVD,
    seed: int = 0,
    ncv: int | None = None,
    dense_cutoff: int = DENSE_CUTOFF,
    check_rank: bool = True,
) -> TruncatedSVD:
    """Leading ``l`` singular triplets of a real (sparse) matrix.

    Parameters
    ----------
    a
        Sparse or dense real matrix, or a ``SkewMatrix``.
    l
        Number of triplets, ``1 <= l <= min(a.shape)``.
    max_iter
        Maximum number of thick restarts.
    tol
        Target for ``residual / sigma[0]``.
    seed
        Seeds the Krylov start vector; results are reproducible per seed.
    ncv
        Krylov basis size (default ``max(2l + 24, 40)``).
    dense_cutoff
        Matrices with ``min(a.shape) <= dense_cutoff`` use a dense SVD.
    check_rank
        Raise :class:`RankDeficientError` if ``sigma[l-1]`` is numerically 0.
    """
    a = _as_operator(a)
    nmin = min(a.shape)
    if not 1 <= l <= nmin:
        raise ValueError(f"l={l} out of range 1..{nmin}")
    nnz = a.nnz if sp.issparse(a) else np.count_nonzero(a)
    if nnz == 0:
        raise ValueError("matrix has no nonzero entries")
    skew = is_skew_symmetric(a)
    rng = np.random.default_rng(seed)
    if nmin <= dense_cutoff or l >= nmin - 1:
        out = _dense_svd(a, l, skew)
    elif skew:
        out = _skew_lanczos_svd(a, l, ncv, max_iter, tol, rng)
    else:
        out = _gkl_svd(a, l, ncv, max_iter, tol, rng)
    if check_rank and out.sigma[-1] <= RANK_TOL * out.sigma[0]:
        raise RankDeficientError(
            f"requested l={l} singular triplets but sigma[{l - 1}] = "
            f"{out.sigma[-1]:.3e} is numerically zero (rank < l)"
        )
    return out


def symmetric_eigs(
    a,
    k: int,
    *,
    max_iter: int = 500,
    tol: float = 1e-10,
    seed: int = 0,
    ncv: int | None = None,
    dense_cutoff: int = DENSE_CUTOFF,
    sym_tol: float = 1e-12,
):
    """``k`` algebraically largest eigenpairs of a symmetric matrix.

    Returns ``(values, vectors)`` with values in nonincreasing order.
    """
    a = _as_operator(a)
    n = a.shape[0]
    if a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    if not 1 <= k < n:
        raise ValueError(f"k={k} out of range 1..{n - 1}")
    asym = a - a.T
    dev = abs(asym).max() if sp.issparse(asym) else np.abs(asym).max()
    scale = abs(a).max() if sp.issparse(a) else np.abs(a).max()
    if dev > sym_tol * max(scale, 1e-300):
        raise ValueError(f"matrix is not symmetric (max |A - A^T| = {dev:.3e})")

    if n <= dense_cutoff:
        dense = a.toarray() if sp.issparse(a) else a
        vals, vecs = np.linalg.eigh(0.5 * (dense + dense.T))
        order = np.argsort(-vals, kind="stable")[:k]
        vecs, _ = _fix_signs(vecs[:, order], vecs[:, order])
        return vals[order], vecs

    rng = np.random.default_rng(seed)
    m = _basis_size(k, n, ncv)
    W = np.zeros((n, m))
    AW = np.zeros((n, m))
    w = rng.standard_normal(n)
    W[:, 0] = w / np.linalg.norm(w)
    nb, nk = 1, 0
    best = None
    for _restart in range(max_iter + 1):
        while nk < m:
            z = a @ W[:, nk]
            AW[:, nk] = z
            nk += 1
            if nb < m:
                z = _orthogonalize(z, W[:, :nb])
                beta = np.linalg.norm(z)
                if beta <= 1e-10 * max(np.linalg.norm(AW[:, nk - 1]), 1e-300):
                    z = _fresh_direction(rng, W[:, :nb], n)
                else:
                    z = z / beta
                W[:, nb] = z
                nb += 1
        H = W.T @ AW
        H = 0.5 * (H + H.T)
        theta, S = np.linalg.eigh(H)
        order = np.argsort(-theta, kind="stable")
        theta, S = theta[order], S[:, order]
        scale = max(np.abs(theta).max(), 1e-300)
        res = np.linalg.norm(AW @ S[:, :k] - (W @ S[:, :k]) * theta[:k], axis=0)
        if best is None or res.max() < best.max():
            best = res / scale
        if np.all(res <= tol * scale) or m == n:
            vecs = W @ S[:, :k]
            vecs, _ = _fix_signs(vecs, vecs)
            return theta[:k].copy(), vecs
        p = min(m - 1, max(k + (m - k) // 2, k + 1))
        W[:, :p] = W @ S[:, :p]
        AW[:, :p] = AW @ S[:, :p]
        R = AW[:, :p] - W[:, :p] @ (W[:, :p].T @ AW[:, :p])
        j = int(np.argmax(np.linalg.norm(R, axis=0)))
        z = _orthogonalize(R[:, j], W[:, :p])
        nz = np.linalg.norm(z)
        z = _fresh_direction(rng, W[:, :p], n) if nz <= 1e-12 * scale else z / nz
        W[:, p] = z
        W[:, p + 1:] = 0.0
        AW[:, p:] = 0.0
        nb, nk = p + 1, p
    raise ConvergenceError(f"Lanczos did not converge in {max_iter} restarts", best)

"""Clustering pipelines: skew-symmetric clustering (full, reduced, search),
Hermitian clustering (low-dimensional and dense forms), DD-Sym, SVD-M and BCS.

Every pipeline maps a :class:`~skewclust.graph.Digraph` to a
:class:`TimedPartition` whose timings follow a three-way split: ``setup``
(forming K, A, P or the SVD-M factors' input), ``embed`` (factorization and
vector selection) and ``kmeans`` (clustering only).
"""
from __future__ import annotations

import dataclasses
import time
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .graph import Digraph, build_skew, normalize_skew, weak_connectivity
from .kmeans import Partition, kmeans
from .linalg import (
    DENSE_GUARD,
    TAU_PAIR,
    Embedding,
    RankDeficientError,
    TruncatedSVD,
    projector_embedding,
    real_schur_dense,
    schur_eigenvalues,
    schur_pairs_from_svd,
    schur_right_eigenvector,
    schur_vectors,
    symmetric_eigs,
    truncated_svd,
)
from .linalg.krylov import RANK_TOL

__all__ = [
    "METHODS",
    "ClusterSpec",
    "TimedPartition",
    "skew_f",
    "skew_r",
    "skew_s",
    "herm",
    "herm_dense",
    "dd_sym",
    "svd_m",
    "bcs",
    "trade_flow_relaxation",
    "select_gap",
    "skew_embedding_dim",
    "run",
]

METHODS = ("skew_f", "skew_r", "skew_s", "herm", "herm_dense", "dd_sym", "svd_m", "bcs")
NORMS = ("none", "rw", "sym")

# flags beyond the three documented ones are informational
GAP_DEGENERATE = "gap_degenerate"
REGULARIZED = "regularized"
RESTRICTED = "restricted_to_giant_component"
DISCONNECTED = "disconnected"
NON_NORMAL = "non_normal"


@dataclass(frozen=True)
class ClusterSpec:
    """Method name plus its parameters.

    ``l_override`` is in real singular-vector units and must be even (the
    paper-style complex-pair count is ``l_override // 2``).
    """

    method: str
    k: int
    l_override: int | None = None
    alpha: float = 0.5
    d: int | None = None
    normalization: str = "none"
    seed: int = 0
    tau: float | None = None
    search_cap: int | None = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; choose from {METHODS}")
        if self.normalization not in NORMS:
            raise ValueError(f"unknown normalization {self.normalization!r}")
        if self.k < 1:
            raise ValueError("k must be positive")
        if self.l_override is not None and (self.l_override < 2 or self.l_override % 2):
            raise ValueError("l_override must be an even integer >= 2")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")

    @property
    def label(self) -> str:
        name = self.method
        if self.method == "skew_r" and self.l_override is not None:
            name += f"(l={self.l_override // 2})"
        if self.normalization != "none":
            name += "-" + self.normalization
        return name


@dataclass(frozen=True)
class TimedPartition:
    partition: Partition
    setup_ms: float
    embed_ms: float
    kmeans_ms: float
    embed_dim: int
    flags: frozenset = frozenset()
    info: dict = field(default_factory=dict)

    @property
    def total_ms(self) -> float:
        return self.setup_ms + self.embed_ms + self.kmeans_ms


class _Clock:
    def __init__(self):
        self.marks = [time.perf_counter()]

    def lap(self):
        self.marks.append(time.perf_counter())

    def ms(self):
        m = self.marks
        return [1000.0 * (b - a) for a, b in zip(m, m[1:])]


def _kopts(opts):
    keys = ("restarts", "max_iter", "tol")
    return {k: opts[k] for k in keys if k in opts}


def _finish(clock, emb, k, seed, flags, info, kmeans_opts):
    km = kmeans(emb, k, seed=seed, **kmeans_opts)
    clock.lap()
    setup, embed, kmt = clock.ms()
    info = dict(info, inertia=km.inertia)
    return TimedPartition(km.partition, setup, embed, kmt, emb.shape[1],
                          frozenset(flags), info)


def skew_embedding_dim(k: int) -> int:
    """``l = k`` for even ``k``, ``k - 1`` for odd ``k``."""
    if k < 2:
        raise ValueError("k must be at least 2")
    return k if k % 2 == 0 else k - 1


def _skew_setup(g, norm):
    kmat = build_skew(g)
    flags = set()
    if not weak_connectivity(kmat).connected:
        flags.add(DISCONNECTED)
    if norm != "none":
        kmat = normalize_skew(kmat, norm)
    if norm == "rw":
        flags.add(NON_NORMAL)
    return kmat, flags


def _head(svd: TruncatedSVD, l: int) -> TruncatedSVD:
    return dataclasses.replace(
        svd, sigma=svd.sigma[:l], U=svd.U[:, :l], V=svd.V[:, :l],
        residuals=svd.residuals[:l],
    )


def _leading_svd(kmat, l, seed, svd_opts):
    """SVD with ``l`` triplets plus look-ahead for the gap check."""
    n = kmat.n
    if l > n:
        raise RankDeficientError(f"l={l} exceeds the matrix dimension {n}")
    want = min(l + 2, n)
    svd = truncated_svd(kmat, want, seed=seed, check_rank=False, **svd_opts)
    s = svd.sigma
    if s[l - 1] <= RANK_TOL * s[0]:
        raise RankDeficientError(
            f"l={l} exceeds the numerical rank of K (sigma[{l - 1}] = {s[l - 1]:.3e})"
        )
    gap_degenerate = want > l and (s[l - 1] - s[l]) <= TAU_PAIR * s[0]
    return svd, gap_degenerate


def _skew_core(g, k, l, norm, seed, opts, dense_projector=False, schur=False):
    svd_opts = opts.get("svd_opts", {})
    clock = _Clock()
    kmat, flags = _skew_setup(g, norm)
    clock.lap()
    svd, degenerate = _leading_svd(kmat, l, seed, svd_opts)
    if degenerate:
        flags.add(GAP_DEGENERATE)
    head = _head(svd, l)
    if schur and kmat.tag != "rw":
        q = schur_vectors(schur_pairs_from_svd(head, kmat), l)
    else:
        q = head.U
    emb = q @ q.T if dense_projector else q
    clock.lap()
    info = {"l": l, "sigma": svd.sigma.tolist()}
    return _finish(clock, emb, k, seed, flags, info, _kopts(opts))


def skew_f(g: Digraph, k: int, norm: str = "none", seed: int = 0, **opts) -> TimedPartition:
    """k-means on the leading ``l`` left singular vectors of ``K`` (``l`` from k)."""
    return _skew_core(g, k, skew_embedding_dim(k), norm, seed, opts)


def skew_r(g: Digraph, k: int, l: int, norm: str = "none", seed: int = 0,
           **opts) -> TimedPartition:
    """As :func:`skew_f` with a fixed, even number ``l`` of singular vectors."""
    if l < 2 or l % 2:
        raise ValueError(f"l must be an even integer >= 2 (got {l}); pass 2 * l_pairs")
    if k < 2:
        raise ValueError("k must be at least 2")
    return _skew_core(g, k, l, norm, seed, opts)


def select_gap(sigma, tau_pair: float = TAU_PAIR):
    """Even cut index ``l*`` maximizing ``sigma_l - sigma_{l+1}`` (1-based).

    Candidates are ``2, 4, ...`` up to ``len(sigma) - 1``; ties go to the
    smallest. Returns ``(l_star, degenerate)`` where ``degenerate`` means the
    best gap is within ``tau_pair * sigma_1`` of zero.
    """
    s = np.asarray(sigma, dtype=float)
    cands = list(range(2, s.size, 2))
    if not cands:
        raise ValueError("need at least 3 singular values to search for a gap")
    gaps = np.array([s[j - 1] - s[j] for j in cands])
    best = int(np.argmax(gaps))
    return cands[best], bool(gaps[best] <= tau_pair * s[0])


def skew_s(g: Digraph, k: int, norm: str = "none", seed: int = 0,
           search_cap: int | None = None, **opts) -> TimedPartition:
    """Skew clustering with ``l`` chosen at the largest singular-value gap."""
    if k < 2:
        raise ValueError("k must be at least 2")
    svd_opts = opts.get("svd_opts", {})
    cap = search_cap if search_cap is not None else 2 * k + 2
    clock = _Clock()
    kmat, flags = _skew_setup(g, norm)
    clock.lap()
    m = min(cap, g.n - 2)
    if m < 3:
        raise ValueError(f"graph too small for the gap search (n={g.n})")
    svd = truncated_svd(kmat, m, seed=seed, check_rank=False, **svd_opts)
    l_star, degenerate = select_gap(svd.sigma)
    if degenerate:
        flags.add(GAP_DEGENERATE)
    emb = svd.U[:, :l_star]
    clock.lap()
    info = {"l": l_star, "sigma": svd.sigma.tolist()}
    return _finish(clock, emb, k, seed, flags, info, _kopts(opts))


def herm(g: Digraph, k: int, norm: str = "none", seed: int = 0, **opts) -> TimedPartition:
    """Hermitian clustering through its distance-equivalent real embedding.

    k-means runs on the first ``l`` real Schur vectors of ``K`` recovered from
    the SVD. With ``norm="rw"`` there is no Schur structure to recover, so the
    left singular vectors of ``K_rw`` are used and ``non_normal`` is flagged.
    """
    return _skew_core(g, k, skew_embedding_dim(k), norm, seed, opts, schur=True)


def herm_dense(g: Digraph, k: int, norm: str = "none", seed: int = 0,
               dense_guard: int = DENSE_GUARD, **opts) -> TimedPartition:
    """Hermitian clustering on the rows of the dense ``n x n`` projector ``P``."""
    if g.n > dense_guard:
        raise ValueError(f"n={g.n} exceeds dense_guard={dense_guard}")
    return _skew_core(g, k, skew_embedding_dim(k), norm, seed, opts,
                      dense_projector=True, schur=True)


def _gram_operator(g, alpha):
    m = g.adjacency
    a = alpha * (m @ m.T) + (1.0 - alpha) * (m.T @ m)
    a = sp.csr_matrix(a)
    a = sp.csr_matrix(0.5 * (a + a.T))
    a.sort_indices()
    return a


def dd_sym(g: Digraph, k: int, alpha: float = 0.5, normalized: bool = False,
           seed: int = 0, **opts) -> TimedPartition:
    """k-means on the ``k`` leading eigenvectors of ``alpha M M^T + (1-alpha) M^T M``.

    ``normalized=True`` gives DD-Sym-N: eigenvectors of the row-normalized
    ``D^-1 A``, obtained from the symmetric ``D^-1/2 A D^-1/2`` and rescaled by
    ``D^-1/2``. Vertices with zero degree get zero rows.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha={alpha} outside [0, 1]")
    clock = _Clock()
    a = _gram_operator(g, alpha)
    scale = None
    if normalized:
        deg = np.asarray(a.sum(axis=1)).ravel()
        scale = np.zeros_like(deg)
        scale[deg > 0] = 1.0 / np.sqrt(deg[deg > 0])
        a = sp.csr_matrix(sp.diags(scale) @ a @ sp.diags(scale))
    clock.lap()
    vals, vecs = symmetric_eigs(a, k, seed=seed, **opts.get("eig_opts", {}))
    if scale is not None:
        vecs = vecs * scale[:, None]
    clock.lap()
    return _finish(clock, vecs, k, seed, set(), {"eigenvalues": vals.tolist()}, _kopts(opts))


def svd_m(g: Digraph, k: int, d: int | None = None, seed: int = 0, **opts) -> TimedPartition:
    """k-means on ``[U S^1/2, V S^1/2]`` from the ``d``-truncated SVD of ``M``."""
    d = k if d is None else d
    if not 1 <= d < g.n:
        raise ValueError(f"d={d} out of range 1..{g.n - 1}")
    clock = _Clock()
    m = g.adjacency
    clock.lap()
    svd = truncated_svd(m, d, seed=seed, **opts.get("svd_opts", {}))
    root = np.sqrt(svd.sigma)
    z = np.hstack([svd.U * root, svd.V * root])
    clock.lap()
    return _finish(clock, z, k, seed, set(), {"sigma": svd.sigma.tolist()}, _kopts(opts))


def _transition(g, tau):
    n = g.n
    m = g.adjacency.toarray()
    out = m.sum(axis=1)
    sinks = out == 0
    p = np.zeros_like(m)
    p[~sinks] = m[~sinks] / out[~sinks, None]
    p[sinks] = 1.0 / n
    strong = connected_components(g.adjacency, directed=True, connection="strong")[0] == 1
    if tau is None:
        tau = 0.0 if strong and not sinks.any() else 0.01
    flags = set()
    if tau > 0:
        p = (1.0 - tau) * p + tau / n
        flags.add(REGULARIZED)
    elif sinks.any():
        flags.add(REGULARIZED)
    return p, flags, tau


def bcs(g: Digraph, k: int, seed: int = 0, tau: float | None = None,
        schur_backend: str = "auto", dense_guard: int = DENSE_GUARD,
        **opts) -> TimedPartition:
    """Block-cyclic spectral clustering on the row-stochastic ``D_out^-1 M``.

    ``tau=None`` regularizes with teleportation ``0.01`` only when the graph is
    not strongly connected (or has sinks). Eigenvalues come from a dense real
    Schur form; the ``floor(k/2)`` largest in modulus with ``Re < 1`` and
    ``Im >= 0`` are kept and k-means runs on ``[Re(Gamma), Im(Gamma)]``.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    n = g.n
    if n > dense_guard:
        raise ValueError(f"n={n} exceeds dense_guard={dense_guard}")
    if tau is not None and not 0.0 <= tau <= 1.0:
        raise ValueError("tau must lie in [0, 1]")
    clock = _Clock()
    p, flags, tau = _transition(g, tau)
    clock.lap()
    backend = schur_backend
    if backend == "auto":
        backend = "native" if n <= 200 else "lapack"
    q, t = real_schur_dense(p, backend=backend, dense_guard=dense_guard)
    cands = [
        (lam, i, size) for lam, i, size in schur_eigenvalues(t)
        if lam.real < 1.0 - 1e-9 and lam.imag >= 0.0
    ]
    if not cands:
        raise ValueError("no eigenvalue with Re < 1 and Im >= 0")
    cands.sort(key=lambda c: (-abs(c[0]), -c[0].imag, -c[0].real))
    chosen = cands[: k // 2]
    gamma = np.column_stack([schur_right_eigenvector(q, t, *c) for c in chosen])
    emb = np.hstack([gamma.real, gamma.imag])
    clock.lap()
    info = {"eigenvalues": [complex(c[0]) for c in chosen], "tau": tau}
    return _finish(clock, emb, k, seed, flags, info, _kopts(opts))


def trade_flow_relaxation(g: Digraph, seed: int = 0):
    """Optimum of the real relaxation of 2-way trade-flow maximization.

    ``max |a^T K b|`` over unit vectors is ``sigma_1(K)``, attained by the first
    singular pair; for skew ``K`` those vectors are orthogonal. Returns
    ``(sigma_1, u_1, v_1)``.
    """
    kmat = build_skew(g)
    if kmat.matrix.nnz == 0:
        raise ValueError("K is zero; the relaxation is trivial")
    svd = truncated_svd(kmat, min(2, g.n), seed=seed, check_rank=False)
    return float(svd.sigma[0]), svd.U[:, 0].copy(), svd.V[:, 0].copy()


def run(g: Digraph, spec: ClusterSpec, **opts) -> TimedPartition:
    """Dispatch a :class:`ClusterSpec`."""
    m, k, norm, seed = spec.method, spec.k, spec.normalization, spec.seed
    if m == "skew_f":
        return skew_f(g, k, norm, seed, **opts)
    if m == "skew_r":
        l = spec.l_override if spec.l_override is not None else 2
        return skew_r(g, k, l, norm, seed, **opts)
    if m == "skew_s":
        return skew_s(g, k, norm, seed, search_cap=spec.search_cap, **opts)
    if m == "herm":
        return herm(g, k, norm, seed, **opts)
    if m == "herm_dense":
        return herm_dense(g, k, norm, seed, **opts)
    if m == "dd_sym":
        return dd_sym(g, k, spec.alpha, norm != "none", seed, **opts)
    if norm != "none":
        raise ValueError(f"{m} has no normalized variant")
    if m == "svd_m":
        return svd_m(g, k, spec.d, seed, **opts)
    return bcs(g, k, seed, spec.tau, **opts)

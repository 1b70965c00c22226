"""Directed stochastic block model with circulant, DAG and complete meta-graphs."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Digraph, write_edge_list
from .kmeans import Partition

__all__ = [
    "DsbmParams",
    "DsbmInstance",
    "meta_circulant",
    "meta_dag",
    "meta_cmg",
    "meta_pattern",
    "generate",
    "write_truth",
    "read_truth",
    "write_instance",
]


def _check_mu(mu):
    if not 0.0 <= mu < 0.5:
        raise ValueError(f"mu={mu} outside [0, 0.5)")


def meta_circulant(k: int, mu: float) -> np.ndarray:
    """Directed k-cycle ``a -> a+1 (mod k)`` with noise ``mu``; other pairs 0.5."""
    if k < 2:
        raise ValueError("k must be at least 2")
    _check_mu(mu)
    f = np.full((k, k), 0.5)
    # for k = 2 the cycle has a single arc
    for a in range(k if k > 2 else 1):
        b = (a + 1) % k
        f[a, b] = 1.0 - mu
        f[b, a] = mu
    return f


def meta_dag(k: int, mu: float) -> np.ndarray:
    """``F[u, u+1] = F[u, u+2] = mu`` and ``F[u, u-1] = F[u, u-2] = 1 - mu``."""
    if k < 3:
        raise ValueError("k must be at least 3 for the DAG meta-graph")
    _check_mu(mu)
    f = np.full((k, k), 0.5)
    for u in range(k):
        for step in (1, 2):
            if u + step < k:
                f[u, u + step] = mu
            if u - step >= 0:
                f[u, u - step] = 1.0 - mu
    return f


def meta_cmg(k: int, mu: float, seed: int = 0) -> np.ndarray:
    """Complete meta-graph: each cluster pair gets a fair-coin orientation."""
    if k < 2:
        raise ValueError("k must be at least 2")
    _check_mu(mu)
    rng = np.random.default_rng(seed)
    f = np.full((k, k), 0.5)
    for a in range(k):
        for b in range(a + 1, k):
            if rng.random() < 0.5:
                f[a, b], f[b, a] = 1.0 - mu, mu
            else:
                f[a, b], f[b, a] = mu, 1.0 - mu
    return f


def meta_pattern(name: str, k: int, mu: float, seed: int = 0) -> np.ndarray:
    if name == "circulant":
        return meta_circulant(k, mu)
    if name == "dag":
        return meta_dag(k, mu)
    if name == "cmg":
        return meta_cmg(k, mu, seed)
    raise ValueError(f"unknown meta pattern {name!r}")


@dataclass(frozen=True)
class DsbmParams:
    k: int
    p: float
    q: float
    sizes: tuple
    F: np.ndarray
    seed: int = 0

    def __post_init__(self):
        sizes = tuple(int(c) for c in self.sizes)
        f = np.asarray(self.F, dtype=float)
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "F", f)
        if len(sizes) != self.k or any(c < 1 for c in sizes):
            raise ValueError("sizes must list k positive cluster sizes")
        for name in ("p", "q"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} outside [0, 1]")
        if f.shape != (self.k, self.k):
            raise ValueError("F must be k x k")
        if not np.allclose(np.diag(f), 0.5, rtol=0, atol=1e-12):
            raise ValueError("diagonal of F must be 1/2")
        if not np.allclose(f + f.T, 1.0, rtol=0, atol=1e-12):
            raise ValueError("F[a, b] + F[b, a] must equal 1")
        if np.any(f < 0) or np.any(f > 1):
            raise ValueError("F entries must be probabilities")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")

    @property
    def n(self) -> int:
        return sum(self.sizes)

    def labels(self) -> np.ndarray:
        return np.repeat(np.arange(self.k), self.sizes)

    def expected_edges(self) -> float:
        s = np.asarray(self.sizes, dtype=float)
        within = (s * (s - 1) / 2).sum()
        total = self.n * (self.n - 1) / 2
        return self.p * within + self.q * (total - within)


@dataclass(frozen=True)
class DsbmInstance:
    graph: Digraph
    truth: Partition
    params: DsbmParams


def _row_stream(seed: int, u: int) -> np.random.Generator:
    # counter-based: row u owns its own counter block, so rows are independent
    ctr = np.array([0, u, 0, 0], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=seed, counter=ctr))


def generate(params: DsbmParams) -> DsbmInstance:
    """Sample one DSBM graph.

    Every unordered pair ``{u, v}`` (``u < v``) gets an edge with probability
    ``p`` (same cluster) or ``q``; a present edge points ``u -> v`` with
    probability ``F[a, b]`` and ``v -> u`` otherwise. The two uniforms for a
    pair come from a Philox stream keyed by ``seed`` with ``u`` in the counter,
    so the output does not depend on the order rows are processed in.
    """
    labels = params.labels()
    n = labels.size
    f = params.F
    src, dst = [], []
    for u in range(n - 1):
        v = np.arange(u + 1, n)
        draws = _row_stream(params.seed, u).random((2, v.size))
        a, b = labels[u], labels[v]
        prob = np.where(b == a, params.p, params.q)
        present = draws[0] < prob
        if not present.any():
            continue
        v, b, flip = v[present], b[present], draws[1][present]
        forward = flip < f[a, b]
        src.append(np.where(forward, u, v))
        dst.append(np.where(forward, v, u))
    if src:
        src, dst = np.concatenate(src), np.concatenate(dst)
    else:
        src = dst = np.zeros(0, dtype=np.int64)
    g = Digraph(n, src, dst)
    return DsbmInstance(g, Partition(labels, params.k), params)


def write_truth(path, truth: Partition) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for u, c in enumerate(truth.assignment):
            fh.write(f"{u}\t{c}\n")


def read_truth(path, n: int | None = None) -> Partition:
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'vertex<TAB>cluster'")
            pairs.append((int(parts[0]), int(parts[1])))
    pairs.sort()
    verts = [u for u, _ in pairs]
    if verts != list(range(len(verts))) or (n is not None and len(verts) != n):
        raise ValueError(f"{path}: truth must list every vertex 0..n-1 exactly once")
    return Partition.from_labels([c for _, c in pairs])


def write_instance(prefix, inst: DsbmInstance):
    """Write ``<prefix>.tsv`` (edges) and ``<prefix>.truth.tsv``; returns both paths."""
    edges, truth = f"{prefix}.tsv", f"{prefix}.truth.tsv"
    write_edge_list(edges, inst.graph)
    write_truth(truth, inst.truth)
    return edges, truth

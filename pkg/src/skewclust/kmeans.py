"""Seeded k-means (k-means++ seeding, Lloyd iterations, best of several restarts)."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["Partition", "KMeansResult", "kmeans", "canonical_labels"]


def canonical_labels(labels) -> np.ndarray:
    """Relabel clusters ``0, 1, ...`` in order of first occurrence."""
    labels = np.asarray(labels)
    _, first, inv = np.unique(labels, return_index=True, return_inverse=True)
    rank = np.empty(first.size, dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(first.size)
    return rank[inv.ravel()]


@dataclass(frozen=True)
class Partition:
    """Assignment of each of ``n`` vertices to one of ``k`` non-empty clusters."""

    assignment: np.ndarray
    k: int

    def __post_init__(self):
        a = np.asarray(self.assignment, dtype=np.int64).ravel()
        k = int(self.k)
        if k < 1:
            raise ValueError("k must be positive")
        if a.size and (a.min() < 0 or a.max() >= k):
            raise ValueError("cluster index out of range")
        if np.unique(a).size != k:
            raise ValueError("every cluster must be non-empty")
        a.flags.writeable = False
        object.__setattr__(self, "assignment", a)
        object.__setattr__(self, "k", k)

    @classmethod
    def from_labels(cls, labels) -> "Partition":
        a = canonical_labels(labels)
        return cls(a, int(a.max()) + 1 if a.size else 1)

    @property
    def n(self) -> int:
        return self.assignment.size

    def sizes(self) -> np.ndarray:
        return np.bincount(self.assignment, minlength=self.k)

    def members(self, c: int) -> np.ndarray:
        return np.flatnonzero(self.assignment == c)

    def clusters(self) -> list:
        return [self.members(c) for c in range(self.k)]

    def canonical(self) -> "Partition":
        return Partition(canonical_labels(self.assignment), self.k)

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return self.k == other.k and np.array_equal(self.assignment, other.assignment)

    def __hash__(self):
        return hash((self.k, self.assignment.tobytes()))


@dataclass(frozen=True)
class KMeansResult:
    partition: Partition
    inertia: float
    iterations: int
    restarts_used: int
    centers: np.ndarray = field(repr=False, default=None)
    history: tuple = field(repr=False, default=())


def _sqdist(x, xsq, centers):
    d = xsq[:, None] - 2.0 * (x @ centers.T) + (centers * centers).sum(axis=1)[None, :]
    np.maximum(d, 0.0, out=d)
    return d


def _plusplus(x, xsq, k, rng):
    n = x.shape[0]
    idx = np.empty(k, dtype=np.int64)
    idx[0] = rng.integers(n)
    closest = _sqdist(x, xsq, x[idx[:1]])[:, 0]
    chosen = np.zeros(n, dtype=bool)
    chosen[idx[0]] = True
    for j in range(1, k):
        total = closest.sum()
        if total > 0:
            probs = closest / total
            pick = int(rng.choice(n, p=probs))
        else:
            # all remaining points coincide with a center
            pick = int(rng.choice(np.flatnonzero(~chosen)))
        idx[j] = pick
        chosen[pick] = True
        closest = np.minimum(closest, _sqdist(x, xsq, x[pick:pick + 1])[:, 0])
    return x[idx].copy()


def _centers_from(x, labels, k):
    counts = np.bincount(labels, minlength=k).astype(float)
    onehot = np.zeros((k, x.shape[0]))
    onehot[labels, np.arange(x.shape[0])] = 1.0
    return onehot @ x, counts


def _repair_empty(x, d, labels, k):
    """Give each empty cluster the point farthest from its centroid in the worst cluster."""
    counts = np.bincount(labels, minlength=k)
    own = d[np.arange(x.shape[0]), labels]
    for c in np.flatnonzero(counts == 0):
        sse = np.bincount(labels, weights=own, minlength=k)
        sse[counts <= 1] = -1.0
        worst = int(np.argmax(sse))
        members = np.flatnonzero(labels == worst)
        far = members[int(np.argmax(own[members]))]
        labels[far] = c
        own[far] = 0.0
        counts[worst] -= 1
        counts[c] += 1
    return labels


def _lloyd(x, xsq, centers, max_iter, tol):
    k = centers.shape[0]
    history = []
    labels = None
    it = 0
    for it in range(1, max_iter + 1):
        d = _sqdist(x, xsq, centers)
        labels = np.argmin(d, axis=1)
        if np.unique(labels).size < k:
            labels = _repair_empty(x, d, labels, k)
        history.append(float(d[np.arange(x.shape[0]), labels].sum()))
        sums, counts = _centers_from(x, labels, k)
        new = sums / counts[:, None]
        shift = np.sqrt(((new - centers) ** 2).sum(axis=1)).max()
        centers = new
        if shift < tol:
            break
    d = _sqdist(x, xsq, centers)
    final = np.argmin(d, axis=1)
    if np.unique(final).size == k:
        labels = final
    inertia = float(d[np.arange(x.shape[0]), labels].sum())
    return labels, centers, inertia, it, history


def kmeans(points, k: int, *, restarts: int = 10, max_iter: int = 100,
           tol: float = 1e-6, seed: int = 0) -> KMeansResult:
    """Best-of-``restarts`` k-means by inertia.

    ``points`` is an ``n x d`` array or an :class:`~skewclust.linalg.Embedding`.
    Each restart draws from its own stream spawned from ``seed``. Labels in
    the returned partition are canonical (first-occurrence order).
    """
    x = getattr(points, "coords", points)
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    n = x.shape[0]
    if k < 1:
        raise ValueError("k must be at least 1")
    if k > n:
        raise ValueError(f"k={k} exceeds the number of points n={n}")
    if not np.all(np.isfinite(x)):
        raise ValueError("points must be finite")
    if restarts < 1:
        raise ValueError("restarts must be at least 1")
    xsq = (x * x).sum(axis=1)
    streams = np.random.SeedSequence(seed).spawn(restarts)
    best = None
    for r, ss in enumerate(streams):
        rng = np.random.default_rng(ss)
        centers = _plusplus(x, xsq, k, rng)
        labels, centers, inertia, it, hist = _lloyd(x, xsq, centers, max_iter, tol)
        if best is None or inertia < best[2] - 1e-12 * max(abs(best[2]), 1.0):
            best = (labels, centers, inertia, it, hist, r)
    labels, centers, inertia, it, hist, r = best
    canon = canonical_labels(labels)
    order = np.empty(k, dtype=np.int64)
    order[canon[np.unique(labels, return_index=True)[1]]] = np.unique(labels)
    return KMeansResult(
        Partition(canon, k), inertia, it, restarts, centers[order], tuple(hist)
    )

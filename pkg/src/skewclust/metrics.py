"""Imbalanced-cut metrics (CI, TF and their top-c sums), ARI and the exact
two-cluster trade-flow maximizer."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .graph import Digraph
from .kmeans import Partition

__all__ = [
    "CutScore",
    "NoCrossEdgesError",
    "cut_weight",
    "ci",
    "tf",
    "ci_vol",
    "cluster_flow_matrix",
    "pair_table",
    "top_tf",
    "top_ci",
    "exact_tf_k2",
    "ari",
]


class NoCrossEdgesError(ValueError):
    """CI is undefined for a cut with no edges in either direction."""


@dataclass(frozen=True)
class CutScore:
    pair: tuple
    value: float


def _as_index(s, n):
    idx = np.unique(np.fromiter(s, dtype=np.int64) if not isinstance(s, np.ndarray)
                    else s.astype(np.int64))
    if idx.size and (idx[0] < 0 or idx[-1] >= n):
        raise IndexError("vertex index out of range")
    return idx


def _disjoint(g, x, y):
    xi, yi = _as_index(x, g.n), _as_index(y, g.n)
    if np.intersect1d(xi, yi).size:
        raise ValueError("vertex sets must be disjoint")
    return xi, yi


def _w(g, xi, yi):
    if xi.size == 0 or yi.size == 0:
        return 0.0
    return float(g.adjacency[xi][:, yi].sum())


def cut_weight(g: Digraph, x, y) -> float:
    """``w(X, Y)``: total weight of edges from ``x`` into ``y``."""
    xi, yi = _disjoint(g, x, y)
    return _w(g, xi, yi)


def ci(g: Digraph, x, y) -> float:
    """Cut imbalance ``w(X,Y) / (w(X,Y) + w(Y,X))``."""
    xi, yi = _disjoint(g, x, y)
    f, b = _w(g, xi, yi), _w(g, yi, xi)
    if f + b == 0:
        raise NoCrossEdgesError("no edges cross the cut")
    return f / (f + b)


def tf(g: Digraph, x, y) -> float:
    """Trade flow ``|w(X,Y) - w(Y,X)|``."""
    xi, yi = _disjoint(g, x, y)
    return abs(_w(g, xi, yi) - _w(g, yi, xi))


def _ci_vol_value(fwd, back, size_x, size_y):
    if fwd + back == 0:
        return 0.0
    return abs(fwd / (fwd + back) - 0.5) * min(size_x, size_y)


def ci_vol(g: Digraph, x, y, mode: str = "vol") -> float:
    """``|CI(X,Y) - 1/2| * min(vol X, vol Y)``; ``mode="sz"`` uses ``|X|, |Y|``.

    Cuts with no crossing edges score 0.
    """
    xi, yi = _disjoint(g, x, y)
    f, b = _w(g, xi, yi), _w(g, yi, xi)
    if mode == "vol":
        deg = g.out_degree() + g.in_degree()
        sx, sy = deg[xi].sum(), deg[yi].sum()
    elif mode == "sz":
        sx, sy = xi.size, yi.size
    else:
        raise ValueError(f"unknown mode {mode!r}; expected 'vol' or 'sz'")
    return _ci_vol_value(f, b, sx, sy)


def _labels(partition):
    if isinstance(partition, Partition):
        return partition.assignment, partition.k
    a = np.asarray(partition, dtype=np.int64)
    return a, int(a.max()) + 1


def cluster_flow_matrix(g: Digraph, partition) -> np.ndarray:
    """``F[a, b] = w(A_a, A_b)`` for all cluster pairs (diagonal = internal weight)."""
    a, k = _labels(partition)
    if a.size != g.n:
        raise ValueError("partition length does not match the graph")
    c = sp.csr_matrix((np.ones(g.n), (np.arange(g.n), a)), shape=(g.n, k))
    return np.asarray((c.T @ g.adjacency @ c).todense())


def pair_table(g: Digraph, partition) -> list:
    """Per unordered cluster pair ``a < b``: forward/back weight, TF, CI, CI^vol, CI^sz."""
    a, k = _labels(partition)
    flow = cluster_flow_matrix(g, partition)
    deg = g.out_degree() + g.in_degree()
    vol = np.bincount(a, weights=deg, minlength=k)
    size = np.bincount(a, minlength=k)
    rows = []
    for i in range(k):
        for j in range(i + 1, k):
            f, b = flow[i, j], flow[j, i]
            rows.append({
                "a": i,
                "b": j,
                "w_ab": float(f),
                "w_ba": float(b),
                "tf": float(abs(f - b)),
                "ci": float(f / (f + b)) if f + b > 0 else float("nan"),
                "ci_vol": _ci_vol_value(f, b, vol[i], vol[j]),
                "ci_sz": _ci_vol_value(f, b, size[i], size[j]),
            })
    return rows


def _top(rows, key, c, k):
    npairs = k * (k - 1) // 2
    if not 1 <= c <= npairs:
        raise ValueError(f"c={c} out of range 1..{npairs} for k={k}")
    ranked = sorted(rows, key=lambda r: (-r[key], r["a"], r["b"]))[:c]
    cuts = [CutScore((r["a"], r["b"]), float(r[key])) for r in ranked]
    return float(sum(s.value for s in cuts)), cuts


def top_tf(g: Digraph, partition, c: int):
    """Sum of the ``c`` largest pairwise TF values; returns ``(total, cuts)``.

    Each unordered cluster pair is scored once; ties go to the smaller pair index.
    """
    _, k = _labels(partition)
    return _top(pair_table(g, partition), "tf", c, k)


def top_ci(g: Digraph, partition, c: int, mode: str = "vol"):
    """Sum of the ``c`` largest pairwise ``CI^vol`` (or ``CI^sz``) values."""
    if mode not in ("vol", "sz"):
        raise ValueError(f"unknown mode {mode!r}; expected 'vol' or 'sz'")
    _, k = _labels(partition)
    return _top(pair_table(g, partition), "ci_" + mode, c, k)


def exact_tf_k2(g: Digraph):
    """Maximum trade flow over all 2-partitions, in time linear in the edges.

    For any ``X`` with complement ``Y``, ``e_X^T K e_Y = sum_{u in X} r_u`` with
    ``r = K 1`` (net out-flow per vertex), because the ``X x X`` block of a
    skew-symmetric matrix sums to zero. The optimum therefore collects every
    vertex with positive net out-flow. Returns ``(value, X)`` with ``X`` a
    sorted index array; zero-flow vertices are placed in ``Y``.
    """
    n = g.n
    if n < 2:
        raise ValueError("need at least two vertices for a 2-partition")
    r = g.out_degree() - g.in_degree()
    x = np.flatnonzero(r > 0)
    if x.size == 0:
        # all net flows zero; any non-trivial split attains 0
        x = np.array([int(np.argmin(np.abs(r)))])
    value = float(abs(r[x].sum()))
    return value, x


def _comb2(v) -> int:
    v = np.asarray(v, dtype=np.int64)
    return int((v * (v - 1) // 2).sum())


def ari(a, b) -> float:
    """Adjusted Rand index of two labelings (``Partition`` or label arrays).

    Pair counts are exact integers; the index is formed with a single final
    division so simple cases come out exact.
    """
    la = a.assignment if isinstance(a, Partition) else np.asarray(a)
    lb = b.assignment if isinstance(b, Partition) else np.asarray(b)
    la, lb = la.ravel(), lb.ravel()
    if la.size != lb.size:
        raise ValueError("partitions have different lengths")
    n = la.size
    if n < 2:
        raise ValueError("ARI needs at least two items")
    _, ia = np.unique(la, return_inverse=True)
    _, ib = np.unique(lb, return_inverse=True)
    table = np.zeros((ia.max() + 1, ib.max() + 1), dtype=np.int64)
    np.add.at(table, (ia.ravel(), ib.ravel()), 1)
    sum_ij = _comb2(table)
    sum_a = _comb2(table.sum(axis=1))
    sum_b = _comb2(table.sum(axis=0))
    total = n * (n - 1) // 2
    # (index - expected) / (max - expected), scaled by 2 * total
    num = 2 * (sum_ij * total - sum_a * sum_b)
    den = (sum_a + sum_b) * total - 2 * sum_a * sum_b
    if den == 0:
        return 1.0
    return num / den

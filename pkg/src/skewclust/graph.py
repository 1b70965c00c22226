"""Directed graphs, the net-flow matrix ``K = M - M^T`` and edge-list I/O.

The complex Hermitian adjacency ``H = iK`` is never materialized; everything
downstream works with the real skew-symmetric ``K``.
"""
from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

__all__ = [
    "Digraph",
    "SkewMatrix",
    "ConnectivityReport",
    "GraphFormatError",
    "ZeroDegreeError",
    "build_skew",
    "hermitian_entry",
    "weak_connectivity",
    "normalize_skew",
    "skew_degrees",
    "volume",
    "largest_weak_component",
    "load_edge_list",
    "write_edge_list",
    "write_label_map",
]


class GraphFormatError(ValueError):
    """Raised when an edge-list file cannot be parsed."""

    def __init__(self, message: str, path=None, lineno: int | None = None):
        where = ""
        if path is not None:
            where = f"{path}"
            if lineno is not None:
                where += f":{lineno}"
            where += ": "
        super().__init__(where + message)
        self.path = path
        self.lineno = lineno


class ZeroDegreeError(ValueError):
    """A vertex has no net flow, so degree normalization is undefined."""

    def __init__(self, vertex: int):
        super().__init__(
            f"vertex {vertex} has zero net-flow degree; restrict the graph to "
            "its largest weak component before normalizing"
        )
        self.vertex = vertex


class Digraph:
    """Weighted directed graph on vertices ``0..n-1``.

    Stored as the sparse adjacency ``M`` (``M[u, v] = w_uv`` for ``u -> v``)
    in both CSR and CSC layouts. Duplicate edges are summed, self-loops and
    zero weights are dropped. Instances are treated as immutable.
    """

    __slots__ = ("_n", "_csr", "_csc")

    def __init__(self, n: int, src, dst, weight=None):
        n = int(n)
        if n < 0:
            raise ValueError("vertex count must be nonnegative")
        src = np.asarray(src, dtype=np.int64).ravel()
        dst = np.asarray(dst, dtype=np.int64).ravel()
        if src.shape != dst.shape:
            raise ValueError("src and dst must have the same length")
        if weight is None:
            w = np.ones(src.shape[0], dtype=float)
        else:
            w = np.asarray(weight, dtype=float).ravel()
            if w.shape != src.shape:
                raise ValueError("weight must match the number of edges")
        if src.size:
            if src.min() < 0 or dst.min() < 0 or src.max() >= n or dst.max() >= n:
                raise ValueError(f"edge endpoint out of range for n={n}")
            if np.any(w < 0) or not np.all(np.isfinite(w)):
                raise ValueError("edge weights must be finite and nonnegative")
        keep = (src != dst) & (w > 0)
        m = sp.coo_matrix((w[keep], (src[keep], dst[keep])), shape=(n, n)).tocsr()
        m.sum_duplicates()
        m.eliminate_zeros()
        m.sort_indices()
        self._n = n
        self._csr = m
        self._csc = m.tocsc()
        self._csr.data.flags.writeable = False
        self._csc.data.flags.writeable = False

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence]) -> "Digraph":
        """Build from ``(u, v)`` or ``(u, v, w)`` tuples."""
        src, dst, wt = [], [], []
        for e in edges:
            src.append(e[0])
            dst.append(e[1])
            wt.append(e[2] if len(e) > 2 else 1.0)
        return cls(n, src, dst, wt)

    @classmethod
    def from_matrix(cls, m) -> "Digraph":
        coo = sp.coo_matrix(m)
        if coo.shape[0] != coo.shape[1]:
            raise ValueError("adjacency matrix must be square")
        return cls(coo.shape[0], coo.row, coo.col, coo.data)

    @property
    def n(self) -> int:
        return self._n

    @property
    def num_edges(self) -> int:
        return int(self._csr.nnz)

    @property
    def adjacency(self) -> sp.csr_matrix:
        """Row-major ``M`` (out-edges per row)."""
        return self._csr

    @property
    def adjacency_csc(self) -> sp.csc_matrix:
        """Column-major ``M`` (in-edges per column)."""
        return self._csc

    def edges(self):
        """Return ``(src, dst, weight)`` arrays in row-major order."""
        coo = self._csr.tocoo()
        return coo.row.astype(np.int64), coo.col.astype(np.int64), coo.data.copy()

    def out_degree(self) -> np.ndarray:
        return np.asarray(self._csr.sum(axis=1)).ravel()

    def in_degree(self) -> np.ndarray:
        return np.asarray(self._csc.sum(axis=0)).ravel()

    def total_weight(self) -> float:
        return float(self._csr.data.sum())

    def weight(self, u: int, v: int) -> float:
        return float(self._csr[u, v])

    def subgraph(self, vertices) -> "Digraph":
        """Induced subgraph, vertices renumbered in the given order."""
        vertices = np.asarray(vertices, dtype=np.int64)
        sub = self._csr[vertices][:, vertices]
        return Digraph.from_matrix(sub)

    def unweighted(self) -> "Digraph":
        src, dst, _ = self.edges()
        return Digraph(self._n, src, dst)

    def scaled(self, factor: float) -> "Digraph":
        src, dst, w = self.edges()
        return Digraph(self._n, src, dst, w * factor)

    def __repr__(self) -> str:
        return f"Digraph(n={self._n}, edges={self.num_edges})"


@dataclass(frozen=True)
class SkewMatrix:
    """Sparse net-flow matrix ``K = M - M^T``, optionally degree-normalized.

    ``tag`` is one of ``"none"``, ``"rw"`` (``D^-1 K``, not skew-symmetric) or
    ``"sym"`` (``D^-1/2 K D^-1/2``).
    """

    matrix: sp.csr_matrix
    tag: str = "none"

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def is_skew(self) -> bool:
        return self.tag in ("none", "sym")

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def row_sums(self) -> np.ndarray:
        return np.asarray(self.matrix.sum(axis=1)).ravel()


def build_skew(g: Digraph) -> SkewMatrix:
    """Net-flow matrix of ``g``; reciprocal edges collapse to their difference."""
    m = g.adjacency
    k = (m - m.T).tocsr()
    k.eliminate_zeros()
    k.sort_indices()
    return SkewMatrix(k, "none")


def hermitian_entry(g: Digraph, u: int, v: int) -> tuple[float, float]:
    """Entry ``H[u, v]`` of the Hermitian adjacency as a ``(real, imag)`` pair.

    Inspection helper only: ``H = iK`` so the real part is always zero.
    """
    n = g.n
    if not (0 <= u < n and 0 <= v < n):
        raise IndexError(f"vertex pair ({u}, {v}) out of range for n={n}")
    m = g.adjacency
    return 0.0, float(m[u, v] - m[v, u])


@dataclass(frozen=True)
class ConnectivityReport:
    connected: bool
    components: list = field(default_factory=list)

    @property
    def giant(self) -> np.ndarray:
        return np.asarray(sorted(self.components[0]), dtype=np.int64)


def weak_connectivity(k: SkewMatrix) -> ConnectivityReport:
    """Weak components of the support of ``K``, largest first.

    Ties in size are ordered by smallest member so the output is canonical.
    """
    n = k.n
    if n == 0:
        return ConnectivityReport(True, [])
    support = abs(k.matrix)
    ncomp, labels = connected_components(support, directed=False)
    comps = [np.flatnonzero(labels == c) for c in range(ncomp)]
    comps.sort(key=lambda c: (-c.size, int(c[0])))
    return ConnectivityReport(ncomp == 1, [set(map(int, c)) for c in comps])


def largest_weak_component(g: Digraph):
    """``(subgraph, vertices)`` for the largest weak component of the net-flow graph.

    ``vertices`` maps subgraph index ``i`` to original vertex ``vertices[i]``.
    """
    report = weak_connectivity(build_skew(g))
    if report.connected:
        return g, np.arange(g.n, dtype=np.int64)
    keep = report.giant
    return g.subgraph(keep), keep


def skew_degrees(k: SkewMatrix) -> np.ndarray:
    """``d_u = sum_v |K_uv|``."""
    return np.asarray(abs(k.matrix).sum(axis=1)).ravel()


def normalize_skew(k: SkewMatrix, mode: str) -> SkewMatrix:
    """Random-walk (``D^-1 K``) or symmetric (``D^-1/2 K D^-1/2``) scaling."""
    if k.tag != "none":
        raise ValueError(f"matrix is already normalized ({k.tag})")
    d = skew_degrees(k)
    zero = np.flatnonzero(d == 0)
    if zero.size:
        raise ZeroDegreeError(int(zero[0]))
    if mode == "rw":
        out = sp.diags(1.0 / d) @ k.matrix
    elif mode == "sym":
        s = sp.diags(1.0 / np.sqrt(d))
        out = s @ k.matrix @ s
    else:
        raise ValueError(f"unknown normalization {mode!r}; expected 'rw' or 'sym'")
    out = sp.csr_matrix(out)
    out.sort_indices()
    return SkewMatrix(out, mode)


def volume(g: Digraph, s) -> float:
    """Sum of weighted in- and out-degrees of ``s`` on the original ``M``."""
    idx = np.fromiter(s, dtype=np.int64) if not isinstance(s, np.ndarray) else s
    if idx.size == 0:
        return 0.0
    return float(g.out_degree()[idx].sum() + g.in_degree()[idx].sum())


# --------------------------------------------------------------------------
# file formats

_INT_RE = re.compile(r"^[+-]?\d+$")
_N_HINT_RE = re.compile(r"^#\s*n\s*=\s*(\d+)\s*$")


def _parse_weight(tok: str, path, lineno: int) -> float:
    try:
        w = float(tok)
    except ValueError:
        raise GraphFormatError(f"bad weight {tok!r}", path, lineno) from None
    if not np.isfinite(w):
        raise GraphFormatError(f"non-finite weight {tok!r}", path, lineno)
    if w < 0:
        raise GraphFormatError(f"negative weight {w}", path, lineno)
    return w


def _read_tsv(path):
    src_lab, dst_lab, wts = [], [], []
    declared_n = None
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            hint = _N_HINT_RE.match(raw)
            if hint and declared_n is None:
                declared_n = int(hint.group(1))
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split("\t") if "\t" in line else line.split()
            if len(parts) not in (2, 3):
                raise GraphFormatError(
                    f"expected 'u<TAB>v[<TAB>w]', got {len(parts)} fields", path, lineno
                )
            src_lab.append(parts[0].strip())
            dst_lab.append(parts[1].strip())
            wts.append(_parse_weight(parts[2], path, lineno) if len(parts) == 3 else 1.0)

    labels = src_lab + dst_lab
    uniq = list(dict.fromkeys(labels))
    if all(_INT_RE.match(x) for x in uniq):
        if declared_n is not None:
            # "# n=N" header: labels are already dense 0-based ids
            ids = [int(x) for x in uniq]
            if ids and (min(ids) < 0 or max(ids) >= declared_n):
                raise GraphFormatError(f"vertex id outside 0..{declared_n - 1}", path)
            uniq = [str(i) for i in range(declared_n)]
            index = {lab: i for i, lab in enumerate(uniq)}
            index.update({x: int(x) for x in dict.fromkeys(labels)})
            src = np.array([index[x] for x in src_lab], dtype=np.int64)
            dst = np.array([index[x] for x in dst_lab], dtype=np.int64)
            return declared_n, src, dst, np.array(wts, dtype=float), uniq
        uniq = sorted(uniq, key=int)
    index = {lab: i for i, lab in enumerate(uniq)}
    src = np.array([index[x] for x in src_lab], dtype=np.int64)
    dst = np.array([index[x] for x in dst_lab], dtype=np.int64)
    return len(uniq), src, dst, np.array(wts, dtype=float), uniq


def _read_pajek(path):
    n = None
    labels: list[str] = []
    src, dst, wts = [], [], []
    section = None
    with open(path, encoding="utf-8", errors="replace") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("%"):
                continue
            if line.startswith("*"):
                head = line.split()
                key = head[0].lower()
                if key == "*vertices":
                    if len(head) < 2 or not _INT_RE.match(head[1]):
                        raise GraphFormatError("malformed *Vertices header", path, lineno)
                    n = int(head[1])
                    labels = [str(i + 1) for i in range(n)]
                    section = "vertices"
                elif key in ("*arcs", "*edges"):
                    if n is None:
                        raise GraphFormatError(f"{head[0]} before *Vertices", path, lineno)
                    section = key[1:]
                else:
                    raise GraphFormatError(f"unsupported section {head[0]}", path, lineno)
                continue
            if section is None:
                raise GraphFormatError("data before *Vertices header", path, lineno)
            if section == "vertices":
                m = re.match(r'^(\d+)\s*(?:"([^"]*)"|(\S+))?', line)
                if not m:
                    raise GraphFormatError("malformed vertex line", path, lineno)
                vid = int(m.group(1))
                if not 1 <= vid <= n:
                    raise GraphFormatError(f"vertex id {vid} out of range", path, lineno)
                lab = m.group(2) if m.group(2) is not None else m.group(3)
                if lab is not None:
                    labels[vid - 1] = lab
                continue
            parts = line.split()
            if len(parts) < 2 or not (_INT_RE.match(parts[0]) and _INT_RE.match(parts[1])):
                raise GraphFormatError("expected 'u v [w]'", path, lineno)
            u, v = int(parts[0]), int(parts[1])
            if not (1 <= u <= n and 1 <= v <= n):
                raise GraphFormatError(f"arc ({u}, {v}) out of range 1..{n}", path, lineno)
            w = _parse_weight(parts[2], path, lineno) if len(parts) > 2 else 1.0
            src.append(u - 1)
            dst.append(v - 1)
            wts.append(w)
            if section == "edges":
                src.append(v - 1)
                dst.append(u - 1)
                wts.append(w)
    if n is None:
        raise GraphFormatError("missing *Vertices header", path)
    return (
        n,
        np.array(src, dtype=np.int64),
        np.array(dst, dtype=np.int64),
        np.array(wts, dtype=float),
        labels,
    )


def load_edge_list(path, format: str = "tsv", unweighted: bool = False):
    """Read a graph file and return ``(graph, labels)``.

    ``labels[i]`` is the original label of vertex ``i``. For TSV files, purely
    integer labels are sorted numerically; otherwise order of first appearance
    is kept. Pajek ids are 1-based in the file and shifted to 0-based here.

    With ``unweighted=True`` every distinct ordered pair becomes one edge of
    weight 1 (duplicates are not summed).
    """
    if not os.path.exists(path):
        raise FileNotFoundError(path)
    if format == "tsv":
        n, src, dst, w, labels = _read_tsv(path)
    elif format == "pajek":
        n, src, dst, w, labels = _read_pajek(path)
    else:
        raise ValueError(f"unknown format {format!r}; expected 'tsv' or 'pajek'")
    g = Digraph(n, src, dst, w)
    if unweighted:
        g = g.unweighted()
    return g, labels


def write_edge_list(path, g: Digraph) -> None:
    """Write ``g`` as TSV ``u<TAB>v<TAB>w`` in row-major order."""
    src, dst, w = g.edges()
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# n={g.n}\n")
        for u, v, x in zip(src, dst, w):
            fh.write(f"{u}\t{v}\t{x:.17g}\n")


def write_label_map(path, labels: Sequence[str]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for i, lab in enumerate(labels):
            fh.write(f"{lab}\t{i}\n")

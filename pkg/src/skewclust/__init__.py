"""Flow-based spectral clustering of directed graphs in real arithmetic."""
from .algorithms import (
    METHODS,
    ClusterSpec,
    TimedPartition,
    bcs,
    dd_sym,
    herm,
    herm_dense,
    run,
    select_gap,
    skew_embedding_dim,
    skew_f,
    skew_r,
    skew_s,
    svd_m,
    trade_flow_relaxation,
)
from .dsbm import DsbmInstance, DsbmParams, generate, meta_pattern
from .graph import (
    ConnectivityReport,
    Digraph,
    GraphFormatError,
    SkewMatrix,
    ZeroDegreeError,
    build_skew,
    largest_weak_component,
    load_edge_list,
    normalize_skew,
    weak_connectivity,
    write_edge_list,
)
from .kmeans import KMeansResult, Partition, kmeans
from .metrics import ari, ci, ci_vol, exact_tf_k2, pair_table, tf, top_ci, top_tf

__version__ = "0.1.0"

__all__ = [
    "METHODS",
    "ClusterSpec",
    "TimedPartition",
    "bcs",
    "dd_sym",
    "herm",
    "herm_dense",
    "run",
    "select_gap",
    "skew_embedding_dim",
    "skew_f",
    "skew_r",
    "skew_s",
    "svd_m",
    "trade_flow_relaxation",
    "DsbmInstance",
    "DsbmParams",
    "generate",
    "meta_pattern",
    "ConnectivityReport",
    "Digraph",
    "GraphFormatError",
    "SkewMatrix",
    "ZeroDegreeError",
    "build_skew",
    "largest_weak_component",
    "load_edge_list",
    "normalize_skew",
    "weak_connectivity",
    "write_edge_list",
    "KMeansResult",
    "Partition",
    "kmeans",
    "ari",
    "ci",
    "ci_vol",
    "exact_tf_k2",
    "pair_table",
    "tf",
    "top_ci",
    "top_tf",
]

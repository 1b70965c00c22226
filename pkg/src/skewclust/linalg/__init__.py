"""Real-arithmetic spectral kernels."""
from .krylov import (
    DENSE_CUTOFF,
    DENSE_GUARD,
    TAU_ORTH,
    TAU_PAIR,
    TAU_SVD,
    ConvergenceError,
    RankDeficientError,
    TruncatedSVD,
    is_skew_symmetric,
    symmetric_eigs,
    truncated_svd,
)
from .schur import (
    hessenberg,
    real_schur_dense,
    schur_blocks,
    schur_eigenvalues,
    schur_right_eigenvector,
)
from .skew import (
    Embedding,
    PairMismatchError,
    SchurPair,
    SchurPairs,
    eigvecs_from_pairs,
    projector_embedding,
    schur_pairs_from_svd,
    schur_vectors,
)

__all__ = [
    "DENSE_CUTOFF",
    "DENSE_GUARD",
    "TAU_ORTH",
    "TAU_PAIR",
    "TAU_SVD",
    "ConvergenceError",
    "RankDeficientError",
    "TruncatedSVD",
    "is_skew_symmetric",
    "symmetric_eigs",
    "truncated_svd",
    "hessenberg",
    "real_schur_dense",
    "schur_blocks",
    "schur_eigenvalues",
    "schur_right_eigenvector",
    "Embedding",
    "PairMismatchError",
    "SchurPair",
    "SchurPairs",
    "eigvecs_from_pairs",
    "projector_embedding",
    "schur_pairs_from_svd",
    "schur_vectors",
]

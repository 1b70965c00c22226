"""Schur vectors vs the dense projector: same geometry, very different cost.

    python demos/embedding_geometry.py
"""
import time

import numpy as np
from scipy.spatial.distance import pdist

from skewclust import build_skew, generate, meta_pattern, DsbmParams
from skewclust.linalg import projector_embedding, schur_pairs_from_svd, schur_vectors, truncated_svd

inst = generate(DsbmParams(4, 0.05, 0.05, (150,) * 4, meta_pattern("circulant", 4, 0.05), seed=3))
k = build_skew(inst.graph)

svd = truncated_svd(k, 4, seed=0)
print("leading singular values:", np.round(svd.sigma, 4))   # come in equal pairs

pairs = schur_pairs_from_svd(svd, k)
t0 = time.perf_counter()
q = schur_vectors(pairs, 4)                       # n x 4
t1 = time.perf_counter()
p = projector_embedding(pairs, 4).coords          # n x n
t2 = time.perf_counter()

print(f"Schur coords {q.shape} in {1e3 * (t1 - t0):.2f} ms, "
      f"projector {p.shape} in {1e3 * (t2 - t1):.2f} ms")
print("max pairwise distance gap:", np.abs(pdist(q) - pdist(p)).max())

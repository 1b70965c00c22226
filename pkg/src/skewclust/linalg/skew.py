"""Skew-symmetric structure: Schur planes from an SVD, eigenvectors, projectors."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .krylov import DENSE_GUARD, TAU_PAIR, TruncatedSVD

__all__ = [
    "Embedding",
    "SchurPair",
    "SchurPairs",
    "PairMismatchError",
    "schur_pairs_from_svd",
    "eigvecs_from_pairs",
    "schur_vectors",
    "projector_embedding",
]


class PairMismatchError(ValueError):
    """Two singular values expected to be equal are not."""


@dataclass(frozen=True)
class Embedding:
    """Row ``u`` of ``coords`` is the embedding of vertex ``u``."""

    coords: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=float)
        if c.ndim != 2 or c.shape[1] < 1:
            raise ValueError("embedding must be an n x l array with l >= 1")
        if not np.all(np.isfinite(c)):
            raise ValueError("embedding has non-finite entries")
        object.__setattr__(self, "coords", c)

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def l(self) -> int:
        return self.coords.shape[1]


@dataclass(frozen=True)
class SchurPair:
    """One 2x2 block ``K [q_odd, q_even] = [-alpha q_even, alpha q_odd]``."""

    alpha: float
    q_odd: np.ndarray
    q_even: np.ndarray


@dataclass(frozen=True)
class SchurPairs:
    n: int
    pairs: tuple

    @property
    def s(self) -> int:
        return len(self.pairs)

    @property
    def kernel_dim(self) -> int:
        """``n - 2s`` for the ``s`` planes held here."""
        return self.n - 2 * self.s

    @property
    def alphas(self) -> np.ndarray:
        return np.array([p.alpha for p in self.pairs])


def _matrix_of(k_mat):
    m = k_mat.matrix if hasattr(k_mat, "matrix") else k_mat
    return sp.csr_matrix(m) if sp.issparse(m) else np.asarray(m, dtype=float)


def schur_pairs_from_svd(svd: TruncatedSVD, k_mat, *, tau_pair: float = TAU_PAIR) -> SchurPairs:
    """Group the SVD of a skew-symmetric ``K`` into real Schur planes.

    Each pair of (numerically) equal singular values spans one plane. Inside a
    plane the basis is fixed by taking the first left vector as ``q_odd`` and
    setting ``q_even = -K q_odd / alpha``, so the result does not depend on
    which rotation of a degenerate subspace the solver returned.
    """
    tag = getattr(k_mat, "tag", "none")
    if tag == "rw":
        raise ValueError(
            "random-walk normalized K is not normal; its SVD does not give Schur vectors"
        )
    if svd.l % 2:
        raise ValueError(f"need an even number of singular triplets, got l={svd.l}")
    k = _matrix_of(k_mat)
    sigma = svd.sigma
    s1 = sigma[0] if sigma.size else 0.0
    pairs = []
    basis = np.zeros((k.shape[0], 0))
    for j in range(svd.l // 2):
        a, b = sigma[2 * j], sigma[2 * j + 1]
        if abs(a - b) > tau_pair * s1:
            raise PairMismatchError(
                f"singular values {2 * j} and {2 * j + 1} differ by {abs(a - b):.3e} "
                f"(> {tau_pair:g} * sigma_1); input is not skew-symmetric?"
            )
        q = svd.U[:, 2 * j].copy()
        if basis.shape[1]:
            q -= basis @ (basis.T @ q)
        q /= np.linalg.norm(q)
        kq = k @ q
        alpha = float(np.linalg.norm(kq))
        if alpha == 0.0:
            raise PairMismatchError(f"pair {j} lies in the kernel of K")
        q_even = -kq / alpha
        if basis.shape[1]:
            q_even -= basis @ (basis.T @ q_even)
        q_even -= q * (q @ q_even)
        q_even /= np.linalg.norm(q_even)
        pairs.append(SchurPair(alpha, q, q_even))
        basis = np.column_stack([basis, q, q_even])
    return SchurPairs(k.shape[0], tuple(pairs))


def eigvecs_from_pairs(p: SchurPairs, *, tiny: float = 0.0):
    """Eigenpairs ``(i alpha, (q_odd + i q_even) / sqrt 2)`` as split real parts.

    Returns a list of ``(alpha, real_part, imag_part)``; planes with
    ``alpha <= tiny`` (kernel directions) are skipped.
    """
    out = []
    for pr in p.pairs:
        if pr.alpha <= tiny:
            continue
        out.append((pr.alpha, pr.q_odd / np.sqrt(2.0), pr.q_even / np.sqrt(2.0)))
    return out


def schur_vectors(p: SchurPairs, l: int) -> np.ndarray:
    """First ``l`` real Schur vectors ``[q_1, q_2, ...]`` as an ``n x l`` array."""
    if l % 2 or l < 2:
        raise ValueError(f"l must be a positive even integer, got {l}")
    if l > 2 * p.s:
        raise ValueError(f"l={l} exceeds the {2 * p.s} available Schur vectors")
    cols = []
    for pr in p.pairs[: l // 2]:
        cols += [pr.q_odd, pr.q_even]
    return np.column_stack(cols)


def projector_embedding(p: SchurPairs, l: int, *, dense_guard: int = DENSE_GUARD) -> Embedding:
    """Dense ``P = Q~ Q~^T``; its rows are the Hermitian-clustering embedding."""
    if p.n > dense_guard:
        raise ValueError(f"n={p.n} exceeds dense_guard={dense_guard}; P needs n^2 memory")
    q = schur_vectors(p, l)
    return Embedding(q @ q.T, {"rank": l})

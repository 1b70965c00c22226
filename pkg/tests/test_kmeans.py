import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from skewclust.kmeans import Partition, canonical_labels, kmeans
from skewclust.linalg import Embedding


def _inertia(x, labels):
    return sum(((x[labels == c] - x[labels == c].mean(axis=0)) ** 2).sum()
               for c in np.unique(labels))


def test_two_separated_pairs():
    res = kmeans(np.array([[0.0], [0.1], [10.0], [10.1]]), 2)
    assert res.partition.assignment.tolist() == [0, 0, 1, 1]


def test_k_equals_n():
    x = np.arange(5.0)[:, None]
    res = kmeans(x, 5)
    assert res.inertia == 0.0
    assert sorted(res.partition.sizes()) == [1] * 5


def test_three_groups_match_brute_force():
    r = np.random.default_rng(4)
    x = np.concatenate([c + r.uniform(-0.1, 0.1, 3) for c in (0.0, 5.0, 10.0)])[:, None]
    best = None
    # all labelings into exactly 3 non-empty clusters
    for lab in itertools.product(range(3), repeat=9):
        lab = np.array(lab)
        if np.unique(lab).size < 3 or lab[0] != 0:
            continue
        v = _inertia(x, lab)
        if best is None or v < best[0]:
            best = (v, canonical_labels(lab))
    res = kmeans(x, 3)
    assert res.partition.assignment.tolist() == [0, 0, 0, 1, 1, 1, 2, 2, 2]
    assert np.array_equal(res.partition.assignment, best[1])
    assert res.inertia == pytest.approx(best[0])


def test_errors():
    x = np.zeros((3, 2))
    with pytest.raises(ValueError):
        kmeans(x, 4)
    with pytest.raises(ValueError):
        kmeans(x, 0)
    with pytest.raises(ValueError):
        kmeans(np.array([[np.inf], [0.0]]), 1)


def test_accepts_embedding_and_is_deterministic():
    x = np.random.default_rng(0).standard_normal((60, 3))
    a = kmeans(Embedding(x), 4, seed=9)
    b = kmeans(x, 4, seed=9)
    assert a.partition == b.partition and a.inertia == b.inertia
    assert a.restarts_used == 10


def test_history_nonincreasing():
    x = np.random.default_rng(1).standard_normal((300, 2))
    res = kmeans(x, 6, restarts=1)
    h = np.array(res.history)
    assert np.all(np.diff(h) <= 1e-9 * h[0])
    assert res.inertia <= h[-1] + 1e-9


def test_duplicate_points_no_empty_cluster():
    # only two distinct locations but k=3: repair keeps clusters non-empty
    x = np.array([[0.0]] * 5 + [[1.0]] * 5)
    res = kmeans(x, 3, restarts=3)
    assert res.partition.k == 3 and np.all(res.partition.sizes() >= 1)


def test_inertia_is_best_restart():
    x = np.random.default_rng(2).standard_normal((80, 2))
    full = kmeans(x, 5, restarts=8, seed=3)
    singles = [kmeans(x, 5, restarts=1, seed=s).inertia for s in range(3)]
    assert full.inertia >= 0
    assert full.inertia == pytest.approx(_inertia(x, full.partition.assignment))
    assert full.inertia <= max(singles) + 1e-9


def test_permutation_invariance_of_clustering():
    r = np.random.default_rng(5)
    centers = np.array([[0, 0], [8, 0], [0, 8]])
    x = np.concatenate([c + r.standard_normal((20, 2)) * 0.3 for c in centers])
    perm = r.permutation(len(x))
    a = kmeans(x, 3).partition.assignment
    b = kmeans(x[perm], 3).partition.assignment
    restored = np.empty_like(b)
    restored[perm] = b
    assert np.array_equal(canonical_labels(restored), a)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(0, 6), min_size=1, max_size=40))
def test_canonical_labels(labels):
    c = canonical_labels(labels)
    assert c[0] == 0
    seen = []
    for v in c:
        if v not in seen:
            seen.append(v)
    assert seen == list(range(len(seen)))
    # same grouping
    lab = np.array(labels)
    assert np.array_equal(lab[:, None] == lab[None], c[:, None] == c[None])


def test_partition_validation():
    with pytest.raises(ValueError):
        Partition([0, 0, 2], 3)
    with pytest.raises(ValueError):
        Partition([0, 3], 2)
    p = Partition.from_labels([5, 5, 2, 9])
    assert p.assignment.tolist() == [0, 0, 1, 2] and p.k == 3
    assert [m.tolist() for m in p.clusters()] == [[0, 1], [2], [3]]
    assert hash(p) == hash(Partition([0, 0, 1, 2], 3))

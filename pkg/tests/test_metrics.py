import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from skewclust.graph import Digraph, build_skew
from skewclust.kmeans import Partition
from skewclust.metrics import (
    NoCrossEdgesError,
    ari,
    ci,
    ci_vol,
    cut_weight,
    exact_tf_k2,
    pair_table,
    tf,
    top_ci,
    top_tf,
)

from conftest import random_digraph, two_cycles


def _brute_tf(g):
    n = g.n
    best = 0.0
    for mask in range(1, 2 ** (n - 1)):
        x = [u for u in range(n) if mask >> u & 1]
        y = [u for u in range(n) if not mask >> u & 1]
        best = max(best, tf(g, x, y))
    return best


def _flows(fwd, back):
    # X = {0}, Y = {1}; parallel weights realize the given cut weights
    edges = []
    if fwd:
        edges.append((0, 1, fwd))
    if back:
        edges.append((1, 0, back))
    return Digraph.from_edges(2, edges)


# -- cut weight, CI, TF


def test_cut_weight_examples(tri, edge2):
    assert cut_weight(tri, [0], [1]) == 1
    assert cut_weight(edge2, [1], [0]) == 0
    g = Digraph.from_edges(4, [(0, 2), (0, 3), (1, 2), (1, 3)])
    assert cut_weight(g, [0, 1], [2, 3]) == 4
    assert cut_weight(g, [2, 3], [0, 1]) == 0


def test_overlap_rejected(tri):
    with pytest.raises(ValueError):
        cut_weight(tri, [0, 1], [1, 2])


def test_ci_examples():
    g = Digraph.from_edges(4, [(0, 2), (0, 3), (1, 2), (1, 3)])
    assert ci(g, [0, 1], [2, 3]) == 1.0
    assert ci(_flows(3, 3), [0], [1]) == 0.5
    assert ci(_flows(5, 2), [0], [1]) == 5 / 7
    with pytest.raises(NoCrossEdgesError):
        ci(two_cycles(), [0, 1, 2], [3, 4, 5])


def test_tf_examples(tri):
    assert tf(_flows(5, 2), [0], [1]) == 3
    for x in ([0], [1], [2], [0, 1], [0, 2], [1, 2]):
        y = [u for u in range(3) if u not in x]
        assert tf(tri, x, y) == 0


def test_ci_vol_examples():
    # all-forward cut with vol(X) = 4 and vol(Y) = 6
    g = Digraph.from_edges(5, [(0, 2), (0, 3), (1, 2), (1, 3), (2, 4), (4, 3)])
    x, y = [0, 1], [2, 3, 4]
    assert ci(g, x, y) == 1.0
    assert ci_vol(g, x, y) == 2.0
    assert ci_vol(_flows(4, 4), [0], [1]) == 0.0
    h = Digraph.from_edges(8, [(0, 3), (1, 4), (2, 5)])
    assert ci_vol(h, [0, 1, 2], [3, 4, 5, 6, 7], mode="sz") == 1.5
    assert ci_vol(two_cycles(), [0, 1, 2], [3, 4, 5]) == 0.0


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 12), st.integers(0, 2**31 - 1), st.floats(0.1, 10.0))
def test_symmetry_and_scaling(n, seed, lam):
    r = np.random.default_rng(seed)
    g = random_digraph(r, n, 0.4, weighted=True)
    side = r.random(n) < 0.5
    x, y = np.flatnonzero(side), np.flatnonzero(~side)
    if not x.size or not y.size:
        return
    assert tf(g, x, y) == pytest.approx(tf(g, y, x))
    try:
        assert ci(g, x, y) + ci(g, y, x) == pytest.approx(1.0)
        c_before = ci(g, x, y)
    except NoCrossEdgesError:
        c_before = None
    h = g.scaled(lam)
    assert tf(h, x, y) == pytest.approx(lam * tf(g, x, y))
    assert ci_vol(h, x, y) == pytest.approx(lam * ci_vol(g, x, y))
    if c_before is not None:
        assert ci(h, x, y) == pytest.approx(c_before)
    ve, xe = exact_tf_k2(g)
    vh, xh = exact_tf_k2(h)
    assert vh == pytest.approx(lam * ve)
    assert np.array_equal(xe, xh)


# -- TopTF / TopCI


def test_rotated_clusterings_have_equal_toptf():
    g = two_cycles()
    colors = Partition([0, 1, 2, 0, 1, 2], 3)
    rotated = Partition([0, 1, 2, 1, 2, 0], 3)
    a, cuts = top_tf(g, colors, 3)
    b, _ = top_tf(g, rotated, 3)
    assert a == b == 6
    assert [c.value for c in cuts] == [2, 2, 2]


def test_top_tf_k2_matches_tf(rng):
    g = random_digraph(rng, 20, 0.3)
    p = Partition.from_labels(rng.integers(0, 2, 20))
    total, cuts = top_tf(g, p, 1)
    assert total == tf(g, p.members(0), p.members(1))
    assert cuts[0].pair == (0, 1)


def test_top_tf_all_pairs_is_sum(rng):
    g = random_digraph(rng, 30, 0.2, weighted=True)
    p = Partition(np.arange(30) % 4, 4)
    total, cuts = top_tf(g, p, 6)
    assert total == pytest.approx(sum(r["tf"] for r in pair_table(g, p)))
    assert len(cuts) == 6
    vals = [c.value for c in cuts]
    assert vals == sorted(vals, reverse=True)


def test_top_c_range(tri):
    p = Partition([0, 1, 2], 3)
    for c in (0, 4):
        with pytest.raises(ValueError):
            top_tf(tri, p, c)
        with pytest.raises(ValueError):
            top_ci(tri, p, c)


def test_top_tf_ties_lexicographic(tri):
    total, cuts = top_tf(tri, Partition([0, 1, 2], 3), 2)
    assert total == 2
    assert [c.pair for c in cuts] == [(0, 1), (0, 2)]


def test_top_ci_modes(rng):
    g = random_digraph(rng, 25, 0.3)
    p = Partition(np.arange(25) % 3, 3)
    rows = pair_table(g, p)
    for mode in ("vol", "sz"):
        total, cuts = top_ci(g, p, 2, mode)
        ref = sorted((r["ci_" + mode] for r in rows), reverse=True)[:2]
        assert total == pytest.approx(sum(ref))
        for cut in cuts:
            a, b = cut.pair
            assert cut.value == pytest.approx(ci_vol(g, p.members(a), p.members(b), mode))


# -- exact k=2 trade flow


def test_exact_tf_path():
    g = Digraph.from_edges(3, [(0, 1), (1, 2)])
    value, x = exact_tf_k2(g)
    assert value == 1 and x.tolist() == [0]
    assert _brute_tf(g) == 1


def test_exact_tf_cycle(tri):
    value, x = exact_tf_k2(tri)
    assert value == 0
    assert 1 <= x.size < 3


def test_exact_tf_matches_brute_force():
    r = np.random.default_rng(77)
    for _ in range(60):
        n = int(r.integers(2, 11))
        g = random_digraph(r, n, r.uniform(0.1, 0.6), weighted=bool(r.integers(2)))
        value, x = exact_tf_k2(g)
        assert value == pytest.approx(_brute_tf(g), abs=1e-12)
        y = np.setdiff1d(np.arange(n), x)
        assert y.size >= 1
        assert tf(g, x, y) == pytest.approx(value)


def test_exact_tf_identity_rowsums(rng):
    g = random_digraph(rng, 15, 0.3, weighted=True)
    k = build_skew(g).toarray()
    _, x = exact_tf_k2(g)
    ex = np.zeros(15)
    ex[x] = 1
    assert ex @ k @ (1 - ex) == pytest.approx(k.sum(axis=1)[x].sum())


# -- ARI


def test_ari_examples():
    assert ari([0, 0, 1, 1], [0, 1, 0, 1]) == -0.5
    assert ari([0, 0, 1, 2], [0, 0, 1, 2]) == 1.0
    assert ari([0, 0, 1, 2], [2, 2, 0, 1]) == 1.0
    with pytest.raises(ValueError):
        ari([0, 1], [0, 1, 1])
    with pytest.raises(ValueError):
        ari([0], [0])


def _ari_pairs(a, b):
    # pair-counting oracle
    n = len(a)
    pairs = list(itertools.combinations(range(n), 2))
    sa = np.array([a[i] == a[j] for i, j in pairs])
    sb = np.array([b[i] == b[j] for i, j in pairs])
    idx = (sa & sb).sum()
    tot = len(pairs)
    exp = sa.sum() * sb.sum() / tot
    mx = 0.5 * (sa.sum() + sb.sum())
    return 1.0 if mx == exp else (idx - exp) / (mx - exp)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 4)), min_size=2, max_size=25))
def test_ari_matches_pair_counting(pairs):
    a = [p[0] for p in pairs]
    b = [p[1] for p in pairs]
    assert ari(a, b) == pytest.approx(_ari_pairs(a, b), abs=1e-12)
    assert ari(a, b) == pytest.approx(ari(b, a), abs=1e-12)

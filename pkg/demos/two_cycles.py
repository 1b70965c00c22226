"""Two directed 3-cycles: why cluster labels are only defined up to rotation.

    python demos/two_cycles.py
"""
from skewclust import Digraph, Partition, ci, exact_tf_k2, top_tf, tf

g = Digraph.from_edges(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)])

by_color = Partition([0, 1, 2, 0, 1, 2], 3)
rotated = Partition([0, 1, 2, 1, 2, 0], 3)
for name, part in (("by color", by_color), ("rotated", rotated)):
    score, pairs = top_tf(g, part, 3)
    print(f"{name:9s} TopTF={score:.0f}  per pair: {[c.value for c in pairs]}")

# Between vertex sets {0, 3} and {1, 4}: all flow runs one way.
print("TF({0,3},{1,4}) =", tf(g, [0, 3], [1, 4]))
print("CI({0,3},{1,4}) =", ci(g, [0, 3], [1, 4]))

# Every vertex has in-degree = out-degree, so no 2-way split carries net flow;
# the imbalance only shows up with three or more clusters.
value, _ = exact_tf_k2(g)
print(f"best 2-way trade flow = {value:.0f}")

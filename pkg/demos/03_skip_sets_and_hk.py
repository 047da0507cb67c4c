"""
Skip patterns and the unfolded tree H^k
=======================================

Paths of the closure are indexed by which depths they skip.  Skip sets with no
k consecutive depths are counted by a Fibonacci-like recurrence, and unfolding
the closure into a tree (H^k) turns each of them into a leaf.
"""

from kaccess import build_Hk, count_skip_sets, enumerate_skip_sets
from kaccess.closure import expected_hk_degree

for k in (2, 3):
    print(f"k={k}:", [count_skip_sets(l, k) for l in range(1, 12)])

print("skip sets of {1, 2, 3} with k=2:", [sorted(s) for s in enumerate_skip_sets(4, 2)])

# On a path of height 3 with k = 2 the unfolded tree has one leaf per skip set.
hk = build_Hk(1, 3, 2)
for leaf in hk.tree.leaves:
    print("leaf", leaf, "skips", sorted(hk.skips[leaf]))

# In the binary tree every internal vertex of H^2 has 2 + 4 children,
# except one level above the leaves where only the 2 children remain.
hk = build_Hk(2, 4, 2)
for row in hk.degree_report()[:8]:
    want = expected_hk_degree(2, 2, row["residual_depth"])
    print(row["vertex"], row["skips"], "degree", row["degree"], "expected", want)

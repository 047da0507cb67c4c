"""
Skipping in a tree equals climbing in its closure
=================================================

Adding an edge from every vertex to each descendant at distance <= k turns a
k-accessibility question on the tree into a plain increasing-path question on
a DAG.  Here we check that on random labeled trees, then at the level of exact
probabilities.
"""

import numpy as np

from kaccess import (
    build_nary_tree,
    exact_theta,
    exact_theta_dag,
    is_1_accessible_dag,
    is_k_accessible,
    k_transitive_closure,
    sample_labeling,
)
from kaccess.tree import random_tree

rng = np.random.default_rng(1)
agree = 0
for trial in range(300):
    tree = random_tree(int(rng.integers(2, 12)), rng)
    labels = sample_labeling(tree, trial)
    k = int(rng.integers(1, 4))
    agree += is_k_accessible(tree, labels, k).accessible == is_1_accessible_dag(
        k_transitive_closure(tree, k), labels
    )
print(f"per-instance agreement: {agree}/300")

# Exact probabilities by enumerating all 7! rank orders of the binary tree of height 2.
tree = build_nary_tree(2, 2)
for k in (1, 2, 3):
    on_tree = exact_theta(tree, k)
    on_dag = exact_theta_dag(k_transitive_closure(tree, k))
    print(f"k={k}: theta={on_tree} (tree) = {on_dag} (closure)")

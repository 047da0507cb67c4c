import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from kaccess.accessibility import is_k_accessible
from kaccess.closure import (
    MonotoneDag,
    build_Hk,
    count_skip_sets,
    enumerate_skip_sets,
    expected_hk_degree,
    is_1_accessible_dag,
    k_transitive_closure,
    level_subsample,
    skip_sets_bruteforce,
)
from kaccess.tree import Labeling, RootedTree, build_nary_tree, nary_vertex_count, parse_tree

from strategies import labeled_trees, trees


def test_closure_of_path():
    dag = k_transitive_closure(build_nary_tree(1, 2), 2)
    assert set(dag.edges) == {(0, 1), (1, 2), (0, 2)}
    assert dag.source == 0 and dag.sinks == {2}


def test_closure_single_vertex():
    dag = k_transitive_closure(RootedTree((-1,)), 3)
    assert dag.edges == () and dag.source == 0 and dag.sinks == {0}
    assert is_1_accessible_dag(dag, Labeling((1,)))


def test_closure_height_one_unchanged():
    t = build_nary_tree(2, 1)
    assert set(k_transitive_closure(t, 2).edges) == {(0, 1), (0, 2)}


@pytest.mark.parametrize("n,h,k", [(2, 3, 1), (2, 3, 2), (3, 3, 3), (2, 5, 2), (4, 2, 5)])
def test_closure_edge_count_closed_form(n, h, k):
    t = build_nary_tree(n, h)
    expected = sum(
        n**j for u in range(t.vertex_count) for j in range(1, min(k, h - t.depth[u]) + 1)
    )
    assert len(k_transitive_closure(t, k).edges) == expected


@given(trees(), st.integers(1, 4))
def test_closure_edges_are_short_ancestor_pairs(tree, k):
    dag = k_transitive_closure(tree, k)
    want = {
        (u, v)
        for u in range(tree.vertex_count)
        for v in range(tree.vertex_count)
        if tree.is_ancestor(u, v) and tree.depth[v] - tree.depth[u] <= k
    }
    assert set(dag.edges) == want
    assert dag.sinks == set(tree.leaves)


def test_golden_path_closure():
    path = build_nary_tree(1, 4)
    lab = Labeling((2, 5, 3, 1, 4))  # ranks of 53, 99, 68, 4, 71
    assert is_1_accessible_dag(k_transitive_closure(path, 2), lab)
    assert not is_1_accessible_dag(k_transitive_closure(path, 1), lab)


@given(labeled_trees(), st.integers(1, 3))
def test_closure_verdict_matches_checker(pair, k):
    tree, lab = pair
    assert is_1_accessible_dag(k_transitive_closure(tree, k), lab) == (
        is_k_accessible(tree, lab, k).accessible
    )


def test_monotone_dag_validation():
    with pytest.raises(ValueError):
        MonotoneDag(3, ((0, 1), (1, 2), (2, 0)), 0, frozenset({2}))
    with pytest.raises(ValueError):
        MonotoneDag(3, ((0, 1),), 0, frozenset({1}))  # vertex 2 is a second source
    with pytest.raises(ValueError):
        MonotoneDag(3, ((0, 1), (0, 2)), 0, frozenset({2}))  # 1 is a dead end but not a sink
    dag = MonotoneDag(3, ((0, 1), (1, 2), (0, 2)), 0, frozenset({2}))
    assert dag.topological_order[0] == 0 and dag.to_json()["adjacency"][0] == [1, 2]


def test_level_subsample_examples():
    g = level_subsample(build_nary_tree(2, 4), 2)
    assert g == build_nary_tree(4, 2)
    g3 = level_subsample(build_nary_tree(2, 3), 2)
    assert g3.height == 1 and len(g3.leaves) == 4


@given(trees())
def test_level_subsample_identity_for_k1(tree):
    assert level_subsample(tree, 1) == tree


@pytest.mark.parametrize("n,h,k", [(2, 6, 3), (3, 4, 2), (2, 5, 2)])
def test_level_subsample_structure(n, h, k):
    g, kept = level_subsample(build_nary_tree(n, h), k, return_mapping=True)
    assert g.height == h // k
    assert all(len(g.children[v]) == n**k for v in range(g.vertex_count) if not g.is_leaf(v))


def test_skip_set_examples():
    assert enumerate_skip_sets(1, 3) == [frozenset()]
    assert enumerate_skip_sets(3, 2) == [frozenset(), frozenset({1}), frozenset({2})]
    assert len(enumerate_skip_sets(5, 2)) == 8
    assert count_skip_sets(1, 3) == 1 and count_skip_sets(5, 2) == 8
    assert count_skip_sets(6, 3) == len(enumerate_skip_sets(6, 3))
    assert [count_skip_sets(l, 2) for l in range(1, 6)] == [1, 2, 3, 5, 8]


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_skip_set_count_matches_enumeration(k):
    for l in range(1, 19):
        listed = enumerate_skip_sets(l, k)
        assert len(set(listed)) == len(listed) == count_skip_sets(l, k)
        if l <= 14:
            assert set(listed) == set(skip_sets_bruteforce(l, k))


def test_skip_sets_have_no_k_run():
    for s in enumerate_skip_sets(10, 3):
        assert not any({i, i + 1, i + 2} <= s for i in range(1, 8))


def test_hk_small_examples():
    hk = build_Hk(1, 2, 2)
    t = hk.tree
    assert t.vertex_count == 4
    kids = {(hk.base_vertex[c], hk.skips[c]) for c in t.children[0]}
    assert kids == {(1, frozenset()), (2, frozenset({1}))}
    v1 = next(c for c in t.children[0] if hk.base_vertex[c] == 1)
    assert [(hk.base_vertex[c], hk.skips[c]) for c in t.children[v1]] == [(2, frozenset())]
    assert len(build_Hk(1, 3, 2).tree.leaves) == 3 == count_skip_sets(3, 2)
    assert len(build_Hk(2, 2, 2).tree.children[0]) == 2 + 4


@pytest.mark.parametrize("n,h,k", [(2, 4, 2), (3, 3, 2), (2, 6, 3), (1, 7, 3)])
def test_hk_degree_formula(n, h, k):
    hk = build_Hk(n, h, k)
    for row in hk.degree_report():
        assert row["degree"] == expected_hk_degree(n, k, row["residual_depth"])


@pytest.mark.parametrize("h,k", [(l, k) for l in range(1, 9) for k in (1, 2, 3)])
def test_hk_path_count_on_unary_tree(h, k):
    # each leaf of H^k over a path is one skip pattern of the whole path
    hk = build_Hk(1, h, k)
    assert len(hk.tree.leaves) == count_skip_sets(h, k)
    assert {hk.skips[v] for v in hk.tree.leaves} == set(enumerate_skip_sets(h, k))


@given(trees(max_vertices=9), st.integers(1, 3))
def test_hk_leaves_are_base_leaves(tree, k):
    from kaccess.closure import build_hk_from_tree

    hk = build_hk_from_tree(tree, k)
    assert {hk.base_vertex[v] for v in hk.tree.leaves} == set(tree.leaves)
    # root-to-leaf paths of H^k are the source-to-sink paths of T^k
    dag = k_transitive_closure(tree, k)
    succ = dag.successors

    def count(v):
        return 1 if v in dag.sinks else sum(count(w) for w in succ[v])

    assert len(hk.tree.leaves) == count(dag.source)


def test_hk_truncation():
    hk = build_Hk(2, 4, 2, max_depth=1)
    assert hk.tree.height == 1 and hk.tree.vertex_count == 1 + 2 + 4

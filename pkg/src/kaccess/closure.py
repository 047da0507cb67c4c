"""Auxiliary graphs: k-transitive closures, level subsamples, skip sets and H^k."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from graphlib import CycleError, TopologicalSorter

from kaccess.tree import (
    MAX_EXPLICIT_VERTICES,
    Labeling,
    RootedTree,
    TreeSizeError,
    build_nary_tree,
)

MAX_SKIP_GROUND = 24


@dataclass(frozen=True)
class MonotoneDag:
    """Single-source DAG whose maximal paths all run from the source to a sink."""

    vertex_count: int
    edges: tuple[tuple[int, int], ...]
    source: int
    sinks: frozenset[int]
    successors: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)
    predecessors: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)
    topological_order: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        succ: list[list[int]] = [[] for _ in range(self.vertex_count)]
        pred: list[list[int]] = [[] for _ in range(self.vertex_count)]
        for u, v in self.edges:
            succ[u].append(v)
            pred[v].append(u)
        sorter = TopologicalSorter({v: pred[v] for v in range(self.vertex_count)})
        try:
            order = tuple(sorter.static_order())
        except CycleError as exc:
            raise ValueError(f"graph has a directed cycle: {exc.args[1]}") from None
        starts = [v for v in range(self.vertex_count) if not pred[v]]
        if starts != [self.source]:
            raise ValueError(f"expected the source {self.source} as the only start, got {starts}")
        ends = {v for v in range(self.vertex_count) if not succ[v]}
        if not ends <= self.sinks:
            raise ValueError(f"maximal paths end at non-sinks {sorted(ends - self.sinks)}")
        object.__setattr__(self, "successors", tuple(tuple(s) for s in succ))
        object.__setattr__(self, "predecessors", tuple(tuple(p) for p in pred))
        object.__setattr__(self, "topological_order", order)

    def to_json(self) -> dict:
        return {
            "vertex_count": self.vertex_count,
            "source": self.source,
            "sinks": sorted(self.sinks),
            "adjacency": [list(s) for s in self.successors],
        }


def k_transitive_closure(
    tree: RootedTree, k: int, cap: int = MAX_EXPLICIT_VERTICES
) -> MonotoneDag:
    """Tree plus an edge from every vertex to each descendant at distance <= k."""
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    edges: list[tuple[int, int]] = []
    for u in range(tree.vertex_count):
        frontier = [u]
        for _ in range(k):
            frontier = [c for x in frontier for c in tree.children[x]]
            if not frontier:
                break
            edges.extend((u, v) for v in frontier)
            if len(edges) > cap:
                raise TreeSizeError(f"closure has more than {cap} edges")
    edges.sort()
    return MonotoneDag(tree.vertex_count, tuple(edges), tree.root, frozenset(tree.leaves))


def is_1_accessible_dag(dag: MonotoneDag, labeling: Labeling) -> bool:
    """True if some source-to-sink path has strictly increasing labels."""
    if len(labeling) != dag.vertex_count:
        raise ValueError(
            f"labeling has {len(labeling)} ranks for a graph with {dag.vertex_count} vertices"
        )
    w = labeling.ranks
    reach = [False] * dag.vertex_count
    reach[dag.source] = True
    for v in dag.topological_order:
        if v != dag.source:
            reach[v] = any(reach[u] and w[u] < w[v] for u in dag.predecessors[v])
    return any(reach[s] for s in dag.sinks)


def level_subsample(
    tree: RootedTree, k: int, *, return_mapping: bool = False
) -> RootedTree | tuple[RootedTree, list[int]]:
    """Keep the vertices whose depth is a multiple of ``k``.

    Each kept vertex is joined to its nearest kept ancestor (its ancestor at
    distance ``k``).  New vertex ``i`` is the ``i``-th kept vertex in original
    index order; ``return_mapping`` also returns that list.
    """
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    kept = [v for v in range(tree.vertex_count) if tree.depth[v] % k == 0]
    index = {v: i for i, v in enumerate(kept)}
    parent = []
    for v in kept:
        if v == tree.root:
            parent.append(-1)
            continue
        a = v
        for _ in range(k):
            a = tree.parent[a]
        parent.append(index[a])
    sub = RootedTree(tuple(parent))
    return (sub, kept) if return_mapping else sub


def _check_skip_args(l: int, k: int) -> None:
    if l < 1 or k < 1:
        raise ValueError(f"need l >= 1 and k >= 1, got l={l}, k={k}")


def enumerate_skip_sets(l: int, k: int) -> list[frozenset[int]]:
    """Subsets of ``{1..l-1}`` without ``k`` consecutive integers, lexicographic."""
    _check_skip_args(l, k)
    if l - 1 > MAX_SKIP_GROUND:
        raise ValueError(f"ground set {{1..{l - 1}}} exceeds the enumeration cap {MAX_SKIP_GROUND}")
    out: list[frozenset[int]] = []

    def extend(prefix: list[int], start: int, run: int) -> None:
        # run: length of the consecutive block ending at prefix[-1]
        out.append(frozenset(prefix))
        for x in range(start, l):
            r = run + 1 if prefix and prefix[-1] == x - 1 else 1
            if r >= k:
                continue
            prefix.append(x)
            extend(prefix, x + 1, r)
            prefix.pop()

    extend([], 1, 0)
    return out


def count_skip_sets(l: int, k: int) -> int:
    """Size of the skip-set family, by a k-step linear recurrence on ``m = l - 1``.

    ``c(m) = 2**m`` for ``m < k``; otherwise split on the length ``j < k`` of the
    leading run of chosen elements, which must be followed by an unchosen one.
    """
    _check_skip_args(l, k)
    m = l - 1
    c = [2**i for i in range(min(m + 1, k))]
    for i in range(k, m + 1):
        c.append(sum(c[i - 1 - j] for j in range(k)))
    return c[m]


def skip_sets_bruteforce(l: int, k: int) -> list[frozenset[int]]:
    """Filter of all subsets; the independent oracle for the two functions above."""
    ground = range(1, l)
    found = []
    for r in range(l):
        for combo in itertools.combinations(ground, r):
            s = set(combo)
            if not any(all(x + i in s for i in range(k)) for x in combo):
                found.append(frozenset(combo))
    return sorted(found, key=lambda s: sorted(s))


@dataclass(frozen=True)
class HkTree:
    """The tree H^k together with, for each of its vertices, the base vertex and skip set."""

    tree: RootedTree
    base_vertex: tuple[int, ...]
    skips: tuple[frozenset[int], ...]
    base: RootedTree

    def degree_report(self) -> list[dict]:
        """One entry per internal vertex: residual depth, degree, expected degree."""
        rows = []
        for v in range(self.tree.vertex_count):
            if self.tree.is_leaf(v):
                continue
            b = self.base_vertex[v]
            rows.append({
                "vertex": v,
                "base_vertex": b,
                "skips": sorted(self.skips[v]),
                "residual_depth": self.base.height - self.base.depth[b],
                "degree": len(self.tree.children[v]),
            })
        return rows


def build_hk_from_tree(
    base: RootedTree, k: int, cap: int = MAX_EXPLICIT_VERTICES, max_depth: int | None = None
) -> HkTree:
    """Build H^k over an explicit base tree.

    Vertex ``v^s`` (``v`` at depth ``l``) gets, for every ``j`` in ``1..k`` and
    every descendant ``w`` of ``v`` at distance ``j``, the son
    ``w^(s | {l+1, ..., l+j-1})``.  ``max_depth`` truncates H^k at that many
    edges from its root.
    """
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    parent = [-1]
    base_vertex = [base.root]
    skips: list[frozenset[int]] = [frozenset()]
    hdepth = [0]
    i = 0
    while i < len(parent):
        v, s = base_vertex[i], skips[i]
        if max_depth is None or hdepth[i] < max_depth:
            l = base.depth[v]
            frontier = [v]
            for j in range(1, k + 1):
                frontier = [c for x in frontier for c in base.children[x]]
                if not frontier:
                    break
                s2 = s | frozenset(range(l + 1, l + j)) if j > 1 else s
                for w in frontier:
                    parent.append(i)
                    base_vertex.append(w)
                    skips.append(s2)
                    hdepth.append(hdepth[i] + 1)
                if len(parent) > cap:
                    raise TreeSizeError(f"H^{k} exceeds the vertex cap {cap}")
        i += 1
    return HkTree(RootedTree(tuple(parent)), tuple(base_vertex), tuple(skips), base)


def build_Hk(
    n: int, h: int, k: int, cap: int = MAX_EXPLICIT_VERTICES, max_depth: int | None = None
) -> HkTree:
    """H^k over the complete n-ary tree of height h."""
    return build_hk_from_tree(build_nary_tree(n, h), k, cap=cap, max_depth=max_depth)


def expected_hk_degree(n: int, k: int, residual_depth: int) -> int:
    return sum(n**j for j in range(1, min(k, residual_depth) + 1))

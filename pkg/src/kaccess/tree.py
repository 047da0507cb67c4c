"""Rooted tree topologies, rank labelings and the hash-based lazy labeler.

Explicit trees are stored as parent arrays with vertices ``0..V-1``.  Labels
on explicit trees are rank permutations (only relative order matters for any
accessibility event, and ranks cannot tie).  Trees too large to materialize
are labeled on demand by :class:`LazyLabeler`, which maps a vertex's
child-index path from the root to a deterministic uniform variate.
"""

from __future__ import annotations

import json
from collections.abc import Sequence
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

MAX_EXPLICIT_VERTICES = 10**7

_MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
LABEL_SALT = 0xD1B54A32D192ED03


class TreeFormatError(ValueError):
    """Raised when a serialized tree or labeling is malformed."""


class TreeSizeError(ValueError):
    """Raised when an explicit construction would exceed its vertex cap."""


@dataclass(frozen=True)
class RootedTree:
    """Immutable rooted tree given by its parent array (root has parent -1).

    Children are listed in increasing vertex index, which fixes the child
    order used by every search in the package.
    """

    parent: tuple[int, ...]
    children: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)
    depth: tuple[int, ...] = field(init=False, repr=False, compare=False)
    root: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        parent = tuple(int(p) for p in self.parent)
        object.__setattr__(self, "parent", parent)
        count = len(parent)
        if count == 0:
            raise TreeFormatError("tree must have at least one vertex")
        roots = [v for v, p in enumerate(parent) if p == -1]
        if len(roots) != 1:
            raise TreeFormatError(f"expected exactly one root, found {len(roots)}: {roots[:5]}")
        kids: list[list[int]] = [[] for _ in range(count)]
        for v, p in enumerate(parent):
            if p == -1:
                continue
            if not 0 <= p < count:
                raise TreeFormatError(f"vertex {v} has orphan parent index {p}")
            if p == v:
                raise TreeFormatError(f"vertex {v} is its own parent")
            kids[p].append(v)

        root = roots[0]
        depth = [-1] * count
        depth[root] = 0
        stack = [root]
        seen = 1
        while stack:
            u = stack.pop()
            for c in kids[u]:
                depth[c] = depth[u] + 1
                seen += 1
                stack.append(c)
        if seen != count:
            bad = next(v for v in range(count) if depth[v] < 0)
            raise TreeFormatError(f"vertex {bad} lies on a cycle or is unreachable from the root")

        object.__setattr__(self, "children", tuple(tuple(c) for c in kids))
        object.__setattr__(self, "depth", tuple(depth))
        object.__setattr__(self, "root", root)

    @property
    def vertex_count(self) -> int:
        return len(self.parent)

    @cached_property
    def height(self) -> int:
        return max(self.depth)

    def is_leaf(self, v: int) -> bool:
        return not self.children[v]

    @cached_property
    def leaves(self) -> tuple[int, ...]:
        return tuple(v for v in range(self.vertex_count) if not self.children[v])

    @cached_property
    def preorder(self) -> tuple[int, ...]:
        """Vertices in depth-first preorder, children visited in index order."""
        order = []
        stack = [self.root]
        while stack:
            u = stack.pop()
            order.append(u)
            stack.extend(reversed(self.children[u]))
        return tuple(order)

    def path_to_root(self, v: int) -> list[int]:
        """Vertices from the root down to ``v`` inclusive."""
        path = [v]
        while self.parent[path[-1]] != -1:
            path.append(self.parent[path[-1]])
        path.reverse()
        return path

    def root_to_leaf_paths(self) -> list[list[int]]:
        return [self.path_to_root(leaf) for leaf in self.leaves]

    def is_ancestor(self, u: int, v: int) -> bool:
        """True if ``u`` is a proper ancestor of ``v``."""
        if self.depth[u] >= self.depth[v]:
            return False
        while self.depth[v] > self.depth[u]:
            v = self.parent[v]
        return u == v

    def serialize(self) -> str:
        return json.dumps(list(self.parent), separators=(",", ":"))


@dataclass(frozen=True)
class Labeling:
    """Bijective assignment of ranks ``1..V`` to the vertices ``0..V-1``."""

    ranks: tuple[int, ...]

    def __post_init__(self) -> None:
        ranks = tuple(int(r) for r in self.ranks)
        object.__setattr__(self, "ranks", ranks)
        if sorted(ranks) != list(range(1, len(ranks) + 1)):
            raise ValueError("ranks must be a permutation of 1..vertex_count")

    def __len__(self) -> int:
        return len(self.ranks)

    def __getitem__(self, v: int) -> int:
        return self.ranks[v]

    def serialize(self) -> str:
        return json.dumps(list(self.ranks), separators=(",", ":"))


def nary_vertex_count(n: int, h: int) -> int:
    if n == 1:
        return h + 1
    return (n ** (h + 1) - 1) // (n - 1)


def build_nary_tree(n: int, h: int, cap: int = MAX_EXPLICIT_VERTICES) -> RootedTree:
    """Complete ``n``-ary tree of height ``h`` in breadth-first vertex order."""
    if n < 1 or h < 0:
        raise ValueError(f"need n >= 1 and h >= 0, got n={n}, h={h}")
    count = nary_vertex_count(n, h)
    if count > cap:
        raise TreeSizeError(
            f"complete {n}-ary tree of height {h} has {count} vertices (cap {cap}); "
            "use lazy_is_k_accessible / monte_carlo_theta for implicit trees"
        )
    # BFS numbering: vertex v >= 1 has parent (v - 1) // n
    parent = [-1] + [(v - 1) // n for v in range(1, count)]
    return RootedTree(tuple(parent))


def random_tree(vertex_count: int, rng: np.random.Generator) -> RootedTree:
    """Random recursive tree: vertex ``v`` attaches to a uniform earlier vertex."""
    parent = [-1] + [int(rng.integers(0, v)) for v in range(1, vertex_count)]
    return RootedTree(tuple(parent))


def parse_tree(text: str) -> RootedTree:
    """Parse a one-line parent array such as ``"[-1,0,0]"``.

    Only the first non-empty line is read, so labeled-tree files are accepted
    too (use :func:`parse_labeled_tree` to get the ranks as well).
    """
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    if not lines:
        raise TreeFormatError("empty tree text")
    return RootedTree(tuple(_parse_int_list(lines[0], "parent array")))


def parse_labeled_tree(text: str) -> tuple[RootedTree, Labeling]:
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    if len(lines) != 2:
        raise TreeFormatError(f"labeled tree needs 2 lines, got {len(lines)}")
    tree = RootedTree(tuple(_parse_int_list(lines[0], "parent array")))
    ranks = _parse_int_list(lines[1], "rank array")
    if len(ranks) != tree.vertex_count:
        raise TreeFormatError(
            f"rank array has {len(ranks)} entries for {tree.vertex_count} vertices"
        )
    try:
        labeling = Labeling(tuple(ranks))
    except ValueError as exc:
        raise TreeFormatError(str(exc)) from None
    return tree, labeling


def serialize_labeled_tree(tree: RootedTree, labeling: Labeling) -> str:
    return tree.serialize() + "\n" + labeling.serialize() + "\n"


def _parse_int_list(line: str, what: str) -> list[int]:
    try:
        values = json.loads(line)
    except json.JSONDecodeError as exc:
        raise TreeFormatError(f"cannot parse {what}: {exc}") from None
    if not isinstance(values, list) or not all(
        isinstance(x, int) and not isinstance(x, bool) for x in values
    ):
        raise TreeFormatError(f"{what} must be a JSON list of integers")
    return values


def sample_labeling(tree: RootedTree, seed: int) -> Labeling:
    """Uniform random rank permutation, deterministic in ``seed``."""
    rng = np.random.default_rng(seed & _MASK64)
    return Labeling(tuple((rng.permutation(tree.vertex_count) + 1).tolist()))


def splitmix64(x: int) -> int:
    """SplitMix64 output function (finalizer) on a 64-bit integer."""
    x &= _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def derive_seed(master_seed: int, index: int) -> int:
    """Seed for trial ``index``: SplitMix64 of the ``index+1``-th Weyl step."""
    return splitmix64((master_seed + (index + 1) * GOLDEN_GAMMA) & _MASK64)


def root_key(seed: int) -> int:
    return splitmix64(seed & _MASK64)


def child_key(parent_key: int, child_index: int) -> int:
    return splitmix64((parent_key + (child_index + 1) * GOLDEN_GAMMA) & _MASK64)


def key_to_unit(key: int) -> float:
    """Top 53 bits of a salted mix of ``key`` as a double in ``[0, 1)``."""
    return (splitmix64(key ^ LABEL_SALT) >> 11) * 2.0**-53


@dataclass(frozen=True)
class LazyLabeler:
    """Deterministic labels for implicit trees, keyed by child-index paths.

    The key of the root is ``splitmix64(seed)`` and the key of child ``i`` is
    ``splitmix64(parent_key + (i + 1) * GOLDEN_GAMMA)``; the label is the top
    53 bits of a salted mix of the key.  The compiled search kernel uses the
    same recurrences, so labels agree bit-for-bit with :meth:`label`.
    """

    master_seed: int

    def key(self, vertex_path: Sequence[int]) -> int:
        k = root_key(self.master_seed)
        for i in vertex_path:
            k = child_key(k, int(i))
        return k

    def label(self, vertex_path: Sequence[int]) -> float:
        return key_to_unit(self.key(vertex_path))

    def nary_labels(self, n: int, h: int) -> list[float]:
        """Labels of the complete n-ary tree in :func:`build_nary_tree` order."""
        count = nary_vertex_count(n, h)
        keys = [root_key(self.master_seed)]
        for v in range(1, count):
            keys.append(child_key(keys[(v - 1) // n], (v - 1) % n))
        return [key_to_unit(k) for k in keys]


def ranks_from_values(values: Sequence[float]) -> Labeling:
    """Rank labeling induced by distinct real values."""
    order = np.argsort(np.asarray(values, dtype=float), kind="stable")
    ranks = np.empty(len(values), dtype=np.int64)
    ranks[order] = np.arange(1, len(values) + 1)
    if len(set(values)) != len(values):
        raise ValueError("values contain ties")
    return Labeling(tuple(ranks.tolist()))

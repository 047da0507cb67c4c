"""Deciding k-accessibility of labeled trees, with witness extraction.

A root-to-leaf path is k-accessible when an increasing-label subsequence
contains the root and the leaf and leaves no ``k`` consecutive path vertices
unselected.  Equivalently: consecutive selected depths differ by at most
``k``.  All checkers here use that gap form.
"""

from __future__ import annotations

import enum
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from kaccess import _kernel
from kaccess.tree import Labeling, LazyLabeler, RootedTree


class Verdict(str, enum.Enum):
    ACCESSIBLE = "accessible"
    BLOCKED = "blocked"
    UNDECIDED = "undecided"


_KERNEL_VERDICTS = {
    _kernel.ACCESSIBLE: Verdict.ACCESSIBLE,
    _kernel.BLOCKED: Verdict.BLOCKED,
    _kernel.UNDECIDED: Verdict.UNDECIDED,
}


@dataclass(frozen=True)
class Witness:
    """Selected vertices of one accessible path, root first and leaf last.

    For explicit trees the entries are vertex indices; for implicit trees
    they are child-index paths (tuples) from the root.
    """

    selected: tuple


@dataclass(frozen=True)
class AccessOutcome:
    verdict: Verdict
    witness: Witness | None = None
    nodes_visited: int = 0
    budget: int | None = None

    def __post_init__(self) -> None:
        if (self.witness is not None) != (self.verdict is Verdict.ACCESSIBLE):
            raise ValueError("a witness is present exactly when the verdict is accessible")
        if self.verdict is Verdict.UNDECIDED and self.nodes_visited != self.budget:
            raise ValueError("undecided requires the budget to be exhausted")

    @property
    def accessible(self) -> bool:
        return self.verdict is Verdict.ACCESSIBLE


DEFAULT_CORRIDORS = (0.0, 0.1, 0.2)
CORRIDOR_SHARE = 0.1
UNBOUNDED_PASS_BUDGET = 100_000


@dataclass(frozen=True)
class SearchPlan:
    """How the lazy search spends its budget.

    ``order`` is ``"greedy"`` (selectable children by increasing label, then
    skip-only children) or ``"natural"`` (child index order).  Each offset in
    ``corridors`` is one incomplete pass that only selects labels near the
    straight line from the root label to 1, given ``corridor_share`` of the
    budget (``UNBOUNDED_PASS_BUDGET`` evaluations when the budget is
    unbounded).  A complete search always runs last, so verdicts never depend
    on the plan except through how often the budget runs out.
    """

    order: str = "greedy"
    corridors: tuple[float, ...] = DEFAULT_CORRIDORS
    corridor_share: float = CORRIDOR_SHARE

    def __post_init__(self) -> None:
        if self.order not in ("greedy", "natural"):
            raise ValueError(f"order must be 'greedy' or 'natural', got {self.order!r}")
        if not 0.0 <= self.corridor_share * len(self.corridors) < 1.0:
            raise ValueError("corridor passes must leave part of the budget to the complete search")

    def kernel_args(self, budget: int | None) -> tuple[bool, np.ndarray, int]:
        if budget is None:
            pass_budget = UNBOUNDED_PASS_BUDGET
        else:
            pass_budget = int(self.corridor_share * budget)
        return (
            self.order == "greedy",
            np.asarray(self.corridors, dtype=np.float64),
            pass_budget,
        )


PLAIN_DFS = SearchPlan(order="natural", corridors=())


def _check_k(k: int) -> None:
    if k < 1:
        raise ValueError(f"k must be a positive integer, got {k}")


def path_witness(labels: Sequence[float], k: int) -> list[int] | None:
    """Positions of an increasing subsequence spanning both endpoints with gaps <= k.

    Returns ``None`` when no such subsequence exists.  Runs in O(len * k).
    """
    _check_k(k)
    if len(labels) == 0:
        raise ValueError("label sequence must be nonempty")
    if len(set(labels)) != len(labels):
        raise ValueError("labels must be distinct")
    size = len(labels)
    back = [-2] * size  # -2: unreachable
    back[0] = -1
    for i in range(1, size):
        for j in range(i - 1, max(-1, i - k - 1), -1):
            if back[j] != -2 and labels[j] < labels[i]:
                back[i] = j
                break
    if back[-1] == -2:
        return None
    out = [size - 1]
    while back[out[-1]] != -1:
        out.append(back[out[-1]])
    return out[::-1]


def check_path(labels: Sequence[float], k: int) -> bool:
    """True if the labeled path (root first) is k-accessible."""
    return path_witness(labels, k) is not None


def is_k_accessible(tree: RootedTree, labeling: Labeling, k: int) -> AccessOutcome:
    """Exhaustive search over states (vertex, last selected vertex, skips in a row).

    The root is always selected; a vertex may be skipped only if it is not a
    leaf and fewer than ``k - 1`` vertices were skipped right before it.
    Failed states are memoized, so the work is O(V * k^2).
    """
    _check_k(k)
    if len(labeling) != tree.vertex_count:
        raise ValueError(
            f"labeling has {len(labeling)} ranks for a tree with {tree.vertex_count} vertices"
        )
    ranks = labeling.ranks
    children = tree.children
    root = tree.root
    visited_vertices = {root}
    if not children[root]:
        return AccessOutcome(Verdict.ACCESSIBLE, Witness((root,)), 1)

    def successors(v: int, last: int, skipped: int):
        # selecting v comes first in the child order, then skipping it
        if v == root or ranks[v] > ranks[last]:
            for c in children[v]:
                yield c, v, 0, True
        if v != root and skipped + 1 < k:
            for c in children[v]:
                yield c, last, skipped + 1, False

    failed: set[tuple[int, int, int]] = set()
    # frame: (state, successor iterator, selected flag of the current move)
    stack = [((root, root, 0), successors(root, root, 0))]
    selected_flags: list[bool] = []
    while stack:
        state, moves = stack[-1]
        move = next(moves, None)
        if move is None:
            failed.add(state)
            stack.pop()
            if selected_flags:
                selected_flags.pop()
            continue
        c, last, skipped, sel = move
        nxt = (c, last, skipped)
        if nxt in failed:
            continue
        visited_vertices.add(c)
        if not children[c]:
            if ranks[c] > ranks[last]:
                chosen = [frame[0][0] for frame, f in zip(stack, selected_flags + [sel]) if f]
                return AccessOutcome(
                    Verdict.ACCESSIBLE, Witness(tuple(chosen) + (c,)), len(visited_vertices)
                )
            failed.add(nxt)
            continue
        selected_flags.append(sel)
        stack.append((nxt, successors(c, last, skipped)))
    return AccessOutcome(Verdict.BLOCKED, None, len(visited_vertices))


def validate_witness(tree: RootedTree, labeling: Labeling, k: int, witness: Witness) -> bool:
    """Independent verification of a witness against the definition."""
    try:
        sel = [int(v) for v in witness.selected]
    except (TypeError, ValueError):
        return False
    if not sel or k < 1 or len(labeling) != tree.vertex_count:
        return False
    if any(not 0 <= v < tree.vertex_count for v in sel):
        return False
    if sel[0] != tree.root or not tree.is_leaf(sel[-1]):
        return False
    for u, v in zip(sel, sel[1:]):
        if labeling[u] >= labeling[v]:
            return False
        gap = tree.depth[v] - tree.depth[u]
        if not 1 <= gap <= k or not tree.is_ancestor(u, v):
            return False
    return True


def lazy_is_k_accessible(
    n: int,
    h: int,
    k: int,
    labeler: LazyLabeler,
    budget: int | None = None,
    plan: SearchPlan = SearchPlan(),
) -> AccessOutcome:
    """Budgeted depth-first search on the implicit complete n-ary tree of height h.

    Labels are generated on demand by ``labeler``; ``budget`` caps the total
    number of label evaluations (``None`` for unbounded).  Every vertex the
    search reaches carries, per number of skips in a row, only the lowest
    threshold that reaches it, so a complete pass labels each vertex once.
    See :class:`SearchPlan` for the pass structure.
    """
    _check_k(k)
    if n < 1 or h < 0:
        raise ValueError(f"need n >= 1 and h >= 0, got n={n}, h={h}")
    if budget is not None and budget < 1:
        raise ValueError("budget must be at least 1")
    choice = np.empty(max(h, 1), dtype=np.int64)
    labels = np.empty(h + 1, dtype=np.float64)
    greedy, offsets, pass_budget = plan.kernel_args(budget)
    code, visited = _kernel.staged_search(
        n, h, k, -1 if budget is None else budget,
        np.uint64(labeler.master_seed & 0xFFFFFFFFFFFFFFFF),
        greedy, offsets, pass_budget, choice, labels,
    )
    verdict = _KERNEL_VERDICTS[code]
    witness = None
    if verdict is Verdict.ACCESSIBLE:
        path = choice[:h].tolist()
        positions = path_witness(labels[: h + 1].tolist(), k)
        witness = Witness(tuple(tuple(path[:p]) for p in positions))
    return AccessOutcome(verdict, witness, int(visited), budget)

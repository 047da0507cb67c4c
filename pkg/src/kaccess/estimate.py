"""Exact and Monte Carlo estimation of the k-accessibility probability.

Exact values enumerate every rank permutation of a tiny tree (continuous
i.i.d. labels only matter through their order).  Monte Carlo runs the lazy
search on implicit complete n-ary trees, one derived seed per trial.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from kaccess import _kernel
from kaccess.accessibility import SearchPlan
from kaccess.closure import MonotoneDag
from kaccess.tree import RootedTree, derive_seed

EXACT_VERTEX_CAP = 9
DEFAULT_Z = 2.576
SEED_DERIVATION = "splitmix64(master_seed + (i + 1) * 0x9E3779B97F4A7C15)"

ExactTheta = Fraction


def wilson_interval(successes: int, trials: int, z: float = DEFAULT_Z) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials < 1 or not 0 <= successes <= trials:
        raise ValueError(f"need 0 <= successes <= trials and trials >= 1, got {successes}/{trials}")
    if z <= 0:
        raise ValueError("z must be positive")
    p = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    centre = (p + z2 / (2 * trials)) / denom
    half = z / denom * math.sqrt(p * (1 - p) / trials + z2 / (4 * trials * trials))
    lo = 0.0 if successes == 0 else max(0.0, centre - half)
    hi = 1.0 if successes == trials else min(1.0, centre + half)
    return lo, hi


@dataclass(frozen=True)
class ThetaEstimate:
    trials: int
    accessible: int
    blocked: int
    undecided: int
    theta_lo: float
    theta_hi: float
    wilson_lo: float
    wilson_hi: float
    master_seed: int
    z: float = DEFAULT_Z
    label_evaluations: int = 0

    def __post_init__(self) -> None:
        if self.accessible + self.blocked + self.undecided != self.trials:
            raise ValueError("verdict counts do not sum to the number of trials")
        if not 0.0 <= self.theta_lo <= self.theta_hi <= 1.0:
            raise ValueError("bracket must satisfy 0 <= theta_lo <= theta_hi <= 1")
        if not 0.0 <= self.wilson_lo <= self.wilson_hi <= 1.0:
            raise ValueError("Wilson bounds must lie in [0, 1]")

    @classmethod
    def from_counts(
        cls, accessible: int, blocked: int, undecided: int, master_seed: int,
        z: float = DEFAULT_Z, label_evaluations: int = 0,
    ) -> "ThetaEstimate":
        trials = accessible + blocked + undecided
        lo, hi = wilson_interval(accessible, trials, z)
        return cls(
            trials, accessible, blocked, undecided,
            accessible / trials, (accessible + undecided) / trials,
            lo, hi, master_seed, z, label_evaluations,
        )

    @property
    def undecided_fraction(self) -> float:
        return self.undecided / self.trials

    def to_json(self) -> dict:
        return asdict(self)


def _check_cap(count: int, cap: int) -> None:
    if count > cap:
        raise ValueError(
            f"{count} vertices exceed the exact-enumeration cap {cap} ({count}! permutations)"
        )


def _all_rank_orders(count: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(1, count + 1))), dtype=np.int8)


def exact_theta(tree: RootedTree, k: int, cap: int = EXACT_VERTEX_CAP) -> Fraction:
    """Fraction of the ``V!`` rank orders under which ``tree`` is k-accessible.

    All permutations are processed at once: every vertex carries, per
    permutation, the lowest reachable "last selected" rank for each number of
    skips in a row.
    """
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    count = tree.vertex_count
    _check_cap(count, cap)
    if count == 1:
        return Fraction(1)
    w = _all_rank_orders(count)
    total = w.shape[0]
    inf = np.int8(count + 1)

    arrive: dict[int, np.ndarray] = {}
    root_out = np.full((total, k), inf, dtype=np.int8)
    root_out[:, 0] = w[:, tree.root]
    for c in tree.children[tree.root]:
        arrive[c] = root_out
    success = np.zeros(total, dtype=bool)
    for u in tree.preorder[1:]:
        a = arrive.pop(u)
        sel = w[:, u] > a.min(axis=1)
        if not tree.children[u]:
            success |= sel
            continue
        out = np.empty_like(a)
        out[:, 0] = np.where(sel, w[:, u], inf)
        out[:, 1:] = a[:, :-1]
        for c in tree.children[u]:
            arrive[c] = out
    return Fraction(int(success.sum()), total)


def exact_theta_dag(dag: MonotoneDag, cap: int = EXACT_VERTEX_CAP) -> Fraction:
    """Fraction of rank orders with an increasing source-to-sink path."""
    count = dag.vertex_count
    _check_cap(count, cap)
    if count == 1:
        return Fraction(1)
    w = _all_rank_orders(count)
    reach = np.zeros((count, w.shape[0]), dtype=bool)
    reach[dag.source] = True
    for v in dag.topological_order:
        if v == dag.source:
            continue
        for u in dag.predecessors[v]:
            reach[v] |= reach[u] & (w[:, u] < w[:, v])
    hit = np.zeros(w.shape[0], dtype=bool)
    for s in dag.sinks:
        hit |= reach[s]
    return Fraction(int(hit.sum()), w.shape[0])


def trial_seeds(master_seed: int, trials: int) -> np.ndarray:
    return np.array([derive_seed(master_seed, i) for i in range(trials)], dtype=np.uint64)


def monte_carlo_theta(
    n: int,
    h: int,
    k: int,
    trials: int,
    master_seed: int,
    budget: int | None = None,
    workers: int = 1,
    z: float = DEFAULT_Z,
    plan: SearchPlan = SearchPlan(),
) -> ThetaEstimate:
    """Estimate theta_k of the complete n-ary tree of height h.

    Trial ``i`` searches the implicit tree labeled by the seed
    ``derive_seed(master_seed, i)``.  Trials are split into contiguous chunks
    run on ``workers`` threads (the compiled kernel releases the GIL); counts
    do not depend on the split.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if n < 1 or h < 0 or k < 1:
        raise ValueError(f"need n >= 1, h >= 0, k >= 1, got n={n}, h={h}, k={k}")
    if budget is not None and budget < 1:
        raise ValueError("budget must be at least 1")
    if workers < 1:
        raise ValueError("workers must be at least 1")
    greedy, offsets, pass_budget = plan.kernel_args(budget)
    seeds = trial_seeds(master_seed, trials)
    verdicts = np.empty(trials, dtype=np.int64)
    visits = np.empty(trials, dtype=np.int64)
    cap = -1 if budget is None else budget

    def run(lo: int, hi: int) -> None:
        _kernel.run_trials(
            n, h, k, cap, greedy, offsets, pass_budget,
            seeds[lo:hi], verdicts[lo:hi], visits[lo:hi],
        )

    bounds = np.linspace(0, trials, min(workers, trials) + 1).astype(int)
    if len(bounds) == 2:
        run(0, trials)
    else:
        with ThreadPoolExecutor(max_workers=len(bounds) - 1) as pool:
            list(pool.map(run, bounds[:-1], bounds[1:]))

    counts = np.bincount(verdicts, minlength=3)
    return ThetaEstimate.from_counts(
        int(counts[_kernel.ACCESSIBLE]), int(counts[_kernel.BLOCKED]),
        int(counts[_kernel.UNDECIDED]), master_seed, z, int(visits.sum()),
    )

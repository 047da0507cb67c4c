"""Compiled depth-first search for k-accessibility on implicit n-ary trees.

The labels are generated with exactly the recurrences of
:class:`kaccess.tree.LazyLabeler`; all arithmetic is on ``uint64`` so it wraps
modulo 2**64 the same way the masked Python integers do.
"""

import numpy as np
from numba import njit

ACCESSIBLE = 0
BLOCKED = 1
UNDECIDED = 2

_U30 = np.uint64(30)
_U27 = np.uint64(27)
_U31 = np.uint64(31)
_U11 = np.uint64(11)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_SALT = np.uint64(0xD1B54A32D192ED03)
_ONE = np.uint64(1)
_INV53 = 2.0**-53


@njit(cache=True, nogil=True)
def _mix(x):
    x = (x ^ (x >> _U30)) * _M1
    x = (x ^ (x >> _U27)) * _M2
    return x ^ (x >> _U31)


@njit(cache=True, nogil=True)
def _unit(key):
    return np.float64(_mix(key ^ _SALT) >> _U11) * _INV53


@njit(cache=True, nogil=True)
def _child(key, i):
    return _mix(key + (np.uint64(i) + _ONE) * _GAMMA)


@njit(cache=True, nogil=True)
def _lowest(front, d, k):
    low = front[d, 0]
    for m in range(1, k):
        if front[d, m] < low:
            low = front[d, m]
    return low


@njit(cache=True, nogil=True)
def frontier_search(n, h, k, budget, seed, greedy, ceiling, choice, labels):
    """Search one implicit tree; returns ``(verdict, label_evaluations)``.

    ``front[d, m]`` is the lowest label of the last selected vertex over all
    ways of reaching a child of the depth-``d`` path vertex after ``m``
    skipped vertices in a row (``inf`` if impossible).  Lower thresholds and
    fewer skips dominate, so one vector per vertex replaces a search over
    individual states and each vertex is labeled at most once.

    Internal vertices are expanded by labeling all their children.  With
    ``greedy`` the selectable children are tried in increasing label order,
    then the skip-only ones; otherwise children go in index order.  Leaves
    are labeled one at a time, stopping at the first selectable one.

    A vertex at depth ``d`` may only be selected if its label is at most
    ``ceiling[d]``.  With an all-``inf`` ceiling the search is complete; with
    a finite one, BLOCKED only means "no witness inside the ceiling".

    On success ``choice[:h]`` holds the child indices of the accessible path
    and ``labels[:h+1]`` its labels.  ``budget < 0`` means unbounded.
    """
    inf = np.inf
    key = np.empty(h + 1, dtype=np.uint64)
    front = np.full((h + 1, k), inf)
    ckeys = np.empty((max(h, 1), n), dtype=np.uint64)
    clabs = np.empty((max(h, 1), n))
    order = np.empty((max(h, 1), n), dtype=np.int64)
    sortkey = np.empty(n)
    count = np.zeros(max(h, 1), dtype=np.int64)
    pos = np.zeros(max(h, 1), dtype=np.int64)

    key[0] = _mix(seed)
    labels[0] = _unit(key[0])
    visited = 1
    if h == 0:
        return ACCESSIBLE, visited
    front[0, 0] = labels[0]

    d = 0
    expand = True
    while d >= 0:
        if expand:
            expand = False
            low = _lowest(front, d, k)
            if d + 1 == h:
                # children are leaves: stop at the first selectable one
                for i in range(n):
                    if budget >= 0 and visited >= budget:
                        return UNDECIDED, visited
                    w = _unit(_child(key[d], i))
                    visited += 1
                    if w > low and w <= ceiling[h]:
                        choice[d] = i
                        labels[h] = w
                        return ACCESSIBLE, visited
                d -= 1
                continue
            for i in range(n):
                if budget >= 0 and visited >= budget:
                    return UNDECIDED, visited
                ck = _child(key[d], i)
                ckeys[d, i] = ck
                clabs[d, i] = _unit(ck)
                visited += 1
                if not greedy:
                    sortkey[i] = i
                elif clabs[d, i] > low and clabs[d, i] <= ceiling[d + 1]:
                    sortkey[i] = clabs[d, i]
                else:
                    sortkey[i] = 2.0 + i
            order[d, :] = np.argsort(sortkey)
            count[d] = n
            pos[d] = 0

        if pos[d] == count[d]:
            d -= 1
            continue
        i = order[d, pos[d]]
        pos[d] += 1
        w = clabs[d, i]
        selectable = w > _lowest(front, d, k) and w <= ceiling[d + 1]

        alive = False
        best = inf
        if selectable:
            front[d + 1, 0] = w
            best = w
            alive = True
        else:
            front[d + 1, 0] = inf
        for m in range(1, k):
            t = front[d, m - 1]
            # a state with more skips is kept only if its threshold is lower
            if t < best:
                front[d + 1, m] = t
                best = t
                alive = True
            else:
                front[d + 1, m] = inf
        if not alive:
            continue
        choice[d] = i
        d += 1
        key[d] = ckeys[d - 1, i]
        labels[d] = w
        expand = True
    return BLOCKED, visited


@njit(cache=True, nogil=True)
def staged_search(n, h, k, budget, seed, greedy, offsets, pass_budget, choice, labels):
    """Corridor passes followed by one complete search; ``(verdict, evaluations)``.

    Pass ``j`` caps the label selected at depth ``d`` at
    ``x + (1 - x) * min(1, d / h + offsets[j])`` (``x`` is the root label) and
    may spend ``pass_budget`` evaluations.  Witnesses are only ever accepted,
    never ruled out, by a corridor pass, so the final complete pass decides
    BLOCKED.  It gets whatever budget the passes left over.
    """
    ceiling = np.full(h + 1, np.inf)
    used = 0
    if h > 0 and pass_budget >= 1:
        x = _unit(_mix(seed))
        for j in range(offsets.shape[0]):
            for d in range(h):
                ceiling[d] = x + (1.0 - x) * min(1.0, d / h + offsets[j])
            ceiling[h] = np.inf
            v, c = frontier_search(n, h, k, pass_budget, seed, greedy, ceiling, choice, labels)
            used += c
            if v == ACCESSIBLE:
                return v, used
        ceiling[:] = np.inf
    rest = -1 if budget < 0 else budget - used
    v, c = frontier_search(n, h, k, rest, seed, greedy, ceiling, choice, labels)
    return v, used + c


@njit(cache=True, nogil=True)
def run_trials(n, h, k, budget, greedy, offsets, pass_budget, seeds, verdicts, visits):
    choice = np.empty(max(h, 1), dtype=np.int64)
    labels = np.empty(h + 1, dtype=np.float64)
    for t in range(seeds.shape[0]):
        v, c = staged_search(
            n, h, k, budget, seeds[t], greedy, offsets, pass_budget, choice, labels
        )
        verdicts[t] = v
        visits[t] = c

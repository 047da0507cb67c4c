"""Numerical theta_k of complete n-ary trees by a distributional recursion (k <= 2).

Children of a vertex have independent subtrees, so the success probability
of a subtree depends only on the thresholds it inherits.  For ``k = 1`` that
is one number ``t`` and::

    F_0(t) = 1,   F_r(t) = 1 - (1 - integral_t^1 F_{r-1}(s) ds) ** n

For ``k = 2`` a vertex inherits ``a`` (threshold if its parent was selected)
and ``b`` (threshold if its parent was skipped, kept only when ``b < a``),
which gives a two-dimensional recursion on a grid.  Integrals use the
trapezoid rule, so values carry a discretization error of order ``1/grid**2``
(larger where ``n`` is big and the integrands are steep).
"""

from __future__ import annotations

import numpy as np


def _tail_integral(f: np.ndarray, dx: float) -> np.ndarray:
    """``integral_x^1 f`` along the last axis, evaluated at every grid point."""
    steps = (f[..., 1:] + f[..., :-1]) * (dx / 2)
    cum = np.concatenate([np.zeros(f.shape[:-1] + (1,)), np.cumsum(steps, axis=-1)], axis=-1)
    return cum[..., -1:] - cum


def theta_quadrature(n: int, h: int, k: int, grid: int = 2001) -> float:
    if n < 1 or h < 0:
        raise ValueError(f"need n >= 1 and h >= 0, got n={n}, h={h}")
    if k not in (1, 2):
        raise ValueError("quadrature is implemented for k in {1, 2}")
    if h == 0:
        return 1.0
    x = np.linspace(0.0, 1.0, grid)
    dx = x[1] - x[0]
    if k == 1:
        return _theta1(n, h, x, dx)
    return _theta2(n, h, x, dx)


def _theta1(n: int, h: int, x: np.ndarray, dx: float) -> float:
    # f: success probability of a child subtree given the parent's label t
    f = np.ones_like(x)
    for _ in range(h):
        f = 1.0 - (1.0 - _tail_integral(f, dx)) ** n
    return float(np.trapezoid(f, x))


def _theta2(n: int, h: int, x: np.ndarray, dx: float) -> float:
    # Success probability of a residual-height-r vertex given its inherited state:
    #   p_a[a]     state (a, none)    p_b[b]  state (none, b)
    #   p_ab[a, b] state (a, b) with b < a (only that triangle is meaningful)
    p_a = 1.0 - x
    p_b = 1.0 - x
    p_ab = np.tile(1.0 - x, (x.size, 1))
    for _ in range(h - 1):
        # q_*: probability that at least one of the n children succeeds
        q_a = 1.0 - (1.0 - p_a) ** n
        q_b = 1.0 - (1.0 - p_b) ** n
        q_ab = 1.0 - (1.0 - p_ab) ** n  # q_ab[w, a]: child state (w, a)
        tail_a = _tail_integral(q_a, dx)
        # skip_tail[a] = integral_a^1 q_ab[w, a] dw
        skip_tail = np.diag(_tail_integral(q_ab.T, dx)).copy()
        p_a = x * q_b + skip_tail
        p_b = tail_a
        p_ab = x[None, :] * q_b[:, None] + tail_a[None, :] - tail_a[:, None] + skip_tail[:, None]
    q_a = 1.0 - (1.0 - p_a) ** n
    return float(np.trapezoid(q_a, x))

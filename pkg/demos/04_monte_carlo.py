"""
Estimating theta on trees too big to build
==========================================

Labels of the complete n-ary tree are generated on demand from a seed, and a
budgeted search decides each trial.  Trials that run out of budget are
reported as undecided and widen the bracket instead of being guessed.
"""

import time

from kaccess import exact_theta, build_nary_tree, monte_carlo_theta
from kaccess.quadrature import theta_quadrature

# Small enough to enumerate: the estimate should bracket the exact value.
est = monte_carlo_theta(2, 2, 2, 20_000, master_seed=1)
print("binary h=2 k=2:", est.theta_lo, "exact", float(exact_theta(build_nary_tree(2, 2), 2)),
      "99% Wilson", (round(est.wilson_lo, 4), round(est.wilson_hi, 4)))

# A tree with 4^20 leaves.  The quadrature recursion gives an independent value.
start = time.perf_counter()
est = monte_carlo_theta(4, 20, 2, 2000, master_seed=2, budget=10**6)
print(f"n=4 h=20 k=2: [{est.theta_lo}, {est.theta_hi}] "
      f"quadrature {theta_quadrature(4, 20, 2):.4f} ({time.perf_counter() - start:.1f}s)")

# Starving the search: one label evaluation per trial decides nothing.
est = monte_carlo_theta(2, 30, 1, 10, master_seed=3, budget=1)
print("budget 1:", est.undecided, "undecided, bracket", (est.theta_lo, est.theta_hi))

# Threads split the trials; the tallies do not depend on the split.
a = monte_carlo_theta(5, 14, 2, 1000, master_seed=4, budget=10**4)
b = monte_carlo_theta(5, 14, 2, 1000, master_seed=4, budget=10**4, workers=8)
print("same tallies with 8 workers:", a == b)

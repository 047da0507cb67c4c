"""
A threshold scan for k = 2
==========================

With arity c * sqrt(h / (2e)), small c makes accessible paths vanish as h
grows while large c keeps them.  The scan writes CSV, JSON and the resolved
config next to each other.
"""

import sys
from pathlib import Path

from kaccess.experiments import parse_config, run_scan, scaling_arity

config_path = Path(__file__).with_name("scan_k2.txt")
config = parse_config(config_path.read_text())
out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("scan_out")
config = config.__class__(**{**config.__dict__, "output": str(out / "k2")})

for h in config.h_values:
    print(f"h={h}: arity", [scaling_arity(h, 2, c) for c in config.params])

for row in run_scan(config):
    print(f"h={row.h:3d} c={row.c} n={row.n_used}: theta in [{row.theta_lo:.3f}, {row.theta_hi:.3f}]")
print("wrote", sorted(p.name for p in out.iterdir()))

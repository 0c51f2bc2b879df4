"""Coefficient-sign sweep of the tilted normalizer over (gamma, a, n)."""
import argparse

import numpy as np

from casualstab.catalog import ex05_sweep

ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("--order", type=int, default=64)
ap.add_argument("--gamma-step", type=float, default=0.05)
args = ap.parse_args()

gammas = np.round(np.arange(args.gamma_step, 1.0 + 1e-9, args.gamma_step), 10)
a_values = np.round(np.arange(0.1, 1.0, 0.1), 10)
out = ex05_sweep(gammas, a_values, range(2, 17), order=args.order)
print(f"checked {out['checked']} parameter triples to order {out['order']}")
if not out["violations"]:
    print("no negative coefficients")
for v in out["violations"]:
    print(f"gamma={v['gamma']:.3f} a={v['a']:.1f} n={v['n']:2d}: first negative at k={v['first_violation']}, "
          f"min {v['min_coefficient']:.3e}")

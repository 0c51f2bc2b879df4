"""Smallest index from which the Sibuya pursuit normalizer stays a p.g.f."""
import argparse

from casualstab.catalog import ex06_threshold

ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("--n-max", type=int, default=64)
ap.add_argument("--order", type=int, default=64)
ap.add_argument("gammas", nargs="*", type=float, default=[0.1, 0.3, 0.5, 0.7, 0.9])
args = ap.parse_args()

for g in args.gammas:
    out = ex06_threshold(g, args.n_max, args.order)
    print(f"gamma={g:.3f}: threshold {out['threshold']}, invalid indices {out['invalid'] or 'none'}")

"""Distance of the tempered normalizer to the classical scaling as the tempering vanishes."""
import numpy as np

from casualstab.catalog import ex02_limit_distance

hs = np.logspace(0, -4, 9)
for n in (2, 4):
    d0 = ex02_limit_distance(1.0, n)
    print(f"n={n}")
    for h in hs:
        d = ex02_limit_distance(h, n)
        print(f"  h={h:8.1e}  distance {d:.5f}  ratio to h=1 {d / d0:.4f}")

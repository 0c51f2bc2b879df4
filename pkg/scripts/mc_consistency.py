"""Two-sample KS checks of the simulated cases over several seeds."""
import argparse
import time

from casualstab.catalog import get_case
from casualstab.montecarlo import NoSampler, simulate_and_test

ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("--samples", type=int, default=200_000)
ap.add_argument("--seeds", type=int, default=10)
ap.add_argument("cases", nargs="*", default=["EX04G:2", "EX12:4", "EX14:2", "EX08:2", "EX13:2", "EX15:2"])
args = ap.parse_args()

for spec in args.cases:
    cid, _, n = spec.partition(":")
    claim = get_case(cid).claim()
    n = int(n) if n else None
    t0 = time.perf_counter()
    try:
        reps = [simulate_and_test(claim, N=args.samples, seed=s, n=n) for s in range(args.seeds)]
    except NoSampler as e:
        print(f"{cid}: not simulated ({e})")
        continue
    passes = sum(r.passed for r in reps)
    worst = max(r.ks for r in reps)
    print(f"{cid} n={reps[0].n}: {passes}/{args.seeds} below {reps[0].critical:.5f}, "
          f"max KS {worst:.5f}, {time.perf_counter() - t0:.1f} s")

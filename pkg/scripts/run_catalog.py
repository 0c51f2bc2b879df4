"""Run every catalog case and print one line per case."""
import argparse
import sys

from casualstab.catalog import run_all


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--simulate", action="store_true")
    ap.add_argument("--samples", type=int, default=200_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    results = run_all(simulate=args.simulate, N=args.samples, seed=args.seed)
    for r in results:
        worst = f"{r.report.worst_residual:.2e}" if r.report is not None else "-"
        line = f"{r.case_id:10s} {r.verdict.value:18s} expected {r.expected.value:18s} worst {worst}"
        if r.simulation is not None:
            line += f"  KS {r.simulation.ks:.5f} / {r.simulation.critical:.5f}"
        elif r.simulation_error:
            line += f"  (no simulation: {r.simulation_error})"
        print(line)
    return 0 if all(r.matches for r in results) else 1


if __name__ == "__main__":
    sys.exit(main())

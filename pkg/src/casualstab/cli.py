"""Command-line interface.

Exit status: 0 when every executed verdict equals its expected verdict,
1 on a mismatch, 2 on a usage or input error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import catalog
from .montecarlo import DEFAULT_SAMPLES, NoSampler, simulate_and_test
from .normalize import Definition, Provenance, System, catalog_family, fixed_family, solve_normalizer
from .serialize import dumps, with_schema
from .transforms import FAMILIES, Kind, make_distribution, make_transform
from .verify import SOLVED_TOL, StabilityClaim, Verdict, check_stability, standard_grid

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2

PGF_ALIASES = {
    "tilted": "tilted_stable_pgf", "tilted_q": "tilted_stable_normalizer",
    "eq13": "tilted_stable_pgf", "eq14": "tilted_stable_normalizer", "geometric": "geometric_pgf",
    "geometric_q": "geometric_normalizer", "sibuya": "sibuya_pgf",
    "sibuya_q": "sibuya_pursuit_normalizer", "chebyshev": "chebyshev_pgf",
    "chebyshev_q": "chebyshev_normalizer", "identity": "identity_pgf",
}

EPILOG = """\
CSV columns
  verify --csv:   n, point_re, point_im, residual
  coeffs:         k, coefficient
  solve:          x, value
  scan --csv:     gamma, a, n, first_violation, min_coefficient

Spec files (verify <file.json>) hold one object:
  {"distribution": {"family": "gamma", "params": {"b": 1, "gamma": 2}},
   "kind": "LAPLACE", "system": "ADDITIVE", "definition": "CS",
   "normalizer": {"family": "gamma_normalizer", "params": {"b": 1}},
   "n_range": [1, 2, 3], "tol": 1e-9, "grid": [0.1, 1.0], "expected": "PASS"}
  "normalizer": {"solve": true} uses the equation-solved normalizer instead.
"""


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# value parsing


def _scalar(text: str):
    t = text.strip()
    try:
        return int(t)
    except ValueError:
        pass
    try:
        return float(t)
    except ValueError:
        raise UsageError(f"not a number: {text!r}") from None


def parse_values(text: str) -> list:
    """'1,2,3' or 'start:stop[:step]' (inclusive)."""
    if ":" in text:
        parts = [_scalar(p) for p in text.split(":")]
        if len(parts) not in (2, 3):
            raise UsageError(f"bad range {text!r}")
        start, stop = parts[0], parts[1]
        step = parts[2] if len(parts) == 3 else 1
        if step <= 0:
            raise UsageError(f"range step must be positive in {text!r}")
        count = int(np.floor((stop - start) / step + 1e-9)) + 1
        vals = [start + i * step for i in range(count)]
        if all(isinstance(v, int) for v in parts):
            return vals
        return [round(float(v), 12) for v in vals]
    return [_scalar(p) for p in text.split(",") if p.strip()]


LIST_KEYS = ("n_range", "gammas", "a_values", "n_values")


def parse_overrides(pairs) -> dict:
    out = {}
    for pair in pairs or []:
        if "=" not in pair:
            raise UsageError(f"override {pair!r} is not key=value")
        k, v = pair.split("=", 1)
        k, vals = k.strip(), parse_values(v)
        out[k] = tuple(vals) if k in LIST_KEYS or len(vals) != 1 else vals[0]
    return out


def parse_flag_params(extra: list[str]) -> dict:
    """--name value pairs left over by argparse."""
    params, i = {}, 0
    while i < len(extra):
        tok = extra[i]
        if not tok.startswith("--"):
            raise UsageError(f"unexpected argument {tok!r}")
        key = tok[2:]
        if "=" in key:
            key, val = key.split("=", 1)
            i += 1
        else:
            if i + 1 >= len(extra):
                raise UsageError(f"missing value for --{key}")
            val = extra[i + 1]
            i += 2
        params[key.replace("-", "_")] = _scalar(val)
    return params


# --------------------------------------------------------------------------
# spec files


def _field(obj, path, cast=None, required=True, default=None):
    cur = obj
    for part in path.split("."):
        if not isinstance(cur, dict) or part not in cur:
            if required:
                raise UsageError(f"field '{path}': missing")
            return default
        cur = cur[part]
    if cast is None:
        return cur
    try:
        return cast(cur)
    except (ValueError, TypeError, KeyError) as e:
        raise UsageError(f"field '{path}': {e}") from None


def load_spec(path: str) -> tuple[StabilityClaim, Verdict]:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise UsageError(f"{path}: line {e.lineno}, column {e.colno}: {e.msg}") from None
    if not isinstance(obj, dict):
        raise UsageError(f"{path}: top level must be an object")
    try:
        return _claim_from_spec(obj)
    except UsageError as e:
        raise UsageError(f"{path}: {e}") from None


def _claim_from_spec(obj: dict) -> tuple[StabilityClaim, Verdict]:
    fam = _field(obj, "distribution.family", str)
    params = _field(obj, "distribution.params", dict, required=False, default={})
    try:
        dist = make_distribution(fam, params)
    except (KeyError, ValueError) as e:
        raise UsageError(f"field 'distribution': {e}") from None
    kind = _field(obj, "kind", Kind)
    system = _field(obj, "system", System)
    definition = _field(obj, "definition", Definition)
    try:
        T = dist.transform(kind)
    except KeyError as e:
        raise UsageError(f"field 'kind': {e}") from None
    n_range = _field(obj, "n_range", list, required=False, default=list(range(1, 9)))
    if not n_range or not all(isinstance(n, (int, float)) and n > 0 for n in n_range):
        raise UsageError("field 'n_range': need a nonempty list of positive numbers")

    solved = bool(_field(obj, "normalizer.solve", required=False, default=False))
    tol_default = SOLVED_TOL if solved else 1e-9
    tol = _field(obj, "tol", float, required=False, default=tol_default)
    if solved:
        g = fixed_family(lambda n: solve_normalizer(T, definition, n), T.kind,
                         f"solved:{T.family}", Provenance.SOLVED)
    else:
        nf = _field(obj, "normalizer.family", str)
        nparams = _field(obj, "normalizer.params", dict, required=False, default={})
        if nf not in FAMILIES:
            raise UsageError(f"field 'normalizer.family': unknown family {nf!r}")
        try:
            if "n" in FAMILIES[nf].params:
                g = catalog_family(nf, **nparams)
            else:
                fixed = make_transform(nf, nparams)
                g = fixed_family(lambda n: fixed, fixed.kind, nf)
        except (KeyError, ValueError) as e:
            raise UsageError(f"field 'normalizer.params': {e}") from None
    grid = _field(obj, "grid", list, required=False, default=None)
    if grid is not None:
        grid = np.asarray(grid, dtype=float)
        if grid.size == 0:
            raise UsageError("field 'grid': empty")
        if not np.all(T.domain.contains(grid)):
            raise UsageError(f"field 'grid': points outside the domain {T.domain.describe()}")
    expected = _field(obj, "expected", Verdict, required=False, default=Verdict.PASS)
    try:
        claim = StabilityClaim(system=system, definition=definition, transform=T, distribution=dist,
                               normalizers=g, n_range=n_range, grid=grid, tol=tol,
                               require_validity=bool(_field(obj, "require_validity", required=False,
                                                            default=True)),
                               case_id=str(_field(obj, "id", required=False, default="spec")))
    except ValueError as e:
        raise UsageError(str(e)) from None
    return claim, expected


# --------------------------------------------------------------------------
# output


def _write(text: str, out: str | None):
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text)
    except OSError as e:
        raise UsageError(f"cannot write {out}: {e.strerror}") from None


def _csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in r])
    return buf.getvalue()


def _residual_rows(report):
    grid = np.asarray(report.grid)
    for n, res in report.residuals.items():
        for x, r in zip(grid, res):
            z = complex(x)
            yield [n, z.real, z.imag, r]


# --------------------------------------------------------------------------
# commands


def cmd_verify(args) -> int:
    target = args.target
    if target.lower().endswith(".json") or Path(target).is_file():
        claim, expected = load_spec(target)
        if args.tol is not None:
            claim.tol = args.tol
        report = check_stability(claim)
        payload = {"case_id": claim.case_id, "expected": expected.value,
                   "verdict": report.verdict.value, "matches": report.verdict is expected,
                   "report": report.to_dict()}
        matches = report.verdict is expected
    else:
        try:
            catalog.get_case(target)
        except KeyError as e:
            raise UsageError(str(e.args[0])) from None
        overrides = parse_overrides(args.set)
        if args.tol is not None:
            overrides["tol"] = args.tol
        try:
            result = catalog.run_case(target, overrides)
        except ValueError as e:
            raise UsageError(str(e)) from None
        payload = result.to_dict()
        report = result.report
        matches = result.matches
    _write(dumps(with_schema(payload)), args.out)
    if args.csv and report is not None:
        _write(_csv(_residual_rows(report), ["n", "point_re", "point_im", "residual"]), args.csv)
    return EXIT_OK if matches else EXIT_MISMATCH


def cmd_coeffs(args, extra) -> int:
    family = PGF_ALIASES.get(args.pgf, args.pgf)
    if family not in FAMILIES or FAMILIES[family].kind is not Kind.PGF:
        raise UsageError(f"unknown p.g.f. {args.pgf!r}; known: {', '.join(sorted(PGF_ALIASES))}")
    params = parse_flag_params(extra)
    try:
        Q = make_transform(family, params)
    except ValueError as e:
        raise UsageError(str(e)) from None
    if args.order < 0:
        raise UsageError("--order must be >= 0")
    c = Q.series(args.order).coeffs
    _write(_csv(((k, float(v)) for k, v in enumerate(c)), ["k", "coefficient"]), args.out)
    return EXIT_OK


def cmd_solve(args, extra) -> int:
    params = parse_flag_params(extra)
    try:
        dist = make_distribution(args.dist, params)
    except (KeyError, ValueError) as e:
        raise UsageError(str(e.args[0])) from None
    kinds = list(dist.transforms)
    kind = Kind(args.kind) if args.kind else kinds[0]
    try:
        T = dist.transform(kind)
        g = solve_normalizer(T, Definition(args.definition), args.n)
    except (KeyError, ValueError) as e:
        raise UsageError(str(e.args[0])) from None
    x = np.asarray(parse_values(args.points), float) if args.points else standard_grid(T)
    v = g(x)
    rows = ((float(a), float(np.real(b))) for a, b in zip(x, v))
    _write(_csv(rows, ["x", "value"]), args.out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    try:
        case = catalog.get_case(args.case)
    except KeyError as e:
        raise UsageError(str(e.args[0])) from None
    try:
        claim = case.claim(parse_overrides(args.set))
    except ValueError as e:
        raise UsageError(str(e)) from None
    n = args.n if args.n is not None else (case.mc_index or claim.n_range[0])
    try:
        rep = simulate_and_test(claim, N=args.samples, seed=args.seed, n=n,
                                keep_samples=args.samples_csv is not None)
    except NoSampler as e:
        payload = {"case_id": case.id, "seed": args.seed, "supported": False, "reason": str(e)}
        _write(dumps(with_schema(payload)), args.out)
        return EXIT_MISMATCH
    if args.samples_csv:
        stem = Path(args.samples_csv)
        for run, tag in zip(rep.runs, ("reference", "system")):
            run.to_csv(stem.with_name(f"{stem.stem}_{tag}{stem.suffix or '.csv'}"))
    _write(dumps(with_schema({"supported": True, **rep.to_dict()})), args.out)
    return EXIT_OK if rep.passed else EXIT_MISMATCH


def cmd_scan(args) -> int:
    which = args.which.lower()
    grid = {}
    if args.grid:
        for part in args.grid.split(";"):
            if not part.strip():
                continue
            if "=" not in part:
                raise UsageError(f"grid part {part!r} is not name=values")
            k, v = part.split("=", 1)
            grid[k.strip()] = parse_values(v)
    if which == "ex05":
        case = catalog.get_case("EX05SWEEP")
        p = case.params()
        names = {"gamma": "gammas", "a": "a_values", "n": "n_values"}
        for k, v in grid.items():
            if k not in names:
                raise UsageError(f"scan ex05: unknown grid axis {k!r} (use gamma, a, n)")
            p[names[k]] = v
        scan = catalog.ex05_sweep(p["gammas"], p["a_values"], p["n_values"], args.order)
        rows = ([v["gamma"], v["a"], v["n"], v["first_violation"], v["min_coefficient"]]
                for v in scan["violations"])
        if args.csv:
            _write(_csv(rows, ["gamma", "a", "n", "first_violation", "min_coefficient"]), args.csv)
    elif which == "ex06":
        gammas = grid.get("gamma", [0.3, 0.5, 0.7])
        scan = {"thresholds": [catalog.ex06_threshold(float(g), order=args.order) for g in gammas]}
    elif which == "ex02":
        ns = grid.get("n", [2, 4])
        scan = {"limits": [catalog.ex02_limit(int(n)) for n in ns]}
    else:
        raise UsageError(f"unknown scan {args.which!r} (ex05, ex06, ex02)")
    _write(dumps(with_schema({"scan": which, "verdict": "SCAN", **scan})), args.out)
    return EXIT_OK


def cmd_report(args) -> int:
    if not args.all and not args.cases:
        raise UsageError("report needs --all or case ids")
    ids = catalog.list_cases() if args.all else args.cases
    results = []
    for cid in ids:
        try:
            results.append(catalog.run_case(cid, simulate=args.simulate, N=args.samples, seed=args.seed))
        except KeyError as e:
            raise UsageError(str(e.args[0])) from None
    payload = {
        "seed": args.seed,
        "simulate": bool(args.simulate),
        "summary": [{"case_id": r.case_id, "expected": r.expected.value,
                     "verdict": r.verdict.value, "matches": r.matches} for r in results],
        "cases": [r.to_dict() for r in results],
    }
    _write(dumps(with_schema(payload)), args.out)
    return EXIT_OK if all(r.matches for r in results) else EXIT_MISMATCH


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="casualstab", description=__doc__, allow_abbrev=False,
                                 formatter_class=argparse.RawDescriptionHelpFormatter, epilog=EPILOG)
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", allow_abbrev=False, help="check a catalog case or a JSON spec file")
    v.add_argument("target", help="case id (EX01..EX15, EX04G, EX09N) or spec file")
    v.add_argument("--set", action="append", metavar="KEY=VALUE", help="parameter override")
    v.add_argument("--tol", type=float)
    v.add_argument("--out", help="JSON report path (default stdout)")
    v.add_argument("--csv", help="residual table path")

    c = sub.add_parser("coeffs", allow_abbrev=False,
                       help="series coefficients of a p.g.f.; parameters as --name value")
    c.add_argument("pgf", help=f"family id or alias ({', '.join(sorted(PGF_ALIASES))})")
    c.add_argument("--order", type=int, default=64)
    c.add_argument("--out")

    s = sub.add_parser("solve", allow_abbrev=False,
                       help="equation-solved normalizer of a law; parameters as --name value")
    s.add_argument("dist", help="distribution family")
    s.add_argument("--definition", choices=["CS", "PURSUIT"], required=True)
    s.add_argument("--n", type=float, required=True)
    s.add_argument("--kind", choices=[k.value for k in Kind])
    s.add_argument("--points", help="evaluation points, '1,2,3' or 'start:stop:step'")
    s.add_argument("--out")

    m = sub.add_parser("simulate", allow_abbrev=False, help="two-sample KS check of a catalog case")
    m.add_argument("case")
    m.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--n", type=int)
    m.add_argument("--set", action="append", metavar="KEY=VALUE")
    m.add_argument("--samples-csv", help="write both samples next to this path")
    m.add_argument("--out")

    sc = sub.add_parser("scan", allow_abbrev=False, help="parameter scans: ex05 (coefficient signs), ex06, ex02")
    sc.add_argument("which")
    sc.add_argument("--grid", help="e.g. 'gamma=0.5,0.25;a=0.1:0.9:0.1;n=2:16'")
    sc.add_argument("--order", type=int, default=64)
    sc.add_argument("--csv")
    sc.add_argument("--out")

    r = sub.add_parser("report", allow_abbrev=False, help="run catalog cases and emit one JSON report")
    r.add_argument("cases", nargs="*")
    r.add_argument("--all", action="store_true")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--simulate", action="store_true")
    r.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    r.add_argument("--out")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args, extra = ap.parse_known_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else EXIT_USAGE
    try:
        if extra and args.command not in ("coeffs", "solve"):
            raise UsageError(f"unrecognized arguments: {' '.join(extra)}")
        if args.command == "verify":
            return cmd_verify(args)
        if args.command == "coeffs":
            return cmd_coeffs(args, extra)
        if args.command == "solve":
            return cmd_solve(args, extra)
        if args.command == "simulate":
            return cmd_simulate(args)
        if args.command == "scan":
            return cmd_scan(args)
        return cmd_report(args)
    except UsageError as e:
        print(f"casualstab: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

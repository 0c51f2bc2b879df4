"""Registry of worked cases: each binds a law, a normalizer family and a verdict."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Mapping

import numpy as np

from . import series as ts
from .montecarlo import DEFAULT_SAMPLES, NoSampler, SimulationReport, simulate_and_test
from .normalize import (
    Definition,
    Provenance,
    System,
    catalog_family,
    fixed_family,
)
from .transforms import Kind, eval_transform, make_distribution, make_transform
from .verify import (
    StabilityClaim,
    Verdict,
    VerificationReport,
    check_complete_monotone,
    check_infdiv_necessary,
    check_pgf_validity,
    check_stability,
    laplace_view,
    residual,
)


@dataclass(frozen=True, eq=False)
class CaseSpec:
    id: str
    title: str
    system: System
    definition: Definition
    distribution: str
    normalizer: str
    provenance: Provenance
    defaults: Mapping[str, Any]
    n_range: tuple
    expected: Verdict
    notes: tuple[str, ...] = ()
    build: Callable[[dict], StabilityClaim] | None = None
    mc_index: int | None = None

    def params(self, overrides: Mapping[str, Any] | None = None) -> dict:
        p = dict(self.defaults)
        p["n_range"] = tuple(self.n_range)
        for k, v in (overrides or {}).items():
            if k not in p and k != "tol":
                raise ValueError(f"{self.id}: unknown override {k!r} (known: {sorted(p)})")
            p[k] = v
        return p

    def claim(self, overrides: Mapping[str, Any] | None = None) -> StabilityClaim:
        if self.build is None:
            raise ValueError(f"{self.id} is a scan, not a single stability claim")
        p = self.params(overrides)
        c = self.build(p)
        c.case_id = self.id
        c.notes = list(self.notes)
        if "tol" in p:
            c.tol = float(p["tol"])
        return c


CASES: dict[str, CaseSpec] = {}


def _case(**kw):
    kw["system"] = System(kw["system"])
    kw["definition"] = Definition(kw["definition"])
    kw["expected"] = Verdict(kw.get("expected", "PASS"))
    kw["provenance"] = Provenance(kw.get("provenance", Provenance.PRINTED))
    kw["n_range"] = tuple(kw.get("n_range", range(1, 9)))
    kw["notes"] = tuple(kw.get("notes", ()))
    spec = CaseSpec(**kw)
    CASES[spec.id] = spec
    return spec


def _claim(p, dist, kind, normalizers, system, definition, **kw) -> StabilityClaim:
    return StabilityClaim(system=system, definition=definition, transform=dist.transform(kind),
                          distribution=dist, normalizers=normalizers, n_range=p["n_range"], **kw)


# --------------------------------------------------------------------------
# additive systems


def _ex01(p):
    alpha = p["alpha"]
    dist = make_distribution("positive_stable", alpha=alpha)
    g = fixed_family(lambda n: make_transform("degenerate_laplace", c=n ** (-1.0 / alpha)),
                     Kind.LAPLACE, "degenerate_laplace[c=n^(-1/alpha)]")
    return _claim(p, dist, Kind.LAPLACE, g, "ADDITIVE", "CS")


_case(id="EX01", title="positive stable law with a degenerate normalizer", system="ADDITIVE",
      definition="CS", distribution="positive_stable", normalizer="degenerate_laplace",
      defaults={"alpha": 0.5}, build=_ex01, mc_index=2,
      notes=["scale fixed to n^(-1/alpha), the only degenerate choice that works"])


def _ex02(p):
    dist = make_distribution("tempered_stable", alpha=p["alpha"], lam=p["lam"], h=p["h"])
    g = catalog_family("tempered_stable_normalizer", alpha=p["alpha"], h=p["h"])
    return _claim(p, dist, Kind.LAPLACE, g, "ADDITIVE", "CS")


_case(id="EX02", title="tempered stable law (inverse Gaussian at alpha = 1/2)", system="ADDITIVE",
      definition="CS", distribution="tempered_stable", normalizer="tempered_stable_normalizer",
      defaults={"alpha": 0.5, "lam": 1.0, "h": 1.0}, build=_ex02,
      notes=["normalizer tends to the point mass at n^(-1/alpha) as h -> 0"])


def _ex03(p):
    dist = make_distribution("laplace", a=p["a"])
    g = catalog_family("laplace_chf_normalizer", a=p["a"])
    return _claim(p, dist, Kind.CHF, g, "ADDITIVE", "CS")


_case(id="EX03", title="Laplace law, two-sided kernel substitution", system="ADDITIVE",
      definition="CS", distribution="laplace", normalizer="laplace_chf_normalizer",
      defaults={"a": 1.0}, build=_ex03,
      notes=["e^{it} -> g(t) in the positive half, e^{-it} -> g(-t) in the negative half"])


def _ex04(p):
    dist = make_distribution("gamma", b=p["b"], gamma=p["gamma"])
    g = catalog_family("gamma_normalizer", b=p["b"])
    return _claim(p, dist, Kind.LAPLACE, g, "ADDITIVE", "CS")


_case(id="EX04", title="gamma law", system="ADDITIVE", definition="CS", distribution="gamma",
      normalizer="gamma_normalizer", defaults={"b": 1.0, "gamma": 2.0}, build=_ex04)


def _ex04g(p):
    dist = make_distribution("geometric", p=p["p"])
    g = catalog_family("geometric_normalizer", p=p["p"])
    return _claim(p, dist, Kind.PGF, g, "ADDITIVE", "CS")


_case(id="EX04G", title="geometric law, discrete analogue of the exponential", system="ADDITIVE",
      definition="CS", distribution="geometric", normalizer="geometric_normalizer",
      defaults={"p": 0.5}, build=_ex04g, mc_index=2)


def _ex05(p):
    dist = make_distribution("tilted_discrete_stable", lam=p["lam"], a=p["a"], gamma=p["gamma"])
    g = catalog_family("tilted_stable_normalizer", a=p["a"], gamma=p["gamma"])
    return _claim(p, dist, Kind.PGF, g, "ADDITIVE", "CS")


_case(id="EX05", title="tilted discrete stable p.g.f.", system="ADDITIVE", definition="CS",
      distribution="tilted_discrete_stable", normalizer="tilted_stable_normalizer",
      defaults={"gamma": 0.5, "a": 0.75, "lam": 1.0}, build=_ex05, mc_index=2,
      notes=["the normalizer is a p.g.f. for gamma in {1/2, 1/3}; other gamma are open"])

_case(id="EX05SWEEP", title="coefficient sign sweep of the tilted discrete stable normalizer",
      system="ADDITIVE", definition="CS", distribution="tilted_discrete_stable",
      normalizer="tilted_stable_normalizer",
      defaults={"gammas": tuple(np.round(np.arange(1, 11) / 10, 10)),
                "a_values": tuple(np.round(np.arange(1, 10) / 10, 10)),
                "n_values": tuple(range(2, 17)), "order": ts.DEFAULT_ORDER},
      n_range=range(2, 17), expected="SCAN",
      notes=["reports every (gamma, a, n) with a negative coefficient; no claim is asserted"])


def _ex06(p):
    dist = make_distribution("sibuya", gamma=p["gamma"])
    g = catalog_family("sibuya_pursuit_normalizer", gamma=p["gamma"])
    return _claim(p, dist, Kind.PGF, g, "ADDITIVE", "PURSUIT")


_case(id="EX06", title="Sibuya law, pursuit stability", system="ADDITIVE", definition="PURSUIT",
      distribution="sibuya", normalizer="sibuya_pursuit_normalizer",
      defaults={"gamma": 0.5}, build=_ex06,
      notes=["normalizer is a p.g.f. only from some index on; n starts at the scanned threshold"])


def _ex07(p):
    dist = make_distribution("first_passage", M=p["M"])
    g = catalog_family("chebyshev_normalizer")
    return _claim(p, dist, Kind.PGF, g, "ADDITIVE", "PURSUIT")


_case(id="EX07", title="first passage law with Chebyshev normalizers", system="ADDITIVE",
      definition="PURSUIT", distribution="first_passage", normalizer="chebyshev_normalizer",
      defaults={"M": 1}, n_range=range(2, 7), build=_ex07,
      notes=["p(0) = 0, so the law cannot be infinitely divisible"])


# --------------------------------------------------------------------------
# product systems


def _power_family(c_of_n, label):
    return fixed_family(lambda n: make_transform("power_normalizer_mellin", c=c_of_n(n)),
                        Kind.MELLIN, label)


def _ex08(p):
    dist = make_distribution("lognormal", b=p["b"])
    g = _power_family(lambda n: n**-0.5, "power_normalizer_mellin[c=n^(-1/2)]")
    return _claim(p, dist, Kind.MELLIN, g, "PRODUCT", "CS")


_case(id="EX08", title="log-normal law, degenerate power normalizer", system="PRODUCT",
      definition="CS", distribution="lognormal", normalizer="power_normalizer_mellin",
      defaults={"b": 1.0}, build=_ex08, mc_index=2)


def _ex09(p):
    dist = make_distribution("double_pareto_printed", a=p["a"])
    g = catalog_family("double_pareto_printed_normalizer", a=p["a"])
    return _claim(p, dist, Kind.MELLIN, g, "PRODUCT", "CS", require_validity=False)


_case(id="EX09", title="double Pareto law, printed constants", system="PRODUCT", definition="CS",
      distribution="double_pareto_printed", normalizer="double_pareto_printed_normalizer",
      defaults={"a": 2.0}, build=_ex09,
      notes=["the identity M~ = M^(1/n) holds algebraically",
             "the transform has M(0) = (a^2 - 1)/a^2, so it is not a probability law",
             "normalizer validity is reported but not required"])


def _ex09n(p):
    dist = make_distribution("double_pareto", a=p["a"])
    g = catalog_family("double_pareto_normalizer", a=p["a"])
    return _claim(p, dist, Kind.MELLIN, g, "PRODUCT", "CS")


_case(id="EX09N", title="double Pareto law, normalized constants", system="PRODUCT",
      definition="CS", distribution="double_pareto", normalizer="double_pareto_normalizer",
      provenance="equation-solved", defaults={"a": 2.0}, build=_ex09n,
      notes=["constants rescaled so that M(0) = 1"])


def _ex10(p):
    dist = make_distribution("log_levy")
    g = _power_family(lambda n: float(n) ** -2, "power_normalizer_mellin[c=n^-2]")
    return _claim(p, dist, Kind.MELLIN, g, "PRODUCT", "CS")


_case(id="EX10", title="log-Levy law, degenerate power normalizer", system="PRODUCT",
      definition="CS", distribution="log_levy", normalizer="power_normalizer_mellin",
      defaults={}, build=_ex10,
      notes=["E[X^u] = exp(-sqrt(-2u)) on u <= 0"])


def _ex11(p):
    dist = make_distribution("pareto", alpha=p["alpha"])
    printed = catalog_family("pareto_printed_normalizer", alpha=p["alpha"], convention=p["convention"])
    solved = catalog_family("pareto_pursuit_normalizer", "equation-solved", alpha=p["alpha"])
    return _claim(p, dist, Kind.MELLIN, printed, "PRODUCT", "PURSUIT", alternative=solved)


_case(id="EX11", title="Pareto law, product pursuit stability", system="PRODUCT",
      definition="PURSUIT", distribution="pareto", normalizer="pareto_printed_normalizer",
      defaults={"alpha": 1.0, "convention": 1}, build=_ex11, expected="UNRESOLVED",
      notes=["the printed normalizer fails the pursuit equation under both sign conventions",
             "the equation-solved normalizer satisfies it but fails complete monotonicity"])


# --------------------------------------------------------------------------
# min systems and counting laws


def _ex12(p):
    dist = make_distribution("weibull", alpha=p["alpha"], beta=p["beta"])
    g = fixed_family(lambda n: make_transform("exp_survival", rate=float(n) ** (-1.0 / p["alpha"])),
                     Kind.SURVIVAL, "exp_survival[rate=n^(-1/alpha)]")
    return _claim(p, dist, Kind.SURVIVAL, g, "MIN", "CS")


_case(id="EX12", title="Weibull law, min system", system="MIN", definition="CS",
      distribution="weibull", normalizer="exp_survival",
      defaults={"alpha": 2.0, "beta": 1.0}, build=_ex12, mc_index=4)


def _ex13(p):
    dist = make_distribution("gompertz", xi=p["xi"], lam=p["lam"])
    g = catalog_family("gompertz_normalizer", lam=p["lam"])
    return _claim(p, dist, Kind.SURVIVAL, g, "MIN", "PURSUIT")


_case(id="EX13", title="Gompertz-Makeham law, min pursuit", system="MIN", definition="PURSUIT",
      distribution="gompertz", normalizer="gompertz_normalizer",
      defaults={"xi": 1.0, "lam": 1.0}, build=_ex13, mc_index=2)


def _ex14(p):
    dist = make_distribution("pareto", alpha=p["alpha"])
    g = catalog_family("pareto_min_normalizer")
    return _claim(p, dist, Kind.SURVIVAL, g, "MIN", "CS")


_case(id="EX14", title="Pareto law, min system", system="MIN", definition="CS",
      distribution="pareto", normalizer="pareto_min_normalizer",
      defaults={"alpha": 1.0}, build=_ex14, mc_index=2,
      notes=["replacing n by 1/n gives the pursuit normalizer"])


def _ex15(p):
    alpha, lam = p["alpha"], p["lam"]
    dist = make_distribution("weibull_rate", lam=lam, b=p["b"])
    g = fixed_family(lambda n: make_transform("exp_survival", rate=alpha ** (1.0 / n)),
                     Kind.SURVIVAL, "exp_survival[rate=alpha^(1/b)]")
    nu = fixed_family(lambda n: make_transform("sibuya_pgf", gamma=alpha), Kind.PGF, "sibuya_pgf")
    return _claim(p, dist, Kind.SURVIVAL, g, "MAX", "NU", nu_pgf=nu, require_validity=False,
                  indexed_transform=lambda n: make_transform("weibull_rate_survival", lam=lam, b=n))


_case(id="EX15", title="Weibull-type max law with a Sibuya number of elements", system="MAX",
      definition="NU", distribution="weibull_rate", normalizer="exp_survival",
      defaults={"alpha": 0.25, "lam": 1.0, "b": 2}, build=_ex15, mc_index=2,
      notes=["the index is the shape b of F(x) = 1 - exp(-lam x^b)",
             "matching forces a^b = alpha, so the rate is alpha^(1/b); "
             "an exponent written with the element count instead of b does not match"])


# --------------------------------------------------------------------------
# scans and auxiliary checks


def ex05_sweep(gammas, a_values, n_values, order: int = ts.DEFAULT_ORDER) -> dict:
    """Sign check of the normalizer coefficients over a parameter grid."""
    violations, checked = [], 0
    for gamma in gammas:
        for a in a_values:
            for n in n_values:
                Q = make_transform("tilted_stable_normalizer", a=float(a), gamma=float(gamma), n=n)
                d = check_pgf_validity(Q, order)
                checked += 1
                if not d["passed"]:
                    c = np.asarray(d["coefficients"])
                    violations.append({"gamma": float(gamma), "a": float(a), "n": int(n),
                                       "first_violation": d["first_violation"],
                                       "min_coefficient": float(c.min())})
    return {"checked": checked, "order": order, "violations": violations}


def ex06_threshold(gamma: float, n_max: int = 64, order: int = ts.DEFAULT_ORDER) -> dict:
    """Smallest n such that every index from n to n_max gives a p.g.f. to ``order``."""
    valid = []
    for n in range(1, n_max + 1):
        Q = make_transform("sibuya_pursuit_normalizer", gamma=gamma, n=n)
        valid.append(check_pgf_validity(Q, order)["passed"])
    threshold = None
    for n in range(n_max, 0, -1):
        if not valid[n - 1]:
            break
        threshold = n
    return {"gamma": gamma, "n_max": n_max, "order": order, "threshold": threshold,
            "invalid": [n for n, ok in enumerate(valid, 1) if not ok]}


CLASSICAL_S = np.logspace(-1, 1, 2001)


def ex02_limit_distance(h: float, n: int, alpha: float = 0.5) -> float:
    """sup over s in [0.1, 10] of |g_n(s) - exp(-s / n^(1/alpha))|."""
    s = CLASSICAL_S
    g = make_transform("tempered_stable_normalizer", alpha=alpha, h=h, n=n)
    classical = np.exp(-s / n ** (1.0 / alpha))
    return float(np.max(np.abs(eval_transform(g, s).real - classical)))


def ex02_limit(n: int, hs=(1.0, 0.1, 0.01), alpha: float = 0.5) -> dict:
    d = [ex02_limit_distance(h, n, alpha) for h in hs]
    return {"n": n, "h": list(hs), "distance": d,
            "monotone": bool(np.all(np.diff(d) < 0)), "ratio": d[-1] / d[0]}


def ex11_evidence(alpha: float = 1.0, n: int = 2, t: float = 1.0) -> dict:
    """Residual of each printed convention at u = i t, and the solved normalizer's screens."""
    M = make_transform("pareto_mellin", alpha=alpha)
    from .normalize import normalize

    u = np.array([1j * t])
    printed = {}
    for conv in (1, -1):
        N = make_transform("pareto_printed_normalizer", alpha=alpha, n=n, convention=conv)
        lhs = normalize(M, N)(u)
        printed[str(conv)] = float(residual(lhs, M(u) ** n)[0])
    solved = laplace_view(make_transform("pareto_pursuit_normalizer", alpha=alpha, n=n))
    screens = {str(k): check_complete_monotone(solved, order=k)["passed"] for k in (2, 3, 4)}
    return {"t": t, "n": n, "printed_residual": printed, "solved_cm_passes": screens}


# --------------------------------------------------------------------------
# running


@dataclass(eq=False)
class CaseResult:
    case_id: str
    expected: Verdict
    verdict: Verdict
    report: VerificationReport | None = None
    scan: dict | None = None
    simulation: SimulationReport | None = None
    simulation_error: str | None = None
    extras: dict = field(default_factory=dict)

    @property
    def matches(self) -> bool:
        return self.verdict is self.expected

    def to_dict(self) -> dict:
        out = {"case_id": self.case_id, "expected": self.expected.value,
               "verdict": self.verdict.value, "matches": self.matches}
        if self.report is not None:
            out["report"] = self.report.to_dict()
        if self.scan is not None:
            out["scan"] = self.scan
        if self.extras:
            out["extras"] = self.extras
        if self.simulation is not None:
            out["simulation"] = self.simulation.to_dict()
        if self.simulation_error is not None:
            out["simulation_error"] = self.simulation_error
        return out


def list_cases() -> list[str]:
    return list(CASES)


def get_case(case_id: str) -> CaseSpec:
    key = case_id.upper()
    if key not in CASES:
        raise KeyError(f"unknown case {case_id!r}; known: {', '.join(CASES)}")
    return CASES[key]


def run_case(case_id: str, overrides: Mapping[str, Any] | None = None, simulate: bool = False,
             N: int = DEFAULT_SAMPLES, seed: int = 0) -> CaseResult:
    case = get_case(case_id)
    overrides = dict(overrides or {})

    if case.id == "EX05SWEEP":
        p = case.params(overrides)
        scan = ex05_sweep(p["gammas"], p["a_values"], p["n_values"], int(p["order"]))
        return CaseResult(case.id, case.expected, Verdict.SCAN, scan=scan)

    extras: dict[str, Any] = {}
    if case.id == "EX06" and "n_range" not in overrides:
        gamma = overrides.get("gamma", case.defaults["gamma"])
        thr = ex06_threshold(gamma)
        extras["threshold_scan"] = thr
        if thr["threshold"] is not None:
            overrides["n_range"] = tuple(range(thr["threshold"], thr["threshold"] + 8))
    if case.id == "EX15" and "b" in overrides and "n_range" not in overrides:
        overrides["n_range"] = (overrides["b"],)

    claim = case.claim(overrides)
    report = check_stability(claim)

    if case.id == "EX07":
        extras["infdiv_necessary"] = check_infdiv_necessary(claim.transform)
    if case.id == "EX05":
        extras["infdiv_necessary"] = check_infdiv_necessary(claim.transform)
    if case.id == "EX11":
        extras["evidence"] = ex11_evidence(case.params(overrides)["alpha"])

    result = CaseResult(case.id, case.expected, report.verdict, report=report, extras=extras)
    if simulate:
        n = case.mc_index if case.mc_index is not None else claim.n_range[0]
        try:
            result.simulation = simulate_and_test(claim, N=N, seed=seed, n=n)
        except (NoSampler, NotImplementedError) as e:
            result.simulation_error = str(e)
    return result


def run_all(simulate: bool = False, N: int = DEFAULT_SAMPLES, seed: int = 0) -> list[CaseResult]:
    return [run_case(cid, simulate=simulate, N=N, seed=seed) for cid in CASES]

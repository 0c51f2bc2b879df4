"""Residual checks of the stability definitions and validity screens."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from . import series as ts
from .normalize import (
    Definition,
    NormalizerFamily,
    System,
    _real,
    fixed_family,
    normalize,
    normalize_min,
)
from .transforms import _DEFAULT_DOMAINS, DistributionSpec, Kind, Transform, eval_transform

CLOSED_FORM_TOL = 1e-9
SOLVED_TOL = 1e-6


class Verdict(str, enum.Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    INVALID_NORMALIZER = "INVALID_NORMALIZER"
    UNRESOLVED = "UNRESOLVED"
    SCAN = "SCAN"


# --------------------------------------------------------------------------
# grids


def standard_grid(T: Transform, density: int = 1) -> np.ndarray:
    """Default evaluation points for a transform; ``density`` multiplies the count."""
    kind = T.kind
    if kind is Kind.CHF:
        side = np.logspace(-1, 1, 25 * density)
        return np.concatenate([-side[::-1], [0.0], side])
    if kind is Kind.LAPLACE:
        return np.logspace(-2, 1.3, 30 * density)
    if kind is Kind.PGF:
        m = 19 * density
        return np.round(np.linspace(0.05, 0.95, m), 12)
    if kind is Kind.SURVIVAL:
        lo = T.support_lo
        if lo is not None and lo > 0:
            return lo * np.logspace(0, 2, 30 * density)
        return np.logspace(-2, 1.3, 30 * density)
    lo = max(T.domain.lo, -5.0)
    hi = min(T.domain.hi, 5.0)
    width = hi - lo
    return np.linspace(lo + 0.1 * width, hi - 0.1 * width, 20 * density + 1)


def imaginary_grid(density: int = 1) -> np.ndarray:
    """u = i t with t on the standard CHF grid (Mellin read as a log-scale ch.f.)."""
    side = np.logspace(-1, 1, 25 * density)
    return 1j * np.concatenate([-side[::-1], [0.0], side])


# --------------------------------------------------------------------------
# diagnostics


def _diag(name: str, passed: bool, **info) -> dict:
    out = {"check": name, "passed": bool(passed)}
    out.update(info)
    return out


def check_complete_monotone(L: Transform, grid=None, order: int = 4, h: float = 0.1,
                            tol: float = 1e-12) -> dict:
    """Alternating-sign screen (-1)^k Delta_h^k L >= -tol for k <= order.

    A necessary condition for L to be a Laplace transform, not a proof.
    """
    if order > 8:
        raise ValueError("finite differences degrade beyond order 8")
    if grid is None:
        grid = np.concatenate([[0.0], np.logspace(-2, 1.3, 30)])
    s = np.asarray(grid, dtype=float)
    offsets = s[:, None] + h * np.arange(order + 1)[None, :]
    with np.errstate(all="ignore"):
        vals = _real(eval_transform(L, offsets), L.family)
    if not np.all(np.isfinite(vals)):
        return _diag("complete_monotone", False, status="FAIL", order=order, failing_order=None,
                     worst=None, spacing=h, reason="non-finite values on the grid")
    scale = max(1.0, float(np.max(np.abs(vals))))
    failing, worst = None, 0.0
    for k in range(order + 1):
        d = np.diff(vals, n=k, axis=1)[:, 0] * (-1) ** k
        m = float(d.min())
        if m < -tol * scale:
            failing, worst = k, m
            break
    status = "NECESSARY-PASS" if failing is None else "FAIL"
    return _diag("complete_monotone", failing is None, status=status, order=order,
                 failing_order=failing, worst=worst, spacing=h)


def check_positive_definite(g: Transform, t_points: Sequence[float]) -> dict:
    """Smallest eigenvalue of the Hermitian matrix [g(t_i - t_j)]."""
    t = np.asarray(t_points, dtype=float)
    if not 2 <= t.size <= 64:
        raise ValueError("need between 2 and 64 points")
    A = eval_transform(g, t[:, None] - t[None, :])
    asym = float(np.max(np.abs(A - A.conj().T)))
    if asym > 1e-10:
        return _diag("positive_definite", False, status="FAIL", min_eigenvalue=None,
                     hermitian_defect=asym)
    lam = float(np.linalg.eigvalsh(0.5 * (A + A.conj().T)).min())
    ok = lam >= -1e-8
    return _diag("positive_definite", ok, status="NECESSARY-PASS" if ok else "FAIL",
                 min_eigenvalue=lam)


def check_infdiv_necessary(T: Transform, grid=None) -> dict:
    """Necessary conditions for infinite divisibility.

    CHF: no zeros on the grid.  PGF: p0 = P(0) > 0.
    """
    if T.kind is Kind.PGF:
        p0 = float(_real(eval_transform(T, np.array([0.0])), T.family)[0])
        return _diag("infdiv_necessary", p0 > 0, p0=p0)
    if T.kind is Kind.CHF:
        grid = standard_grid(T) if grid is None else np.asarray(grid, dtype=float)
        m = float(np.min(np.abs(eval_transform(T, grid))))
        return _diag("infdiv_necessary", m > 0, min_abs=m)
    raise ValueError("infinite-divisibility screen needs a CHF or PGF")


def check_pgf_validity(Q: Transform, K: int = ts.DEFAULT_ORDER) -> dict:
    """Nonnegative series coefficients to order K and Q(1) = 1."""
    if Q.series is None:
        raise ValueError(f"{Q.family} has no series expansion")
    s = Q.series(K)
    bad = ts.negative_coefficients(s)
    q1 = float(_real(eval_transform(Q, np.array([1.0])), Q.family)[0])
    ok = bad.size == 0 and abs(q1 - 1.0) <= 1e-9
    return _diag("pgf_validity", ok, status="VALID" if ok else "INVALID", order=K,
                 first_violation=int(bad[0]) if bad.size else None,
                 value_at_one=q1, coefficients=s.coeffs.tolist())


def check_survival_validity(G: Transform, grid=None) -> dict:
    grid = np.concatenate([[0.0], standard_grid(G)]) if grid is None else np.asarray(grid, float)
    v = _real(eval_transform(G, np.sort(grid)), G.family)
    mono = bool(np.all(np.diff(v) <= 1e-15))
    rng = bool(np.all((v >= 0) & (v <= 1 + 1e-15)))
    return _diag("survival_validity", mono and rng, nonincreasing=mono, in_unit_interval=rng,
                 value_at_start=float(v[0]))


def _unit_value(g: Transform, at) -> dict:
    v = complex(eval_transform(g, np.array([at]))[0])
    return _diag("unit_value", abs(v - 1.0) <= 1e-9, value=[v.real, v.imag])


def laplace_view(N: Transform) -> Transform:
    """s -> N(-s): a one-sided log-normalizer read as a Laplace transform."""
    return Transform(kind=Kind.LAPLACE, family=f"{N.family}@(-s)", params=N.params,
                     fn=lambda s: eval_transform(N, -np.asarray(s, dtype=float)),
                     domain=_DEFAULT_DOMAINS[Kind.LAPLACE])


def chf_view(N: Transform) -> Transform:
    """t -> N(i t): a log-normalizer read as a characteristic function."""
    return Transform(kind=Kind.CHF, family=f"{N.family}@(it)", params=N.params,
                     fn=lambda t: eval_transform(N, 1j * np.asarray(t, dtype=float)),
                     domain=_DEFAULT_DOMAINS[Kind.CHF])


PD_POINTS = 0.25 * np.arange(-16, 17)


def normalizer_validity(g: Transform, T: Transform | None = None) -> dict:
    """Bundle of screens deciding whether ``g`` can be a genuine normalizer."""
    kind = g.kind
    if kind is Kind.LAPLACE:
        checks = [_unit_value(g, 0.0), check_complete_monotone(g)]
    elif kind is Kind.CHF:
        checks = [_unit_value(g, 0.0), check_positive_definite(g, PD_POINTS)]
    elif kind is Kind.PGF:
        checks = [check_pgf_validity(g)]
    elif kind is Kind.SURVIVAL:
        checks = [check_survival_validity(g)]
    else:
        one_sided = T is not None and T.parts is not None and T.parts[0] is None
        if one_sided:
            L = laplace_view(g)
            checks = [_unit_value(L, 0.0), check_complete_monotone(L)]
        else:
            f = chf_view(g)
            checks = [_unit_value(f, 0.0), check_positive_definite(f, PD_POINTS)]
    return {"passed": all(c["passed"] for c in checks), "checks": checks}


# --------------------------------------------------------------------------
# claims and reports


@dataclass(eq=False)
class StabilityClaim:
    system: System
    definition: Definition
    transform: Transform
    normalizers: NormalizerFamily
    n_range: Sequence[float]
    grid: np.ndarray | None = None
    tol: float = CLOSED_FORM_TOL
    distribution: DistributionSpec | None = None
    require_validity: bool = True
    alternative: NormalizerFamily | None = None
    alternative_tol: float = CLOSED_FORM_TOL
    nu_pgf: NormalizerFamily | None = None
    indexed_transform: Callable[[float], Transform] | None = None
    case_id: str = ""
    notes: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.system = System(self.system)
        self.definition = Definition(self.definition)
        if not self.tol > 0:
            raise ValueError("tolerance must be positive")
        if len(self.n_range) == 0:
            raise ValueError("n_range is empty")
        if self.grid is None:
            self.grid = standard_grid(self.transform)
        self.grid = np.asarray(self.grid)
        if self.grid.size == 0:
            raise ValueError("grid is empty")
        if self.definition is Definition.NU and self.nu_pgf is None:
            raise ValueError("a counting-law claim needs nu_pgf")

    def transform_for(self, n) -> Transform:
        return self.indexed_transform(n) if self.indexed_transform else self.transform

    def echo(self) -> dict:
        return {
            "case_id": self.case_id,
            "system": self.system.value,
            "definition": self.definition.value,
            "distribution": self.distribution.label() if self.distribution else self.transform.label(),
            "transform": self.transform.label(),
            "kind": self.transform.kind.value,
            "normalizer": self.normalizers.name,
            "provenance": self.normalizers.provenance.value,
            "n_range": [_num(n) for n in self.n_range],
            "tol": self.tol,
            "require_validity": self.require_validity,
        }


def _num(n):
    return int(n) if float(n).is_integer() else float(n)


@dataclass(eq=False)
class VerificationReport:
    claim: dict
    grid: np.ndarray
    residuals: dict
    worst_by_n: dict
    worst_residual: float
    validity: dict
    verdict: Verdict
    tol: float
    errors: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.verdict is Verdict.PASS

    def to_dict(self) -> dict:
        return {
            "claim": self.claim,
            "verdict": self.verdict.value,
            "worst_residual": self.worst_residual,
            "tol": self.tol,
            "worst_by_n": self.worst_by_n,
            "grid": _grid_out(self.grid),
            "residuals": self.residuals,
            "validity": self.validity,
            "errors": self.errors,
            "diagnostics": self.diagnostics,
            "notes": list(self.notes),
        }


def _grid_out(grid):
    g = np.asarray(grid)
    if np.iscomplexobj(g):
        return [[float(z.real), float(z.imag)] for z in g]
    return [float(x) for x in g]


def residual(lhs, rhs) -> np.ndarray:
    """|LHS - RHS|, relative where |RHS| > 1."""
    lhs, rhs = np.asarray(lhs, complex), np.asarray(rhs, complex)
    d = np.abs(lhs - rhs)
    big = np.abs(rhs) > 1
    d[big] = d[big] / np.abs(rhs[big])
    return d


def _pointwise(fn: Callable, grid: np.ndarray):
    """Evaluate fn on the grid; failures become NaN with a recorded message."""
    try:
        return np.asarray(fn(grid), dtype=complex), []
    except Exception:
        vals, errs = [], []
        for i, x in enumerate(grid):
            try:
                vals.append(complex(np.asarray(fn(np.asarray([x])))[0]))
            except Exception as e:  # recorded per point, never fatal
                vals.append(complex(np.nan, np.nan))
                errs.append({"index": i, "error": f"{type(e).__name__}: {e}"})
        return np.array(vals), errs


def _sides(claim: StabilityClaim, n, T: Transform, g: Transform, grid):
    """LHS and RHS of the claim's equation at index n, plus cross-check residuals."""
    extra = None
    if claim.definition is Definition.NU:
        nu = claim.nu_pgf(n)
        return _nu_sides(T, g, nu, claim.system, grid) + (None,)
    Tn = normalize(T, g)
    tilde, errs1 = _pointwise(Tn, grid)
    base, errs2 = _pointwise(T, grid)
    with np.errstate(all="ignore"):
        if claim.definition is Definition.PURSUIT:
            lhs, rhs = tilde, base**n
        elif claim.system is System.PRODUCT:
            lhs, rhs = tilde, base ** (1.0 / n)
            extra = residual(tilde**n, base)
        else:
            lhs, rhs = tilde**n, base
    return lhs, rhs, errs1 + errs2, extra


def _nu_sides(F: Transform, G: Transform, nu: Transform, system: System, grid):
    if system not in (System.MAX, System.MIN):
        raise ValueError("counting-law claims are implemented for MAX and MIN systems")
    Ft = normalize_min(F, G)
    surv_t, e1 = _pointwise(Ft, grid)
    surv, e2 = _pointwise(F, grid)
    with np.errstate(all="ignore"):
        lhs = surv_t
        y = np.clip(surv.real, 0.0, 1.0)
        if system is System.MIN:
            rhs, e3 = _pointwise(nu, y)
        elif nu.complement is not None:
            # survival scale: 1 - P(F) = complement(Fbar), free of cancellation near F = 1
            rhs, e3 = _pointwise(nu.complement, y)
        else:
            q, e3 = _pointwise(nu, 1.0 - y)
            rhs = 1.0 - q
    return lhs, rhs, e1 + e2 + e3


def _worst(r: np.ndarray) -> float:
    if r.size == 0:
        return 0.0
    if np.any(~np.isfinite(r)):
        return float("inf")
    return float(r.max())


def check_stability(claim: StabilityClaim) -> VerificationReport:
    """Residuals of the claim's defining equation for every n in its range."""
    residuals, worst_by_n, validity, errors = {}, {}, {}, {}
    cross = {}
    grid = claim.grid
    for n in claim.n_range:
        key = str(_num(n))
        T = claim.transform_for(n)
        g = claim.normalizers(n)
        try:
            lhs, rhs, errs, extra = _sides(claim, n, T, g, grid)
            r = residual(lhs, rhs)
        except Exception as e:
            r = np.full(grid.shape, np.nan)
            errs, extra = [{"index": None, "error": f"{type(e).__name__}: {e}"}], None
        residuals[key] = [float(x) for x in r]
        worst_by_n[key] = _worst(r)
        if errs:
            errors[key] = errs
        if extra is not None:
            cross[key] = _worst(extra)
        if claim.require_validity:
            try:
                validity[key] = normalizer_validity(g, T)
            except Exception as e:
                validity[key] = {"passed": False, "checks": [], "error": f"{type(e).__name__}: {e}"}

    worst = max(worst_by_n.values())
    valid = all(v["passed"] for v in validity.values())
    diagnostics: dict[str, Any] = {}
    if cross:
        diagnostics["nth_power_cross_check"] = {
            "form": "M~^n = M", "worst_by_n": cross, "worst": max(cross.values())}
    if not claim.transform.stochastic:
        diagnostics["stochastic"] = False
        diagnostics["stochastic_note"] = "; ".join(claim.transform.notes)

    if worst <= claim.tol:
        verdict = Verdict.PASS if valid else Verdict.INVALID_NORMALIZER
    else:
        verdict = Verdict.FAIL
        if claim.alternative is not None:
            alt = StabilityClaim(
                system=claim.system, definition=claim.definition, transform=claim.transform,
                normalizers=claim.alternative, n_range=claim.n_range, grid=claim.grid,
                tol=claim.alternative_tol, distribution=claim.distribution,
                require_validity=True, indexed_transform=claim.indexed_transform,
                nu_pgf=claim.nu_pgf, case_id=claim.case_id,
            )
            alt_report = check_stability(alt)
            diagnostics["alternative"] = {
                "normalizer": claim.alternative.name,
                "provenance": claim.alternative.provenance.value,
                "worst_residual": alt_report.worst_residual,
                "verdict": alt_report.verdict.value,
                "validity": alt_report.validity,
            }
            if alt_report.verdict is Verdict.INVALID_NORMALIZER:
                verdict = Verdict.UNRESOLVED

    return VerificationReport(
        claim=claim.echo(), grid=grid, residuals=residuals, worst_by_n=worst_by_n,
        worst_residual=worst, validity=validity, verdict=verdict, tol=claim.tol,
        errors=errors, diagnostics=diagnostics, notes=list(claim.notes),
    )


def check_nu_stability(F: Transform, Gbar: Transform, nu_pgf: Transform, mode: str = "MAX",
                       grid=None, tol: float = CLOSED_FORM_TOL) -> VerificationReport:
    """Counting-law variant: F(-log Gbar(x)) against P_nu(F(x)) (MAX mode)."""
    claim = StabilityClaim(
        system=System(mode), definition=Definition.NU, transform=F,
        normalizers=fixed_family(lambda n: Gbar, Kind.SURVIVAL, Gbar.family),
        n_range=[1], grid=grid, tol=tol, require_validity=False,
        nu_pgf=fixed_family(lambda n: nu_pgf, Kind.PGF, nu_pgf.family),
    )
    return check_stability(claim)

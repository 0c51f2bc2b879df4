"""Exact samplers and distributional cross-checks of normalized systems.

Only constructions with an explicit probabilistic representation are
simulated: compound sums for p.g.f. normalization, quantile maps for
min/max systems, and power maps for degenerate product normalizers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import special

from .normalize import Definition, System, invert
from .transforms import DistributionSpec, Kind, Transform, empirical_transform

KS_COEF_1PCT = 1.628
DEFAULT_SAMPLES = 200_000


class NoSampler(ValueError):
    """No exact sampler is registered for the requested law or construction."""


def make_rng(seed: int, *key: int) -> np.random.Generator:
    """Independent PCG64 stream derived from (seed, key)."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


# --------------------------------------------------------------------------
# base samplers


def _positive_stable(rng, alpha, size):
    # Kanter's representation, Laplace transform exp(-s^alpha)
    if alpha == 1.0:
        return np.ones(size)
    U = rng.uniform(0.0, np.pi, size)
    E = rng.standard_exponential(size)
    a = np.sin(alpha * U) / np.sin(U) ** (1.0 / alpha)
    b = (np.sin((1.0 - alpha) * U) / E) ** ((1.0 - alpha) / alpha)
    return a * b


def _tempered_stable(rng, alpha, lam, h, size):
    # exponential tilting by rejection: keep X with probability exp(-h X)
    from .transforms import tempered_scale

    k = tempered_scale(alpha, lam)
    scale = k ** (1.0 / alpha)
    out = np.empty(size)
    filled = 0
    accept = math.exp(-k * h**alpha) if h > 0 else 1.0
    if accept < 1e-6:
        raise NoSampler("tempering too strong for rejection sampling")
    while filled < size:
        m = int((size - filled) / accept * 1.1) + 16
        x = scale * _positive_stable(rng, alpha, m)
        keep = x[rng.uniform(size=m) < np.exp(-h * x)]
        take = min(keep.size, size - filled)
        out[filled : filled + take] = keep[:take]
        filled += take
    return out


def _sibuya_log_survival(gamma, k):
    # log P(Y > k) = log Gamma(k + 1 - gamma) - log Gamma(1 - gamma) - log Gamma(k + 1)
    return special.gammaln(k + 1.0 - gamma) - special.gammaln(1.0 - gamma) - special.gammaln(k + 1.0)


def _sibuya(rng, gamma, size):
    """Inverse survival function: smallest k >= 1 with P(Y > k) < U."""
    if gamma == 1.0:
        return np.ones(size)
    logu = np.log(rng.uniform(size=size))
    lo = np.zeros(size)  # P(Y > lo) >= U
    hi = np.ones(size)
    for _ in range(200):
        short = _sibuya_log_survival(gamma, hi) >= logu
        if not np.any(short):
            break
        lo = np.where(short, hi, lo)
        hi = np.where(short, hi * 2.0, hi)
    while np.any(hi - lo > 1):
        mid = np.floor(0.5 * (lo + hi))
        above = _sibuya_log_survival(gamma, mid) >= logu
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    return hi


def _tilted_stable_discrete(rng, lam, a, gamma, size):
    # Poisson(lam (1 - (1-a)^gamma)) sum of Sibuya variables tilted by a^Y
    rate = lam * (1.0 - (1.0 - a) ** gamma)
    counts = rng.poisson(rate, size)
    total = int(counts.sum())
    jumps = np.empty(total)
    filled = 0
    while filled < total:
        m = max(16, int((total - filled) * 1.2 / max(1.0 - (1.0 - a) ** gamma, 1e-3)))
        y = _sibuya(rng, gamma, m)
        if a < 1.0:
            y = y[rng.uniform(size=m) < np.power(a, y)]
        take = min(y.size, total - filled)
        jumps[filled : filled + take] = y[:take]
        filled += take
    return _group_sums(counts, jumps)


def _group_sums(counts: np.ndarray, values: np.ndarray) -> np.ndarray:
    idx = np.repeat(np.arange(counts.size), counts)
    return np.bincount(idx, weights=values, minlength=counts.size)


def _first_passage(rng, M, size):
    # hitting time of level 1 by a symmetric walk is 2 Y - 1 with Y ~ Sibuya(1/2)
    y = _sibuya(rng, 0.5, size * int(M)).reshape(size, int(M))
    return (2.0 * y - 1.0).sum(axis=1)


def _log_levy(rng, size):
    with np.errstate(over="ignore", divide="ignore"):
        return np.exp(1.0 / rng.standard_normal(size) ** 2)


_SAMPLERS: dict[str, Callable] = {
    "positive_stable": lambda rng, p, N: _positive_stable(rng, p["alpha"], N),
    "tempered_stable": lambda rng, p, N: _tempered_stable(rng, p["alpha"], p["lam"], p["h"], N),
    "gamma": lambda rng, p, N: rng.gamma(p["gamma"], p["b"], N),
    "laplace": lambda rng, p, N: rng.laplace(0.0, p["a"], N),
    "geometric": lambda rng, p, N: (rng.geometric(1.0 - p["p"], N) - 1).astype(float),
    "tilted_discrete_stable": lambda rng, p, N: _tilted_stable_discrete(rng, p["lam"], p["a"], p["gamma"], N),
    "sibuya": lambda rng, p, N: _sibuya(rng, p["gamma"], N),
    "first_passage": lambda rng, p, N: _first_passage(rng, p["M"], N),
    "lognormal": lambda rng, p, N: np.exp(p["b"] * rng.standard_normal(N)),
    "double_pareto": lambda rng, p, N: np.exp(rng.laplace(0.0, 1.0 / p["a"], N)),
    "log_levy": lambda rng, p, N: _log_levy(rng, N),
    "pareto": lambda rng, p, N: 1.0 + rng.pareto(p["alpha"], N),
    "weibull": lambda rng, p, N: p["beta"] * rng.weibull(p["alpha"], N),
    "weibull_rate": lambda rng, p, N: (rng.standard_exponential(N) / p["lam"]) ** (1.0 / p["b"]),
    "gompertz": lambda rng, p, N: np.log1p(rng.standard_exponential(N) / p["xi"]) / p["lam"],
}


def sample_distribution(dist: DistributionSpec, N: int, seed: int = 0, rng=None) -> np.ndarray:
    """N independent draws from a catalog law."""
    if N < 0:
        raise ValueError("N must be nonnegative")
    if not dist.has_sampler or dist.family not in _SAMPLERS:
        raise NoSampler(f"no sampler registered for {dist.family}")
    rng = make_rng(seed) if rng is None else rng
    return np.asarray(_SAMPLERS[dist.family](rng, dist.params, N), dtype=float)


# --------------------------------------------------------------------------
# discrete normalizers as count laws

_PGF_FAMILY_SAMPLERS = {
    "geometric_pgf": lambda rng, p, N: (rng.geometric(1.0 - p["p"], N) - 1).astype(float),
    "sibuya_pgf": lambda rng, p, N: _sibuya(rng, p["gamma"], N),
    "chebyshev_pgf": lambda rng, p, N: _first_passage(rng, p["M"], N),
    "identity_pgf": lambda rng, p, N: np.ones(N),
    "tilted_stable_pgf": lambda rng, p, N: _tilted_stable_discrete(rng, p["lam"], p["a"], p["gamma"], N),
}

MAX_TABLE_ORDER = 4096
MAX_COMPOUND_JUMPS = 50_000_000
TABLE_MASS_TOL = 1e-12


def pmf_table(Q: Transform) -> np.ndarray:
    """Probabilities of a p.g.f. from its series, grown until the lost mass is negligible."""
    if Q.series is None:
        raise NoSampler(f"{Q.family} has no series expansion")
    K = 64
    while K <= MAX_TABLE_ORDER:
        c = Q.series(K).coeffs
        if np.any(c < -1e-12 * max(1.0, float(np.abs(c).max()))):
            raise NoSampler(f"{Q.family} has negative coefficients: not a p.g.f.")
        if 1.0 - c.sum() <= TABLE_MASS_TOL:
            return np.clip(c, 0.0, None)
        K *= 2
    raise NoSampler(f"{Q.family}: tail mass beyond order {MAX_TABLE_ORDER} is not negligible")


def pgf_sampler(Q: Transform) -> Callable[[np.random.Generator, int], np.ndarray]:
    if Q.family in _PGF_FAMILY_SAMPLERS:
        fam = _PGF_FAMILY_SAMPLERS[Q.family]
        return lambda rng, N: fam(rng, Q.params, N)
    p = pmf_table(Q)
    cdf = np.cumsum(p)
    cdf /= cdf[-1]
    return lambda rng, N: np.searchsorted(cdf, rng.uniform(size=N), side="right").astype(float)


def compound_sum(counts: np.ndarray, jump_sampler, rng) -> np.ndarray:
    """X~ = sum_{i <= X} Y_i, one sum per entry of ``counts``."""
    counts = np.asarray(counts)
    if np.any(counts != np.floor(counts)) or np.any(counts < 0):
        raise ValueError("compound sums need nonnegative integer counts")
    counts = counts.astype(np.int64)
    total = int(counts.sum())
    if total > MAX_COMPOUND_JUMPS:
        raise NoSampler(f"compound sum needs {total} jumps; the count law is too heavy-tailed")
    jumps = jump_sampler(rng, total)
    return _group_sums(counts, jumps)


def survival_quantile(Gbar: Transform, v: np.ndarray) -> np.ndarray:
    """Gbar^{-1}(v): closed form when registered, else bracketed bisection."""
    if Gbar.inverse is not None:
        with np.errstate(all="ignore"):
            return np.asarray(Gbar.inverse(v), dtype=float)
    return invert(Gbar, v, closed=False)


def sample_normalized(dist: DistributionSpec, normalizer: Transform, system: System,
                      N: int, seed: int = 0, rng=None, base=None) -> np.ndarray:
    """Draws of the g-normalized variable of ``dist``.

    ``base`` optionally supplies the draws of X to transform.
    """
    system = System(system)
    rng = make_rng(seed) if rng is None else rng
    X = sample_distribution(dist, N, rng=rng) if base is None else np.asarray(base, dtype=float)
    kind = normalizer.kind
    if kind is Kind.PGF:
        return compound_sum(X, pgf_sampler(normalizer), rng)
    if kind is Kind.SURVIVAL and system in (System.MIN, System.MAX):
        with np.errstate(under="ignore"):
            return survival_quantile(normalizer, np.exp(-X))
    if kind is Kind.MELLIN and normalizer.family == "power_normalizer_mellin":
        return np.power(X, normalizer.params["c"])
    if kind is Kind.LAPLACE and normalizer.family == "degenerate_laplace":
        return normalizer.params["c"] * X
    raise NoSampler(f"no probabilistic representation for {normalizer.family} ({system.value} system)")


# --------------------------------------------------------------------------
# two-sample tests


def ks_two_sample(x, y) -> tuple[float, float, float]:
    """(D, D+, D-) with D+ = sup(F_x - F_y); exact for ties."""
    x, y = np.sort(np.asarray(x, float)), np.sort(np.asarray(y, float))
    pts = np.concatenate([x, y])
    Fx = np.searchsorted(x, pts, side="right") / x.size
    Fy = np.searchsorted(y, pts, side="right") / y.size
    d = Fx - Fy
    dp, dm = float(max(d.max(), 0.0)), float(max(-d.min(), 0.0))
    return max(dp, dm), dp, dm


def ks_critical(N: int, M: int | None = None) -> float:
    M = N if M is None else M
    return KS_COEF_1PCT * math.sqrt((N + M) / (N * M))


@dataclass(eq=False)
class SampleRun:
    distribution: str
    normalizer: str
    system: str
    index: str
    N: int
    seed: int
    samples: np.ndarray

    def to_csv(self, path):
        header = (f"# seed={self.seed} distribution={self.distribution} normalizer={self.normalizer} "
                  f"system={self.system} index={self.index} N={self.N}")
        np.savetxt(path, self.samples, header=header[2:], comments="# ", fmt="%.17g")


@dataclass(eq=False)
class SimulationReport:
    case_id: str
    n: float
    N: int
    seed: int
    ks: float
    ks_plus: float
    ks_minus: float
    critical: float
    transform_kind: str
    points: np.ndarray
    max_deviation: float
    max_z: float
    runs: list[SampleRun] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.ks < self.critical

    def to_dict(self) -> dict:
        return {
            "case_id": self.case_id, "n": self.n, "N": self.N, "seed": self.seed,
            "ks": self.ks, "ks_plus": self.ks_plus, "ks_minus": self.ks_minus,
            "critical": self.critical, "passed": self.passed,
            "empirical_transform": {
                "kind": self.transform_kind, "points": [float(p) for p in self.points],
                "max_deviation": self.max_deviation, "max_z": self.max_z,
            },
        }


def _combine(system: System, parts: np.ndarray) -> np.ndarray:
    if system is System.ADDITIVE:
        return parts.sum(axis=0)
    if system is System.PRODUCT:
        return parts.sum(axis=0)  # log scale
    if system is System.MIN:
        return parts.min(axis=0)
    return parts.max(axis=0)


def _sides_for(claim, n: int, N: int, seed: int):
    """(reference sample, combined normalized system) for one index."""
    dist = claim.distribution
    if dist is None:
        raise NoSampler("claim has no distribution to sample")
    g = claim.normalizers(n)
    system = claim.system
    product = system is System.PRODUCT

    def draw(stream, normalized):
        rng = make_rng(seed, stream)
        if normalized:
            x = sample_normalized(dist, g, system, N, rng=rng)
        else:
            x = sample_distribution(dist, N, rng=rng)
        return np.log(x) if product else x

    if claim.definition is Definition.CS:
        ref = draw(0, False)
        parts = np.stack([draw(1 + j, True) for j in range(n)])
    else:
        ref = draw(0, True)
        parts = np.stack([draw(1 + j, False) for j in range(n)])
    return ref, _combine(system, parts)


def _nu_sides(claim, n, N: int, seed: int):
    """EX15-type check: X~ = Gbar^{-1}(e^{-X}) against the max of nu copies of X."""
    F = claim.transform_for(n)
    Gbar = claim.normalizers(n)
    nu = claim.nu_pgf(n)
    rng0, rng1 = make_rng(seed, 0), make_rng(seed, 1)
    if F.inverse is None:
        raise NoSampler(f"{F.family} has no quantile function")
    X = F.inverse(rng0.uniform(size=N))
    ref = survival_quantile(Gbar, np.exp(-X))
    counts = pgf_sampler(nu)(rng1, N)
    U = rng1.uniform(size=N)
    # max of nu copies: F^{-1}(U^{1/nu}) = Fbar^{-1}(1 - U^{1/nu})
    with np.errstate(under="ignore"):
        combined = F.inverse(-np.expm1(np.log(U) / counts))
    if claim.system is System.MIN:
        raise NoSampler("counting-law simulation is implemented for MAX systems")
    return ref, combined


def _transform_kind(claim) -> Kind:
    if claim.system is System.PRODUCT:
        return Kind.CHF  # of the log
    if claim.transform.kind is Kind.PGF:
        return Kind.PGF
    if claim.transform.kind is Kind.SURVIVAL:
        return Kind.SURVIVAL
    return Kind.CHF


def _transform_points(kind: Kind, ref: np.ndarray) -> np.ndarray:
    if kind is Kind.PGF:
        return np.array([0.25, 0.5, 0.75])
    if kind is Kind.SURVIVAL:
        return np.quantile(ref, [0.1, 0.25, 0.5, 0.75, 0.9])
    return np.array([-2.0, -1.0, -0.5, 0.5, 1.0, 2.0])


def simulate_and_test(claim, N: int = DEFAULT_SAMPLES, seed: int = 0, n=None,
                      keep_samples: bool = False) -> SimulationReport:
    """Two-sample KS between X and the combined normalized system at index n."""
    n = claim.n_range[0] if n is None else n
    if float(n) != int(n) or n < 1:
        raise NoSampler("simulation needs a positive integer index")
    n = int(n)
    if claim.definition is Definition.NU:
        ref, combined = _nu_sides(claim, n, N, seed)
    else:
        ref, combined = _sides_for(claim, n, N, seed)
    D, dp, dm = ks_two_sample(ref, combined)
    kind = _transform_kind(claim)
    pts = _transform_points(kind, ref)
    finite = np.isfinite(ref) & np.isfinite(combined) if kind is Kind.CHF else slice(None)
    e1 = empirical_transform(kind, ref[finite], pts)
    e2 = empirical_transform(kind, combined[finite], pts)
    dev = np.abs(e1.values - e2.values)
    se = np.sqrt(e1.stderr**2 + e2.stderr**2)
    z = np.where(se > 0, dev / np.where(se > 0, se, 1.0), np.where(dev > 0, np.inf, 0.0))
    runs = []
    if keep_samples:
        label = claim.distribution.label() if claim.distribution else claim.transform.label()
        runs = [
            SampleRun(label, "none", claim.system.value, "reference", N, seed, ref),
            SampleRun(label, claim.normalizers.name, claim.system.value, str(n), N, seed, combined),
        ]
    return SimulationReport(
        case_id=claim.case_id, n=n, N=N, seed=seed, ks=D, ks_plus=dp, ks_minus=dm,
        critical=ks_critical(N), transform_kind=kind.value, points=pts,
        max_deviation=float(dev.max()), max_z=float(z.max()), runs=runs,
    )


def empirical_pgf_check(samples, P: Callable, points=(0.25, 0.5, 0.75)) -> np.ndarray:
    """|empirical p.g.f. - P| / standard error at each point."""
    e = empirical_transform(Kind.PGF, samples, points)
    exact = np.asarray(P(np.asarray(points, dtype=float)), dtype=complex)
    return np.abs(e.values - exact) / e.stderr


"""Transforms of the five kinds and the closed-form catalog.

A :class:`Transform` wraps a vectorised closed form together with its
admissible domain.  Families that take part in two-sided normalization also
carry their one-sided components as functions of the log-kernel ``w``: for a
ch.f. the positive part is ``w -> E[exp(w X); X >= 0]`` so that
``f_+(t) = part(i t)``; for a Mellin transform the positive part is
``w -> E[X^w; X >= 1]`` and the negative part ``w -> E[X^-w; X < 1]``.
Normalization then substitutes ``log g`` for the kernel ``w``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np
from scipy import special

from . import series as ts
from .series import TruncatedSeries


class Kind(str, enum.Enum):
    CHF = "CHF"
    LAPLACE = "LAPLACE"
    MELLIN = "MELLIN"
    PGF = "PGF"
    SURVIVAL = "SURVIVAL"


class DomainError(ValueError):
    """Evaluation point outside a transform's admissible set."""


@dataclass(frozen=True)
class Domain:
    """Real interval; for MELLIN it bounds the real part of ``u``."""

    lo: float = -math.inf
    hi: float = math.inf
    lo_closed: bool = True
    hi_closed: bool = True

    def contains(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        lo_ok = x >= self.lo if self.lo_closed else x > self.lo
        hi_ok = x <= self.hi if self.hi_closed else x < self.hi
        return lo_ok & hi_ok

    def describe(self) -> str:
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return f"{left}{self.lo}, {self.hi}{right}"


_DEFAULT_DOMAINS = {
    Kind.CHF: Domain(),
    Kind.LAPLACE: Domain(0.0, math.inf),
    Kind.PGF: Domain(0.0, 1.0),
    Kind.SURVIVAL: Domain(0.0, math.inf),
    Kind.MELLIN: Domain(),
}

Fn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class Transform:
    kind: Kind
    family: str
    params: Mapping[str, float]
    fn: Fn
    domain: Domain
    log_fn: Fn | None = None
    # (negative side, positive side) as functions of the log-kernel
    parts: tuple[Fn | None, Fn | None] | None = None
    series: Callable[[int], TruncatedSeries] | None = None
    taylor_at: Callable[[float, int], TruncatedSeries] | None = None
    inverse: Fn | None = None
    support_lo: float | None = None
    stochastic: bool = True
    candidate: bool = False
    notes: tuple[str, ...] = ()
    # PGF only: y -> 1 - P(1 - y), accurate as y -> 0
    complement: Fn | None = None

    def __call__(self, x):
        return eval_transform(self, x)

    def log(self, x) -> np.ndarray:
        """Continuous branch of log T along ``x``."""
        x = np.asarray(x)
        _check_domain(self, x)
        if self.log_fn is not None:
            with np.errstate(all="ignore"):
                return np.asarray(self.log_fn(x), dtype=complex)
        return _unwrapped_log(self, x)

    def analytic(self, x) -> np.ndarray:
        """Closed form without the support clamp (used by inverse solves)."""
        with np.errstate(all="ignore"):
            return np.asarray(self.fn(np.asarray(x, dtype=float)), dtype=float)

    def label(self) -> str:
        ps = ", ".join(f"{k}={_fmt(v)}" for k, v in self.params.items())
        return f"{self.family}({ps})"


def _fmt(v) -> str:
    return f"{v:.6g}" if isinstance(v, float) else str(v)


def _check_domain(T: Transform, x: np.ndarray):
    if np.iscomplexobj(x):
        if T.kind is not Kind.MELLIN:
            raise DomainError(f"{T.family}: complex points only allowed for MELLIN")
        re = x.real
    else:
        re = x
    ok = T.domain.contains(re)
    if not np.all(ok):
        bad = np.asarray(x)[~ok].ravel()[:3]
        raise DomainError(
            f"{T.family}: points {bad.tolist()} outside domain {T.domain.describe()}"
        )


def eval_transform(T: Transform, point) -> np.ndarray:
    """Evaluate ``T`` at a point or array of points; returns complex values."""
    x = np.asarray(point)
    _check_domain(T, x)
    with np.errstate(all="ignore"):
        if T.kind is Kind.SURVIVAL and T.support_lo is not None:
            xf = x.astype(float)
            val = np.where(xf < T.support_lo, 1.0, T.fn(np.maximum(xf, T.support_lo)))
        else:
            val = T.fn(x)
    val = np.asarray(val, dtype=complex)
    if val.shape != x.shape:
        val = np.broadcast_to(val, x.shape).copy()
    return val


def _unwrapped_log(T: Transform, x: np.ndarray) -> np.ndarray:
    # track a continuous branch from the point nearest 0 outward, per sign
    vals = eval_transform(T, x)
    flat_x = np.asarray(x).ravel()
    flat_v = vals.ravel()
    out = np.empty(flat_v.shape, dtype=complex)
    key = np.real(flat_x)
    for side in (key >= 0, key < 0):
        idx = np.flatnonzero(side)
        if idx.size == 0:
            continue
        order = idx[np.argsort(np.abs(key[idx]))]
        phase = np.unwrap(np.angle(flat_v[order]))
        out[order] = np.log(np.abs(flat_v[order])) + 1j * phase
    return out.reshape(vals.shape)


# --------------------------------------------------------------------------
# parameter validation and registry


@dataclass(frozen=True)
class Param:
    lo: float = -math.inf
    hi: float = math.inf
    lo_closed: bool = False
    hi_closed: bool = False
    integer: bool = False
    default: float | None = None

    def check(self, family: str, name: str, value):
        try:
            v = float(value)
        except (TypeError, ValueError):
            raise ValueError(f"{family}: parameter {name}={value!r} is not a number") from None
        if not math.isfinite(v):
            raise ValueError(f"{family}: parameter {name} must be finite")
        if self.integer and not v.is_integer():
            raise ValueError(f"{family}: parameter {name} must be an integer, got {value}")
        lo_ok = v >= self.lo if self.lo_closed else v > self.lo
        hi_ok = v <= self.hi if self.hi_closed else v < self.hi
        if not (lo_ok and hi_ok):
            left = "[" if self.lo_closed else "("
            right = "]" if self.hi_closed else ")"
            raise ValueError(
                f"{family}: parameter {name}={value} outside {left}{self.lo}, {self.hi}{right}"
            )
        return int(v) if self.integer else v


POS = Param(0.0)
UNIT_OPEN = Param(0.0, 1.0)
UNIT_HALF_OPEN = Param(0.0, 1.0, hi_closed=True)
INDEX = Param(0.0)  # normalizer index; real so that n <-> 1/n dualities work


@dataclass(frozen=True)
class _Family:
    name: str
    kind: Kind
    params: dict[str, Param]
    build: Callable[..., Transform]
    doc: str = ""


FAMILIES: dict[str, _Family] = {}


def _register(name: str, kind: Kind, **params: Param):
    def deco(build):
        FAMILIES[name] = _Family(name, kind, params, build, (build.__doc__ or "").strip())
        return build

    return deco


def make_transform(family: str, params: Mapping[str, float] | None = None, **kw) -> Transform:
    """Build a catalog transform from its identifier and named parameters."""
    if family not in FAMILIES:
        raise KeyError(f"unknown transform family {family!r}")
    fam = FAMILIES[family]
    given = dict(params or {})
    given.update(kw)
    unknown = set(given) - set(fam.params)
    if unknown:
        raise ValueError(f"{family}: unknown parameters {sorted(unknown)}")
    resolved = {}
    for name, spec in fam.params.items():
        if name not in given:
            if spec.default is None:
                raise ValueError(f"{family}: missing parameter {name}")
            resolved[name] = spec.default
        else:
            resolved[name] = spec.check(family, name, given[name])
    return fam.build(**resolved)


def _T(kind, family, params, fn, **kw) -> Transform:
    kw.setdefault("domain", _DEFAULT_DOMAINS[kind])
    return Transform(kind=kind, family=family, params=dict(params), fn=fn, **kw)


def _cpow(x, p):
    return np.power(np.asarray(x, dtype=complex), p)


# --------------------------------------------------------------------------
# LAPLACE families


@_register("positive_stable_laplace", Kind.LAPLACE, alpha=Param(0.0, 1.0, hi_closed=True))
def _positive_stable(alpha):
    """exp(-s^alpha)."""
    return _T(
        Kind.LAPLACE, "positive_stable_laplace", {"alpha": alpha},
        lambda s: np.exp(-np.power(s, alpha)),
        log_fn=lambda s: -np.power(s, alpha),
        inverse=lambda v: np.power(-np.log(v), 1.0 / alpha),
        parts=(None, lambda w: np.exp(-_cpow(-w, alpha))),
    )


def _reciprocal_integer(family, alpha):
    m = 1.0 / alpha
    if abs(m - round(m)) > 1e-12 or round(m) < 2:
        raise ValueError(f"{family}: alpha must be 1/m for an integer m >= 2, got {alpha}")


def tempered_scale(alpha: float, lam: float) -> float:
    return lam**alpha * (1.0 + math.tan(math.pi * alpha / 2.0))


@_register(
    "tempered_stable_laplace", Kind.LAPLACE,
    alpha=UNIT_OPEN, lam=POS, h=Param(0.0, lo_closed=True),
)
def _tempered_stable(alpha, lam, h):
    """exp{-lam^alpha (1 + tan(pi alpha/2)) ((s+h)^alpha - h^alpha)}."""
    _reciprocal_integer("tempered_stable_laplace", alpha)
    k = tempered_scale(alpha, lam)
    ha = h**alpha

    def log_fn(s):
        return -k * (np.power(s + h, alpha) - ha)

    return _T(
        Kind.LAPLACE, "tempered_stable_laplace", {"alpha": alpha, "lam": lam, "h": h},
        lambda s: np.exp(log_fn(s)), log_fn=log_fn,
        inverse=lambda v: np.power(-np.log(v) / k + ha, 1.0 / alpha) - h,
        parts=(None, lambda w: np.exp(-k * (_cpow(h - w, alpha) - ha))),
    )


@_register("tempered_stable_normalizer", Kind.LAPLACE, alpha=UNIT_OPEN, h=Param(0.0, lo_closed=True), n=INDEX)
def _tempered_normalizer(alpha, h, n):
    """exp(h - ((s+h)^alpha / n + (n-1)/n h^alpha)^(1/alpha))."""
    _reciprocal_integer("tempered_stable_normalizer", alpha)

    def log_fn(s):
        return h - np.power(np.power(s + h, alpha) / n + (n - 1) / n * h**alpha, 1.0 / alpha)

    return _T(Kind.LAPLACE, "tempered_stable_normalizer", {"alpha": alpha, "h": h, "n": n},
              lambda s: np.exp(log_fn(s)), log_fn=log_fn)


@_register("degenerate_laplace", Kind.LAPLACE, c=POS)
def _degenerate_laplace(c):
    """exp(-c s): point mass at c."""
    return _T(Kind.LAPLACE, "degenerate_laplace", {"c": c},
              lambda s: np.exp(-c * s), log_fn=lambda s: -c * np.asarray(s, dtype=float),
              inverse=lambda v: -np.log(v) / c)


@_register("gamma_laplace", Kind.LAPLACE, b=POS, gamma=POS)
def _gamma_laplace(b, gamma):
    """(1 + b s)^-gamma."""
    return _T(
        Kind.LAPLACE, "gamma_laplace", {"b": b, "gamma": gamma},
        lambda s: np.power(1.0 + b * s, -gamma),
        log_fn=lambda s: -gamma * np.log1p(b * s),
        inverse=lambda v: (np.power(v, -1.0 / gamma) - 1.0) / b,
        parts=(None, lambda w: _cpow(1.0 - b * w, -gamma)),
    )


@_register("gamma_normalizer", Kind.LAPLACE, b=POS, n=INDEX)
def _gamma_normalizer(b, n):
    """exp{(1/b)(1 - (1 + b s)^(1/n))}."""

    def log_fn(s):
        return (1.0 - np.power(1.0 + b * s, 1.0 / n)) / b

    return _T(Kind.LAPLACE, "gamma_normalizer", {"b": b, "n": n},
              lambda s: np.exp(log_fn(s)), log_fn=log_fn)


# --------------------------------------------------------------------------
# CHF families


@_register("laplace_chf", Kind.CHF, a=POS)
def _laplace_chf(a):
    """1/(1 + a^2 t^2) = 1/2 (1 - i a t)^-1 + 1/2 (1 + i a t)^-1."""

    def part(w):
        return 0.5 / (1.0 - a * np.asarray(w, dtype=complex))

    return _T(Kind.CHF, "laplace_chf", {"a": a},
              lambda t: 1.0 / (1.0 + (a * t) ** 2),
              log_fn=lambda t: -np.log1p((a * t) ** 2),
              parts=(part, part))


@_register("laplace_chf_normalizer", Kind.CHF, a=POS, n=INDEX)
def _laplace_chf_normalizer(a, n):
    """exp{(1/a)(1 - (1 + a^2 t^2)^(1/n))}."""

    def log_fn(t):
        return (1.0 - np.power(1.0 + (a * t) ** 2, 1.0 / n)) / a

    return _T(Kind.CHF, "laplace_chf_normalizer", {"a": a, "n": n},
              lambda t: np.exp(log_fn(t)), log_fn=log_fn)


@_register("degenerate_chf", Kind.CHF, c=Param())
def _degenerate_chf(c):
    """exp(i c t)."""
    return _T(Kind.CHF, "degenerate_chf", {"c": c},
              lambda t: np.exp(1j * c * np.asarray(t, dtype=float)),
              log_fn=lambda t: 1j * c * np.asarray(t, dtype=float))


@_register("gamma_chf", Kind.CHF, b=POS, gamma=POS)
def _gamma_chf(b, gamma):
    """(1 - i b t)^-gamma."""
    return _T(Kind.CHF, "gamma_chf", {"b": b, "gamma": gamma},
              lambda t: _cpow(1.0 - 1j * b * np.asarray(t, dtype=float), -gamma),
              log_fn=lambda t: -gamma * np.log(1.0 - 1j * b * np.asarray(t, dtype=float)),
              parts=(lambda w: np.zeros_like(np.asarray(w, dtype=complex)),
                     lambda w: _cpow(1.0 - b * np.asarray(w, dtype=complex), -gamma)))


# --------------------------------------------------------------------------
# PGF families


def _pgf(family, params, fn, series, **kw):
    return _T(Kind.PGF, family, params, fn, series=series, **kw)


@_register("identity_pgf", Kind.PGF)
def _identity_pgf():
    """z: point mass at 1."""
    return _pgf("identity_pgf", {}, lambda z: np.asarray(z, dtype=float), ts.variable,
                log_fn=lambda z: np.log(np.asarray(z, dtype=float)),
                inverse=lambda v: np.asarray(v, dtype=float),
                complement=lambda y: np.asarray(y, dtype=float))


@_register("geometric_pgf", Kind.PGF, p=UNIT_OPEN)
def _geometric_pgf(p):
    """(1 - p)/(1 - p z), P(X = k) = (1 - p) p^k."""

    def series(K):
        return TruncatedSeries((1 - p) * p ** np.arange(K + 1))

    def taylor_at(c, K):
        # (1-p)/((1-pc) - p (z - c))
        q = p / (1 - p * c)
        return TruncatedSeries((1 - p) / (1 - p * c) * q ** np.arange(K + 1))

    return _pgf("geometric_pgf", {"p": p}, lambda z: (1 - p) / (1 - p * z), series,
                taylor_at=taylor_at, inverse=lambda v: (1.0 - (1 - p) / v) / p)


@_register("geometric_normalizer", Kind.PGF, p=UNIT_OPEN, n=INDEX)
def _geometric_normalizer(p, n):
    """(1/p)(1 - (1-p)^(1-1/n) (1 - p z)^(1/n))."""
    c = (1 - p) ** (1 - 1 / n)

    def series(K):
        return (1.0 - ts.binomial_series(1.0 / n, p, K) * c) / p

    return _pgf("geometric_normalizer", {"p": p, "n": n},
                lambda z: (1.0 - c * np.power(1 - p * np.asarray(z, dtype=float), 1.0 / n)) / p,
                series)


@_register("tilted_stable_pgf", Kind.PGF, lam=POS, a=UNIT_HALF_OPEN, gamma=UNIT_HALF_OPEN)
def _tilted_stable_pgf(lam, a, gamma):
    """exp{-lam ((1 - a z)^gamma - (1 - a)^gamma)}; a = 1 is discrete stable."""
    base = (1 - a) ** gamma

    def log_fn(z):
        return -lam * (np.power(1 - a * np.asarray(z, dtype=float), gamma) - base)

    def series(K):
        return ts.ts_exp((ts.binomial_series(gamma, a, K) - base) * (-lam))

    def taylor_at(c, K):
        # (1 - a z)^g = (1 - a c)^g (1 - a/(1 - a c) (z - c))^g
        r = 1 - a * c
        inner = ts._binomial_in(gamma, a / r, K) * r**gamma
        return ts.ts_exp((inner - base) * (-lam))

    def inverse(v):
        return (1.0 - np.power(base - np.log(v) / lam, 1.0 / gamma)) / a

    return _pgf("tilted_stable_pgf", {"lam": lam, "a": a, "gamma": gamma},
                lambda z: np.exp(log_fn(z)), series, log_fn=log_fn,
                taylor_at=taylor_at, inverse=inverse)


@_register("tilted_stable_normalizer", Kind.PGF, a=UNIT_HALF_OPEN, gamma=UNIT_HALF_OPEN, n=INDEX)
def _tilted_stable_normalizer(a, gamma, n):
    """(1/a)(1 - ((1 - 1/n)(1-a)^gamma + (1/n)(1 - a z)^gamma)^(1/gamma))."""
    base = (1 - 1 / n) * (1 - a) ** gamma

    def fn(z):
        w = base + np.power(1 - a * np.asarray(z, dtype=float), gamma) / n
        return (1.0 - np.power(w, 1.0 / gamma)) / a

    def series(K):
        w = ts.binomial_series(gamma, a, K) / n + base
        return (1.0 - ts.ts_pow_real(w, 1.0 / gamma)) / a

    return _pgf("tilted_stable_normalizer", {"a": a, "gamma": gamma, "n": n}, fn, series, candidate=True)


@_register("sibuya_pgf", Kind.PGF, gamma=UNIT_HALF_OPEN)
def _sibuya_pgf(gamma):
    """1 - (1 - z)^gamma."""

    def series(K):
        return 1.0 - ts.binomial_series(gamma, 1.0, K)

    def taylor_at(c, K):
        r = 1 - c
        return 1.0 - ts._binomial_in(gamma, 1.0 / r, K) * r**gamma

    return _pgf("sibuya_pgf", {"gamma": gamma},
                lambda z: 1.0 - np.power(1 - np.asarray(z, dtype=float), gamma), series,
                taylor_at=taylor_at,
                inverse=lambda v: 1.0 - np.power(1.0 - v, 1.0 / gamma),
                complement=lambda y: np.power(np.asarray(y, dtype=float), gamma))


@_register("sibuya_pursuit_normalizer", Kind.PGF, gamma=UNIT_HALF_OPEN, n=Param(0.0, integer=True))
def _sibuya_pursuit_normalizer(gamma, n):
    """1 - (1 - (1 - (1 - z)^gamma)^n)^(1/gamma)."""

    def fn(z):
        p = 1.0 - np.power(1 - np.asarray(z, dtype=float), gamma)
        return 1.0 - np.power(1.0 - p**n, 1.0 / gamma)

    def series(K):
        p = 1.0 - ts.binomial_series(gamma, 1.0, K)
        return 1.0 - ts.ts_pow_real(1.0 - ts.ts_pow_int(p, n), 1.0 / gamma)

    return _pgf("sibuya_pursuit_normalizer", {"gamma": gamma, "n": n}, fn, series, candidate=True)


def _first_passage_series(K: int) -> TruncatedSeries:
    # (1 - sqrt(1 - z^2))/z
    half = 1.0 - ts.binomial_series(0.5, 1.0, (K + 1) // 2 + 1)
    return ts.ts_shift_down(ts.ts_substitute_power(half, 2, K + 1), 1, K)


@_register("chebyshev_pgf", Kind.PGF, M=Param(0.0, integer=True))
def _chebyshev_pgf(M):
    """((1 - sqrt(1 - z^2))/z)^M, the first passage time of a symmetric walk to level M."""

    def fn(z):
        z = np.asarray(z, dtype=float)
        # z/(1 + sqrt(1 - z^2)) avoids cancellation near 0
        return np.power(z / (1.0 + np.sqrt(1.0 - z * z)), M)

    def series(K):
        return ts.ts_pow_int(_first_passage_series(K), M)

    def inverse(v):
        y = np.power(v, 1.0 / M)
        return 2 * y / (1 + y * y)

    return _pgf("chebyshev_pgf", {"M": M}, fn, series, inverse=inverse)


def chebyshev_t(n: int, x) -> np.ndarray:
    """T_n(x) by the three-term recurrence."""
    x = np.asarray(x, dtype=float)
    t0, t1 = np.ones_like(x), x
    if n == 0:
        return t0
    for _ in range(n - 1):
        t0, t1 = t1, 2 * x * t1 - t0
    return t1


@_register("chebyshev_normalizer", Kind.PGF, n=Param(0.0, integer=True))
def _chebyshev_normalizer(n):
    """1/T_n(1/z)."""

    def fn(z):
        z = np.asarray(z, dtype=float)
        out = np.zeros_like(z)
        pos = z > 0
        with np.errstate(divide="ignore"):
            out[pos] = 1.0 / chebyshev_t(n, 1.0 / z[pos])
        return out

    def series(K):
        # 1/T_n(1/z) = z^n / R(z) with R(z) = z^n T_n(1/z)
        power = np.polynomial.chebyshev.cheb2poly([0] * n + [1])
        rev = np.zeros(K + 1)
        m = min(n, K)
        rev[: m + 1] = power[::-1][: m + 1]
        return ts.ts_mul(ts.monomial(n, K), ts.ts_reciprocal(TruncatedSeries(rev)))

    return _pgf("chebyshev_normalizer", {"n": n}, fn, series)


# --------------------------------------------------------------------------
# MELLIN families.  Parts are (w -> E[X^-w; X<1], w -> E[X^w; X>=1]).


def _mellin(family, params, fn, strip: Domain, **kw):
    return _T(Kind.MELLIN, family, params, fn, domain=strip, **kw)


@_register("lognormal_mellin", Kind.MELLIN, b=POS)
def _lognormal_mellin(b):
    """exp(b^2 u^2 / 2) for ln X ~ N(0, b^2)."""

    def part(w):
        w = np.asarray(w, dtype=complex)
        return np.exp(0.5 * (b * w) ** 2) * special.ndtr(b * w)

    return _mellin("lognormal_mellin", {"b": b},
                   lambda u: np.exp(0.5 * (b * np.asarray(u)) ** 2), Domain(),
                   log_fn=lambda u: 0.5 * (b * np.asarray(u, dtype=complex)) ** 2,
                   parts=(part, part))


@_register("power_normalizer_mellin", Kind.MELLIN, c=POS)
def _power_normalizer(c):
    """exp(c u): the log-normalizer is the point mass at c (X -> X^c)."""
    return _mellin("power_normalizer_mellin", {"c": c},
                   lambda u: np.exp(c * np.asarray(u, dtype=complex)), Domain(),
                   log_fn=lambda u: c * np.asarray(u, dtype=complex))


@_register("double_pareto_printed_mellin", Kind.MELLIN, a=Param(1.0))
def _double_pareto_printed(a):
    """(a^2 - 1)/(a^2 - u^2) as printed; its value at u = 0 is not 1."""
    k = (a * a - 1) / (2 * a)

    def part(w):
        return k / (a - np.asarray(w, dtype=complex))

    return _mellin("double_pareto_printed_mellin", {"a": a},
                   lambda u: (a * a - 1) / (a * a - np.asarray(u) ** 2),
                   Domain(-a, a, False, False), parts=(part, part), stochastic=False,
                   notes=(f"M(0) = {(a * a - 1) / (a * a):.6g} != 1: not a probability law",))


@_register("double_pareto_mellin", Kind.MELLIN, a=POS)
def _double_pareto(a):
    """a^2/(a^2 - u^2): density (a/2) x^(a-1) on (0,1), (a/2) x^(-a-1) on [1, inf)."""

    def part(w):
        return 0.5 * a / (a - np.asarray(w, dtype=complex))

    return _mellin("double_pareto_mellin", {"a": a},
                   lambda u: a * a / (a * a - np.asarray(u) ** 2),
                   Domain(-a, a, False, False), parts=(part, part))


@_register("double_pareto_printed_normalizer", Kind.MELLIN, a=Param(1.0), n=INDEX)
def _double_pareto_printed_normalizer(a, n):
    """log N(u) = a - (1/a)(a^2 - 1)^(1-1/n) (a^2 - u^2)^(1/n)."""

    def log_fn(u):
        return a - (a * a - 1) ** (1 - 1 / n) * _cpow(a * a - np.asarray(u) ** 2, 1 / n) / a

    return _mellin("double_pareto_printed_normalizer", {"a": a, "n": n},
                   lambda u: np.exp(log_fn(u)), Domain(), log_fn=log_fn, stochastic=False)


@_register("double_pareto_normalizer", Kind.MELLIN, a=POS, n=INDEX)
def _double_pareto_normalizer(a, n):
    """log N(u) = a (1 - (1 - u^2/a^2)^(1/n))."""

    def log_fn(u):
        return a * (1 - _cpow(1 - (np.asarray(u) / a) ** 2, 1 / n))

    return _mellin("double_pareto_normalizer", {"a": a, "n": n},
                   lambda u: np.exp(log_fn(u)), Domain(), log_fn=log_fn)


@_register("log_levy_mellin", Kind.MELLIN)
def _log_levy():
    """E[X^u] = exp(-sqrt(-2u)) for u <= 0, ln X one-sided stable of index 1/2."""

    def part(w):
        return np.exp(-np.sqrt(-2 * np.asarray(w, dtype=complex)))

    return _mellin("log_levy_mellin", {}, part, Domain(-math.inf, 0.0),
                   log_fn=lambda u: -np.sqrt(-2 * np.asarray(u, dtype=complex)),
                   parts=(None, part),
                   notes=("converges for u <= 0 (s = -u >= 0 on the log scale)",))


@_register("pareto_mellin", Kind.MELLIN, alpha=POS)
def _pareto_mellin(alpha):
    """alpha/(alpha - u), u < alpha."""

    def part(w):
        return alpha / (alpha - np.asarray(w, dtype=complex))

    return _mellin("pareto_mellin", {"alpha": alpha}, part,
                   Domain(-math.inf, alpha, True, False),
                   log_fn=lambda u: np.log(alpha) - np.log(alpha - np.asarray(u, dtype=complex)),
                   parts=(None, part), inverse=lambda v: alpha - alpha / v)


@_register("pareto_printed_normalizer", Kind.MELLIN, alpha=POS, n=INDEX,
           convention=Param(-1.0, 1.0, True, True, integer=True, default=1))
def _pareto_printed_normalizer(alpha, n, convention):
    """g_n(t) = exp{alpha((1 + i t/alpha)^n - 1)} read at t = -i u (convention +1) or t = i u (-1)."""
    if convention not in (-1, 1):
        raise ValueError("pareto_printed_normalizer: convention must be +1 or -1")

    def log_fn(u):
        return alpha * (_cpow(1 + convention * np.asarray(u) / alpha, n) - 1)

    return _mellin("pareto_printed_normalizer", {"alpha": alpha, "n": n, "convention": convention},
                   lambda u: np.exp(log_fn(u)), Domain(), log_fn=log_fn)


@_register("pareto_pursuit_normalizer", Kind.MELLIN, alpha=POS, n=INDEX)
def _pareto_pursuit_normalizer(alpha, n):
    """log N(u) = alpha (1 - (1 - u/alpha)^n), the solution of M~ = M^n."""

    def log_fn(u):
        return alpha * (1 - _cpow(1 - np.asarray(u) / alpha, n))

    return _mellin("pareto_pursuit_normalizer", {"alpha": alpha, "n": n},
                   lambda u: np.exp(log_fn(u)), Domain(), log_fn=log_fn)


# --------------------------------------------------------------------------
# SURVIVAL families


def _surv(family, params, fn, log_fn, inverse=None, **kw):
    return _T(Kind.SURVIVAL, family, params, fn, log_fn=log_fn, inverse=inverse, **kw)


@_register("weibull_survival", Kind.SURVIVAL, alpha=POS, beta=POS)
def _weibull(alpha, beta):
    """exp{-(x/beta)^alpha}."""
    return _surv("weibull_survival", {"alpha": alpha, "beta": beta},
                 lambda x: np.exp(-np.power(x / beta, alpha)),
                 lambda x: -np.power(np.asarray(x, dtype=float) / beta, alpha),
                 inverse=lambda v: beta * np.power(-np.log(v), 1.0 / alpha))


@_register("weibull_rate_survival", Kind.SURVIVAL, lam=POS, b=POS)
def _weibull_rate(lam, b):
    """exp(-lam x^b)."""
    return _surv("weibull_rate_survival", {"lam": lam, "b": b},
                 lambda x: np.exp(-lam * np.power(x, b)),
                 lambda x: -lam * np.power(np.asarray(x, dtype=float), b),
                 inverse=lambda v: np.power(-np.log(v) / lam, 1.0 / b))


@_register("exp_survival", Kind.SURVIVAL, rate=POS)
def _exp_survival(rate):
    """exp(-rate x); rate = 1 is the degenerate min-normalizer."""
    return _surv("exp_survival", {"rate": rate},
                 lambda x: np.exp(-rate * np.asarray(x, dtype=float)),
                 lambda x: -rate * np.asarray(x, dtype=float),
                 inverse=lambda v: -np.log(v) / rate)


@_register("gompertz_survival", Kind.SURVIVAL, xi=POS, lam=POS)
def _gompertz(xi, lam):
    """exp{xi (1 - e^(lam x))}."""
    return _surv("gompertz_survival", {"xi": xi, "lam": lam},
                 lambda x: np.exp(-xi * np.expm1(lam * np.asarray(x, dtype=float))),
                 lambda x: -xi * np.expm1(lam * np.asarray(x, dtype=float)),
                 inverse=lambda v: np.log1p(-np.log(v) / xi) / lam)


@_register("gompertz_normalizer", Kind.SURVIVAL, lam=POS, n=INDEX)
def _gompertz_normalizer(lam, n):
    """(1 + n (e^(lam x) - 1))^(-1/lam)."""

    def log_fn(x):
        return -np.log1p(n * np.expm1(lam * np.asarray(x, dtype=float))) / lam

    return _surv("gompertz_normalizer", {"lam": lam, "n": n},
                 lambda x: np.exp(log_fn(x)), log_fn,
                 inverse=lambda v: np.log1p((np.power(v, -lam) - 1.0) / n) / lam)


@_register("pareto_survival", Kind.SURVIVAL, alpha=POS)
def _pareto_survival(alpha):
    """x^-alpha on x >= 1 (1 below)."""
    return _surv("pareto_survival", {"alpha": alpha},
                 lambda x: np.power(np.asarray(x, dtype=float), -alpha),
                 lambda x: -alpha * np.log(np.maximum(np.asarray(x, dtype=float), 1.0)),
                 inverse=lambda v: np.power(v, -1.0 / alpha), support_lo=1.0)


@_register("pareto_min_normalizer", Kind.SURVIVAL, n=INDEX)
def _pareto_min_normalizer(n):
    """exp(-x^(1/n))."""
    return _surv("pareto_min_normalizer", {"n": n},
                 lambda x: np.exp(-np.power(x, 1.0 / n)),
                 lambda x: -np.power(np.asarray(x, dtype=float), 1.0 / n),
                 inverse=lambda v: np.power(-np.log(v), n))


# --------------------------------------------------------------------------
# degenerate (identity) normalizers per kind


def degenerate(kind: Kind) -> Transform:
    """The kernel itself: e^{-s}, e^{it}, z, e^{u} or e^{-x}."""
    if kind is Kind.LAPLACE:
        return make_transform("degenerate_laplace", c=1.0)
    if kind is Kind.CHF:
        return make_transform("degenerate_chf", c=1.0)
    if kind is Kind.PGF:
        return make_transform("identity_pgf")
    if kind is Kind.MELLIN:
        return make_transform("power_normalizer_mellin", c=1.0)
    return make_transform("exp_survival", rate=1.0)


# --------------------------------------------------------------------------
# distributions


@dataclass(frozen=True, eq=False)
class DistributionSpec:
    family: str
    params: Mapping[str, float]
    support: tuple[float, float]
    integer: bool
    transforms: Mapping[Kind, Transform] = field(default_factory=dict)
    has_sampler: bool = True

    def transform(self, kind: Kind) -> Transform:
        try:
            return self.transforms[Kind(kind)]
        except KeyError:
            raise KeyError(f"{self.family} has no {Kind(kind).value} transform") from None

    def label(self) -> str:
        ps = ", ".join(f"{k}={_fmt(v)}" for k, v in self.params.items())
        return f"{self.family}({ps})"


INF = math.inf

# family -> (support, integer, {kind: transform family}, sampler?, param renames)
_DISTRIBUTIONS = {
    "positive_stable": ((0, INF), False, {Kind.LAPLACE: "positive_stable_laplace"}, True),
    "tempered_stable": ((0, INF), False, {Kind.LAPLACE: "tempered_stable_laplace"}, True),
    "gamma": ((0, INF), False, {Kind.LAPLACE: "gamma_laplace", Kind.CHF: "gamma_chf"}, True),
    "laplace": ((-INF, INF), False, {Kind.CHF: "laplace_chf"}, True),
    "geometric": ((0, INF), True, {Kind.PGF: "geometric_pgf"}, True),
    "tilted_discrete_stable": ((0, INF), True, {Kind.PGF: "tilted_stable_pgf"}, True),
    "sibuya": ((1, INF), True, {Kind.PGF: "sibuya_pgf"}, True),
    "first_passage": ((1, INF), True, {Kind.PGF: "chebyshev_pgf"}, True),
    "lognormal": ((0, INF), False, {Kind.MELLIN: "lognormal_mellin"}, True),
    "double_pareto": ((0, INF), False, {Kind.MELLIN: "double_pareto_mellin"}, True),
    "double_pareto_printed": ((0, INF), False, {Kind.MELLIN: "double_pareto_printed_mellin"}, False),
    "log_levy": ((1, INF), False, {Kind.MELLIN: "log_levy_mellin"}, True),
    "pareto": ((1, INF), False, {Kind.MELLIN: "pareto_mellin", Kind.SURVIVAL: "pareto_survival"}, True),
    "weibull": ((0, INF), False, {Kind.SURVIVAL: "weibull_survival"}, True),
    "weibull_rate": ((0, INF), False, {Kind.SURVIVAL: "weibull_rate_survival"}, True),
    "gompertz": ((0, INF), False, {Kind.SURVIVAL: "gompertz_survival"}, True),
}


def make_distribution(family: str, params: Mapping[str, float] | None = None, **kw) -> DistributionSpec:
    if family not in _DISTRIBUTIONS:
        raise KeyError(f"unknown distribution family {family!r}")
    support, integer, kinds, sampler = _DISTRIBUTIONS[family]
    given = dict(params or {})
    given.update(kw)
    transforms = {}
    for kind, tf in kinds.items():
        accepted = {k: v for k, v in given.items() if k in FAMILIES[tf].params}
        transforms[kind] = make_transform(tf, accepted)
    used = set().union(*(FAMILIES[tf].params for tf in kinds.values()))
    unknown = set(given) - used
    if unknown:
        raise ValueError(f"{family}: unknown parameters {sorted(unknown)}")
    resolved = {}
    for T in transforms.values():
        resolved.update(T.params)
    return DistributionSpec(family, resolved, support, integer, transforms, sampler)


# --------------------------------------------------------------------------
# empirical transforms


@dataclass(frozen=True, eq=False)
class EmpiricalTransform(Transform):
    points: np.ndarray = None
    values: np.ndarray = None
    stderr: np.ndarray = None
    n_samples: int = 0


MIN_SAMPLES = 1000


def empirical_transform(kind: Kind, samples, points) -> EmpiricalTransform:
    """Pointwise sample estimate of a CHF, PGF or SURVIVAL transform.

    The returned transform evaluates only at ``points``; ``stderr`` holds the
    standard error of each estimate.
    """
    kind = Kind(kind)
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("empty sample")
    if x.size < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples, got {x.size}")
    pts = np.asarray(points, dtype=float).ravel()
    N = x.size
    if kind is Kind.CHF:
        vals = np.array([np.mean(np.exp(1j * t * x)) for t in pts])
        se = np.array([np.sqrt(max(1.0 - abs(v) ** 2, 0.0) / N) for v in vals])
    elif kind is Kind.PGF:
        if not np.all(np.isfinite(x)) or np.any(x != np.floor(x)) or np.any(x < 0):
            raise ValueError("PGF needs nonnegative integer samples")
        vals, se = [], []
        for z in pts:
            zx = np.power(z, x)
            vals.append(zx.mean())
            se.append(zx.std(ddof=1) / np.sqrt(N))
        vals, se = np.array(vals, dtype=complex), np.array(se)
    elif kind is Kind.SURVIVAL:
        xs = np.sort(x)
        p = 1.0 - np.searchsorted(xs, pts, side="right") / N
        vals, se = p.astype(complex), np.sqrt(p * (1 - p) / N)
    else:
        raise ValueError(f"empirical transforms support CHF, PGF, SURVIVAL, not {kind.value}")

    lookup = {float(p): v for p, v in zip(pts, vals)}

    def fn(q):
        q = np.asarray(q, dtype=float)
        try:
            return np.vectorize(lambda t: lookup[float(t)], otypes=[complex])(q)
        except KeyError:
            raise DomainError("empirical transform is defined only at its sample points") from None

    return EmpiricalTransform(
        kind=kind, family="empirical", params={"n_samples": N}, fn=fn,
        domain=_DEFAULT_DOMAINS[kind], points=pts, values=vals, stderr=se, n_samples=N,
    )

"""Random-normalization operators and the inverse normalizer solver."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import series as ts
from .transforms import DomainError, Kind, Transform, eval_transform, make_transform


class System(str, enum.Enum):
    ADDITIVE = "ADDITIVE"
    PRODUCT = "PRODUCT"
    MIN = "MIN"
    MAX = "MAX"


class Definition(str, enum.Enum):
    CS = "CS"
    PURSUIT = "PURSUIT"
    NU = "NU"


class Provenance(str, enum.Enum):
    PRINTED = "printed"
    SOLVED = "equation-solved"


@dataclass(frozen=True, eq=False)
class NormalizerFamily:
    """Indexed family n -> normalizer transform.

    Members are not validated on construction: candidate and even invalid
    families have to be representable so that their validity can be reported.
    """

    kind: Kind
    member: Callable[[float], Transform]
    name: str = ""
    closed_form: bool = True
    provenance: Provenance = Provenance.PRINTED

    def __call__(self, n) -> Transform:
        return self.member(n)


def catalog_family(family: str, provenance=Provenance.PRINTED, **fixed) -> NormalizerFamily:
    probe = make_transform(family, n=1, **fixed)
    return NormalizerFamily(
        kind=probe.kind,
        member=lambda n: make_transform(family, n=n, **fixed),
        name=family,
        provenance=Provenance(provenance),
    )


def fixed_family(transform_for_n: Callable[[float], Transform], kind: Kind, name: str,
                 provenance=Provenance.PRINTED) -> NormalizerFamily:
    return NormalizerFamily(kind=kind, member=transform_for_n, name=name,
                            provenance=Provenance(provenance))


def target_power(definition: Definition, n: float) -> float:
    """Exponent applied to the original transform: 1/n (CS) or n (PURSUIT)."""
    definition = Definition(definition)
    if definition is Definition.CS:
        return 1.0 / n
    if definition is Definition.PURSUIT:
        return float(n)
    raise ValueError("the counting-law variant has no single target power")


def _real(z: np.ndarray, what: str, tol: float = 1e-12) -> np.ndarray:
    z = np.asarray(z)
    if np.iscomplexobj(z):
        scale = np.maximum(1.0, np.abs(z.real))
        if np.any(np.abs(z.imag) > tol * scale):
            raise DomainError(f"{what} is not real on the requested points")
        return z.real
    return z.astype(float)


def _derived(T: Transform, g: Transform, fn, **kw) -> Transform:
    return Transform(
        kind=T.kind, family=f"{T.family}|{g.family}",
        params={**{f"T.{k}": v for k, v in T.params.items()},
                **{f"g.{k}": v for k, v in g.params.items()}},
        fn=fn, domain=kw.pop("domain", g.domain if T.kind in (Kind.CHF, Kind.MELLIN) else T.domain),
        stochastic=T.stochastic, **kw,
    )


def kernel_exponent(g: Transform) -> Callable[[np.ndarray], np.ndarray]:
    """x -> -log g(x) on the real line (the substituted kernel argument)."""
    return lambda x: -_real(g.log(np.asarray(x, dtype=float)), f"log {g.family}")


# --------------------------------------------------------------------------
# operators


def normalize_onesided(T: Transform, g: Transform) -> Transform:
    """g-normalization of a Laplace transform or p.g.f.

    LAPLACE: s -> L(-log g(s)).  PGF: z -> P(Q(z)).
    """
    if T.kind is not g.kind:
        raise ValueError(f"kind mismatch: {T.kind.value} normalized by {g.kind.value}")
    if T.kind is Kind.PGF:
        return normalize_pgf(T, g)
    if T.kind is not Kind.LAPLACE:
        raise ValueError(f"one-sided normalization needs LAPLACE or PGF, got {T.kind.value}")

    def arg(s):
        return -_real(g.log(s), f"log {g.family}")

    def fn(s):
        return eval_transform(T, arg(s))

    def log_fn(s):
        return T.log(arg(s))

    return _derived(T, g, fn, log_fn=log_fn if T.log_fn is not None else None)


def one_sided_parts(T: Transform) -> tuple[Transform, Transform | None]:
    """Split a CHF or MELLIN transform into its (positive, negative) components."""
    if T.parts is None:
        raise ValueError(f"{T.family} has no registered one-sided components")
    minus, plus = T.parts
    if plus is None:
        raise ValueError(f"{T.family} has no positive component")
    if T.kind is Kind.CHF:
        def fp(t):
            return plus(1j * np.asarray(t, dtype=float))

        def fm(t):
            return minus(-1j * np.asarray(t, dtype=float))
    else:
        def fp(u):
            return plus(np.asarray(u))

        def fm(u):
            return minus(-np.asarray(u))

    pos = Transform(kind=T.kind, family=f"{T.family}+", params=T.params, fn=fp,
                    domain=T.domain, parts=(None, plus), stochastic=T.stochastic)
    if minus is None:
        return pos, None
    neg = Transform(kind=T.kind, family=f"{T.family}-", params=T.params, fn=fm,
                    domain=T.domain, parts=(minus, None), stochastic=T.stochastic)
    return pos, neg


def _two_sided(plus_part, minus_part, g: Transform, check_plus=None, check_minus=None):
    def fn(x):
        x = np.asarray(x)
        out = np.zeros(x.shape, dtype=complex)
        with np.errstate(all="ignore"):
            if plus_part is not None:
                w = g.log(x)
                if check_plus is not None:
                    check_plus(w)
                out = out + plus_part(w)
            if minus_part is not None:
                w = g.log(-x)
                if check_minus is not None:
                    check_minus(w)
                out = out + minus_part(w)
        if not np.all(np.isfinite(out)):
            raise DomainError("substitution left the components' domain of analyticity")
        return out

    return fn


def normalize_twosided_chf(f_plus: Transform, f_minus: Transform | None, g: Transform) -> Transform:
    """f~(t) = f_-(e^{-it} -> g(-t)) + f_+(e^{it} -> g(t))."""
    if g.kind is not Kind.CHF:
        raise ValueError("two-sided additive normalization needs a CHF normalizer")
    plus = f_plus.parts[1]
    minus = f_minus.parts[0] if f_minus is not None else None

    fn = _two_sided(plus, minus, g)
    return Transform(kind=Kind.CHF, family=f"{f_plus.family.rstrip('+')}|{g.family}",
                     params={}, fn=fn, domain=g.domain, notes=("kernel e^{+-it} -> g(+-t)",))


def normalize_mellin_twosided(M_plus: Transform, M_minus: Transform | None, N: Transform) -> Transform:
    """M~(u) = M_1(-log N(-u)) + M_2(log N(u))."""
    if N.kind is not Kind.MELLIN:
        raise ValueError("product normalization needs a MELLIN-kind normalizer")
    strip = M_plus.domain

    def check_plus(w):
        if not np.all(strip.contains(np.real(w))):
            raise DomainError("log N(u) leaves the Mellin strip")

    def check_minus(w):
        if not np.all(strip.contains(-np.real(w))):
            raise DomainError("-log N(-u) leaves the Mellin strip")

    fn = _two_sided(M_plus.parts[1], M_minus.parts[0] if M_minus is not None else None,
                    N, check_plus, check_minus)
    base = M_plus.family.rstrip("+")
    return Transform(kind=Kind.MELLIN, family=f"{base}|{N.family}", params={}, fn=fn,
                     domain=strip, stochastic=M_plus.stochastic,
                     notes=("kernel e^{u} -> N(u), e^{-u} -> N(-u)",))


def normalize_min(Fbar: Transform, Gbar: Transform) -> Transform:
    """F~(x) = Fbar(-log Gbar(x))."""
    if Fbar.kind is not Kind.SURVIVAL or Gbar.kind is not Kind.SURVIVAL:
        raise ValueError("min normalization needs two SURVIVAL transforms")
    vanishes = Fbar.analytic(np.array([1e300]))[0] == 0.0

    def fn(x):
        x = np.asarray(x, dtype=float)
        G = _real(eval_transform(Gbar, x), Gbar.family)
        if np.any(G > 1.0 + 1e-15) or np.any(G < 0):
            raise DomainError(f"{Gbar.family} takes values outside [0, 1]")
        y = -_real(Gbar.log(x), f"log {Gbar.family}")
        out = np.zeros(x.shape)
        inf = ~np.isfinite(y)
        if np.any(inf) and not vanishes:
            raise DomainError(f"{Gbar.family} vanishes but {Fbar.family} does not vanish at infinity")
        fin = ~inf
        out[fin] = _real(eval_transform(Fbar, np.maximum(y[fin], 0.0)), Fbar.family)
        return out

    return _derived(Fbar, Gbar, fn, domain=Gbar.domain)


def normalize_pgf(P: Transform, Q: Transform) -> Transform:
    """z -> P(Q(z)); the result also exposes the composed series."""
    if P.kind is not Kind.PGF or Q.kind is not Kind.PGF:
        raise ValueError("p.g.f. normalization needs two PGF transforms")

    def fn(z):
        q = _real(eval_transform(Q, z), Q.family)
        if np.any(q < -1e-15) or np.any(q > 1 + 1e-15):
            raise DomainError(f"{Q.family} maps outside [0, 1]")
        return eval_transform(P, np.clip(q, 0.0, 1.0))

    def composed(K=ts.DEFAULT_ORDER):
        return composed_series(P, Q, K)

    has_series = P.series is not None and Q.series is not None
    return _derived(P, Q, fn, series=composed if has_series else None)


def composed_series(P: Transform, Q: Transform, K: int = ts.DEFAULT_ORDER) -> ts.TruncatedSeries:
    inner = Q.series(K)
    if inner.coeffs[0] == 0.0:
        return ts.ts_compose(P.series(K), inner)
    if P.taylor_at is None:
        raise ValueError(f"{P.family} has no re-expansion about {inner.coeffs[0]:.6g}")
    return ts.ts_compose(P.taylor_at, inner)


def normalize(T: Transform, g: Transform) -> Transform:
    """Dispatch on the transform kind."""
    if T.kind in (Kind.LAPLACE, Kind.PGF):
        return normalize_onesided(T, g)
    if T.kind is Kind.SURVIVAL:
        return normalize_min(T, g)
    plus, minus = one_sided_parts(T)
    if T.kind is Kind.CHF:
        return normalize_twosided_chf(plus, minus, g)
    return normalize_mellin_twosided(plus, minus, g)


# --------------------------------------------------------------------------
# inverse solver

_BISECT_REL = 1e-12
_MAX_HI = 1e300


def _bisect(f: Callable, v: np.ndarray, lo: np.ndarray, hi: np.ndarray, increasing: bool) -> np.ndarray:
    lo, hi = lo.astype(float).copy(), hi.astype(float).copy()
    for _ in range(3000):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        go_right = fm < v if increasing else fm > v
        lo = np.where(go_right, mid, lo)
        hi = np.where(go_right, hi, mid)
        if np.all(hi - lo <= _BISECT_REL * np.maximum(np.abs(hi), 1e-300)):
            break
    return 0.5 * (lo + hi)


def _check_monotone(f: Callable, lo: float, hi: float, increasing: bool, name: str):
    probe = np.linspace(lo, min(hi, lo + 10.0), 129)
    if hi > lo + 10.0:
        probe = np.concatenate([probe, np.geomspace(max(lo, 1e-3) + 10.0, hi, 64)])
    with np.errstate(all="ignore"):
        vals = f(np.sort(probe))
    vals = vals[np.isfinite(vals)]
    d = np.diff(vals)
    tol = 1e-12 * max(1.0, float(np.max(np.abs(vals)))) if vals.size else 0.0
    if (increasing and np.any(d < -tol)) or (not increasing and np.any(d > tol)):
        raise ValueError(f"{name} is not monotone along the solve path")


def invert(T: Transform, v, closed: bool = True) -> np.ndarray:
    """Solve T(y) = v for y on the kind's solve path.

    LAPLACE and SURVIVAL are decreasing on y >= 0; PGF is increasing on [0, 1];
    MELLIN inverts the positive component and needs a registered inverse.
    """
    v = np.asarray(v, dtype=float)
    if closed and T.inverse is not None:
        with np.errstate(all="ignore"):
            return np.asarray(T.inverse(v), dtype=float)
    if T.kind is Kind.MELLIN:
        raise ValueError(f"{T.family}: numeric inversion of Mellin transforms is not supported")

    def f(y):
        with np.errstate(all="ignore"):
            return T.analytic(y)

    if T.kind is Kind.PGF:
        p0 = float(f(np.array([0.0]))[0])
        if np.any(v < p0 - 1e-15) or np.any(v > 1 + 1e-15):
            raise ValueError(f"target outside the range [{p0:.6g}, 1] of {T.family}")
        _check_monotone(f, 0.0, 1.0, True, T.family)
        return _bisect(f, np.clip(v, p0, 1.0), np.zeros_like(v), np.ones_like(v), True)

    if T.kind not in (Kind.LAPLACE, Kind.SURVIVAL):
        raise ValueError(f"cannot invert a {T.kind.value} transform")
    if np.any(v <= 0) or np.any(v > 1 + 1e-15):
        raise ValueError(f"target outside the range (0, 1] of {T.family}")
    hi = np.ones_like(v)
    while True:
        short = f(hi) > v
        if not np.any(short):
            break
        if np.any(hi[short] >= _MAX_HI):
            raise ValueError(f"target outside the range of {T.family}")
        hi = np.where(short, hi * 2.0, hi)
    _check_monotone(f, 0.0, float(hi.max()), False, T.family)
    return _bisect(f, v, np.zeros_like(v), hi, False)


def solve_normalizer(T: Transform, definition: Definition, n: float, closed: bool = True) -> Transform:
    """Recover the normalizer that makes ``T`` satisfy ``definition`` at index ``n``.

    The result evaluates pointwise, through the registered closed inverse of
    ``T`` when present (and ``closed``), else by bracketed bisection.
    """
    p = target_power(definition, n)
    kind = T.kind
    if kind is Kind.CHF:
        raise ValueError("inverse solving needs a real monotone transform kind")

    if kind is Kind.MELLIN:
        plus, minus = one_sided_parts(T)
        if minus is not None:
            raise ValueError("inverse solving needs a one-sided Mellin transform")

        def log_fn(u):
            u = np.asarray(u)
            target = np.exp(p * T.log(u))
            if np.iscomplexobj(target) and np.any(np.abs(target.imag) > 0):
                return T.inverse(target) if T.inverse is not None else _no_inverse(T)
            return np.asarray(invert(T, target.real, closed), dtype=complex)

        return Transform(kind=kind, family=f"solved:{T.family}",
                         params={"n": n, "definition": Definition(definition).value},
                         fn=lambda u: np.exp(log_fn(u)), domain=T.domain, log_fn=log_fn)

    def target(x):
        x = np.asarray(x, dtype=float)
        if kind is Kind.SURVIVAL:
            # analytic continuation below the support edge keeps the solve unique
            with np.errstate(all="ignore"):
                return np.power(T.analytic(x), p)
        return np.exp(p * _real(T.log(x), T.family))

    if kind is Kind.PGF:
        def fn(z):
            return invert(T, target(z), closed)

        log_fn = None
    else:
        def log_fn(x):
            return -invert(T, target(x), closed)

        def fn(x):
            return np.exp(log_fn(x))

    return Transform(kind=kind, family=f"solved:{T.family}",
                     params={"n": n, "definition": Definition(definition).value},
                     fn=fn, domain=_solve_domain(T), log_fn=log_fn)


def _solve_domain(T: Transform):
    from .transforms import _DEFAULT_DOMAINS

    return _DEFAULT_DOMAINS[T.kind]


def _no_inverse(T):
    raise ValueError(f"{T.family} has no registered inverse for complex targets")


def is_degenerate(g: Transform) -> bool:
    return g.family in ("degenerate_laplace", "degenerate_chf", "identity_pgf",
                        "power_normalizer_mellin", "exp_survival") and all(
        math.isclose(v, 1.0) for v in g.params.values())

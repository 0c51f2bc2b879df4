"""Truncated formal power series in binary64.

Everything here works on coefficient arrays ``c[0..K]`` and truncates
products back to order ``K``.  Values are immutable once built.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

DEFAULT_ORDER = 64

# coefficient comparison tolerances
ABS_TOL = 1e-12
REL_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class TruncatedSeries:
    """Power series sum_k coeffs[k] z^k known up to z^order."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        if c.ndim != 1 or c.size == 0:
            raise ValueError("coefficients must be a non-empty 1-d sequence")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def order(self) -> int:
        return self.coeffs.size - 1

    def __len__(self):
        return self.coeffs.size

    def __getitem__(self, k):
        return self.coeffs[k]

    def __iter__(self):
        return iter(self.coeffs)

    def __repr__(self):
        head = ", ".join(f"{c:.6g}" for c in self.coeffs[:6])
        more = ", ..." if self.order > 5 else ""
        return f"TruncatedSeries([{head}{more}], order={self.order})"

    def __call__(self, z):
        """Evaluate the truncated polynomial (Horner)."""
        z = np.asarray(z)
        out = np.zeros_like(z, dtype=np.result_type(z, float))
        for c in self.coeffs[::-1]:
            out = out * z + c
        return out

    # arithmetic -------------------------------------------------------
    def _coerce(self, other) -> "TruncatedSeries":
        if isinstance(other, TruncatedSeries):
            _check_orders(self, other)
            return other
        return constant(float(other), self.order)

    def __add__(self, other):
        return TruncatedSeries(self.coeffs + self._coerce(other).coeffs)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(-self.coeffs)

    def __sub__(self, other):
        return TruncatedSeries(self.coeffs - self._coerce(other).coeffs)

    def __rsub__(self, other):
        return TruncatedSeries(self._coerce(other).coeffs - self.coeffs)

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            return ts_mul(self, other)
        return TruncatedSeries(self.coeffs * float(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, TruncatedSeries):
            return ts_mul(self, ts_reciprocal(other))
        return TruncatedSeries(self.coeffs / float(other))

    def __pow__(self, r):
        if float(r).is_integer() and r >= 0:
            return ts_pow_int(self, int(r))
        return ts_pow_real(self, r)

    def allclose(self, other, abs_tol: float = ABS_TOL, rel_tol: float = REL_TOL) -> bool:
        other = self._coerce(other)
        diff = np.abs(self.coeffs - other.coeffs)
        scale = np.maximum(np.abs(self.coeffs), np.abs(other.coeffs))
        return bool(np.all((diff <= abs_tol) | (diff <= rel_tol * scale)))


Scalar = Union[int, float]


def _check_orders(x: TruncatedSeries, y: TruncatedSeries):
    if x.order != y.order:
        raise ValueError(f"order mismatch: {x.order} != {y.order}")


def constant(c: float, K: int = DEFAULT_ORDER) -> TruncatedSeries:
    out = np.zeros(K + 1)
    out[0] = c
    return TruncatedSeries(out)


def variable(K: int = DEFAULT_ORDER) -> TruncatedSeries:
    """The series ``z``."""
    out = np.zeros(K + 1)
    if K >= 1:
        out[1] = 1.0
    return TruncatedSeries(out)


def monomial(m: int, K: int = DEFAULT_ORDER) -> TruncatedSeries:
    out = np.zeros(K + 1)
    if m <= K:
        out[m] = 1.0
    return TruncatedSeries(out)


def binomial_coefficients(gamma: float, K: int) -> np.ndarray:
    """Generalized binomial coefficients C(gamma, k) for k = 0..K.

    Uses C(g, k) = C(g, k-1) (g - k + 1) / k, which keeps exact zeros for
    integer ``gamma`` and avoids gamma-function cancellation.
    """
    c = np.empty(K + 1)
    c[0] = 1.0
    for k in range(1, K + 1):
        c[k] = c[k - 1] * (gamma - k + 1) / k
    return c


def _binomial_in(gamma: float, x: float, K: int) -> TruncatedSeries:
    # (1 - x z)^gamma, no range restriction on x
    return TruncatedSeries(binomial_coefficients(gamma, K) * (-x) ** np.arange(K + 1))


def binomial_series(gamma: float, a: float, K: int = DEFAULT_ORDER) -> TruncatedSeries:
    """Taylor coefficients of (1 - a z)^gamma about z = 0."""
    if K < 0:
        raise ValueError("K must be >= 0")
    if not math.isfinite(gamma):
        raise ValueError(f"gamma must be finite, got {gamma}")
    if not (0.0 <= a <= 1.0):
        raise ValueError(f"a must lie in [0, 1], got {a}")
    return _binomial_in(gamma, a, K)


def ts_mul(x: TruncatedSeries, y: TruncatedSeries) -> TruncatedSeries:
    """Cauchy product truncated to the common order."""
    _check_orders(x, y)
    return TruncatedSeries(np.convolve(x.coeffs, y.coeffs)[: x.order + 1])


def ts_reciprocal(x: TruncatedSeries) -> TruncatedSeries:
    c = x.coeffs
    if c[0] == 0:
        raise ValueError("reciprocal needs a nonzero constant term")
    K = x.order
    r = np.zeros(K + 1)
    r[0] = 1.0 / c[0]
    for k in range(1, K + 1):
        r[k] = -np.dot(c[1 : k + 1], r[k - 1 :: -1]) / c[0]
    return TruncatedSeries(r)


def ts_derivative(x: TruncatedSeries) -> TruncatedSeries:
    """d/dz, padded with a trailing zero so the order is kept."""
    c = x.coeffs
    d = np.zeros_like(c)
    d[:-1] = c[1:] * np.arange(1, c.size)
    return TruncatedSeries(d)


def ts_integral(x: TruncatedSeries, c0: float = 0.0) -> TruncatedSeries:
    c = x.coeffs
    out = np.empty_like(c)
    out[0] = c0
    out[1:] = c[:-1] / np.arange(1, c.size)
    return TruncatedSeries(out)


def ts_log(x: TruncatedSeries) -> TruncatedSeries:
    if x.coeffs[0] <= 0:
        raise ValueError("log needs a positive constant term")
    q = ts_derivative(x) / x
    return ts_integral(q, math.log(x.coeffs[0]))


def ts_exp(x: TruncatedSeries) -> TruncatedSeries:
    c = x.coeffs
    K = x.order
    dc = c[1:] * np.arange(1, K + 1)
    r = np.empty(K + 1)
    r[0] = math.exp(c[0])
    # r' = x' r
    for k in range(1, K + 1):
        r[k] = np.dot(dc[:k], r[k - 1 :: -1]) / k
    return TruncatedSeries(r)


def ts_pow_real(x: TruncatedSeries, r: float) -> TruncatedSeries:
    """x(z)^r via exp(r log x(z)); needs x[0] > 0."""
    if x.coeffs[0] <= 0:
        raise ValueError(f"real power needs a positive constant term, got {x.coeffs[0]}")
    return ts_exp(ts_log(x) * float(r))


def ts_pow_int(x: TruncatedSeries, m: int) -> TruncatedSeries:
    if m < 0:
        return ts_pow_int(ts_reciprocal(x), -m)
    out = constant(1.0, x.order)
    base = x
    while m:
        if m & 1:
            out = ts_mul(out, base)
        m >>= 1
        if m:
            base = ts_mul(base, base)
    return out


def ts_shift_down(x: TruncatedSeries, m: int, K: int | None = None) -> TruncatedSeries:
    """Divide by z^m; the first m coefficients must vanish."""
    c = x.coeffs
    if np.any(c[:m] != 0):
        raise ValueError(f"series is not divisible by z^{m}")
    K = x.order - m if K is None else K
    out = np.zeros(K + 1)
    tail = c[m : m + K + 1]
    out[: tail.size] = tail
    return TruncatedSeries(out)


def ts_substitute_power(x: TruncatedSeries, m: int, K: int) -> TruncatedSeries:
    """x(z^m) truncated to order K."""
    out = np.zeros(K + 1)
    idx = np.arange(0, K + 1, m)
    n = min(idx.size, x.order + 1)
    out[idx[:n]] = x.coeffs[:n]
    return TruncatedSeries(out)


OuterAt = Callable[[float, int], TruncatedSeries]


def ts_compose(outer, inner: TruncatedSeries) -> TruncatedSeries:
    """Taylor coefficients of outer(inner(z)) to inner's order.

    ``outer`` is either a TruncatedSeries (then ``inner[0]`` must be 0) or a
    callable ``(c, K) -> TruncatedSeries`` giving the Taylor coefficients of
    the outer function about ``c``; the latter handles a nonzero constant
    term by re-expansion.
    """
    K = inner.order
    c0 = float(inner.coeffs[0])
    if isinstance(outer, TruncatedSeries):
        if c0 != 0.0:
            raise ValueError(
                f"inner series has constant term {c0}; "
                "pass the outer function's re-expansion to compose"
            )
        _check_orders(outer, inner)
        base = outer
    else:
        base = outer(c0, K)
    h = inner - c0
    # Horner in the shifted inner series
    acc = constant(base.coeffs[-1], K)
    for c in base.coeffs[-2::-1]:
        acc = ts_mul(acc, h) + c
    return acc


def negative_coefficients(x: TruncatedSeries, tol: float = ABS_TOL) -> np.ndarray:
    """Indices of coefficients below -tol * max(1, max|c|)."""
    scale = max(1.0, float(np.max(np.abs(x.coeffs))))
    return np.flatnonzero(x.coeffs < -tol * scale)


def is_nonnegative(x: TruncatedSeries, tol: float = ABS_TOL) -> bool:
    return negative_coefficients(x, tol).size == 0

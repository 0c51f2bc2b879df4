import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from casualstab import series as ts
from casualstab.series import TruncatedSeries

K = 12
small = st.floats(-0.5, 0.5, allow_nan=False)


def coeffs(first=st.floats(0.5, 2.0)):
    return st.tuples(first, st.lists(small, min_size=K, max_size=K)).map(
        lambda t: TruncatedSeries([t[0], *t[1]]))


def test_binomial_series_known_values():
    s = ts.binomial_series(0.5, 0.75, 2)
    np.testing.assert_allclose(s.coeffs, [1.0, -0.375, -0.0703125], rtol=0, atol=1e-15)


def test_binomial_coefficients_integer_exponent_terminates():
    c = ts.binomial_coefficients(3.0, 6)
    assert c.tolist() == [1.0, 3.0, 3.0, 1.0, 0.0, 0.0, 0.0]


@pytest.mark.parametrize("gamma,a", [(float("nan"), 0.5), (0.5, 1.5), (0.5, -0.1)])
def test_binomial_series_rejects_bad_input(gamma, a):
    with pytest.raises(ValueError):
        ts.binomial_series(gamma, a, 4)


def test_reciprocal_of_one_minus_z_is_geometric():
    r = ts.ts_reciprocal(TruncatedSeries([1.0, -1.0] + [0.0] * 8))
    np.testing.assert_array_equal(r.coeffs, np.ones(10))


def test_reciprocal_needs_constant_term():
    with pytest.raises(ValueError):
        ts.ts_reciprocal(ts.variable(5))


def test_order_mismatch():
    with pytest.raises(ValueError, match="order mismatch"):
        ts.variable(3) + ts.variable(4)


def test_exp_and_log_of_known_series():
    e = ts.ts_exp(ts.variable(10))
    np.testing.assert_allclose(e.coeffs, [1 / math.factorial(k) for k in range(11)], rtol=1e-15)
    lg = ts.ts_log(ts.constant(1.0, 10) - ts.variable(10))
    np.testing.assert_allclose(lg.coeffs[1:], [-1.0 / k for k in range(1, 11)], rtol=1e-15)


def test_log_and_real_power_need_positive_constant():
    with pytest.raises(ValueError):
        ts.ts_log(ts.variable(4) - 1.0)
    with pytest.raises(ValueError):
        ts.ts_pow_real(TruncatedSeries([0.0, 1.0, 0.0]), 0.5)


def test_first_passage_coefficients_are_catalan():
    from casualstab.transforms import _first_passage_series

    c = _first_passage_series(9).coeffs
    catalan = [1, 1, 2, 5, 14]
    for k, ck in enumerate(catalan):
        assert c[2 * k + 1] == pytest.approx(ck / 2 ** (2 * k + 1), abs=1e-16)
        assert c[2 * k] == 0.0


def test_compose_requires_zero_constant_or_reexpansion():
    inner = TruncatedSeries([0.3, 0.5, 0.0, 0.0])
    with pytest.raises(ValueError, match="constant term"):
        ts.ts_compose(ts.ts_exp(ts.variable(3)), inner)


def test_compose_with_reexpansion_matches_pointwise():
    # outer exp, re-expanded about c: e^c e^{z - c}
    def exp_at(c, k):
        return ts.ts_exp(ts.variable(k)) * math.exp(c)

    inner = TruncatedSeries([0.3, 0.5, 0.1] + [0.0] * 30)
    out = ts.ts_compose(exp_at, inner)
    for z in (0.1, 0.4):
        assert out(z) == pytest.approx(math.exp(0.3 + 0.5 * z + 0.1 * z * z), abs=1e-14)


def test_shift_and_substitute():
    x = TruncatedSeries([0.0, 0.0, 1.0, 2.0, 3.0])
    np.testing.assert_array_equal(ts.ts_shift_down(x, 2).coeffs, [1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        ts.ts_shift_down(x, 3)
    np.testing.assert_array_equal(ts.ts_substitute_power(TruncatedSeries([1.0, 2.0, 3.0]), 2, 4).coeffs,
                                  [1.0, 0.0, 2.0, 0.0, 3.0])


def test_negative_coefficients_scale_aware():
    s = TruncatedSeries([1.0, -1e-13, 0.5, -0.1])
    assert ts.negative_coefficients(s).tolist() == [3]
    assert not ts.is_nonnegative(s)
    assert ts.is_nonnegative(TruncatedSeries([0.0, 1.0]))


def test_coefficients_are_read_only():
    s = ts.variable(3)
    with pytest.raises(ValueError):
        s.coeffs[0] = 5.0


@given(coeffs(), coeffs())
def test_product_commutes(x, y):
    assert (x * y).allclose(y * x)


@given(coeffs(), coeffs(), coeffs())
@settings(max_examples=50)
def test_product_associates(x, y, z):
    assert ((x * y) * z).allclose(x * (y * z), abs_tol=1e-10)


@given(coeffs())
def test_exp_inverts_log(x):
    assert ts.ts_exp(ts.ts_log(x)).allclose(x, abs_tol=1e-9, rel_tol=1e-9)


@given(coeffs())
def test_reciprocal_is_inverse(x):
    assert (x * ts.ts_reciprocal(x)).allclose(ts.constant(1.0, K), abs_tol=1e-8)


@given(coeffs(), st.floats(-2.0, 2.0), st.floats(-2.0, 2.0))
@settings(max_examples=50)
def test_real_powers_compose(x, a, b):
    lhs = ts.ts_pow_real(ts.ts_pow_real(x, a), b)
    rhs = ts.ts_pow_real(x, a * b)
    assert lhs.allclose(rhs, abs_tol=1e-7, rel_tol=1e-7)


@given(coeffs(), st.integers(0, 5))
def test_integer_power_matches_repeated_product(x, m):
    direct = ts.constant(1.0, K)
    for _ in range(m):
        direct = direct * x
    assert (x**m).allclose(direct, abs_tol=1e-9)


@given(st.lists(small, min_size=K + 1, max_size=K + 1), st.floats(-0.3, 0.3))
def test_polynomial_evaluation_is_horner(c, z):
    s = TruncatedSeries(c)
    assert s(z) == pytest.approx(sum(ck * z**k for k, ck in enumerate(c)), abs=1e-14)


@given(coeffs(), st.lists(small, min_size=K, max_size=K))
@settings(max_examples=50)
def test_compose_agrees_with_evaluation(outer, tail):
    inner = TruncatedSeries([0.0, *tail]) * 0.5
    comp = ts.ts_compose(outer, inner)
    z = 0.01
    assert comp(z) == pytest.approx(outer(inner(z)), abs=1e-12)

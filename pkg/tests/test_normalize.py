import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from casualstab.normalize import (Definition, composed_series, invert, is_degenerate, normalize,
                                  normalize_min, normalize_pgf, solve_normalizer, target_power)
from casualstab.transforms import DomainError, Kind, degenerate, make_transform
from casualstab.verify import standard_grid


def real(v):
    return np.real(np.asarray(v, dtype=complex))


@pytest.mark.parametrize("T", [
    make_transform("gamma_laplace", b=1.0, gamma=2.0),
    make_transform("geometric_pgf", p=0.3),
    make_transform("laplace_chf", a=1.0),
    make_transform("lognormal_mellin", b=0.5),
    make_transform("pareto_survival", alpha=1.5),
], ids=lambda T: T.family)
def test_degenerate_normalizer_is_identity(T):
    g = degenerate(T.kind)
    assert is_degenerate(g)
    x = standard_grid(T)
    np.testing.assert_allclose(normalize(T, g)(x), T(x), rtol=1e-13, atol=1e-15)


@given(st.floats(0.1, 5.0), st.floats(0.1, 5.0), st.integers(1, 12))
def test_gamma_cs_identity(b, gamma, n):
    L = make_transform("gamma_laplace", b=b, gamma=gamma)
    g = make_transform("gamma_normalizer", b=b, n=n)
    s = np.logspace(-2, 1.3, 15)
    lhs = real(normalize(L, g)(s))
    # independent closed form: (1 + b s)^(-gamma/n)
    np.testing.assert_allclose(lhs, (1 + b * s) ** (-gamma / n), rtol=1e-12)


def test_chf_two_sided_substitution():
    f = make_transform("laplace_chf", a=1.0)
    g = make_transform("laplace_chf_normalizer", a=1.0, n=3)
    t = np.linspace(-5, 5, 21)
    np.testing.assert_allclose(real(normalize(f, g)(t)) ** 3, 1 / (1 + t * t), rtol=1e-12)


def test_mellin_strip_violation_is_reported():
    M = make_transform("double_pareto_mellin", a=1.0)
    N = make_transform("power_normalizer_mellin", c=4.0)
    with pytest.raises(DomainError):
        normalize(M, N)(np.array([0.5]))


def test_kind_mismatch():
    with pytest.raises(ValueError, match="kind mismatch"):
        normalize(make_transform("gamma_laplace", b=1, gamma=1), degenerate(Kind.PGF))
    with pytest.raises(ValueError):
        normalize_pgf(make_transform("geometric_pgf", p=0.5), degenerate(Kind.LAPLACE))


def test_min_normalization_rejects_improper_survival():
    bad = make_transform("exp_survival", rate=1.0)
    bad = type(bad)(**{**bad.__dict__, "fn": lambda x: 2.0 + 0 * np.asarray(x)})
    with pytest.raises(DomainError):
        normalize_min(make_transform("pareto_survival", alpha=1.0), bad)(np.array([1.0]))


def test_pgf_composition_series_matches_pointwise():
    P = make_transform("geometric_pgf", p=0.5)
    Q = make_transform("geometric_normalizer", p=0.5, n=3)
    s = composed_series(P, Q, 200)
    z = np.linspace(0.1, 0.9, 9)
    np.testing.assert_allclose(s(z), real(normalize_pgf(P, Q)(z)), atol=1e-12)


def test_composition_without_reexpansion_raises():
    P = make_transform("chebyshev_pgf", M=1)
    Q = make_transform("geometric_normalizer", p=0.5, n=2)
    with pytest.raises(ValueError, match="re-expansion"):
        composed_series(P, Q, 10)


def test_target_power():
    assert target_power(Definition.CS, 4) == 0.25
    assert target_power(Definition.PURSUIT, 4) == 4
    with pytest.raises(ValueError):
        target_power(Definition.NU, 2)


@pytest.mark.parametrize("closed", [True, False])
def test_solver_recovers_printed_gamma_normalizer(closed):
    L = make_transform("gamma_laplace", b=1.0, gamma=2.0)
    s = standard_grid(L)
    for n in (2, 5):
        g = solve_normalizer(L, Definition.CS, n, closed=closed)
        ref = make_transform("gamma_normalizer", b=1.0, n=n)
        np.testing.assert_allclose(real(g(s)), real(ref(s)), atol=1e-10, rtol=0)


@pytest.mark.parametrize("closed", [True, False])
def test_solver_recovers_geometric_normalizer(closed):
    P = make_transform("geometric_pgf", p=0.5)
    z = standard_grid(P)
    g = solve_normalizer(P, Definition.CS, 3, closed=closed)
    ref = make_transform("geometric_normalizer", p=0.5, n=3)
    np.testing.assert_allclose(real(g(z)), real(ref(z)), atol=1e-10, rtol=0)


def test_cs_and_pursuit_solutions_are_dual():
    F = make_transform("pareto_survival", alpha=1.0)
    x = standard_grid(F)
    a = solve_normalizer(F, Definition.PURSUIT, 3)
    b = solve_normalizer(F, Definition.CS, 1 / 3)
    np.testing.assert_allclose(real(a(x)), real(b(x)), atol=1e-12)


def test_invert_errors():
    with pytest.raises(ValueError, match="range"):
        invert(make_transform("geometric_pgf", p=0.5), [0.1], closed=False)
    with pytest.raises(ValueError):
        invert(make_transform("gamma_laplace", b=1, gamma=1), [1.5], closed=False)
    with pytest.raises(ValueError):
        solve_normalizer(make_transform("laplace_chf", a=1.0), Definition.CS, 2)
    with pytest.raises(ValueError, match="one-sided"):
        solve_normalizer(make_transform("lognormal_mellin", b=1.0), Definition.CS, 2)


@given(st.floats(0.05, 0.95), st.floats(0.05, 0.95))
@settings(max_examples=50)
def test_numeric_inverse_of_pgf(p, v):
    P = make_transform("geometric_pgf", p=p)
    p0 = 1 - p
    v = p0 + v * (1 - p0)
    y = invert(P, [v], closed=False)
    assert real(P(y))[0] == pytest.approx(v, abs=1e-11)


def test_solved_mellin_pursuit_normalizer_matches_closed_form():
    M = make_transform("pareto_mellin", alpha=1.0)
    N = solve_normalizer(M, Definition.PURSUIT, 2)
    u = np.array([-2.0, -0.5, 0.3])
    ref = make_transform("pareto_pursuit_normalizer", alpha=1.0, n=2)
    np.testing.assert_allclose(real(N(u)), real(ref(u)), rtol=1e-12)


def test_min_normalizer_composition_law():
    # Weibull with exp normalizer of rate n^(-1/alpha): F~ = F^(1/n)
    F = make_transform("weibull_survival", alpha=2.0, beta=1.0)
    x = np.linspace(0.1, 3, 12)
    for n in (2, 7):
        G = make_transform("exp_survival", rate=n ** -0.5)
        np.testing.assert_allclose(real(normalize(F, G)(x)) ** n, np.exp(-x * x), rtol=1e-13)
    assert math.isclose(real(normalize(F, degenerate(Kind.SURVIVAL))(1.0)), math.exp(-1))

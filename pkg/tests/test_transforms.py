import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from casualstab.transforms import (FAMILIES, DomainError, Kind, degenerate, empirical_transform,
                                   make_distribution, make_transform)
from casualstab.normalize import one_sided_parts


def real(v):
    return np.real_if_close(np.asarray(v)).astype(float)


@pytest.mark.parametrize("family,params,x,expected", [
    ("gamma_laplace", {"b": 1.0, "gamma": 2.0}, 1.0, 0.25),
    ("positive_stable_laplace", {"alpha": 0.5}, 4.0, math.exp(-2.0)),
    ("laplace_chf", {"a": 1.0}, 1.0, 0.5),
    ("geometric_pgf", {"p": 0.5}, 0.5, 2.0 / 3.0),
    ("sibuya_pgf", {"gamma": 0.5}, 0.75, 0.5),
    ("chebyshev_pgf", {"M": 1}, 0.6, 1.0 / 3.0),
    ("lognormal_mellin", {"b": 1.0}, 1.0, math.exp(0.5)),
    ("pareto_mellin", {"alpha": 2.0}, 1.0, 2.0),
    ("log_levy_mellin", {}, -2.0, math.exp(-2.0)),
    ("double_pareto_mellin", {"a": 2.0}, 1.0, 4.0 / 3.0),
    ("pareto_survival", {"alpha": 1.0}, 4.0, 0.25),
    ("pareto_survival", {"alpha": 1.0}, 0.5, 1.0),
    ("weibull_survival", {"alpha": 2.0, "beta": 1.0}, 1.0, math.exp(-1.0)),
    ("gompertz_survival", {"xi": 1.0, "lam": 1.0}, 1.0, math.exp(1.0 - math.e)),
])
def test_closed_form_values(family, params, x, expected):
    assert real(make_transform(family, params)(x)) == pytest.approx(expected, rel=1e-14)


def test_every_stochastic_family_is_one_at_its_unit_point():
    unit = {Kind.LAPLACE: 0.0, Kind.CHF: 0.0, Kind.MELLIN: 0.0, Kind.PGF: 1.0, Kind.SURVIVAL: 0.0}
    samples = {"alpha": 0.5, "lam": 1.0, "h": 1.0, "b": 1.0, "gamma": 0.5, "a": 0.5, "p": 0.5,
               "n": 2, "M": 2, "c": 1.0, "xi": 1.0, "beta": 1.0, "rate": 1.0, "convention": 1}
    for name, fam in FAMILIES.items():
        params = {k: samples[k] for k in fam.params}
        if "printed" in name:
            params["a"] = params["alpha"] = 2.0
            params = {k: v for k, v in params.items() if k in fam.params}
        T = make_transform(name, params)
        if not T.stochastic:
            continue
        assert abs(complex(T(unit[T.kind])) - 1.0) < 1e-14, name


def test_printed_double_pareto_is_not_a_probability_law():
    T = make_transform("double_pareto_printed_mellin", a=2.0)
    assert not T.stochastic
    assert real(T(0.0)) == pytest.approx(0.75)


@pytest.mark.parametrize("family,params", [
    ("gamma_laplace", {"b": 0.0, "gamma": 1.0}),
    ("geometric_pgf", {"p": 1.0}),
    ("positive_stable_laplace", {"alpha": 1.5}),
    ("tempered_stable_laplace", {"alpha": 0.4, "lam": 1.0, "h": 1.0}),
    ("chebyshev_pgf", {"M": 1.5}),
])
def test_parameter_validation(family, params):
    with pytest.raises(ValueError):
        make_transform(family, params)


def test_unknown_family_and_missing_parameter():
    with pytest.raises(KeyError):
        make_transform("nope")
    with pytest.raises(ValueError):
        make_transform("gamma_laplace", b=1.0)


def test_domain_checks():
    with pytest.raises(DomainError):
        make_transform("gamma_laplace", b=1.0, gamma=1.0)(-1.0)
    with pytest.raises(DomainError):
        make_transform("geometric_pgf", p=0.5)(1.5)
    with pytest.raises(DomainError):
        make_transform("laplace_chf", a=1.0)(1j)
    with pytest.raises(DomainError):
        make_transform("pareto_mellin", alpha=1.0)(1.0)


def test_degenerate_per_kind():
    assert real(degenerate(Kind.LAPLACE)(2.0)) == pytest.approx(math.exp(-2))
    assert real(degenerate(Kind.PGF)(0.3)) == pytest.approx(0.3)
    assert complex(degenerate(Kind.CHF)(1.0)) == pytest.approx(complex(math.cos(1), math.sin(1)))


@given(st.floats(-8, 8))
def test_chf_parts_sum_to_transform(t):
    for T in (make_transform("laplace_chf", a=1.3), make_transform("gamma_chf", b=0.7, gamma=1.5)):
        plus, minus = one_sided_parts(T)
        total = complex(plus(t)) + (complex(minus(t)) if minus is not None else 0.0)
        assert total == pytest.approx(complex(T(t)), abs=1e-12)


@given(st.floats(-1.9, 1.9))
def test_mellin_parts_sum_to_transform(u):
    for T in (make_transform("lognormal_mellin", b=0.8), make_transform("double_pareto_mellin", a=2.0)):
        plus, minus = one_sided_parts(T)
        assert complex(plus(u)) + complex(minus(u)) == pytest.approx(complex(T(u)), rel=1e-12)


@pytest.mark.parametrize("family,params,lo,hi", [
    ("gamma_laplace", {"b": 1.5, "gamma": 0.7}, 0.0, 20.0),
    ("positive_stable_laplace", {"alpha": 0.5}, 0.0, 20.0),
    ("tempered_stable_laplace", {"alpha": 0.5, "lam": 1.0, "h": 1.0}, 0.0, 20.0),
    ("geometric_pgf", {"p": 0.4}, 0.0, 1.0),
    ("tilted_stable_pgf", {"lam": 1.0, "a": 0.75, "gamma": 0.5}, 0.0, 1.0),
    ("sibuya_pgf", {"gamma": 0.3}, 0.0, 0.99),
    ("chebyshev_pgf", {"M": 2}, 0.01, 0.99),
    ("weibull_survival", {"alpha": 2.0, "beta": 1.0}, 0.0, 3.0),
    ("gompertz_survival", {"xi": 1.0, "lam": 1.0}, 0.0, 2.0),
    ("pareto_survival", {"alpha": 1.0}, 1.0, 50.0),
])
def test_registered_inverse_round_trips(family, params, lo, hi):
    T = make_transform(family, params)
    x = np.linspace(lo, hi, 41)
    np.testing.assert_allclose(T.inverse(real(T(x))), x, rtol=1e-8, atol=1e-8)


@pytest.mark.parametrize("family,params", [
    ("geometric_pgf", {"p": 0.4}),
    ("geometric_normalizer", {"p": 0.4, "n": 3}),
    ("tilted_stable_pgf", {"lam": 1.0, "a": 0.75, "gamma": 0.5}),
    ("tilted_stable_normalizer", {"a": 0.75, "gamma": 0.5, "n": 2}),
    ("sibuya_pgf", {"gamma": 0.5}),
    ("sibuya_pursuit_normalizer", {"gamma": 0.5, "n": 2}),
    ("chebyshev_pgf", {"M": 3}),
    ("chebyshev_normalizer", {"n": 3}),
])
def test_pgf_series_sums_to_function(family, params):
    T = make_transform(family, params)
    s = T.series(200)
    for z in (0.1, 0.4, 0.7):
        assert s(z) == pytest.approx(real(T(z)), abs=1e-12)


@pytest.mark.parametrize("family,params", [
    ("geometric_pgf", {"p": 0.4}),
    ("tilted_stable_pgf", {"lam": 1.0, "a": 0.75, "gamma": 0.5}),
    ("sibuya_pgf", {"gamma": 0.5}),
])
def test_taylor_reexpansion(family, params):
    T = make_transform(family, params)
    c = 0.3
    s = T.taylor_at(c, 80)
    for z in (0.2, 0.5):
        assert s(z - c) == pytest.approx(real(T(z)), abs=1e-13)


def test_sibuya_complement_is_accurate_near_zero():
    T = make_transform("sibuya_pgf", gamma=0.25)
    y = 1e-14
    assert T.complement(y) == pytest.approx(y**0.25, rel=1e-15)


def test_distribution_spec():
    d = make_distribution("pareto", alpha=2.0)
    assert set(d.transforms) == {Kind.MELLIN, Kind.SURVIVAL}
    assert d.support == (1, math.inf)
    with pytest.raises(KeyError):
        d.transform(Kind.PGF)
    with pytest.raises(ValueError, match="unknown parameters"):
        make_distribution("pareto", alpha=2.0, beta=1.0)
    with pytest.raises(KeyError):
        make_distribution("cauchy")


def test_empirical_transform_values(rng):
    x = rng.geometric(0.5, 20000) - 1
    E = empirical_transform(Kind.PGF, x, [0.5])
    assert abs(E.values[0] - 2 / 3) < 4 * E.stderr[0]
    assert complex(E(0.5)) == E.values[0]
    with pytest.raises(DomainError):
        E(0.25)
    S = empirical_transform(Kind.SURVIVAL, rng.exponential(size=5000), [1.0])
    assert abs(S.values[0].real - math.exp(-1)) < 4 * S.stderr[0]


def test_empirical_transform_rejects_bad_input(rng):
    with pytest.raises(ValueError, match="empty"):
        empirical_transform(Kind.PGF, [], [0.5])
    with pytest.raises(ValueError, match="at least"):
        empirical_transform(Kind.PGF, [1, 2, 3], [0.5])
    with pytest.raises(ValueError, match="integer"):
        empirical_transform(Kind.PGF, rng.random(2000), [0.5])
    with pytest.raises(ValueError):
        empirical_transform(Kind.MELLIN, rng.random(2000), [0.5])

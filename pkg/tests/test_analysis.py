import numpy as np
import pytest
from hypothesis import given, strategies as st

from scramblab.analysis import (
    FitError,
    NoCrossing,
    fit_exponential_decay,
    fit_exponential_window,
    fit_log_scaling,
    fit_power_law,
    scaling_study,
    scrambling_time,
)
from scramblab.dynamics import EvolutionEngine


def synthetic():
    t = np.linspace(0, 10, 101)
    return t, np.minimum(1.0, np.exp(t - 5))


def test_scrambling_time_closed_form():
    st_ = scrambling_time(synthetic(), 1 / np.e)
    assert st_.t_star == pytest.approx(4.0, abs=1e-12)
    assert st_.criterion == 1 / np.e


def test_scrambling_time_interpolates():
    assert scrambling_time(([0.0, 1.0, 2.0], [0.0, 0.2, 0.6]), 0.4).t_star == pytest.approx(1.5)


def test_no_crossing():
    with pytest.raises(NoCrossing):
        scrambling_time((np.linspace(0, 1, 5), np.zeros(5)), 0.1)


@given(st.floats(0.01, 0.99), st.floats(0.01, 0.99))
def test_scrambling_time_monotone_in_threshold(a, b):
    lo, hi = sorted((a, b))
    t = np.linspace(0, 10, 57)
    c = np.minimum(1.0, np.exp(t - 5)) + 0.05 * np.sin(3 * t) ** 2
    assert scrambling_time((t, c), lo).t_star <= scrambling_time((t, c), hi).t_star


def test_exponential_window_exact():
    t = np.linspace(0, 1, 10)
    rate, r2 = fit_exponential_window((t, 0.01 * np.exp(2 * t)), (0, 1))
    assert rate == pytest.approx(2.0, abs=1e-9)
    assert r2 == pytest.approx(1.0)


def test_exponential_window_flat():
    t = np.linspace(0, 1, 10)
    rate, _ = fit_exponential_window((t, np.full(10, 0.3)), (0, 1))
    assert rate == pytest.approx(0.0, abs=1e-12)


def test_exponential_window_errors():
    t = np.linspace(0, 1, 10)
    with pytest.raises(FitError):
        fit_exponential_window((t, t), (0, 1))
    with pytest.raises(FitError):
        fit_exponential_window((t, np.exp(t)), (0.0, 0.15))


def test_exponential_vs_power_discrimination():
    t = np.linspace(0.5, 3, 20)
    _, r2_exp = fit_exponential_window((t, np.exp(1.5 * t)), (0.5, 3))
    _, r2_pow = fit_exponential_window((t, t**3), (0.5, 3))
    assert r2_pow < r2_exp


def test_power_law_exact():
    ns = np.arange(8, 18)
    fit = fit_power_law(zip(ns, ns**-3.0))
    assert fit.exponent_alpha == pytest.approx(3.0, abs=1e-9)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
    assert fit.prefactor == pytest.approx(1.0)


def test_power_law_constant():
    fit = fit_power_law([(8, 0.2), (9, 0.2), (10, 0.2)])
    assert fit.exponent_alpha == pytest.approx(0.0, abs=1e-12)


@given(st.floats(1e-6, 1e6), st.floats(0.5, 5.0))
def test_power_law_scale_covariance(scale, alpha):
    ns = np.arange(9, 16)
    pts = [(n, n**-alpha * (1 + 0.05 * np.sin(n))) for n in ns]
    a = fit_power_law(pts)
    b = fit_power_law([(n, scale * c) for n, c in pts])
    assert b.exponent_alpha == pytest.approx(a.exponent_alpha, abs=1e-12 * max(1, alpha) * 10)
    assert b.prefactor == pytest.approx(scale * a.prefactor, rel=1e-9)


def test_power_law_errors():
    with pytest.raises(FitError):
        fit_power_law([(8, 1.0), (9, 1.0)])
    with pytest.raises(FitError):
        fit_power_law([(8, 1.0), (9, 0.0), (10, 1.0)])
    with pytest.raises(FitError):
        fit_power_law([(8, 1.0), (8, 2.0), (8, 3.0)])


def test_power_law_beats_exponential_on_power_data():
    pts = [(n, n**-3.0 * (1 + 0.01 * (-1) ** n)) for n in range(9, 16)]
    assert fit_power_law(pts).r_squared > fit_exponential_decay(pts).r_squared - 1e-3


def test_log_scaling_fit():
    ns = np.arange(9, 18)
    fit = fit_log_scaling(ns, 2.0 * np.log(ns) + 1.0)
    assert fit.slope == pytest.approx(2.0) and fit.r_squared == pytest.approx(1.0)


def test_scaling_study_small_chain():
    res = scaling_study([6, 7, 8], 0.9, 0.84, 1.0, np.linspace(0, 2, 21), 0.1, 2, 0,
                        EvolutionEngine("eigen"))
    assert res.fixed_time == res.t_stars[8]
    assert set(res.fixed_values) == {6, 7, 8}
    assert res.power_law is not None and res.log_fit is not None
    # evaluating N=8 at its own t* reproduces the threshold up to interpolation error
    assert res.fixed_values[8] == pytest.approx(0.1, abs=0.01)


def test_scaling_study_per_n_mode():
    res = scaling_study([6, 7, 8], 0.9, 0.84, 1.0, np.linspace(0, 2, 21), 0.1, 1, 0,
                        EvolutionEngine("eigen"), mode="per-n")
    assert res.fixed_time is None
    for n in (6, 7, 8):
        assert res.fixed_values[n] == pytest.approx(0.1, abs=0.01)
    with pytest.raises(ValueError):
        scaling_study([6, 7], 0.9, 0.84, 1.0, [0.0, 1.0], mode="fixed")

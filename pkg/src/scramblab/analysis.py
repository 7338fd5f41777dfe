"""Scrambling time, growth-window and power-law fits, and the N-scaling study."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

log = logging.getLogger(__name__)


class FitError(ValueError):
    pass


class NoCrossing(ArithmeticError):
    """The curve never reaches the requested threshold."""


@dataclass(frozen=True)
class LinearFit:
    slope: float
    intercept: float
    r_squared: float


def linear_fit(x, y) -> LinearFit:
    """Ordinary least squares y = slope*x + intercept.

    r^2 is 1 when y is constant (the fit is exact).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xm, ym = x.mean(), y.mean()
    sxx = np.sum((x - xm) ** 2)
    if sxx == 0:
        raise FitError("all abscissae are equal")
    slope = np.sum((x - xm) * (y - ym)) / sxx
    intercept = ym - slope * xm
    ss_tot = np.sum((y - ym) ** 2)
    ss_res = np.sum((y - (slope * x + intercept)) ** 2)
    r2 = 1.0 if ss_tot == 0 else max(0.0, 1.0 - ss_res / ss_tot)
    return LinearFit(float(slope), float(intercept), float(r2))


@dataclass(frozen=True)
class PowerLawFit:
    exponent_alpha: float
    prefactor: float
    r_squared: float
    points: tuple = field(repr=False)


@dataclass(frozen=True)
class ScramblingTime:
    t_star: float
    criterion: float
    curve_ref: str = ""


def _curve_arrays(curve):
    if hasattr(curve, "times"):
        return np.asarray(curve.times, float), np.asarray(curve.values, float)
    t, c = curve
    return np.asarray(t, float), np.asarray(c, float)


def scrambling_time(curve, threshold: float = 0.1) -> ScramblingTime:
    """First upward crossing of ``threshold``, linearly interpolated.

    ``curve`` is an OTOCCurve or a ``(times, values)`` pair.
    """
    times, values = _curve_arrays(curve)
    hit = np.flatnonzero(values >= threshold)
    if hit.size == 0:
        raise NoCrossing(f"curve never reaches {threshold} (max {values.max():.4g})")
    k = hit[0]
    if k == 0:
        t_star = times[0]
    else:
        c0, c1 = values[k - 1], values[k]
        t_star = times[k - 1] + (threshold - c0) * (times[k] - times[k - 1]) / (c1 - c0)
    ref = ""
    if hasattr(curve, "n_sites"):
        ref = f"N={curve.n_sites},r={curve.r},seed={curve.seed}"
    return ScramblingTime(float(t_star), threshold, ref)


def fit_exponential_window(curve, window: tuple[float, float]) -> tuple[float, float]:
    """Least squares of ln C against t over ``window``; returns (rate, r^2)."""
    times, values = _curve_arrays(curve)
    lo, hi = window
    sel = (times >= lo) & (times <= hi)
    if sel.sum() < 3:
        raise FitError(f"fewer than 3 points in window {window}")
    if np.any(values[sel] <= 0):
        raise FitError("non-positive values in the fit window")
    fit = linear_fit(times[sel], np.log(values[sel]))
    return fit.slope, fit.r_squared


def fit_power_law(points) -> PowerLawFit:
    """Fit C = A * N^(-alpha) by least squares on (ln N, ln C)."""
    pts = tuple((float(n), float(c)) for n, c in points)
    if len(pts) < 3:
        raise FitError("need at least 3 points")
    N = np.array([p[0] for p in pts])
    C = np.array([p[1] for p in pts])
    if np.any(C <= 0) or np.any(N <= 0):
        raise FitError("power-law fit needs positive N and C")
    if len(np.unique(N)) < 2:
        raise FitError("degenerate N values")
    fit = linear_fit(np.log(N), np.log(C))
    return PowerLawFit(-fit.slope, float(np.exp(fit.intercept)), fit.r_squared, pts)


def fit_exponential_decay(points) -> LinearFit:
    """Competing model C = A * exp(-N/xi): least squares on (N, ln C)."""
    N = np.array([float(n) for n, _ in points])
    C = np.array([float(c) for _, c in points])
    if np.any(C <= 0):
        raise FitError("exponential fit needs positive C")
    return linear_fit(N, np.log(C))


def fit_log_scaling(ns, t_stars) -> LinearFit:
    """t* = a * ln N + b."""
    return linear_fit(np.log(np.asarray(ns, float)), np.asarray(t_stars, float))


@dataclass(frozen=True, eq=False)
class ScalingResult:
    ns: list
    curves: dict
    t_stars: dict
    fixed_time: float | None
    fixed_values: dict
    fixed_stderr: dict
    power_law: PowerLawFit | None
    exponential: LinearFit | None
    log_fit: LinearFit | None
    threshold: float
    mode: str


def scaling_study(
    ns,
    lam: float,
    f: float,
    g: float,
    times,
    threshold: float = 0.1,
    n_samples=None,
    seed: int = 0,
    engine=None,
    mode: str = "largest",
) -> ScalingResult:
    """OTOC C(t, r=N) over a range of N, t*(N) and the N-scaling fits.

    ``mode="largest"`` evaluates every N at the t* of the largest N;
    ``mode="per-n"`` evaluates each N at its own t*.
    """
    from .dynamics import otoc_average, otoc_curve
    from .hamiltonian import ModelParams, build_full_hamiltonian

    if mode not in ("largest", "per-n"):
        raise ValueError(f"unknown fixed-time mode {mode!r}")
    ns = sorted(int(n) for n in ns)
    curves, t_stars, hams = {}, {}, {}
    for n in ns:
        params = ModelParams(lam, f, g, n)
        hams[n] = build_full_hamiltonian(params)
        curves[n] = otoc_curve(params, n, times, n_samples, seed, engine, H=hams[n])
        try:
            t_stars[n] = scrambling_time(curves[n], threshold).t_star
        except NoCrossing:
            t_stars[n] = float("nan")
        log.info("scaling N=%d t*=%.4g", n, t_stars[n])

    fixed_time = t_stars[ns[-1]] if mode == "largest" else None
    values, errs = {}, {}
    for n in ns:
        t = fixed_time if mode == "largest" else t_stars[n]
        if not np.isfinite(t):
            values[n], errs[n] = float("nan"), float("nan")
            continue
        params = ModelParams(lam, f, g, n)
        values[n], errs[n] = otoc_average(params, n, t, n_samples, seed, engine, H=hams[n])

    pts = [(n, values[n]) for n in ns if np.isfinite(values[n]) and values[n] > 0]
    power = expo = None
    if len(pts) >= 3:
        try:
            power = fit_power_law(pts)
            expo = fit_exponential_decay(pts)
        except FitError as exc:
            log.warning("N-scaling fit failed: %s", exc)
    good = [n for n in ns if np.isfinite(t_stars[n])]
    log_fit = None
    if len(good) >= 3:
        log_fit = fit_log_scaling(good, [t_stars[n] for n in good])
    return ScalingResult(
        ns, curves, t_stars, fixed_time, values, errs, power, expo, log_fit, threshold, mode
    )

"""Deterministic continuous-time approximation of the citation process.

Stochasticity is dropped and the copying kernel collapsed to q e^(-gamma u)
with q = q_prefactor * P0(K).  The rate then integrates in closed form,

    k(t) = eta [ m(t) + q int_0^t m(u) e^{-(gamma - q)(t - u)} du ],

and the cumulative count obeys the self-consistent balance

    K (1 - q(K) / gamma) = eta * int_0^t m(u) du.

The left side peaks at some K; fitness above that peak value admits no
stationary solution and the paper is a runaway (K diverges, and the
citation lifetime tau0 diverges where q(K) reaches gamma).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .curves import default_m_dir
from .kernels import p0_of_K
from .params import ModelParams

SATURATING = "saturating"
RUNAWAY = "runaway"


@dataclass(frozen=True)
class ContinuumResult:
    K: float                 # cumulative count (inf when runaway)
    regime: str              # SATURATING or RUNAWAY
    eta_crit: float
    K_at_max: float          # maximizer of K (1 - q(K)/gamma)
    growth_exponent: float | None = None   # q - gamma on the runaway branch


def q_of_K(K, params: ModelParams):
    """Continuum copying strength q(K) = q_prefactor * P0(K)."""
    return params.q_prefactor * p0_of_K(K, params.p0_base, params.p0_slope)


def _interp_m(m_dir) -> tuple[np.ndarray, np.ndarray]:
    """Piecewise-linear continuous extension of the yearly table, anchored
    at m(0) = 0; knots at integer years."""
    m_dir = np.asarray(m_dir, dtype=float)
    knots = np.arange(0.0, len(m_dir) + 1.0)
    vals = np.concatenate([[0.0], m_dir])
    return knots, vals


def _segment_integral(a, b, ya, yb, c, t):
    """Exact integral of (linear y(u)) * exp(-c (t - u)) over [a, b]."""
    slope = (yb - ya) / (b - a)
    if abs(c) < 1e-12:
        # degenerate exponent: plain trapezoid is exact for linear y
        return 0.5 * (ya + yb) * (b - a)
    ea, eb = math.exp(-c * (t - a)), math.exp(-c * (t - b))
    # int y(u) e^{-c(t-u)} du with y linear: by parts
    term = (yb * eb - ya * ea) / c - slope * (eb - ea) / (c * c)
    return term


def closed_form_rate(eta: float, q: float, gamma: float, m_dir, t: float) -> float:
    """Continuum rate eta [ m(t) + q int_0^t m e^{-(gamma-q)(t-u)} du ].

    The tabulated m_dir is interpolated piecewise-linearly (m(0) = 0) and
    each linear segment is integrated in closed form, so the quadrature is
    exact for the interpolant, including the gamma = q limit.
    """
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    if q < 0:
        raise ValueError(f"q must be non-negative, got {q}")
    knots, vals = _interp_m(m_dir)
    if t < 0 or t > knots[-1]:
        raise ValueError(f"t={t} outside the tabulated range [0, {knots[-1]}]")
    m_t = float(np.interp(t, knots, vals))
    if q == 0.0:
        return eta * m_t
    c = gamma - q
    integral = 0.0
    for j in range(len(knots) - 1):
        a, b = knots[j], knots[j + 1]
        if a >= t:
            break
        hi = min(b, t)
        ya = vals[j]
        yb = vals[j] + (vals[j + 1] - vals[j]) * (hi - a) / (b - a)
        integral += _segment_integral(a, hi, ya, yb, c, t)
    return eta * (m_t + q * integral)


def cumulative_direct(m_dir, t: float) -> float:
    """int_0^t of the piecewise-linear interpolant of m_dir."""
    knots, vals = _interp_m(m_dir)
    if t < 0 or t > knots[-1]:
        raise ValueError(f"t={t} outside the tabulated range [0, {knots[-1]}]")
    total = 0.0
    for j in range(len(knots) - 1):
        a, b = knots[j], knots[j + 1]
        if a >= t:
            break
        hi = min(b, t)
        yb = vals[j] + (vals[j + 1] - vals[j]) * (hi - a) / (b - a)
        total += 0.5 * (vals[j] + yb) * (hi - a)
    return total


def eta_critical(params: ModelParams) -> tuple[float, float]:
    """Maximize g(K) = K (1 - q(K)/gamma) over K >= 1.

    Returns (eta_crit, K_at_max).  With q_prefactor = 0 the balance is
    linear and unbounded: eta_crit is infinite (no runaway possible).
    """
    if params.q_prefactor == 0.0:
        return math.inf, math.inf

    def neg_g(logK):
        K = 10.0 ** logK
        return -K * (1.0 - q_of_K(K, params) / params.gamma)

    res = minimize_scalar(neg_g, bounds=(0.0, 8.0), method="bounded",
                          options={"xatol": 1e-12})
    K_at_max = 10.0 ** res.x
    return float(-res.fun), float(K_at_max)


def runaway_crossing(params: ModelParams) -> float:
    """K* where q(K) reaches gamma: the divergence point of the citation
    lifetime.  Infinite when copying can never reach gamma."""
    q1 = q_of_K(1.0, params)
    if q1 >= params.gamma:
        return 1.0
    if params.q_prefactor == 0.0 or params.p0_slope == 0.0:
        return math.inf
    exponent = (params.gamma / q1 - 1.0) / params.p0_slope
    return 10.0 ** exponent


def cumulative_approx(eta: float, params: ModelParams, t: float,
                      m_dir=None) -> ContinuumResult:
    """Solve K (1 - q(K)/gamma) = eta int_0^t m_dir on the subcritical
    branch (bracketed root below the maximizer); report a runaway when the
    right-hand side exceeds the maximum of the left-hand side."""
    if eta < 0:
        raise ValueError(f"eta must be non-negative, got {eta}")
    m = default_m_dir(params.horizon) if m_dir is None else np.asarray(m_dir, dtype=float)
    target = eta * cumulative_direct(m, t)
    eta_crit, K_at_max = eta_critical(params)

    def g(K):
        return K * (1.0 - q_of_K(K, params) / params.gamma)

    if target == 0.0:
        return ContinuumResult(K=0.0, regime=SATURATING, eta_crit=eta_crit,
                               K_at_max=K_at_max)
    if math.isfinite(eta_crit) and target >= eta_crit:
        # cascade exponent q - gamma, quoted one decade of K past the
        # q = gamma crossing (q gains p0_slope * q(1) per decade of K)
        gx = q_of_K(10.0 * runaway_crossing(params), params) - params.gamma
        return ContinuumResult(K=math.inf, regime=RUNAWAY, eta_crit=eta_crit,
                               K_at_max=K_at_max, growth_exponent=float(gx))
    hi = K_at_max if math.isfinite(K_at_max) else max(10.0 * target, 10.0)
    while not math.isfinite(K_at_max) and g(hi) < target:
        hi *= 10.0
    K = brentq(lambda x: g(x) - target, 0.0, hi, xtol=1e-12, rtol=8.9e-16)
    return ContinuumResult(K=float(K), regime=SATURATING, eta_crit=eta_crit,
                           K_at_max=K_at_max)


def lifetime_tau0(K: float, params: ModelParams, m_dir_first_year: float = 0.23) -> float:
    """Citation lifetime tau0(K) = (gamma - q(0)) / (gamma - q(K)) / m_dir(1).

    Strictly increasing in K; infinite at and beyond the q(K) = gamma
    crossing (runaway papers live forever).
    """
    if K < 0:
        raise ValueError(f"K must be non-negative, got {K}")
    if not m_dir_first_year > 0:
        raise ValueError("first-year direct rate must be positive")
    q0 = q_of_K(0.0, params)
    qK = q_of_K(K, params)
    if q0 >= params.gamma:
        return math.inf
    if qK >= params.gamma:
        return math.inf
    return (params.gamma - q0) / (params.gamma - qK) / m_dir_first_year


def lifetime_sweep(params: ModelParams, K_values, m_dir_first_year: float = 0.23):
    """tau0 over a K grid (embarrassingly parallel, done serially)."""
    return np.array([lifetime_tau0(K, params, m_dir_first_year) for K in K_values])


def save_lifetime_csv(K_values, tau0_values, path: str | Path,
                      provenance: dict | None = None) -> None:
    with open(path, "w", newline="") as fh:
        for key, val in (provenance or {}).items():
            fh.write(f"# {key}={val}\n")
        writer = csv.writer(fh)
        writer.writerow(["K", "tau0"])
        for K, tau in zip(K_values, tau0_values):
            writer.writerow([K, "inf" if math.isinf(tau) else repr(float(tau))])


def save_regime_csv(rows, path: str | Path, provenance: dict | None = None) -> None:
    """rows: iterable of (eta, ContinuumResult)."""
    with open(path, "w", newline="") as fh:
        for key, val in (provenance or {}).items():
            fh.write(f"# {key}={val}\n")
        writer = csv.writer(fh)
        writer.writerow(["eta", "K_final", "regime"])
        for eta, res in rows:
            k_cell = "inf" if math.isinf(res.K) else repr(float(res.K))
            writer.writerow([repr(float(eta)), k_cell, res.regime])

"""Empirical yearly curves: direct-citation rate, second-generation
multiplier, and reference age distributions.

All tables are indexed by integer years t = 1..horizon, t = 1 being the
publication year; array position 0 holds t = 1.

The measured second-generation table F(1..5) = 0.089, 0.138, 0.046, 0.012,
0.0035 is shipped verbatim and extrapolated exponentially at rate
gamma - beta beyond its last entry.  The remaining curves are parametric
surrogates (the source tables exist only as plots) constructed so that

  * m_dir(1) = 0.23, sum_{t=1..30} m_dir(t) = 1, peak at t = 2, and a
    power-law t^-1.5 tail (direct citations do not saturate in 30 years);
  * r_dir peaks at t = 2 with the same t^-1.5 tail, and feeding it through
    the reference copying recursion with the measured exponential kernel
    0.34 exp(-1.2 (tau-1)) R0 yields a self-consistent total r(t) with
    sum r = 1 and a 65% indirect share.

Every curve can be replaced from a CSV with header ``t,m_dir,F,r_dir,r``
(missing F cells beyond the measured rows are permitted).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.optimize import brentq

from .params import ModelParams

# measured second-generation citing papers per first-generation citer,
# folded with the kernel decay: F(dt) = N_II(dt) exp(-(gamma-beta) dt)
F_MEASURED = (0.089, 0.138, 0.046, 0.012, 0.0035)

# P0(K=1) and decay rate of the measured reference-copying kernel
REF_KERNEL_P0 = 0.34
REF_KERNEL_GAMMA = 1.2

DEFAULT_R0 = 20.5
DEFAULT_HORIZON = 30

# surrogate shape constants: early hump time scale, power-tail shift and
# exponent (tail ~ t^(1-_TAIL_EXP) = t^-1.5), target indirect share
_HUMP_TAU = 1.5
_TAIL_SHIFT = 3.0
_TAIL_EXP = 2.5
_INDIRECT_SHARE = 0.65
_MDIR_FIRST_YEAR = 0.23

MDIR_NORMALIZATION_TOL = 1e-9


@dataclass(frozen=True)
class EmpiricalCurves:
    m_dir: np.ndarray   # yearly direct-citation rate, sum over horizon = 1
    F: np.ndarray       # second-generation multiplier; NaN where unmeasured
    r_dir: np.ndarray   # reduced direct-reference age distribution
    r: np.ndarray       # reduced total reference age distribution
    R0: float           # mean reference-list length

    def __post_init__(self):
        n = len(self.m_dir)
        for name in ("F", "r_dir", "r"):
            if len(getattr(self, name)) != n:
                raise ValueError(f"curve {name} has length {len(getattr(self, name))}, expected {n}")
        if not self.R0 > 0:
            raise ValueError(f"R0 must be positive, got {self.R0}")
        for name in ("m_dir", "r_dir", "r"):
            arr = getattr(self, name)
            if np.any(arr < 0):
                raise ValueError(f"curve {name} has negative entries")
        if np.any(self.F[np.isfinite(self.F)] < 0):
            raise ValueError("curve F has negative entries")
        if abs(self.m_dir.sum() - 1.0) > MDIR_NORMALIZATION_TOL:
            raise ValueError(f"m_dir must sum to 1, got {self.m_dir.sum()!r}")
        if np.any(self.r_dir > self.r + 1e-12):
            raise ValueError("r_dir exceeds r somewhere")

    @property
    def horizon(self) -> int:
        return len(self.m_dir)


def extend_F(curves: EmpiricalCurves, params: ModelParams, t: int) -> float:
    """F(t) from the table for measured years, exponential extrapolation
    at rate gamma - beta beyond the last measured entry."""
    if t < 1:
        raise ValueError(f"t must be >= 1, got {t}")
    finite = np.flatnonzero(np.isfinite(curves.F))
    if finite.size == 0:
        raise ValueError("curve F has no measured entries")
    last = finite[-1] + 1            # last measured year
    if t <= last:
        val = curves.F[t - 1]
        if not math.isfinite(val):
            raise ValueError(f"F({t}) is missing inside the measured range")
        return float(val)
    return float(curves.F[last - 1] * math.exp(-params.kernel_decay * (t - last)))


def extended_F(curves: EmpiricalCurves, params: ModelParams, horizon: int) -> np.ndarray:
    """Materialize F(1..horizon) with the extrapolation rule applied."""
    return np.array([extend_F(curves, params, t) for t in range(1, horizon + 1)])


def reference_kernel(horizon: int, r0: float = DEFAULT_R0,
                     p0: float = REF_KERNEL_P0, gamma: float = REF_KERNEL_GAMMA) -> np.ndarray:
    """Measured reference-copying kernel T(tau) = R0 p0 exp(-gamma (tau-1))."""
    tau = np.arange(1, horizon + 1)
    return r0 * p0 * np.exp(-gamma * (tau - 1.0))


def _copy_recursion(r_dir: np.ndarray, T: np.ndarray) -> np.ndarray:
    """Forward solve r(t) = r_dir(t) + sum_{tau<t} r(t-tau) T(tau) r(tau), r(0)=0."""
    n = len(r_dir)
    r = np.zeros(n + 1)
    for t in range(1, n + 1):
        acc = 0.0
        for tau in range(1, t):
            acc += r[t - tau] * T[tau - 1] * r[tau]
        r[t] = r_dir[t - 1] + acc
    return r[1:]


def _hump_tail(t: np.ndarray, weight: float) -> np.ndarray:
    return weight * t * np.exp(-t / _HUMP_TAU) + t * (t + _TAIL_SHIFT) ** (-_TAIL_EXP)


def default_m_dir(horizon: int = DEFAULT_HORIZON) -> np.ndarray:
    """Direct-citation rate surrogate: m(1) = 0.23, sum = 1, peak at t = 2,
    power-law tail (no saturation within the horizon)."""
    t = np.arange(1.0, horizon + 1.0)

    def curve(weight):
        base = _hump_tail(t, weight)
        return _MDIR_FIRST_YEAR / base[0] * base

    weight = brentq(lambda w: curve(w).sum() - 1.0, 1e-9, 100.0, xtol=1e-15)
    m = curve(weight)
    # renormalize the residual rounding so the sum-to-one invariant is exact
    return m / m.sum()


def default_reference_curves(horizon: int = DEFAULT_HORIZON,
                             r0: float = DEFAULT_R0) -> tuple[np.ndarray, np.ndarray]:
    """Direct and total reference age distributions.

    The direct curve has the same hump-plus-tail form as m_dir; its hump
    weight and overall scale are solved so that the copying recursion with
    the measured kernel gives sum r = 1 and the measured 65/35
    indirect/direct split.
    """
    t = np.arange(1.0, horizon + 1.0)
    T = reference_kernel(horizon, r0)

    def solve_scale(weight):
        shape = _hump_tail(t, weight)
        scale = brentq(lambda c: _copy_recursion(c * shape, T).sum() - 1.0,
                       1e-9, 10.0, xtol=1e-15)
        r_dir = scale * shape
        return r_dir, _copy_recursion(r_dir, T)

    def share_gap(weight):
        r_dir, r = solve_scale(weight)
        return (r - r_dir).sum() / r.sum() - _INDIRECT_SHARE

    weight = brentq(share_gap, 1e-3, 1.0, xtol=1e-13)
    r_dir, r = solve_scale(weight)
    return r_dir, r


def default_curves(horizon: int = DEFAULT_HORIZON, r0: float = DEFAULT_R0) -> EmpiricalCurves:
    """The shipped Physics-1984 default table."""
    if horizon < len(F_MEASURED):
        raise ValueError(f"horizon must cover the measured F table, got {horizon}")
    F = np.full(horizon, np.nan)
    F[: len(F_MEASURED)] = F_MEASURED
    r_dir, r = default_reference_curves(horizon, r0)
    return EmpiricalCurves(m_dir=default_m_dir(horizon), F=F, r_dir=r_dir, r=r, R0=r0)


def load_curves(path: str | Path, r0: float = DEFAULT_R0) -> EmpiricalCurves:
    """Read a curves CSV with header ``t,m_dir,F,r_dir,r``.

    Rows must cover t = 1..horizon contiguously.  Empty F cells are stored
    as NaN and later filled by the extrapolation rule.  Comment lines
    starting with '#' (provenance) are skipped.
    """
    rows = {}
    with open(path) as fh:
        reader = csv.reader(line for line in fh if not line.startswith("#"))
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["t", "m_dir", "F", "r_dir", "r"]:
            raise ValueError(f"{path}: expected header 't,m_dir,F,r_dir,r', got {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 5:
                raise ValueError(f"{path}:{lineno}: expected 5 columns, got {len(row)}")
            try:
                t = int(row[0])
                m, rd, rr = float(row[1]), float(row[3]), float(row[4])
                F = float(row[2]) if row[2].strip() else math.nan
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: malformed row {row!r}") from exc
            if t in rows:
                raise ValueError(f"{path}:{lineno}: duplicate year {t}")
            rows[t] = (m, F, rd, rr)
    horizon = max(rows) if rows else 0
    if sorted(rows) != list(range(1, horizon + 1)):
        raise ValueError(f"{path}: years must cover 1..{horizon} contiguously")
    data = np.array([rows[t] for t in range(1, horizon + 1)])
    return EmpiricalCurves(m_dir=data[:, 0], F=data[:, 1], r_dir=data[:, 2], r=data[:, 3], R0=r0)


def save_curves(curves: EmpiricalCurves, path: str | Path, provenance: dict | None = None) -> None:
    with open(path, "w", newline="") as fh:
        for key, val in (provenance or {}).items():
            fh.write(f"# {key}={val}\n")
        writer = csv.writer(fh)
        writer.writerow(["t", "m_dir", "F", "r_dir", "r"])
        for i in range(curves.horizon):
            f_cell = "" if not math.isfinite(curves.F[i]) else repr(float(curves.F[i]))
            writer.writerow([i + 1, repr(float(curves.m_dir[i])), f_cell,
                             repr(float(curves.r_dir[i])), repr(float(curves.r[i]))])

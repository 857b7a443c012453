"""Nonlinear kernel factors and fitness sampling.

The indirect-citation probability grows logarithmically (base 10) with the
cumulative citation count K and linearly with the multiplicity s; both
factors are rate multipliers, not bounded probabilities, and are never
clamped from above.
"""

from __future__ import annotations

import numpy as np

from .curves import EmpiricalCurves, extend_F
from .params import ModelParams

P0_BASE = 0.34       # P0(K) = P0_BASE (1 + P0_SLOPE log10 K)
P0_SLOPE = 0.82
P0_S_BASE = 0.44     # P0(s) = P0_S_BASE (1 + P0_S_SLOPE (s - 1))
P0_S_SLOPE = 3.0


def p0_of_K(K, base: float = P0_BASE, slope: float = P0_SLOPE):
    """Indirect-citation probability factor for a paper with K cumulative
    citations.  K below 1 is clamped to 1 inside the logarithm (log of zero
    is undefined and the indirect term multiplies an empty history anyway).
    Accepts scalars or arrays.
    """
    K = np.maximum(np.asarray(K, dtype=float), 1.0)
    out = base * (1.0 + slope * np.log10(K))
    return float(out) if out.ndim == 0 else out


def p0_of_s(s: float, base: float = P0_S_BASE, slope: float = P0_S_SLOPE) -> float:
    """Indirect-citation probability factor for multiplicity s >= 1."""
    if s < 1:
        raise ValueError(f"multiplicity below one path is impossible, got s={s}")
    return base * (1.0 + slope * (s - 1.0))


def kernel_value(dt: int, K, params: ModelParams, curves: EmpiricalCurves) -> float:
    """Latent-rate contribution per citing event of age dt: P0(K) F(dt).

    dt <= 0 is rejected: a citation cannot trigger same-year or earlier
    indirect citations in the discrete model.
    """
    if dt < 1:
        raise ValueError(f"kernel lag must be >= 1 year, got {dt}")
    return p0_of_K(K, params.p0_base, params.p0_slope) * extend_F(curves, params, dt)


def sample_fitness(rng: np.random.Generator, mu: float, sigma: float, size=None):
    """Draw paper fitness eta from the lognormal density
    (1 / (sqrt(2 pi) sigma eta)) exp(-(ln eta - mu)^2 / (2 sigma^2)).

    Deterministic given the generator state.  sigma = 0 degenerates to
    exp(mu) exactly.
    """
    if sigma < 0:
        raise ValueError(f"sigma must be non-negative, got {sigma}")
    return rng.lognormal(mu, sigma, size)

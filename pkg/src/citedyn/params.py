"""Calibrated model parameters.

The shipped defaults are the Physics-1984 calibration: obsolescence
gamma = 1.2/yr, reference-list growth beta = 0.02/yr, publication growth
alpha chosen so that alpha + beta = 0.046/yr (the convention used by the
quantitative fits), lognormal fitness (mu = 1.62, sigma = 1.1), indirect
citation kernel P0(K) = 0.34 (1 + 0.82 log10 K), and mean multiplicity
s_bar = 1.2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from pathlib import Path


@dataclass(frozen=True)
class ModelParams:
    gamma: float = 1.2           # obsolescence rate of the copying kernel [1/yr]
    beta: float = 0.02           # reference-list growth rate [1/yr]
    alpha: float = 0.026         # publication growth rate [1/yr]; alpha+beta=0.046
    p0_base: float = 0.34        # P0(K=1)
    p0_slope: float = 0.82       # per decade of K
    q_prefactor: float = 1.09    # continuum copying strength q = q_prefactor * P0(K)
    fitness_mu: float = 1.62     # lognormal location (natural log)
    fitness_sigma: float = 1.1   # lognormal scale
    s_bar: float = 1.2           # mean multiplicity of second-generation citers
    horizon: int = 30            # calibration span [yr]

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if not self.horizon >= 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")
        if not self.p0_base > 0:
            raise ValueError(f"p0_base must be positive, got {self.p0_base}")
        if not self.fitness_sigma > 0:
            raise ValueError(f"fitness_sigma must be positive, got {self.fitness_sigma}")
        # the indirect-citation kernel F(dt) ~ exp(-(gamma-beta) dt) must decay
        if not self.gamma > self.beta:
            raise ValueError(f"gamma must exceed beta, got gamma={self.gamma} beta={self.beta}")

    @property
    def growth_exponent(self) -> float:
        """Combined growth rate alpha + beta entering the duality."""
        return self.alpha + self.beta

    @property
    def kernel_decay(self) -> float:
        """Decay rate gamma - beta of the indirect-citation kernel."""
        return self.gamma - self.beta

    @property
    def fitness_mean(self) -> float:
        """Mean of the lognormal fitness distribution."""
        return math.exp(self.fitness_mu + 0.5 * self.fitness_sigma ** 2)

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


_FIELD_TYPES = {f.name: f.type for f in fields(ModelParams)}


def load_params(path: str | Path) -> ModelParams:
    """Read a flat key=value config file into ModelParams.

    Unknown keys are rejected; '#' starts a comment.
    """
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
            key, _, val = line.partition("=")
            key, val = key.strip(), val.strip()
            if key not in _FIELD_TYPES:
                raise ValueError(f"{path}:{lineno}: unknown parameter {key!r}")
            try:
                values[key] = int(val) if key == "horizon" else float(val)
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: bad value for {key}: {val!r}") from exc
    return ModelParams(**values)


def save_params(params: ModelParams, path: str | Path) -> None:
    with open(path, "w") as fh:
        for key, val in params.as_dict().items():
            fh.write(f"{key}={val!r}\n")


def with_overrides(params: ModelParams, **overrides) -> ModelParams:
    """Return a copy with the given fields replaced (validation re-runs)."""
    return replace(params, **overrides)

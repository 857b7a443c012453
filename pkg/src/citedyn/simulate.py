"""Stochastic citation trajectories: the self-exciting Poisson process.

A paper with fitness eta accrues annual citation counts k(t) drawn from a
Poisson distribution whose latent rate mixes a direct channel and a
copying cascade over its own citation history:

    lambda(t) = eta m_dir(t) + P0(K(t-1)) sum_{tau=1}^{t-1} F(t-tau) k(tau),

where K(t-1) is the cumulative count through the end of the previous year.
The process is non-Markovian (the kernel looks back over the whole
history) and nonlinear (P0 grows with K).

Reproducibility: every paper gets its own counter-derived RNG stream,
spawned from (master_seed, paper_index).  Trajectories are therefore
independent of chunking, worker count, and execution order.  Two kernel
backends exist, a compiled Cython core and a pure-Python reference; both
consume the same streams with identical floating-point ordering and yield
bit-identical trajectories.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .curves import EmpiricalCurves, extended_F
from .kernels import p0_of_K, sample_fitness
from .params import ModelParams

try:  # compiled hot loop; optional
    from . import _core as _compiled
except ImportError:
    _compiled = None

_FORCE_PYTHON_ENV = "CITEDYN_FORCE_PYTHON"


def backend() -> str:
    """Name of the trajectory kernel selected at import/run time."""
    if _compiled is None or os.environ.get(_FORCE_PYTHON_ENV):
        return "python"
    return "cython"


@dataclass(frozen=True)
class PaperTrajectory:
    eta: float
    seed: int                 # stream identifier (spawn index or user seed)
    k: np.ndarray             # annual counts, years 1..horizon
    K: np.ndarray = field(init=False)  # running cumulative counts

    def __post_init__(self):
        if np.any(self.k < 0):
            raise ValueError("annual counts must be non-negative")
        object.__setattr__(self, "K", np.cumsum(self.k))

    @property
    def horizon(self) -> int:
        return len(self.k)


@dataclass(frozen=True)
class EnsembleSummary:
    snapshot_years: list[int]
    histograms: dict[int, np.ndarray]   # year -> counts of papers with K >= k
    uncited_fraction: np.ndarray        # by year 1..horizon
    mean_rate: np.ndarray               # mean annual citations by year
    n_papers: int
    master_seed: int
    params: dict

    def __post_init__(self):
        for year, hist in self.histograms.items():
            if hist[0] != self.n_papers:
                raise ValueError(f"histogram mass at year {year} does not equal ensemble size")
        if np.any(np.diff(self.uncited_fraction) > 0):
            raise ValueError("uncited fraction must be non-increasing")


@dataclass(frozen=True)
class EnsembleResult:
    """Trajectory store: one row per paper, plus the aggregate summary."""
    etas: np.ndarray
    seeds: np.ndarray       # per-paper stream identifiers (spawn indices)
    k: np.ndarray           # (n_papers, horizon) annual counts
    summary: EnsembleSummary

    @property
    def K(self) -> np.ndarray:
        return np.cumsum(self.k, axis=1)

    @property
    def n_papers(self) -> int:
        return self.k.shape[0]

    @property
    def horizon(self) -> int:
        return self.k.shape[1]


def latent_rate(k_history, t: int, eta: float, params: ModelParams,
                curves: EmpiricalCurves) -> float:
    """Latent citation rate at year t given annual counts k(1..t-1)."""
    horizon = curves.horizon
    if not 1 <= t <= horizon:
        raise ValueError(f"year {t} outside horizon 1..{horizon}")
    k_history = np.asarray(k_history)
    if len(k_history) < t - 1:
        raise ValueError(f"history must cover years 1..{t - 1}")
    lam = eta * float(curves.m_dir[t - 1])
    if t > 1:
        K = int(np.sum(k_history[: t - 1]))
        F = extended_F(curves, params, t - 1)
        acc = 0.0
        for tau in range(1, t):
            acc += F[t - tau - 1] * float(k_history[tau - 1])
        lam += p0_of_K(K, params.p0_base, params.p0_slope) * acc
    return lam


AR2_LAG1 = 0.09
AR2_LAG2 = 0.19


def ar2_rate(k_history, t: int, eta: float, params: ModelParams,
             curves: EmpiricalCurves) -> float:
    """Second-order autoregressive reduction of the latent rate:
    eta m_dir(t) + [1 + 0.82 log10 K(t-1)] [0.09 k(t-1) + 0.19 k(t-2)].
    Counts at undefined years are zero; K below 1 is clamped in the log.
    """
    if not 1 <= t <= curves.horizon:
        raise ValueError(f"year {t} outside horizon 1..{curves.horizon}")
    k_history = np.asarray(k_history)
    K = int(np.sum(k_history[: t - 1]))
    k1 = float(k_history[t - 2]) if t >= 2 else 0.0
    k2 = float(k_history[t - 3]) if t >= 3 else 0.0
    factor = 1.0 + params.p0_slope * math.log10(max(K, 1))
    return eta * float(curves.m_dir[t - 1]) + factor * (AR2_LAG1 * k1 + AR2_LAG2 * k2)


def poisson_step(rate: float, rng: np.random.Generator) -> int:
    """One Poisson draw at the given rate; deterministic given stream state."""
    if rate < 0:
        raise ValueError(f"rate must be non-negative, got {rate}")
    return int(rng.poisson(rate))


def _paper_stream(master_seed: int, index: int) -> np.random.Generator:
    """Child stream for one paper, derived by counter (order-independent)."""
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=(index,))
    return np.random.Generator(np.random.PCG64(ss))


def _py_trajectories(etas, generators, m_list, f_list, p0_base, p0_slope, out_k):
    """Pure-Python reference kernel; float ops ordered as in the compiled core."""
    horizon = out_k.shape[1]
    log10 = math.log10
    for i in range(len(etas)):
        eta = float(etas[i])
        poisson = generators[i].poisson
        kvals = [0] * horizon
        K = 0
        for t in range(1, horizon + 1):
            lam = eta * m_list[t - 1]
            if K > 0:
                acc = 0.0
                for tau in range(1, t):
                    kv = kvals[tau - 1]
                    if kv:
                        acc = acc + f_list[t - tau - 1] * kv
                if acc > 0.0:
                    p0 = p0_base * (1.0 + p0_slope * log10(float(K)))
                    lam = lam + p0 * acc
            kt = int(poisson(lam))
            kvals[t - 1] = kt
            K += kt
        out_k[i] = kvals


def _run_chunk(lo, hi, master_seed, params, m_arr, f_arr, use_compiled,
               etas_out, k_out):
    """Simulate papers [lo, hi); writes into preallocated slices by index."""
    generators = [_paper_stream(master_seed, i) for i in range(lo, hi)]
    for j, gen in enumerate(generators):
        etas_out[lo + j] = sample_fitness(gen, params.fitness_mu, params.fitness_sigma)
    if use_compiled:
        _compiled.simulate_trajectories(
            etas_out[lo:hi], [g.bit_generator for g in generators],
            m_arr, f_arr, params.p0_base, params.p0_slope, k_out[lo:hi])
    else:
        _py_trajectories(etas_out[lo:hi], generators, m_arr.tolist(), f_arr.tolist(),
                         params.p0_base, params.p0_slope, k_out[lo:hi])


def simulate_paper(eta: float, params: ModelParams, curves: EmpiricalCurves,
                   seed: int, horizon: int | None = None) -> PaperTrajectory:
    """Simulate one paper with a fixed fitness and its own stream."""
    if not eta > 0:
        raise ValueError(f"fitness must be positive, got {eta}")
    horizon = params.horizon if horizon is None else horizon
    if horizon > curves.horizon:
        raise ValueError(f"horizon {horizon} exceeds tabulated curves ({curves.horizon})")
    gen = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    m_arr = np.ascontiguousarray(curves.m_dir[:horizon])
    f_arr = extended_F(curves, params, horizon)
    k = np.zeros((1, horizon), dtype=np.int64)
    etas = np.array([eta], dtype=float)
    if backend() == "cython":
        _compiled.simulate_trajectories(etas, [gen.bit_generator], m_arr, f_arr,
                                        params.p0_base, params.p0_slope, k)
    else:
        _py_trajectories(etas, [gen], m_arr.tolist(), f_arr.tolist(),
                         params.p0_base, params.p0_slope, k)
    return PaperTrajectory(eta=eta, seed=seed, k=k[0])


def summarize(k: np.ndarray, snapshot_years, master_seed: int,
              params_dict: dict) -> EnsembleSummary:
    """Aggregate a trajectory matrix; commutative in the paper order."""
    n, horizon = k.shape
    K = np.cumsum(k, axis=1)
    snapshot_years = sorted(int(y) for y in snapshot_years)
    for y in snapshot_years:
        if not 1 <= y <= horizon:
            raise ValueError(f"snapshot year {y} outside horizon 1..{horizon}")
    histograms = {}
    for y in snapshot_years:
        Ky = K[:, y - 1]
        counts = np.bincount(Ky, minlength=int(Ky.max()) + 2)
        histograms[y] = counts[::-1].cumsum()[::-1]   # papers with K >= k
    return EnsembleSummary(
        snapshot_years=snapshot_years,
        histograms=histograms,
        uncited_fraction=(K == 0).mean(axis=0),
        mean_rate=k.mean(axis=0),
        n_papers=n,
        master_seed=master_seed,
        params=params_dict,
    )


def simulate_ensemble(n_papers: int, params: ModelParams, curves: EmpiricalCurves,
                      master_seed: int, snapshot_years=None,
                      horizon: int | None = None, workers: int = 1) -> EnsembleResult:
    """Simulate an ensemble of independent papers.

    Fitness is drawn per paper from the lognormal as the first draw of the
    paper's own child stream.  The result is bit-identical for any worker
    count because streams are keyed by paper index and the merge is
    index-ordered.
    """
    if n_papers < 1:
        raise ValueError(f"need at least one paper, got {n_papers}")
    horizon = params.horizon if horizon is None else horizon
    if horizon > curves.horizon:
        raise ValueError(f"horizon {horizon} exceeds tabulated curves ({curves.horizon})")
    if snapshot_years is None:
        snapshot_years = [horizon]
    m_arr = np.ascontiguousarray(curves.m_dir[:horizon])
    f_arr = extended_F(curves, params, horizon)
    etas = np.zeros(n_papers)
    k = np.zeros((n_papers, horizon), dtype=np.int64)
    use_compiled = backend() == "cython"

    workers = max(1, int(workers))
    bounds = np.linspace(0, n_papers, workers + 1).astype(int)
    chunks = [(lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
    if len(chunks) == 1:
        _run_chunk(0, n_papers, master_seed, params, m_arr, f_arr,
                   use_compiled, etas, k)
    else:
        with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
            futures = [pool.submit(_run_chunk, lo, hi, master_seed, params, m_arr,
                                   f_arr, use_compiled, etas, k)
                       for lo, hi in chunks]
            for fut in futures:
                fut.result()

    summary = summarize(k, snapshot_years, master_seed, params.as_dict())
    return EnsembleResult(etas=etas, seeds=np.arange(n_papers, dtype=np.int64),
                          k=k, summary=summary)

"""Monte Carlo simulation of the urn models.

Random numbers come from numpy's Philox4x64 counter-based generator.
Trajectories are grouped in fixed blocks of ``BLOCK`` consecutive indices;
block ``b`` draws from the stream with key ``seed`` and counter ``b << 64``,
one uniform per trajectory per step in step-major order. The draws seen by a
trajectory depend only on ``(seed, index)``, so any number of workers
produces bit-identical results, and statistics are merged in block order.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._numeric import DomainError, to_float
from .ehrenfest import ModelSpec, build
from .km_kernel import km_context, n_step_distribution, tv_distance

BLOCK = 8192


@dataclass(frozen=True)
class SimConfig:
    spec: ModelSpec
    start: int = 0
    steps: int = 0
    trials: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.trials < 1:
            raise DomainError("trials must be at least 1")
        if self.steps < 0:
            raise DomainError("steps must be nonnegative")
        if not 0 <= self.start <= self.spec.N:
            raise DomainError("start state outside 0..N")
        if not 0 <= self.seed < 2**64:
            raise DomainError("seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class SimReport:
    n: int
    trials: int
    counts: np.ndarray
    empirical: np.ndarray
    analytic: np.ndarray
    tv: float
    z_max: float


def _cdf_table(spec: ModelSpec) -> np.ndarray:
    """Row-wise cumulative sums; the last positive column is pinned to 1."""
    P = to_float(build(spec, exact=True).entries)
    cdf = np.cumsum(P, axis=1)
    for i, row in enumerate(P):
        last = np.flatnonzero(row > 0)[-1]
        cdf[i, last:] = 1.0
    return cdf


def _stream(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed, counter=block << 64))


def _step(cdf: np.ndarray, states: np.ndarray, u: np.ndarray) -> np.ndarray:
    # inverse CDF: next state = number of cumulative entries <= u
    return np.count_nonzero(cdf[states] <= u[:, None], axis=1)


def _run_block(cdf, cfg: SimConfig, block: int, stop: int, record: bool):
    count = min(BLOCK, cfg.trials - block * BLOCK)
    gen = _stream(cfg.seed, block)
    states = np.full(BLOCK, cfg.start, dtype=np.int64)
    path = [states[:count].copy()] if record else None
    for _ in range(stop):
        states = _step(cdf, states, gen.random(BLOCK))
        if record:
            path.append(states[:count].copy())
    return np.stack(path, axis=1) if record else states[:count]


def _blocks(cfg: SimConfig) -> range:
    return range(-(-cfg.trials // BLOCK))


def _map_blocks(fn, cfg: SimConfig, workers: int):
    if workers <= 1:
        return [fn(b) for b in _blocks(cfg)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, _blocks(cfg)))


def sample_paths(cfg: SimConfig, workers: int = 1) -> np.ndarray:
    """All trajectories, shape ``(trials, steps + 1)``."""
    cdf = _cdf_table(cfg.spec)
    parts = _map_blocks(lambda b: _run_block(cdf, cfg, b, cfg.steps, True), cfg, workers)
    return np.concatenate(parts, axis=0)


def sample_path(cfg: SimConfig, index: int = 0) -> np.ndarray:
    """Trajectory number ``index``; identical to row ``index`` of :func:`sample_paths`."""
    if not 0 <= index < cfg.trials:
        raise DomainError("trajectory index outside 0..trials-1")
    cdf = _cdf_table(cfg.spec)
    block, offset = divmod(index, BLOCK)
    return _run_block(cdf, cfg, block, cfg.steps, True)[offset]


def state_counts(cfg: SimConfig, n: int, workers: int = 1) -> np.ndarray:
    """Histogram of the states occupied at time ``n`` over all trajectories."""
    if not 0 <= n <= cfg.steps:
        raise DomainError("n must lie in 0..steps")
    cdf = _cdf_table(cfg.spec)
    size = cfg.spec.N + 1
    parts = _map_blocks(lambda b: np.bincount(_run_block(cdf, cfg, b, n, False), minlength=size), cfg, workers)
    total = np.zeros(size, dtype=np.int64)
    for part in parts:
        total += part
    return total


def z_scores(counts: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Per-state z-scores of binomial counts; zero-variance states give 0 or inf."""
    trials = counts.sum()
    p = np.asarray(p, dtype=float)
    dev = counts - trials * p
    var = trials * p * (1 - p)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(var > 0, dev / np.sqrt(np.where(var > 0, var, 1)), np.where(np.abs(dev) > 1e-9, np.inf, 0.0))
    return z


def empirical_vs_analytic(cfg: SimConfig, n: int, workers: int = 1) -> SimReport:
    counts = state_counts(cfg, n, workers)
    analytic = n_step_distribution(km_context(cfg.spec, exact=False, with_blocks=False), cfg.start, n)
    analytic = np.asarray(analytic, dtype=float)
    empirical = counts / cfg.trials
    z = z_scores(counts, analytic)
    return SimReport(n, cfg.trials, counts, empirical, analytic, tv_distance(empirical, analytic),
                     float(np.max(np.abs(z))))

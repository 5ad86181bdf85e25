"""Time-domain simulation of the SIS model, its linearization and the noisy
linearization.

Deterministic runs use fixed-step classical Runge-Kutta (or explicit Euler on
request).  Noisy runs use Euler-Maruyama with increments ``sigma*sqrt(dt)*z``,
``z`` standard normal, which realizes white noise of intensity ``sigma^2``.

Trial ``k`` of a run with master seed ``s`` draws its normals from
``Generator(PCG64(SeedSequence(s, spawn_key=(k,))))``; a single noisy
trajectory is trial 0.  Results therefore do not depend on how trials are
scheduled.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .indices import EpidemicParams, StabilityError
from .sampling import SampledGraph
from .spectral import adjacency_eigenvalues

BOX_SLACK = 1e-6


@dataclass(frozen=True)
class SimulationConfig:
    dt: float = 1e-3
    horizon: float = 10.0
    burn_in_fraction: float = 0.5
    trials: int = 1
    seed: int = 0
    record_every: int = 1

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.dt < self.horizon:
            raise ValueError("dt must be smaller than the horizon")
        if not 0 <= self.burn_in_fraction < 1:
            raise ValueError("burn_in_fraction must lie in [0, 1)")
        if self.trials < 1:
            raise ValueError("need at least one trial")
        if self.record_every < 1:
            raise ValueError("record_every must be a positive integer")

    @property
    def steps(self) -> int:
        return int(round(self.horizon / self.dt))


@dataclass(frozen=True)
class Trajectory:
    """States on the grid ``times[k] = k * record_every * dt``."""

    times: np.ndarray
    states: np.ndarray
    dt: float
    scheme: str
    record_every: int = 1
    diagnostics: list[str] = field(default_factory=list)

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def trial_generator(seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(trial,))))


def _adjacency(G) -> np.ndarray:
    a = G.adjacency if isinstance(G, SampledGraph) else np.asarray(G)
    return a.astype(float)


def _linear_matrix(G, beta: float, delta: float) -> np.ndarray:
    a = _adjacency(G)
    return beta * a - delta * np.eye(a.shape[0])


def _record_grid(steps: int, every: int, dt: float) -> np.ndarray:
    n_rec = steps // every + 1
    return np.arange(n_rec) * every * dt


def _rk4(f, x0: np.ndarray, cfg: SimulationConfig):
    steps, every, h = cfg.steps, cfg.record_every, cfg.dt
    out = np.empty((steps // every + 1, x0.size))
    out[0] = x0
    x = x0.copy()
    lo, hi = x.min(initial=0.0), x.max(initial=0.0)
    for k in range(1, steps + 1):
        k1 = f(x)
        k2 = f(x + 0.5 * h * k1)
        k3 = f(x + 0.5 * h * k2)
        k4 = f(x + h * k3)
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        lo = min(lo, x.min())
        hi = max(hi, x.max())
        if k % every == 0:
            out[k // every] = x
    return out, lo, hi


def _euler_maruyama(M: np.ndarray, X0: np.ndarray, dt: float, steps: int, sigma: float,
                    rngs=None, every: int = 0, burn_in: int | None = None):
    """Integrate ``dX = X M dt + sigma dW`` row-wise for a batch of trials.

    Returns the recorded states (if ``every``) and, if ``burn_in`` is given,
    per-trial sums of ``||x_k||^2 / N`` over steps ``k > burn_in``.
    """
    trials, n = X0.shape
    X = X0.copy()
    rec = None
    if every:
        rec = np.empty((steps // every + 1, trials, n))
        rec[0] = X
    acc = np.zeros(trials)
    noisy = sigma != 0 and rngs is not None
    scale = sigma * math.sqrt(dt)
    chunk = max(1, min(steps, (1 << 22) // max(1, trials * n)))
    k = 0
    while k < steps:
        c = min(chunk, steps - k)
        if noisy:
            Z = np.stack([rng.standard_normal((c, n)) for rng in rngs], axis=1)
        for s in range(c):
            if noisy:
                X = X + dt * (X @ M) + scale * Z[s]
            else:
                X = X + dt * (X @ M)
            k += 1
            if every and k % every == 0:
                rec[k // every] = X
            if burn_in is not None and k > burn_in:
                acc += np.einsum("ij,ij->i", X, X) / n
    return rec, acc


def simulate_sis_nonlinear(G, beta: float, delta: float, x0, cfg: SimulationConfig) -> Trajectory:
    """Classical RK4 on ``x' = (beta A - delta I) x - beta diag(x) A x``.

    States are not clamped; excursions outside [0, 1] beyond a small slack
    are reported in ``diagnostics`` (they signal a step that is too large).
    """
    a = _adjacency(G)
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (a.shape[0],):
        raise ValueError(f"x0 must have length {a.shape[0]}")
    if np.any(x0 < 0) or np.any(x0 > 1):
        raise ValueError("initial infected fractions must lie in [0, 1]")
    if beta < 0 or delta < 0:
        raise ValueError("rates must be non-negative")

    def f(x):
        return beta * (a @ x) * (1.0 - x) - delta * x

    states, lo, hi = _rk4(f, x0, cfg)
    diag = []
    if lo < -BOX_SLACK or hi > 1 + BOX_SLACK:
        diag.append(f"state left [0, 1]: min {lo:.3g}, max {hi:.3g}")
    return Trajectory(_record_grid(cfg.steps, cfg.record_every, cfg.dt), states, cfg.dt,
                      "rk4", cfg.record_every, diag)


def simulate_linear(G, beta: float, delta: float, x0, cfg: SimulationConfig,
                    scheme: str = "rk4") -> Trajectory:
    """Integrate the linearization ``x' = (beta A - delta I) x``."""
    M = _linear_matrix(G, beta, delta)
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (M.shape[0],):
        raise ValueError(f"x0 must have length {M.shape[0]}")
    times = _record_grid(cfg.steps, cfg.record_every, cfg.dt)
    if scheme == "rk4":
        states, _, _ = _rk4(lambda x: M @ x, x0, cfg)
    elif scheme == "euler":
        rec, _ = _euler_maruyama(M, x0[None, :], cfg.dt, cfg.steps, 0.0, every=cfg.record_every)
        states = rec[:, 0, :]
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    return Trajectory(times, states, cfg.dt, scheme, cfg.record_every)


def simulate_linear_noisy(G, beta: float, delta: float, sigma: float, x0,
                          cfg: SimulationConfig) -> Trajectory:
    """One Euler-Maruyama path of ``x' = (beta A - delta I) x + n(t)``.

    Stability is not enforced here.  With ``sigma = 0`` the path is
    identical to ``simulate_linear(..., scheme="euler")``.
    """
    M = _linear_matrix(G, beta, delta)
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (M.shape[0],):
        raise ValueError(f"x0 must have length {M.shape[0]}")
    rngs = [trial_generator(cfg.seed, 0)]
    rec, _ = _euler_maruyama(M, x0[None, :], cfg.dt, cfg.steps, sigma, rngs, every=cfg.record_every)
    return Trajectory(_record_grid(cfg.steps, cfg.record_every, cfg.dt), rec[:, 0, :], cfg.dt,
                      "euler-maruyama", cfg.record_every)


@dataclass(frozen=True)
class MonteCarloEstimate:
    estimate: float
    std_error: float
    per_trial: np.ndarray


def monte_carlo_noise_index(G, params: EpidemicParams, cfg: SimulationConfig) -> MonteCarloEstimate:
    """Estimate the asymptotic mean-square deviation per node by simulation.

    Every trial starts at 0.  The first ``burn_in_fraction`` of each path is
    discarded and ``||x_k||^2 / N`` is averaged over the remaining steps; the
    standard error comes from the spread of the per-trial averages.
    """
    a = _adjacency(G)
    n = a.shape[0]
    beta, delta = params.rates(n)
    lam1 = adjacency_eigenvalues(a).lambda_max
    if delta <= beta * lam1:
        raise StabilityError(f"delta={delta} <= beta*lambda_1={beta * lam1}")
    if params.sigma == 0:
        return MonteCarloEstimate(0.0, 0.0, np.zeros(cfg.trials))
    M = beta * a - delta * np.eye(n)
    steps = cfg.steps
    burn = int(cfg.burn_in_fraction * steps)
    rngs = [trial_generator(cfg.seed, k) for k in range(cfg.trials)]
    _, acc = _euler_maruyama(M, np.zeros((cfg.trials, n)), cfg.dt, steps, params.sigma, rngs,
                             burn_in=burn)
    per_trial = acc / (steps - burn)
    est = math.fsum(per_trial) / cfg.trials
    if cfg.trials > 1:
        var = math.fsum((per_trial - est) ** 2) / (cfg.trials - 1)
        se = math.sqrt(var / cfg.trials)
    else:
        se = math.nan
    return MonteCarloEstimate(est, se, per_trial)


def write_trajectory_csv(traj: Trajectory, path, header: dict | None = None) -> None:
    """CSV with columns ``t,x_1,...,x_N`` after ``#``-prefixed metadata lines."""
    n = traj.states.shape[1]
    with open(path, "w", newline="") as fh:
        for k, v in (header or {}).items():
            fh.write(f"# {k}: {v}\n")
        w = csv.writer(fh)
        w.writerow(["t"] + [f"x_{i + 1}" for i in range(n)])
        for t, x in zip(traj.times, traj.states):
            w.writerow([repr(float(t))] + [repr(float(v)) for v in x])

"""Stability thresholds, sampling bounds and noise indices for SIS epidemics.

Rates on an ``N``-node graph are written ``(beta_N, delta_N)``.  The
graphon-side results assume ``beta_N / delta_N = beta_bar / (N * delta_bar)``;
:class:`EpidemicParams` produces rates satisfying that relation under either
named scaling, or takes explicit per-size rates.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Mapping

import numpy as np

from .graphon import (LipschitzGraphon, StepKernel, max_degree, operator_norm,
                      operator_spectrum)
from .sampling import SampledGraph
from .spectral import AdjacencySpectrum, adjacency_eigenvalues

FIXED_DELTA = "fixed_delta"
FIXED_BETA = "fixed_beta"


class StabilityError(ValueError):
    """The linearized epidemic is not asymptotically stable, so the index diverges."""


class BoundInapplicableError(ValueError):
    """A denominator of the approximation bound is not positive."""


@dataclass(frozen=True)
class EpidemicParams:
    """Infection/recovery constants, noise intensity and confidence level.

    ``scaling`` is ``"fixed_delta"`` (``delta_N = delta_bar``,
    ``beta_N = beta_bar / N``), ``"fixed_beta"`` (``beta_N = beta_bar``,
    ``delta_N = N delta_bar``) or a mapping ``{N: (beta_N, delta_N)}``.
    """

    beta_bar: float
    delta_bar: float
    sigma: float = 1.0
    nu: float = 0.02
    scaling: str | Mapping[int, tuple[float, float]] = FIXED_DELTA

    def __post_init__(self):
        if isinstance(self.scaling, str):
            if self.scaling not in (FIXED_DELTA, FIXED_BETA):
                raise ValueError(f"unknown scaling {self.scaling!r}")
            if self.beta_bar <= 0 or self.delta_bar <= 0:
                raise ValueError("beta_bar and delta_bar must be positive")
        if self.sigma < 0:
            raise ValueError("sigma must be non-negative")
        if not 0 < self.nu < math.exp(-1):
            raise ValueError(f"nu must lie in (0, 1/e), got {self.nu}")

    @classmethod
    def explicit(cls, n: int, beta: float, delta: float, sigma: float = 1.0,
                 nu: float = 0.02) -> "EpidemicParams":
        """Parameters pinned to given rates at a single size ``n``."""
        return cls(n * beta, delta, sigma, nu, {int(n): (float(beta), float(delta))})

    def rates(self, n: int) -> tuple[float, float]:
        """``(beta_N, delta_N)`` at size ``n``."""
        if self.scaling == FIXED_DELTA:
            return self.beta_bar / n, self.delta_bar
        if self.scaling == FIXED_BETA:
            return self.beta_bar, n * self.delta_bar
        try:
            beta, delta = self.scaling[int(n)]
        except KeyError:
            raise ValueError(f"no explicit rates given for n={n}") from None
        return float(beta), float(delta)

    def normalized(self, n: int) -> tuple[float, float]:
        """Constants ``(n beta_N, delta_N)``: the fixed-delta form of the rates at ``n``."""
        beta, delta = self.rates(n)
        return n * beta, delta

    def with_scaling(self, scaling) -> "EpidemicParams":
        return EpidemicParams(self.beta_bar, self.delta_bar, self.sigma, self.nu, scaling)


# -- sampling bounds ----------------------------------------------------------

def phi(n: int, nu: float, L: float, K: int) -> float:
    """High-probability bound on the operator-norm distance between a sampled
    graph's step graphon and its generating graphon."""
    if n < 1:
        raise ValueError("n must be positive")
    if not 0 < nu < math.exp(-1):
        raise ValueError(f"nu must lie in (0, 1/e), got {nu}")
    if L < 0 or K < 0:
        raise ValueError("L and K must be non-negative")
    radicand = L * L - K * K + K * n
    if radicand < 0:
        raise ValueError(f"L^2 - K^2 + K*n is negative (L={L}, K={K}, n={n}: {radicand})")
    return math.sqrt(4.0 * math.log(2.0 * n / nu) / n) + 2.0 * math.sqrt(radicand) / n


def l2_sampling_bound(n: int, nu: float, L: float, K: int) -> float:
    """High-probability bound on ``||W - W_G||_{L^2}``."""
    return (2.0 * n) ** 0.25 * math.sqrt(phi(n, nu, L, K))


def phi_for(W, n: int, nu: float) -> float:
    L, K = W.lipschitz_constants
    return phi(n, nu, L, K)


@dataclass(frozen=True)
class Condition:
    lhs: float
    rhs: float
    passed: bool


@dataclass(frozen=True)
class LargeEnoughReport:
    condition_a: Condition
    condition_b: Condition
    condition_c: Condition

    @property
    def all_pass(self) -> bool:
        return self.condition_a.passed and self.condition_b.passed and self.condition_c.passed

    def to_dict(self) -> dict:
        d = asdict(self)
        d["all_pass"] = self.all_pass
        return d


def large_enough(W: StepKernel | LipschitzGraphon, n: int, nu: float) -> LargeEnoughReport:
    """Evaluate the three size conditions under which the sampling bounds hold."""
    if not 0 < nu < math.exp(-1):
        raise ValueError(f"nu must lie in (0, 1/e), got {nu}")
    L, K = W.lipschitz_constants
    min_width = float(W.partition.block_measures.min())
    a = Condition(2.0 / n, min_width, 2.0 / n < min_width)
    lhs_b = math.log(2.0 * n / nu) / n + (2 * K + 3 * L) / n
    dmax = max_degree(W)
    b = Condition(lhs_b, dmax, lhs_b < dmax)
    lhs_c = n * math.exp(-n / 5.0)
    c = Condition(lhs_c, nu, lhs_c < nu)
    return LargeEnoughReport(a, b, c)


# -- stability -------------------------------------------------------------------

@dataclass(frozen=True)
class GraphStability:
    stable: bool
    margin: float


def stability_threshold_graph(spectrum: AdjacencySpectrum, delta: float, beta: float) -> GraphStability:
    """Disease-free state is globally stable iff ``lambda_1(A) beta / delta < 1``."""
    if delta <= 0 or beta < 0:
        raise ValueError("need delta > 0 and beta >= 0")
    ratio = spectrum.lambda_max * beta / delta
    return GraphStability(ratio < 1.0, 1.0 - ratio)


@dataclass(frozen=True)
class GraphonStability:
    sufficient: bool
    lhs: float
    rhs: float
    large_enough: bool


def stability_threshold_graphon(W: StepKernel, n: int, params: EpidemicParams,
                                phi_value: float | None = None) -> GraphonStability:
    """Graphon-only sufficient condition ``delta_N > N beta_N (||T_W|| + phi(N))``.

    ``large_enough`` in the result is False when the size conditions fail and
    the probabilistic guarantee does not apply.
    """
    beta, delta = params.rates(n)
    if phi_value is None:
        phi_value = phi_for(W, n, params.nu)
    rhs = n * beta * (operator_norm(W) + phi_value)
    return GraphonStability(delta > rhs, delta, rhs, large_enough(W, n, params.nu).all_pass)


# -- noise indices ---------------------------------------------------------------

def _index_sum(denominators: np.ndarray) -> float:
    return math.fsum(1.0 / denominators)


def noise_index_graph(spectrum: AdjacencySpectrum, delta: float, beta: float, sigma: float) -> float:
    """Asymptotic mean-square deviation per node of the noisy linearized epidemic."""
    ev = np.asarray(spectrum.eigenvalues)
    if delta <= beta * ev[0]:
        raise StabilityError(f"delta={delta} <= beta*lambda_1={beta * ev[0]}: index diverges")
    return sigma ** 2 / (2 * spectrum.n) * _index_sum(delta - beta * ev)


def noise_index_graphon(W: StepKernel, n: int, params: EpidemicParams) -> float:
    """Graphon-side approximation of the noise index at size ``n``."""
    rep = operator_spectrum(W)
    if n < rep.rank:
        raise ValueError(f"n={n} is smaller than the graphon rank {rep.rank}")
    beta, delta = params.rates(n)
    nz = rep.nonzero
    lam1 = rep.eigenvalues[0]
    if delta <= beta * n * lam1:
        raise StabilityError(f"delta_N={delta} <= N beta_N lambda_1(T_W)={beta * n * lam1}")
    total = _index_sum(delta - beta * n * nz) + (n - nz.size) / delta
    return params.sigma ** 2 / (2 * n) * total


def positive_noise_upper_bound(spectrum: AdjacencySpectrum, delta: float, beta: float,
                               sigma: float, m: float) -> float:
    """Upper bound on the index for uncorrelated noise with positive mean ``m``."""
    if m < 0:
        raise ValueError("noise mean must be non-negative")
    j = noise_index_graph(spectrum, delta, beta, sigma)
    return j + m ** 2 / (delta - beta * spectrum.lambda_max) ** 2


@dataclass(frozen=True)
class TheoremBound:
    value: float
    stability_gap: float
    spectral_gap: float

    def __float__(self):
        return self.value


def theorem_bound(W: StepKernel, n: int, params: EpidemicParams) -> TheoremBound:
    """High-probability bound on ``|J_G - J_{W,N}|``.

    Evaluated in the fixed-delta normalization ``(n beta_N, delta_N)`` of the
    rates, so the bound scales with the indices under any rate choice that
    keeps ``beta_N / delta_N`` fixed.  ``stability_gap`` and ``spectral_gap``
    are the two denominator factors.
    """
    L, K = W.lipschitz_constants
    rank = operator_spectrum(W).rank
    if n < rank:
        raise ValueError(f"n={n} is smaller than the graphon rank {rank}")
    beta_bar, delta_bar = params.normalized(n)
    phi_value = phi(n, params.nu, L, K)
    norm = operator_norm(W)
    spectral_gap = delta_bar - beta_bar * norm
    stability_gap = spectral_gap - beta_bar * phi_value
    if spectral_gap <= 0:
        raise BoundInapplicableError(f"delta_bar - beta_bar*||T_W|| = {spectral_gap} <= 0")
    if stability_gap <= 0:
        raise BoundInapplicableError(
            f"delta_bar - beta_bar*||T_W|| - beta_bar*phi(N) = {stability_gap} <= 0")
    numer = params.sigma ** 2 * beta_bar * math.sqrt(
        math.sqrt(n * math.log(2 * n / params.nu)) + math.sqrt(L * L - K * K + K * n))
    value = numer / (n ** 0.75 * 2 ** 0.25 * stability_gap * spectral_gap)
    return TheoremBound(value, stability_gap, spectral_gap)


def theorem_bound_chain(W: StepKernel, n: int, params: EpidemicParams) -> float:
    """The same bound assembled from the L2 sampling bound, for cross-checking."""
    L, K = W.lipschitz_constants
    beta_bar, delta_bar = params.normalized(n)
    norm = operator_norm(W)
    p = phi(n, params.nu, L, K)
    d1 = delta_bar - beta_bar * norm - beta_bar * p
    d2 = delta_bar - beta_bar * norm
    return params.sigma ** 2 * beta_bar * l2_sampling_bound(n, params.nu, L, K) / (2 * math.sqrt(n) * d1 * d2)


@dataclass(frozen=True)
class NoiseIndexReport:
    j_graph: float
    j_graphon: float
    delta_noise: float
    theorem_bound: float
    relative_error: float
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "NoiseIndexReport":
        return cls(float(d["j_graph"]), float(d["j_graphon"]), float(d["delta_noise"]),
                   float(d["theorem_bound"]), float(d["relative_error"]), list(d.get("notes", [])))


def noise_report(W: StepKernel, G: SampledGraph, params: EpidemicParams,
                 spectrum: AdjacencySpectrum | None = None) -> NoiseIndexReport:
    """Both indices for a graph sampled from ``W``, their gap and its bound.

    When the bound's denominators are not positive the bound is reported as
    NaN and the reason is recorded in ``notes``; stability failures of either
    index raise :class:`StabilityError`.
    """
    n = G.n
    if spectrum is None:
        spectrum = adjacency_eigenvalues(G)
    beta, delta = params.rates(n)
    j_graph = noise_index_graph(spectrum, delta, beta, params.sigma)
    j_graphon = noise_index_graphon(W, n, params)
    gap = abs(j_graph - j_graphon)
    notes = []
    try:
        bound = theorem_bound(W, n, params).value
    except BoundInapplicableError as exc:
        bound = math.nan
        notes.append(f"bound inapplicable: {exc}")
    rel = gap / j_graph if j_graph > 0 else 0.0
    return NoiseIndexReport(j_graph, j_graphon, gap, bound, rel, notes)

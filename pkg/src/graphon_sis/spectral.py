"""Dense eigendecomposition of adjacency matrices."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .graphon import ZERO_TOL, SpectrumReport
from .sampling import SampledGraph


@dataclass(frozen=True)
class AdjacencySpectrum:
    """All ``n`` adjacency eigenvalues, sorted non-increasingly."""

    eigenvalues: np.ndarray
    n: int

    @property
    def lambda_max(self) -> float:
        return float(self.eigenvalues[0])


def adjacency_eigenvalues(G: SampledGraph | np.ndarray) -> AdjacencySpectrum:
    # LAPACK syevd: tridiagonal reduction followed by divide and conquer.
    a = G.adjacency if isinstance(G, SampledGraph) else np.asarray(G)
    ev = scipy.linalg.eigh(a.astype(float), eigvals_only=True, driver="evd")
    return AdjacencySpectrum(ev[::-1].copy(), a.shape[0])


def normalized_spectrum(S: AdjacencySpectrum) -> SpectrumReport:
    """Eigenvalues of the empirical step graphon: ``lambda_i(A) / n``."""
    ev = S.eigenvalues / S.n
    rank = int(np.sum(np.abs(ev) > ZERO_TOL))
    return SpectrumReport(ev, rank, S.n)

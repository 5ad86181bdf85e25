"""Random graphs sampled from graphons and their empirical step graphons.

Randomness contract
-------------------
``sample_graph(W, n, seed)`` seeds numpy's ``Generator(PCG64(seed))`` (that is,
``numpy.random.default_rng(seed)``) and draws exactly one double in [0, 1)
per unordered pair ``i < j``, visiting pairs in lexicographic order
``(1,2), (1,3), ..., (1,n), (2,3), ...``.  The edge is present iff the draw is
below ``W(u_i, u_j)`` with ``u_i = i / n``.  The generator choice is fixed for
the 0.x series; the same ``(W, n, seed)`` gives the same graph on every run.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .graphon import GRAPHON, LipschitzGraphon, Partition, StepKernel

MAX_SEED = 2**64 - 1


def _check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed <= MAX_SEED:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


@dataclass(frozen=True, eq=False)
class SampledGraph:
    """Simple undirected graph plus the latent positions that generated it.

    The adjacency matrix is kept as packed bits; :attr:`adjacency` unpacks a
    fresh ``uint8`` copy on every access.
    """

    n: int
    packed: np.ndarray
    source_seed: int | None = None
    source_graphon_id: str | None = None

    @classmethod
    def from_adjacency(cls, adjacency, source_seed=None, source_graphon_id=None) -> "SampledGraph":
        a = np.asarray(adjacency)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("adjacency must be square")
        if not np.all((a == 0) | (a == 1)):
            raise ValueError("adjacency entries must be 0 or 1")
        if not np.array_equal(a, a.T):
            raise ValueError("adjacency must be symmetric")
        if np.any(np.diag(a) != 0):
            raise ValueError("self-loops are not allowed")
        packed = np.packbits(a.astype(bool), axis=1)
        packed.setflags(write=False)
        return cls(a.shape[0], packed, source_seed, source_graphon_id)

    @property
    def adjacency(self) -> np.ndarray:
        return np.unpackbits(self.packed, axis=1, count=self.n)

    @property
    def latents(self) -> np.ndarray:
        return np.arange(1, self.n + 1) / self.n

    @property
    def n_edges(self) -> int:
        return int(np.unpackbits(self.packed, axis=1, count=self.n).sum()) // 2

    def degrees(self) -> np.ndarray:
        return self.adjacency.sum(axis=1)

    def edges(self) -> np.ndarray:
        """``(E, 2)`` array of 0-indexed pairs ``i < j`` in lexicographic order."""
        i, j = np.nonzero(np.triu(self.adjacency, 1))
        return np.column_stack([i, j])


def edge_probabilities(W, n: int) -> np.ndarray:
    """Matrix ``P_ij = W(i/n, j/n)`` on the latent grid."""
    u = np.arange(1, n + 1) / n
    if isinstance(W, StepKernel):
        idx = W.partition.locate(u)
        return W.values[np.ix_(idx, idx)]
    if isinstance(W, LipschitzGraphon):
        return np.asarray(W(u[:, None], u[None, :]), dtype=float)
    raise TypeError(f"cannot sample from {type(W).__name__}")


def sample_graph(W, n: int, seed: int) -> SampledGraph:
    """Draw an ``n``-node graph from ``W`` with fixed latents ``u_i = i/n``."""
    if n < 2:
        raise ValueError(f"need at least 2 nodes, got n={n}")
    seed = _check_seed(seed)
    p = edge_probabilities(W, n)
    iu, ju = np.triu_indices(n, 1)
    rng = np.random.default_rng(seed)
    draws = rng.random(iu.size)
    a = np.zeros((n, n), dtype=np.uint8)
    hit = draws < p[iu, ju]
    a[iu[hit], ju[hit]] = 1
    a[ju[hit], iu[hit]] = 1
    return SampledGraph(n, np.packbits(a.astype(bool), axis=1), seed, getattr(W, "label", None))


def empirical_graphon(G: SampledGraph) -> StepKernel:
    """Step graphon with ``n`` equal blocks whose values are the adjacency entries."""
    return StepKernel(Partition.uniform(G.n), G.adjacency.astype(float), GRAPHON,
                      label=f"W_G(n={G.n})")


# -- edge list I/O -------------------------------------------------------------

def format_edge_list(G: SampledGraph, header: dict | None = None) -> str:
    lines = [f"# {k}: {v}" for k, v in (header or {}).items()]
    lines.append(str(G.n))
    lines.extend(f"{i + 1} {j + 1}" for i, j in G.edges())
    return "\n".join(lines) + "\n"


def write_edge_list(G: SampledGraph, path, header: dict | None = None) -> None:
    """First line ``n``, then one ``i j`` pair per line (1-indexed, ``i < j``).

    Optional ``# key: value`` lines before the node count carry run metadata.
    """
    Path(path).write_text(format_edge_list(G, header))


def parse_edge_list(text: str) -> tuple[SampledGraph, dict]:
    meta = {}
    body = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, _, val = line[1:].partition(":")
            meta[key.strip()] = val.strip()
            continue
        body.append(line)
    if not body:
        raise ValueError("edge list is empty")
    n = int(body[0])
    if n < 1:
        raise ValueError("node count must be positive")
    a = np.zeros((n, n), dtype=np.uint8)
    for line in body[1:]:
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"malformed edge line {line!r}")
        i, j = int(parts[0]), int(parts[1])
        if not (1 <= i < j <= n):
            raise ValueError(f"edge {i} {j} must satisfy 1 <= i < j <= {n}")
        if a[i - 1, j - 1]:
            raise ValueError(f"duplicate edge {i} {j}")
        a[i - 1, j - 1] = a[j - 1, i - 1] = 1
    seed = meta.get("seed")
    G = SampledGraph.from_adjacency(a, int(seed) if seed not in (None, "", "None") else None,
                                    meta.get("graphon") or None)
    return G, meta


def read_edge_list(path) -> SampledGraph:
    return parse_edge_list(Path(path).read_text())[0]

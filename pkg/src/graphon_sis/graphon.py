"""Step kernels, piecewise Lipschitz graphons and their norms and spectra.

A step kernel is stored as a partition of [0, 1] into intervals
``[a_{k-1}, a_k)`` (the last one closed on the right) together with a
symmetric matrix of block values.  Everything that matters for the integral
operator ``(T f)(x) = int W(x, y) f(y) dy`` then reduces to small dense
linear algebra weighted by the block widths.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np
import yaml

ZERO_TOL = 1e-10
CUT_NORM_MAX_BLOCKS = 20
_BOUNDARY_MERGE_TOL = 1e-12

GRAPHON = "graphon"
KERNEL_1 = "kernel_1"
KERNEL = "kernel"
_RANGES = {GRAPHON: (0.0, 1.0), KERNEL_1: (-1.0, 1.0), KERNEL: (-np.inf, np.inf)}


class CapacityError(ValueError):
    """Raised when an exact algorithm is asked to handle too many blocks."""


@dataclass(frozen=True, eq=False)
class Partition:
    """Ordered boundaries ``0 = a_0 < a_1 < ... < a_{K+1} = 1``."""

    boundaries: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.boundaries, dtype=float).copy()
        if b.ndim != 1 or b.size < 2:
            raise ValueError("a partition needs at least the boundaries 0 and 1")
        if b[0] != 0.0 or b[-1] != 1.0:
            raise ValueError(f"boundaries must start at 0 and end at 1, got {b[0]} .. {b[-1]}")
        if np.any(np.diff(b) <= 0):
            raise ValueError("boundaries must be strictly increasing")
        b.setflags(write=False)
        object.__setattr__(self, "boundaries", b)

    @classmethod
    def uniform(cls, n_blocks: int) -> "Partition":
        if n_blocks < 1:
            raise ValueError("n_blocks must be positive")
        b = np.arange(n_blocks + 1, dtype=float) / n_blocks
        return cls(b)

    @property
    def n_blocks(self) -> int:
        return self.boundaries.size - 1

    @property
    def block_measures(self) -> np.ndarray:
        return np.diff(self.boundaries)

    @property
    def n_breakpoints(self) -> int:
        """Number of interior breakpoints (``K`` in the piecewise Lipschitz setting)."""
        return self.n_blocks - 1

    def locate(self, x) -> np.ndarray:
        """Block index of each coordinate; ``x = 1`` falls in the last block."""
        x = np.asarray(x, dtype=float)
        if np.any((x < 0.0) | (x > 1.0)) or np.any(np.isnan(x)):
            raise ValueError("coordinates must lie in [0, 1]")
        idx = np.searchsorted(self.boundaries, x, side="right") - 1
        return np.minimum(idx, self.n_blocks - 1)

    def refine(self, other: "Partition") -> "Partition":
        """Common refinement of two partitions."""
        merged = np.union1d(self.boundaries, other.boundaries)
        keep = np.concatenate([[True], np.diff(merged) > _BOUNDARY_MERGE_TOL])
        merged = merged[keep]
        merged[-1] = 1.0
        return Partition(merged)

    def __eq__(self, other):
        return isinstance(other, Partition) and np.array_equal(self.boundaries, other.boundaries)

    def __hash__(self):
        return hash(self.boundaries.tobytes())


@dataclass(frozen=True, eq=False)
class StepKernel:
    """Symmetric kernel that is constant on every product of partition blocks.

    ``range_class`` is one of ``"graphon"`` (values in [0, 1]), ``"kernel_1"``
    (values in [-1, 1]) or ``"kernel"`` (any bounded values).  ``approximate``
    marks kernels obtained by discretizing a non-step graphon.  ``piecewise``
    optionally overrides the ``(L, K)`` constants used by the sampling bounds;
    by default a step kernel is piecewise Lipschitz with ``L = 0`` and ``K``
    equal to its number of interior breakpoints.
    """

    partition: Partition
    values: np.ndarray
    range_class: str = GRAPHON
    approximate: bool = False
    piecewise: tuple[float, int] | None = None
    label: str | None = None

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        k = self.partition.n_blocks
        if v.shape != (k, k):
            raise ValueError(f"values must be {k}x{k} for a {k}-block partition, got {v.shape}")
        if not np.array_equal(v, v.T):
            raise ValueError("kernel values must form a symmetric matrix")
        if self.range_class not in _RANGES:
            raise ValueError(f"unknown range class {self.range_class!r}")
        lo, hi = _RANGES[self.range_class]
        if np.any(v < lo) or np.any(v > hi) or not np.all(np.isfinite(v)):
            raise ValueError(f"values fall outside the {self.range_class} range [{lo}, {hi}]")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_blocks(cls, values, boundaries=None, range_class: str = GRAPHON, **kw) -> "StepKernel":
        values = np.asarray(values, dtype=float)
        if boundaries is None:
            part = Partition.uniform(values.shape[0])
        else:
            part = Partition(boundaries)
        return cls(part, values, range_class, **kw)

    @classmethod
    def constant(cls, c: float, range_class: str = GRAPHON) -> "StepKernel":
        return cls(Partition.uniform(1), np.array([[c]]), range_class)

    @property
    def n_blocks(self) -> int:
        return self.partition.n_blocks

    @property
    def block_measures(self) -> np.ndarray:
        return self.partition.block_measures

    @property
    def lipschitz_constants(self) -> tuple[float, int]:
        """``(L, K)`` for the sampling bounds."""
        if self.piecewise is not None:
            return self.piecewise
        return 0.0, self.partition.n_breakpoints

    def __call__(self, x, y):
        return evaluate(self, x, y)

    def scaled(self, c: float) -> "StepKernel":
        v = c * self.values
        rc = self.range_class
        lo, hi = _RANGES[rc]
        if np.any(v < lo) or np.any(v > hi):
            rc = KERNEL_1 if np.all(np.abs(v) <= 1) else KERNEL
        return StepKernel(self.partition, v, rc)

    def refined(self, partition: Partition) -> "StepKernel":
        """The same function expressed on a finer partition."""
        mids = 0.5 * (partition.boundaries[:-1] + partition.boundaries[1:])
        idx = self.partition.locate(mids)
        return StepKernel(partition, self.values[np.ix_(idx, idx)], self.range_class,
                          self.approximate, self.piecewise, self.label)


@dataclass(frozen=True, eq=False)
class LipschitzGraphon:
    """Graphon given by a function that is Lipschitz on each cell of a grid.

    ``evaluator`` must accept broadcastable arrays ``(x, y)`` and return
    values in [0, 1].
    """

    partition: Partition
    evaluator: Callable
    lipschitz_L: float
    label: str | None = None

    def __post_init__(self):
        if self.lipschitz_L < 0:
            raise ValueError("Lipschitz constant must be non-negative")

    @property
    def lipschitz_constants(self) -> tuple[float, int]:
        return float(self.lipschitz_L), self.partition.n_breakpoints

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        self.partition.locate(x)
        self.partition.locate(y)
        out = np.asarray(self.evaluator(x, y), dtype=float)
        if out.shape != np.broadcast_shapes(x.shape, y.shape):
            out = np.vectorize(lambda a, b: float(self.evaluator(a, b)))(x, y)
        return out

    def discretize(self, resolution: int = 200) -> StepKernel:
        """Approximate step graphon on a uniform grid refined by the partition.

        Cell values are the graphon at cell midpoints.  The result is flagged
        ``approximate`` and keeps this graphon's ``(L, K)`` constants.
        """
        part = Partition.uniform(resolution).refine(self.partition)
        mids = 0.5 * (part.boundaries[:-1] + part.boundaries[1:])
        v = self(mids[:, None], mids[None, :])
        v = 0.5 * (v + v.T)
        return StepKernel(part, np.clip(v, 0.0, 1.0), GRAPHON, approximate=True,
                          piecewise=self.lipschitz_constants, label=self.label)

    def max_degree(self, resolution: int = 2000) -> float:
        return float(degree_function(self.discretize(resolution)).max())

    def lipschitz_violations(self, n_pairs: int = 10_000, seed: int = 0, slack: float = 1e-12) -> int:
        """Count random same-cell pairs breaking the Lipschitz inequality."""
        rng = np.random.default_rng(seed)
        b = self.partition.boundaries
        k = self.partition.n_blocks
        ci, cj = rng.integers(k, size=(2, n_pairs))
        w = np.diff(b)
        x1, x2 = (b[ci] + rng.random((2, n_pairs)) * w[ci])
        y1, y2 = (b[cj] + rng.random((2, n_pairs)) * w[cj])
        lhs = np.abs(self(x1, y1) - self(x2, y2))
        rhs = self.lipschitz_L * (np.abs(x1 - x2) + np.abs(y1 - y2))
        return int(np.sum(lhs > rhs + slack))


@dataclass(frozen=True)
class SpectrumReport:
    """Eigenvalues sorted non-increasingly, possibly zero-padded."""

    eigenvalues: np.ndarray
    rank: int
    padded_length: int
    approximate: bool = False

    def __post_init__(self):
        ev = np.asarray(self.eigenvalues, dtype=float)
        if np.any(np.diff(ev) > 0):
            raise ValueError("eigenvalues must be sorted non-increasingly")
        if self.rank > self.padded_length:
            raise ValueError("rank cannot exceed the padded length")

    @property
    def nonzero(self) -> np.ndarray:
        ev = self.eigenvalues
        return ev[np.abs(ev) > ZERO_TOL]

    def to_dict(self) -> dict:
        return {"eigenvalues": [float(v) for v in self.eigenvalues], "rank": int(self.rank),
                "padded_length": int(self.padded_length), "approximate": bool(self.approximate)}

    @classmethod
    def from_dict(cls, d: dict) -> "SpectrumReport":
        return cls(np.asarray(d["eigenvalues"], dtype=float), int(d["rank"]),
                   int(d["padded_length"]), bool(d.get("approximate", False)))


def evaluate(W: StepKernel, x, y):
    """Value of ``W`` at ``(x, y)``; broadcasts over arrays."""
    i = W.partition.locate(x)
    j = W.partition.locate(y)
    out = W.values[i, j]
    return float(out) if out.ndim == 0 else out


def degree_function(W: StepKernel) -> np.ndarray:
    """Per-block degree ``d_k = sum_l B_kl m_l``; ``.max()`` gives the max degree."""
    return W.values @ W.block_measures


def max_degree(W) -> float:
    if isinstance(W, LipschitzGraphon):
        return W.max_degree()
    return float(degree_function(W).max())


def lp_norm(W: StepKernel, p: int = 1) -> float:
    if p not in (1, 2):
        raise ValueError(f"only p = 1 and p = 2 are supported, got {p}")
    m = W.block_measures
    weights = np.outer(m, m)
    return float(np.sum(np.abs(W.values) ** p * weights) ** (1.0 / p))


def cut_norm(W: StepKernel, max_blocks: int = CUT_NORM_MAX_BLOCKS) -> float:
    """Exact cut norm of a step kernel.

    The integral over ``S x T`` only depends on the fraction of each block
    covered by ``S`` and ``T`` and is bilinear in those fractions, so the
    supremum sits at a vertex of the unit box: ``S`` and ``T`` are unions of
    blocks.  All subsets ``S`` are enumerated; for each one the best ``T``
    takes every block where the induced linear form is positive (or every
    block where it is negative).
    """
    k = W.n_blocks
    if k > max_blocks:
        raise CapacityError(f"exact cut norm limited to {max_blocks} blocks, kernel has {k}")
    m = W.block_measures
    weighted = W.values * np.outer(m, m)
    best = 0.0
    chunk = 1 << 14
    total = 1 << k
    bits = np.arange(k)
    for start in range(0, total, chunk):
        masks = np.arange(start, min(start + chunk, total))
        s = ((masks[:, None] >> bits) & 1).astype(float)
        c = s @ weighted
        pos = np.clip(c, 0, None).sum(axis=1)
        neg = np.clip(-c, 0, None).sum(axis=1)
        best = max(best, float(pos.max()), float(neg.max()))
    return best


def _block_eigenvalues(W: StepKernel) -> np.ndarray:
    root = np.sqrt(W.block_measures)
    sym = root[:, None] * W.values * root[None, :]
    return np.linalg.eigvalsh(sym)[::-1]


def operator_spectrum(W: StepKernel, pad_to: int = 0) -> SpectrumReport:
    """Eigenvalues of the integral operator of ``W``.

    The nonzero spectrum of ``T_W`` equals that of ``M^{1/2} B M^{1/2}`` with
    ``M`` the diagonal of block widths.  With ``pad_to > 0`` the list is
    extended with zeros (or stripped of zero eigenvalues) to that length.
    """
    ev = _block_eigenvalues(W)
    rank = int(np.sum(np.abs(ev) > ZERO_TOL))
    if pad_to:
        if pad_to < rank:
            raise ValueError(f"cannot pad spectrum of rank {rank} to length {pad_to}")
        if pad_to >= ev.size:
            ev = np.concatenate([ev, np.zeros(pad_to - ev.size)])
        else:
            keep = np.sort(np.argsort(-np.abs(ev), kind="stable")[:pad_to])
            ev = ev[keep]
    ev = np.sort(ev)[::-1]
    return SpectrumReport(ev, rank, ev.size, W.approximate)


def operator_norm(W: StepKernel) -> float:
    ev = _block_eigenvalues(W)
    if W.range_class == GRAPHON:
        return float(ev[0])
    return float(np.max(np.abs(ev)))


def hs_norm(W: StepKernel) -> float:
    ev = _block_eigenvalues(W)
    return float(np.sqrt(np.sum(ev ** 2)))


def kernel_difference(A: StepKernel, B: StepKernel) -> StepKernel:
    """``A - B`` on the common refinement of both partitions."""
    part = A.partition.refine(B.partition)
    diff = A.refined(part).values - B.refined(part).values
    if A.range_class == GRAPHON and B.range_class == GRAPHON:
        rc = KERNEL_1
    elif np.all(np.abs(diff) <= 1):
        rc = KERNEL_1
    else:
        rc = KERNEL
    return StepKernel(part, diff, rc)


# -- file format -------------------------------------------------------------

WSB_VALUES = [
    [0.9, 0.7, 0.6, 0.5, 0.2],
    [0.7, 0.4, 0.1, 0.3, 0.1],
    [0.6, 0.1, 0.5, 0.9, 0.8],
    [0.5, 0.3, 0.9, 0.5, 0.5],
    [0.2, 0.1, 0.8, 0.5, 0.7],
]

_PRESET_DIR = Path(__file__).parent / "presets"


def list_presets() -> list[str]:
    return sorted(p.stem for p in _PRESET_DIR.glob("*.yaml"))


def parse_graphon(doc: dict, label: str | None = None) -> StepKernel:
    if not isinstance(doc, dict) or "values" not in doc:
        raise ValueError("graphon document needs a 'values' field")
    values = np.asarray(doc["values"], dtype=float)
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise ValueError("'values' must be a square matrix")
    boundaries = doc.get("boundaries")
    rc = doc.get("range_class", GRAPHON)
    return StepKernel.from_blocks(values, boundaries, rc, label=label or doc.get("name"))


def load_graphon(path) -> StepKernel:
    """Read a step graphon from a ``boundaries: [...]`` / ``values: [[...]]`` file."""
    path = Path(path)
    with open(path) as fh:
        doc = yaml.safe_load(fh)
    return parse_graphon(doc, label=str(path))


def dump_graphon(W: StepKernel, path, name: str | None = None) -> None:
    lines = []
    if name or W.label:
        lines.append(f"name: {name or W.label}")
    lines.append("boundaries: [" + ", ".join(repr(float(b)) for b in W.partition.boundaries) + "]")
    if W.range_class != GRAPHON:
        lines.append(f"range_class: {W.range_class}")
    lines.append("values:")
    for row in W.values:
        lines.append("  - [" + ", ".join(repr(float(v)) for v in row) + "]")
    Path(path).write_text("\n".join(lines) + "\n")


def load_preset(name: str) -> StepKernel:
    path = _PRESET_DIR / f"{name}.yaml"
    if not path.exists():
        raise KeyError(f"unknown preset {name!r}; available: {', '.join(list_presets())}")
    with open(path) as fh:
        doc = yaml.safe_load(fh)
    return parse_graphon(doc, label=name)


def resolve_graphon(name: str) -> StepKernel:
    """Preset name or path to a graphon file."""
    if name in list_presets():
        return load_preset(name)
    return load_graphon(name)

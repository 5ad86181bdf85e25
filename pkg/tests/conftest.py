import numpy as np
import pytest

from graphon_sis import SampledGraph, StepKernel, load_preset


@pytest.fixture
def wsb():
    return load_preset("wsb-paper")


@pytest.fixture
def wsb_uniform():
    return load_preset("wsb-uniform")


def complete_graph(n):
    return SampledGraph.from_adjacency(np.ones((n, n), dtype=np.uint8) - np.eye(n, dtype=np.uint8))


def empty_graph(n):
    return SampledGraph.from_adjacency(np.zeros((n, n), dtype=np.uint8))


def random_step_kernel(rng, max_blocks=8, low=-1.0, high=1.0, range_class="kernel_1"):
    k = int(rng.integers(1, max_blocks + 1))
    cuts = np.sort(rng.random(k - 1))
    boundaries = np.concatenate([[0.0], cuts, [1.0]])
    if np.any(np.diff(boundaries) <= 1e-9):
        boundaries = np.linspace(0, 1, k + 1)
    v = rng.uniform(low, high, size=(k, k))
    v = np.triu(v) + np.triu(v, 1).T
    return StepKernel.from_blocks(v, boundaries, range_class)

# The noise index in closed form against a direct simulation of the noisy
# linearized dynamics.

import numpy as np

from graphon_sis import (EpidemicParams, SampledGraph, adjacency_eigenvalues, load_preset,
                         noise_index_graph, threshold_params, sample_graph)
from graphon_sis.dynamics import SimulationConfig, monte_carlo_noise_index, simulate_linear_noisy

# Complete graph on 20 nodes, well below threshold.

n = 20
G = SampledGraph.from_adjacency(np.ones((n, n), np.uint8) - np.eye(n, dtype=np.uint8))
beta, delta = 0.04, 1.0
closed = noise_index_graph(adjacency_eigenvalues(G), delta, beta, 1.0)
cfg = SimulationConfig(dt=1e-3, horizon=50.0, trials=32, seed=0)
mc = monte_carlo_noise_index(G, EpidemicParams.explicit(n, beta, delta), cfg)
print(f"K_20: closed form {closed:.4f}, simulated {mc.estimate:.4f} +- {mc.std_error:.4f}")

# A graph sampled from the five-block graphon, with rates on the threshold at N=40.

W = load_preset("wsb-paper")
params = threshold_params(W, [40])
G = sample_graph(W, 50, seed=3)
beta, delta = params.rates(50)
closed = noise_index_graph(adjacency_eigenvalues(G), delta, beta, 1.0)
mc = monte_carlo_noise_index(G, params, SimulationConfig(dt=1e-3, horizon=20.0, trials=16, seed=1))
print(f"W_SB N=50: closed form {closed:.5f}, simulated {mc.estimate:.5f} +- {mc.std_error:.5f}")

# Euler-Maruyama overshoots the stationary variance by roughly delta*dt/2.

print(f"expected discretization bias ~ {delta * 1e-3 / 2:.2%}")

# One path, to see the fluctuation around zero.

traj = simulate_linear_noisy(G, beta, delta, 1.0, np.zeros(50), SimulationConfig(dt=1e-3, horizon=5.0,
                                                                                record_every=500))
for t, x in zip(traj.times, traj.states):
    print(f"t={t:4.1f}  mean square {np.mean(x ** 2):.5f}")

# How big does N have to be before the sampling bounds say anything?

from graphon_sis import (EpidemicParams, adjacency_eigenvalues, large_enough, load_preset,
                         operator_norm, phi, sample_graph, stability_threshold_graphon)
from graphon_sis.indices import l2_sampling_bound, phi_for

W = load_preset("wsb-paper")
L, K = W.lipschitz_constants
print(f"Lipschitz constants: L={L}, K={K}")

# phi(N) controls both the cut distance and the top eigenvalue gap.

for n in (40, 100, 1000, 10**4, 10**5):
    print(f"N={n:6d}  phi={phi(n, 0.02, L, K):.4f}  l2 bound={l2_sampling_bound(n, 0.02, L, K):.3f}")

# Size conditions for the sampling guarantee.

for n in (8, 30, 40):
    rep = large_enough(W, n, 0.02)
    print(n, {k: v["passed"] for k, v in rep.to_dict().items() if k.startswith("condition")})

# Check the top eigenvalue gap on a few samples.

lam = operator_norm(W)
for seed in range(5):
    G = sample_graph(W, 200, seed)
    gap = abs(adjacency_eigenvalues(G).lambda_max / 200 - lam)
    print(f"seed {seed}: |lambda_1 gap| = {gap:.4f} (phi = {phi_for(W, 200, 0.02):.4f})")

# Recovery rate that sits on the threshold at N=40; larger graphs are then
# covered by the sufficient condition.

params = EpidemicParams(0.1, 0.1 * (lam + phi_for(W, 40, 0.02)))
for n in (40, 41, 100):
    print(n, stability_threshold_graphon(W, n, params))

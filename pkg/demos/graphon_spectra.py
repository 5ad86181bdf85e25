# Spectra of step graphons and of graphs sampled from them.

import numpy as np

from graphon_sis import (adjacency_eigenvalues, cut_norm, degree_function, empirical_graphon,
                         kernel_difference, load_preset, lp_norm, operator_spectrum, sample_graph)

# The five-block graphon used throughout.  Its blocks have unequal widths, so
# the integral operator is the matrix B reweighted by the block measures.

W = load_preset("wsb-paper")
print("boundaries:", W.partition.boundaries)
print("block values:\n", W.values)
print("degrees per block:", degree_function(W))

# Nonzero spectrum of T_W; everything else is zero.

rep = operator_spectrum(W)
print("eigenvalues of T_W:", np.round(rep.eigenvalues, 4))

# Same matrix on uniform blocks gives a different operator.

U = load_preset("wsb-uniform")
print("uniform blocks, eigenvalues:", np.round(operator_spectrum(U).eigenvalues, 4))

# A sampled graph has eigenvalues lambda_i(A) / N equal to those of its own
# step graphon.  As N grows the top one approaches that of T_W.

for n in (50, 200, 800):
    G = sample_graph(W, n, seed=1)
    lam = adjacency_eigenvalues(G).eigenvalues / n
    WG = empirical_graphon(G)
    D = kernel_difference(W, WG)
    print(f"N={n:4d}  top eigenvalues {np.round(lam[:3], 4)}  "
          f"L2 distance {lp_norm(D, 2):.3f}")

# Cut norm of a small kernel, by enumeration over block subsets.

print("cut norm of W - 1/2:", cut_norm(kernel_difference(W, W.__class__.constant(0.5))))

# Relative error of the graphon noise index as the graph grows.
# Writes results/fig3.csv and, with matplotlib installed, results/fig3.png.

import numpy as np

from graphon_sis import ExperimentConfig, run_fig3
from graphon_sis.experiments import write_fig3_outputs

cfg = ExperimentConfig(graphon="wsb-paper", n_grid=[40, 100, 200, 400, 700, 1000],
                       seeds=10, outputs="results")
rows = run_fig3(cfg)
paths = write_fig3_outputs(rows, cfg)
print("wrote", *paths.values())

ns = np.array(cfg.n_grid)
means = np.array([np.mean([r.relative_error for r in rows if r.n == n]) for n in ns])
for n, m in zip(ns, means):
    print(f"N={n:5d}  mean relative error {m:.2e}")
print("ratio N=1000 / N=40:", means[-1] / means[0])

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    raise SystemExit(0)

fig, ax = plt.subplots(figsize=(5, 3.5))
ax.plot([r.n for r in rows], [r.relative_error for r in rows], ".", color="0.6", label="one graph")
ax.plot(ns, means, "o-", color="C0", label="mean over seeds")
ax.set_xlabel("N")
ax.set_ylabel("relative error")
ax.set_yscale("log")
ax.legend()
fig.tight_layout()
fig.savefig(f"{cfg.outputs}/fig3.png", dpi=150)
print("wrote", f"{cfg.outputs}/fig3.png")

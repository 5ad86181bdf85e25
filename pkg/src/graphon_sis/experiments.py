"""Relative-error sweep over graph sizes and result files.

Output files start with ``# key: value`` metadata lines (seed, package
version, config hash) followed by plain CSV or JSON.  ``fig3.csv`` has the
columns ``n,j_graph,j_graphon,delta_noise,theorem_bound,relative_error,seed``;
rebuilding the curve is one external command, e.g.::

    python -c "import pandas as pd; pd.read_csv('fig3.csv', comment='#').groupby('n').relative_error.mean().plot()"
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .graphon import StepKernel, operator_norm, resolve_graphon
from .indices import FIXED_BETA, EpidemicParams, noise_report, phi_for
from .sampling import sample_graph

OUTPUT_ENV = "GRAPHON_SIS_OUTPUT"
FIG3_COLUMNS = ["n", "j_graph", "j_graphon", "delta_noise", "theorem_bound", "relative_error", "seed"]


def derive_seed(master: int, n: int) -> int:
    """64-bit graph seed for size ``n`` under a master seed."""
    ss = np.random.SeedSequence(int(master), spawn_key=(int(n),))
    return int(ss.generate_state(1, np.uint64)[0])


def threshold_params(W: StepKernel, n_grid, beta_bar: float = 0.1, nu: float = 0.02, sigma: float = 1.0,
                 phi_at: int | str = 40, scaling: str = FIXED_BETA,
                 delta_bar: float | None = None) -> EpidemicParams:
    """Rates whose recovery constant sits exactly on the graphon stability threshold.

    ``delta_bar = beta_bar * (||T_W|| + phi(N0))`` with ``phi_at = N0``; since
    ``phi`` decreases in ``N`` this satisfies the threshold strictly for every
    ``N > N0``.  With ``phi_at = "running"`` the threshold is recomputed at
    every size, which needs explicit per-size rates.
    """
    if delta_bar is not None:
        return EpidemicParams(beta_bar, delta_bar, sigma, nu, scaling)
    norm = operator_norm(W)
    if phi_at == "running":
        rates = {}
        for n in n_grid:
            d = beta_bar * (norm + phi_for(W, n, nu))
            ref = EpidemicParams(beta_bar, d, sigma, nu, scaling)
            rates[int(n)] = ref.rates(n)
        return EpidemicParams(beta_bar, beta_bar * norm, sigma, nu, rates)
    d = beta_bar * (norm + phi_for(W, int(phi_at), nu))
    return EpidemicParams(beta_bar, d, sigma, nu, scaling)


@dataclass
class ExperimentConfig:
    graphon: str = "wsb-paper"
    n_grid: list[int] = field(default_factory=lambda: [40, 100, 200, 400, 700, 1000])
    beta_bar: float = 0.1
    delta_bar: float | None = None
    sigma: float = 1.0
    nu: float = 0.02
    scaling: str = FIXED_BETA
    seeds: list[int] = field(default_factory=lambda: [0])
    outputs: str | None = None
    phi_at: int | str = 40
    workers: int = 1

    def __post_init__(self):
        if isinstance(self.seeds, int):
            self.seeds = list(range(self.seeds))
        self.seeds = [int(s) for s in self.seeds]
        self.n_grid = [int(n) for n in self.n_grid]
        if not self.seeds:
            raise ValueError("seeds must be nonempty")
        if any(n < 2 for n in self.n_grid):
            raise ValueError("every n must be at least 2")
        if self.n_grid != sorted(set(self.n_grid)):
            raise ValueError("n_grid must be strictly increasing")
        if self.phi_at != "running":
            self.phi_at = int(self.phi_at)
        if self.delta_bar in ("auto", None):
            self.delta_bar = None
        if self.outputs is None:
            self.outputs = os.environ.get(OUTPUT_ENV, "results")

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            doc = yaml.safe_load(fh) or {}
        known = {f.name for f in fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
        return cls(**doc)

    def to_dict(self) -> dict:
        return asdict(self)

    def digest(self) -> str:
        d = self.to_dict()
        d.pop("outputs")
        d.pop("workers")
        blob = json.dumps(d, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def params(self, W: StepKernel) -> EpidemicParams:
        return threshold_params(W, self.n_grid, self.beta_bar, self.nu, self.sigma, self.phi_at,
                            self.scaling, self.delta_bar)


@dataclass(frozen=True)
class Fig3Row:
    n: int
    j_graph: float
    j_graphon: float
    delta_noise: float
    theorem_bound: float
    relative_error: float
    seed: int
    note: str = ""

    def values(self) -> list:
        return [getattr(self, c) for c in FIG3_COLUMNS]


def compute_row(W: StepKernel, params: EpidemicParams, n: int, seed: int) -> Fig3Row:
    """Sample one graph and compare both indices; failures become NaN rows with a note."""
    try:
        G = sample_graph(W, n, seed)
        rep = noise_report(W, G, params)
    except ValueError as exc:
        nan = math.nan
        return Fig3Row(n, nan, nan, nan, nan, nan, seed, f"{type(exc).__name__}: {exc}")
    return Fig3Row(n, rep.j_graph, rep.j_graphon, rep.delta_noise, rep.theorem_bound,
                   rep.relative_error, seed, "; ".join(rep.notes))


def run_fig3(cfg: ExperimentConfig, W: StepKernel | None = None) -> list[Fig3Row]:
    """Relative error of the graphon index for one sampled graph per (size, master seed)."""
    if W is None:
        W = resolve_graphon(cfg.graphon)
    params = cfg.params(W)
    jobs = [(n, derive_seed(m, n)) for m in cfg.seeds for n in cfg.n_grid]
    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            rows = list(pool.map(lambda job: compute_row(W, params, *job), jobs))
    else:
        rows = [compute_row(W, params, n, s) for n, s in jobs]
    return sorted(rows, key=lambda r: (r.n, r.seed))


def summarize(rows: list[Fig3Row]) -> list[dict]:
    out = []
    for n in sorted({r.n for r in rows}):
        rel = np.array([r.relative_error for r in rows if r.n == n and not math.isnan(r.relative_error)])
        if rel.size == 0:
            continue
        q05, q50, q95 = np.quantile(rel, [0.05, 0.5, 0.95])
        out.append({"n": n, "count": int(rel.size), "mean": math.fsum(rel) / rel.size,
                    "q05": float(q05), "median": float(q50), "q95": float(q95)})
    return out


# -- file I/O -------------------------------------------------------------------

def metadata(cfg: ExperimentConfig | None = None, **extra) -> dict:
    meta = {"package": "graphon_sis", "version": __version__}
    if cfg is not None:
        meta["seed"] = ",".join(str(s) for s in cfg.seeds)
        meta["config_hash"] = cfg.digest()
    meta.update({k: v for k, v in extra.items() if v is not None})
    return meta


def _header(meta: dict) -> str:
    return "".join(f"# {k}: {v}\n" for k, v in meta.items())


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def format_fig3_csv(rows: list[Fig3Row], meta: dict | None = None) -> str:
    buf = io.StringIO()
    buf.write(_header(meta or {}))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(FIG3_COLUMNS)
    for r in rows:
        w.writerow([_fmt(v) for v in r.values()])
    return buf.getvalue()


def parse_fig3_csv(text: str) -> tuple[list[Fig3Row], dict]:
    meta = {}
    body = []
    for line in text.splitlines():
        if line.startswith("#"):
            k, _, v = line[1:].partition(":")
            meta[k.strip()] = v.strip()
        elif line.strip():
            body.append(line)
    reader = csv.reader(body)
    header = next(reader)
    if header != FIG3_COLUMNS:
        raise ValueError(f"unexpected columns {header}")
    rows = []
    for rec in reader:
        d = dict(zip(header, rec))
        rows.append(Fig3Row(int(d["n"]), float(d["j_graph"]), float(d["j_graphon"]),
                            float(d["delta_noise"]), float(d["theorem_bound"]),
                            float(d["relative_error"]), int(d["seed"])))
    return rows, meta


def write_fig3_outputs(rows: list[Fig3Row], cfg: ExperimentConfig, outdir=None) -> dict[str, Path]:
    """Write ``fig3.csv`` plus, when present, failures and a per-size summary."""
    outdir = Path(outdir or cfg.outputs)
    outdir.mkdir(parents=True, exist_ok=True)
    meta = metadata(cfg, graphon=cfg.graphon)
    paths = {"fig3": outdir / "fig3.csv"}
    paths["fig3"].write_text(format_fig3_csv(rows, meta))
    failed = [r for r in rows if math.isnan(r.j_graph)]
    if failed:
        p = outdir / "fig3_failures.csv"
        lines = [_header(meta), "n,seed,reason\n"]
        lines += [f"{r.n},{r.seed},\"{r.note}\"\n" for r in failed]
        p.write_text("".join(lines))
        paths["failures"] = p
    if len(cfg.seeds) > 1:
        p = outdir / "fig3_summary.csv"
        buf = io.StringIO()
        buf.write(_header(meta))
        w = csv.DictWriter(buf, ["n", "count", "mean", "q05", "median", "q95"], lineterminator="\n")
        w.writeheader()
        for rec in summarize(rows):
            w.writerow({k: _fmt(v) for k, v in rec.items()})
        p.write_text(buf.getvalue())
        paths["summary"] = p
    return paths


def json_safe(obj):
    """Replace NaN/inf with None and numpy scalars/arrays with plain Python values."""
    if isinstance(obj, dict):
        return {k: json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [json_safe(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return json_safe(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dumps_json(payload: dict, meta: dict | None = None) -> str:
    doc = {"meta": meta or {}}
    doc.update(payload)
    return json.dumps(json_safe(doc), indent=2, sort_keys=False) + "\n"

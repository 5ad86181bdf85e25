"""Command-line interface: ``graphon-sis <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 computation error.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .dynamics import (SimulationConfig, monte_carlo_noise_index, simulate_linear,
                       simulate_linear_noisy, simulate_sis_nonlinear, write_trajectory_csv)
from .experiments import (ExperimentConfig, dumps_json, metadata, threshold_params, run_fig3,
                          write_fig3_outputs)
from .graphon import operator_norm, operator_spectrum, resolve_graphon
from .indices import (BoundInapplicableError, EpidemicParams, large_enough, noise_index_graph,
                      noise_index_graphon, noise_report, phi_for, stability_threshold_graph,
                      stability_threshold_graphon, theorem_bound)
from .sampling import format_edge_list, read_edge_list, sample_graph
from .spectral import adjacency_eigenvalues, normalized_spectrum


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _phi_at(text: str):
    return text if text == "running" else int(text)


def _add_graphon(p, required=False):
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--preset", help="bundled graphon preset (e.g. wsb-paper)")
    g.add_argument("--graphon", metavar="FILE", help="step graphon file")


def _add_params(p):
    p.add_argument("--beta-bar", type=float, default=0.1)
    p.add_argument("--delta-bar", type=float, default=None,
                   help="recovery constant; default sits on the graphon threshold at --phi-at")
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--nu", type=float, default=0.02)
    p.add_argument("--scaling", choices=["fixed_beta", "fixed_delta"], default="fixed_beta")
    p.add_argument("--phi-at", type=_phi_at, default=40, metavar="N0|running")


def _graphon_from(args):
    name = args.preset or args.graphon
    return resolve_graphon(name) if name else None


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _params(args, W, n):
    if W is None:
        if args.delta_bar is None:
            raise UsageError("--delta-bar is required without a graphon")
        return EpidemicParams(args.beta_bar, args.delta_bar, args.sigma, args.nu, args.scaling)
    return threshold_params(W, [n], args.beta_bar, args.nu, args.sigma, args.phi_at, args.scaling,
                        args.delta_bar)


def cmd_spectrum(args):
    meta = metadata()
    if args.graph:
        G = read_edge_list(args.graph)
        rep = normalized_spectrum(adjacency_eigenvalues(G))
        payload = {"source": args.graph, "spectrum": rep.to_dict(),
                   "adjacency_eigenvalues": (rep.eigenvalues * G.n).tolist()}
    else:
        W = _graphon_from(args)
        if W is None:
            raise UsageError("give --preset, --graphon or --graph")
        rep = operator_spectrum(W, args.pad)
        payload = {"source": W.label, "spectrum": rep.to_dict(), "operator_norm": operator_norm(W)}
    _emit(dumps_json(payload, meta), args.output)


def cmd_sample(args):
    W = _graphon_from(args)
    G = sample_graph(W, args.n, args.seed)
    header = metadata(seed=args.seed, graphon=W.label)
    _emit(format_edge_list(G, header), args.output)


def cmd_index(args):
    W = _graphon_from(args)
    meta = metadata(graphon=W.label if W is not None else None)
    if args.graph:
        G = read_edge_list(args.graph)
        meta["seed"] = G.source_seed
        params = _params(args, W, G.n)
        if W is not None:
            payload = noise_report(W, G, params).to_dict()
        else:
            beta, delta = params.rates(G.n)
            payload = {"j_graph": noise_index_graph(adjacency_eigenvalues(G), delta, beta, params.sigma)}
    else:
        if W is None or args.n is None:
            raise UsageError("give --graph, or a graphon together with -n")
        params = _params(args, W, args.n)
        payload = {"j_graphon": noise_index_graphon(W, args.n, params)}
        try:
            payload["theorem_bound"] = theorem_bound(W, args.n, params).value
        except BoundInapplicableError as exc:
            payload["theorem_bound"] = None
            payload["notes"] = [f"bound inapplicable: {exc}"]
    beta, delta = params.rates(G.n if args.graph else args.n)
    meta.update(beta_N=beta, delta_N=delta)
    _emit(dumps_json(payload, meta), args.output)


def cmd_check(args):
    W = _graphon_from(args)
    n = args.n
    if args.graph:
        G = read_edge_list(args.graph)
        n = G.n
    if n is None:
        raise UsageError("give -n or --graph")
    params = _params(args, W, n)
    payload = {"n": n, "phi": phi_for(W, n, params.nu),
               "large_enough": large_enough(W, n, params.nu).to_dict(),
               "graphon_stability": vars(stability_threshold_graphon(W, n, params))}
    if args.graph:
        beta, delta = params.rates(n)
        payload["graph_stability"] = vars(stability_threshold_graph(adjacency_eigenvalues(G), delta, beta))
    _emit(dumps_json(payload, metadata(graphon=W.label)), args.output)


def cmd_simulate(args):
    G = read_edge_list(args.graph)
    cfg = SimulationConfig(args.dt, args.horizon, args.burn_in, args.trials, args.seed, args.record_every)
    meta = metadata(seed=args.seed, mode=args.mode)
    if args.mode == "montecarlo":
        params = EpidemicParams.explicit(G.n, args.beta, args.delta, args.sigma)
        mc = monte_carlo_noise_index(G, params, cfg)
        closed = noise_index_graph(adjacency_eigenvalues(G), args.delta, args.beta, args.sigma)
        payload = {"estimate": mc.estimate, "std_error": mc.std_error, "closed_form": closed}
        _emit(dumps_json(payload, meta), args.output)
        return
    rng = np.random.default_rng(args.seed)
    x0 = np.full(G.n, args.x0) if args.x0 is not None else rng.random(G.n)
    if args.mode == "nonlinear":
        traj = simulate_sis_nonlinear(G, args.beta, args.delta, x0, cfg)
    elif args.mode == "linear":
        traj = simulate_linear(G, args.beta, args.delta, x0, cfg)
    else:
        traj = simulate_linear_noisy(G, args.beta, args.delta, args.sigma, x0, cfg)
    if args.csv:
        write_trajectory_csv(traj, args.csv, meta)
    payload = {"scheme": traj.scheme, "t_final": float(traj.times[-1]),
               "final_max_abs": float(np.abs(traj.final).max()),
               "final_mean_square": float(np.mean(traj.final ** 2)),
               "diagnostics": traj.diagnostics}
    _emit(dumps_json(payload, meta), args.output)


def cmd_fig3(args):
    if args.config:
        cfg = ExperimentConfig.load(args.config)
    else:
        cfg = ExperimentConfig()
    overrides = {k: getattr(args, k) for k in ("graphon", "n_grid", "seeds", "outputs", "workers",
                                               "phi_at", "beta_bar", "nu", "sigma")
                 if getattr(args, k) is not None}
    if args.n_seeds is not None:
        overrides["seeds"] = list(range(args.n_seeds))
    if overrides:
        d = cfg.to_dict()
        d.update(overrides)
        cfg = ExperimentConfig(**d)
    rows = run_fig3(cfg)
    paths = write_fig3_outputs(rows, cfg)
    for p in paths.values():
        print(p)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="graphon-sis", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("spectrum", help="operator or normalized adjacency spectrum as JSON")
    _add_graphon(p)
    p.add_argument("--graph", metavar="EDGELIST")
    p.add_argument("--pad", type=int, default=0, help="zero-pad graphon spectrum to this length")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("sample", help="sample a graph from a graphon as an edge list")
    _add_graphon(p, required=True)
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("index", help="noise indices and approximation bound as JSON")
    _add_graphon(p)
    p.add_argument("--graph", metavar="EDGELIST")
    p.add_argument("-n", type=int)
    _add_params(p)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("check", help="size conditions and stability criteria")
    _add_graphon(p, required=True)
    p.add_argument("--graph", metavar="EDGELIST")
    p.add_argument("-n", type=int)
    _add_params(p)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("simulate", help="simulate epidemic dynamics on a graph")
    p.add_argument("--graph", metavar="EDGELIST", required=True)
    p.add_argument("--mode", choices=["nonlinear", "linear", "noisy", "montecarlo"], default="nonlinear")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--horizon", type=float, default=10.0)
    p.add_argument("--burn-in", type=float, default=0.5)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--record-every", type=int, default=1)
    p.add_argument("--x0", type=float, default=None, help="constant initial state (default uniform random)")
    p.add_argument("--csv", metavar="FILE", help="export the trajectory as CSV")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fig3", help="relative error of the graphon index across graph sizes")
    p.add_argument("--config", metavar="FILE", help="YAML experiment config")
    p.add_argument("--graphon", help="preset name or graphon file")
    p.add_argument("--n-grid", type=int, nargs="+", dest="n_grid")
    seeds = p.add_mutually_exclusive_group()
    seeds.add_argument("--seeds", type=int, nargs="+", help="master seeds")
    seeds.add_argument("--n-seeds", type=int, help="use master seeds 0..N-1")
    p.add_argument("--beta-bar", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--nu", type=float)
    p.add_argument("--phi-at", type=_phi_at)
    p.add_argument("--workers", type=int)
    p.add_argument("--out", dest="outputs")
    p.set_defaults(func=cmd_fig3)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args)
    except UsageError as exc:
        print(f"graphon-sis {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, KeyError, OSError, FloatingPointError) as exc:
        print(f"graphon-sis {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

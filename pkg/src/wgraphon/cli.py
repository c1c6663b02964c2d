"""Command line interface.

Subcommands:

* ``simulate`` -- run the simulation sweep from a JSON config.
* ``fit`` -- fit the SBM ensemble to an edge list and emit all artifacts.
* ``motif`` -- estimate one motif probability for an observed network.
* ``graphon-grid`` -- posterior-mean graphon grid for an observed network.
"""

from __future__ import annotations

import argparse
import json
import sys

from .motifs import builtin_motifs, empirical_frequency, mu_averaged, parse_motif
from .graphs import read_edge_list
from .posterior import grid_estimate
from .simulate import SimConfig, analyze_network, run_simulation, write_grid_csv
from .vbem import FitConfig, fit_ensemble


def _add_simulate(sub):
    p = sub.add_parser("simulate", help="run a simulation sweep")
    p.add_argument("--config", help="JSON file mirroring SimConfig fields")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--paper-scale", action="store_true", help="full design (100 replicates, Q up to 10)")
    p.add_argument("--seed", type=int, default=None, help="override master seed")


def _add_fit(sub):
    p = sub.add_parser("fit", help="fit an observed network")
    p.add_argument("--input", required=True, help="edge list file")
    p.add_argument("--qmax", type=int, default=15)
    p.add_argument("--grid", type=int, default=100, help="grid size per axis")
    p.add_argument("--motifs", default="triangle,square", help="comma-separated motif names")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=5)


def _add_motif(sub):
    p = sub.add_parser("motif", help="estimate a motif probability")
    p.add_argument("--input", required=True, help="edge list file")
    p.add_argument("--motif", required=True, help="builtin name or 0/1 row-strings like 011,101,110")
    p.add_argument("--method", choices=["posterior", "empirical"], default="posterior")
    p.add_argument("--qmax", type=int, default=10)
    p.add_argument("--samples", type=int, default=100_000, help="tuples for empirical mode")
    p.add_argument("--seed", type=int, default=0)


def _add_grid(sub):
    p = sub.add_parser("graphon-grid", help="posterior-mean graphon grid")
    p.add_argument("--input", required=True, help="edge list file")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--qmax", type=int, default=10)
    p.add_argument("--grid", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--map-only", action="store_true", help="use the MAP-Q fit instead of averaging")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wgraphon", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    _add_simulate(sub)
    _add_fit(sub)
    _add_motif(sub)
    _add_grid(sub)
    return parser


def _cmd_simulate(args) -> int:
    if args.config:
        with open(args.config) as fh:
            cfg_json = json.load(fh)
        if args.paper_scale:
            config = SimConfig.from_json(cfg_json)
        else:
            config = SimConfig.desk_scale(**cfg_json)
    else:
        config = SimConfig() if args.paper_scale else SimConfig.desk_scale()
    if args.seed is not None:
        config = SimConfig.from_json({**config.to_json(), "seed": args.seed})
    rows = run_simulation(config, args.out)
    print(f"wrote {len(rows)} replicate rows to {args.out}")
    return 0


def _cmd_fit(args) -> int:
    motifs = [m for m in args.motifs.split(",") if m]
    report = analyze_network(
        args.input,
        q_max=args.qmax,
        grid_m=args.grid,
        motifs=motifs,
        out_dir=args.out,
        seed=args.seed,
        restarts=args.restarts,
    )
    print(json.dumps({"n": report.n, "num_edges": report.num_edges, "map_q": report.map_q}))
    return 0


def _cmd_motif(args) -> int:
    graph = read_edge_list(args.input)
    motif = parse_motif(args.motif)
    if args.method == "empirical":
        mode = "sampled" if graph.n > 60 else "exhaustive"
        mu = empirical_frequency(graph, motif, mode=mode, n_samples=args.samples, seed=args.seed)
        out = {"motif": args.motif, "method": "empirical", "mu": mu}
    else:
        ensemble = fit_ensemble(graph, args.qmax, config=FitConfig(seed=args.seed))
        out = {
            "motif": args.motif,
            "method": "posterior",
            "mu": mu_averaged(ensemble, motif),
            "mu_map": mu_averaged(ensemble, motif, map_only=True),
        }
    print(json.dumps(out))
    return 0


def _cmd_grid(args) -> int:
    graph = read_edge_list(args.input)
    ensemble = fit_ensemble(graph, args.qmax, config=FitConfig(seed=args.seed))
    source = ensemble.map_fit if args.map_only else ensemble
    grid = grid_estimate(source, args.grid).as_array()
    write_grid_csv(args.out, grid)
    print(f"wrote {args.grid}x{args.grid} grid to {args.out} (MAP Q = {ensemble.map_q})")
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "fit": _cmd_fit,
    "motif": _cmd_motif,
    "graphon-grid": _cmd_grid,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return _COMMANDS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point: ``blindgraph {solve,phase,sweep,rho,epidemic,identify}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace

import numpy as np

from .errors import BlindGraphError
from .experiments import ExperimentSpec, GraphSpec, emit_outputs, gen_graph, run_experiment
from .experiments.runners import canonical_solver
from .graph import read_edge_list, read_matrix_csv
from .lifting import build_lifting
from .solvers import SolverConfig, solve_l1, solve_noisy, solve_nuclear_l21, solve_reweighted
from .spectral import build_filter_basis, build_shift
from .theory import check_identifiability

KIND_OF = {"phase": "phase", "sweep": "sampling_sweep", "rho": "rho_correlation", "epidemic": "epidemic"}
DEFAULT_SOLVERS = {"phase": ["reweighted"], "sweep": ["proposed", "proposed_known_support", "ls", "am"],
                   "rho": ["l1"], "epidemic": ["reweighted"]}


class ConfigError(Exception):
    pass


def _kv(items) -> dict:
    out = {}
    for it in items or []:
        if "=" not in it:
            raise ConfigError(f"expected key=value, got {it!r}")
        k, v = it.split("=", 1)
        try:
            out[k] = json.loads(v)
        except json.JSONDecodeError:
            out[k] = v
    return out


def _common(p):
    p.add_argument("--seed", type=int, default=None, help="master seed")
    p.add_argument("--out", default=None, help="output directory (file for solve/identify)")
    p.add_argument("--tau", type=float, default=None, help="row-sparsity weight")
    p.add_argument("-v", "--verbose", action="store_true")


def _sweep_args(p):
    p.add_argument("--json-spec", default=None, help="load a full ExperimentSpec from JSON; flags override it")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--solver", action="append", default=None,
                   help="solver name; repeat for several (l1|n21|rw|rwP or sweep names)")
    p.add_argument("--graph", default=None, help="graph kind (er, small_world, karate, from_file, ...)")
    p.add_argument("--graph-param", action="append", default=None, metavar="KEY=VALUE")
    p.add_argument("--S", type=int, nargs="+", default=None, dest="S_values")
    p.add_argument("--L", type=int, nargs="+", default=None, dest="L_values")
    p.add_argument("--P", type=int, nargs="+", default=None, dest="P_values")
    p.add_argument("--observed", type=int, nargs="+", default=None, dest="observed_counts")
    p.add_argument("--option", action="append", default=None, metavar="KEY=VALUE",
                   help="experiment-specific option, value parsed as JSON when possible")
    p.add_argument("--no-connected", action="store_true", help="allow disconnected random graphs")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="blindgraph", description="Blind graph-filter identification")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="recover (x, h) from one observed output")
    _common(s)
    s.add_argument("--edges", required=True, help="edge list of the graph")
    s.add_argument("--directed", action="store_true")
    s.add_argument("--shift", default="adjacency", choices=["adjacency", "laplacian"])
    s.add_argument("--output", required=True, help="observed output: one value per line or per CSV field")
    s.add_argument("--observed-nodes", default=None, help="file with the observed node indices")
    s.add_argument("--sampling", default="vertex", choices=["vertex", "frequency"])
    s.add_argument("--L", type=int, required=True)
    s.add_argument("--solver", default="rw", help="l1|n21|rw")
    s.add_argument("--noise-eps", type=float, default=None, help="solve the noise-aware variant with this radius")

    for name in ("phase", "sweep", "rho", "epidemic"):
        p = sub.add_parser(name, help=f"run the {KIND_OF[name]} experiment")
        _common(p)
        _sweep_args(p)

    i = sub.add_parser("identify", help="brute-force the identifiability condition on a small graph")
    _common(i)
    i.add_argument("--graph", default="directed_cycle")
    i.add_argument("--edges", default=None)
    i.add_argument("--n", type=int, default=6)
    i.add_argument("--L", type=int, required=True)
    i.add_argument("--S", type=int, required=True)
    i.add_argument("--supports", default="adjacent", choices=["all", "adjacent", "equally_spaced"])
    return ap


def _spec_from_args(args) -> ExperimentSpec:
    kind = KIND_OF[args.command]
    if args.json_spec:
        with open(args.json_spec) as fh:
            base = json.load(fh)
        if base.get("kind", kind) != kind:
            raise ConfigError(f"spec kind {base.get('kind')!r} does not match subcommand {args.command!r}")
        base["kind"] = kind
    else:
        base = {"kind": kind, "solvers": DEFAULT_SOLVERS[args.command]}
        if kind == "epidemic":
            base["graph"] = {"kind": "karate"}
            base["observed_counts"] = [16, 20, 24, 28, 34]
        if kind == "sampling_sweep":
            base["graph"] = {"kind": "er", "n": 66, "p": 0.2}
            base["observed_counts"] = [20, 30, 40, 50, 60, 66]
    for field in ("trials", "seed", "S_values", "L_values", "P_values", "observed_counts"):
        v = getattr(args, field, None)
        if v is not None:
            base[field] = v
    if args.solver:
        base["solvers"] = [canonical_solver(s) for s in args.solver]
    if args.graph or args.graph_param:
        g = base.get("graph", {"kind": "er"})
        g = dict(g.get("params", {}), kind=g["kind"]) if "params" in g else dict(g)
        if args.graph:
            g = {"kind": args.graph}
        g.update(_kv(args.graph_param))
        base["graph"] = g
    if args.option:
        base["options"] = {**base.get("options", {}), **_kv(args.option)}
    if args.no_connected:
        base["connected"] = False
    cfg = base.get("solver_config", {})
    if args.tau is not None:
        cfg = {**cfg, "tau": args.tau}
    base["solver_config"] = cfg
    if args.out:
        base["out_dir"] = args.out
    try:
        return ExperimentSpec.from_dict(base)
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigError(str(exc)) from exc


def _read_vector(path) -> np.ndarray:
    return np.asarray(read_matrix_csv(path)).ravel()


def _cmd_solve(args) -> int:
    g = read_edge_list(args.edges, directed=args.directed)
    sp = build_shift(g, args.shift)
    basis = build_filter_basis(sp, args.L)
    y = _read_vector(args.output)
    obs = None
    if args.observed_nodes:
        obs = _read_vector(args.observed_nodes).real.astype(int)
    elif y.size != g.n_nodes:
        raise ConfigError(f"output has {y.size} entries but the graph has {g.n_nodes} nodes; pass --observed-nodes")
    op = build_lifting(sp, basis, obs, args.sampling)
    cfg = SolverConfig(tau=1.0 if args.tau is None else args.tau, rng_seed=args.seed or 0, noise_eps=args.noise_eps)
    if args.noise_eps:
        sol = solve_noisy(op, y, cfg)
    else:
        name = canonical_solver(args.solver)
        fn = {"l1": solve_l1, "nuclear_l21": solve_nuclear_l21, "reweighted": solve_reweighted}.get(name)
        if fn is None:
            raise ConfigError(f"unknown solver {args.solver!r} for solve")
        sol = fn(op, y, cfg)
    text = sol.to_json(seed=args.seed)
    _write_text(args.out, text)
    return 0


def _write_text(path, text):
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _cmd_identify(args) -> int:
    if args.edges:
        g = read_edge_list(args.edges)
        sp = build_shift(g)
    else:
        g = gen_graph(args.graph, args.seed, n=args.n)
        sp = build_shift(g, "directed_cycle" if args.graph == "directed_cycle" else "adjacency")
    res = check_identifiability(sp, args.L, args.S, args.supports)
    out = {"identifiable": res.identifiable, "min_distinct": res.min_distinct, "N": sp.n, "L": args.L, "S": args.S,
           "supports": args.supports,
           "witness_rows": None if res.witness_rows is None else [int(v) for v in res.witness_rows],
           "witness_support": None if res.witness_support is None else [int(v) for v in res.witness_support]}
    _write_text(args.out, json.dumps(out, sort_keys=True))
    return 0


def _cmd_experiment(args) -> int:
    spec = _spec_from_args(args)
    res = run_experiment(spec)
    out = spec.out_dir or f"results_{spec.kind}"
    paths = emit_outputs(res, out)
    logging.getLogger(__name__).info("wrote %s", ", ".join(paths))
    print(json.dumps({"kind": spec.kind, "out_dir": out, "records": len(res.records)}))
    return 0


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.command == "solve":
            return _cmd_solve(args)
        if args.command == "identify":
            return _cmd_identify(args)
        return _cmd_experiment(args)
    except (ConfigError, BlindGraphError) as exc:
        print(f"blindgraph: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"blindgraph: I/O error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"blindgraph: invalid configuration: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

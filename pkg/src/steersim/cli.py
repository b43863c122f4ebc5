"""Command-line entry point ``steersim``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np

from .baselines import Method
from .controller import evaluate, plan
from .errors import SteersimError
from .harness import FIGURES, ScenarioConfig, run_figure, run_sweep, trial_rng
from .mimo import NoiseModel, sample_rayleigh
from .netgraph import (
    NetworkState,
    break_cycles,
    connected_components,
    detect_cycles,
    parse_edge_list,
    topological_order,
)


def _summary(result) -> str:
    lines = []
    for r in result.rows:
        lines.append(f"{result.axis_name}={r.axis:<6g} {r.method:<12} {r.mean_se:9.4f} +/- {r.ci95:.4f}"
                     f"  infeasible={r.infeasible_rate:.3f}")
    return "\n".join(lines)


def cmd_figure(args) -> int:
    result = run_figure(args.name, seed=args.seed, trials=args.trials, out=args.out, workers=args.workers)
    print(_summary(result))
    print(f"wrote {Path(args.out) / (args.name + '.csv')}", file=sys.stderr)
    return 0


def cmd_sweep(args) -> int:
    cfg = ScenarioConfig.from_json(args.config)
    name = args.name or Path(args.config).stem
    result = run_sweep(cfg, name=name, workers=args.workers)
    result.write(args.out, name)
    print(_summary(result))
    print(f"wrote {Path(args.out) / (name + '.csv')}", file=sys.stderr)
    return 0


def analyze_graph(g) -> dict:
    comps, deleted = [], set()
    for comp in connected_components(g):
        res = break_cycles(comp)
        deleted |= res.deleted
        comps.append({
            "vertices": list(comp.vertices),
            "cycles": [list(c) for c in detect_cycles(comp)],
            "deleted": sorted(res.deleted),
            "order": topological_order(res.residual),
        })
    return {
        "vertices": list(g.vertices),
        "edges": [[a, b, w] for a, b, w in g.edges],
        "feasible_for_is": not detect_cycles(g),
        "deleted": sorted(deleted),
        "order": topological_order(g.without(deleted)),
        "components": comps,
    }


def cmd_graph(args) -> int:
    g = parse_edge_list(Path(args.edges).read_text(encoding="utf-8"))
    print(json.dumps(analyze_graph(g), indent=2))
    return 0


def _complex_matrix(entry) -> np.ndarray:
    # either {"re": [[...]], "im": [[...]]} or nested [re, im] pairs
    if isinstance(entry, dict):
        return np.asarray(entry["re"], dtype=float) + 1j * np.asarray(entry.get("im", 0.0), dtype=float)
    a = np.asarray(entry, dtype=float)
    if a.ndim != 3 or a.shape[-1] != 2:
        raise ValueError("channel must be {'re': .., 'im': ..} or a matrix of [re, im] pairs")
    return a[..., 0] + 1j * a[..., 1]


def load_state(data: dict) -> NetworkState:
    """Build a :class:`NetworkState` from its JSON form.

    ``channels`` maps ``"m,n"`` to a complex matrix; when absent, Rayleigh
    channels are drawn for every hearing pair from ``seed`` (default 0).
    """
    known = {"connection", "transmitting", "channels", "p_t", "seed", "n_t", "n_r"}
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown state fields: {sorted(unknown)}")
    C = np.asarray(data["connection"], dtype=int)
    T = np.asarray(data.get("transmitting", np.ones(C.shape[0], dtype=int)), dtype=int)
    p_t = float(data.get("p_t", 1.0))
    if "channels" in data:
        channels = {}
        for key, entry in data["channels"].items():
            m, n = (int(x) for x in key.split(","))
            channels[(m, n)] = _complex_matrix(entry)
    else:
        rng = trial_rng(int(data.get("seed", 0)), 0)
        n_t, n_r = int(data.get("n_t", 2)), int(data.get("n_r", 2))
        K = C.shape[0]
        channels = {}
        for m in range(K):
            for n in range(K):
                H = sample_rayleigh(rng, n_r, n_t)
                if C[n, m]:
                    channels[(m, n)] = H
    return NetworkState(C, T, channels, p_t)


def cmd_plan(args) -> int:
    data = json.loads(Path(args.state).read_text(encoding="utf-8"))
    state = load_state(data)
    pl = plan(state, Method(args.method))
    report = evaluate(pl, state, NoiseModel.from_snr_db(args.snr_db, state.p_t))
    out = pl.to_dict()
    out["se"] = {
        "snr_db": args.snr_db,
        "per_vertex": {str(v): se for v, se in report.per_vertex_se.items()},
        "system": report.system_se,
        "infeasible_count": report.infeasible_count,
    }
    print(json.dumps(out, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="steersim", description="MIMO interference steering simulator")
    sub = p.add_subparsers(dest="command", required=True)

    f = sub.add_parser("figure", help="run a figure preset and write CSV + gnuplot script")
    f.add_argument("name", choices=sorted(FIGURES))
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--trials", type=int, default=None)
    f.add_argument("--out", default=".")
    f.add_argument("--workers", type=int, default=1)
    f.set_defaults(func=cmd_figure)

    s = sub.add_parser("sweep", help="run a sweep described by a JSON ScenarioConfig")
    s.add_argument("--config", required=True)
    s.add_argument("--out", default=".")
    s.add_argument("--name", default=None)
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_sweep)

    g = sub.add_parser("graph", help="interference-graph tools")
    gsub = g.add_subparsers(dest="graph_command", required=True)
    ga = gsub.add_parser("analyze", help="cycles, cycle breaking and processing order of an edge list")
    ga.add_argument("--edges", required=True)
    ga.set_defaults(func=cmd_graph)

    pl = sub.add_parser("plan", help="plan a network state given as JSON")
    pl.add_argument("--state", required=True)
    pl.add_argument("--method", choices=["IS", "IN"], default="IS")
    pl.add_argument("--snr-db", type=float, default=15.0)
    pl.set_defaults(func=cmd_plan)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SteersimError, ValueError, KeyError, OSError) as exc:
        print(f"steersim: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

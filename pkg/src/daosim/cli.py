"""Command-line entry point.

Subcommands: generate, simulate, sweep, vote, govern, assess. Exit status is
0 on success, 1 on a usage or validation error and 2 on a file error. All
inputs are validated and all outputs computed before any file is written.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from daosim import dynamics
from daosim.dynamics import DynamicsParams, PerformanceMeasure, Schedule, Standard, StateVector
from daosim.errors import ValidationError
from daosim.governance import (
    centralization_metrics,
    parse_ballots,
    parse_ledger,
    simulate_proposals,
    tally,
    turnout_metrics,
)
from daosim.graph import TOPOLOGIES, Network, NetworkSpec, format_edge_list, generate_network, load_edge_list
from daosim.percolation import SweepSpec, classify_outcome, derive_seed, sweep
from daosim.viability import AGGREGATIONS, Assessment, render_report, score_assessment

EXIT_OK, EXIT_INVALID, EXIT_IO = 0, 1, 2

SCHEDULES = {"synchronous": Schedule.SYNCHRONOUS, "asynchronous": Schedule.ASYNCHRONOUS}
BALLOT_KINDS = {"single": "single_choice", "single_choice": "single_choice", "approval": "approval",
                "ranked": "ranked", "quadratic": "quadratic"}


class FileError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise FileError(f"cannot read {path}: {exc.strerror or exc}") from None


def _dump(obj: object) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _add_network_args(p: argparse.ArgumentParser, edges: bool) -> None:
    g = p.add_argument_group("network")
    if edges:
        g.add_argument("--edges", help="edge-list file ('i j [w]' per line)")
        g.add_argument("--nodes", type=int, help="agent count when the edge list omits trailing isolated agents")
    g.add_argument("--topology", choices=TOPOLOGIES)
    g.add_argument("--n", type=int, help="agent count for a generated network")
    g.add_argument("--k", type=int, help="neighbour count (ring_lattice, watts_strogatz)")
    g.add_argument("--p", type=float, help="edge probability (erdos_renyi)")
    g.add_argument("--m", type=int, help="attachments per new node (barabasi_albert)")
    g.add_argument("--beta", type=float, help="rewiring probability (watts_strogatz)")
    g.add_argument("--weight", type=float, default=1.0)


def _add_dynamics_args(p: argparse.ArgumentParser, grid: bool) -> None:
    nargs = "+" if grid else None
    p.add_argument("--q", type=float, nargs=nargs, required=True)
    p.add_argument("--cA", type=float, nargs=nargs, default=[0.0] if grid else 0.0)
    p.add_argument("--cB", type=float, nargs=nargs, default=[0.0] if grid else 0.0)
    p.add_argument("--schedule", choices=sorted(SCHEDULES), default="synchronous")
    p.add_argument("--max-steps", type=int, default=1000)


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = _Parser(prog="daosim", description="DAO governance dynamics toolkit")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, metavar="COMMAND")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with default option values; flags take precedence")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="output file (default: stdout)")
    subs = {}

    p = sub.add_parser("generate", parents=[common], help="write a generated network as an edge list")
    _add_network_args(p, edges=False)
    subs["generate"] = p

    p = sub.add_parser("simulate", parents=[common], help="run the threshold dynamics once")
    _add_network_args(p, edges=True)
    _add_dynamics_args(p, grid=False)
    init = p.add_mutually_exclusive_group()
    init.add_argument("--init", help="compact initial state, e.g. ABBA")
    init.add_argument("--init-file", help="file with one 'A' or 'B' per line")
    init.add_argument("--rho", type=float, help="random initial state with A-probability rho")
    p.add_argument("--measure", choices=[m.value for m in PerformanceMeasure], default="indicator_A")
    p.add_argument("--trajectory", help="write the trajectory CSV here")
    subs["simulate"] = p

    p = sub.add_parser("sweep", parents=[common], help="parameter sweep over q, cA, cB")
    _add_network_args(p, edges=True)
    _add_dynamics_args(p, grid=True)
    p.add_argument("--rho", type=float, default=0.5)
    p.add_argument("--replicas", type=int, default=1)
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    p.add_argument("--svg", help="write a fork-frequency heatmap here")
    subs["sweep"] = p

    p = sub.add_parser("vote", parents=[common], help="tally a ballot file")
    p.add_argument("--kind", choices=sorted(BALLOT_KINDS), required=True)
    p.add_argument("--ballots", required=True)
    p.add_argument("--candidates", help="comma-separated candidate ids (default: all referenced)")
    p.add_argument("--weights", help="token ledger CSV for weighted tallies")
    p.add_argument("--budget", type=int, default=100)
    subs["vote"] = p

    p = sub.add_parser("govern", parents=[common], help="simulate proposals and report turnout")
    p.add_argument("--members", type=int, required=True)
    p.add_argument("--proposals", type=int, required=True)
    p.add_argument("--participation", type=float, default=0.3)
    p.add_argument("--approve-rate", type=float, default=0.5)
    p.add_argument("--ledger", help="token ledger CSV; adds Gini and Nakamoto metrics")
    subs["govern"] = p

    p = sub.add_parser("assess", parents=[common], help="score a viability assessment")
    p.add_argument("--file", required=True)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.add_argument("--aggregation", choices=AGGREGATIONS, default="min")
    subs["assess"] = p
    return parser, subs


def _network(args: argparse.Namespace) -> Network:
    edges = getattr(args, "edges", None)
    if edges is not None:
        return load_edge_list(_read(edges), getattr(args, "nodes", None))
    if args.topology is None or args.n is None:
        raise ValidationError("a network is required: pass --edges FILE or --topology with --n")
    return generate_network(_spec(args), args.seed)


def _spec(args: argparse.Namespace) -> NetworkSpec:
    if args.topology is None or args.n is None:
        raise ValidationError("--topology and --n are required")
    return NetworkSpec(args.topology, args.n, args.k, args.p, args.m, args.beta, args.weight)


def _cmd_generate(args: argparse.Namespace) -> list[tuple[str | None, str]]:
    dynamics.check_seed(args.seed)
    return [(args.out, format_edge_list(generate_network(_spec(args), args.seed)))]


def _cmd_simulate(args: argparse.Namespace) -> list[tuple[str | None, str]]:
    dynamics.check_seed(args.seed)
    params = DynamicsParams(args.q, args.cA, args.cB, SCHEDULES[args.schedule], args.max_steps)
    network = _network(args)
    if args.init is not None:
        init = dynamics.parse_states(args.init)
    elif args.init_file is not None:
        init = dynamics.parse_states(_read(args.init_file))
    else:
        rho = 0.5 if args.rho is None else args.rho
        if not 0.0 <= rho <= 1.0:
            raise ValidationError(f"--rho must lie in [0, 1], got {rho}")
        draws = np.random.default_rng(derive_seed(args.seed, 2)).random(network.n) < rho
        init = StateVector(tuple(Standard.A if d else Standard.B for d in draws.tolist()))
    if len(init) != network.n:
        raise ValidationError(f"initial state has {len(init)} agents but the network has {network.n}")
    traj = dynamics.run(network, init, params, args.seed, PerformanceMeasure(args.measure))
    summary = traj.summary()
    summary["outcome"] = classify_outcome(network, traj).outcome.value
    outputs = [(args.out, _dump(summary))]
    if args.trajectory:
        outputs.append((args.trajectory, traj.to_csv()))
    return outputs


def _cmd_sweep(args: argparse.Namespace) -> list[tuple[str | None, str]]:
    if args.jobs < 1:
        raise ValidationError(f"--jobs must be at least 1, got {args.jobs}")
    network: Network | NetworkSpec
    network = load_edge_list(_read(args.edges), args.nodes) if args.edges else _spec(args)
    spec = SweepSpec(network, tuple(args.q), tuple(args.cA), tuple(args.cB), args.rho, args.replicas,
                     args.seed, SCHEDULES[args.schedule], args.max_steps)
    table = sweep(spec, jobs=args.jobs)
    outputs = [(args.out, table.to_csv())]
    if args.svg:
        outputs.append((args.svg, table.to_svg()))
    return outputs


def _cmd_vote(args: argparse.Namespace) -> list[tuple[str | None, str]]:
    candidates = [c.strip() for c in args.candidates.split(",")] if args.candidates else None
    ballots = parse_ballots(_read(args.ballots), BALLOT_KINDS[args.kind], candidates)
    weights = parse_ledger(_read(args.weights)) if args.weights else None
    return [(args.out, _dump(tally(ballots, weights, args.budget).to_json()))]


def _cmd_govern(args: argparse.Namespace) -> list[tuple[str | None, str]]:
    ledger = parse_ledger(_read(args.ledger)) if args.ledger else None
    history = simulate_proposals(args.members, args.proposals, args.participation, args.approve_rate, args.seed)
    report = turnout_metrics(history).to_json()
    if ledger is not None:
        report["centralization"] = centralization_metrics(ledger).to_json()
    return [(args.out, _dump(report))]


def _cmd_assess(args: argparse.Namespace) -> list[tuple[str | None, str]]:
    text = _read(args.file)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{args.file}: invalid JSON ({exc})") from None
    report = score_assessment(Assessment.from_json(data), aggregation=args.aggregation)
    return [(args.out, render_report(report, args.format))]


COMMANDS = {
    "generate": _cmd_generate,
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
    "vote": _cmd_vote,
    "govern": _cmd_govern,
    "assess": _cmd_assess,
}


def _apply_config(sub: argparse.ArgumentParser, path: str) -> None:
    try:
        data = json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(data, dict):
        raise ValidationError(f"{path}: config must be a JSON object")
    known = {a.dest for a in sub._actions}
    defaults = {}
    for key, value in data.items():
        dest = key.replace("-", "_")
        if dest not in known or dest in ("config", "help"):
            raise ValidationError(f"{path}: unknown option {key!r}")
        defaults[dest] = value
    sub.set_defaults(**defaults)
    # required flags satisfied by the config file
    for action in sub._actions:
        if action.dest in defaults:
            action.required = False


def _config_path(argv: list[str]) -> str | None:
    for i, a in enumerate(argv):
        if a == "--config" and i + 1 < len(argv):
            return argv[i + 1]
        if a.startswith("--config="):
            return a.split("=", 1)[1]
    return None


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, subs = build_parser()
    try:
        command = next((a for a in argv if a in subs), None)
        config = _config_path(argv)
        if command is not None and config is not None:
            _apply_config(subs[command], config)
        args = parser.parse_args(argv)
        if args.command is None:
            parser.error("a subcommand is required")
        outputs = COMMANDS[args.command](args)
    except ValidationError as exc:
        print(f"daosim: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except FileError as exc:
        print(f"daosim: error: {exc}", file=sys.stderr)
        return EXIT_IO
    for path, content in outputs:
        if path is None:
            sys.stdout.write(content)
            continue
        try:
            Path(path).write_text(content, encoding="utf-8", newline="\n")
        except OSError as exc:
            print(f"daosim: error: cannot write {path}: {exc.strerror or exc}", file=sys.stderr)
            return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

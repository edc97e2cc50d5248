"""Command-line entry point: ``cbhrp <subcommand>`` or ``python -m cbhrp``.

Exit codes: 0 success, 1 usage or config error, 2 internal consistency fault.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__, harness, sim
from .errors import ConfigError, ConsistencyError
from .topology import NetworkConfig, export_topology, generate_topology


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"seed must fit in 64 unsigned bits: {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cbhrp", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"cbhrp {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, seed=True):
        p.add_argument("--config", help="JSON config file (defaults built in when omitted)")
        p.add_argument("--out", help="output path; CSV goes to stdout when omitted")
        p.add_argument("--eq9-exponent", type=int, choices=(2, 4), help="BS-hop exponent in the head frame cost")
        if seed:
            p.add_argument("--seed", type=_u64, default=0)
        return p

    common(sub.add_parser("analytic", help="evaluate the closed-form model for one config"), seed=False)

    p = common(sub.add_parser("simulate", help="simulate one config until every node is dead"))
    p.add_argument("--round-cap", type=int, default=10_000)
    p.add_argument("--geometry", choices=sim.GEOMETRIES, default="euclidean")
    p.add_argument("--trace", nargs="?", const=True, default=None, metavar="PATH",
                   help="write one CSV row per cluster iteration (to PATH, <out>.trace.csv or stdout)")

    p = sub.add_parser("sweep", help="sweep one or two parameters")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", choices=sorted(harness.PRESETS))
    src.add_argument("--config", help="JSON sweep spec")
    p.add_argument("--seed", type=_u64, action="append", help="repeatable; implies simulation")
    p.add_argument("--mode", choices=harness.MODES)
    p.add_argument("--out")
    p.add_argument("--eq9-exponent", type=int, choices=(2, 4))
    p.add_argument("--round-cap", type=int)
    p.add_argument("--workers", type=int, default=1)

    p = common(sub.add_parser("compare", help="head-set sizes against the single-head baseline"))
    p.add_argument("--m", default="1,2,4", help="comma-separated head-set sizes")
    p.add_argument("--simulate", action="store_true", help="add paired lifetime simulations")
    p.add_argument("--round-cap", type=int, default=10_000)

    p = common(sub.add_parser("export-topology", help="write the node layout for a seed as JSON"))
    return parser


def _load_network(args) -> NetworkConfig:
    cfg = NetworkConfig()
    if args.config:
        cfg = harness.load_config(args.config)
        if not isinstance(cfg, NetworkConfig):
            raise ConfigError(f"{args.config} holds a sweep spec, not a network config")
    if getattr(args, "eq9_exponent", None):
        cfg = cfg.replace(eq9_exponent=args.eq9_exponent)
    return cfg


def _emit(rows, args, header=harness.HEADER, provenance=None) -> None:
    if args.out:
        harness.save_csv(rows, args.out, header, provenance)
    else:
        harness.write_csv(rows, sys.stdout, header)


def _cmd_analytic(args) -> None:
    cfg = _load_network(args)
    rows = harness.evaluate_config(cfg)
    _emit(rows, args, provenance={"command": "analytic", "config": cfg.to_dict()})


def _cmd_simulate(args) -> None:
    cfg = _load_network(args)
    state = sim.init_state(cfg, args.seed, args.geometry, trace=bool(args.trace))
    rows = harness.evaluate_config(
        cfg, seeds=(args.seed,), geometry=args.geometry, round_cap=args.round_cap, state=state
    )
    _emit(rows, args, provenance={
        "command": "simulate", "config": cfg.to_dict(), "seed": args.seed,
        "geometry": args.geometry, "round_cap": args.round_cap,
    })
    if args.trace:
        if isinstance(args.trace, str):
            with open(args.trace, "w", newline="") as fh:
                sim.write_trace(state.trace, fh)
        elif args.out:
            with open(f"{args.out}.trace.csv", "w", newline="") as fh:
                sim.write_trace(state.trace, fh)
        else:
            sim.write_trace(state.trace, sys.stdout)


def _cmd_sweep(args) -> None:
    seeds = tuple(args.seed) if args.seed else None
    if args.preset:
        mode = args.mode or ("both" if seeds else "analytic")
        overrides = {"eq9_exponent": args.eq9_exponent} if args.eq9_exponent else {}
        spec = harness.preset(args.preset, seeds=seeds or (0,), mode=mode, **overrides)
    else:
        spec = harness.load_config(args.config)
        if not isinstance(spec, harness.SweepSpec):
            raise ConfigError(f"{args.config} holds a network config, not a sweep spec")
        changes = {}
        if seeds:
            changes["seeds"] = seeds
        if args.mode or seeds:
            changes["mode"] = args.mode or ("both" if spec.mode == "analytic" else spec.mode)
        if args.eq9_exponent:
            changes["base"] = spec.base.replace(eq9_exponent=args.eq9_exponent)
        spec = harness.SweepSpec(**{**spec.__dict__, **changes})
    if args.round_cap:
        spec = harness.SweepSpec(**{**spec.__dict__, "round_cap": args.round_cap})
    rows = harness.run_sweep(spec, workers=args.workers)
    _emit(rows, args, provenance={"command": "sweep", "preset": args.preset, "spec": spec.to_dict()})


def _cmd_compare(args) -> None:
    cfg = _load_network(args)
    try:
        m_values = [int(v) for v in args.m.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"--m expects comma-separated integers, got {args.m!r}", ("m",)) from None
    rows = harness.compare_protocols(cfg, m_values, simulate=args.simulate, seed=args.seed,
                                     round_cap=args.round_cap)
    _emit(rows, args, harness.COMPARE_HEADER,
          provenance={"command": "compare", "config": cfg.to_dict(), "m": m_values, "seed": args.seed})


def _cmd_export_topology(args) -> None:
    cfg = _load_network(args)
    nodes = generate_topology(cfg, args.seed)
    doc = export_topology(cfg, args.seed, nodes, args.out)
    if not args.out:
        json.dump(doc, sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")


COMMANDS = {
    "analytic": _cmd_analytic,
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
    "compare": _cmd_compare,
    "export-topology": _cmd_export_topology,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except ConsistencyError as exc:
        print(f"cbhrp: internal consistency fault: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, ValueError, OSError) as exc:
        print(f"cbhrp: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface.

Subcommands: simulate, discover, pipeline, shd, sweep. Exit codes:
0 success, 1 usage error, 2 data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import causalgraph, sweeps, timeseries
from .citest import CITestConfig
from .discovery import DiscoveryConfig, run_discovery
from .errors import DataError, NumericalError
from .features import trace_to_features
from .hrsim import WorldConfig, run as run_sim, write_raw_trace
from .pipeline import load_pipeline_config, run_pipeline

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERICAL = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; the CLI contract reserves 2 for
    # data errors, so route usage failures to exit code 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hrcausal", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_sim = sub.add_parser("simulate", help="run the scenario simulator")
    p_sim.add_argument("--duration", type=float, required=True, metavar="S")
    p_sim.add_argument("--rate", type=float, required=True, metavar="HZ")
    p_sim.add_argument("--seed", type=int, required=True)
    p_sim.add_argument("--out", required=True, help="feature CSV (timestamp,v,d_g,r)")
    p_sim.add_argument("--raw-out", help="optional raw trace CSV")
    p_sim.add_argument(
        "--noise", type=float, default=None, metavar="M",
        help="tracker noise sigma on recorded human positions",
    )

    p_disc = sub.add_parser("discover", help="causal discovery on a feature CSV")
    p_disc.add_argument("--input", required=True)
    p_disc.add_argument("--method", choices=["pcmci", "fpcmci"], required=True)
    p_disc.add_argument("--citest", choices=["parcorr", "gpdc"], required=True)
    p_disc.add_argument("--alpha", type=float, required=True)
    p_disc.add_argument("--tau-max", type=int, required=True)
    p_disc.add_argument("--seed", type=int, required=True)
    p_disc.add_argument("--out", required=True, help="graph document path")
    p_disc.add_argument("--dot", help="optional DOT output path")

    p_pipe = sub.add_parser("pipeline", help="run the batched collect+discover pipeline")
    p_pipe.add_argument("--config", required=True, help="JSON pipeline config")

    p_shd = sub.add_parser("shd", help="structural Hamming distance of two graphs")
    p_shd.add_argument("--a", required=True)
    p_shd.add_argument("--b", required=True)
    p_shd.add_argument("--include-auto", action="store_true")

    p_sweep = sub.add_parser("sweep", help="SHD/runtime sweeps over rate or horizon")
    p_sweep.add_argument("kind", choices=["frequency", "horizon"])
    p_sweep.add_argument("--input", required=True)
    p_sweep.add_argument("--baseline", help="graph document (default: expected model)")
    p_sweep.add_argument("--method", choices=["pcmci", "fpcmci"], required=True)
    p_sweep.add_argument("--citest", choices=["parcorr", "gpdc"], required=True)
    p_sweep.add_argument("--alpha", type=float, default=0.05)
    p_sweep.add_argument("--tau-max", type=int, default=1)
    p_sweep.add_argument("--seeds", required=True, help="comma-separated seed list")
    p_sweep.add_argument(
        "--rates", help="comma-separated rates in Hz (frequency sweep)"
    )
    p_sweep.add_argument(
        "--fractions", help="comma-separated fractions in (0,1] (horizon sweep)"
    )
    p_sweep.add_argument("--out", required=True, help="per-row CSV output")
    p_sweep.add_argument("--agg-out", help="aggregated mean/std CSV output")
    return parser


def _discovery_config(args, seed: int) -> DiscoveryConfig:
    return DiscoveryConfig(
        method=args.method,
        citest=CITestConfig(kind=args.citest, seed=seed),
        alpha=args.alpha,
        tau_max=args.tau_max,
    )


def _cmd_simulate(args) -> int:
    fields = {"seed": args.seed, "dt": 1.0 / args.rate}
    if args.noise is not None:
        fields["pos_noise_sigma"] = args.noise
    cfg = WorldConfig(**fields)
    trace = run_sim(cfg, args.duration)
    if args.raw_out:
        write_raw_trace(trace, args.raw_out)
    batch = trace_to_features(trace, R_enc=cfg.R_enc)
    timeseries.write_csv(batch, args.out)
    print(f"wrote {batch.n_rows} rows x {len(batch.variables)} variables to {args.out}")
    return EXIT_OK


def _cmd_discover(args) -> int:
    batch = timeseries.read_csv(args.input)
    graph = run_discovery(batch, _discovery_config(args, args.seed))
    causalgraph.write_graph(graph, args.out)
    if args.dot:
        with open(args.dot, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(causalgraph.to_dot(graph))
    print(f"wrote graph with {len(graph.edges)} edges to {args.out}")
    return EXIT_OK


def _cmd_pipeline(args) -> int:
    summary = run_pipeline(load_pipeline_config(args.config))
    print(json.dumps(summary.to_dict(), indent=2))
    return EXIT_OK


def _cmd_shd(args) -> int:
    a = causalgraph.read_graph(args.a)
    b = causalgraph.read_graph(args.b)
    print(causalgraph.shd(a, b, include_auto=args.include_auto))
    return EXIT_OK


def _parse_list(text: str, cast):
    return [cast(tok) for tok in text.split(",") if tok]


def _cmd_sweep(args) -> int:
    batch = timeseries.read_csv(args.input)
    baseline = causalgraph.read_graph(args.baseline) if args.baseline else None
    seeds = _parse_list(args.seeds, int)
    if not seeds:
        raise ValueError("--seeds must name at least one seed")
    tables = []
    for seed in seeds:
        cfg = _discovery_config(args, seed)
        if args.kind == "frequency":
            rates = (
                _parse_list(args.rates, float) if args.rates else sweeps.DEFAULT_RATES_HZ
            )
            tables.append(sweeps.sweep_frequency(batch, baseline, rates, cfg))
        else:
            fractions = (
                _parse_list(args.fractions, float)
                if args.fractions
                else sweeps.DEFAULT_FRACTIONS
            )
            tables.append(sweeps.sweep_horizon(batch, baseline, fractions, cfg))
    sweeps.write_rows_csv(tables, args.out)
    if args.agg_out:
        sweeps.write_aggregate_csv(sweeps.aggregate(tables), args.agg_out)
    print(f"wrote {sum(len(t.rows) for t in tables)} sweep rows to {args.out}")
    return EXIT_OK


_COMMANDS = {
    "simulate": _cmd_simulate,
    "discover": _cmd_discover,
    "pipeline": _cmd_pipeline,
    "shd": _cmd_shd,
    "sweep": _cmd_sweep,
}


def main(argv=None) -> int:
    logging.basicConfig(
        level=logging.INFO, format="%(levelname)s %(name)s: %(message)s"
    )
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ValueError as exc:
        print(f"hrcausal {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, OSError) as exc:
        print(f"hrcausal {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as exc:
        print(f"hrcausal {args.command}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())

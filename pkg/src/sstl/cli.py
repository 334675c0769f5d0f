"""Command-line front-end.

Three subcommands tie the pieces together: ``monitor`` runs the Boolean
and/or quantitative semantics of a named formula over a trace, ``simulate``
generates reaction-diffusion traces, and ``smc`` runs estimate/sweep
statistical model checking.  All outputs are plain CSV/JSON so plots can be
produced with any external tool.

Exit codes: 0 success, 1 I/O or parse failure, 2 property-evaluation
failure, 3 integration blow-up.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from fractions import Fraction

from . import logic, smc
from .errors import IntegrationError, SSTLError, TraceFormatError, GraphError
from .logic import ParseError
from .models import TuringGenerator, TuringParams, read_trace, simulate_turing, write_trace
from .monitor_bool import monitor_bool
from .monitor_quant import monitor_quant
from .signals import as_time
from .space import SpaceModel, read_graph, regular_grid


def _add_space_options(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--graph", help="TSV graph file (see README for the format)")
    group.add_argument("--grid", type=int, metavar="K", help="K x K unit-weight grid")
    parser.add_argument(
        "--grid-weight", type=float, default=1.0, help="edge weight for --grid (default 1)"
    )


def _load_space(args) -> SpaceModel:
    if args.graph is not None:
        return read_graph(args.graph)
    return regular_grid(args.grid, args.grid_weight)


def _load_formula(args) -> logic.Formula:
    formulas = logic.read_script(args.formulas)
    if args.name not in formulas:
        known = ", ".join(sorted(formulas)) or "none"
        raise ParseError(f"no formula named {args.name!r} (defined: {known})")
    return formulas[args.name]


def _fmt(value: float) -> str:
    return repr(float(value))


def cmd_monitor(args) -> int:
    space = _load_space(args)
    formula = _load_formula(args)
    trace = read_trace(args.trace, space)
    at_time = as_time(args.at_time)

    locations = list(space.locations)
    if args.location is not None:
        space.index_of(args.location)
        locations = [args.location]

    bool_result = quant_result = None
    if args.mode in ("boolean", "both"):
        bool_result = monitor_bool(formula, trace, space, oracle=args.oracle)
    if args.mode in ("quant", "both"):
        quant_result = monitor_quant(formula, trace, space, oracle=args.oracle)

    index = at_time / trace.step
    if quant_result is not None and index.denominator != 1:
        raise SSTLError(f"--at-time {args.at_time} is not on the sampling grid")

    with open(args.out, "w", encoding="utf-8") as fh:
        header = {
            "boolean": "location,satisfied",
            "quant": "location,robustness",
            "both": "location,satisfied,robustness",
        }[args.mode]
        fh.write(header + "\n")
        for loc in locations:
            cells = [loc]
            if bool_result is not None:
                cells.append(str(int(bool_result.signals[loc].value_at(at_time))))
            if quant_result is not None:
                cells.append(_fmt(quant_result.robustness_at(loc, int(index))))
            fh.write(",".join(cells) + "\n")

    if args.dump_intervals and bool_result is not None:
        with open(args.dump_intervals, "w", encoding="utf-8") as fh:
            fh.write("location,start,end\n")
            for loc in locations:
                for lo, hi in bool_result.signals[loc].intervals:
                    fh.write(f"{loc},{_fmt(lo)},{_fmt(hi)}\n")
    if args.dump_values and quant_result is not None:
        with open(args.dump_values, "w", encoding="utf-8") as fh:
            fh.write("location,t,value\n")
            for loc in locations:
                sig = quant_result.signals[loc]
                for k, v in enumerate(sig.values):
                    fh.write(f"{loc},{_fmt(k * float(sig.step))},{_fmt(v)}\n")
    return 0


def _params_from_args(args) -> TuringParams:
    values = {}
    if args.config:
        values.update(_read_config(args.config))
    for name in (
        "k", "r1", "r2", "r3", "r4", "diff1", "diff2", "dt",
        "t_end", "sample_step", "init_low", "init_high", "epsilon", "seed",
    ):
        arg = getattr(args, name, None)
        if arg is not None:
            values[name] = arg
    return TuringParams(**values)


def _read_config(path) -> dict:
    fields = {f.name: f.type for f in dataclasses.fields(TuringParams)}
    out: dict = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise TraceFormatError(f"expected key=value in config, got {line!r}", line=lineno)
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in fields:
                raise TraceFormatError(f"unknown parameter {key!r}", line=lineno)
            out[key] = int(value) if key in ("k", "seed") else float(value)
    return out


def cmd_simulate(args) -> int:
    if args.model != "turing":
        raise SSTLError(f"unknown model {args.model!r}")
    params = _params_from_args(args)
    trace = simulate_turing(params)
    write_trace(trace, args.out)
    return 0


def _estimate_payload(est: smc.SMCEstimate) -> dict:
    return {
        "runs": est.runs,
        "successes": est.successes,
        "p_hat": est.p_hat,
        "ci": [est.ci_low, est.ci_high],
        "rob": {
            "mean": est.rob_mean,
            "std": est.rob_std,
            "mean_true": est.rob_mean_given_true,
            "mean_false": est.rob_mean_given_false,
        },
    }


def _parse_eps_grid(text: str) -> list[float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise SSTLError(f"expected start:end:step, got {text!r}")
    start, end, step = (Fraction(p) for p in parts)
    if step <= 0:
        raise SSTLError("sweep step must be positive")
    values = []
    value = start
    while value <= end:
        values.append(float(value))
        value += step
    return values


def _write_per_run(path, rows) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("epsilon,run,verdict,robustness\n")
        for eps, run, verdict, rob in rows:
            fh.write(f"{_fmt(eps)},{run},{int(verdict)},{_fmt(rob)}\n")


def cmd_smc(args) -> int:
    space = _load_space(args)
    formula = _load_formula(args)
    base = _params_from_args(args)

    if args.smc_command == "estimate":
        generator = TuringGenerator(base)
        est = smc.estimate(
            generator, formula, space, args.location, args.runs,
            alpha=args.alpha, master_seed=args.seed, jobs=args.jobs,
        )
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(_estimate_payload(est), fh, indent=2)
            fh.write("\n")
        if args.per_run:
            eps = base.epsilon
            _write_per_run(
                args.per_run,
                [(eps, i, v, r) for i, (v, r) in enumerate(zip(est.verdicts, est.robustness))],
            )
        return 0

    values = _parse_eps_grid(args.eps_grid)
    family = lambda eps: TuringGenerator(dataclasses.replace(base, epsilon=eps))
    result = smc.sweep(
        family, formula, space, args.location, values, args.runs,
        alpha=args.alpha, master_seed=args.seed, jobs=args.jobs,
    )
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write("epsilon,p_hat,ci_lo,ci_hi,rob_mean,rob_std\n")
        for eps, est in result.points:
            fh.write(
                f"{_fmt(eps)},{_fmt(est.p_hat)},{_fmt(est.ci_low)},{_fmt(est.ci_high)},"
                f"{_fmt(est.rob_mean)},{_fmt(est.rob_std)}\n"
            )
    if args.per_run:
        rows = []
        for eps, est in result.points:
            rows.extend(
                (eps, i, v, r)
                for i, (v, r) in enumerate(zip(est.verdicts, est.robustness))
            )
        _write_per_run(args.per_run, rows)
    r_text = "undefined" if result.pearson_r is None else _fmt(result.pearson_r)
    print(f"pearson_r={r_text}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sstl",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=logic.__doc__,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    mon = sub.add_parser("monitor", help="monitor a formula over a trace")
    _add_space_options(mon)
    mon.add_argument("--trace", required=True)
    mon.add_argument("--formulas", required=True, help="formula script (name := formula)")
    mon.add_argument("--name", required=True, help="formula to monitor")
    mon.add_argument("--mode", choices=("boolean", "quant", "both"), default="both")
    mon.add_argument("--out", required=True)
    mon.add_argument("--location", help="restrict output to one probe location")
    mon.add_argument("--at-time", default="0", help="evaluation time (default 0)")
    mon.add_argument("--oracle", action="store_true",
                     help="cross-check surround against enumeration (small spaces)")
    mon.add_argument("--dump-intervals", help="write per-location Boolean intervals")
    mon.add_argument("--dump-values", help="write the full per-location robustness signal")
    mon.set_defaults(handler=cmd_monitor)

    sim = sub.add_parser("simulate", help="generate a trace")
    sim.add_argument("model", choices=("turing",))
    sim.add_argument("--out", required=True)
    sim.add_argument("--config", help="key=value parameter file")
    sim.add_argument("--K", dest="k", type=int)
    for name in ("r1", "r2", "r3", "r4", "diff1", "diff2", "dt",
                 "init-low", "init-high"):
        sim.add_argument(f"--{name}", dest=name.replace("-", "_"), type=float)
    sim.add_argument("--T", dest="t_end", type=float)
    sim.add_argument("--step", dest="sample_step", type=float)
    sim.add_argument("--eps", dest="epsilon", type=float)
    sim.add_argument("--seed", dest="seed", type=int)
    sim.set_defaults(handler=cmd_simulate)

    smc_parser = sub.add_parser("smc", help="statistical model checking")
    smc_sub = smc_parser.add_subparsers(dest="smc_command", required=True)
    for kind in ("estimate", "sweep"):
        p = smc_sub.add_parser(kind)
        _add_space_options(p)
        p.add_argument("--formulas", required=True)
        p.add_argument("--name", required=True)
        p.add_argument("--location", required=True)
        p.add_argument("--runs", type=int, required=True)
        p.add_argument("--alpha", type=float, default=0.05)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--jobs", type=int, default=1)
        p.add_argument("--out", required=True)
        p.add_argument("--per-run", help="per-run verdict/robustness dump CSV")
        p.add_argument("--config", help="key=value simulator parameter file")
        p.add_argument("--K", dest="k", type=int)
        for name in ("r1", "r2", "r3", "r4", "diff1", "diff2", "dt",
                     "init-low", "init-high"):
            p.add_argument(f"--{name}", dest=name.replace("-", "_"), type=float)
        p.add_argument("--T", dest="t_end", type=float)
        p.add_argument("--step", dest="sample_step", type=float)
        if kind == "estimate":
            p.add_argument("--eps", dest="epsilon", type=float)
        else:
            p.add_argument("--eps", dest="eps_grid", required=True,
                           metavar="START:END:STEP", help="noise grid, e.g. 0:0.9:0.1")
        p.set_defaults(handler=cmd_smc)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except IntegrationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ParseError, TraceFormatError, GraphError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (SSTLError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

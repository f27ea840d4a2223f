"""Command-line interface: ``check``, ``simulate``, ``compare`` and ``graph``.

Exit codes: 0 all specifications hold, 1 at least one fails, 2 usage,
configuration or parse error, 3 state-space cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Optional, Sequence

from .ctl import (AG, check, counterexample, format_trace, parse_spec_file,
                  violates_at_end, witness)
from .ctl.formula import atoms
from .errors import CapExceeded, CTLSyntaxError, InvalidConfig, UnknownAtom
from .kripke import BuildLimits, Trace, export_dot, is_path
from .sim import Mode, SimConfig, compare_csv, compare_modes, run_simulation, stats_csv
from .traffic import TrafficParams, Variant, build_traffic, paper_spec_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3
SCHEMA_VERSION = 1
GRAPH_STATE_LIMIT = 5000


class UsageError(Exception):
    pass


def _err(msg: str):
    print(f"signalmc: error: {msg}", file=sys.stderr)


def _write(out: str, text: str):
    if out == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _params(args) -> TrafficParams:
    try:
        return TrafficParams(t_thr_ticks=args.t_thr, q_max=args.q_max, wait_cap=args.wait_cap)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _trace_json(kind: str, trace: Trace, valid: bool) -> dict:
    return {
        "kind": kind,
        "loop_back": trace.loop_back,
        "note": trace.note,
        "valid": valid,
        "steps": [{"state": s.index, "vars": dict(s.snapshot)} for s in trace.steps],
    }


def cmd_check(args) -> int:
    params = _params(args)
    variant = Variant(args.variant)
    if args.specs:
        try:
            with open(args.specs, encoding="utf-8") as fh:
                specs = parse_spec_file(fh.read())
        except OSError as exc:
            raise UsageError(f"cannot read spec file: {exc}") from None
        except CTLSyntaxError as exc:
            raise UsageError(f"{args.specs}: {exc}") from None
    else:
        specs = paper_spec_suite(params)

    started = time.perf_counter()
    extra = tuple(name for spec in specs for name in atoms(spec.formula))
    limits = BuildLimits(max_states=args.max_states, max_transitions=args.max_transitions)
    ks = build_traffic(params, variant, extra, limits)

    results = []
    for spec in specs:
        try:
            result = check(ks, spec)
        except UnknownAtom as exc:
            raise UsageError(f"spec {spec.label!r}: unknown atom {exc.name!r}") from None
        trace, kind = None, None
        if args.trace != "none":
            if not result.holds and not spec.probe:
                trace, kind = counterexample(ks, spec, result), "counterexample"
            elif result.holds and spec.probe:
                trace, kind = witness(ks, spec, result), "witness"
        valid = None
        if trace is not None:
            valid = is_path(ks, trace) and trace.steps[0].index in ks.initial
            if kind == "counterexample" and isinstance(spec.formula, AG):
                valid = valid and violates_at_end(ks, spec, trace)
        results.append((spec, result, trace, kind, valid))
    elapsed_ms = int((time.perf_counter() - started) * 1000)

    props = [r for r in results if not r[0].probe]
    failed = sum(1 for r in props if not r[1].holds)
    code = EXIT_FAIL if failed else EXIT_OK
    totals = {
        "specs": len(props),
        "passed": len(props) - failed,
        "failed": failed,
        "probes": len(results) - len(props),
        "probes_true": sum(1 for r in results if r[0].probe and r[1].holds),
    }
    model = {"variant": variant.value, "t_thr_ticks": params.t_thr_ticks, "q_max": params.q_max,
             "wait_cap": params.wait_cap, "t_v": params.t_v}

    if args.format == "json":
        report = {
            "schema_version": SCHEMA_VERSION,
            "command": "check",
            "model": model,
            "state_count": ks.state_count,
            "transition_count": ks.transition_count,
            "specs": [{
                "name": spec.name,
                "source": spec.source_text,
                "probe": spec.probe,
                "holds": result.holds,
                "verdict": "pass" if result.holds else "fail",
                "trace": None if trace is None else _trace_json(kind, trace, valid),
            } for spec, result, trace, kind, valid in results],
            "totals": totals,
            "exit_code": code,
        }
        if args.timing:
            report["elapsed_ms"] = elapsed_ms
        text = json.dumps(report, indent=2) + "\n"
    else:
        lines = [
            f"*** model: variant={variant.value} t_thr={params.t_thr_ticks} "
            f"q_max={params.q_max} wait_cap={params.wait_cap}",
            f"*** reachable states: {ks.state_count}, transitions: {ks.transition_count}",
        ]
        for spec, result, trace, kind, valid in results:
            what = "probe" if spec.probe else "specification"
            name = f" [{spec.name}]" if spec.name else ""
            verdict = "true" if result.holds else "false"
            lines.append(f"-- {what} {spec.source_text}{name} is {verdict}")
            if trace is not None:
                how = ("as demonstrated by" if kind == "counterexample" else "witnessed by")
                lines.append(f"-- {how} the following execution sequence")
                lines.append(format_trace(trace, args.trace).rstrip("\n"))
        lines.append(f"*** summary: {totals['passed']} of {totals['specs']} specifications hold, "
                     f"{totals['failed']} fail; {totals['probes_true']} of {totals['probes']} probes reachable")
        if args.timing:
            lines.append(f"*** elapsed: {elapsed_ms} ms")
        text = "\n".join(lines) + "\n"
    _write(args.out, text)
    print(f"signalmc: check finished in {elapsed_ms} ms", file=sys.stderr)
    return code


def _parse_rates(text: str) -> list[float]:
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if not parts:
        raise UsageError("empty rate list")
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise UsageError(f"invalid rate list {text!r}") from None


def cmd_simulate(args) -> int:
    rates = _parse_rates(args.rate)
    if len(rates) == 1:
        prob = rates[0]
    elif len(rates) == 4:
        prob = tuple(rates)
    else:
        raise UsageError("--rate takes one probability or four comma-separated ones")
    try:
        config = SimConfig(mode=Mode(args.mode), t_thr_ticks=args.t_thr,
                           fixed_period_ticks=args.period, arrival_prob=prob,
                           horizon_ticks=args.horizon, seed=args.seed,
                           detection_distance_ticks=args.detection)
    except InvalidConfig as exc:
        raise UsageError(str(exc)) from None
    _write(args.out, stats_csv(run_simulation(config)))
    return EXIT_OK


def cmd_compare(args) -> int:
    rates = _parse_rates(args.rates)
    try:
        base = SimConfig(t_thr_ticks=args.t_thr, fixed_period_ticks=args.period,
                         horizon_ticks=args.horizon, seed=args.seed,
                         detection_distance_ticks=args.detection)
        for r in rates:
            SimConfig(arrival_prob=r)
        rows = compare_modes(base, rates)
    except InvalidConfig as exc:
        raise UsageError(str(exc)) from None
    for row in rows:
        if row.adaptive_avg_wait > row.fixed_avg_wait:
            print(f"signalmc: warning: adaptive avg wait above fixed at rate {row.rate}",
                  file=sys.stderr)
    _write(args.out, compare_csv(rows))
    return EXIT_OK


def cmd_graph(args) -> int:
    params = _params(args)
    variant = Variant(args.variant)
    annotate = [a.strip() for a in args.annotate.split(",") if a.strip()]
    limit = BuildLimits() if args.force else BuildLimits(max_states=GRAPH_STATE_LIMIT)
    try:
        ks = build_traffic(params, variant, tuple(annotate), limit)
    except CapExceeded:
        if args.force:
            raise
        raise UsageError(f"model has more than {GRAPH_STATE_LIMIT} states; "
                         "pass --force to render it anyway") from None
    try:
        dot = export_dot(ks, annotate)
    except UnknownAtom as exc:
        raise UsageError(f"unknown atom {exc.name!r}") from None
    _write(args.out, dot)
    return EXIT_OK


def _model_flags(p: argparse.ArgumentParser):
    p.add_argument("--t-thr", type=int, default=18, help="maximum green duration in ticks")
    p.add_argument("--q-max", type=int, default=20, help="largest queue drawn at a handover")
    p.add_argument("--wait-cap", type=int, default=None, help="wait counter saturation value")
    p.add_argument("--variant", choices=[v.value for v in Variant], default="fixed")


def _sim_flags(p: argparse.ArgumentParser):
    p.add_argument("--t-thr", type=int, default=180)
    p.add_argument("--period", type=int, default=None, help="fixed-period green (default t-thr)")
    p.add_argument("--detection", type=int, default=None,
                   help="entry agent distance in ticks (default t-thr)")
    p.add_argument("--horizon", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out", default="-")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="signalmc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="model-check the traffic controller")
    _model_flags(p)
    p.add_argument("--specs", help="SPEC file (default: built-in suite)")
    p.add_argument("--trace", choices=["full", "delta", "none"], default="delta")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.add_argument("--max-states", type=int, default=BuildLimits.max_states)
    p.add_argument("--max-transitions", type=int, default=BuildLimits.max_transitions)
    p.add_argument("--timing", action="store_true", help="include elapsed time in the report")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("simulate", help="simulate one controller")
    p.add_argument("--mode", choices=[m.value for m in Mode], default="adaptive")
    p.add_argument("--rate", default="0.1", help="arrival probability, or four comma-separated")
    _sim_flags(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="adaptive vs fixed-period sweep over arrival rates")
    p.add_argument("--rates", default="0.02,0.05,0.1,0.25,0.5,1.0")
    _sim_flags(p)
    p.set_defaults(func=cmd_compare, horizon=20_000)

    p = sub.add_parser("graph", help="export the transition diagram as DOT")
    _model_flags(p)
    p.add_argument("--annotate", default="", help="comma-separated atoms to show on nodes")
    p.add_argument("--force", action="store_true")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_graph)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        _err(str(exc))
        return EXIT_USAGE
    except ValueError as exc:
        _err(str(exc))
        return EXIT_USAGE
    except CapExceeded as exc:
        _err(str(exc))
        return EXIT_CAP


if __name__ == "__main__":
    sys.exit(main())

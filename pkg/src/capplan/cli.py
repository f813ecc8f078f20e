"""``capplan`` command line: evaluate, sweep, compare, threshold, validate."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import des
from .model import evaluate_point
from .report import (
    METRIC_COLUMNS,
    ScenarioDocument,
    ScenarioError,
    build_scenario,
    format_real,
    load_scenario_dict,
    render_plot,
    section_keys,
    write_csv,
    write_delta_csv,
)
from .scenario import apply_upgrade, compare, find_threshold, metric_values, sweep

DEFAULT_SCENARIO = '{"sweep": {"from": 1, "to": 50}}'


class CliError(Exception):
    """Runtime failure reported with exit status 1."""


def _parse_override(item: str) -> tuple[str, str, object]:
    key, sep, value = item.partition("=")
    section, dot, name = key.partition(".")
    if not sep or not dot:
        raise ScenarioError(f"override must look like section.key=value, got {item!r}")
    try:
        known = section_keys(section)
    except KeyError:
        raise ScenarioError(f"override references unknown section {section!r}") from None
    if name not in known:
        raise ScenarioError(f"override references unknown key {key!r}")
    try:
        parsed = json.loads(value)
    except json.JSONDecodeError:
        parsed = value
    return section, name, parsed


def load_document(args) -> ScenarioDocument:
    if args.scenario is None:
        text = DEFAULT_SCENARIO
    else:
        try:
            text = Path(args.scenario).read_text(encoding="utf-8")
        except OSError as exc:
            raise CliError(f"cannot read scenario {args.scenario}: {exc.strerror}") from None
    raw = load_scenario_dict(text)
    for item in args.overrides or ():
        section, name, value = _parse_override(item)
        body = raw.setdefault(section, {})
        if not isinstance(body, dict):
            raise ScenarioError(f"section '{section}' must be an object")
        body[name] = value
    if args.n_from is not None or args.n_to is not None:
        rng = raw.setdefault("sweep", {})
        if args.n_from is not None:
            rng["from"] = args.n_from
        if args.n_to is not None:
            rng["to"] = args.n_to
    return build_scenario(raw)


def _write(path: str | Path, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8", newline="")
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc.strerror}") from None


def _emit(out, key: str, value) -> None:
    if isinstance(value, bool):
        value = "true" if value else "false"
    elif isinstance(value, float):
        value = format_real(value)
    elif value is None:
        value = "none"
    print(f"{key}={value}", file=out)


def _plots(args, baseline, upgraded, prefix: str) -> None:
    for metric in args.metrics or []:
        _write(f"{prefix}_{metric}.svg", render_plot(baseline, upgraded, metric))


def cmd_evaluate(args, out) -> None:
    doc = load_document(args)
    p = evaluate_point(doc.network, doc.modes, args.users)
    _emit(out, "n_users", p.n_users)
    for k, v in metric_values(p).items():
        _emit(out, k, v)
    _emit(out, "saturated", p.saturated)


def cmd_sweep(args, out) -> None:
    doc = load_document(args)
    result = sweep(doc.network, doc.modes, doc.n_from, doc.n_to)
    text = write_csv(result)
    if args.out:
        _write(args.out, text)
        _plots(args, result, None, str(Path(args.out).with_suffix("")))
    else:
        out.write(text)
        if args.metrics:
            _plots(args, result, None, "sweep")


def cmd_compare(args, out) -> None:
    doc = load_document(args)
    upgraded_cfg = apply_upgrade(doc.network, doc.upgrade_or_default)
    base = sweep(doc.network, doc.modes, doc.n_from, doc.n_to)
    upg = sweep(upgraded_cfg, doc.modes, doc.n_from, doc.n_to)
    result = compare(base, upg)
    prefix = args.out_prefix
    _write(f"{prefix}_baseline.csv", write_csv(base))
    _write(f"{prefix}_upgraded.csv", write_csv(upg))
    _write(f"{prefix}_delta.csv", write_delta_csv(result))
    _plots(args, base, upg, prefix)
    _emit(out, "baseline_csv", f"{prefix}_baseline.csv")
    _emit(out, "upgraded_csv", f"{prefix}_upgraded.csv")
    _emit(out, "delta_csv", f"{prefix}_delta.csv")


def cmd_threshold(args, out) -> None:
    doc = load_document(args)
    config = apply_upgrade(doc.network, doc.upgrade_or_default) if args.upgraded else doc.network
    report = find_threshold(sweep(config, doc.modes, doc.n_from, doc.n_to), doc.criteria)
    label = "upgraded" if args.upgraded else "baseline"
    print(f"# {label} sweep n={doc.n_from}..{doc.n_to}", file=out)
    for name, n in report.first_violation.items():
        verdict = f"first violated at n={n}" if n is not None else "never violated"
        print(f"#   {name} = {format_real(getattr(doc.criteria, name))}: {verdict}", file=out)
    for name, n in report.first_violation.items():
        _emit(out, f"{name}.first_violation", n)
    _emit(out, "upgrade_required_at", report.upgrade_required_at)


def cmd_validate(args, out) -> None:
    doc = load_document(args)
    n = args.users if args.users is not None else doc.n_to
    if n <= 0:
        raise CliError("validate needs at least one user")
    sim_cfg = des.sim_config_for_load(doc.network, n, seed=args.seed, measured_arrivals=args.arrivals)
    stats = des.simulate_queue(sim_cfg)
    wait, drop = des.analytic_predictions(doc.network, n)
    report = des.validate_against_analytic(stats, wait, drop, args.tolerance)
    _emit(out, "n_users", n)
    _emit(out, "seed", args.seed)
    _emit(out, "generator", stats.generator)
    _emit(out, "measured_arrivals", args.arrivals)
    for c in report.checks:
        status = "skipped" if c.passed is None else ("pass" if c.passed else "fail")
        _emit(out, f"{c.name}.observed", c.observed)
        _emit(out, f"{c.name}.predicted", c.predicted)
        _emit(out, f"{c.name}.status", status)
    _emit(out, "result", "pass" if report.passed else "fail")
    if not report.passed:
        raise CliError("simulated statistics disagree with the analytic model")


def _nonneg_int(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def _pos_int(text: str) -> int:
    v = int(float(text))
    if v <= 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", help="scenario JSON file (default: reference network, users 1..50)")
    common.add_argument("--set", dest="overrides", action="append", metavar="SECTION.KEY=VALUE",
                        help="override a scenario value after parsing; repeatable")
    common.add_argument("--from", dest="n_from", type=_nonneg_int, help="first user count of the sweep")
    common.add_argument("--to", dest="n_to", type=_nonneg_int, help="last user count of the sweep")

    plot = argparse.ArgumentParser(add_help=False)
    plot.add_argument("--plot", dest="metrics", action="append", choices=METRIC_COLUMNS, metavar="METRIC",
                      help=f"write an SVG plot of METRIC; repeatable. One of: {', '.join(METRIC_COLUMNS)}")

    parser = argparse.ArgumentParser(prog="capplan", description="ISP capacity planning with an analytic queueing model")
    sub = parser.add_subparsers(dest="command", metavar="{evaluate,sweep,compare,threshold,validate,help}")

    p = sub.add_parser("evaluate", parents=[common], help="metrics for one user count")
    p.add_argument("--users", type=_nonneg_int, required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", parents=[common, plot], help="baseline sweep to CSV")
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("compare", parents=[common, plot], help="baseline vs upgraded CSVs")
    p.add_argument("--out-prefix", default="compare", help="prefix for the _baseline/_upgraded/_delta CSVs")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("threshold", parents=[common], help="first user count needing an upgrade")
    p.add_argument("--upgraded", action="store_true", help="search the upgraded configuration instead")
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("validate", parents=[common], help="check the queue model against simulation")
    p.add_argument("--users", type=_nonneg_int, help="load point (default: end of sweep range)")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--arrivals", type=_pos_int, default=200_000, help="measured arrivals")
    p.add_argument("--tolerance", type=float, default=0.05, help="relative tolerance")
    p.set_defaults(func=cmd_validate)

    sub.add_parser("help", help="show this message")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command == "help":
        parser.print_help(sys.stdout)
        return 0
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        args.func(args, sys.stdout)
    except (CliError, ScenarioError, ValueError) as exc:
        print(f"capplan: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

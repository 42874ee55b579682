"""Command-line front end.

Subcommands: bounds, ball, make-code, audit, simulate, adversary-search.
Every output starts with a header embedding the tool version, the fully
resolved parameter set (including rounded integer quantities), and the
master seed where one applies.  ``--reproducible`` suppresses the
timestamp line so identical runs are byte-identical.

Exit codes: 0 success, 2 validation, 3 scale ceiling, 4 I/O.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time

import numpy as np

from . import __version__
from ._bits import round_half_up
from .ball import BallSpec, ball_exponent_check, ball_size, ball_size_upper_bound
from .codebook import (
    audit_distance,
    gv_greedy_code,
    load_codebook,
    random_linear_code,
    sample_random_code,
    save_codebook,
)
from .adversary import optimal_two_step
from .exceptions import ScaleCeilingError, ValidationError
from .harness import (
    ExperimentConfig,
    bound_curve_emit,
    goodness_sweep,
    run_experiment,
)

CSV_FORMAT_VERSION = 1

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_SCALE = 3
EXIT_IO = 4


def _fmt(value) -> str:
    if isinstance(value, float):
        return "%.12g" % value
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    return str(value)


def _emit(out_path: str, header: dict, columns: list[str], rows: list[dict],
          fmt: str, reproducible: bool) -> None:
    header = dict(header)
    header.setdefault("tool", "onlinechannel")
    header.setdefault("tool_version", __version__)
    header.setdefault("csv_format_version", CSV_FORMAT_VERSION)
    if not reproducible:
        header["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%S")
    if fmt == "json":
        payload = {"header": {k: header[k] for k in sorted(header)},
                   "columns": columns,
                   "rows": [{c: row.get(c) for c in columns} for row in rows]}
        text = json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n"
    else:
        buf = io.StringIO()
        for key in sorted(header):
            buf.write(f"# {key}={_fmt(header[key])}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row.get(c)) for c in columns])
        text = buf.getvalue()
    if out_path == "-":
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="ascii") as fh:
            fh.write(text)


def _add_output_flags(parser):
    parser.add_argument("--out", default="-", help="output path, - for stdout")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--reproducible", action="store_true",
                        help="omit the timestamp header line")


def _parse_kv(pairs: list[str]) -> dict:
    out = {}
    for item in pairs:
        if "=" not in item:
            raise ValidationError(f"expected key=value, got {item!r}")
        key, value = item.split("=", 1)
        out[key] = value
    return out


def _read_config_file(path: str) -> dict:
    out = {}
    with open(path, "r", encoding="ascii") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValidationError(f"config lines must be key=value, got {line!r}")
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    return out


def _cmd_bounds(args) -> int:
    if args.steps < 1:
        raise ValidationError("steps must be positive")
    grid = np.linspace(args.p_min, args.p_max, args.steps)
    rows = bound_curve_emit(grid)
    columns = ["p", "gv_lower", "shannon_upper", "four_p_upper", "online_upper",
               "exponent_gap", "rate_margin"]
    data = [{
        "p": r.p, "gv_lower": r.gv_lower, "shannon_upper": r.shannon_upper,
        "four_p_upper": r.four_p_upper, "online_upper": r.online_upper,
        "exponent_gap": r.exponent_gap, "rate_margin": r.rate_margin,
    } for r in rows]
    header = {"subcommand": "bounds", "p_min": args.p_min, "p_max": args.p_max,
              "steps": args.steps}
    _emit(args.out, header, columns, data, args.format, args.reproducible)
    return EXIT_OK


def _cmd_ball(args) -> int:
    if args.exponent_check:
        if args.p is None:
            raise ValidationError("--exponent-check needs --p")
        n_grid = [int(tok) for tok in args.n_grid.split(",")] if args.n_grid else [100, 200, 300, 400]
        q_values = ([float(t) for t in args.q_list.split(",")]
                    if args.q_list else None)
        rows = ball_exponent_check(args.p, n_grid, q_values=q_values,
                                   alpha_points=args.alpha_points,
                                   slack_constant=args.slack_constant)
        columns = ["n", "alpha", "q", "alpha_n", "p_n", "q_n", "rate",
                   "exponent_bound", "correction", "slack"]
        data = [r.__dict__ for r in rows]
        header = {"subcommand": "ball-exponent-check", "p": args.p,
                  "slack_constant": args.slack_constant}
        _emit(args.out, header, columns, data, args.format, args.reproducible)
        return EXIT_OK
    if None in (args.n, args.alpha_n, args.pn, args.qn):
        raise ValidationError("ball needs --n --alpha-n --pn --qn")
    spec = BallSpec(n=args.n, alpha_n=args.alpha_n, p_n=args.pn, q_n=args.qn)
    size = ball_size(spec, mode=args.mode)
    upper = ball_size_upper_bound(spec, mode=args.mode)
    columns = ["n", "alpha_n", "p_n", "q_n", "mode", "exact", "log2",
               "upper_bound_exact", "upper_bound_log2"]
    row = {"n": spec.n, "alpha_n": spec.alpha_n, "p_n": spec.p_n, "q_n": spec.q_n,
           "mode": size.mode, "exact": size.exact, "log2": size.log2_value,
           "upper_bound_exact": upper.exact, "upper_bound_log2": upper.log2_value}
    header = {"subcommand": "ball", "n": spec.n, "alpha_n": spec.alpha_n,
              "p_n": spec.p_n, "q_n": spec.q_n}
    _emit(args.out, header, columns, [row], args.format, args.reproducible)
    return EXIT_OK


def _cmd_make_code(args) -> int:
    if args.kind == "random":
        if args.messages is None and args.rate is None:
            raise ValidationError("random codes need --messages or --rate")
        m = args.messages
        if m is None:
            m = round_half_up(2 ** (args.rate * args.n))
        code = sample_random_code(args.n, m, args.seed)
    elif args.kind == "gv":
        if args.min_distance is None:
            raise ValidationError("gv codes need --min-distance")
        code = gv_greedy_code(args.n, args.min_distance)
    elif args.kind == "linear":
        if args.k is None:
            raise ValidationError("linear codes need --k")
        code = random_linear_code(args.n, args.k, args.seed)
    else:  # pragma: no cover - argparse restricts choices
        raise ValidationError(f"unknown kind {args.kind!r}")
    if args.out == "-":
        raise ValidationError("make-code needs --out FILE (codebook format is a file)")
    save_codebook(code, args.out)
    sys.stdout.write(
        f"wrote {code.num_messages} codewords of length {code.n} "
        f"(kind={code.kind}) to {args.out}\n"
    )
    return EXIT_OK


def _cmd_audit(args) -> int:
    code = load_codebook(args.code)
    if args.mode == "goodness":
        if args.epsilon is None:
            raise ValidationError("goodness audits need --epsilon")
        sweep = goodness_sweep(code, args.alpha, args.p, args.epsilon,
                               seed=args.seed, max_patterns=args.max_patterns)
        columns = ["prefix", "error", "class_size", "class_lower", "class_upper",
                   "class_ok", "intrusion_sum", "intrusion_threshold",
                   "intrusion_ok", "vulnerable_count", "intrusion_sum_codewords",
                   "ball_count"]
        data = [{
            "prefix": r.prefix, "error": r.error, "class_size": r.class_size,
            "class_lower": r.class_lower, "class_upper": r.class_upper,
            "class_ok": r.class_ok, "intrusion_sum": r.intrusion_sum,
            "intrusion_threshold": r.intrusion_threshold,
            "intrusion_ok": r.intrusion_ok,
            "vulnerable_count": r.vulnerable_count,
            "intrusion_sum_codewords": r.intrusion_sum_codewords,
            "ball_count": r.ball_count,
        } for r in sweep.reports]
        header = {"subcommand": "audit-goodness", "code": args.code,
                  "alpha": args.alpha, "p": args.p, "epsilon": args.epsilon,
                  "alpha_n": sweep.alpha_n, "p_n": sweep.p_n,
                  "epsilon_n": sweep.epsilon_n, "prefixes": sweep.prefixes,
                  "patterns": sweep.patterns, "exhaustive": sweep.exhaustive,
                  "class_ok_fraction": sweep.class_ok_fraction,
                  "intrusion_ok_fraction": sweep.intrusion_ok_fraction,
                  "both_ok_fraction": sweep.both_ok_fraction,
                  "master_seed": args.seed}
        _emit(args.out, header, columns, data, args.format, args.reproducible)
        return EXIT_OK
    # distance audit
    if args.gamma is None:
        raise ValidationError("distance audits need --gamma")
    alpha_n = round_half_up(args.alpha * code.n)
    p_n = round_half_up(args.p * code.n)
    report = audit_distance(code, alpha_n, p_n, args.gamma)
    columns = ["prefix", "removed_count", "removed", "oversized"]
    data = [{
        "prefix": label,
        "removed_count": removed.size,
        "removed": " ".join(str(int(u)) for u in removed),
        "oversized": label in report.oversized_prefixes,
    } for label, removed in sorted(report.removals.items())]
    header = {"subcommand": "audit-distance", "code": args.code,
              "alpha": args.alpha, "p": args.p, "gamma": args.gamma,
              "alpha_n": alpha_n, "p_n": p_n,
              "epsilon_n": report.epsilon_n,
              "removal_threshold": report.removal_threshold,
              "kept_messages": report.kept_messages.size,
              "num_messages": report.num_messages}
    _emit(args.out, header, columns, data, args.format, args.reproducible)
    return EXIT_OK


def _cmd_simulate(args) -> int:
    values = {}
    if args.config:
        values.update(_read_config_file(args.config))
    overrides = {
        "n": args.n, "alpha": args.alpha, "p": args.p,
        "num_messages": args.messages, "rate": args.rate,
        "code_kind": args.code_kind, "code_seed": args.code_seed,
        "code_file": args.code_file, "code_min_distance": args.min_distance,
        "code_k": args.k, "adversary": args.adversary,
        "tie_rule": args.tie_rule, "trials": args.trials,
        "master_seed": args.master_seed,
    }
    for key, value in overrides.items():
        if value is not None:
            values[key] = value
    adv_params = _parse_kv(args.adv_param or [])

    known_int = {"n", "num_messages", "code_seed", "code_min_distance",
                 "code_k", "trials", "master_seed"}
    known_float = {"alpha", "p", "rate"}
    known_str = {"code_kind", "code_file", "adversary", "tie_rule"}
    kwargs = {}
    for key, value in values.items():
        if key in known_int:
            kwargs[key] = int(value)
        elif key in known_float:
            kwargs[key] = float(value)
        elif key in known_str:
            kwargs[key] = str(value)
        elif key.startswith("adv_"):
            adv_params.setdefault(key[4:], value)
        else:
            raise ValidationError(f"unknown config key {key!r}")
    for key in ("n", "trials", "master_seed"):
        if key not in kwargs:
            raise ValidationError(f"simulate needs {key}")
    config = ExperimentConfig(adversary_params=adv_params, **kwargs)

    result = run_experiment(config)
    columns = ["trial", "message", "decoded", "success", "distance",
               "tie_count", "flips_used", "flips_prefix", "rejected",
               "expected_error"]
    data = [r.__dict__ for r in result.records]
    header = dict(config.resolved())
    header.update({
        "subcommand": "simulate",
        "failures": result.failures,
        "error_rate": result.error_rate,
        "wilson_low": result.wilson_low,
        "wilson_high": result.wilson_high,
        "expected_error_rate": result.expected_error_rate,
        "mean_flips": result.mean_flips,
        "mean_prefix_flips": result.mean_prefix_flips,
        "code_messages": result.code.num_messages,
    })
    _emit(args.out, header, columns, data, args.format, args.reproducible)
    return EXIT_OK


def _cmd_adversary_search(args) -> int:
    if args.code:
        code = load_codebook(args.code)
    else:
        if args.n is None or args.messages is None:
            raise ValidationError("adversary-search needs --code or --n/--messages")
        code = sample_random_code(args.n, args.messages, args.code_seed)
    result = optimal_two_step(code, args.alpha_n, args.pn,
                              tie_rule=args.tie_rule, e1_rule=args.e1_rule,
                              seed=args.seed)
    columns = ["prefix", "e1"]
    data = [{"prefix": k, "e1": v} for k, v in sorted(result.prefix_e1.items())]
    header = {
        "subcommand": "adversary-search",
        "alpha_n": result.alpha_n, "p_n": result.p_n,
        "tie_rule": result.tie_rule, "e1_rule": result.e1_rule,
        "num_messages": result.num_messages,
        "strict_error_rate": result.strict_error_rate,
        "expected_error_rate": result.expected_error_rate,
        "master_seed": 0 if args.seed is None else args.seed,
    }
    if result.zero_e1_prefix_fraction is not None:
        header["zero_e1_prefix_fraction"] = result.zero_e1_prefix_fraction
    _emit(args.out, header, columns, data, args.format, args.reproducible)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="onlinechannel",
        description="Desk-scale laboratory for coding against causal jammers",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_bounds = sub.add_parser("bounds", help="capacity bound curves")
    p_bounds.add_argument("--p-min", type=float, default=0.0)
    p_bounds.add_argument("--p-max", type=float, default=0.25)
    p_bounds.add_argument("--steps", type=int, default=100,
                          help="number of grid points (rows)")
    _add_output_flags(p_bounds)
    p_bounds.set_defaults(func=_cmd_bounds)

    p_ball = sub.add_parser("ball", help="confusion-ball sizes and exponent sweeps")
    p_ball.add_argument("--n", type=int)
    p_ball.add_argument("--alpha-n", type=int)
    p_ball.add_argument("--pn", type=int)
    p_ball.add_argument("--qn", type=int)
    p_ball.add_argument("--mode", choices=("auto", "exact", "log2"), default="auto")
    p_ball.add_argument("--exponent-check", action="store_true")
    p_ball.add_argument("--p", type=float, help="flip fraction for --exponent-check")
    p_ball.add_argument("--n-grid", help="comma-separated lengths")
    p_ball.add_argument("--q-list", help="comma-separated q fractions")
    p_ball.add_argument("--alpha-points", type=int, default=5)
    p_ball.add_argument("--slack-constant", type=float, default=2.0)
    _add_output_flags(p_ball)
    p_ball.set_defaults(func=_cmd_ball)

    p_make = sub.add_parser("make-code", help="construct and save a codebook")
    p_make.add_argument("--kind", choices=("random", "gv", "linear"), required=True)
    p_make.add_argument("--n", type=int, required=True)
    p_make.add_argument("--messages", type=int)
    p_make.add_argument("--rate", type=float)
    p_make.add_argument("--seed", type=int, default=0)
    p_make.add_argument("--min-distance", type=int)
    p_make.add_argument("--k", type=int)
    p_make.add_argument("--out", default="-", help="codebook file path")
    p_make.set_defaults(func=_cmd_make_code)

    p_audit = sub.add_parser("audit", help="goodness or distance audits")
    p_audit.add_argument("--code", required=True, help="codebook file")
    p_audit.add_argument("--mode", choices=("goodness", "distance"),
                         default="goodness")
    p_audit.add_argument("--alpha", type=float, required=True)
    p_audit.add_argument("--p", type=float, required=True)
    p_audit.add_argument("--epsilon", type=float)
    p_audit.add_argument("--gamma", type=float)
    p_audit.add_argument("--seed", type=int, default=0)
    p_audit.add_argument("--max-patterns", type=int)
    _add_output_flags(p_audit)
    p_audit.set_defaults(func=_cmd_audit)

    p_sim = sub.add_parser("simulate", help="Monte Carlo transmission experiment")
    p_sim.add_argument("--config", help="flat key=value config file")
    p_sim.add_argument("--n", type=int)
    p_sim.add_argument("--alpha", type=float)
    p_sim.add_argument("--p", type=float)
    p_sim.add_argument("--messages", type=int)
    p_sim.add_argument("--rate", type=float)
    p_sim.add_argument("--code-kind", choices=("random", "gv_greedy", "linear"))
    p_sim.add_argument("--code-seed", type=int)
    p_sim.add_argument("--code-file")
    p_sim.add_argument("--min-distance", type=int)
    p_sim.add_argument("--k", type=int)
    p_sim.add_argument("--adversary")
    p_sim.add_argument("--adv-param", action="append", metavar="KEY=VALUE")
    p_sim.add_argument("--tie-rule", choices=("lowest_index", "uniform_random"))
    p_sim.add_argument("--trials", type=int)
    p_sim.add_argument("--master-seed", type=int)
    _add_output_flags(p_sim)
    p_sim.set_defaults(func=_cmd_simulate)

    p_search = sub.add_parser("adversary-search",
                              help="exhaustive two-step best-response search")
    p_search.add_argument("--code", help="codebook file")
    p_search.add_argument("--n", type=int)
    p_search.add_argument("--messages", type=int)
    p_search.add_argument("--code-seed", type=int, default=0)
    p_search.add_argument("--alpha-n", type=int, required=True)
    p_search.add_argument("--pn", type=int, required=True)
    p_search.add_argument("--tie-rule", choices=("lowest_index", "uniform_random"),
                          default="uniform_random")
    p_search.add_argument("--e1-rule", choices=("optimal", "zero", "random"),
                          default="optimal")
    p_search.add_argument("--seed", type=int)
    _add_output_flags(p_search)
    p_search.set_defaults(func=_cmd_adversary_search)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, ValueError) as exc:
        _error_record(exc, EXIT_VALIDATION)
        return EXIT_VALIDATION
    except ScaleCeilingError as exc:
        _error_record(exc, EXIT_SCALE)
        return EXIT_SCALE
    except OSError as exc:
        _error_record(exc, EXIT_IO)
        return EXIT_IO


def _error_record(exc: Exception, code: int) -> None:
    record = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    sys.stderr.write(json.dumps(record, sort_keys=True) + "\n")


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

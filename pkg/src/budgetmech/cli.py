"""Command-line front end.

Subcommands: run, verify, bench, replay, xos-constant.
Exit codes: 0 success, 1 verification failures, 2 schema violation,
3 enumeration cap exceeded, 4 I/O error.
"""

import argparse
import csv
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from .errors import CapExceeded, InputError, SchemaError
from .instance_io import (
    instance_hash,
    instance_to_json,
    load_instance_file,
    outcome_to_json,
)
from .intersection import IntersectionSpec, get_blackbox
from .mechanisms import run_intersection_mechanism, run_matroid_mechanism
from .oracle import brute_force_opt
from .matroids import set_weight
from .rationals import format_rational, mpq, to_decimal
from .verify import (
    GeneratorConfig,
    gen_bipartite_instance,
    gen_matroid_instance,
    make_runner,
    replay_failure,
    run_verification,
)
from .xos import XosParams, optimize_constant, xos_mechanism_main

EXIT_OK = 0
EXIT_FAILURES = 1
EXIT_SCHEMA = 2
EXIT_CAP = 3
EXIT_IO = 4


def _print_json(doc):
    print(json.dumps(doc, indent=2, sort_keys=True))


def _cmd_run(args):
    loaded = load_instance_file(args.instance)
    mechanism = args.mechanism
    if mechanism is None:
        if loaded.structure is None:
            mechanism = "xos"
        elif isinstance(loaded.structure, IntersectionSpec):
            mechanism = "intersection"
        else:
            mechanism = "matroid"

    if mechanism == "matroid":
        outcome = run_matroid_mechanism(loaded.mechanism_instance())
    elif mechanism == "intersection":
        inst = loaded.mechanism_instance()
        blackbox = get_blackbox(args.apx, inst.structure)
        outcome = run_intersection_mechanism(inst, blackbox)
    elif mechanism == "xos":
        if loaded.xos is None:
            raise SchemaError("xos", "missing (required for --mechanism xos)")
        params = XosParams(alpha=mpq(args.alpha), beta=_parse_cli_rational(args.beta),
                           gamma=mpq(args.gamma), seed=args.seed)
        outcome = xos_mechanism_main(loaded.xos, loaded.costs, loaded.bids,
                                     loaded.budget, params)
    else:
        raise SchemaError("mechanism", f"unknown mechanism {mechanism!r}")

    doc = outcome_to_json(outcome, include_trace=args.trace)
    doc["mechanism"] = mechanism
    _print_json(doc)
    return EXIT_OK


def _parse_cli_rational(text):
    try:
        if "/" in str(text):
            num, den = str(text).split("/")
            return mpq(int(num), int(den))
        return mpq(str(text))
    except Exception as exc:
        raise SchemaError("flag", f"cannot parse rational {text!r}") from exc


def _cmd_verify(args):
    try:
        with open(args.config) as fh:
            config = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError("config", f"invalid JSON: {exc}") from exc
    if args.threads is not None:
        config["threads"] = args.threads

    reports, total_failures = run_verification(config)

    os.makedirs(args.out, exist_ok=True)
    report_path = os.path.join(args.out, "report.json")
    with open(report_path, "w") as fh:
        json.dump({"reports": [r.to_json() for r in reports]}, fh, indent=2,
                  sort_keys=True)
    csv_path = os.path.join(args.out, "summary.csv")
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["property", "mechanism", "checked", "failed"])
        for r in reports:
            writer.writerow([r.property, r.mechanism, r.instances_checked,
                             len(r.failures)])

    for r in reports:
        status = "ok" if r.passed else f"{len(r.failures)} failure(s)"
        print(f"{r.property:16s} {r.mechanism:22s} checked={r.instances_checked:<6d} {status}")
    if total_failures:
        print(f"FAILURES: {total_failures}")
        return EXIT_FAILURES
    print("all properties hold")
    return EXIT_OK


def _bench_generator_config(config):
    return GeneratorConfig(
        count=config.get("count", 100),
        seed=config.get("seed", 0),
        n_range=tuple(config.get("n_range", [3, 12])),
        kinds=tuple(config.get("kinds", ["uniform", "partition", "graphic", "deadline"])),
        weight_dist=config.get("weight_dist", "uniform"),
        budget_regime=config.get("budget_regime", "mixed"),
    )


def _bench_chunk(config, mechanism, indices):
    gconf = _bench_generator_config(config)
    rows = []
    for index in indices:
        if mechanism == "matroid":
            inst = gen_matroid_instance(gconf, index)
            kind = inst.structure.kind
            alpha = ""
        else:
            inst = gen_bipartite_instance(gconf, index)
            kind = "bipartite"
            alpha = "1" if mechanism == "intersection-exact" else str(inst.structure.k)
        runner = make_runner(mechanism, inst)
        started = time.perf_counter_ns()
        outcome = runner(inst)
        elapsed_us = (time.perf_counter_ns() - started) // 1000
        alloc_value = set_weight(inst.weights, outcome.allocation)
        opt = brute_force_opt(inst.structure, inst.weights, inst.true_costs,
                              inst.budget)
        opt_value = set_weight(inst.weights, opt)
        ratio = opt_value / alloc_value if alloc_value > 0 else mpq(0)
        rows.append([
            instance_hash(instance_to_json(inst)),
            len(inst.structure.ground),
            kind,
            mechanism,
            alpha,
            to_decimal(ratio),
            to_decimal(outcome.total_payment / inst.budget),
            elapsed_us,
        ])
    return rows


def _bench_rows(config, threads=1):
    mechanisms = config.get("mechanisms", ["matroid"])
    for mechanism in mechanisms:
        if mechanism not in ("matroid", "intersection-exact", "intersection-greedy"):
            raise SchemaError("mechanisms", f"unknown mechanism {mechanism!r}")
    count = config.get("count", 100)
    for mechanism in mechanisms:
        indices = list(range(count))
        if threads > 1 and len(indices) > 1:
            size = max(1, len(indices) // (threads * 4))
            chunks = [indices[i:i + size] for i in range(0, len(indices), size)]
            with ProcessPoolExecutor(max_workers=threads) as pool:
                for rows in pool.map(_bench_chunk, [config] * len(chunks),
                                     [mechanism] * len(chunks), chunks):
                    yield from rows
        else:
            yield from _bench_chunk(config, mechanism, indices)


def _cmd_bench(args):
    try:
        with open(args.config) as fh:
            config = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError("config", f"invalid JSON: {exc}") from exc
    try:
        with open(args.out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow([
                "instance_hash", "n", "matroid_kind", "mechanism", "alpha",
                "ratio", "total_payment_over_budget", "runtime_us",
            ])
            for row in _bench_rows(config, threads=args.threads or 1):
                writer.writerow(row)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_replay(args):
    with open(args.report) as fh:
        doc = json.load(fh)
    records = []
    for report in doc.get("reports", []):
        records.extend(report.get("failures", []))
    if not records:
        print("report contains no failures; nothing to replay")
        return EXIT_OK
    missing = 0
    for idx, record in enumerate(records):
        reproduced = replay_failure(record)
        tag = "reproduced" if reproduced else "MISSING"
        print(f"[{idx}] {record['property']} {record['mechanism']} "
              f"element={record.get('element')} deviation={record.get('deviation')}: {tag}")
        if not reproduced:
            missing += 1
    if missing:
        print(f"{missing} failure record(s) did not reproduce")
        return EXIT_FAILURES
    print(f"all {len(records)} failure record(s) reproduced")
    return EXIT_OK


def _cmd_xos_constant(args):
    gamma = _parse_cli_rational(args.gamma)
    alpha, beta, ratio = optimize_constant(gamma)
    _print_json({
        "gamma": format_rational(gamma),
        "alpha": format_rational(alpha),
        "alpha_decimal": to_decimal(alpha),
        "beta": format_rational(beta),
        "beta_decimal": to_decimal(beta),
        "ratio": format_rational(ratio),
        "ratio_decimal": to_decimal(ratio),
    })
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="budgetmech",
        description="Budget-feasible procurement mechanisms over matroids, "
                    "matroid intersections and XOS valuations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a mechanism on an instance file")
    p_run.add_argument("instance", help="path to the instance JSON file")
    p_run.add_argument("--mechanism", choices=["matroid", "intersection", "xos"],
                       default=None, help="default: inferred from the file")
    p_run.add_argument("--apx", choices=["exact-bipartite", "greedy"],
                       default="exact-bipartite",
                       help="blackbox for the intersection mechanism")
    p_run.add_argument("--seed", type=int, default=0, help="XOS coin-tape seed")
    p_run.add_argument("--alpha", default="218")
    p_run.add_argument("--beta", default="9/2")
    p_run.add_argument("--gamma", default="4")
    p_run.add_argument("--trace", action="store_true", help="include the run trace")
    p_run.set_defaults(func=_cmd_run)

    p_verify = sub.add_parser("verify", help="run the property-verification suites")
    p_verify.add_argument("config", help="path to the verification config JSON")
    p_verify.add_argument("--out", default="verify-reports",
                          help="directory for report.json and summary.csv")
    p_verify.add_argument("--threads", type=int, default=None)
    p_verify.set_defaults(func=_cmd_verify)

    p_bench = sub.add_parser("bench", help="Monte Carlo benchmark sweep to CSV")
    p_bench.add_argument("config", help="sweep config JSON")
    p_bench.add_argument("out", help="output CSV path")
    p_bench.add_argument("--threads", type=int, default=1)
    p_bench.set_defaults(func=_cmd_bench)

    p_replay = sub.add_parser("replay", help="re-derive failures from a report file")
    p_replay.add_argument("report", help="path to report.json written by verify")
    p_replay.set_defaults(func=_cmd_replay)

    p_const = sub.add_parser("xos-constant",
                             help="optimal (alpha, beta) and ratio for a gamma")
    p_const.add_argument("--gamma", default="3")
    p_const.set_defaults(func=_cmd_xos_constant)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (SchemaError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

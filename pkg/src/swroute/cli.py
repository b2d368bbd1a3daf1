"""Command line front end: solve, bench, and replay.

Exit codes: 0 success, 2 validation errors, 3 infeasible instance.
Log level comes from the SW_LOG environment variable.
"""

import argparse
import json
import logging
import os
import sys

from . import altmin, bench, dynamic, export, oracle
from .errors import InfeasiblePattern, ScenarioValidationError
from .generator import MILE, random_scenario
from .model import route_to_doc, validate_scenario


def _setup_logging():
    level = os.environ.get("SW_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING))


def _parse_kv(pairs):
    out = {}
    for pair in pairs or []:
        key, _, val = pair.partition("=")
        out[key] = val
    return out


def _load_scenario(args):
    if args.random:
        kv = _parse_kv(args.random)
        return random_scenario(
            args.seed,
            int(kv.get("n", 4)),
            n_clusters=int(kv["N"]) if "N" in kv else None,
            radius=float(kv.get("r", 0.05)) * MILE,
            gamma2=float(kv.get("gamma2", 1.0)),
            alpha3=float(kv.get("alpha3", 0.1)),
            mps=int(kv.get("mps", 6)),
            capacity=int(kv.get("capacity", 6)),
        )
    with open(args.scenario) as fh:
        return validate_scenario(json.load(fh))


def _write(path, text):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_solve(args):
    scenario = _load_scenario(args)
    if args.hmax:
        from dataclasses import replace

        scenario = replace(scenario, config=replace(scenario.config, h_max=args.hmax))
    result = altmin.solve(scenario)
    route = result.route
    if args.oracle:
        exact = oracle.solve_exact(scenario, time_cap=args.time_cap)
        doc = route_to_doc(route, scenario)
        doc["oracle"] = {
            "cost": exact.cost,
            "proven": exact.proven,
            "gap": altmin.optimality_gap(result.cost, exact.cost),
        }
    else:
        doc = route_to_doc(route, scenario)
    doc["hbar"] = result.hbar
    doc["termination"] = result.termination
    _write(args.out, export.dumps(doc))
    if args.geojson:
        _write(args.geojson, export.dumps(export.route_to_geojson(route, scenario)))
    if args.svg:
        _write(args.svg, export.route_to_svg(route, scenario) + "\n")
    return 0


def cmd_bench(args):
    if args.suite:
        with open(args.suite) as fh:
            suite = json.load(fh)
    else:
        suite = bench.default_suite()
    rows = bench.run_suite(
        suite, seed=args.seed, time_cap=args.time_cap, workers=args.workers
    )
    _write(args.out, bench.to_csv(rows))
    if args.out:
        sys.stdout.write(bench.to_table(rows) + "\n")
    return 0


def cmd_replay(args):
    with open(args.replay) as fh:
        doc = json.load(fh)
    base = {k: v for k, v in doc.items() if k != "batches"}
    batches = doc.get("batches", [])
    if not batches:
        raise ScenarioValidationError([])
    first = dict(base)
    first["requests"] = batches[0]["requests"]
    if batches[0].get("clusters"):
        first["clusters"] = batches[0]["clusters"]
    scenario = validate_scenario(first)

    from .model import parse_scenario

    later = []
    for batch in batches[1:]:
        sub = dict(base)
        sub["requests"] = batch["requests"]
        requests = parse_scenario(sub).requests
        later.append((float(batch["time"]), requests, batch.get("clusters")))

    result = dynamic.run_replay(scenario, later)
    out = {
        "batches": [
            {
                "time": outcome.time,
                "route": route_to_doc(outcome.route, outcome.scenario),
            }
            for outcome in result.batches
        ],
        "per_passenger": result.passenger_times,
        "total_cost": result.total_cost,
        "shuttle_time": result.shuttle_time,
    }
    _write(args.out, export.dumps(out))
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="swroute", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="solve one scenario")
    solve.add_argument("--scenario", help="scenario JSON path")
    solve.add_argument("--random", nargs="*", help="generate instead: n=4 N=8 r=0.05 ...")
    solve.add_argument("--seed", type=int, default=0)
    solve.add_argument("--out", help="route JSON output path (default stdout)")
    solve.add_argument("--geojson", help="also write GeoJSON here")
    solve.add_argument("--svg", help="also write an SVG sketch here")
    solve.add_argument("--oracle", action="store_true", help="also run the exact oracle")
    solve.add_argument("--time-cap", type=float, default=3600.0)
    solve.add_argument("--hmax", type=int, default=0)
    solve.set_defaults(func=cmd_solve)

    bench_p = sub.add_parser("bench", help="run a benchmark suite")
    bench_p.add_argument("--suite", help="suite JSON; omit for the built-in grid")
    bench_p.add_argument("--seed", type=int, default=0)
    bench_p.add_argument("--time-cap", type=float, default=3600.0)
    bench_p.add_argument("--workers", type=int, default=1)
    bench_p.add_argument("--out", help="CSV output path (default stdout)")
    bench_p.set_defaults(func=cmd_bench)

    replay = sub.add_parser("replay", help="replay timed request batches")
    replay.add_argument("--replay", required=True, help="replay JSON path")
    replay.add_argument("--out", help="output path (default stdout)")
    replay.set_defaults(func=cmd_replay)
    return parser


def main(argv=None):
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScenarioValidationError as exc:
        for violation in exc.violations:
            print(f"validation: {violation}", file=sys.stderr)
        return 2
    except InfeasiblePattern as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

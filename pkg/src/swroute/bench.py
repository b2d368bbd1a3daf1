"""Benchmark harness: heuristic vs. exact oracle over instance suites.

A suite is a list of instance shapes (n, clusters, gamma2, alpha3, radius
in miles, MPS); each row runs both solvers, records costs, wall times, and
the optimality gap. Output is CSV plus a readable table with the usual
markers: `*` zero gap, `<>` heuristic beat the time-capped oracle on both
cost and time.
"""

import csv
import io
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from . import altmin, oracle
from .generator import MILE, random_scenario

CSV_COLUMNS = [
    "instance",
    "n",
    "N",
    "altmin_cost",
    "hbar",
    "altmin_cpu_s",
    "oracle_cost",
    "proven",
    "oracle_cpu_s",
    "gap",
]


@dataclass(frozen=True)
class BenchRow:
    instance: str
    n: int
    n_clusters: int
    altmin_cost: float
    hbar: int
    altmin_cpu: float
    oracle_cost: float
    proven: bool
    oracle_cpu: float
    gap: float

    @property
    def marker(self):
        if self.gap < 0 and self.altmin_cpu < self.oracle_cpu:
            return "<>"
        if abs(self.gap) < 1e-9:
            return "*"
        return ""


def default_suite():
    """Shapes mirroring the published experiment grid at desk scale."""
    rows = []
    for n, cl in ((4, 8), (4, 6), (5, 10), (5, 8), (6, 12), (6, 7)):
        rows.append({"n": n, "clusters": cl, "gamma2": 0.0, "alpha3": 0.0, "r": 0.3, "mps": 6})
        rows.append({"n": n, "clusters": cl, "gamma2": 1.0, "alpha3": 0.1, "r": 0.3, "mps": 6})
        rows.append({"n": n, "clusters": cl, "gamma2": 1.0, "alpha3": 0.1, "r": 0.15, "mps": 2})
    return {"instances": rows}


def run_instance(spec, seed, time_cap):
    name = spec.get(
        "name",
        "p{n:02d}-c{c:02d}-r{r}".format(n=spec["n"], c=spec.get("clusters", 2 * spec["n"]), r=spec.get("r", 0.05)),
    )
    scenario = random_scenario(
        seed,
        spec["n"],
        n_clusters=spec.get("clusters"),
        radius=spec.get("r", 0.05) * MILE,
        gamma2=spec.get("gamma2", 1.0),
        alpha3=spec.get("alpha3", 0.1),
        mps=spec.get("mps", 6),
        capacity=spec.get("capacity", 6),
    )
    t0 = time.perf_counter()
    heur = altmin.solve(scenario)
    t_heur = time.perf_counter() - t0

    exact = oracle.solve_exact(scenario, time_cap=time_cap)
    return BenchRow(
        instance=name,
        n=spec["n"],
        n_clusters=scenario.pattern.size,
        altmin_cost=heur.cost,
        hbar=heur.hbar,
        altmin_cpu=t_heur,
        oracle_cost=exact.cost,
        proven=exact.proven,
        oracle_cpu=exact.wall_time,
        gap=altmin.optimality_gap(heur.cost, exact.cost),
    )


def run_suite(suite, seed=0, time_cap=3600.0, workers=1):
    specs = suite["instances"]
    seeds = [seed + 1000 * i for i in range(len(specs))]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(run_instance, specs, seeds, [time_cap] * len(specs)))
    else:
        rows = [run_instance(s, sd, time_cap) for s, sd in zip(specs, seeds)]
    return rows


def to_csv(rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in rows:
        writer.writerow(
            [
                r.instance,
                r.n,
                r.n_clusters,
                f"{r.altmin_cost:.6f}",
                r.hbar,
                f"{r.altmin_cpu:.3f}",
                f"{r.oracle_cost:.6f}",
                int(r.proven),
                f"{r.oracle_cpu:.3f}",
                f"{r.gap:.6f}",
            ]
        )
    return buf.getvalue()


def to_table(rows):
    head = f"{'':2} {'instance':18} {'n':>3} {'N':>3} {'alt cost':>12} {'hbar':>4} {'alt s':>8} {'oracle':>12} {'prov':>4} {'ora s':>8} {'gap %':>8}"
    lines = [head, "-" * len(head)]
    for r in rows:
        lines.append(
            f"{r.marker:2} {r.instance:18} {r.n:>3} {r.n_clusters:>3} "
            f"{r.altmin_cost:>12.3f} {r.hbar:>4} {r.altmin_cpu:>8.2f} "
            f"{r.oracle_cost:>12.3f} {str(r.proven)[0]:>4} {r.oracle_cpu:>8.2f} "
            f"{100 * r.gap:>8.2f}"
        )
    return "\n".join(lines)

"""Compare the numba and numpy search backends on identical workloads.

Run: python3 benchmarks/bench_kernels.py [--runs 200] [--seed 7]

Times the full Monte Carlo simulation loop (sampling + per-run search) for
each backend on the same cost tables and seed, checks the results agree bit
for bit, and prints per-backend wall time. The exhaustive workload spans the
whole search space each run; the bnb workload forces branch and bound.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from gsdalloc._kernels import NUMBA_AVAILABLE, warmup
from gsdalloc.costs import NO_COST, CostTables
from gsdalloc.optimizer import simulate
from gsdalloc.persist import canonical_json, suggestions_to_dict


def synthetic_tables(n_tasks: int, n_sites: int, seed: int) -> CostTables:
    rng = np.random.default_rng(seed)
    exec_dist = rng.dirichlet(np.ones(5), size=(n_tasks, n_sites))
    pairs = tuple((i, j) for i in range(n_tasks) for j in range(i + 1, n_tasks))
    comm = rng.dirichlet(np.ones(5), size=(len(pairs), n_sites, n_sites))
    for p in range(len(pairs)):
        for s1 in range(n_sites):
            comm[p, s1, s1] = NO_COST
            for s2 in range(s1 + 1, n_sites):
                comm[p, s2, s1] = comm[p, s1, s2]
    return CostTables(
        tasks=tuple(f"t{i}" for i in range(n_tasks)),
        sites=tuple(f"s{i}" for i in range(n_sites)),
        avail=tuple(tuple(range(n_sites)) for _ in range(n_tasks)),
        exec_dist=exec_dist,
        coupled_pairs=pairs,
        comm_dist=comm,
    )


def bench(tables: CostTables, runs: int, seed: int, method: str, backend: str):
    started = time.perf_counter()
    result = simulate(tables, runs=runs, seed=seed, method=method, backend=backend)
    return time.perf_counter() - started, result


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--runs", type=int, default=200)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    backends = ["numpy"]
    if NUMBA_AVAILABLE:
        warmup("numba")  # jit compile outside the timed region
        backends.insert(0, "numba")
    else:
        print("numba not importable; timing numpy only")

    workloads = [
        ("exhaustive  7 tasks x 4 sites", synthetic_tables(7, 4, args.seed), "exhaustive"),
        ("bnb        10 tasks x 4 sites", synthetic_tables(10, 4, args.seed), "bnb"),
    ]

    for label, tables, method in workloads:
        print(f"\n{label}  ({tables.n_assignments} assignments, {args.runs} runs)")
        rendered: dict[str, str] = {}
        for backend in backends:
            elapsed, result = bench(tables, args.runs, args.seed, method, backend)
            rendered[backend] = canonical_json(suggestions_to_dict(result))
            per_run = elapsed / args.runs * 1e3
            print(f"  {backend:<6} {elapsed:8.3f}s total  {per_run:8.3f}ms/run")
        if len(rendered) == 2:
            match = rendered["numba"] == rendered["numpy"]
            print(f"  results identical: {match}")
            if not match:
                raise SystemExit("backend results diverged")


if __name__ == "__main__":
    main()

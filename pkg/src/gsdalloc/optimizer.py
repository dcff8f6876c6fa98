"""Monte Carlo search for low-cost task-to-site assignments.

Each run draws one concrete cost realization from the per-placement level
distributions (inverse-CDF sampling of level images, no within-bin jitter)
and finds its cheapest assignment. Assignments are then ranked by how often
they won. Small search spaces are enumerated outright; larger ones go through
branch and bound with an exact lexicographic tie-break, so both methods
return the same winner bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import kernel_set
from .costs import CostTables, build_cost_tables, DEFAULT_COUPLING_FACTOR
from .levels import LEVEL_IMAGES
from .model import CausalModel
from .project import ProjectCharacterization

DEFAULT_RUNS = 1000
EXHAUSTIVE_CAP = 100_000


@dataclass(frozen=True)
class Suggestion:
    """One ranked assignment: site name per task, win statistics attached."""

    assignment: tuple[str, ...]
    wins: int
    frequency: float
    mean_cost: float


@dataclass(frozen=True)
class SuggestionList:
    tasks: tuple[str, ...]
    runs: int
    seed: int
    suggestions: tuple[Suggestion, ...]

    def top(self, n: int) -> tuple[Suggestion, ...]:
        return self.suggestions[:n]


@dataclass(frozen=True)
class SearchArrays:
    """CostTables structure flattened into the kernel calling convention."""

    avail_flat: np.ndarray
    avail_off: np.ndarray
    pair_a: np.ndarray
    pair_b: np.ndarray
    order: np.ndarray
    comp_pairs: np.ndarray
    comp_off: np.ndarray
    lex_comp_pairs: np.ndarray
    lex_comp_off: np.ndarray
    n_assignments: int


def build_search_arrays(tables: CostTables) -> SearchArrays:
    n_tasks = len(tables.tasks)
    avail_off = np.zeros(n_tasks + 1, np.int64)
    flat: list[int] = []
    for t, sites in enumerate(tables.avail):
        flat.extend(sites)
        avail_off[t + 1] = len(flat)
    pairs = tables.coupled_pairs
    pair_a = np.array([p[0] for p in pairs], np.int64)
    pair_b = np.array([p[1] for p in pairs], np.int64)

    degree = np.zeros(n_tasks, np.int64)
    for a, b in pairs:
        degree[a] += 1
        degree[b] += 1
    # most-coupled tasks first so bound pruning bites early; ties by task index
    order = np.lexsort((np.arange(n_tasks), -degree)).astype(np.int64)

    pos_of = np.empty(n_tasks, np.int64)
    pos_of[order] = np.arange(n_tasks)

    def completion_csr(position_of_pair: list[int]) -> tuple[np.ndarray, np.ndarray]:
        buckets: list[list[int]] = [[] for _ in range(n_tasks)]
        for p, pos in enumerate(position_of_pair):
            buckets[pos].append(p)
        off = np.zeros(n_tasks + 1, np.int64)
        out: list[int] = []
        for k in range(n_tasks):
            out.extend(buckets[k])
            off[k + 1] = len(out)
        return np.array(out, np.int64), off

    comp_pairs, comp_off = completion_csr(
        [max(pos_of[a], pos_of[b]) for a, b in pairs]
    )
    lex_comp_pairs, lex_comp_off = completion_csr([b for _, b in pairs])

    n_assignments = 1
    for sites in tables.avail:
        n_assignments *= len(sites)

    return SearchArrays(
        avail_flat=np.array(flat, np.int64),
        avail_off=avail_off,
        pair_a=pair_a,
        pair_b=pair_b,
        order=order,
        comp_pairs=comp_pairs,
        comp_off=comp_off,
        lex_comp_pairs=lex_comp_pairs,
        lex_comp_off=lex_comp_off,
        n_assignments=n_assignments,
    )


def best_assignment(
    exec_img: np.ndarray,
    comm_img: np.ndarray,
    arrays: SearchArrays,
    method: str = "auto",
    kernels: dict | None = None,
) -> tuple[float, tuple[int, ...]]:
    """Cheapest assignment for one realized cost table.

    Ties go to the lexicographically smallest site tuple under either method.
    """
    if kernels is None:
        kernels = kernel_set()
    if method == "auto":
        method = "exhaustive" if arrays.n_assignments <= EXHAUSTIVE_CAP else "bnb"
    if method == "exhaustive":
        cost, sites = kernels["exhaustive"](
            exec_img, comm_img, arrays.avail_flat, arrays.avail_off, arrays.pair_a, arrays.pair_b
        )
    elif method == "bnb":
        cost = kernels["bnb"](
            exec_img,
            comm_img,
            arrays.avail_flat,
            arrays.avail_off,
            arrays.pair_a,
            arrays.pair_b,
            arrays.order,
            arrays.comp_pairs,
            arrays.comp_off,
        )
        sites = kernels["lex"](
            exec_img,
            comm_img,
            arrays.avail_flat,
            arrays.avail_off,
            arrays.pair_a,
            arrays.pair_b,
            arrays.lex_comp_pairs,
            arrays.lex_comp_off,
            cost,
        )
        if sites[0] < 0:
            raise RuntimeError("branch and bound found no assignment at its own optimum")
    else:
        raise ValueError(f"unknown method {method!r}")
    return float(cost), tuple(int(s) for s in sites)


def _sample_images(
    tables: CostTables,
    exec_cum: np.ndarray,
    comm_cum: np.ndarray,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    n_tasks, n_sites = tables.exec_dist.shape[:2]
    n_pairs = len(tables.coupled_pairs)
    u_exec = rng.random((n_tasks, n_sites))
    exec_lvl = (u_exec[..., None] >= exec_cum).sum(axis=-1)
    exec_img = LEVEL_IMAGES[exec_lvl]

    u_comm = rng.random((n_pairs, n_sites, n_sites))
    comm_lvl = (u_comm[..., None] >= comm_cum).sum(axis=-1)
    iu, ju = np.triu_indices(n_sites, k=1)
    comm_lvl[:, ju, iu] = comm_lvl[:, iu, ju]  # one draw per unordered site pair
    comm_img = LEVEL_IMAGES[comm_lvl]
    diag = np.arange(n_sites)
    comm_img[:, diag, diag] = 0.0
    return exec_img, comm_img


def simulate(
    tables: CostTables,
    runs: int = DEFAULT_RUNS,
    seed: int | None = None,
    method: str = "auto",
    backend: str | None = None,
) -> SuggestionList:
    if runs < 1:
        raise ValueError("runs must be >= 1")
    if seed is None:
        seed = np.random.SeedSequence().entropy
    arrays = build_search_arrays(tables)
    kernels = kernel_set(backend)
    exec_cum = np.cumsum(tables.exec_dist, axis=-1)[..., :4].copy()
    comm_cum = np.cumsum(tables.comm_dist, axis=-1)[..., :4].copy()

    tally: dict[tuple[int, ...], list] = {}
    for r in range(runs):
        child = np.random.SeedSequence(entropy=seed, spawn_key=(r,))
        rng = np.random.default_rng(child)
        exec_img, comm_img = _sample_images(tables, exec_cum, comm_cum, rng)
        cost, sites = best_assignment(exec_img, comm_img, arrays, method, kernels)
        entry = tally.setdefault(sites, [0, 0.0])
        entry[0] += 1
        entry[1] += cost

    ranked = sorted(tally.items(), key=lambda kv: (-kv[1][0], kv[0]))
    suggestions = tuple(
        Suggestion(
            assignment=tuple(tables.sites[s] for s in sites),
            wins=wins,
            frequency=wins / runs,
            mean_cost=total / wins,
        )
        for sites, (wins, total) in ranked
    )
    return SuggestionList(tasks=tables.tasks, runs=runs, seed=seed, suggestions=suggestions)


def run_simulation(
    model: CausalModel,
    project: ProjectCharacterization,
    runs: int = DEFAULT_RUNS,
    seed: int | None = None,
    coupling_factor: str = DEFAULT_COUPLING_FACTOR,
    method: str = "auto",
    backend: str | None = None,
) -> SuggestionList:
    tables = build_cost_tables(model, project, coupling_factor)
    return simulate(tables, runs=runs, seed=seed, method=method, backend=backend)

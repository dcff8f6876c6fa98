import numpy as np
import pytest

from gsdalloc import (
    CausalEdge,
    CausalLink,
    CausalModel,
    CausalNode,
    FactorDefinition,
    GoalDeclaration,
    Kind,
    Level,
    ProjectCharacterization,
    Scope,
    derive_causal_skeleton,
    parse_rules,
)
from gsdalloc.model import (
    AGG_MAXIMUM,
    AGG_MINIMUM,
    AGG_WEIGHTED_MEAN,
    POLARITY_BENEFIT,
    POLARITY_COST,
    ROLE_FACTOR,
    ROLE_GOAL,
    ROLE_INTERMEDIATE,
)


@pytest.fixture
def chain_rules():
    return parse_rules(
        "r1: cultural_differences & !common_working_history -> communication_problems\n"
    )


@pytest.fixture
def chain_model(chain_rules):
    """Factor pair -> problem -> intermediate -> goal, all site-pair factors."""
    goals = [GoalDeclaration("project_costs", POLARITY_COST, 1.0)]
    links = [
        CausalLink("communication_problems", "productivity", -1),
        CausalLink("productivity", "project_costs", -1),
    ]
    return derive_causal_skeleton(chain_rules, goals, links)


@pytest.fixture
def alloc_rules():
    return parse_rules(
        "r1: coupling & cultural_differences -> communication_problems\n"
        "r2: time_zone_difference >= high -> communication_problems\n"
    )


@pytest.fixture
def alloc_model(alloc_rules):
    """Small but complete allocation model with execution and comm factors."""
    catalog = [
        FactorDefinition("coupling", "coupling", Scope.TASK_PAIR),
        FactorDefinition("cultural_differences", "cultural differences", Scope.SITE_PAIR),
        FactorDefinition("time_zone_difference", "time zone difference", Scope.SITE_PAIR),
        FactorDefinition("site_experience", "site experience", Scope.SITE),
    ]
    goals = [GoalDeclaration("project_costs", POLARITY_COST, 1.0)]
    links = [
        CausalLink("communication_problems", "productivity", -1),
        CausalLink("site_experience", "productivity", 1),
        CausalLink("productivity", "project_costs", -1),
    ]
    return derive_causal_skeleton(alloc_rules, goals, links, catalog)


@pytest.fixture
def alloc_project():
    """Two tightly coupled design tasks plus one development task, three sites."""
    project = ProjectCharacterization(
        tasks=("design_a", "design_b", "development"),
        sites=("munich", "bangalore", "boston"),
        availability={},
    )
    set_pair_values(project)
    return project


def set_pair_values(project: ProjectCharacterization) -> None:
    project.set_value("coupling", ("design_a", "design_b"), Level.VERY_HIGH, Scope.TASK_PAIR)
    project.set_value("coupling", ("design_a", "development"), Level.LOW, Scope.TASK_PAIR)
    project.set_value("coupling", ("design_b", "development"), Level.LOW, Scope.TASK_PAIR)
    project.set_value("cultural_differences", ("*",), Level.HIGH, Scope.SITE_PAIR)
    project.set_value(
        "time_zone_difference", ("munich", "bangalore"), Level.MEDIUM, Scope.SITE_PAIR
    )
    project.set_value("time_zone_difference", ("munich", "boston"), Level.HIGH, Scope.SITE_PAIR)
    project.set_value(
        "time_zone_difference", ("bangalore", "boston"), Level.VERY_HIGH, Scope.SITE_PAIR
    )
    project.set_value("site_experience", ("munich",), Level.HIGH, Scope.SITE)
    project.set_value("site_experience", ("bangalore",), Level.MEDIUM, Scope.SITE)
    project.set_value("site_experience", ("boston",), Level.VERY_HIGH, Scope.SITE)


def random_model(rng: np.random.Generator, max_nodes: int = 8) -> CausalModel:
    """Random valid DAG model; roots are factors, sinks are goals."""
    n_factors = int(rng.integers(2, 4))
    n_derived = int(rng.integers(2, max_nodes - n_factors + 1))
    factor_ids = [f"f{i}" for i in range(n_factors)]
    derived_ids = [f"d{i}" for i in range(n_derived)]
    all_ids = factor_ids + derived_ids

    edges = []
    for k, nid in enumerate(derived_ids):
        pool = factor_ids + derived_ids[:k]
        n_parents = int(rng.integers(1, min(3, len(pool)) + 1))
        parents = rng.choice(len(pool), size=n_parents, replace=False)
        for p in sorted(parents):
            sign = 1 if rng.random() < 0.7 else -1
            weight = float(rng.choice([0.33, 0.66, 1.0]))
            edges.append(CausalEdge(pool[p], nid, sign, weight))

    has_out = {e.source for e in edges}
    sinks = [d for d in derived_ids if d not in has_out]
    nodes = [CausalNode(fid, ROLE_FACTOR) for fid in factor_ids]
    for nid in derived_ids:
        role = ROLE_GOAL if nid in sinks else ROLE_INTERMEDIATE
        polarity = (
            (POLARITY_COST if rng.random() < 0.5 else POLARITY_BENEFIT)
            if role == ROLE_GOAL
            else None
        )
        agg = [AGG_WEIGHTED_MEAN, AGG_MINIMUM, AGG_MAXIMUM][int(rng.integers(0, 3))]
        sigma = float(rng.choice([0.0, 0.1, 0.25]))
        nodes.append(CausalNode(nid, role, polarity, agg, sigma))

    raw = rng.random(len(sinks)) + 0.1
    weights = {s: float(w / raw.sum()) for s, w in zip(sinks, raw)}
    kinds = [Kind.ORDINAL, Kind.BOOLEAN]
    factors = tuple(
        FactorDefinition(fid, fid, Scope.SITE_PAIR, kinds[int(rng.integers(0, 2))])
        for fid in factor_ids
    )
    return CausalModel(
        factors=factors, nodes=tuple(nodes), edges=tuple(edges), goal_weights=weights
    )


def random_instance(rng: np.random.Generator):
    """Random realized cost tables plus search structure, kernel-call ready."""
    n_tasks = int(rng.integers(2, 7))
    n_sites = int(rng.integers(2, 5))
    avail = []
    for _ in range(n_tasks):
        count = int(rng.integers(1, n_sites + 1))
        sites = sorted(rng.choice(n_sites, size=count, replace=False).tolist())
        avail.append(sites)
    all_pairs = [(i, j) for i in range(n_tasks) for j in range(i + 1, n_tasks)]
    n_pairs = int(rng.integers(0, len(all_pairs) + 1))
    chosen = sorted(rng.choice(len(all_pairs), size=n_pairs, replace=False).tolist())
    pairs = [all_pairs[k] for k in chosen]

    levels = np.arange(5) / 4.0
    exec_img = levels[rng.integers(0, 5, size=(n_tasks, n_sites))]
    comm_img = levels[rng.integers(0, 5, size=(len(pairs), n_sites, n_sites))]
    for p in range(len(pairs)):
        upper = np.triu_indices(n_sites, k=1)
        comm_img[p][(upper[1], upper[0])] = comm_img[p][upper]
        np.fill_diagonal(comm_img[p], 0.0)
    return exec_img, comm_img, avail, pairs


def to_kernel_arrays(avail, pairs):
    flat = []
    off = [0]
    for sites in avail:
        flat.extend(sites)
        off.append(len(flat))
    return (
        np.array(flat, np.int64),
        np.array(off, np.int64),
        np.array([p[0] for p in pairs], np.int64),
        np.array([p[1] for p in pairs], np.int64),
    )

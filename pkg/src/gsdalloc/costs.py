"""Turn a model plus project data into per-placement cost distributions.

Execution cost of placing task t at site s: condition the network on every
project/task/site/task-site factor value that applies, query the joint over
the goal nodes, and collapse it to one five-level cost distribution using the
goal weights (benefit goals count mirrored, since more benefit means less
cost). Communication cost does the same for a coupled task pair across a site
pair, conditioning on project/task-pair/site-pair factors. Co-located pairs
communicate for free: a point mass on the lowest level.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .bayes import BeliefNetwork, compile_network, discretize_bell, infer_joint
from .errors import InfeasibleError
from .levels import LEVEL_IMAGES, N_LEVELS, Scope, value_image
from .model import POLARITY_BENEFIT, CausalModel
from .project import ProjectCharacterization, effective_goal_weights

DEFAULT_COUPLING_FACTOR = "coupling"

# Same-site communication: all mass on very_low, numeric image zero.
NO_COST = np.array([1.0, 0.0, 0.0, 0.0, 0.0])


def aggregate_goals(
    joint: np.ndarray, flip: tuple[bool, ...], weights: np.ndarray
) -> np.ndarray:
    """Collapse a joint over goal levels to one cost-level distribution.

    Each goal-level combination maps to the weighted mean of its images
    (benefit goals mirrored), which lands in exactly one cost bin.
    """
    g = len(flip)
    if joint.shape != (N_LEVELS,) * g:
        raise ValueError(f"joint shape {joint.shape} does not match {g} goals")
    states = np.indices((N_LEVELS,) * g).reshape(g, -1)
    images = LEVEL_IMAGES[states]
    for i, flipped in enumerate(flip):
        if flipped:
            images[i] = 1.0 - images[i]
    total = float(weights.sum())
    if total <= 0:
        raise ValueError("goal weights must have positive total")
    combo_cost = (weights[:, None] * images).sum(axis=0) / total
    bins = discretize_bell(combo_cost, 0.0)  # one-hot rows
    levels = bins.argmax(axis=-1)
    out = np.zeros(N_LEVELS)
    np.add.at(out, levels, joint.reshape(-1))
    return out


@dataclass(frozen=True)
class CostTables:
    """Everything the simulator needs, resolved to dense arrays.

    exec_dist[t, s] is the cost-level distribution of task t at site s
    (unavailable cells are all-zero and must not be read). comm_dist[p, a, b]
    covers coupled pair p across sites a and b, symmetric in a/b, with the
    diagonal pinned to the no-cost distribution.
    """

    tasks: tuple[str, ...]
    sites: tuple[str, ...]
    avail: tuple[tuple[int, ...], ...]
    exec_dist: np.ndarray  # (T, S, 5)
    coupled_pairs: tuple[tuple[int, int], ...]
    comm_dist: np.ndarray  # (P, S, S, 5)

    @property
    def n_assignments(self) -> int:
        total = 1
        for sites in self.avail:
            total *= len(sites)
        return total

    def exec_mean(self) -> np.ndarray:
        return self.exec_dist @ LEVEL_IMAGES

    def comm_mean(self) -> np.ndarray:
        return self.comm_dist @ LEVEL_IMAGES

    def expected_assignment_cost(self, sites: tuple[int, ...]) -> float:
        """Mean total cost under the canonical term order (exec terms, then comm)."""
        cost = 0.0
        exec_mean = self.exec_mean()
        comm_mean = self.comm_mean()
        for t, s in enumerate(sites):
            cost += exec_mean[t, s]
        for p, (i, j) in enumerate(self.coupled_pairs):
            cost += comm_mean[p, sites[i], sites[j]]
        return cost


def _scoped_evidence(
    model: CausalModel,
    project: ProjectCharacterization,
    bindings: dict[Scope, tuple[str, ...]],
) -> dict[str, int]:
    """Evidence states for every factor node whose scope applies in this context."""
    evidence: dict[str, int] = {}
    node_ids = {n.id for n in model.nodes}
    for fdef in model.factors:
        if fdef.id not in node_ids or fdef.scope not in bindings:
            continue
        binding = bindings[fdef.scope]
        if project.has_value(fdef.id, fdef.scope, binding):
            value = project.lookup(fdef.id, fdef.scope, binding)
            evidence[fdef.id] = int(round(value_image(value) * 4))
    return evidence


def execution_evidence(
    model: CausalModel, project: ProjectCharacterization, task: str, site: str
) -> dict[str, int]:
    return _scoped_evidence(
        model,
        project,
        {
            Scope.PROJECT: (),
            Scope.TASK: (task,),
            Scope.SITE: (site,),
            Scope.TASK_SITE: (task, site),
        },
    )


def communication_evidence(
    model: CausalModel,
    project: ProjectCharacterization,
    task_a: str,
    task_b: str,
    site_a: str,
    site_b: str,
) -> dict[str, int]:
    return _scoped_evidence(
        model,
        project,
        {
            Scope.PROJECT: (),
            Scope.TASK_PAIR: (task_a, task_b),
            Scope.SITE_PAIR: (site_a, site_b),
        },
    )


def coupled_task_pairs(
    model: CausalModel,
    project: ProjectCharacterization,
    coupling_factor: str = DEFAULT_COUPLING_FACTOR,
) -> tuple[tuple[int, int], ...]:
    """Index pairs (i < j) whose coupling value sits above the lowest level."""
    fdef = model.factor_map().get(coupling_factor)
    if fdef is None or fdef.scope is not Scope.TASK_PAIR:
        return ()
    pairs = []
    for i, j in combinations(range(len(project.tasks)), 2):
        binding = (project.tasks[i], project.tasks[j])
        if project.has_value(coupling_factor, Scope.TASK_PAIR, binding):
            if value_image(project.lookup(coupling_factor, Scope.TASK_PAIR, binding)) > 0.0:
                pairs.append((i, j))
    return tuple(pairs)


def goal_cost_distribution(
    network: BeliefNetwork,
    goal_ids: tuple[str, ...],
    flip: tuple[bool, ...],
    weights: np.ndarray,
    evidence: dict[str, int],
) -> np.ndarray:
    joint = infer_joint(network, goal_ids, evidence)
    return aggregate_goals(joint, flip, weights)


def build_cost_tables(
    model: CausalModel,
    project: ProjectCharacterization,
    coupling_factor: str = DEFAULT_COUPLING_FACTOR,
) -> CostTables:
    network = compile_network(model)
    goal_ids = model.goal_ids()
    node_map = model.node_map()
    flip = tuple(node_map[g].polarity == POLARITY_BENEFIT for g in goal_ids)
    weight_map = effective_goal_weights(model, project)
    weights = np.array([weight_map.get(g, 0.0) for g in goal_ids], dtype=np.float64)

    n_tasks, n_sites = len(project.tasks), len(project.sites)
    avail: list[tuple[int, ...]] = []
    for task in project.tasks:
        allowed = tuple(
            sorted(project.site_index(s) for s in project.available_sites(task))
        )
        if not allowed:
            raise InfeasibleError(f"task {task!r} has no available site")
        avail.append(allowed)

    exec_dist = np.zeros((n_tasks, n_sites, N_LEVELS))
    for t, task in enumerate(project.tasks):
        for s in avail[t]:
            evidence = execution_evidence(model, project, task, project.sites[s])
            exec_dist[t, s] = goal_cost_distribution(network, goal_ids, flip, weights, evidence)

    pairs = coupled_task_pairs(model, project, coupling_factor)
    comm_dist = np.zeros((len(pairs), n_sites, n_sites, N_LEVELS))
    for p, (i, j) in enumerate(pairs):
        for s in range(n_sites):
            comm_dist[p, s, s] = NO_COST
        for s1, s2 in combinations(range(n_sites), 2):
            evidence = communication_evidence(
                model,
                project,
                project.tasks[i],
                project.tasks[j],
                project.sites[s1],
                project.sites[s2],
            )
            dist = goal_cost_distribution(network, goal_ids, flip, weights, evidence)
            comm_dist[p, s1, s2] = dist
            comm_dist[p, s2, s1] = dist

    return CostTables(
        tasks=project.tasks,
        sites=project.sites,
        avail=tuple(avail),
        exec_dist=exec_dist,
        coupled_pairs=pairs,
        comm_dist=comm_dist,
    )

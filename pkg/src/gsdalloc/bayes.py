"""Compile a causal model into a discrete belief network and query it.

Every node ranges over the five ordinal levels. A non-root node's CPT row is
built by aggregating its parents' numeric images (after flipping negative
edges), then spreading a Gaussian of width noise_sigma over the level bins
[0, .125), [.125, .375), [.375, .625), [.625, .875), [.875, 1]. sigma = 0
collapses to the nearest level, ties resolved toward the middle.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr

from .errors import InconsistentEvidenceError, InferenceError
from .levels import Kind, Level, N_LEVELS, LEVEL_IMAGES
from .model import (
    AGG_MAXIMUM,
    AGG_MINIMUM,
    AGG_WEIGHTED_MEAN,
    ROLE_FACTOR,
    CausalModel,
)

# Interior bin boundaries between adjacent level images.
BIN_EDGES = np.array([0.125, 0.375, 0.625, 0.875])

UNIFORM_PRIOR = np.full(N_LEVELS, 1.0 / N_LEVELS)
BOOLEAN_PRIOR = np.array([0.5, 0.0, 0.0, 0.0, 0.5])


def discretize_bell(means: np.ndarray, sigma: float) -> np.ndarray:
    """Level distribution(s) for Gaussian(s) centred at `means` in [0, 1].

    Returns shape (*means.shape, 5). Rows sum to one exactly (renormalized).
    """
    means = np.asarray(means, dtype=np.float64)
    if sigma < 0:
        raise InferenceError(f"noise sigma must be >= 0, got {sigma}")
    if sigma == 0.0:
        x = means * 4.0
        lower = np.floor(x)
        frac = x - lower
        up = (frac > 0.5) | ((frac == 0.5) & (lower < 2))
        idx = np.clip(lower + up, 0, N_LEVELS - 1).astype(np.int64)
        out = np.zeros(means.shape + (N_LEVELS,))
        np.put_along_axis(out, idx[..., None], 1.0, axis=-1)
        return out
    cdf = ndtr((BIN_EDGES - means[..., None]) / sigma)
    parts = np.concatenate(
        [cdf[..., :1], np.diff(cdf, axis=-1), 1.0 - cdf[..., -1:]], axis=-1
    )
    return parts / parts.sum(axis=-1, keepdims=True)


def cpt_from_function(
    aggregation: str,
    signs: tuple[int, ...],
    weights: tuple[float, ...],
    sigma: float,
) -> np.ndarray:
    """CPT of shape ((5,)*k, 5); parent axes ordered as given, child axis last."""
    k = len(signs)
    if k == 0:
        raise InferenceError("cpt_from_function needs at least one parent")
    states = np.indices((N_LEVELS,) * k).reshape(k, -1)  # last parent varies fastest
    images = LEVEL_IMAGES[states]  # (k, 5**k)
    for i, sign in enumerate(signs):
        if sign == -1:
            images[i] = 1.0 - images[i]
    if aggregation == AGG_WEIGHTED_MEAN:
        w = np.asarray(weights, dtype=np.float64)
        total = w.sum()
        if total <= 0:
            raise InferenceError("weighted_mean needs positive total weight")
        means = (w[:, None] * images).sum(axis=0) / total
    elif aggregation == AGG_MINIMUM:
        means = images.min(axis=0)
    elif aggregation == AGG_MAXIMUM:
        means = images.max(axis=0)
    else:
        raise InferenceError(f"unknown aggregation {aggregation!r}")
    rows = discretize_bell(means, sigma)
    return rows.reshape((N_LEVELS,) * k + (N_LEVELS,))


@dataclass(frozen=True)
class BeliefNetwork:
    """Compiled form: node order is topological, tables index parents then self."""

    nodes: tuple[str, ...]
    parents: dict[str, tuple[str, ...]]
    tables: dict[str, np.ndarray]
    kinds: dict[str, Kind]

    def parent_index(self, node: str) -> tuple[str, ...]:
        return self.parents[node]


def compile_network(model: CausalModel) -> BeliefNetwork:
    order = model.topological_order()
    node_map = model.node_map()
    factor_defs = model.factor_map()
    parents: dict[str, tuple[str, ...]] = {}
    tables: dict[str, np.ndarray] = {}
    kinds: dict[str, Kind] = {}
    for nid in order:
        node = node_map[nid]
        incoming = model.parents_of(nid)  # model.edges appearance order
        parents[nid] = tuple(e.source for e in incoming)
        if node.role == ROLE_FACTOR:
            kind = factor_defs[nid].kind if nid in factor_defs else Kind.ORDINAL
            kinds[nid] = kind
            tables[nid] = BOOLEAN_PRIOR.copy() if kind is Kind.BOOLEAN else UNIFORM_PRIOR.copy()
        else:
            kinds[nid] = Kind.ORDINAL
            tables[nid] = cpt_from_function(
                node.aggregation,
                tuple(e.sign for e in incoming),
                tuple(e.weight for e in incoming),
                node.noise_sigma,
            )
    return BeliefNetwork(nodes=order, parents=parents, tables=tables, kinds=kinds)


@dataclass
class _Factor:
    vars: tuple[str, ...]
    table: np.ndarray

    def reduce(self, node: str, state: int) -> "_Factor":
        axis = self.vars.index(node)
        new_vars = self.vars[:axis] + self.vars[axis + 1 :]
        return _Factor(new_vars, np.take(self.table, state, axis=axis))

    def multiply(self, other: "_Factor") -> "_Factor":
        merged = self.vars + tuple(v for v in other.vars if v not in self.vars)

        def aligned(f: "_Factor") -> np.ndarray:
            t = f.table.reshape(f.table.shape + (1,) * (len(merged) - len(f.vars)))
            return np.moveaxis(t, range(len(f.vars)), [merged.index(v) for v in f.vars])

        return _Factor(merged, aligned(self) * aligned(other))

    def marginalize(self, node: str) -> "_Factor":
        axis = self.vars.index(node)
        new_vars = self.vars[:axis] + self.vars[axis + 1 :]
        return _Factor(new_vars, self.table.sum(axis=axis))


def _evidence_states(network: BeliefNetwork, evidence: dict) -> dict[str, int]:
    states: dict[str, int] = {}
    for node, value in (evidence or {}).items():
        if node not in network.parents:
            raise InferenceError(f"evidence names unknown node {node!r}")
        if isinstance(value, bool):
            states[node] = Level.VERY_HIGH.value if value else Level.VERY_LOW.value
        elif isinstance(value, (Level, int, np.integer)):
            state = int(value)
            if not 0 <= state < N_LEVELS:
                raise InferenceError(f"evidence state {state} for {node!r} out of range")
            states[node] = state
        else:
            raise InferenceError(f"bad evidence value {value!r} for {node!r}")
    return states


def infer_joint(
    network: BeliefNetwork, query: tuple[str, ...], evidence: dict | None = None
) -> np.ndarray:
    """Exact joint over `query` given evidence, axes in query order.

    Variable elimination with a greedy smallest-intermediate-factor order.
    """
    for q in query:
        if q not in network.parents:
            raise InferenceError(f"query names unknown node {q!r}")
    states = _evidence_states(network, evidence or {})
    overlap = [q for q in query if q in states]
    if overlap:
        raise InferenceError(f"query nodes {overlap} are fixed by evidence")

    factors: list[_Factor] = []
    for node in network.nodes:
        f = _Factor(network.parents[node] + (node,), network.tables[node])
        for ev_node, ev_state in states.items():
            if ev_node in f.vars:
                f = f.reduce(ev_node, ev_state)
        factors.append(f)

    to_eliminate = [n for n in network.nodes if n not in states and n not in query]
    while to_eliminate:
        best_var, best_size = None, None
        for var in to_eliminate:
            touching = [f for f in factors if var in f.vars]
            joined: set[str] = set()
            for f in touching:
                joined.update(f.vars)
            size = len(joined) - 1
            if best_size is None or size < best_size or (size == best_size and var < best_var):
                best_var, best_size = var, size
        touching = [f for f in factors if best_var in f.vars]
        rest = [f for f in factors if best_var not in f.vars]
        prod = touching[0]
        for f in touching[1:]:
            prod = prod.multiply(f)
        factors = rest + [prod.marginalize(best_var)]
        to_eliminate.remove(best_var)

    result = factors[0]
    for f in factors[1:]:
        result = result.multiply(f)
    table = np.moveaxis(
        result.table, [result.vars.index(q) for q in query], range(len(query))
    ) if result.vars else result.table
    z = float(table.sum())
    if z <= 0.0:
        raise InconsistentEvidenceError("evidence has zero probability")
    return table / z


@dataclass(frozen=True)
class Posterior:
    """Per-node level distributions given the evidence used for the query."""

    marginals: dict[str, np.ndarray]
    evidence: dict[str, int] = field(default_factory=dict)

    def mean_image(self, node: str) -> float:
        return float(self.marginals[node] @ LEVEL_IMAGES)


def infer(
    network: BeliefNetwork, query: tuple[str, ...], evidence: dict | None = None
) -> Posterior:
    """Marginals for each query node; evidence nodes come back as point masses."""
    states = _evidence_states(network, evidence or {})
    marginals: dict[str, np.ndarray] = {}
    for q in query:
        if q in states:
            point = np.zeros(N_LEVELS)
            point[states[q]] = 1.0
            marginals[q] = point
        else:
            marginals[q] = infer_joint(network, (q,), evidence)
    return Posterior(marginals=marginals, evidence=states)

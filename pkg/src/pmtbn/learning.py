"""Structure and parameter learning from complete-case data.

Parameter estimation is Laplace-smoothed maximum likelihood; structure
learning is the classic tree-augmented naive Bayes recipe: weight every
feature pair by class-conditional mutual information, take a maximum
spanning tree, orient it away from a root feature, then hang every
feature off the class node as well.

Rows containing a missing value are dropped per statistic (complete-case
analysis on exactly the variables each statistic touches).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .core import Cpt, Dag, Dataset, NetworkModel, Schema
from .errors import DisconnectedError, EmptyDataError, UnknownNodeError

#: Pair weights this far below zero are treated as roundoff and clamped.
WEIGHT_TOL = -1e-12


def _counts_for(dataset: Dataset, names: tuple[str, ...]) -> np.ndarray:
    """Joint counts over ``names``, shaped by their cardinalities.

    Rows missing any of the named variables are excluded entirely.
    """
    schema = dataset.schema
    cols = np.array([schema.index_of(n) for n in names], dtype=np.int64)
    cards = np.array(
        [schema.variable(n).cardinality for n in names], dtype=np.int64
    )
    sub = np.ascontiguousarray(dataset.rows[:, cols])
    flat = kernels.joint_counts(sub, cards)
    return flat.reshape(tuple(int(c) for c in cards))


def estimate_cpts(
    dataset: Dataset, dag: Dag, alpha: float = 1.0
) -> NetworkModel:
    """Fit one CPT per node by add-alpha smoothed counting.

    With ``alpha == 0`` a parent assignment that never occurs gets a
    uniform row rather than an error, so the result is always a valid
    model. Counting for each node uses rows complete on that node and
    its parents.
    """
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    schema = dataset.schema
    cpts = []
    for name in schema.names:
        parents = tuple(p for p in schema.names if (p, name) in set(dag.edges))
        card = schema.variable(name).cardinality
        counts = _counts_for(dataset, parents + (name,)).reshape(-1, card)
        counts = counts.astype(np.float64)
        row_tot = counts.sum(axis=1)
        denom = row_tot + alpha * card
        table = np.empty_like(counts)
        filled = denom > 0
        table[filled] = (counts[filled] + alpha) / denom[filled, None]
        table[~filled] = 1.0 / card
        cpts.append(Cpt(name, parents, table))
    return NetworkModel(schema, dag, cpts)


def conditional_mutual_information(
    dataset: Dataset, x: str, y: str, cond: str
) -> float:
    """I(x; y | cond) in nats from raw empirical frequencies.

    Terms with a zero joint count contribute nothing (0 ln 0 = 0) and
    zero-count marginals never enter a denominator. The result is clamped
    to be non-negative. Raises EmptyDataError if no row is complete on
    all three variables.

    The pair is reordered by name before counting, so the result is
    bitwise symmetric in (x, y), not just symmetric up to rounding.
    """
    if y < x:
        x, y = y, x
    joint = _counts_for(dataset, (x, y, cond)).astype(np.float64)
    n = joint.sum()
    if n == 0:
        raise EmptyDataError(f"no complete rows over ({x}, {y}, {cond})")
    n_xc = joint.sum(axis=1)  # x, cond
    n_yc = joint.sum(axis=0)  # y, cond
    n_c = joint.sum(axis=(0, 1))  # cond
    total = 0.0
    kx, ky, kc = joint.shape
    for c in range(kc):
        if n_c[c] == 0:
            continue
        for i in range(kx):
            if n_xc[i, c] == 0:
                continue
            for j in range(ky):
                njt = joint[i, j, c]
                if njt == 0 or n_yc[j, c] == 0:
                    continue
                total += (njt / n) * math.log(
                    njt * n_c[c] / (n_xc[i, c] * n_yc[j, c])
                )
    return max(total, 0.0)


@dataclass
class WeightedPairGraph:
    """Symmetric weights over unordered feature pairs."""

    features: tuple[str, ...]
    _weights: dict[frozenset, float] = field(default_factory=dict)

    def __post_init__(self):
        self.features = tuple(self.features)

    def set_weight(self, a: str, b: str, w: float) -> None:
        for name in (a, b):
            if name not in self.features:
                raise UnknownNodeError(name)
        if a == b:
            raise ValueError("no self-pairs")
        if w < WEIGHT_TOL:
            raise ValueError(f"negative pair weight {w!r}")
        self._weights[frozenset((a, b))] = max(w, 0.0)

    def weight(self, a: str, b: str) -> float:
        return self._weights.get(frozenset((a, b)), 0.0)

    def pairs(self) -> list[tuple[str, str, float]]:
        out = []
        for key, w in self._weights.items():
            lo, hi = sorted(key)
            out.append((lo, hi, w))
        out.sort()
        return out


def pairwise_cmi_graph(
    dataset: Dataset, features: tuple[str, ...], cond: str
) -> WeightedPairGraph:
    """All-pairs conditional mutual information given the class variable."""
    graph = WeightedPairGraph(features)
    for i, a in enumerate(features):
        for b in features[i + 1 :]:
            graph.set_weight(
                a, b, conditional_mutual_information(dataset, a, b, cond)
            )
    return graph


def max_spanning_tree(graph: WeightedPairGraph) -> frozenset:
    """Kruskal maximum spanning forest as a set of (min, max) name pairs.

    Candidate edges are taken heaviest first; equal weights break toward
    the lexicographically smaller pair, so the result is a pure function
    of the weights.
    """
    ranked = sorted(
        graph.pairs(), key=lambda e: (-e[2], e[0], e[1])
    )
    parent = {f: f for f in graph.features}

    def find(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    chosen = set()
    for a, b, _ in ranked:
        ra, rb = find(a), find(b)
        if ra == rb:
            continue
        parent[ra] = rb
        chosen.add((a, b))
        if len(chosen) == len(graph.features) - 1:
            break
    return frozenset(chosen)


def orient_tree(
    edges: frozenset, root: str
) -> tuple[tuple[str, str], ...]:
    """Direct an undirected tree away from ``root`` by breadth-first walk.

    Neighbors are visited in lexicographic order. Raises DisconnectedError
    if any endpoint is unreachable from the root.
    """
    nodes = {root}
    adj: dict[str, list[str]] = {root: []}
    for a, b in edges:
        for end in (a, b):
            nodes.add(end)
            adj.setdefault(end, [])
        adj[a].append(b)
        adj[b].append(a)
    for neighbors in adj.values():
        neighbors.sort()
    directed: list[tuple[str, str]] = []
    seen = {root}
    frontier = [root]
    while frontier:
        nxt: list[str] = []
        for node in frontier:
            for other in adj[node]:
                if other in seen:
                    continue
                seen.add(other)
                directed.append((node, other))
                nxt.append(other)
        frontier = nxt
    if seen != nodes:
        missing = sorted(nodes - seen)[0]
        raise DisconnectedError(f"{missing} is not reachable from {root}")
    return tuple(directed)


def tan_dag(schema: Schema, class_name: str, tree_edges: frozenset) -> Dag:
    """Assemble the TAN graph: class->every feature plus the oriented tree."""
    schema.index_of(class_name)
    features = tuple(n for n in schema.names if n != class_name)
    root = features[0]
    edges = [(class_name, f) for f in features]
    edges.extend(orient_tree(tree_edges, root))
    return Dag(schema.names, edges)


def learn_tan(
    dataset: Dataset, class_name: str, alpha: float = 1.0
) -> NetworkModel:
    """Learn a tree-augmented naive Bayes model from complete-case data.

    Pipeline: class-conditional mutual information for every feature
    pair, maximum spanning tree, orientation away from the first feature
    in schema order, class-to-feature edges, then smoothed counting.
    """
    schema = dataset.schema
    schema.index_of(class_name)
    features = tuple(n for n in schema.names if n != class_name)
    if not features:
        raise ValueError("need at least one feature besides the class")
    if len(features) == 1:
        tree: frozenset = frozenset()
    else:
        graph = pairwise_cmi_graph(dataset, features, class_name)
        tree = max_spanning_tree(graph)
    dag = tan_dag(schema, class_name, tree)
    return estimate_cpts(dataset, dag, alpha=alpha)

"""Core value types for discrete Bayesian networks.

A network is an ordered schema of discrete variables, a directed acyclic
graph over the variable names, and one conditional probability table per
node. Everything is an immutable value after construction (arrays are
marked read-only), so instances are safe to share across threads.

All tie-breaking is deterministic: topological orders always take the
lexicographically smallest available node, and CPT parent lists follow
schema order.
"""

from __future__ import annotations

import heapq
import math
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from .errors import (
    CycleError,
    DuplicateError,
    IncompleteAssignmentError,
    RowSumError,
    UnknownNodeError,
)

#: Internal marker for a missing value in a dataset row ("?" in files).
MISSING = -1

#: Tolerance for CPT row sums on constructed (in-memory) tables.
ROW_SUM_TOL = 1e-9

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_STATE_RE = re.compile(r"[A-Za-z0-9_][A-Za-z0-9_.+-]*\Z")


@dataclass(frozen=True)
class Variable:
    """A named discrete variable with an ordered tuple of state labels."""

    name: str
    states: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        if not _NAME_RE.match(self.name):
            raise ValueError(f"invalid variable name: {self.name!r}")
        if len(self.states) < 2:
            raise ValueError(f"{self.name}: needs at least 2 states")
        for s in self.states:
            if not _STATE_RE.match(s):
                raise ValueError(f"{self.name}: invalid state label {s!r}")
        if len(set(self.states)) != len(self.states):
            raise DuplicateError(f"{self.name}: duplicate state labels")

    @property
    def cardinality(self) -> int:
        return len(self.states)


class Schema:
    """Ordered collection of variables; the order binds columns and breaks ties."""

    def __init__(self, variables: Iterable[Variable]):
        self.variables = tuple(variables)
        if not self.variables:
            raise ValueError("schema needs at least one variable")
        self.names = tuple(v.name for v in self.variables)
        if len(set(self.names)) != len(self.names):
            raise DuplicateError("duplicate variable names in schema")
        self._index = {v.name: i for i, v in enumerate(self.variables)}
        self._state_index = {
            v.name: {s: i for i, s in enumerate(v.states)} for v in self.variables
        }
        self.cardinalities = np.array(
            [v.cardinality for v in self.variables], dtype=np.int64
        )
        self.cardinalities.setflags(write=False)

    def __len__(self) -> int:
        return len(self.variables)

    def __eq__(self, other) -> bool:
        return isinstance(other, Schema) and self.variables == other.variables

    def __hash__(self):
        return hash(self.variables)

    def __repr__(self) -> str:
        return f"Schema({', '.join(self.names)})"

    def index_of(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownNodeError(name) from None

    def variable(self, name: str) -> Variable:
        return self.variables[self.index_of(name)]

    def state_index(self, name: str, label: str) -> int:
        table = self._state_index[self.names[self.index_of(name)]]
        try:
            return table[label]
        except KeyError:
            raise KeyError(f"{name} has no state {label!r}") from None


class Dag:
    """Directed graph over variable names; acyclicity is checked by validate_dag.

    Construction normalizes nodes and edges to sorted tuples and rejects
    duplicates and self-loops. Edge endpoints are checked against the node
    set by :func:`validate_dag` (and therefore by every model constructor).
    """

    def __init__(self, nodes: Iterable[str], edges: Iterable[tuple[str, str]] = ()):
        node_list = list(nodes)
        if len(set(node_list)) != len(node_list):
            raise DuplicateError("duplicate node names")
        edge_list = [(str(p), str(c)) for p, c in edges]
        if len(set(edge_list)) != len(edge_list):
            raise DuplicateError("duplicate edges")
        for p, c in edge_list:
            if p == c:
                raise CycleError((p, c))
        self.nodes = tuple(sorted(node_list))
        self.edges = tuple(sorted(edge_list))
        self._parents: dict[str, list[str]] = {n: [] for n in self.nodes}
        self._children: dict[str, list[str]] = {n: [] for n in self.nodes}
        for p, c in self.edges:
            if c in self._parents:
                self._parents[c].append(p)
            if p in self._children:
                self._children[p].append(c)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Dag)
            and self.nodes == other.nodes
            and self.edges == other.edges
        )

    def __hash__(self):
        return hash((self.nodes, self.edges))

    def __repr__(self) -> str:
        return f"Dag(nodes={len(self.nodes)}, edges={len(self.edges)})"

    def parents_of(self, name: str) -> tuple[str, ...]:
        return tuple(self._parents.get(name, ()))

    def children_of(self, name: str) -> tuple[str, ...]:
        return tuple(self._children.get(name, ()))

    def has_edge(self, parent: str, child: str) -> bool:
        return (parent, child) in set(self.edges)


def validate_dag(dag: Dag) -> list[str]:
    """Topological order of ``dag``, or an error if it is not a DAG.

    Among all valid orders, returns the one that always emits the
    lexicographically smallest available node next (Kahn peeling with a
    heap). Raises UnknownNodeError for an undeclared edge endpoint and
    CycleError naming one edge on a cycle.
    """
    node_set = set(dag.nodes)
    for p, c in dag.edges:
        if p not in node_set:
            raise UnknownNodeError(p)
        if c not in node_set:
            raise UnknownNodeError(c)
    indegree = {n: 0 for n in dag.nodes}
    for _, c in dag.edges:
        indegree[c] += 1
    heap = [n for n in dag.nodes if indegree[n] == 0]
    heapq.heapify(heap)
    order: list[str] = []
    while heap:
        n = heapq.heappop(heap)
        order.append(n)
        for c in dag.children_of(n):
            indegree[c] -= 1
            if indegree[c] == 0:
                heapq.heappush(heap, c)
    if len(order) < len(dag.nodes):
        leftover = node_set - set(order)
        raise CycleError(_edge_on_cycle(dag, leftover))
    return order


def _edge_on_cycle(dag: Dag, leftover: set[str]) -> tuple[str, str]:
    # Every leftover node keeps an incoming edge from leftover, so walking
    # smallest-predecessor links must revisit a node within |leftover| steps.
    walk = [min(leftover)]
    seen = {walk[0]}
    while True:
        cur = walk[-1]
        pred = min(p for p in dag.parents_of(cur) if p in leftover)
        if pred in seen:
            return (pred, cur)
        walk.append(pred)
        seen.add(pred)


@dataclass(frozen=True, eq=False)
class Cpt:
    """Conditional probability table for one node.

    ``table`` has one row per full parent assignment (row-major in parent
    order, states in schema order) and one column per child state. Rows
    must sum to 1 within 1e-9; the row count is checked against the
    parent cardinalities when a NetworkModel is assembled.
    """

    child: str
    parents: tuple[str, ...]
    table: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "parents", tuple(self.parents))
        table = np.ascontiguousarray(self.table, dtype=np.float64)
        if table.ndim != 2:
            raise ValueError(f"{self.child}: CPT table must be 2-D")
        if not np.isfinite(table).all() or (table < 0).any() or (table > 1).any():
            raise ValueError(f"{self.child}: CPT entries must lie in [0, 1]")
        sums = table.sum(axis=1)
        bad = np.nonzero(np.abs(sums - 1.0) > ROW_SUM_TOL)[0]
        if bad.size:
            raise RowSumError(
                f"{self.child}: row {int(bad[0])} sums to {sums[bad[0]]!r}"
            )
        table.setflags(write=False)
        object.__setattr__(self, "table", table)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Cpt)
            and self.child == other.child
            and self.parents == other.parents
            and self.table.shape == other.table.shape
            and bool((self.table == other.table).all())
        )

    @property
    def n_rows(self) -> int:
        return self.table.shape[0]


class _Compiled(NamedTuple):
    """Flat array form of a model, shared by the sampling/scoring kernels."""

    topo_cols: np.ndarray
    par_cols: np.ndarray
    par_off: np.ndarray
    par_strides: np.ndarray
    table_flat: np.ndarray
    cdf_flat: np.ndarray
    row_off: np.ndarray
    cards: np.ndarray


class NetworkModel:
    """Schema + DAG + one CPT per node: the full generative model."""

    def __init__(self, schema: Schema, dag: Dag, cpts: Iterable[Cpt]):
        self.schema = schema
        self.dag = dag
        if set(dag.nodes) != set(schema.names):
            raise UnknownNodeError(
                next(iter(set(dag.nodes) ^ set(schema.names)))
            )
        self.topological_order = tuple(validate_dag(dag))
        by_child: dict[str, Cpt] = {}
        for cpt in cpts:
            if cpt.child in by_child:
                raise DuplicateError(f"two CPTs for node {cpt.child}")
            by_child[cpt.child] = cpt
        edge_set = set(dag.edges)
        for name in schema.names:
            if name not in by_child:
                raise ValueError(f"no CPT for node {name}")
            cpt = by_child[name]
            expected = tuple(p for p in schema.names if (p, name) in edge_set)
            if cpt.parents != expected:
                raise ValueError(
                    f"{name}: CPT parents {cpt.parents} do not match DAG parents "
                    f"{expected} (schema order)"
                )
            rows = math.prod(
                schema.variables[schema.index_of(p)].cardinality for p in expected
            )
            want = (rows, schema.variable(name).cardinality)
            if cpt.table.shape != want:
                raise ValueError(
                    f"{name}: CPT shape {cpt.table.shape}, expected {want}"
                )
        self.cpts = {name: by_child[name] for name in schema.names}

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, NetworkModel)
            and self.schema == other.schema
            and self.dag == other.dag
            and self.cpts == other.cpts
        )

    def __repr__(self) -> str:
        return f"NetworkModel({len(self.schema)} nodes, {len(self.dag.edges)} edges)"

    def compiled(self) -> _Compiled:
        cached = self.__dict__.get("_compiled_arrays")
        if cached is None:
            cached = _compile_model(self)
            self.__dict__["_compiled_arrays"] = cached
        return cached


def _compile_model(model: NetworkModel) -> _Compiled:
    schema = model.schema
    col = {n: i for i, n in enumerate(schema.names)}
    topo_cols = np.array([col[n] for n in model.topological_order], dtype=np.int64)
    par_cols: list[int] = []
    par_strides: list[int] = []
    par_off = [0]
    tables = []
    cdfs = []
    row_off = [0]
    for name in model.topological_order:
        cpt = model.cpts[name]
        stride = 1
        strides = []
        for p in reversed(cpt.parents):
            strides.append(stride)
            stride *= schema.variable(p).cardinality
        strides.reverse()
        par_cols.extend(col[p] for p in cpt.parents)
        par_strides.extend(strides)
        par_off.append(len(par_cols))
        tables.append(cpt.table.ravel())
        cdfs.append(np.cumsum(cpt.table, axis=1).ravel())
        row_off.append(row_off[-1] + cpt.table.size)
    out = _Compiled(
        topo_cols=topo_cols,
        par_cols=np.array(par_cols, dtype=np.int64),
        par_off=np.array(par_off, dtype=np.int64),
        par_strides=np.array(par_strides, dtype=np.int64),
        table_flat=np.concatenate(tables),
        cdf_flat=np.concatenate(cdfs),
        row_off=np.array(row_off, dtype=np.int64),
        cards=schema.cardinalities,
    )
    for arr in out:
        arr.setflags(write=False)
    return out


class Dataset:
    """Rows of state indices bound to a schema; MISSING (-1) marks gaps."""

    def __init__(self, schema: Schema, rows):
        self.schema = schema
        arr = np.ascontiguousarray(rows, dtype=np.int64)
        if arr.size == 0:
            arr = arr.reshape(0, len(schema))
        if arr.ndim != 2 or arr.shape[1] != len(schema):
            raise ValueError(
                f"rows must have one entry per schema variable ({len(schema)})"
            )
        if (arr < MISSING).any():
            raise ValueError("state indices must be >= 0 or MISSING")
        if (arr >= schema.cardinalities[None, :]).any():
            raise ValueError("state index out of range for its variable")
        arr.setflags(write=False)
        self.rows = arr

    def __len__(self) -> int:
        return self.rows.shape[0]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Dataset)
            and self.schema == other.schema
            and self.rows.shape == other.rows.shape
            and bool((self.rows == other.rows).all())
        )

    def __repr__(self) -> str:
        return f"Dataset({len(self)} rows x {len(self.schema)} variables)"

    def column(self, name: str) -> np.ndarray:
        return self.rows[:, self.schema.index_of(name)]


def _assignment_to_row(schema: Schema, assignment) -> np.ndarray:
    if isinstance(assignment, Mapping):
        row = np.full(len(schema), MISSING, dtype=np.int64)
        for name, state in assignment.items():
            row[schema.index_of(name)] = state
    else:
        row = np.asarray(list(assignment), dtype=np.int64)
        if row.shape != (len(schema),):
            raise IncompleteAssignmentError(
                f"assignment has {row.size} entries, schema has {len(schema)}"
            )
    if (row == MISSING).any():
        name = schema.names[int(np.argmax(row == MISSING))]
        raise IncompleteAssignmentError(f"no value for variable {name}")
    if (row < 0).any() or (row >= schema.cardinalities).any():
        raise ValueError("state index out of range")
    return row


def joint_probability(model: NetworkModel, assignment) -> float:
    """Chain-rule probability of one full assignment.

    ``assignment`` is either a mapping from variable name to state index or
    a sequence of state indices in schema order; every variable must be
    assigned.
    """
    row = _assignment_to_row(model.schema, assignment)
    return _joint_row(model, row)


def _joint_row(model: NetworkModel, row: Sequence[int]) -> float:
    # Multiplies in deterministic topological order; the batch scorer in the
    # kernels uses the same order, so both produce bit-identical products.
    comp = model.compiled()
    topo_cols = comp.topo_cols
    par_cols = comp.par_cols
    par_off = comp.par_off
    par_strides = comp.par_strides
    table = comp.table_flat
    row_off = comp.row_off
    cards = comp.cards
    p = 1.0
    for t in range(topo_cols.shape[0]):
        col = topo_cols[t]
        ridx = 0
        for pi in range(par_off[t], par_off[t + 1]):
            ridx += row[par_cols[pi]] * par_strides[pi]
        p *= table[row_off[t] + ridx * cards[col] + row[col]]
    return float(p)

"""Exact inference: factor algebra, variable elimination, sampling.

Posterior queries run variable elimination over the CPT factors, with a
slow enumeration twin (:func:`brute_force_posterior`) kept around as a
cross-check. Underflow is controlled by renormalizing each newly created
factor instead of working in log space; the final query is normalized
regardless, so renormalization never changes the answer.
"""

from __future__ import annotations

from typing import Iterable, Mapping

import numpy as np

from . import kernels
from .core import Cpt, Dataset, NetworkModel, Schema, _joint_row
from .errors import (
    CardinalityMismatchError,
    DuplicateError,
    ImpossibleEvidenceError,
    TooLargeError,
    VariableNotInScopeError,
)
from .rng import uniform_stream

#: Normalization mass below this means the evidence has probability zero.
EVIDENCE_MASS_FLOOR = 1e-300

#: Brute-force enumeration refuses joint tables larger than this.
BRUTE_FORCE_LIMIT = 2**22


class Factor:
    """A non-negative table over the joint states of its scope.

    ``values`` carries one axis per scope variable, states in schema
    order along each axis, so ``values.ravel()`` is the row-major table.
    A scopeless factor holds a single number.
    """

    __slots__ = ("scope", "values")

    def __init__(self, scope: Iterable[str], values):
        scope = tuple(scope)
        if len(set(scope)) != len(scope):
            raise DuplicateError("repeated variable in factor scope")
        arr = np.array(values, dtype=np.float64)  # owning copy; keeps 0-d shape
        if arr.ndim != len(scope):
            raise ValueError(
                f"values has {arr.ndim} axes for a {len(scope)}-variable scope"
            )
        if not np.isfinite(arr).all() or (arr < 0).any():
            raise ValueError("factor values must be finite and >= 0")
        arr.setflags(write=False)
        self.scope = scope
        self.values = arr

    @classmethod
    def _raw(cls, scope: tuple[str, ...], values) -> "Factor":
        # Trusted path for operation outputs; skips the invariant scan.
        # asarray keeps 0-d shape and turns numpy scalars into 0-d arrays.
        out = object.__new__(cls)
        arr = np.asarray(values, dtype=np.float64)
        arr.setflags(write=False)
        out.scope = scope
        out.values = arr
        return out

    def __repr__(self) -> str:
        return f"Factor(scope={self.scope}, shape={self.values.shape})"


def unit_factor() -> Factor:
    """The scopeless multiplicative identity."""
    return Factor((), np.float64(1.0))


def factor_from_cpt(schema: Schema, cpt: Cpt) -> Factor:
    """View a CPT as a factor over (parents..., child)."""
    shape = tuple(
        schema.variable(p).cardinality for p in cpt.parents
    ) + (schema.variable(cpt.child).cardinality,)
    return Factor._raw(cpt.parents + (cpt.child,), cpt.table.reshape(shape))


def factor_product(f1: Factor, f2: Factor) -> Factor:
    """Pointwise product; scope is f1's order followed by f2's new variables."""
    in_f1 = set(f1.scope)
    in_f2 = set(f2.scope)
    for v in f1.scope:
        if v in in_f2:
            a = f1.values.shape[f1.scope.index(v)]
            b = f2.values.shape[f2.scope.index(v)]
            if a != b:
                raise CardinalityMismatchError(
                    f"{v}: {a} states in one factor, {b} in the other"
                )
    new_vars = tuple(v for v in f2.scope if v not in in_f1)
    scope = f1.scope + new_vars
    pos = {v: i for i, v in enumerate(scope)}
    left = f1.values.reshape(f1.values.shape + (1,) * len(new_vars))
    perm = sorted(range(len(f2.scope)), key=lambda ax: pos[f2.scope[ax]])
    right_shape = tuple(
        f2.values.shape[f2.scope.index(v)] if v in in_f2 else 1 for v in scope
    )
    right = np.transpose(f2.values, perm).reshape(right_shape)
    return Factor._raw(scope, left * right)


def _axis_of(f: Factor, var: str) -> int:
    try:
        return f.scope.index(var)
    except ValueError:
        raise VariableNotInScopeError(f"{var} not in scope {f.scope}") from None


def factor_marginalize(f: Factor, var: str) -> Factor:
    """Sum ``var`` out of the table."""
    ax = _axis_of(f, var)
    scope = f.scope[:ax] + f.scope[ax + 1 :]
    return Factor._raw(scope, f.values.sum(axis=ax))


def factor_reduce(f: Factor, var: str, state: int) -> Factor:
    """Fix ``var`` to ``state`` and drop it from the scope."""
    ax = _axis_of(f, var)
    state = int(state)
    if not 0 <= state < f.values.shape[ax]:
        raise ValueError(f"{var} has no state index {state}")
    scope = f.scope[:ax] + f.scope[ax + 1 :]
    return Factor._raw(scope, np.take(f.values, state, axis=ax))


def _checked_evidence(schema: Schema, evidence: Mapping[str, int]) -> dict[str, int]:
    out = {}
    for name, state in evidence.items():
        i = schema.index_of(name)
        s = int(state)
        if not 0 <= s < schema.variables[i].cardinality:
            raise ValueError(f"{name} has no state index {state}")
        out[name] = s
    return out


def _min_degree_order(scopes: list[tuple[str, ...]], hidden: list[str]) -> list[str]:
    # Greedy elimination-order simulation: pick the hidden variable with the
    # fewest distinct co-occurring variables, clique its neighbors, repeat.
    adj: dict[str, set[str]] = {}
    for scope in scopes:
        for v in scope:
            adj.setdefault(v, set())
        for i, a in enumerate(scope):
            for b in scope[i + 1 :]:
                adj[a].add(b)
                adj[b].add(a)
    remaining = set(hidden)
    order = []
    while remaining:
        v = min(remaining, key=lambda x: (len(adj.get(x, ())), x))
        order.append(v)
        remaining.remove(v)
        nbrs = adj.pop(v, set())
        for a in nbrs:
            adj[a].discard(v)
        for a in nbrs:
            for b in nbrs:
                if a != b:
                    adj[a].add(b)
    return order


def posterior(
    model: NetworkModel,
    evidence: Mapping[str, int],
    query: str,
    *,
    elimination: str = "min_degree",
) -> np.ndarray:
    """P(query | evidence) by variable elimination.

    ``elimination`` picks the hidden-variable order: ``"min_degree"``
    (greedy, lexicographic tie-break) or ``"reverse_topological"``. Both
    give the same distribution; the option exists so tests can prove it.
    Raises ImpossibleEvidenceError when the evidence has zero probability.
    """
    schema = model.schema
    schema.index_of(query)
    ev = _checked_evidence(schema, evidence)
    if query in ev:
        raise ValueError(f"query variable {query} is fixed by the evidence")

    factors = []
    for name in schema.names:
        f = factor_from_cpt(schema, model.cpts[name])
        for v, s in ev.items():
            if v in f.scope:
                f = factor_reduce(f, v, s)
        factors.append(f)

    hidden = [n for n in schema.names if n != query and n not in ev]
    if elimination == "min_degree":
        order = _min_degree_order([f.scope for f in factors], hidden)
    elif elimination == "reverse_topological":
        hidden_set = set(hidden)
        order = [n for n in reversed(model.topological_order) if n in hidden_set]
    else:
        raise ValueError(f"unknown elimination strategy {elimination!r}")

    for var in order:
        touching = [f for f in factors if var in f.scope]
        factors = [f for f in factors if var not in f.scope]
        prod = touching[0]
        for f in touching[1:]:
            prod = factor_product(prod, f)
        new = factor_marginalize(prod, var)
        mass = float(new.values.sum())
        if mass < EVIDENCE_MASS_FLOOR:
            raise ImpossibleEvidenceError(
                f"evidence {ev} has probability 0 under the model"
            )
        factors.append(Factor._raw(new.scope, new.values * (1.0 / mass)))

    result = unit_factor()
    for f in factors:
        result = factor_product(result, f)
    mass = float(result.values.sum())
    if mass < EVIDENCE_MASS_FLOOR:
        raise ImpossibleEvidenceError(
            f"evidence {ev} has probability 0 under the model"
        )
    dist = (result.values / mass).reshape(-1)
    dist.setflags(write=False)
    return dist


def brute_force_posterior(
    model: NetworkModel, evidence: Mapping[str, int], query: str
) -> np.ndarray:
    """P(query | evidence) by enumerating every consistent full assignment.

    Exponentially slower than elimination but nearly impossible to get
    wrong, so it serves as the inference oracle. Refuses joint state
    spaces above 2**22.
    """
    schema = model.schema
    size = int(np.prod(schema.cardinalities, dtype=np.int64))
    if size > BRUTE_FORCE_LIMIT:
        raise TooLargeError(f"joint table of {size} states")
    qi = schema.index_of(query)
    ev = _checked_evidence(schema, evidence)
    if query in ev:
        raise ValueError(f"query variable {query} is fixed by the evidence")

    row = np.zeros(len(schema), dtype=np.int64)
    for name, s in ev.items():
        row[schema.index_of(name)] = s
    free = [i for i in range(len(schema)) if schema.names[i] not in ev]
    cards = [int(schema.cardinalities[i]) for i in free]

    dist = np.zeros(schema.variables[qi].cardinality, dtype=np.float64)
    combo = [0] * len(free)
    while True:
        for k, i in enumerate(free):
            row[i] = combo[k]
        dist[row[qi]] += _joint_row(model, row)
        k = len(free) - 1
        while k >= 0:
            combo[k] += 1
            if combo[k] < cards[k]:
                break
            combo[k] = 0
            k -= 1
        if k < 0:
            break
    mass = float(dist.sum())
    if mass < EVIDENCE_MASS_FLOOR:
        raise ImpossibleEvidenceError(
            f"evidence {ev} has probability 0 under the model"
        )
    dist /= mass
    dist.setflags(write=False)
    return dist


def classify(
    model: NetworkModel, evidence: Mapping[str, int], class_name: str
) -> tuple[int, np.ndarray]:
    """Argmax of the class posterior; exact ties go to the lowest index."""
    dist = posterior(model, evidence, class_name)
    return int(np.argmax(dist)), dist


def ancestral_sample(model: NetworkModel, seed: int, n: int) -> Dataset:
    """Draw ``n`` complete rows by forward sampling.

    Nodes are sampled along the deterministic topological order; each draw
    inverts the CPT row's CDF at the next uniform from the seeded stream.
    Row i consumes draws [i*V, (i+1)*V), so the result is a pure function
    of (model, seed, n).
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    schema = model.schema
    v = len(schema)
    comp = model.compiled()
    uniforms = uniform_stream(seed, n * v).reshape(n, v)
    states = kernels.ancestral_states(
        comp.topo_cols,
        comp.par_cols,
        comp.par_off,
        comp.par_strides,
        comp.cdf_flat,
        comp.row_off,
        comp.cards,
        uniforms,
    )
    return Dataset(schema, states)

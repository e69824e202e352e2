"""Text formats: structure files, CSV datasets, and full model files.

Structure file, one directive per line:

    # comment (full line only)
    node perceived_severity : low,medium,high
    class purchase_protection
    edge perceived_severity -> threat_appraisal

Node line order defines the schema order. Exactly one ``class`` line is
required and every name must be declared by a ``node`` line before use.

A model file is a structure file plus one ``cpt`` line per table row
group, e.g. ``cpt B | A=low : 0.2,0.8`` (``cpt A | : 0.3,0.7`` for a
parentless node). Emission uses repr-faithful floats so that
parse(emit(model)) reproduces the model bit for bit.
"""

from __future__ import annotations

import csv
import io
import re
from typing import NamedTuple

import numpy as np

from .core import (
    MISSING,
    Cpt,
    Dag,
    Dataset,
    NetworkModel,
    Schema,
    Variable,
    validate_dag,
)
from .errors import (
    DuplicateError,
    HeaderMismatchError,
    MissingCptRowError,
    ParseError,
    RowSumError,
    UnknownNodeError,
    UnknownStateLabelError,
)

#: Parsed model rows may drift from 1.0 by up to this much before rejection.
PARSE_ROW_SUM_TOL = 1e-6

_NODE_RE = re.compile(r"node\s+(\S+)\s*:\s*(.+)\Z")
_CLASS_RE = re.compile(r"class\s+(\S+)\Z")
_EDGE_RE = re.compile(r"edge\s+(\S+)\s*->\s*(\S+)\Z")
_CPT_RE = re.compile(r"cpt\s+(\S+)\s*\|\s*([^:]*?)\s*:\s*(.+)\Z")
_ALLOW_RE = re.compile(r"allow\s+(\S+)\s*->\s*(\S+)\Z")


class Structure(NamedTuple):
    schema: Schema
    dag: Dag
    class_name: str


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, line


def parse_structure(text: str) -> Structure:
    """Parse a structure file into (schema, dag, class name)."""
    variables: list[Variable] = []
    declared: set[str] = set()
    edges: list[tuple[str, str]] = []
    class_name: str | None = None
    for lineno, line in _content_lines(text):
        if line.startswith("node"):
            m = _NODE_RE.match(line)
            if not m:
                raise ParseError(lineno, f"malformed node line: {line!r}")
            name = m.group(1)
            states = tuple(s.strip() for s in m.group(2).split(","))
            if name in declared:
                raise DuplicateError(f"line {lineno}: node {name} declared twice")
            try:
                variables.append(Variable(name, states))
            except ValueError as exc:
                raise ParseError(lineno, str(exc)) from None
            declared.add(name)
        elif line.startswith("class"):
            m = _CLASS_RE.match(line)
            if not m:
                raise ParseError(lineno, f"malformed class line: {line!r}")
            if class_name is not None:
                raise ParseError(lineno, "second class line")
            class_name = m.group(1)
            if class_name not in declared:
                raise ParseError(
                    lineno, f"class {class_name} not declared by a node line"
                )
        elif line.startswith("edge"):
            m = _EDGE_RE.match(line)
            if not m:
                raise ParseError(lineno, f"malformed edge line: {line!r}")
            p, c = m.group(1), m.group(2)
            for end in (p, c):
                if end not in declared:
                    raise ParseError(
                        lineno, f"edge endpoint {end} not declared by a node line"
                    )
            if (p, c) in set(edges):
                raise DuplicateError(f"line {lineno}: duplicate edge {p} -> {c}")
            edges.append((p, c))
        else:
            raise ParseError(lineno, f"unrecognized directive: {line!r}")
    if not variables:
        raise ParseError(0, "no node lines")
    if class_name is None:
        raise ParseError(0, "no class line")
    schema = Schema(variables)
    dag = Dag(schema.names, edges)
    validate_dag(dag)
    return Structure(schema, dag, class_name)


def emit_structure(schema: Schema, dag: Dag, class_name: str) -> str:
    """Canonical structure text: nodes in schema order, edges sorted."""
    if class_name not in schema.names:
        raise UnknownNodeError(class_name)
    out = []
    for v in schema.variables:
        out.append(f"node {v.name} : {','.join(v.states)}")
    out.append(f"class {class_name}")
    for p, c in sorted(dag.edges):
        out.append(f"edge {p} -> {c}")
    return "\n".join(out) + "\n"


def parse_dataset(text: str, schema: Schema) -> Dataset:
    """Parse CSV with a header naming every schema variable (any order)."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise HeaderMismatchError("empty dataset file") from None
    header = [h.strip() for h in header]
    if sorted(header) != sorted(schema.names):
        raise HeaderMismatchError(
            f"header {header} is not a permutation of the schema names"
        )
    dest = [schema.index_of(h) for h in header]
    tables = [schema._state_index[name] for name in header]
    rows: list[list[int]] = []
    for rownum, record in enumerate(reader, start=1):
        if not record or (len(record) == 1 and not record[0].strip()):
            continue
        if len(record) != len(header):
            raise ParseError(
                rownum, f"row has {len(record)} fields, header has {len(header)}"
            )
        row = [MISSING] * len(schema)
        for j, cell in enumerate(record):
            label = cell.strip()
            if label == "?":
                continue
            idx = tables[j].get(label)
            if idx is None:
                raise UnknownStateLabelError(rownum, header[j], label)
            row[dest[j]] = idx
        rows.append(row)
    return Dataset(schema, np.array(rows, dtype=np.int64).reshape(len(rows), len(schema)))


def emit_dataset(dataset: Dataset) -> str:
    """Canonical CSV: header in schema order, '?' for missing cells."""
    schema = dataset.schema
    lines = [",".join(schema.names)]
    states = [v.states for v in schema.variables]
    for row in dataset.rows:
        lines.append(
            ",".join(
                "?" if row[j] == MISSING else states[j][row[j]]
                for j in range(len(schema))
            )
        )
    return "\n".join(lines) + "\n"


def _format_prob(p: float) -> str:
    # 17 significant digits pin down a double exactly, so emit/parse is bitwise.
    return format(float(p), ".17g")


def parse_model(text: str) -> tuple[NetworkModel, str]:
    """Parse a model file into (model, class name).

    The structure directives are parsed first, then every ``cpt`` line is
    bound to its node. A row whose probabilities sum to within 1e-9 of 1 is
    kept bit for bit; drift up to 1e-6 is renormalized; anything worse is a
    RowSumError. Missing rows raise MissingCptRowError naming the node and
    the parent assignment.
    """
    structure_lines = []
    cpt_lines: list[tuple[int, str]] = []
    for lineno, line in _content_lines(text):
        if line.startswith("cpt"):
            cpt_lines.append((lineno, line))
        else:
            structure_lines.append(line)
    schema, dag, class_name = parse_structure("\n".join(structure_lines))

    edge_set = set(dag.edges)
    parents = {
        n: tuple(p for p in schema.names if (p, n) in edge_set) for n in schema.names
    }
    rows: dict[str, dict[int, np.ndarray]] = {n: {} for n in schema.names}

    for lineno, line in cpt_lines:
        m = _CPT_RE.match(line)
        if not m:
            raise ParseError(lineno, f"malformed cpt line: {line!r}")
        child = m.group(1)
        if child not in schema._index:
            raise UnknownNodeError(child)
        cond = m.group(2).strip()
        want = parents[child]
        assigned: dict[str, int] = {}
        if cond:
            for part in cond.split(","):
                part = part.strip()
                if "=" not in part:
                    raise ParseError(lineno, f"malformed condition {part!r}")
                pname, _, label = part.partition("=")
                pname = pname.strip()
                label = label.strip()
                if pname not in schema._index:
                    raise UnknownNodeError(pname)
                if pname in assigned:
                    raise ParseError(lineno, f"{pname} assigned twice")
                try:
                    assigned[pname] = schema.state_index(pname, label)
                except KeyError:
                    raise UnknownStateLabelError(lineno, pname, label) from None
        if tuple(sorted(assigned)) != tuple(sorted(want)):
            raise ParseError(
                lineno,
                f"{child}: condition names {sorted(assigned)} do not match "
                f"parents {sorted(want)}",
            )
        ridx = 0
        for p in want:
            ridx = ridx * schema.variable(p).cardinality + assigned[p]
        try:
            probs = np.array(
                [float(x) for x in m.group(3).split(",")], dtype=np.float64
            )
        except ValueError:
            raise ParseError(lineno, f"bad probability list: {m.group(3)!r}") from None
        card = schema.variable(child).cardinality
        if probs.shape != (card,):
            raise ParseError(
                lineno, f"{child}: {probs.size} probabilities, needs {card}"
            )
        if not np.isfinite(probs).all() or (probs < 0).any() or (probs > 1).any():
            raise ParseError(lineno, f"{child}: probabilities must lie in [0, 1]")
        drift = abs(float(probs.sum()) - 1.0)
        if drift > PARSE_ROW_SUM_TOL:
            raise RowSumError(
                f"line {lineno}: {child} row sums to {float(probs.sum())!r}"
            )
        if drift > 1e-9:
            probs = probs / probs.sum()
        if ridx in rows[child]:
            raise DuplicateError(f"line {lineno}: duplicate cpt row for {child}")
        rows[child][ridx] = probs

    cpts = []
    for name in schema.names:
        want = parents[name]
        n_rows = 1
        for p in want:
            n_rows *= schema.variable(p).cardinality
        card = schema.variable(name).cardinality
        table = np.empty((n_rows, card), dtype=np.float64)
        for ridx in range(n_rows):
            if ridx not in rows[name]:
                raise MissingCptRowError(
                    f"{name}: no cpt row for {_describe_row(schema, want, ridx)}"
                )
            table[ridx] = rows[name][ridx]
        cpts.append(Cpt(name, want, table))
    return NetworkModel(schema, dag, cpts), class_name


def _describe_row(schema: Schema, parents: tuple[str, ...], ridx: int) -> str:
    if not parents:
        return "the empty condition"
    labels = []
    for p in reversed(parents):
        card = schema.variable(p).cardinality
        labels.append(f"{p}={schema.variable(p).states[ridx % card]}")
        ridx //= card
    return ",".join(reversed(labels))


def emit_model(model: NetworkModel, class_name: str) -> str:
    """Canonical model text; probabilities at 17 significant digits."""
    schema = model.schema
    out = [emit_structure(schema, model.dag, class_name).rstrip("\n")]
    for name in schema.names:
        cpt = model.cpts[name]
        for ridx in range(cpt.n_rows):
            probs = ",".join(_format_prob(p) for p in cpt.table[ridx])
            if cpt.parents:
                cond = _describe_row(schema, cpt.parents, ridx)
                out.append(f"cpt {name} | {cond} : {probs}")
            else:
                out.append(f"cpt {name} | : {probs}")
    return "\n".join(out) + "\n"

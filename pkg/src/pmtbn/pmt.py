"""Protection-motivation network structure and edge auditing.

The shipped default encodes the theory's two-appraisal shape: five
antecedent variables feed a threat appraisal and a coping appraisal,
both appraisals feed protection intention, and intention drives the
binary purchase decision (the class). The companion whitelist holds
exactly the theory-endorsed directed edges; :func:`audit_structure`
reports every edge of a DAG that falls outside it, which is how learned
structures get checked for relations nobody can defend.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources

from .core import Dag, Schema
from .errors import ParseError, UnknownNodeError
from .formats import parse_structure

DEFAULT_CLASS = "purchase_protection"

_ALLOW_RE = re.compile(r"allow\s+(\S+)\s*->\s*(\S+)\Z")


@dataclass(frozen=True)
class EdgeWhitelist:
    """Directed edges endorsed for a given schema.

    Direction matters: (A, B) allowed says nothing about (B, A).
    """

    schema: Schema
    allowed: frozenset

    def __post_init__(self):
        object.__setattr__(self, "allowed", frozenset(self.allowed))
        names = set(self.schema.names)
        for p, c in self.allowed:
            for end in (p, c):
                if end not in names:
                    raise UnknownNodeError(end)

    def __contains__(self, edge: tuple[str, str]) -> bool:
        return tuple(edge) in self.allowed


@dataclass(frozen=True)
class FlaggedEdge:
    parent: str
    child: str
    note: str


@dataclass(frozen=True)
class AuditReport:
    """Off-whitelist edges of one DAG, with counts."""

    flagged: tuple[FlaggedEdge, ...]
    total_edges: int
    flagged_count: int

    def render(self) -> str:
        lines = [
            f"edges audited: {self.total_edges}",
            f"edges flagged: {self.flagged_count}",
        ]
        for e in self.flagged:
            lines.append(f"  {e.parent} -> {e.child}: {e.note}")
        return "\n".join(lines) + "\n"


def audit_structure(dag: Dag, whitelist: EdgeWhitelist) -> AuditReport:
    """Flag every DAG edge absent from the whitelist.

    Flags are sorted by (parent, child). Raises UnknownNodeError if the
    DAG mentions a node the whitelist's schema does not cover.
    """
    names = set(whitelist.schema.names)
    for n in dag.nodes:
        if n not in names:
            raise UnknownNodeError(n)
    flagged = tuple(
        FlaggedEdge(p, c, "no prior behavioral-research support")
        for p, c in sorted(set(dag.edges) - whitelist.allowed)
    )
    return AuditReport(
        flagged=flagged, total_edges=len(dag.edges), flagged_count=len(flagged)
    )


def parse_whitelist(text: str, schema: Schema) -> EdgeWhitelist:
    """Parse ``allow <parent> -> <child>`` lines; duplicates collapse."""
    allowed = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = _ALLOW_RE.match(line)
        if not m:
            raise ParseError(lineno, f"malformed allow line: {line!r}")
        p, c = m.group(1), m.group(2)
        for end in (p, c):
            if end not in set(schema.names):
                raise UnknownNodeError(end)
        allowed.add((p, c))
    return EdgeWhitelist(schema, frozenset(allowed))


def emit_whitelist(whitelist: EdgeWhitelist) -> str:
    """Canonical whitelist text, edges sorted."""
    lines = [f"allow {p} -> {c}" for p, c in sorted(whitelist.allowed)]
    return "\n".join(lines) + "\n"


def _load_text(name: str) -> str:
    return (resources.files("pmtbn") / "data" / name).read_text(encoding="utf-8")


_DEFAULT_CACHE: tuple[Schema, Dag, EdgeWhitelist] | None = None


def default_pmt_structure() -> tuple[Schema, Dag, EdgeWhitelist]:
    """The shipped 9-variable protection-motivation structure.

    Returns (schema, dag, whitelist); the whitelist allows exactly the
    DAG's 8 edges. Values are cached and immutable.
    """
    global _DEFAULT_CACHE
    if _DEFAULT_CACHE is None:
        schema, dag, _ = parse_structure(_load_text("pmt_structure.bn"))
        whitelist = parse_whitelist(_load_text("pmt_whitelist.txt"), schema)
        _DEFAULT_CACHE = (schema, dag, whitelist)
    return _DEFAULT_CACHE

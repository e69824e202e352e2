"""Synthetic-data study runner: learned structure vs. fixed structure.

One study seed drives everything downstream of it. The seed is split
into a ground-truth seed and a data seed; the ground truth is either
loaded from a file (shared across seeds) or drawn fresh per seed; both
competitors train on the same prefix of one sampled stream and are
scored on the same suffix. Reports are pure functions of the config, so
two runs produce byte-identical machine output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .core import (
    MISSING,
    Cpt,
    Dag,
    Dataset,
    NetworkModel,
    Schema,
    validate_dag,
)
from .errors import (
    EmptyDatasetError,
    HeaderMismatchError,
    IncompleteAssignmentError,
    SeedFailureError,
)
from .inference import ancestral_sample
from .learning import estimate_cpts, learn_tan
from .pmt import EdgeWhitelist, audit_structure
from .rng import derive_seeds, uniform_stream


def _g17(x: float) -> str:
    return format(float(x), ".17g")


@dataclass(frozen=True)
class StudyConfig:
    """Everything a comparison study depends on.

    ``ground_truth`` fixes one generating model for every seed; left as
    None, each seed draws its own from the fixed structure.
    """

    schema: Schema
    dag: Dag
    class_name: str
    whitelist: EdgeWhitelist
    ground_truth: NetworkModel | None = None
    n_train: int = 3840
    n_test: int = 960
    seeds: tuple[int, ...] = tuple(range(1, 21))
    alpha: float = 1.0
    gamma: float = 2.0

    def __post_init__(self):
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        if self.n_train < 1 or self.n_test < 1:
            raise ValueError("n_train and n_test must be >= 1")
        if not self.seeds:
            raise ValueError("at least one seed required")
        if self.gamma <= 0:
            raise ValueError("gamma must be > 0")
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        self.schema.index_of(self.class_name)
        if set(self.dag.nodes) != set(self.schema.names):
            raise ValueError("fixed structure must cover exactly the schema")
        if self.whitelist.schema != self.schema:
            raise ValueError("whitelist bound to a different schema")
        if self.ground_truth is not None and self.ground_truth.schema != self.schema:
            raise ValueError("ground truth bound to a different schema")


@dataclass(frozen=True)
class SeedResult:
    seed: int
    tan_accuracy: float
    fixed_accuracy: float
    oracle_accuracy: float
    flagged_edges: tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class ComparisonReport:
    """Aggregated study outcome; rows are sorted by seed."""

    config: StudyConfig
    rows: tuple[SeedResult, ...]
    mean_tan: float
    mean_fixed: float
    mean_oracle: float
    std_tan: float
    std_fixed: float
    std_oracle: float
    gap: float
    flagged_edge_counts: tuple[tuple[tuple[str, str], int], ...] = field(
        default_factory=tuple
    )

    def render_table(self) -> str:
        """Human-readable accuracy table in the style of a two-model bake-off."""
        n = len(self.rows)
        lines = [
            f"Accuracy over {n} seed{'s' if n != 1 else ''} "
            f"(n_train={self.config.n_train}, n_test={self.config.n_test})",
            "",
            f"{'Model':<18}{'Mean accuracy':>15}{'Std dev':>10}",
            f"{'Pure ML model':<18}{self.mean_tan:>14.2%}{self.std_tan:>10.4f}",
            f"{'PMT-based model':<18}{self.mean_fixed:>14.2%}{self.std_fixed:>10.4f}",
            "",
            f"Bayes-optimal oracle accuracy: {self.mean_oracle:.2%}",
            f"Accuracy gap (fixed - learned): {self.gap:+.4f}",
        ]
        total_flagged = sum(len(r.flagged_edges) for r in self.rows)
        lines.append(
            f"Learned-structure audit: {total_flagged} off-whitelist edge "
            f"occurrences across {n} seed{'s' if n != 1 else ''}"
        )
        for (p, c), count in self.flagged_edge_counts:
            lines.append(f"  {p} -> {c}: flagged in {count} seed(s)")
        return "\n".join(lines) + "\n"

    def render_machine(self) -> str:
        """Line-based key/value report plus a per-seed CSV block; byte-stable."""
        cfg = self.config
        out = [
            f"n_seeds: {len(self.rows)}",
            f"n_train: {cfg.n_train}",
            f"n_test: {cfg.n_test}",
            f"alpha: {_g17(cfg.alpha)}",
            f"gamma: {_g17(cfg.gamma)}",
            f"class: {cfg.class_name}",
            f"mean_tan_accuracy: {_g17(self.mean_tan)}",
            f"mean_fixed_accuracy: {_g17(self.mean_fixed)}",
            f"mean_oracle_accuracy: {_g17(self.mean_oracle)}",
            f"std_tan_accuracy: {_g17(self.std_tan)}",
            f"std_fixed_accuracy: {_g17(self.std_fixed)}",
            f"std_oracle_accuracy: {_g17(self.std_oracle)}",
            f"accuracy_gap: {_g17(self.gap)}",
        ]
        for (p, c), count in self.flagged_edge_counts:
            out.append(f"flagged_edge: {p} -> {c}: {count}")
        out.append("per_seed:")
        out.append("seed,tan_accuracy,fixed_accuracy,oracle_accuracy,n_flagged")
        for r in self.rows:
            out.append(
                f"{r.seed},{_g17(r.tan_accuracy)},{_g17(r.fixed_accuracy)},"
                f"{_g17(r.oracle_accuracy)},{len(r.flagged_edges)}"
            )
        return "\n".join(out) + "\n"


def random_ground_truth(
    schema: Schema, dag: Dag, seed: int, gamma: float = 2.0
) -> NetworkModel:
    """Draw a full model over ``dag`` from one seeded uniform stream.

    Each CPT entry starts as one uniform draw (nodes in topological
    order, rows row-major, states in schema order), is raised to
    ``gamma``, and the row is normalized. Larger gamma sharpens rows
    toward one-hot; gamma 1 leaves them flat on average.
    """
    if gamma <= 0:
        raise ValueError("gamma must be > 0")
    topo = validate_dag(dag)
    shapes = []
    for name in topo:
        parents = tuple(p for p in schema.names if (p, name) in set(dag.edges))
        rows = math.prod(schema.variable(p).cardinality for p in parents)
        shapes.append((name, parents, rows, schema.variable(name).cardinality))
    total = sum(rows * card for _, _, rows, card in shapes)
    us = uniform_stream(seed, total)
    cpts = []
    offset = 0
    for name, parents, rows, card in shapes:
        block = us[offset : offset + rows * card].reshape(rows, card)
        offset += rows * card
        table = block**gamma
        sums = table.sum(axis=1, keepdims=True)
        # gamma large enough can underflow a whole row to zero; flatten those
        dead = sums[:, 0] == 0.0
        if dead.any():
            table[dead] = 1.0
            sums = table.sum(axis=1, keepdims=True)
        cpts.append(Cpt(name, parents, table / sums))
    return NetworkModel(schema, dag, cpts)


def generate_experiment_data(
    ground_truth: NetworkModel, seed: int, n_train: int, n_test: int
) -> tuple[Dataset, Dataset]:
    """Sample one stream of n_train + n_test rows and split it as a prefix."""
    full = ancestral_sample(ground_truth, seed, n_train + n_test)
    schema = ground_truth.schema
    return (
        Dataset(schema, full.rows[:n_train]),
        Dataset(schema, full.rows[n_train:]),
    )


def evaluate_accuracy(model: NetworkModel, test: Dataset, class_name: str) -> float:
    """Fraction of test rows whose class the model predicts correctly.

    Evidence is every non-class variable; prediction is the argmax of the
    class posterior with ties to the lowest state index.
    """
    if test.schema != model.schema:
        raise HeaderMismatchError("test data uses a different schema than the model")
    if len(test) == 0:
        raise EmptyDatasetError("no test rows")
    if (test.rows == MISSING).any():
        raise IncompleteAssignmentError("test rows must be complete")
    schema = model.schema
    ci = schema.index_of(class_name)
    comp = model.compiled()
    scores = kernels.full_evidence_scores(
        comp.topo_cols,
        comp.par_cols,
        comp.par_off,
        comp.par_strides,
        comp.table_flat,
        comp.row_off,
        comp.cards,
        test.rows,
        ci,
        int(schema.cardinalities[ci]),
    )
    preds = np.argmax(scores, axis=1)
    return float(np.mean(preds == test.rows[:, ci]))


def _mean_std(values: list[float]) -> tuple[float, float]:
    arr = np.asarray(values, dtype=np.float64)
    mean = float(arr.mean())
    std = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
    return mean, std


def run_comparison(config: StudyConfig) -> ComparisonReport:
    """Run the full learned-vs-fixed study across every configured seed.

    Per seed: derive (ground-truth seed, data seed) from the study seed,
    obtain the generating model, sample one stream, train the structure
    learner and the fixed-structure estimator on the same train split,
    score both plus the generating model on the same test split, and
    audit the learned graph. A failure in any seed aborts the study,
    naming that seed.
    """
    rows = []
    edge_counts: dict[tuple[str, str], int] = {}
    for seed in sorted(config.seeds):
        try:
            gt_seed, data_seed = derive_seeds(seed, 2)
            if config.ground_truth is not None:
                gt = config.ground_truth
            else:
                gt = random_ground_truth(
                    config.schema, config.dag, gt_seed, config.gamma
                )
            train, test = generate_experiment_data(
                gt, data_seed, config.n_train, config.n_test
            )
            tan = learn_tan(train, config.class_name, alpha=config.alpha)
            fixed = estimate_cpts(train, config.dag, alpha=config.alpha)
            acc_tan = evaluate_accuracy(tan, test, config.class_name)
            acc_fixed = evaluate_accuracy(fixed, test, config.class_name)
            acc_oracle = evaluate_accuracy(gt, test, config.class_name)
            audit = audit_structure(tan.dag, config.whitelist)
        except Exception as exc:
            raise SeedFailureError(seed, exc) from exc
        flagged = tuple((e.parent, e.child) for e in audit.flagged)
        for edge in flagged:
            edge_counts[edge] = edge_counts.get(edge, 0) + 1
        rows.append(
            SeedResult(
                seed=seed,
                tan_accuracy=acc_tan,
                fixed_accuracy=acc_fixed,
                oracle_accuracy=acc_oracle,
                flagged_edges=flagged,
            )
        )
    mean_tan, std_tan = _mean_std([r.tan_accuracy for r in rows])
    mean_fixed, std_fixed = _mean_std([r.fixed_accuracy for r in rows])
    mean_oracle, std_oracle = _mean_std([r.oracle_accuracy for r in rows])
    return ComparisonReport(
        config=config,
        rows=tuple(rows),
        mean_tan=mean_tan,
        mean_fixed=mean_fixed,
        mean_oracle=mean_oracle,
        std_tan=std_tan,
        std_fixed=std_fixed,
        std_oracle=std_oracle,
        gap=mean_fixed - mean_tan,
        flagged_edge_counts=tuple(sorted(edge_counts.items())),
    )

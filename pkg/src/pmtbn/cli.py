"""Command-line harness.

Subcommands cover the full study loop: ``generate`` synthetic data,
``learn-tan`` / ``train-fixed`` to fit the two competitors, ``eval`` and
``oracle-eval`` for accuracy, ``audit`` for off-whitelist edges, and
``compare`` for the end-to-end multi-seed comparison.

Exit codes: 0 success, 1 usage error, 2 data or model error. Files are
written only at explicitly requested output paths.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .core import Dag, Schema
from .errors import PmtbnError
from .formats import (
    emit_dataset,
    emit_model,
    parse_dataset,
    parse_model,
    parse_structure,
)
from .harness import (
    StudyConfig,
    evaluate_accuracy,
    generate_experiment_data,
    random_ground_truth,
    run_comparison,
)
from .learning import estimate_cpts, learn_tan
from .pmt import (
    DEFAULT_CLASS,
    EdgeWhitelist,
    audit_structure,
    default_pmt_structure,
    parse_whitelist,
)
from .rng import derive_seeds


class _Parser(argparse.ArgumentParser):
    """argparse variant that exits 1 (not 2) on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _seed_list(text: str) -> list[int]:
    try:
        seeds = [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad seed list: {text!r}") from None
    if not seeds:
        raise argparse.ArgumentTypeError(f"bad seed list: {text!r}")
    return seeds


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _structure_from_args(args) -> tuple[Schema, Dag, str]:
    if getattr(args, "structure", None):
        schema, dag, class_name = parse_structure(_read(args.structure))
    else:
        schema, dag, _ = default_pmt_structure()
        class_name = DEFAULT_CLASS
    if getattr(args, "class_name", None):
        class_name = args.class_name
        schema.index_of(class_name)
    return schema, dag, class_name


def _whitelist_from_args(args, schema: Schema, dag: Dag) -> EdgeWhitelist:
    # Default: the fixed structure's own edges are the endorsed set.
    if getattr(args, "whitelist", None):
        return parse_whitelist(_read(args.whitelist), schema)
    return EdgeWhitelist(schema, frozenset(dag.edges))


def _cmd_generate(args) -> int:
    gt_seed, data_seed = derive_seeds(args.seed, 2)
    if args.ground_truth:
        gt, class_name = parse_model(_read(args.ground_truth))
        if args.class_name:
            gt.schema.index_of(args.class_name)
            class_name = args.class_name
    else:
        schema, dag, class_name = _structure_from_args(args)
        gt = random_ground_truth(schema, dag, gt_seed, args.gamma)
    train, test = generate_experiment_data(gt, data_seed, args.n_train, args.n_test)
    if args.ground_truth_out:
        Path(args.ground_truth_out).write_text(
            emit_model(gt, class_name), encoding="utf-8"
        )
    if args.train_out:
        Path(args.train_out).write_text(emit_dataset(train), encoding="utf-8")
    if args.test_out:
        Path(args.test_out).write_text(emit_dataset(test), encoding="utf-8")
    print(f"generated {len(train)} train rows, {len(test)} test rows (seed {args.seed})")
    return 0


def _cmd_learn_tan(args) -> int:
    schema, _, class_name = _structure_from_args(args)
    train = parse_dataset(_read(args.train), schema)
    model = learn_tan(train, class_name, alpha=args.alpha)
    Path(args.model_out).write_text(emit_model(model, class_name), encoding="utf-8")
    return 0


def _cmd_train_fixed(args) -> int:
    schema, dag, class_name = _structure_from_args(args)
    train = parse_dataset(_read(args.train), schema)
    model = estimate_cpts(train, dag, alpha=args.alpha)
    Path(args.model_out).write_text(emit_model(model, class_name), encoding="utf-8")
    return 0


def _eval_common(model_path: str, data_path: str, class_override: str | None) -> int:
    model, class_name = parse_model(_read(model_path))
    if class_override:
        model.schema.index_of(class_override)
        class_name = class_override
    data = parse_dataset(_read(data_path), model.schema)
    acc = evaluate_accuracy(model, data, class_name)
    print(f"accuracy: {acc:.17g}")
    return 0


def _cmd_eval(args) -> int:
    return _eval_common(args.model, args.data, args.class_name)


def _cmd_oracle_eval(args) -> int:
    return _eval_common(args.ground_truth, args.data, args.class_name)


def _cmd_audit(args) -> int:
    text = _read(args.structure)
    if any(line.strip().startswith("cpt") for line in text.splitlines()):
        model, _ = parse_model(text)
        schema, dag = model.schema, model.dag
    else:
        schema, dag, _ = parse_structure(text)
    if args.whitelist:
        whitelist = parse_whitelist(_read(args.whitelist), schema)
    else:
        _, _, default_wl = default_pmt_structure()
        whitelist = EdgeWhitelist(schema, default_wl.allowed)
    report = audit_structure(dag, whitelist)
    sys.stdout.write(report.render())
    return 0


def _cmd_compare(args) -> int:
    schema, dag, class_name = _structure_from_args(args)
    whitelist = _whitelist_from_args(args, schema, dag)
    ground_truth = None
    if args.ground_truth:
        ground_truth, _ = parse_model(_read(args.ground_truth))
    if args.seed:
        seeds = [s for chunk in args.seed for s in chunk]
    else:
        seeds = list(range(1, 21))
    config = StudyConfig(
        schema=schema,
        dag=dag,
        class_name=class_name,
        whitelist=whitelist,
        ground_truth=ground_truth,
        n_train=args.n_train,
        n_test=args.n_test,
        seeds=tuple(seeds),
        alpha=args.alpha,
        gamma=args.gamma,
    )
    report = run_comparison(config)
    sys.stdout.write(report.render_table())
    if args.report_out:
        Path(args.report_out).write_text(report.render_machine(), encoding="utf-8")
    return 0


def _add_structure_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--structure",
        help="structure file (default: the shipped protection-motivation network)",
    )
    p.add_argument("--class", dest="class_name", help="class variable override")


def build_parser() -> _Parser:
    parser = _Parser(prog="pmtbn", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", help="sample a ground truth and train/test data")
    _add_structure_flags(p)
    p.add_argument("--ground-truth", help="model file to sample from instead")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--gamma", type=float, default=2.0)
    p.add_argument("--n-train", type=int, default=3840)
    p.add_argument("--n-test", type=int, default=960)
    p.add_argument("--ground-truth-out", help="write the generating model here")
    p.add_argument("--train-out", help="write the train CSV here")
    p.add_argument("--test-out", help="write the test CSV here")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("learn-tan", help="learn a tree-augmented model from data")
    _add_structure_flags(p)
    p.add_argument("--train", required=True, help="training CSV")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--model-out", required=True)
    p.set_defaults(func=_cmd_learn_tan)

    p = sub.add_parser("train-fixed", help="fit CPTs on the fixed structure")
    _add_structure_flags(p)
    p.add_argument("--train", required=True, help="training CSV")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--model-out", required=True)
    p.set_defaults(func=_cmd_train_fixed)

    p = sub.add_parser("eval", help="accuracy of a model file on a dataset")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--class", dest="class_name")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("oracle-eval", help="accuracy of the generating model itself")
    p.add_argument("--ground-truth", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--class", dest="class_name")
    p.set_defaults(func=_cmd_oracle_eval)

    p = sub.add_parser("audit", help="flag edges without whitelist support")
    p.add_argument("--structure", required=True, help="structure or model file")
    p.add_argument("--whitelist", help="allow-list file (default: shipped)")
    p.set_defaults(func=_cmd_audit)

    p = sub.add_parser("compare", help="multi-seed learned-vs-fixed study")
    _add_structure_flags(p)
    p.add_argument("--whitelist", help="allow-list file (default: fixed edges)")
    p.add_argument("--ground-truth", help="fix one generating model for all seeds")
    p.add_argument(
        "--seed",
        action="append",
        type=_seed_list,
        metavar="N[,N...]",
        help="study seed; repeat or comma-separate (default 1..20)",
    )
    p.add_argument("--n-train", type=int, default=3840)
    p.add_argument("--n-test", type=int, default=960)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=2.0)
    p.add_argument("--report-out", help="write the machine-readable report here")
    p.set_defaults(func=_cmd_compare)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code is None else int(exc.code)
    try:
        return args.func(args)
    except PmtbnError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface: synth, train, evaluate, recommend, rules, catalogue.

Exit codes: 0 success, 2 usage error, 3 invalid input data/files, 4 runtime failure.
Settings resolve as command-line flags > ``--config`` JSON file > defaults.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import sys
import warnings
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import asset_path
from .catalogue import CatalogueError, read_catalogue, recommend
from .classifiers import ModelFormatError, TrainingMatrix, fit_forest, fit_knn, fit_tree, load_model, save_model
from .dataset import DATA_TYPES, NATURES, DatasetError, LabelSets, check_enum, filter_ai, format_for_path, \
    load_synth_spec, project_features, read_records, serialize_records, synth_dataset
from .encoding import UnknownCategory, build_vocabulary, split_train_test
from .evaluation import compare_approaches, evaluate_approach
from .rules import NoMatch, RuleError, RuleSet, dump_rules, extract_rules, read_rules

EXIT_USAGE, EXIT_INVALID, EXIT_RUNTIME = 2, 3, 4
APPROACHES = ("rule_based", "decision_tree", "random_forest", "knn")
MODEL_FILES = {a: f"{a if a != 'rule_based' else 'rules'}.json" for a in APPROACHES}
MANIFEST = "manifest.json"
EVALUATION = "evaluation.json"
BARS = "evaluation_bars.csv"


class CliError(RuntimeError):
    """Runtime failure reported to the user without a traceback."""


@dataclass
class RunConfig:
    seed: int = 0
    ratio: str = "8/10"
    approach: str = "all"
    strategy: str = "union"
    k: int = 5
    n_trees: int = 100
    max_depth: int | None = None
    min_leaf_size: int = 1
    data: str | None = None
    rules: str | None = None
    catalogue: str | None = None
    model_dir: str = "models"
    format: str = "text"

    @property
    def ratio_value(self) -> Fraction:
        return Fraction(str(self.ratio))

    def approaches(self) -> tuple[str, ...]:
        return APPROACHES if self.approach == "all" else (self.approach,)


CONFIG_KEYS = {f.name for f in dataclasses.fields(RunConfig)}


def _ratio(text: str) -> str:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a ratio: {text!r}") from None
    if not 0 <= value <= 1:
        raise argparse.ArgumentTypeError("ratio must lie in [0, 1]")
    return text


def _enum_arg(name, allowed):
    def parse(text: str) -> str:
        try:
            return check_enum(name, text, allowed)
        except DatasetError as exc:
            raise argparse.ArgumentTypeError(exc.detail) from None
    parse.__name__ = name
    return parse


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--seed", type=int, help="seed for every random choice (default 0)")
    common.add_argument("--config", help="JSON file of settings; flags override it")
    common.add_argument("--data", help="dataset file (.csv or .json)")
    common.add_argument("--rules", help="rule file used by the rule-based approach")
    common.add_argument("--catalogue", help="MLOps tool catalogue file")
    common.add_argument("--model-dir", dest="model_dir", help="directory for models and reports (default models)")
    common.add_argument("--format", choices=("text", "json"), help="output format (default text)")

    parser = argparse.ArgumentParser(prog="mlopsrec", parents=[common],
                                     description="Recommend an MLOps toolchain from a project's data context.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", parents=[common], help="generate a synthetic dataset")
    p.add_argument("--n", type=int, required=True, help="number of records")
    p.add_argument("--spec", help="synthetic distribution spec (default: shipped noisy spec)")
    p.add_argument("--out", required=True, help="output file; .json or .csv")

    p = sub.add_parser("train", parents=[common], help="fit the selected approaches on the training split")
    _model_args(p)

    p = sub.add_parser("evaluate", parents=[common], help="score trained approaches on the test split")
    p.add_argument("--out-dir", dest="out_dir", help="where to write reports (default: model dir)")

    p = sub.add_parser("recommend", parents=[common], help="recommend MLOps tools for a data context")
    p.add_argument("--nature", type=_enum_arg("data_nature", NATURES), required=True)
    p.add_argument("--type", dest="data_type", type=_enum_arg("data_type", DATA_TYPES), required=True)
    p.add_argument("--approach", choices=APPROACHES)

    p = sub.add_parser("rules", help="rule file utilities")
    rsub = p.add_subparsers(dest="rules_command", required=True)
    q = rsub.add_parser("extract", parents=[common], help="extract rules from a dataset")
    q.add_argument("--strategy", choices=("union", "majority"))
    q.add_argument("--out", required=True)
    q = rsub.add_parser("validate", parents=[common], help="validate a rule file")
    q.add_argument("path")

    p = sub.add_parser("catalogue", help="catalogue utilities")
    csub = p.add_subparsers(dest="catalogue_command", required=True)
    q = csub.add_parser("validate", parents=[common], help="validate a catalogue file")
    q.add_argument("path")
    return parser


def _model_args(p):
    p.add_argument("--approach", choices=("all",) + APPROACHES)
    p.add_argument("--ratio", type=_ratio, help="training fraction, e.g. 8/10 or 0.8")
    p.add_argument("--strategy", choices=("union", "majority"), help="rule extraction strategy")
    p.add_argument("--k", type=int, help="neighbours for knn (default 5)")
    p.add_argument("--n-trees", dest="n_trees", type=int, help="forest size (default 100)")
    p.add_argument("--max-depth", dest="max_depth", type=int)
    p.add_argument("--min-leaf-size", dest="min_leaf_size", type=int)


def resolve_config(args: argparse.Namespace) -> RunConfig:
    settings = {}
    config_path = getattr(args, "config", None)
    if config_path:
        try:
            data = json.loads(Path(config_path).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise CliError(f"config file not found: {config_path}") from None
        except json.JSONDecodeError as exc:
            raise DatasetError(f"config {config_path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
        unknown = sorted(set(data) - CONFIG_KEYS)
        if unknown:
            raise DatasetError(f"config {config_path}: unknown keys {unknown}")
        settings.update(data)
    settings.update({k: v for k, v in vars(args).items() if k in CONFIG_KEYS and v is not None})
    return RunConfig(**settings)


def _banner(cfg: RunConfig, command: str) -> None:
    print(f"# mlopsrec {command}: " + json.dumps(dataclasses.asdict(cfg), sort_keys=True), file=sys.stderr)


def _emit(cfg: RunConfig, text: str, payload) -> None:
    if cfg.format == "json":
        sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    else:
        sys.stdout.write(text)


def _sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _load_views(cfg: RunConfig):
    if not cfg.data:
        raise CliError("--data is required")
    if not Path(cfg.data).is_file():
        raise CliError(f"dataset not found: {cfg.data}")
    ai = filter_ai(read_records(cfg.data))
    if not ai:
        raise CliError("no AI projects after filtering")
    return [project_features(r) for r in ai]


def _rule_predictor(rules: RuleSet):
    """Rule prediction for scoring: an uncovered input predicts nothing."""
    def predict(inputs):
        try:
            return rules.predict_inputs(inputs)
        except NoMatch:
            return LabelSets()
    return predict


def cmd_synth(cfg: RunConfig, args) -> int:
    spec = load_synth_spec(args.spec or asset_path("synth_noisy.json"))
    records = synth_dataset(spec, args.n, cfg.seed)
    Path(args.out).write_text(serialize_records(records, format_for_path(args.out)), encoding="utf-8")
    _emit(cfg, f"wrote {len(records)} records to {args.out}\n",
          {"out": args.out, "n": len(records), "seed": cfg.seed})
    return 0


def fit_approach(approach: str, train_views, cfg: RunConfig):
    if approach == "rule_based":
        return extract_rules(train_views, cfg.strategy)
    vocab = build_vocabulary(train_views, cover_enums=True)
    data = TrainingMatrix.from_views(train_views, vocab)
    if approach == "decision_tree":
        return fit_tree(data, max_depth=cfg.max_depth, min_leaf_size=cfg.min_leaf_size)
    if approach == "random_forest":
        return fit_forest(data, cfg.n_trees, cfg.seed, max_depth=cfg.max_depth, min_leaf_size=cfg.min_leaf_size)
    if approach == "knn":
        return fit_knn(data, cfg.k)
    raise ValueError(f"unknown approach {approach!r}")


def cmd_train(cfg: RunConfig, args) -> int:
    views = _load_views(cfg)
    split = split_train_test(len(views), cfg.ratio_value, cfg.seed)
    train = [views[i] for i in split.train]
    if not train:
        raise CliError("empty training set")
    out = Path(cfg.model_dir)
    out.mkdir(parents=True, exist_ok=True)
    summary = {}
    for approach in cfg.approaches():
        model = fit_approach(approach, train, cfg)
        predict = _rule_predictor(model) if approach == "rule_based" else model.predict_inputs
        check = evaluate_approach(approach, predict, train).to_dict()
        self_check = {k: check[k] for k in ("precision", "recall", "f_measure")}
        path = out / MODEL_FILES[approach]
        if approach == "rule_based":
            path.write_text(dump_rules(model), encoding="utf-8")
        else:
            save_model(model, path, {"seed": cfg.seed, "ratio": str(cfg.ratio_value), "n_train": len(train),
                                     "train_self_check": self_check})
        summary[approach] = {"path": str(path), "train_self_check": self_check}
    manifest = {
        "approaches": list(cfg.approaches()),
        "data_sha256": _sha256(cfg.data),
        "n_records": len(views),
        "n_train": len(split.train),
        "n_test": len(split.test),
        "ratio": str(cfg.ratio_value),
        "seed": cfg.seed,
        "settings": {k: getattr(cfg, k) for k in ("strategy", "k", "n_trees", "max_depth", "min_leaf_size")},
    }
    (out / MANIFEST).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    lines = [f"trained on {len(train)} of {len(views)} AI records (seed {cfg.seed}, ratio {cfg.ratio_value})"]
    lines += [f"  {a}: {s['path']} (train F {s['train_self_check']['f_measure']:.4f})" for a, s in summary.items()]
    _emit(cfg, "\n".join(lines) + "\n", {"manifest": manifest, "models": summary})
    return 0


def _read_manifest(model_dir: Path) -> dict:
    path = model_dir / MANIFEST
    if not path.is_file():
        raise CliError(f"missing model manifest: {path} (run `mlopsrec train` first)")
    return json.loads(path.read_text(encoding="utf-8"))


def load_approach(approach: str, model_dir: Path):
    path = model_dir / MODEL_FILES[approach]
    if not path.is_file():
        raise CliError(f"missing model for {approach}: {path}")
    return read_rules(path) if approach == "rule_based" else load_model(path)


def cmd_evaluate(cfg: RunConfig, args) -> int:
    model_dir = Path(cfg.model_dir)
    manifest = _read_manifest(model_dir)
    views = _load_views(cfg)
    if _sha256(cfg.data) != manifest["data_sha256"]:
        raise CliError(f"{cfg.data} is not the dataset the models in {model_dir} were trained on")
    # the split must be the one used at training time
    split = split_train_test(len(views), Fraction(manifest["ratio"]), manifest["seed"])
    test = [views[i] for i in split.test]
    if not test:
        raise CliError("empty test set")
    reports = []
    for approach in manifest["approaches"]:
        model = load_approach(approach, model_dir)
        predict = _rule_predictor(model) if approach == "rule_based" else model.predict_inputs
        reports.append(evaluate_approach(approach, predict, test))
    comparison = compare_approaches(reports)
    out_dir = Path(getattr(args, "out_dir", None) or model_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    payload = comparison.to_dict()
    payload.update({"seed": manifest["seed"], "ratio": manifest["ratio"], "n_test": len(test)})
    (out_dir / EVALUATION).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    (out_dir / BARS).write_text(comparison.bars_csv(), encoding="utf-8")
    if out_dir != model_dir:
        (model_dir / EVALUATION).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    text = f"test records: {len(test)} (seed {manifest['seed']})\n" + comparison.table()
    _emit(cfg, text, payload)
    return 0


def _default_approach(model_dir: Path) -> str:
    evaluation = model_dir / EVALUATION
    if evaluation.is_file():
        return json.loads(evaluation.read_text(encoding="utf-8"))["best"]
    if (model_dir / MODEL_FILES["random_forest"]).is_file():
        return "random_forest"
    return "rule_based"


def cmd_recommend(cfg: RunConfig, args) -> int:
    model_dir = Path(cfg.model_dir)
    approach = getattr(args, "approach", None) or _default_approach(model_dir)
    if approach == "rule_based":
        if cfg.rules:
            rules_path = Path(cfg.rules)
        elif (model_dir / MODEL_FILES["rule_based"]).is_file():
            rules_path = model_dir / MODEL_FILES["rule_based"]
        else:
            rules_path = asset_path("sample_rules.json")
        if not rules_path.is_file():
            raise CliError(f"rule file not found: {rules_path}")
        predictor = read_rules(rules_path)
    else:
        predictor = load_approach(approach, model_dir)
    catalogue_path = Path(cfg.catalogue) if cfg.catalogue else asset_path("catalogue.json")
    if not catalogue_path.is_file():
        raise CliError(f"catalogue not found: {catalogue_path}")
    catalogue = read_catalogue(catalogue_path)
    rec = recommend((args.nature, args.data_type), predictor, catalogue)
    if cfg.format == "json":
        sys.stdout.write(rec.to_json())
    else:
        sys.stdout.write(rec.render_text())
    return 0


def cmd_rules_extract(cfg: RunConfig, args) -> int:
    views = _load_views(cfg)
    rules = extract_rules(views, cfg.strategy)
    Path(args.out).write_text(dump_rules(rules), encoding="utf-8")
    report = evaluate_approach("rule_based", _rule_predictor(rules), views)
    text = (f"wrote {len(rules)} rules ({cfg.strategy}) to {args.out}\n"
            f"on the extraction data: precision {float(report.precision):.6f}, "
            f"recall {float(report.recall):.6f}, F-measure {float(report.f_measure):.6f}\n")
    _emit(cfg, text, {"out": args.out, "n_rules": len(rules), "strategy": cfg.strategy,
                      "extraction_data": report.to_dict()})
    return 0


def cmd_rules_validate(cfg: RunConfig, args) -> int:
    rules = read_rules(args.path)
    _emit(cfg, f"{args.path}: {len(rules)} valid rules\n", {"path": args.path, "n_rules": len(rules)})
    return 0


def cmd_catalogue_validate(cfg: RunConfig, args) -> int:
    catalogue = read_catalogue(args.path)
    _emit(cfg, f"{args.path}: {len(catalogue)} valid tool entries\n",
          {"path": args.path, "n_tools": len(catalogue)})
    return 0


def _dispatch(args):
    if args.command == "rules":
        return {"extract": cmd_rules_extract, "validate": cmd_rules_validate}[args.rules_command]
    if args.command == "catalogue":
        return cmd_catalogue_validate
    return {"synth": cmd_synth, "train": cmd_train, "evaluate": cmd_evaluate, "recommend": cmd_recommend}[args.command]


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        cfg = resolve_config(args)
        command = " ".join(x for x in (args.command, getattr(args, "rules_command", None),
                                       getattr(args, "catalogue_command", None)) if x)
        _banner(cfg, command)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            code = _dispatch(args)(cfg, args)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        return code
    except NoMatch as exc:
        print(f"error: no applicable rule: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (DatasetError, RuleError, CatalogueError, UnknownCategory, ModelFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (CliError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry point: prepare, train, evaluate, compare, predict,
serve, inspect.

Exit codes are a stable contract: 0 success, 64 usage error, 2 data error,
3 model error.  Runs are reproducible from a JSON config file plus flag
overrides (flags win); set SOURCE_DATE_EPOCH to pin bundle timestamps.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import corpus as corpus_mod
from . import features, metrics, modelstore, service, textnorm
from .ensembles import (
    BaggingConfig,
    StackingConfig,
    VotingConfig,
)
from .learners import (
    ForestConfig,
    GBTConfig,
    LearnerError,
    LogRegConfig,
    NBConfig,
    SVMConfig,
    TreeConfig,
)
from .pipeline import EmotionPipeline

EXIT_OK = 0
EXIT_DATA = 2
EXIT_MODEL = 3
EXIT_USAGE = 64

MODEL_KINDS = (
    "nb", "logreg", "svm", "tree", "forest", "gbt",
    "voting", "bagging-svm", "bagging-gbt", "bagging-logreg", "stacking",
)

DATA_DIR_ENV = "EKMANLAB_DATA_DIR"

DEFAULT_CONFIG = {
    "data_dir": None,  # None -> $EKMANLAB_DATA_DIR or ./data/goemotions
    "train_file": "train.tsv",
    "validation_file": "dev.tsv",
    "test_file": "test.tsv",
    "mapping_file": None,  # None -> packaged default mapping
    "pipeline_mode": "full",
    "repeat_cap": 2,
    "seed": 0,
    "out_dir": "out",
    "tfidf": {"min_df": 2, "max_features": 50000, "ngram_max": 1},
    "learners": {},
}


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


def _data_dir(config: dict) -> Path:
    if config.get("data_dir"):
        return Path(config["data_dir"])
    env = os.environ.get(DATA_DIR_ENV)
    if env:
        return Path(env)
    return Path("data/goemotions")


def load_config(path: str | None, overrides: dict) -> dict:
    config = json.loads(json.dumps(DEFAULT_CONFIG))  # deep copy
    if path:
        try:
            user = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise DataError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise DataError(f"config {path} is not valid JSON: {exc}") from exc
        for key, value in user.items():
            if isinstance(value, dict) and isinstance(config.get(key), dict):
                config[key].update(value)
            else:
                config[key] = value
    for key, value in overrides.items():
        if value is not None:
            config[key] = value
    return config


def _timestamp() -> int:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    return int(epoch) if epoch else int(time.time())


def _split_paths(config: dict) -> dict[str, Path]:
    base = _data_dir(config)
    return {
        "train": base / config["train_file"],
        "validation": base / config["validation_file"],
        "test": base / config["test_file"],
    }


def _cache_path(config: dict) -> Path:
    return Path(config["out_dir"]) / "corpus_cache.json"


def cmd_prepare(config: dict) -> int:
    paths = _split_paths(config)
    for name, path in paths.items():
        if not path.exists():
            raise DataError(f"{name} split file not found: {path}")
    corpus = corpus_mod.build_corpus(
        paths["train"], paths["validation"], paths["test"],
        mapping_path=config["mapping_file"],
    )
    resources = textnorm.load_default_resources()
    cap = config["repeat_cap"]

    cache: dict = {"splits": {}, "repeat_cap": cap}
    for split_name in ("train", "validation", "test"):
        records = []
        for ex in corpus.split(split_name):
            records.append(
                {
                    "text": ex.text,
                    "fine_ids": sorted(ex.fine_label_ids),
                    "label": int(ex.coarse_label),
                    "tokens_full": list(
                        textnorm.normalize_full(ex.text, resources, cap).tokens
                    ),
                    "tokens_raw": list(textnorm.tokenize_raw(ex.text).tokens),
                }
            )
        cache["splits"][split_name] = records

    out_dir = Path(config["out_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    cache_file = _cache_path(config)
    cache_file.write_text(
        json.dumps(cache, sort_keys=True, ensure_ascii=False), encoding="utf-8"
    )

    dist = corpus_mod.distribution_report(corpus)
    (out_dir / "class_distribution.json").write_text(
        json.dumps(dist, indent=2, sort_keys=True), encoding="utf-8"
    )
    for split_name in ("train", "validation", "test"):
        n = len(cache["splits"][split_name])
        print(f"{split_name}: {n} examples")
    print(f"cache: {cache_file}")
    print(f"distribution report: {out_dir / 'class_distribution.json'}")
    return EXIT_OK


def _load_cache(config: dict) -> dict:
    cache_file = _cache_path(config)
    if not cache_file.exists():
        raise DataError(f"prepared corpus not found: {cache_file} (run 'prepare' first)")
    return json.loads(cache_file.read_text(encoding="utf-8"))


def _split_docs_labels(cache: dict, split: str, mode: str):
    records = cache["splits"][split]
    key = "tokens_full" if mode == "full" else "tokens_raw"
    docs = [r[key] for r in records]
    labels = np.array([r["label"] for r in records], dtype=np.int64)
    return docs, labels


def make_model_config(kind: str, seed: int, overrides: dict):
    """Construct the learner/ensemble config for a CLI model kind."""
    params = dict(overrides.get(kind, {}))

    def cfg(cls, **defaults):
        defaults.update(params)
        return cls(**defaults)

    if kind == "nb":
        return cfg(NBConfig)
    if kind == "logreg":
        return cfg(LogRegConfig)
    if kind == "svm":
        return cfg(SVMConfig)
    if kind == "tree":
        return cfg(TreeConfig)
    if kind == "forest":
        return cfg(ForestConfig, seed=seed)
    if kind == "gbt":
        return cfg(GBTConfig, seed=seed)
    if kind == "voting":
        kwargs = {
            "members": (
                make_model_config("gbt", seed, overrides),
                make_model_config("logreg", seed, overrides),
                make_model_config("svm", seed, overrides),
            ),
        }
        kwargs.update(params)
        return VotingConfig(**kwargs)
    if kind.startswith("bagging-"):
        base_kind = kind.split("-", 1)[1]
        kwargs = {"base": make_model_config(base_kind, seed, overrides), "seed": seed}
        kwargs.update(params)
        return BaggingConfig(**kwargs)
    if kind == "stacking":
        kwargs = {
            "bases": (
                make_model_config("forest", seed, overrides),
                make_model_config("gbt", seed, overrides),
                make_model_config("svm", seed, overrides),
            ),
            "meta": make_model_config("logreg", seed, overrides),
            "seed": seed,
        }
        kwargs.update(params)
        return StackingConfig(**kwargs)
    raise UsageError(f"unknown model kind: {kind!r}")


def _dataset_digest(config: dict) -> str:
    sha = hashlib.sha256()
    cache_file = _cache_path(config)
    sha.update(cache_file.read_bytes())
    return sha.hexdigest()


def cmd_train(config: dict, kind: str) -> int:
    if kind not in MODEL_KINDS:
        raise UsageError(
            f"unknown model kind: {kind!r} (choose from {', '.join(MODEL_KINDS)})"
        )
    cache = _load_cache(config)
    mode = config["pipeline_mode"]
    docs, y = _split_docs_labels(cache, "train", mode)

    tfidf_cfg = features.TfIdfConfig(**config["tfidf"])
    tfidf = features.fit(docs, tfidf_cfg)
    X = tfidf.transform(docs)

    model_config = make_model_config(kind, config["seed"], config.get("learners", {}))
    start = time.perf_counter()
    model = model_config.fit(X, y, n_classes=len(corpus_mod.COARSE_NAMES))
    train_seconds = time.perf_counter() - start

    resources = textnorm.load_default_resources()
    bundle = modelstore.ModelBundle(
        pipeline_mode=mode,
        tfidf=tfidf,
        model=model,
        resources=resources,
        repeat_cap=cache.get("repeat_cap", config["repeat_cap"]),
        metadata={
            "model_name": kind,
            "trained_at": _timestamp(),
            "dataset_digest": _dataset_digest(config),
            "seed": config["seed"],
            "config": {"tfidf": config["tfidf"], "pipeline_mode": mode},
        },
    )
    out_dir = Path(config["out_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    bundle_path = out_dir / f"{kind}{modelstore.FILE_EXTENSION}"
    modelstore.save(bundle, bundle_path)

    report = {
        "model": kind,
        "train_seconds": train_seconds,
        "fit_report": _json_safe(model.fit_report),
    }
    report_path = out_dir / f"{kind}_fit_report.json"
    report_path.write_text(json.dumps(report, indent=2, sort_keys=True), encoding="utf-8")
    print(f"trained {kind} in {train_seconds:.1f}s")
    print(f"bundle: {bundle_path}")
    print(f"fit report: {report_path}")
    return EXIT_OK


def _json_safe(obj):
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return obj


def cmd_evaluate(config: dict, bundle_path: str, split: str) -> int:
    if split not in ("train", "validation", "test"):
        raise UsageError(f"unknown split: {split!r}")
    bundle = modelstore.load(bundle_path)
    cache = _load_cache(config)
    docs, y = _split_docs_labels(cache, split, bundle.pipeline_mode)
    X = bundle.tfidf.transform(docs)
    report = metrics.evaluate(
        bundle.model, X, y,
        model_name=bundle.metadata.get("model_name", bundle.model.kind),
        split_name=split,
    )
    out_dir = Path(config["out_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    report_path = out_dir / f"{report.model_name}_{split}_report.json"
    report_path.write_text(
        json.dumps(report.to_json_dict(), indent=2, sort_keys=True), encoding="utf-8"
    )
    print(report.to_text())
    print(f"report: {report_path}")
    return EXIT_OK


def cmd_compare(config: dict, report_paths: list[str]) -> int:
    if not report_paths:
        raise UsageError("compare needs at least one report path")
    reports = []
    for path in report_paths:
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise DataError(f"cannot read report {path}: {exc}") from exc
        reports.append(
            metrics.EvaluationReport(
                model_name=raw["model"],
                split_name=raw["split"],
                cm=np.asarray(raw["confusion_matrix"], dtype=np.int64),
                per_class=raw["per_class"],
                macro=raw["macro"],
                weighted=raw["weighted"],
                accuracy=raw["accuracy"],
                zero_divisions=raw.get("zero_divisions", 0),
                label_names=tuple(raw.get("labels", corpus_mod.COARSE_NAMES)),
            )
        )
    table = metrics.compare(reports)
    out_dir = Path(config["out_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "comparison.json").write_text(metrics.comparison_json(table), encoding="utf-8")
    (out_dir / "comparison.csv").write_text(metrics.comparison_csv(table), encoding="utf-8")
    text = metrics.comparison_text(table)
    (out_dir / "comparison.txt").write_text(text + "\n", encoding="utf-8")
    print(text)
    return EXIT_OK


def cmd_predict(bundle_path: str, text: str) -> int:
    bundle = modelstore.load(bundle_path)
    pipeline = EmotionPipeline(bundle)
    start = time.perf_counter()
    payload = pipeline.predict_text(text)
    payload["elapsed_ms"] = (time.perf_counter() - start) * 1000.0
    print(json.dumps(payload, ensure_ascii=False, indent=2))
    return EXIT_OK


def cmd_inspect(bundle_path: str) -> int:
    header = modelstore.read_header(bundle_path)
    summary = {
        "format_version": header.get("format_version"),
        "model_kind": header.get("model_kind"),
        "pipeline_mode": header.get("pipeline_mode"),
        "repeat_cap": header.get("repeat_cap"),
        "norm_resources_digest": header.get("norm_resources_digest"),
        "metadata": header.get("metadata"),
        "payload_length": header.get("payload_length"),
        "n_sections": len(header.get("sections", [])),
    }
    print(json.dumps(summary, indent=2, sort_keys=True))
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ekmanlab", description=__doc__)
    parser.add_argument("--config", metavar="PATH", help="JSON config file")
    parser.add_argument("--seed", type=int, metavar="N")
    parser.add_argument("--out", metavar="DIR", help="output directory")
    parser.add_argument("--data-dir", metavar="DIR", help="split-file directory")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    sub.add_parser("prepare", help="resolve labels, normalize, cache splits")

    p_train = sub.add_parser("train", help="train a model and save a bundle")
    p_train.add_argument("--model", required=True, metavar="KIND")

    p_eval = sub.add_parser("evaluate", help="evaluate a bundle on a split")
    p_eval.add_argument("--bundle", required=True, metavar="PATH")
    p_eval.add_argument("--split", default="test",
                        choices=("train", "validation", "test"))

    p_cmp = sub.add_parser("compare", help="merge evaluation reports")
    p_cmp.add_argument("reports", nargs="+", metavar="REPORT_JSON")

    p_pred = sub.add_parser("predict", help="predict one text")
    p_pred.add_argument("--bundle", required=True, metavar="PATH")
    p_pred.add_argument("text", metavar="TEXT")

    p_serve = sub.add_parser("serve", help="run the HTTP prediction service")
    p_serve.add_argument("--bundle", required=True, metavar="PATH")
    p_serve.add_argument("--port", type=int, default=service.DEFAULT_PORT)
    p_serve.add_argument("--host", default="127.0.0.1")

    p_inspect = sub.add_parser("inspect", help="print a bundle's header")
    p_inspect.add_argument("--bundle", required=True, metavar="PATH")

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    if not args.command:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        config = load_config(
            args.config,
            {"seed": args.seed, "out_dir": args.out, "data_dir": args.data_dir},
        )
        if args.command == "prepare":
            return cmd_prepare(config)
        if args.command == "train":
            return cmd_train(config, args.model)
        if args.command == "evaluate":
            return cmd_evaluate(config, args.bundle, args.split)
        if args.command == "compare":
            return cmd_compare(config, args.reports)
        if args.command == "predict":
            return cmd_predict(args.bundle, args.text)
        if args.command == "serve":
            service.serve(args.bundle, port=args.port, host=args.host)
            return EXIT_OK
        if args.command == "inspect":
            return cmd_inspect(args.bundle)
        raise UsageError(f"unknown command: {args.command!r}")
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, corpus_mod.CorpusError, features.FitError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (LearnerError, modelstore.StoreError, service.ServiceError, OSError) as exc:
        print(f"model error: {exc}", file=sys.stderr)
        return EXIT_MODEL


if __name__ == "__main__":
    sys.exit(main())

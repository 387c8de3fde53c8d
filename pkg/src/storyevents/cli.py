"""Command-line entry point.

Commands: ingest, stats, validate, train, eval, predict,
augment {label,export,merge,benchmark}, sweep. Every run is reproducible:
the effective configuration and seed fully determine the outputs, and each
command echoes its configuration into the output directory
(config.txt, checkpoints/, predictions/, reports/, logs/).
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from . import augment as augment_mod
from .corpus import (
    Corpus,
    compute_stats,
    load_split_manifests,
    parse_brat,
    read_jsonl,
    validate_corpus,
    write_jsonl,
)
from .corpus.jsonl import story_records
from .corpus.synth import build_toy_corpus
from .errors import ConfigError, StoryEventsError
from .evaluation import (
    EXACT_SPAN,
    EXACT_SPAN_AND_CLASS,
    MatchCriterion,
    evaluate,
    export_report,
    report_table,
)
from .prompting import create_backbone, load_prompt_model, save_prompt_model, train_prompt_model
from .prompting.config import PromptModelConfig
from .runconfig import (
    apply_overrides,
    build_dataclass,
    echo_config,
    model_class_for,
    parse_config_file,
    split_general,
)
from .tagging import load_tagger, save_tagger, train_tagger
from .tagging.config import TaggerConfig

log = logging.getLogger("storyevents")

CRITERIA = {"span": EXACT_SPAN, "span+class": EXACT_SPAN_AND_CLASS}


def _outdirs(out: str) -> dict[str, str]:
    layout = {name: os.path.join(out, name) for name in
              ("checkpoints", "predictions", "reports", "logs")}
    for path in layout.values():
        os.makedirs(path, exist_ok=True)
    return layout


def load_corpus(data: str, splits_dir: str | None = None) -> Corpus:
    """A corpus directory of .txt/.ann pairs, or a .jsonl interchange file."""
    if data.endswith(".jsonl"):
        with open(data, encoding="utf-8") as handle:
            return read_jsonl(handle)
    stories = []
    for name in sorted(os.listdir(data)):
        if not name.endswith(".txt"):
            continue
        story_id = name[: -len(".txt")]
        ann_path = os.path.join(data, f"{story_id}.ann")
        if not os.path.exists(ann_path):
            continue
        with open(os.path.join(data, name), encoding="utf-8") as handle:
            text = handle.read()
        with open(ann_path, encoding="utf-8") as handle:
            ann = handle.read()
        try:
            stories.append(parse_brat(text, ann, story_id=story_id))
        except StoryEventsError as exc:
            raise StoryEventsError(f"{os.path.join(data, story_id)}.ann: {exc}") from exc
    corpus = Corpus(stories=tuple(stories))
    if splits_dir is None and os.path.isdir(os.path.join(data, "splits")):
        splits_dir = os.path.join(data, "splits")
    if splits_dir:
        corpus = load_split_manifests(corpus, splits_dir)
    return corpus


def load_any_model(path: str):
    import torch

    payload = torch.load(path, weights_only=False)
    kind = payload.get("format", "")
    if kind.startswith("storyevents-prompt"):
        return load_prompt_model(path)
    if kind.startswith("storyevents-tagger"):
        return load_tagger(path)
    raise ConfigError(f"unrecognized checkpoint format in {path}")


def cmd_ingest(args) -> int:
    corpus = load_corpus(args.raw_dir, args.splits)
    violations = validate_corpus(corpus)
    os.makedirs(os.path.dirname(os.path.abspath(args.out)), exist_ok=True)
    with open(args.out, "w", encoding="utf-8") as handle:
        count = write_jsonl(corpus, handle)
    report_path = args.out + ".validation.txt"
    with open(report_path, "w", encoding="utf-8") as handle:
        for violation in violations:
            handle.write(str(violation) + "\n")
    print(f"ingested {len(corpus.stories)} stories, {corpus.mention_count()} mentions, "
          f"{count} sentence records -> {args.out}")
    print(f"validation violations: {len(violations)} ({report_path})")
    return 0 if not violations else 1


def cmd_stats(args) -> int:
    corpus = load_corpus(args.data, args.splits)
    stats = compute_stats(corpus, top_k=args.top)
    os.makedirs(args.out, exist_ok=True)
    payload = {
        "total_tokens": stats.total_tokens,
        "unique_tokens": stats.unique_tokens,
        "total_sentences": stats.total_sentences,
        "avg_tokens_per_story": stats.avg_tokens_per_story,
        "avg_sentences_per_story": stats.avg_sentences_per_story,
        "avg_tokens_per_sentence": stats.avg_tokens_per_sentence,
        "total_events": stats.total_events,
        "avg_events_per_story": stats.avg_events_per_story,
        "per_class": {c.name: n for c, n in stats.per_class_counts.items()},
        "per_split_class": {
            split: {c.name: n for c, n in counts.items()}
            for split, counts in stats.per_split_class_counts.items()
        },
        "per_source": stats.per_source_counts,
    }
    with open(os.path.join(args.out, "stats.json"), "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2)
    with open(os.path.join(args.out, "top_triggers.csv"), "w", encoding="utf-8") as handle:
        handle.write("surface,count,occurrences,event_rate\n")
        for t in stats.top_triggers:
            handle.write(f"{t.surface},{t.trigger_count},{t.total_occurrences},{t.event_rate:.4f}\n")
    with open(os.path.join(args.out, "per_source.csv"), "w", encoding="utf-8") as handle:
        handle.write("source,events\n")
        for source, count in sorted(stats.per_source_counts.items()):
            handle.write(f"{source},{count}\n")
    print(json.dumps(payload, indent=2))
    return 0


def cmd_validate(args) -> int:
    corpus = load_corpus(args.raw_dir, args.splits)
    violations = validate_corpus(corpus)
    for violation in violations:
        print(str(violation))
    print(f"{len(violations)} violations across {len(corpus.stories)} stories")
    return 0 if not violations else 1


def _effective_config(args) -> dict[str, str]:
    values = parse_config_file(args.config) if args.config else {}
    values = apply_overrides(values, args.set or [])
    if args.seed is not None:
        values["seed"] = str(args.seed)
    if args.mode:
        values["mode"] = args.mode
        values["label_scheme"] = args.mode
    if getattr(args, "toy", False):
        values["toy"] = "true"
        values.setdefault("backbone", "toy")
    return values


def _train_from_values(values: dict[str, str], out: str | None):
    kind = values.get("model", "prompt")
    model_cls = model_class_for(kind)
    general, model_values = split_general(values, model_cls)
    if kind == "tagger":
        model_values.setdefault("label_scheme", general.get("mode", "detect"))
        if "embedding_file" in general:
            model_values["embedding_file"] = general["embedding_file"]
        config = build_dataclass(TaggerConfig, model_values)
    else:
        config = build_dataclass(PromptModelConfig, model_values)
    if "seed" in general:
        config.seed = int(general["seed"])

    toy = general.get("toy", "").lower() in ("1", "true", "yes", "on")
    if toy:
        corpus = build_toy_corpus(seed=config.seed)
    else:
        if "data" not in general:
            raise ConfigError("config needs data = <corpus dir or .jsonl> (or toy = true)")
        corpus = load_corpus(general["data"], general.get("splits_dir"))

    if kind == "prompt":
        backbone = general.get("backbone", "toy")
        adapter = create_backbone(backbone, corpus, seed=config.seed) \
            if backbone == "toy" else create_backbone(backbone)
        trained = train_prompt_model(config, corpus, adapter, progress=True)
    else:
        trained = train_tagger(config, corpus, progress=True)

    if out:
        layout = _outdirs(out)
        echo_config(values, os.path.join(out, "config.txt"))
        ckpt = os.path.join(layout["checkpoints"], "model.pt")
        if kind == "prompt":
            save_prompt_model(trained, ckpt)
        else:
            save_tagger(trained, ckpt)
        with open(os.path.join(layout["logs"], "train_log.json"), "w", encoding="utf-8") as handle:
            json.dump(trained.history, handle, indent=2)
        log.info("checkpoint written to %s", ckpt)
    return trained, corpus, kind


def cmd_train(args) -> int:
    values = _effective_config(args)
    _train_from_values(values, args.out)
    return 0


def _predictions_for(model, corpus: Corpus, split: str | None):
    predictions = {}
    stories = corpus.stories_in_split(split) if split else list(corpus.stories)
    for story in stories:
        for index, mentions in model.predict_story(story).items():
            predictions[(story.id, index)] = mentions
    return predictions


def cmd_eval(args) -> int:
    model = load_any_model(args.model)
    if args.toy:
        seed = args.seed if args.seed is not None else 42
        corpus = build_toy_corpus(seed=seed)
    else:
        corpus = load_corpus(args.data, args.splits)
    split = args.split or None
    predictions = _predictions_for(model, corpus, split)
    criterion = MatchCriterion(CRITERIA[args.criterion])
    result = evaluate(corpus, predictions, criterion, split=split)
    layout = _outdirs(args.out)
    export_report(result, layout["reports"], prefix="eval")
    print(report_table(result))
    return 0


def cmd_predict(args) -> int:
    model = load_any_model(args.model)
    if os.path.isdir(args.input):
        stories = augment_mod.read_unlabeled_dir(args.input)
    else:
        story_id = os.path.splitext(os.path.basename(args.input))[0]
        with open(args.input, encoding="utf-8") as handle:
            stories = [(story_id, handle.read())]
    labeled = augment_mod.label_unlabeled(model, stories, args.threshold)
    layout = _outdirs(args.out)
    augment_mod.export_for_review(labeled, layout["predictions"])
    jsonl_path = os.path.join(layout["predictions"], "predictions.jsonl")
    with open(jsonl_path, "w", encoding="utf-8") as handle:
        for story in labeled.stories:
            bare_predictions = {
                i: list(s.mentions) for i, s in enumerate(story.sentences)
            }
            for record in story_records(story, predictions=bare_predictions):
                record["mentions"] = []
                handle.write(json.dumps(record, ensure_ascii=False) + "\n")
    print(f"labeled {len(labeled.stories)} stories -> {layout['predictions']}")
    return 0


def cmd_augment(args) -> int:
    if args.action == "label":
        model = load_any_model(args.model)
        stories = augment_mod.read_unlabeled_dir(args.input)
        labeled = augment_mod.label_unlabeled(model, stories, args.threshold)
        os.makedirs(os.path.dirname(os.path.abspath(args.out)), exist_ok=True)
        with open(args.out, "w", encoding="utf-8") as handle:
            write_jsonl(labeled, handle)
        print(f"labeled {len(labeled.stories)} stories -> {args.out}")
        return 0
    if args.action == "export":
        corpus = load_corpus(args.data)
        batch = augment_mod.export_for_review(corpus, args.out)
        print(f"exported {len(batch.story_ids)} stories for review -> {args.out}")
        return 0
    if args.action == "merge":
        original = load_corpus(args.data)
        merged = augment_mod.merge_reviewed(original, args.reviewed)
        with open(args.out, "w", encoding="utf-8") as handle:
            write_jsonl(merged, handle)
        print(f"merged corpus of {len(merged.stories)} stories -> {args.out}")
        return 0
    if args.action == "benchmark":
        values = _effective_config(args)
        general, _ = split_general(values, model_class_for(values.get("model", "prompt")))
        synthetic = load_corpus(general["synthetic_data"])
        toy = general.get("toy", "").lower() in ("1", "true", "yes", "on")
        base = build_toy_corpus(seed=int(general.get("seed", "42"))) if toy \
            else load_corpus(general["data"], general.get("splits_dir"))
        sizes = tuple(int(x) for x in general.get("sample_sizes", "120,500").split(","))
        baseline = load_any_model(general["baseline_model"]) if "baseline_model" in general else None

        def train_fn(merged_corpus):
            return _train_on(values, merged_corpus)

        report = augment_mod.benchmark_expansion(
            synthetic, base, train_fn, sizes,
            seed=int(general.get("seed", "42")), baseline_model=baseline,
        )
        layout = _outdirs(args.out)
        with open(os.path.join(layout["reports"], "expansion.json"), "w", encoding="utf-8") as handle:
            json.dump(report.to_dict(), handle, indent=2)
        with open(os.path.join(layout["reports"], "expansion.txt"), "w", encoding="utf-8") as handle:
            handle.write(report.table() + "\n")
        print(report.table())
        return 0
    raise ConfigError(f"unknown augment action {args.action!r}")


def _train_on(values: dict[str, str], corpus: Corpus):
    """Train per config values on an already-built corpus (benchmark path)."""
    kind = values.get("model", "prompt")
    model_cls = model_class_for(kind)
    general, model_values = split_general(values, model_cls)
    config = build_dataclass(model_cls, model_values)
    if "seed" in general:
        config.seed = int(general["seed"])
    if kind == "prompt":
        adapter = create_backbone(general.get("backbone", "toy"), corpus, seed=config.seed) \
            if general.get("backbone", "toy") == "toy" else create_backbone(general["backbone"])
        return train_prompt_model(config, corpus, adapter)
    return train_tagger(config, corpus)


def cmd_sweep(args) -> int:
    values = _effective_config(args)
    raw_values = [v.strip() for v in args.values.split(",") if v.strip()]
    if len(set(raw_values)) != len(raw_values):
        raise ConfigError(f"duplicate sweep values: {args.values}")
    rows = []
    for value in raw_values:
        run_values = dict(values)
        run_values[args.key] = value
        run_out = os.path.join(args.out, f"{args.key}={value}")
        trained, corpus, kind = _train_from_values(run_values, run_out)
        metric = _best_dev_metric(trained)
        rows.append({"value": value, "dev_metric": metric})
        log.info("sweep %s=%s dev metric %.4f", args.key, value, metric)
    layout = _outdirs(args.out)
    with open(os.path.join(layout["reports"], "sweep.json"), "w", encoding="utf-8") as handle:
        json.dump({"key": args.key, "rows": rows}, handle, indent=2)
    print(f"{args.key:>14s} {'dev_metric':>12s}")
    for row in rows:
        print(f"{row['value']:>14s} {row['dev_metric']:>12.4f}")
    return 0


def _best_dev_metric(trained) -> float:
    metrics = [h["dev_metric"] for h in trained.history if "dev_metric" in h]
    return max(metrics) if metrics else float("nan")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="storyevents")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse + validate + align a BRAT directory into JSONL")
    p.add_argument("raw_dir")
    p.add_argument("--out", required=True, help="output .jsonl path")
    p.add_argument("--splits", help="directory with train/dev/test manifests")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("stats", help="dataset statistics, trigger table, source distribution")
    p.add_argument("data")
    p.add_argument("--out", required=True)
    p.add_argument("--splits")
    p.add_argument("--top", type=int, default=15)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("validate", help="report structural annotation violations")
    p.add_argument("raw_dir")
    p.add_argument("--splits")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("train", help="train a tagger or the prompt model")
    p.add_argument("--config")
    p.add_argument("--set", action="append", metavar="KEY=VALUE")
    p.add_argument("--seed", type=int)
    p.add_argument("--mode", choices=["detect", "classify"])
    p.add_argument("--toy", action="store_true", help="use the tiny test backbone and corpus")
    p.add_argument("--out")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="run predictions and export score reports")
    p.add_argument("--model", required=True)
    p.add_argument("--data")
    p.add_argument("--splits")
    p.add_argument("--split", default="test")
    p.add_argument("--criterion", choices=sorted(CRITERIA), default="span+class")
    p.add_argument("--toy", action="store_true")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("predict", help="label raw text; emit BRAT + JSONL with scores")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True, help=".txt file or directory of .txt files")
    p.add_argument("--threshold", type=float, default=0.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("augment", help="dataset expansion loop")
    p.add_argument("action", choices=["label", "export", "merge", "benchmark"])
    p.add_argument("--model")
    p.add_argument("--input")
    p.add_argument("--data")
    p.add_argument("--reviewed")
    p.add_argument("--threshold", type=float, default=0.0)
    p.add_argument("--config")
    p.add_argument("--set", action="append", metavar="KEY=VALUE")
    p.add_argument("--seed", type=int)
    p.add_argument("--mode", choices=["detect", "classify"])
    p.add_argument("--toy", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("sweep", help="repeat training over a hyperparameter list")
    p.add_argument("--config")
    p.add_argument("--set", action="append", metavar="KEY=VALUE")
    p.add_argument("--seed", type=int)
    p.add_argument("--mode", choices=["detect", "classify"])
    p.add_argument("--toy", action="store_true")
    p.add_argument("--key", required=True)
    p.add_argument("--values", required=True, help="comma-separated values")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except StoryEventsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Command line for linking planetary feature names in full-text literature.

Exit codes: 0 success, 1 input error, 2 adapter failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from surface_linker import corpus as corpus_mod
from surface_linker.entities import RuleEntityTagger
from surface_linker.evaluation import (
    confusion_and_metrics, read_stage_report, render_stage_report, write_stage_report)
from surface_linker.fusion import (
    Label, TrainingConfig, accuracy, load_training_points, save_model, save_training_points,
    synthetic_training_points, train_classifier)
from surface_linker.gazetteer import load_gazetteer
from surface_linker.graph import kg_probability, load_pair, save_pair
from surface_linker.keywords import harvest_keywords, lemmatize, load_vocabulary
from surface_linker.pipeline import (
    ConfigError, Pipeline, PipelineConfig, RecordTrace, export_results, load_config, read_results)
from surface_linker.training import read_labeled_excerpts, train_graphs

logger = logging.getLogger("surface_linker")

EXIT_OK, EXIT_INPUT, EXIT_ADAPTER = 0, 1, 2

CONFIG_FLAGS = {
    "gazetteer": "--gazetteer",
    "bodies": "--bodies",
    "corpus_dir": "--corpus-dir",
    "vocabulary": "--vocabulary",
    "graphs_dir": "--graphs-dir",
    "model": "--model",
    "window_size": "--window-size",
    "max_token_distance": "--max-token-distance",
    "relevance_thresholds": "--relevance-thresholds",
    "llm_stub": "--llm-stub",
    "llm_endpoint": "--llm-endpoint",
    "llm_default_answer": "--llm-default-answer",
    "llm_concurrency": "--llm-concurrency",
    "output_dir": "--output-dir",
}


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="flat key = value settings file")
    for name, flag in CONFIG_FLAGS.items():
        p.add_argument(flag, dest=name, default=None)


def _config(args) -> PipelineConfig:
    cfg = load_config(args.config) if args.config else PipelineConfig()
    overrides = {name: getattr(args, name) for name in CONFIG_FLAGS if hasattr(args, name)}
    return cfg.updated(**overrides)


def cmd_ingest(args) -> int:
    cfg = _config(args)
    if cfg.corpus_dir is None:
        raise ConfigError("--corpus-dir is required")
    store = corpus_mod.load_corpus_dir(cfg.corpus_dir)
    records = store.records()
    kept, dropped = corpus_mod.filter_language(records)
    meta_only = sum(r.metadata_only for r in records)
    print(f"records\t{len(records)}")
    print(f"metadata_only\t{meta_only}")
    print(f"non_english\t{len(dropped)}")
    return EXIT_OK


def cmd_extract(args) -> int:
    cfg = _config(args)
    cfg.validate(require=("gazetteer", "corpus_dir"))
    gaz = load_gazetteer(cfg.gazetteer, cfg.bodies)
    entry = gaz.get(args.name, args.body)
    if entry is None:
        raise ConfigError(f"gazetteer has no entry ({args.name!r}, {args.body!r})")
    store = corpus_mod.load_corpus_dir(cfg.corpus_dir)
    pipe = Pipeline(gaz, store, model=None, llm=None, vocabulary=None,
                    window_size=cfg.window_size, max_token_distance=cfg.max_token_distance)
    q = corpus_mod.CorpusQuery(args.name, args.body, cfg.max_token_distance)
    tagger, vocabulary = RuleEntityTagger(), load_vocabulary(cfg.vocabulary)
    lines, keyword_lines = [], []
    for hit in pipe.store.search_cooccurrence(q, entry.body):
        record = pipe.store.get(hit.record_id)
        for e in pipe.candidate_excerpts(record, entry, RecordTrace(record.id)):
            start, end = e.provenance
            lines.append("\t".join([e.record_id, e.feature_name, e.body, str(start),
                                    str(end), e.text()]))
            kws = harvest_keywords(e.window, tagger, vocabulary, exclude=entry.name)
            keyword_lines.append("\t".join([f"{e.record_id}:{start}", *kws.keywords]))
    text = "".join(ln + "\n" for ln in lines)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if args.keywords_out:
        Path(args.keywords_out).write_text("".join(ln + "\n" for ln in keyword_lines),
                                           encoding="utf-8")
    return EXIT_OK


def cmd_train_kg(args) -> int:
    cfg = _config(args)
    out = Path(args.out) if args.out else cfg.graphs_dir
    if out is None:
        raise ConfigError("--graphs-dir (or --out) is required")
    out.mkdir(parents=True, exist_ok=True)
    cfg.validate(require=("gazetteer",))
    gaz = load_gazetteer(cfg.gazetteer, cfg.bodies)
    rows = read_labeled_excerpts(args.labels)
    pairs = train_graphs(rows, gaz, RuleEntityTagger(), load_vocabulary(cfg.vocabulary),
                         cfg.window_size)
    for pair in pairs.values():
        save_pair(pair, out)
        print(f"{pair.feature_name}\t{pair.body}\t"
              f"{len(pair.planetary.keyword_labels())}\t{len(pair.other.keyword_labels())}")
    return EXIT_OK


def cmd_score_kg(args) -> int:
    pair = load_pair(args.graphs, args.name, args.body)
    keywords = [lemmatize(k) for k in args.keywords.split(",") if k.strip()]
    print(f"{kg_probability(pair, keywords):.6f}")
    return EXIT_OK


def cmd_train_model(args) -> int:
    if args.synthetic:
        points = synthetic_training_points(args.synthetic, seed=args.seed)
        if args.save_data:
            save_training_points(points, args.save_data)
    elif args.data:
        points = load_training_points(args.data)
    else:
        raise ConfigError("give --data <file> or --synthetic <n>")
    model = train_classifier(points, TrainingConfig(lam=args.lam, epochs=args.epochs, seed=args.seed))
    save_model(model, args.out)
    print(f"training_accuracy\t{accuracy(model, points):.4f}")
    return EXIT_OK


def cmd_run(args) -> int:
    cfg = _config(args)
    out = Pipeline.from_config(cfg).run(args.name, args.body)
    out_dir = cfg.output_dir or Path(".")
    export_results(out.results, out_dir / "results.tsv")
    write_stage_report(out.report, out_dir / "stage_report.tsv")
    table = render_stage_report(out.report, headers=[f"{args.name} ({args.body})"])
    (out_dir / "stage_report.txt").write_text(table, encoding="utf-8")
    sys.stdout.write(table)
    if out.adapter_failures:
        logger.error("%d excerpts hit LLM adapter failures", out.adapter_failures)
        return EXIT_ADAPTER
    return EXIT_OK


def read_gold(path) -> dict[tuple[str, int], Label]:
    """``record_id<TAB>char_start<TAB>label`` lines."""
    gold = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not raw.strip() or raw.startswith("#"):
            continue
        parts = raw.split("\t")
        if len(parts) < 3:
            raise ValueError(f"{path}:{lineno}: expected record_id, char_start, label")
        gold[(parts[0], int(parts[1]))] = Label.parse(parts[2])
    return gold


def cmd_evaluate(args) -> int:
    rows = read_results(args.results)
    gold = read_gold(args.gold)
    predicted = {(r["record_id"], int(r["char_start"])): Label(r["label"]) for r in rows}
    keys = sorted(set(gold) | set(predicted))
    # Gold mentions the pipeline never surfaced count as predicted negative.
    g = [gold.get(k, Label.NON_PLANETARY) for k in keys]
    p = [predicted.get(k, Label.NON_PLANETARY) for k in keys]
    cm, m = confusion_and_metrics(g, p)
    for name in ("tp", "fp", "fn", "tn"):
        print(f"{name}\t{getattr(cm, name)}")
    print(f"precision\t{m.precision:.4f}\nrecall\t{m.recall:.4f}\nf1\t{m.f1:.4f}")
    if args.stage_report:
        report = read_stage_report(args.stage_report).with_confusion(cm)
        write_stage_report(report, args.stage_report)
    return EXIT_OK


def cmd_report(args) -> int:
    reports = [read_stage_report(p) for p in args.stage_report]
    headers = args.headers.split(",") if args.headers else None
    sys.stdout.write(render_stage_report(*reports, headers=headers))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="surface-linker", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="load and validate a corpus directory")
    _add_config_flags(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("extract", help="dump candidate excerpt windows")
    _add_config_flags(p)
    p.add_argument("--name", required=True)
    p.add_argument("--body", required=True)
    p.add_argument("--out", help="excerpt dump (default stdout)")
    p.add_argument("--keywords-out", help="also write each excerpt's keyword set here")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("train-kg", help="build disambiguation graphs from labeled excerpts")
    _add_config_flags(p)
    p.add_argument("--labels", required=True)
    p.add_argument("--out", help="graph directory (same as --graphs-dir)")
    p.set_defaults(func=cmd_train_kg)

    p = sub.add_parser("score-kg", help="graph probability of a keyword list")
    p.add_argument("--graphs", required=True, help="graph directory")
    p.add_argument("--name", required=True)
    p.add_argument("--body", required=True)
    p.add_argument("--keywords", required=True, help="comma-separated keywords")
    p.set_defaults(func=cmd_score_kg)

    p = sub.add_parser("train-model", help="train the fusion classifier")
    p.add_argument("--data")
    p.add_argument("--synthetic", type=int, help="train on N synthetic points instead")
    p.add_argument("--save-data", help="write the synthetic points here")
    p.add_argument("--out", required=True)
    p.add_argument("--lam", type=float, default=1e-3)
    p.add_argument("--epochs", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_train_model)

    p = sub.add_parser("run", help="run the full cascade for one feature")
    _add_config_flags(p)
    p.add_argument("--name", required=True)
    p.add_argument("--body", required=True)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("evaluate", help="confusion matrix and metrics against gold labels")
    p.add_argument("--results", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--stage-report", help="stage-report file to fill with TP/FP/FN")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("report", help="render stage reports as a table")
    p.add_argument("--stage-report", nargs="+", required=True)
    p.add_argument("--headers", help="comma-separated column headers")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, ValueError, LookupError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

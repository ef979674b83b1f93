"""End-to-end cascade: search, record filters, excerpt filters, scoring, fusion.

Every record that comes back from search is either dropped by exactly one
stage or retained. Record-level stages drop a record at the first one it
fails. Excerpt-level stages drop it once its last excerpt is gone, and the
record is charged to the furthest stage any of its excerpts reached.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from enum import Enum
from pathlib import Path
from typing import Sequence

from surface_linker import corpus as corpus_mod
from surface_linker.corpus import CorpusQuery, CorpusStore, DocumentRecord
from surface_linker.entities import EntityCategory, EntityTagger, RuleEntityTagger, decide_keep
from surface_linker.evaluation import StageReport
from surface_linker.excerpts import (
    DESCRIPTOR_TERMS, Excerpt, adjective_filter, body_context_probability, containment_filter,
    extract_window, find_name_matches, name_tokens, retain_by_threshold)
from surface_linker.fusion import (
    AdjudicationError, Label, LabeledResult, LinearModel, LlmClient, ScoreVector,
    build_prompt, llm_score, predict_label, relevance_features, relevance_score)
from surface_linker.gazetteer import FeatureEntry, Gazetteer
from surface_linker.graph import DisambiguationGraphPair, kg_probability, load_pair, graph_paths
from surface_linker.keywords import ControlledVocabulary, KeywordSet, harvest_keywords, lemmatize
from surface_linker.text import tokenize

logger = logging.getLogger(__name__)


class ConfigError(ValueError):
    pass


class Stage(str, Enum):
    NON_ENGLISH = "filtered_non_english"
    IRRELEVANT_BODY = "filtered_irrelevant_body"
    NO_BODY_MENTION = "filtered_no_body_mention"
    NO_REGEX_MATCH = "filtered_no_regex_match"
    PHRASE_POS = "filtered_phrase_pos"
    ENTITY = "filtered_entity"
    KEYWORD_PHRASE = "filtered_keyword_phrase"


# Words that may share a keyword phrase with the feature name without
# making it part of some other proper name ("Kaiser crater").
GENERIC_COMPANIONS = frozenset(lemmatize(w) for w in """
    crater craters feature features basin rim floor region area wall walls ejecta
    interior impact structure deposit deposits dune dunes field
""".split()) | frozenset(lemmatize(w) for w in DESCRIPTOR_TERMS)


@dataclass
class PipelineConfig:
    gazetteer: Path | None = None
    bodies: Path | None = None
    corpus_dir: Path | None = None
    vocabulary: Path | None = None
    graphs_dir: Path | None = None
    model: Path | None = None
    window_size: int = 129
    max_token_distance: int = 50
    relevance_thresholds: tuple[int, int, int] = (5, 3, 10)
    llm_stub: Path | None = None
    llm_endpoint: str | None = None
    llm_default_answer: str | None = None
    llm_concurrency: int = 4
    output_dir: Path | None = None

    PATH_FIELDS = ("gazetteer", "bodies", "corpus_dir", "vocabulary", "graphs_dir",
                   "model", "llm_stub", "output_dir")

    def validate(self, require: Sequence[str] = ("gazetteer", "corpus_dir", "model")) -> None:
        if self.window_size < 1 or self.window_size % 2 == 0:
            raise ConfigError("window_size must be odd and >= 1")
        if self.max_token_distance < 1:
            raise ConfigError("max_token_distance must be >= 1")
        if self.llm_concurrency < 1:
            raise ConfigError("llm_concurrency must be >= 1")
        for name in require:
            if getattr(self, name) is None:
                raise ConfigError(f"missing required setting {name!r}")
        for name in self.PATH_FIELDS:
            value = getattr(self, name)
            if value is not None and name != "output_dir" and not Path(value).exists():
                raise ConfigError(f"{name}: {value} does not exist")

    def updated(self, **overrides) -> "PipelineConfig":
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        for key, value in overrides.items():
            if value is not None:
                values[key] = value
        cfg = PipelineConfig(**values)
        cfg._coerce()
        return cfg

    def _coerce(self, base: Path | None = None) -> None:
        for name in self.PATH_FIELDS:
            value = getattr(self, name)
            if value is not None and not isinstance(value, Path):
                value = Path(value)
            if value is not None and base is not None and not value.is_absolute():
                value = base / value
            setattr(self, name, value)
        self.window_size = int(self.window_size)
        self.max_token_distance = int(self.max_token_distance)
        self.llm_concurrency = int(self.llm_concurrency)
        if isinstance(self.relevance_thresholds, str):
            self.relevance_thresholds = tuple(int(x) for x in self.relevance_thresholds.split(","))
        self.relevance_thresholds = tuple(self.relevance_thresholds)
        if len(self.relevance_thresholds) != 3:
            raise ConfigError("relevance_thresholds needs three integers")


def load_config(path: str | Path) -> PipelineConfig:
    """Flat ``key = value`` file; relative paths resolve against its directory."""
    path = Path(path)
    known = {f.name for f in fields(PipelineConfig)}
    values = {}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = (p.strip() for p in line.partition("="))
        if not sep:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        if key not in known:
            raise ConfigError(f"{path}:{lineno}: unknown setting {key!r}")
        values[key] = value
    cfg = PipelineConfig(**values)
    cfg._coerce(base=path.parent)
    return cfg


@dataclass(frozen=True)
class ExcerptResult:
    record_id: str
    char_start: int
    char_end: int
    feature_name: str
    body: str
    scores: ScoreVector
    result: LabeledResult
    keywords: KeywordSet = KeywordSet()
    flags: tuple[str, ...] = ()

    @property
    def label(self) -> Label:
        return self.result.label

    @property
    def key(self) -> tuple[str, int]:
        return (self.record_id, self.char_start)


@dataclass
class RecordTrace:
    record_id: str
    dropped_at: Stage | None = None
    excerpt_drops: dict[int, Stage] = field(default_factory=dict)
    entity_categories: dict[int, EntityCategory] = field(default_factory=dict)


@dataclass
class RunOutput:
    results: list[ExcerptResult]
    report: StageReport
    traces: list[RecordTrace]

    @property
    def adapter_failures(self) -> int:
        return sum("llm-adapter-error" in r.flags for r in self.results)


def keyword_phrase_conflict(keywords: KeywordSet, e: Excerpt) -> bool:
    """True when a multiword keyword embeds the name in another proper name.

    The phrase must appear capitalized in the window and carry a word
    other than a generic feature term.
    """
    name = [lemmatize(w) for w in name_tokens(e.feature_name)]
    surfaces = e.window.surfaces
    lemmas = [lemmatize(s) for s in surfaces]
    for kw in keywords:
        words = kw.split()
        if len(words) <= len(name):
            continue
        starts = [i for i in range(len(words) - len(name) + 1) if words[i:i + len(name)] == name]
        if not starts:
            continue
        extras = words[:starts[0]] + words[starts[0] + len(name):]
        if all(w in GENERIC_COMPANIONS for w in extras):
            continue
        for i in range(len(lemmas) - len(words) + 1):
            if lemmas[i:i + len(words)] == words and all(s[:1].isupper() for s in surfaces[i:i + len(words)]):
                return True
    return False


class Pipeline:
    """Loaded resources plus the cascade; build once, run per (name, body)."""

    def __init__(self, gazetteer: Gazetteer, store: CorpusStore, model: LinearModel,
                 llm: LlmClient, vocabulary: ControlledVocabulary,
                 tagger: EntityTagger | None = None, graphs_dir: Path | None = None,
                 pairs: dict[tuple[str, str], DisambiguationGraphPair] | None = None,
                 window_size: int = 129, max_token_distance: int = 50,
                 relevance_thresholds: tuple[int, int, int] = (5, 3, 10),
                 llm_concurrency: int = 4):
        self.gazetteer = gazetteer
        self.store = store if store.frozen else store.freeze()
        self.model = model
        self.llm = llm
        self.vocabulary = vocabulary
        self.tagger = tagger or RuleEntityTagger()
        self.graphs_dir = graphs_dir
        self.pairs = dict(pairs or {})
        self.window_size = window_size
        self.max_token_distance = max_token_distance
        self.relevance_thresholds = relevance_thresholds
        self.llm_concurrency = llm_concurrency

    @classmethod
    def from_config(cls, cfg: PipelineConfig, llm: LlmClient | None = None) -> "Pipeline":
        from surface_linker.fusion import StubLlmClient, load_model
        from surface_linker.gazetteer import load_gazetteer
        from surface_linker.keywords import load_vocabulary
        from surface_linker.llm_http import HttpLlmClient

        cfg.validate()
        if llm is None:
            if cfg.llm_stub is not None:
                llm = StubLlmClient.from_file(cfg.llm_stub, default=cfg.llm_default_answer)
            elif cfg.llm_endpoint:
                llm = HttpLlmClient(cfg.llm_endpoint)
            else:
                raise ConfigError("configure llm_stub or llm_endpoint")
        return cls(
            gazetteer=load_gazetteer(cfg.gazetteer, cfg.bodies),
            store=corpus_mod.load_corpus_dir(cfg.corpus_dir),
            model=load_model(cfg.model),
            llm=llm,
            vocabulary=load_vocabulary(cfg.vocabulary),
            graphs_dir=cfg.graphs_dir,
            window_size=cfg.window_size,
            max_token_distance=cfg.max_token_distance,
            relevance_thresholds=cfg.relevance_thresholds,
            llm_concurrency=cfg.llm_concurrency,
        )

    def pair_for(self, entry: FeatureEntry) -> DisambiguationGraphPair | None:
        key = entry.key
        if key not in self.pairs and self.graphs_dir is not None:
            p_path, _ = graph_paths(self.graphs_dir, entry.name, entry.body.name)
            if p_path.exists():
                self.pairs[key] = load_pair(self.graphs_dir, entry.name, entry.body.name)
        return self.pairs.get(key)

    # ------------------------------------------------------------ stages

    def candidate_excerpts(self, record: DocumentRecord, entry: FeatureEntry,
                           trace: RecordTrace) -> list[Excerpt]:
        """Record-level filters and window extraction; empty when dropped."""
        body = entry.body
        if not corpus_mod.is_english(record):
            trace.dropped_at = Stage.NON_ENGLISH
            return []
        ts = tokenize(record.full_text)
        bodies = self.gazetteer.bodies_for(entry.name)
        profile = body_context_probability(ts, bodies)
        if not retain_by_threshold(profile, body.name):
            trace.dropped_at = Stage.IRRELEVANT_BODY
            return []
        if not corpus_mod.filter_body_mention(record, body)[0]:
            trace.dropped_at = Stage.NO_BODY_MENTION
            return []
        matches = find_name_matches(ts, entry.name)
        if not matches:
            trace.dropped_at = Stage.NO_REGEX_MATCH
            return []
        return [extract_window(ts, i, entry.name, record.id, body.name, self.window_size)
                for i in matches]

    def filter_excerpts(self, excerpts: list[Excerpt], entry: FeatureEntry,
                        trace: RecordTrace) -> list[tuple[Excerpt, KeywordSet]]:
        survivors = []
        for e in excerpts:
            start = e.provenance[0]
            if not (adjective_filter(e) and containment_filter(e, entry, self.gazetteer)):
                trace.excerpt_drops[start] = Stage.PHRASE_POS
                continue
            keep, category = decide_keep(e, self.tagger.tag(e.window))
            if category is not None:
                trace.entity_categories[start] = category
            if not keep:
                trace.excerpt_drops[start] = Stage.ENTITY
                continue
            keywords = harvest_keywords(e.window, self.tagger, self.vocabulary,
                                        exclude=entry.name)
            if keyword_phrase_conflict(keywords, e):
                trace.excerpt_drops[start] = Stage.KEYWORD_PHRASE
                continue
            survivors.append((e, keywords))
        if not survivors:
            trace.dropped_at = max(trace.excerpt_drops.values(),
                                   key=lambda s: list(Stage).index(s))
        return survivors

    def _ask_all(self, prompts: list[str]) -> list[tuple[int, tuple[str, ...]]]:
        def ask(prompt):
            try:
                return llm_score(self.llm, prompt), ()
            except AdjudicationError as exc:
                logger.warning("LLM answer not yes/no: %r", exc.raw)
                return 0, ("llm-unparseable",)
            except Exception as exc:  # adapter failure: flag and continue
                logger.error("LLM adapter failed: %s", exc)
                return 0, ("llm-adapter-error",)

        if self.llm_concurrency == 1 or len(prompts) <= 1:
            return [ask(p) for p in prompts]
        with ThreadPoolExecutor(max_workers=self.llm_concurrency) as pool:
            return list(pool.map(ask, prompts))

    # ------------------------------------------------------------ run

    def run(self, feature_name: str, body: str) -> RunOutput:
        entry = self.gazetteer.get(feature_name, body)
        if entry is None:
            raise ConfigError(f"gazetteer has no entry ({feature_name!r}, {body!r})")
        query = CorpusQuery(feature_name, body, self.max_token_distance)
        hits = self.store.search_cooccurrence(query, entry.body) if len(self.store) else []

        counts = {s: 0 for s in Stage}
        traces = []
        kept: list[tuple[DocumentRecord, Excerpt, KeywordSet]] = []
        for hit in hits:
            record = self.store.get(hit.record_id)
            trace = RecordTrace(record.id)
            traces.append(trace)
            excerpts = self.candidate_excerpts(record, entry, trace)
            if excerpts:
                for e, kws in self.filter_excerpts(excerpts, entry, trace):
                    kept.append((record, e, kws))
            if trace.dropped_at is not None:
                counts[trace.dropped_at] += 1

        pair = self.pair_for(entry)
        relevance = {}
        prompts = []
        for record, e, _ in kept:
            if record.id not in relevance:
                f = relevance_features(record, entry.body, entry.ftype.name, self.vocabulary,
                                       self.relevance_thresholds)
                relevance[record.id] = relevance_score(f)
            prompts.append(build_prompt(record.title, record.abstract, e.text(),
                                        entry.name, entry.body.name))
        answers = self._ask_all(prompts)

        results = []
        for (record, e, kws), (llm, flags) in zip(kept, answers):
            if pair is None:
                kg, flags = 0.5, flags + ("no-graph",)
            else:
                kg = kg_probability(pair, kws.keywords)
            scores = ScoreVector(kg, relevance[record.id], llm)
            results.append(ExcerptResult(
                record.id, e.provenance[0], e.provenance[1], entry.name, entry.body.name,
                scores, predict_label(self.model, scores), kws, flags))
        results.sort(key=lambda r: r.key)

        report = StageReport(
            initial_records=len(hits),
            records_retained=len({r.record_id for r in results}),
            excerpts_retained=len(results),
            **{s.value: n for s, n in counts.items()},
        )
        return RunOutput(results, report, traces)


def run_pipeline(cfg: PipelineConfig, feature_name: str, body: str,
                 llm: LlmClient | None = None) -> tuple[list[ExcerptResult], StageReport]:
    out = Pipeline.from_config(cfg, llm).run(feature_name, body)
    return out.results, out.report


EXPORT_HEADER = ("record_id", "char_start", "char_end", "feature_name", "body",
                 "kg", "relevance", "llm", "label", "confidence", "flags")


class ExportError(OSError):
    pass


def format_results(results: Sequence[ExcerptResult]) -> str:
    lines = ["\t".join(EXPORT_HEADER)]
    for r in results:
        lines.append("\t".join([
            r.record_id, str(r.char_start), str(r.char_end), r.feature_name, r.body,
            f"{r.scores.kg:.6f}", f"{r.scores.relevance:.6f}", str(r.scores.llm),
            r.label.value, f"{r.result.confidence:.6f}", ",".join(r.flags),
        ]))
    return "\n".join(lines) + "\n"


def export_results(results: Sequence[ExcerptResult], path: str | Path) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(format_results(results))
    except OSError as exc:
        raise ExportError(f"cannot write results to {path}: {exc}") from exc
    return path


def read_results(path: str | Path) -> list[dict]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or tuple(lines[0].split("\t")) != EXPORT_HEADER:
        raise ValueError(f"{path}: not a results export")
    return [dict(zip(EXPORT_HEADER, ln.split("\t"))) for ln in lines[1:] if ln]

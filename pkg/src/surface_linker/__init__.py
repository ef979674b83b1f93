"""Identify and disambiguate planetary surface-feature names in astronomy full text."""

from surface_linker.corpus import (
    CorpusQuery, CorpusStore, DocumentRecord, SearchHit, filter_body_mention, filter_language,
    load_corpus_dir, search_cooccurrence)
from surface_linker.entities import (
    EntityCategory, EntitySpan, RuleEntityTagger, decide_keep, tag_entities_rule_based)
from surface_linker.evaluation import (
    ConfusionMatrix, MetricsReport, StageReport, confusion_and_metrics, metrics_from_confusion,
    render_stage_report)
from surface_linker.excerpts import (
    BodyContextProfile, Excerpt, adjective_filter, body_context_probability, containment_filter,
    extract_window, find_name_matches, retain_by_threshold)
from surface_linker.fusion import (
    Label, LabeledResult, LinearModel, RelevanceFeatures, ScoreVector, StubLlmClient,
    build_prompt, llm_score, predict_label, relevance_score, train_classifier)
from surface_linker.gazetteer import (
    CelestialBody, FeatureEntry, FeatureType, Gazetteer, load_gazetteer, lookup_name, shared_names)
from surface_linker.graph import (
    DisambiguationGraphPair, add_observation, kg_probability, shared_keyword_count)
from surface_linker.keywords import (
    ControlledVocabulary, KeywordSet, extract_entity_keywords, extract_statistical, lemmatize,
    load_vocabulary, match_vocabulary, merge_top_keywords)
from surface_linker.pipeline import Pipeline, PipelineConfig, export_results, run_pipeline
from surface_linker.text import Pos, Token, TokenStream, tokenize

__version__ = "0.1.0"

__all__ = [
    "CorpusQuery", "CorpusStore", "DocumentRecord", "SearchHit", "filter_body_mention",
    "filter_language", "load_corpus_dir", "search_cooccurrence", "EntityCategory", "EntitySpan",
    "RuleEntityTagger", "decide_keep", "tag_entities_rule_based", "ConfusionMatrix",
    "MetricsReport", "StageReport", "confusion_and_metrics", "metrics_from_confusion",
    "render_stage_report", "BodyContextProfile", "Excerpt", "adjective_filter",
    "body_context_probability", "containment_filter", "extract_window", "find_name_matches",
    "retain_by_threshold", "Label", "LabeledResult", "LinearModel", "RelevanceFeatures",
    "ScoreVector", "StubLlmClient", "build_prompt", "llm_score", "predict_label",
    "relevance_score", "train_classifier", "CelestialBody", "FeatureEntry", "FeatureType",
    "Gazetteer", "load_gazetteer", "lookup_name", "shared_names", "DisambiguationGraphPair",
    "add_observation", "kg_probability", "shared_keyword_count", "ControlledVocabulary",
    "KeywordSet", "extract_entity_keywords", "extract_statistical", "lemmatize",
    "load_vocabulary", "match_vocabulary", "merge_top_keywords", "Pipeline", "PipelineConfig",
    "export_results", "run_pipeline", "Pos", "Token", "TokenStream", "tokenize",
]

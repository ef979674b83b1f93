from __future__ import annotations

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from surface_linker.evaluation import DROP_FIELDS, StageReport
from surface_linker.fusion import Label, StubLlmClient
from surface_linker.pipeline import (
    EXPORT_HEADER, ConfigError, ExportError, Pipeline, PipelineConfig, Stage, export_results,
    format_results, load_config, read_results, run_pipeline)

from helpers import MARS_TEXT, doc, make_pipeline, minicorpus_config, read_oracle


class FailingClient:
    def ask(self, prompt):
        raise ConnectionError("endpoint down")


def conserved(report: StageReport) -> bool:
    return report.dropped + report.records_retained == report.initial_records


# ---------------------------------------------------------------- mini-corpus

@pytest.fixture(scope="module")
def minicorpus_run():
    from conftest import MINICORPUS
    return Pipeline.from_config(minicorpus_config(MINICORPUS)).run("Kaiser", "Mars")


def test_minicorpus_matches_oracle(minicorpus_run, minicorpus_dir):
    drops, labels = read_oracle(minicorpus_dir / "oracle.tsv")
    got_drops = {t.record_id: t.dropped_at.value for t in minicorpus_run.traces
                 if t.dropped_at is not None}
    assert got_drops == drops
    assert {r.key: r.label for r in minicorpus_run.results} == labels


def test_minicorpus_stage_counts(minicorpus_run):
    assert minicorpus_run.report == StageReport(20, 2, 1, 2, 2, 3, 1, 1, 8, 10)
    assert conserved(minicorpus_run.report)


def test_minicorpus_deterministic(minicorpus_dir, tmp_path):
    cfg = minicorpus_config(minicorpus_dir)
    a = format_results(run_pipeline(cfg, "Kaiser", "Mars")[0])
    b = format_results(run_pipeline(cfg, "Kaiser", "Mars")[0])
    assert a == b


def test_results_ordered_by_record_and_offset(minicorpus_run):
    keys = [r.key for r in minicorpus_run.results]
    assert keys == sorted(keys)


def test_run_pipeline_returns_results_and_report(minicorpus_dir):
    results, report = run_pipeline(minicorpus_config(minicorpus_dir), "Kaiser", "Mars")
    assert len(results) == report.excerpts_retained == 10


# ---------------------------------------------------------------- small corpora

def test_empty_corpus():
    out = make_pipeline([]).run("Kaiser", "Mars")
    assert out.results == []
    assert out.report == StageReport()


def test_all_fail_body_mention():
    # Mars only in the title: search finds them, the full text never names the body.
    records = [doc(f"r{i}", "Kaiser crater has dark dunes and gullies.", title="Kaiser on Mars")
               for i in range(4)]
    out = make_pipeline(records).run("Kaiser", "Mars")
    assert out.results == []
    assert out.report.initial_records == 4
    assert out.report.filtered_no_body_mention == 4
    assert out.report.dropped == 4


def test_missing_gazetteer_entry():
    with pytest.raises(ConfigError):
        make_pipeline([]).run("Kaiser", "Venus")
    with pytest.raises(ConfigError):
        make_pipeline([]).run("Nonexistent", "Mars")


def test_adapter_failure_flags_and_continues():
    out = make_pipeline([doc("a", MARS_TEXT), doc("b", MARS_TEXT)], llm=FailingClient()).run(
        "Kaiser", "Mars")
    assert len(out.results) == 2
    assert all("llm-adapter-error" in r.flags and r.scores.llm == 0 for r in out.results)
    assert out.adapter_failures == 2


def test_unparseable_answer_defaults_to_zero():
    out = make_pipeline([doc("a", MARS_TEXT)], llm=StubLlmClient(default="perhaps")).run(
        "Kaiser", "Mars")
    (r,) = out.results
    assert r.scores.llm == 0 and r.flags == ("llm-unparseable", "no-graph")
    assert out.adapter_failures == 0


def test_missing_graph_uses_neutral_kg():
    (r,) = make_pipeline([doc("a", MARS_TEXT)]).run("Kaiser", "Mars").results
    assert r.scores.kg == 0.5
    assert "no-graph" in r.flags


def test_concurrency_does_not_change_output():
    records = [doc(f"r{i:02d}", MARS_TEXT) for i in range(12)]
    serial = make_pipeline(records, llm_concurrency=1).run("Kaiser", "Mars")
    pooled = make_pipeline(records, llm_concurrency=8).run("Kaiser", "Mars")
    assert format_results(serial.results) == format_results(pooled.results)


def test_every_record_charged_once():
    records = [
        doc("eng", MARS_TEXT),
        doc("frazer", "The Kaiser-Frazer car was sold on Mars Hill Road, Mars."),
        doc("cite", "As shown on Mars (Kaiser 2011), dunes migrate on Mars."),
    ]
    out = make_pipeline(records).run("Kaiser", "Mars")
    stages = {t.record_id: t.dropped_at for t in out.traces}
    assert stages == {"eng": None, "frazer": Stage.NO_REGEX_MATCH, "cite": Stage.ENTITY}
    assert conserved(out.report)


SENTENCES = [
    "Kaiser crater on Mars has dunes.",
    "The Kaiser-Frazer company built cars.",
    "Dunes migrate on Mars (Kaiser 2011).",
    "Prof. Kaiser studied Mars.",
    "Kaiser crater on the Moon is old and lunar.",
    "El cráter Kaiser en Marte.",
    "The rim of Kaiser is steep.",
    "Mars gullies form in winter.",
]


@settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.lists(st.lists(st.sampled_from(SENTENCES), min_size=1, max_size=6),
                min_size=0, max_size=6))
def test_conservation_property(docs):
    records = [doc(f"d{i}", " ".join(sents), title="Kaiser and Mars") for i, sents in enumerate(docs)]
    out = make_pipeline(records).run("Kaiser", "Mars")
    assert conserved(out.report)
    assert sum(t.dropped_at is not None for t in out.traces) == out.report.dropped
    assert out.report.records_retained == len({r.record_id for r in out.results})


# ---------------------------------------------------------------- export

def test_export_empty_is_header_only(tmp_path):
    path = export_results([], tmp_path / "out" / "r.tsv")
    assert path.read_bytes() == ("\t".join(EXPORT_HEADER) + "\n").encode()


def test_export_three_results(tmp_path):
    records = [doc(f"r{i}", MARS_TEXT) for i in range(3)]
    out = make_pipeline(records).run("Kaiser", "Mars")
    assert len(out.results) == 3
    path = export_results(out.results, tmp_path / "r.tsv")
    text = path.read_text(encoding="utf-8")
    assert text.endswith("\n")
    lines = text.splitlines()
    assert len(lines) == 4
    assert all(len(ln.split("\t")) == len(EXPORT_HEADER) for ln in lines)
    rows = read_results(path)
    assert [r["record_id"] for r in rows] == ["r0", "r1", "r2"]
    assert rows[0]["label"] == Label.PLANETARY.value


def test_reexport_identical_bytes(tmp_path, minicorpus_run):
    a = export_results(minicorpus_run.results, tmp_path / "a.tsv").read_bytes()
    b = export_results(minicorpus_run.results, tmp_path / "b.tsv").read_bytes()
    assert a == b


def test_export_io_failure(tmp_path):
    (tmp_path / "taken").mkdir()
    with pytest.raises(ExportError):
        export_results([], tmp_path / "taken")


def test_read_results_rejects_other_files(tmp_path):
    (tmp_path / "x.tsv").write_text("a\tb\n")
    with pytest.raises(ValueError):
        read_results(tmp_path / "x.tsv")


# ---------------------------------------------------------------- config

def test_config_relative_paths(minicorpus_dir):
    cfg = load_config(minicorpus_dir / "minicorpus.conf")
    assert cfg.corpus_dir == minicorpus_dir / "corpus"
    assert cfg.relevance_thresholds == (5, 3, 10)
    assert cfg.window_size == 129
    cfg.validate()


@pytest.mark.parametrize("overrides", [
    {"window_size": 128}, {"window_size": 0}, {"max_token_distance": 0},
    {"llm_concurrency": 0},
])
def test_config_invalid_values(overrides):
    with pytest.raises(ConfigError):
        PipelineConfig().updated(**overrides).validate(require=())


def test_config_missing_required_and_paths(tmp_path):
    with pytest.raises(ConfigError, match="gazetteer"):
        PipelineConfig().validate()
    cfg = PipelineConfig().updated(gazetteer=tmp_path / "nope.txt")
    with pytest.raises(ConfigError, match="does not exist"):
        cfg.validate(require=("gazetteer",))


def test_config_file_errors(tmp_path):
    path = tmp_path / "c.conf"
    path.write_text("bogus = 1\n")
    with pytest.raises(ConfigError, match="unknown setting"):
        load_config(path)
    path.write_text("window_size 129\n")
    with pytest.raises(ConfigError, match=":1"):
        load_config(path)
    path.write_text("relevance_thresholds = 1,2\n")
    with pytest.raises(ConfigError):
        load_config(path)


def test_config_flag_override_wins(minicorpus_dir):
    cfg = load_config(minicorpus_dir / "minicorpus.conf").updated(window_size="65")
    assert cfg.window_size == 65


def test_from_config_needs_llm(minicorpus_dir):
    cfg = load_config(minicorpus_dir / "minicorpus.conf")
    cfg.llm_stub = None
    with pytest.raises(ConfigError, match="llm"):
        Pipeline.from_config(cfg)


def test_drop_fields_cover_every_stage():
    assert {s.value for s in Stage} == set(DROP_FIELDS)

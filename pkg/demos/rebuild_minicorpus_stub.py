"""Regenerate the mini-corpus LLM stub after editing documents or answers.

The stub is keyed by prompt hash, so any change to a retained excerpt's
text, title or abstract changes its key. ``llm_answers.tsv`` holds the
human-readable answers per record; this script hashes the current prompts.
"""

from __future__ import annotations

from pathlib import Path

from surface_linker.fusion import StubLlmClient, build_prompt
from surface_linker.pipeline import Pipeline, RecordTrace, load_config

HERE = Path(__file__).resolve().parent.parent / "src" / "surface_linker" / "data" / "minicorpus"


def main() -> None:
    answers = {}
    for raw in (HERE / "llm_answers.tsv").read_text(encoding="utf-8").splitlines():
        if raw.strip() and not raw.startswith("#"):
            rid, answer = raw.split("\t")
            answers[rid] = answer
    cfg = load_config(HERE / "minicorpus.conf")
    pipe = Pipeline.from_config(cfg, llm=StubLlmClient(default="no"))
    entry = pipe.gazetteer.get("Kaiser", "Mars")
    stub = StubLlmClient()
    for rid in pipe.store.ids():
        if rid not in answers:
            continue
        record = pipe.store.get(rid)
        trace = RecordTrace(rid)
        excerpts = pipe.candidate_excerpts(record, entry, trace)
        for e, _ in pipe.filter_excerpts(excerpts, entry, trace):
            prompt = build_prompt(record.title, record.abstract, e.text(), entry.name, entry.body.name)
            stub.add(prompt, answers[rid])
    stub.save(HERE / "llm_stub.tsv")
    print(f"wrote {len(stub.answers)} canned answers")


if __name__ == "__main__":
    main()

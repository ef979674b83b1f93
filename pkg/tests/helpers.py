"""Shared builders for the pipeline, fusion and acceptance tests."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from surface_linker import _resources
from surface_linker.corpus import CorpusStore, DocumentRecord
from surface_linker.fusion import Label, LinearModel, ScoreVector, StubLlmClient
from surface_linker.gazetteer import load_gazetteer
from surface_linker.keywords import load_vocabulary
from surface_linker.pipeline import Pipeline, load_config

MARS_TEXT = ("Kaiser crater on Mars hosts a dark dune field. The crater floor is covered "
             "by dunes and gullies cut the crater rim on Mars.")


def default_gazetteer():
    return load_gazetteer(_resources.data_path("gazetteer.txt"), _resources.data_path("bodies.txt"))


def make_pipeline(records, llm=None, model=None, pairs=None, **kwargs) -> Pipeline:
    store = CorpusStore()
    for r in records:
        store.ingest(r)
    return Pipeline(default_gazetteer(), store,
                    model or LinearModel((2.0, 1.0, 2.0), -2.7),
                    llm or StubLlmClient(default="yes"),
                    load_vocabulary(), pairs=pairs, **kwargs)


def doc(rid, text, title="", **kwargs) -> DocumentRecord:
    return DocumentRecord(rid, title=title, full_text=text, **kwargs)


def minicorpus_config(minicorpus: Path, output_dir: Path | None = None):
    cfg = load_config(minicorpus / "minicorpus.conf")
    return cfg.updated(output_dir=output_dir) if output_dir else cfg


def read_oracle(path: Path) -> tuple[dict[str, str], dict[tuple[str, int], Label]]:
    """(record id -> drop stage, (record id, char start) -> label)."""
    drops, labels = {}, {}
    for raw in path.read_text(encoding="utf-8").splitlines():
        if not raw.strip() or raw.startswith("#"):
            continue
        parts = raw.split("\t")
        if len(parts) == 2:
            drops[parts[0]] = parts[1]
        else:
            labels[(parts[0], int(parts[1]))] = Label(parts[2])
    return drops, labels


def separable_points(n=40, seed=1):
    """Planetary points near (0.9, 0.8, 1), other points near (0.1, 0.2, 0)."""
    rng = np.random.default_rng(seed)
    pts = []
    for i in range(n):
        jitter = rng.uniform(-0.08, 0.08, size=2)
        if i % 2 == 0:
            pts.append((ScoreVector(0.9 + jitter[0], 0.8 + jitter[1], 1), Label.PLANETARY))
        else:
            pts.append((ScoreVector(0.1 + jitter[0], 0.2 + jitter[1], 0), Label.NON_PLANETARY))
    return pts

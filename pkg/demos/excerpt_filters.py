"""Run the false-positive filters over sentences that use a feature name in some other sense."""

from __future__ import annotations

from surface_linker import _resources
from surface_linker.corpus import CorpusStore, DocumentRecord
from surface_linker.fusion import LinearModel, StubLlmClient
from surface_linker.gazetteer import load_gazetteer
from surface_linker.keywords import load_vocabulary
from surface_linker.pipeline import Pipeline

CASES = [
    ("Kaiser", "Mars", "Kaiser crater on Mars hosts a dark dune field and gullies on Mars."),
    ("Kaiser", "Mars", "The Kaiser-Frazer sedan was parked on Mars Hill Road near Mars."),
    ("Kaiser", "Mars", "Spectra of Mars rocks were taken with a Kaiser Optical Systems Inc spectrometer."),
    ("Kaiser", "Mars", "Dune migration on Mars was reported earlier (Kaiser 2011)."),
    ("Black", "Moon", "Black indicates that a crater is fresh in these Moon images."),
    ("Alamos", "Mars", "Samples were analyzed at Los Alamos National Laboratory for Mars studies."),
    ("Qidu", "Mars", "The troughs of Qidu Fossae cut the plains of Mars."),
    ("Siddons", "Venus", "Siddons Patera erupted long ago on Venus."),
]


def main() -> None:
    gaz = load_gazetteer(_resources.data_path("gazetteer.txt"), _resources.data_path("bodies.txt"))
    for name, body, text in CASES:
        store = CorpusStore()
        store.ingest(DocumentRecord("demo", full_text=text))
        pipe = Pipeline(gaz, store, LinearModel((2.0, 1.0, 2.0), -2.7),
                        StubLlmClient(default="yes"), load_vocabulary())
        out = pipe.run(name, body)
        (trace,) = out.traces
        verdict = trace.dropped_at.value if trace.dropped_at else f"kept, {out.results[0].label.value}"
        print(f"{name:8s} {verdict:26s} {text}")


if __name__ == "__main__":
    main()

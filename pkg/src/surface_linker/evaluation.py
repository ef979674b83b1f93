"""Stage-count reports, confusion matrices and precision/recall/F1."""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Sequence

from surface_linker.fusion import Label


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise ValueError("confusion counts must be non-negative")


@dataclass(frozen=True)
class MetricsReport:
    precision: float
    recall: float
    f1: float


def _ratio(num: int, den: int) -> float:
    return num / den if den else 0.0


def metrics_from_confusion(cm: ConfusionMatrix) -> MetricsReport:
    """Zero denominators give 0 rather than NaN."""
    p = _ratio(cm.tp, cm.tp + cm.fp)
    r = _ratio(cm.tp, cm.tp + cm.fn)
    f1 = 2 * p * r / (p + r) if p + r > 0 else 0.0
    return MetricsReport(p, r, f1)


def confusion_matrix(gold: Sequence, predicted: Sequence) -> ConfusionMatrix:
    if len(gold) != len(predicted):
        raise ValueError(f"gold has {len(gold)} labels, predicted has {len(predicted)}")
    tp = fp = fn = tn = 0
    for g, p in zip(gold, predicted):
        g_pos = Label.parse(g) is Label.PLANETARY if not isinstance(g, Label) else g is Label.PLANETARY
        p_pos = Label.parse(p) is Label.PLANETARY if not isinstance(p, Label) else p is Label.PLANETARY
        if g_pos and p_pos:
            tp += 1
        elif p_pos:
            fp += 1
        elif g_pos:
            fn += 1
        else:
            tn += 1
    return ConfusionMatrix(tp, fp, fn, tn)


def confusion_and_metrics(gold: Sequence, predicted: Sequence) -> tuple[ConfusionMatrix, MetricsReport]:
    """PLANETARY is the positive class."""
    cm = confusion_matrix(gold, predicted)
    return cm, metrics_from_confusion(cm)


@dataclass(frozen=True)
class StageReport:
    initial_records: int = 0
    filtered_non_english: int = 0
    filtered_irrelevant_body: int = 0
    filtered_no_body_mention: int = 0
    filtered_phrase_pos: int = 0
    filtered_entity: int = 0
    filtered_no_regex_match: int = 0
    filtered_keyword_phrase: int = 0
    records_retained: int = 0
    excerpts_retained: int = 0
    tp: int = 0
    fp: int = 0
    fn: int = 0

    def __post_init__(self):
        for f in fields(self):
            if getattr(self, f.name) < 0:
                raise ValueError(f"{f.name} must be non-negative")

    @property
    def dropped(self) -> int:
        return sum(getattr(self, name) for name in DROP_FIELDS)

    def with_confusion(self, cm: ConfusionMatrix) -> "StageReport":
        return replace(self, tp=cm.tp, fp=cm.fp, fn=cm.fn)

    def metrics(self) -> MetricsReport:
        return metrics_from_confusion(ConfusionMatrix(self.tp, self.fp, self.fn, 0))

    def __add__(self, other: "StageReport") -> "StageReport":
        return StageReport(**{f.name: getattr(self, f.name) + getattr(other, f.name)
                              for f in fields(self)})

    def to_text(self) -> str:
        return "".join(f"{f.name}\t{getattr(self, f.name)}\n" for f in fields(self))

    @classmethod
    def from_text(cls, text: str) -> "StageReport":
        values = {}
        names = {f.name for f in fields(cls)}
        for lineno, raw in enumerate(text.splitlines(), 1):
            if not raw.strip():
                continue
            key, sep, value = raw.partition("\t")
            if not sep or key not in names:
                raise ValueError(f"line {lineno}: unknown stage-report field {key!r}")
            values[key] = int(value)
        return cls(**values)


DROP_FIELDS = (
    "filtered_non_english",
    "filtered_irrelevant_body",
    "filtered_no_body_mention",
    "filtered_phrase_pos",
    "filtered_entity",
    "filtered_no_regex_match",
    "filtered_keyword_phrase",
)

ROWS = (
    ("Initial search records returned", "initial_records"),
    ("Filtered - Non-English language", "filtered_non_english"),
    ("Filtered - Irrelevant to celestial body", "filtered_irrelevant_body"),
    ("Filtered - No mention of celestial body in full text", "filtered_no_body_mention"),
    ("Filtered - NLP techniques (phrase/POS)", "filtered_phrase_pos"),
    ("Filtered - Named entity recognition", "filtered_entity"),
    ("Filtered - Feature name not matched by regular expression", "filtered_no_regex_match"),
    ("Filtered - Feature name detected in a phrase in keywords", "filtered_keyword_phrase"),
    ("Records considered for further processing", "records_retained"),
    ("Excerpts considered for further processing", "excerpts_retained"),
    ("Feature name correctly labeled (True Positive)", "tp"),
    ("Feature name incorrectly labeled (False Positive)", "fp"),
    ("Entity incorrectly labeled (False Negative)", "fn"),
)
LABEL_WIDTH = 60
COLUMN_WIDTH = 12


def render_stage_report(*reports: StageReport, headers: Sequence[str] | None = None) -> str:
    """Fixed-width table with one column per report, metrics rows last."""
    if not reports:
        raise ValueError("need at least one report")
    for r in reports:
        if r.records_retained > r.initial_records:
            raise ValueError("records retained exceeds initial records")
    headers = list(headers) if headers is not None else (
        ["Records"] if len(reports) == 1 else [f"Run {i + 1}" for i in range(len(reports))])
    if len(headers) != len(reports):
        raise ValueError("one header per report")

    def row(label, cells):
        return label.ljust(LABEL_WIDTH) + "".join(c.rjust(COLUMN_WIDTH) for c in cells)

    lines = [row("Stage", headers), "-" * (LABEL_WIDTH + COLUMN_WIDTH * len(reports))]
    for label, name in ROWS:
        lines.append(row(label, [str(getattr(r, name)) for r in reports]))
    metrics = [r.metrics() for r in reports]
    for label, attr in (("Precision", "precision"), ("Recall", "recall"), ("F1-score", "f1")):
        lines.append(row(label, [f"{getattr(m, attr):.2f}" for m in metrics]))
    return "\n".join(lines) + "\n"


def write_stage_report(report: StageReport, path: str | Path) -> None:
    Path(path).write_text(report.to_text(), encoding="utf-8")


def read_stage_report(path: str | Path) -> StageReport:
    return StageReport.from_text(Path(path).read_text(encoding="utf-8"))

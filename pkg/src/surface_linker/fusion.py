"""Paper relevance, LLM adjudication and the linear fusion classifier."""

from __future__ import annotations

import hashlib
import logging
import math
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Mapping, Protocol, Sequence

import numpy as np
from scipy.optimize import minimize

from surface_linker.corpus import DocumentRecord
from surface_linker.gazetteer import CelestialBody
from surface_linker.keywords import ControlledVocabulary, count_vocabulary_hits, lemmatize
from surface_linker.text import find_runs, split_tokens, tokenize

logger = logging.getLogger(__name__)

PLANETARY_JOURNALS = frozenset({
    "Icarus",
    "Planetary and Space Science",
    "Journal of Geophysical Research: Planets",
    "Journal of Geophysical Research (Planets)",
    "JGR Planets",
    "The Planetary Science Journal",
    "Planetary Science Journal",
    "Meteoritics & Planetary Science",
    "Earth, Moon, and Planets",
    "Lunar and Planetary Science Conference",
    "Solar System Research",
})
ASTRONOMY_COLLECTION = "astronomy"


class Label(str, Enum):
    PLANETARY = "PLANETARY"
    NON_PLANETARY = "NON_PLANETARY"

    @classmethod
    def parse(cls, text: str) -> "Label":
        t = str(text).strip().upper().replace("-", "_")
        if t in ("PLANETARY", "1", "+1", "YES", "TRUE"):
            return cls.PLANETARY
        if t in ("NON_PLANETARY", "OTHER", "0", "-1", "NO", "FALSE"):
            return cls.NON_PLANETARY
        raise ValueError(f"unrecognized label {text!r}")


# ---------------------------------------------------------------- relevance

@dataclass(frozen=True)
class RelevanceFeatures:
    in_astro_collection: bool
    planetary_journal: bool
    body_mentions: int
    type_mentions: int
    vocab_hits: int
    thresholds: tuple[int, int, int] = (5, 3, 10)

    def __post_init__(self):
        if min(self.body_mentions, self.type_mentions, self.vocab_hits) < 0:
            raise ValueError("counts must be non-negative")
        if min(self.thresholds) < 1:
            raise ValueError("thresholds must be >= 1")

    def checks(self) -> tuple[bool, bool, bool, bool, bool]:
        body_min, type_min, vocab_min = self.thresholds
        return (self.in_astro_collection, self.planetary_journal,
                self.body_mentions >= body_min, self.type_mentions >= type_min,
                self.vocab_hits >= vocab_min)


def relevance_score(f: RelevanceFeatures, weights: Sequence[float] | None = None) -> float:
    """Weighted fraction of the five satisfied checks (equal weights by default)."""
    checks = f.checks()
    if weights is None:
        return sum(checks) / len(checks)
    if len(weights) != len(checks) or min(weights) < 0 or sum(weights) <= 0:
        raise ValueError("need five non-negative weights with a positive sum")
    return sum(w for w, ok in zip(weights, checks) if ok) / sum(weights)


def relevance_features(record: DocumentRecord, body: CelestialBody, feature_type: str,
                       vocabulary: ControlledVocabulary,
                       thresholds: tuple[int, int, int] = (5, 3, 10),
                       planetary_journals: frozenset[str] = PLANETARY_JOURNALS) -> RelevanceFeatures:
    """Derive the five paper-level signals from a record's metadata and full text."""
    ts = tokenize(record.full_text)
    surfaces = ts.surfaces
    body_mentions = sum(len(find_runs(surfaces, [s for s, _, _ in split_tokens(t)]))
                        for t in body.context_terms)
    ftype = lemmatize(feature_type)
    type_words = ftype.split()
    lemmas = [lemmatize(s) for s in surfaces]
    type_mentions = len(find_runs(lemmas, type_words))
    return RelevanceFeatures(
        in_astro_collection=ASTRONOMY_COLLECTION in {c.lower() for c in record.collections},
        planetary_journal=record.journal.strip() in planetary_journals,
        body_mentions=body_mentions,
        type_mentions=type_mentions,
        vocab_hits=count_vocabulary_hits(ts, vocabulary),
        thresholds=thresholds,
    )


# ---------------------------------------------------------------- LLM

PROMPT_TEMPLATE = (
    "Title: {title}\n"
    "Abstract: {abstract}\n"
    "Excerpt: {excerpt}\n"
    "Question: Does '{name}' here refer to a surface feature on {body}? Answer yes or no.\n"
)


class AdjudicationError(ValueError):
    """The model answered something other than yes or no."""

    def __init__(self, raw: str):
        super().__init__(f"unusable answer: {raw!r}")
        self.raw = raw


class LlmClient(Protocol):
    def ask(self, prompt: str) -> str: ...


def build_prompt(title: str, abstract: str, excerpt_text: str, name: str, body: str) -> str:
    if not name:
        raise ValueError("name must be nonempty")
    return PROMPT_TEMPLATE.format(title=title, abstract=abstract, excerpt=excerpt_text,
                                  name=name, body=body)


_ANSWER_RE = re.compile(r"^(yes|no)\b")


def parse_answer(raw: str) -> int:
    m = _ANSWER_RE.match(raw.strip().lower())
    if m is None:
        raise AdjudicationError(raw)
    return 1 if m.group(1) == "yes" else 0


def llm_score(client: LlmClient, prompt: str) -> int:
    """1 for a leading "yes", 0 for a leading "no"; anything else raises."""
    return parse_answer(client.ask(prompt))


def prompt_hash(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


class StubLlmClient:
    """Canned answers keyed by the SHA-256 of the prompt.

    Fixture file: one ``<sha256-hex>\\t<answer>`` pair per line, ``#`` comments.
    Unknown prompts get ``default``, or raise ``KeyError`` when it is None.
    """

    def __init__(self, answers: Mapping[str, str] | None = None, default: str | None = None):
        self.answers = dict(answers or {})
        self.default = default
        self.calls = 0

    @classmethod
    def from_file(cls, path: str | Path, default: str | None = None) -> "StubLlmClient":
        answers = {}
        for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            if not raw.strip() or raw.startswith("#"):
                continue
            key, sep, answer = raw.partition("\t")
            if not sep:
                raise ValueError(f"{path}:{lineno}: expected '<hash>\\t<answer>'")
            answers[key.strip()] = answer
        return cls(answers, default)

    def add(self, prompt: str, answer: str) -> None:
        self.answers[prompt_hash(prompt)] = answer

    def save(self, path: str | Path) -> None:
        lines = [f"{k}\t{v}" for k, v in sorted(self.answers.items())]
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    def ask(self, prompt: str) -> str:
        self.calls += 1
        key = prompt_hash(prompt)
        if key in self.answers:
            return self.answers[key]
        if self.default is None:
            raise KeyError(f"no canned answer for prompt {key[:12]}")
        return self.default


# ---------------------------------------------------------------- classifier

@dataclass(frozen=True)
class ScoreVector:
    kg: float
    relevance: float
    llm: int

    def __post_init__(self):
        if not (0.0 <= self.kg <= 1.0 and 0.0 <= self.relevance <= 1.0):
            raise ValueError("kg and relevance must lie in [0, 1]")
        if self.llm not in (0, 1):
            raise ValueError("llm must be 0 or 1")

    def as_array(self) -> np.ndarray:
        return np.array([self.kg, self.relevance, float(self.llm)])


@dataclass(frozen=True)
class LabeledResult:
    label: Label
    confidence: float

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError("confidence must be in [0, 1]")


@dataclass(frozen=True)
class TrainingConfig:
    lam: float = 1e-3
    epochs: int = 200
    seed: int = 0
    learning_rate: float = 1.0


@dataclass(frozen=True)
class LinearModel:
    weights: tuple[float, float, float]
    bias: float
    scale: float = 1.0
    offset: float = 0.0
    loss_history: tuple[float, ...] = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        values = (*self.weights, self.bias, self.scale, self.offset)
        if len(self.weights) != 3 or not all(math.isfinite(v) for v in values):
            raise ValueError("model needs three finite weights and finite bias/calibration")

    def margin(self, s: ScoreVector) -> float:
        return float(np.dot(self.weights, s.as_array()) + self.bias)

    def rescaled(self, factor: float) -> "LinearModel":
        return LinearModel(tuple(w * factor for w in self.weights), self.bias * factor,
                           self.scale, self.offset)


class TrainingError(ValueError):
    pass


def hinge_objective(w: np.ndarray, b: float, X: np.ndarray, y: np.ndarray, lam: float) -> float:
    margins = y * (X @ w + b)
    return 0.5 * lam * float(w @ w) + float(np.mean(np.maximum(0.0, 1.0 - margins)))


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def fit_calibration(margins: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Platt scaling with smoothed targets; returns (scale, offset)."""
    n_pos = int(np.sum(y > 0))
    n_neg = len(y) - n_pos
    t = np.where(y > 0, (n_pos + 1.0) / (n_pos + 2.0), 1.0 / (n_neg + 2.0))

    def nll(params):
        a, c = params
        z = a * margins + c
        # log(1 + e^z) - t z, stable
        return float(np.sum(np.logaddexp(0.0, z) - t * z))

    def grad(params):
        a, c = params
        r = _sigmoid(a * margins + c) - t
        return np.array([np.sum(r * margins), np.sum(r)])

    prior = math.log((n_pos + 1.0) / (n_neg + 1.0))
    res = minimize(nll, x0=np.array([1.0, prior]), jac=grad, method="BFGS")
    scale, offset = (float(v) for v in res.x)
    if not (math.isfinite(scale) and math.isfinite(offset)):
        return 1.0, prior
    return scale, offset


def train_classifier(points: Sequence[tuple[ScoreVector, Label]],
                     config: TrainingConfig = TrainingConfig()) -> LinearModel:
    """Linear SVM by full-batch subgradient descent on the L2-regularized hinge loss.

    Each epoch takes a step of ``learning_rate / sqrt(epoch + 1)``, halved
    until the objective does not increase, so the recorded loss history is
    non-increasing. A Platt fit on the training margins sets the calibration.
    """
    labels = {lab for _, lab in points}
    if labels != {Label.PLANETARY, Label.NON_PLANETARY}:
        raise TrainingError("training needs at least one point of each class")
    X = np.array([s.as_array() for s, _ in points])
    y = np.array([1.0 if lab is Label.PLANETARY else -1.0 for _, lab in points])
    rng = np.random.default_rng(config.seed)
    w = rng.normal(0.0, 0.01, size=3)
    b = 0.0
    loss = hinge_objective(w, b, X, y, config.lam)
    history = [loss]
    for epoch in range(config.epochs):
        active = y * (X @ w + b) < 1.0
        gw = config.lam * w - (y[active, None] * X[active]).sum(axis=0) / len(y)
        gb = -y[active].sum() / len(y)
        step = config.learning_rate / math.sqrt(epoch + 1)
        for _ in range(40):
            w_new, b_new = w - step * gw, b - step * gb
            new_loss = hinge_objective(w_new, b_new, X, y, config.lam)
            if new_loss <= loss:
                w, b, loss = w_new, b_new, new_loss
                break
            step *= 0.5
        history.append(loss)
    scale, offset = fit_calibration(X @ w + b, y)
    logger.debug("trained fusion model w=%s b=%.4f loss=%.5f", w, b, loss)
    return LinearModel(tuple(w), float(b), scale, offset, tuple(history))


def predict_label(m: LinearModel, s: ScoreVector) -> LabeledResult:
    """Sign of the margin picks the label (zero counts as planetary)."""
    margin = m.margin(s)
    p = float(_sigmoid(m.scale * margin + m.offset))
    p = min(1.0, max(0.0, p))
    if margin >= 0:
        return LabeledResult(Label.PLANETARY, p)
    return LabeledResult(Label.NON_PLANETARY, 1.0 - p)


def accuracy(m: LinearModel, points: Sequence[tuple[ScoreVector, Label]]) -> float:
    if not points:
        return 0.0
    return sum(predict_label(m, s).label is lab for s, lab in points) / len(points)


def save_model(m: LinearModel, path: str | Path) -> None:
    values = (*m.weights, m.bias, m.scale, m.offset)
    Path(path).write_text(" ".join(repr(float(v)) for v in values) + "\n", encoding="utf-8")


def load_model(path: str | Path) -> LinearModel:
    parts = Path(path).read_text(encoding="utf-8").split()
    if len(parts) != 6:
        raise ValueError(f"{path}: expected 'w1 w2 w3 b scale offset'")
    v = [float(p) for p in parts]
    return LinearModel((v[0], v[1], v[2]), v[3], v[4], v[5])


def load_training_points(path: str | Path) -> list[tuple[ScoreVector, Label]]:
    points = []
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        parts = raw.split()
        if len(parts) != 4:
            raise ValueError(f"{path}:{lineno}: expected 'kg relevance llm gold_label'")
        kg, rel, llm, gold = parts
        points.append((ScoreVector(float(kg), float(rel), int(llm)), Label.parse(gold)))
    return points


def save_training_points(points: Sequence[tuple[ScoreVector, Label]], path: str | Path) -> None:
    lines = [f"{s.kg!r} {s.relevance!r} {s.llm} {lab.value}" for s, lab in points]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def synthetic_training_points(n: int = 2000, seed: int = 0,
                              positive_rate: float = 0.85) -> list[tuple[ScoreVector, Label]]:
    """Desk-scale stand-in for a verified training set.

    Planetary mentions lean towards high graph scores, relevant papers and
    a "yes" from the LLM; other mentions lean the opposite way, with noise
    on every signal.
    """
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        planetary = rng.random() < positive_rate
        if planetary:
            kg = rng.beta(5, 2)
            rel = rng.choice([0.2, 0.4, 0.6, 0.8, 1.0], p=[0.05, 0.1, 0.2, 0.3, 0.35])
            llm = int(rng.random() < 0.9)
        else:
            kg = rng.beta(2, 5)
            rel = rng.choice([0.0, 0.2, 0.4, 0.6, 0.8], p=[0.25, 0.3, 0.2, 0.15, 0.1])
            llm = int(rng.random() < 0.15)
        out.append((ScoreVector(float(kg), float(rel), llm),
                    Label.PLANETARY if planetary else Label.NON_PLANETARY))
    return out

"""Build disambiguation graphs from hand-labeled excerpts.

Label files hold one excerpt per line::

    feature_name<TAB>body<TAB>label<TAB>text[<TAB>target_feature]

``label`` is ``planetary`` or ``other``. With ``target_feature`` the line
describes a different feature of the same type (say, a neighbouring crater)
and is counted into the target's graphs through their shared type.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from surface_linker.entities import EntityTagger
from surface_linker.excerpts import extract_window, find_name_matches
from surface_linker.fusion import Label
from surface_linker.gazetteer import Gazetteer
from surface_linker.graph import OTHER, PLANETARY, DisambiguationGraphPair, add_observation
from surface_linker.keywords import ControlledVocabulary, harvest_keywords
from surface_linker.text import tokenize


@dataclass(frozen=True)
class LabeledExcerpt:
    feature_name: str
    body: str
    label: Label
    text: str
    target_feature: str | None = None


def read_labeled_excerpts(path: str | Path) -> list[LabeledExcerpt]:
    rows = []
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not raw.strip() or raw.startswith("#"):
            continue
        parts = raw.split("\t")
        if len(parts) not in (4, 5):
            raise ValueError(f"{path}:{lineno}: expected 4 or 5 tab-separated fields")
        target = parts[4].strip() if len(parts) == 5 and parts[4].strip() else None
        rows.append(LabeledExcerpt(parts[0], parts[1], Label.parse(parts[2]), parts[3], target))
    return rows


def train_graphs(rows: Iterable[LabeledExcerpt], gazetteer: Gazetteer, tagger: EntityTagger,
                 vocabulary: ControlledVocabulary, window_size: int = 129
                 ) -> dict[tuple[str, str], DisambiguationGraphPair]:
    """One graph pair per target (feature, body), keywords taken from each excerpt's window."""
    pairs: dict[tuple[str, str], DisambiguationGraphPair] = {}
    for row in rows:
        entry = gazetteer.get(row.feature_name, row.body)
        if entry is None:
            raise LookupError(f"gazetteer has no entry ({row.feature_name!r}, {row.body!r})")
        target = gazetteer.get(row.target_feature, row.body) if row.target_feature else entry
        if target is None:
            raise LookupError(f"gazetteer has no entry ({row.target_feature!r}, {row.body!r})")
        ts = tokenize(row.text)
        matches = find_name_matches(ts, row.feature_name)
        if not matches:
            raise ValueError(f"labeled text never mentions {row.feature_name!r}")
        window = extract_window(ts, matches[0], row.feature_name, size=window_size).window
        keywords = harvest_keywords(window, tagger, vocabulary, exclude=entry.name).keywords
        pair = pairs.setdefault(target.key, DisambiguationGraphPair(
            target.name, target.body.name, target.ftype.name))
        label = PLANETARY if row.label is Label.PLANETARY else OTHER
        if target is entry:
            add_observation(pair, keywords, label)
        else:
            add_observation(pair, keywords, label, source_feature=entry.name,
                            source_type=entry.ftype.name)
    return pairs

"""Candidate excerpts: body-context tallies, mention matching, windows and filters."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from surface_linker.gazetteer import CelestialBody, FeatureEntry, Gazetteer
from surface_linker.text import Pos, TokenStream, find_runs, split_tokens

WINDOW_SIZE = 129

# Nomenclature descriptor terms. A capitalized one right after a mention
# turns it into the name of a different feature ("Qidu Fossae").
DESCRIPTOR_TERMS = frozenset("""
    Catena Catenae Cavi Cavus Chaos Chasma Chasmata Colles Corona Coronae Dorsa
    Dorsum Fluctus Fossa Fossae Fretum Insula Insulae Labyrinthus Lacus Linea
    Lineae Mare Maria Mensa Mensae Mons Montes Palus Patera Paterae Planitia
    Planum Plana Promontorium Regio Rima Rimae Rupes Scopuli Scopulus Sinus
    Sulci Sulcus Terra Terrae Tholi Tholus Undae Vallis Valles Vastitas
""".split())

CORPORATE_SUFFIXES = frozenset({"Inc", "Corp", "Corporation", "Ltd", "LLC", "GmbH", "Co", "Company", "Incorporated"})


@dataclass(frozen=True)
class BodyContextProfile:
    counts: Mapping[str, int]
    probabilities: Mapping[str, float]

    @property
    def n_bodies(self) -> int:
        return len(self.counts)

    @property
    def total(self) -> int:
        return sum(self.counts.values())


def body_context_probability(ts: TokenStream, bodies: Sequence[CelestialBody]) -> BodyContextProfile:
    """Relative frequency of each body's context terms among ``ts``.

    With no context terms at all every body gets 1/N.
    """
    if not bodies:
        raise ValueError("need at least one body")
    surfaces = ts.surfaces
    counts = {}
    for body in bodies:
        counts[body.name] = sum(
            len(find_runs(surfaces, [s for s, _, _ in split_tokens(term)]))
            for term in body.context_terms)
    total = sum(counts.values())
    n = len(counts)
    if total == 0:
        probs = {b: 1.0 / n for b in counts}
    else:
        probs = {b: c / total for b, c in counts.items()}
    return BodyContextProfile(counts, probs)


def retain_by_threshold(profile: BodyContextProfile, target_body: str) -> bool:
    """Keep when the target's probability is at least 1/N."""
    if target_body not in profile.probabilities:
        raise KeyError(f"{target_body!r} not in profile")
    return profile.probabilities[target_body] >= 1.0 / profile.n_bodies


def name_tokens(name: str) -> list[str]:
    return [s for s, _, _ in split_tokens(name)]


def find_name_matches(ts: TokenStream, name: str) -> list[int]:
    """Token indices where ``name`` starts as a whole-word, case-sensitive run.

    Hyphen compounds are single tokens, so "Kaiser-Frazer" never matches "Kaiser".
    """
    words = name_tokens(name)
    if not words:
        raise ValueError("name must be nonempty")
    return find_runs(ts.surfaces, words)


@dataclass(frozen=True)
class Excerpt:
    record_id: str
    feature_name: str
    body: str
    window: TokenStream
    center_index: int
    provenance: tuple[int, int]
    window_start: int = 0

    def __post_init__(self):
        if len(self.window) > WINDOW_SIZE:
            raise ValueError(f"window longer than {WINDOW_SIZE} tokens")
        words = name_tokens(self.feature_name)
        got = self.window.surfaces[self.center_index:self.center_index + len(words)]
        if got[:1] != words[:1]:
            raise ValueError(f"window token {self.center_index} does not start {self.feature_name!r}")

    @property
    def mention_length(self) -> int:
        return len(name_tokens(self.feature_name))

    @property
    def mention_span(self) -> range:
        return range(self.center_index, self.center_index + self.mention_length)

    @property
    def mention_pos(self) -> Pos:
        return self.window[self.center_index].pos

    def text(self) -> str:
        return self.window.text()


def extract_window(ts: TokenStream, match_index: int, feature_name: str | None = None,
                   record_id: str = "", body: str = "", size: int = WINDOW_SIZE) -> Excerpt:
    """Up to ``size // 2`` tokens either side of the mention's first token.

    Windows are truncated at the document edges, never shifted.
    """
    if not 0 <= match_index < len(ts):
        raise IndexError(f"match index {match_index} outside stream of {len(ts)} tokens")
    if size < 1 or size % 2 == 0:
        raise ValueError("window size must be odd and positive")
    if feature_name is None:
        feature_name = ts[match_index].surface
    half = size // 2
    start = max(0, match_index - half)
    end = min(len(ts), match_index + half + 1)
    n_words = len(name_tokens(feature_name))
    last = min(match_index + n_words, len(ts)) - 1
    return Excerpt(
        record_id=record_id,
        feature_name=feature_name,
        body=body,
        window=ts[start:end],
        center_index=match_index - start,
        provenance=(ts[match_index].char_start, ts[last].char_end),
        window_start=start,
    )


def adjective_filter(e: Excerpt) -> bool:
    """False (drop) when the mention is tagged as an adjective."""
    return e.mention_pos is not Pos.ADJ


def _phrase_covers_mention(e: Excerpt, phrase: str) -> bool:
    words = name_tokens(phrase)
    mention = e.mention_span
    for start in find_runs(e.window.surfaces, words):
        if start <= mention.start and mention.stop <= start + len(words):
            return True
    return False


def _followed_by_other_feature(e: Excerpt, gazetteer: Gazetteer | None) -> bool:
    nxt = e.mention_span.stop
    if nxt >= len(e.window):
        return False
    word = e.window[nxt].surface
    if not word[:1].isupper():
        return False
    if word in DESCRIPTOR_TERMS:
        return True
    return gazetteer is not None and bool(gazetteer.lookup(f"{e.feature_name} {word}"))


def _inside_company_name(e: Excerpt, lookahead: int = 4) -> bool:
    i = e.mention_span.stop
    stop = min(len(e.window), i + lookahead)
    while i < stop:
        tok = e.window[i].surface
        if tok in CORPORATE_SUFFIXES:
            return True
        if not tok[:1].isupper():
            return False
        i += 1
    return False


def containment_filter(e: Excerpt, entry: FeatureEntry, gazetteer: Gazetteer | None = None) -> bool:
    """False (drop) when the mention is part of a larger expression.

    Covers the entry's blocklist phrases, a following capitalized descriptor
    or a different gazetteer entry ("Siddons Patera"), and company names
    ending in a corporate suffix ("Kaiser Optical Systems Inc").
    """
    if any(_phrase_covers_mention(e, p) for p in entry.containment_blocklist):
        return False
    if _followed_by_other_feature(e, gazetteer):
        return False
    if _inside_company_name(e):
        return False
    return True

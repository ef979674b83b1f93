"""Entity-type filtering of candidate mentions.

The default tagger is rule based. Any object with a ``tag(window)`` method
returning non-overlapping :class:`EntitySpan` objects can replace it, in or
out of process (see :class:`WireEntityTagger`).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, Protocol, Sequence

from surface_linker import _resources
from surface_linker.excerpts import DESCRIPTOR_TERMS, Excerpt
from surface_linker.text import Pos, TokenStream, find_runs, split_tokens


class EntityCategory(str, Enum):
    CELESTIAL_OBJECT = "CELESTIAL_OBJECT"
    CELESTIAL_REGION = "CELESTIAL_REGION"
    CITATION = "CITATION"
    PERSON = "PERSON"
    GRANT = "GRANT"
    FELLOWSHIP = "FELLOWSHIP"
    LOCATION = "LOCATION"
    TELESCOPE = "TELESCOPE"
    MISSION = "MISSION"
    MODEL = "MODEL"
    ORGANIZATION = "ORGANIZATION"
    UNKNOWN = "UNKNOWN"


KEEP_CATEGORIES = frozenset({
    EntityCategory.CELESTIAL_OBJECT, EntityCategory.CELESTIAL_REGION, EntityCategory.UNKNOWN})


class SpanContractError(ValueError):
    """A tagger returned spans that overlap or fall outside the window."""


@dataclass(frozen=True)
class EntitySpan:
    token_start: int
    token_end: int  # inclusive
    category: EntityCategory
    confidence: float = 1.0

    def __post_init__(self):
        if self.token_start > self.token_end or self.token_start < 0:
            raise ValueError(f"bad span bounds {self.token_start}..{self.token_end}")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError("confidence must be in [0, 1]")
        object.__setattr__(self, "category", EntityCategory(self.category))

    def covers(self, i: int) -> bool:
        return self.token_start <= i <= self.token_end


class EntityTagger(Protocol):
    def tag(self, window: TokenStream) -> list[EntitySpan]: ...


def check_spans(spans: Sequence[EntitySpan], length: int | None = None) -> None:
    ordered = sorted(spans, key=lambda s: s.token_start)
    for a, b in zip(ordered, ordered[1:]):
        if b.token_start <= a.token_end:
            raise SpanContractError(f"overlapping spans {a} and {b}")
    if length is not None and ordered and ordered[-1].token_end >= length:
        raise SpanContractError("span extends past the window")


def spans_to_wire(spans: Iterable[EntitySpan]) -> list[dict]:
    return [{"start": s.token_start, "end": s.token_end, "category": s.category.value,
             "confidence": s.confidence} for s in spans]


def spans_from_wire(payload: Iterable[dict]) -> list[EntitySpan]:
    try:
        return [EntitySpan(int(d["start"]), int(d["end"]), EntityCategory(d["category"]),
                           float(d.get("confidence", 1.0))) for d in payload]
    except (KeyError, ValueError) as exc:
        raise SpanContractError(f"malformed span payload: {exc}") from exc


class WireEntityTagger:
    """Adapter for an out-of-process tagger.

    ``transport`` receives the window tokens as a list of strings and returns
    ``[{"start", "end", "category", "confidence"}]``.
    """

    def __init__(self, transport: Callable[[list[str]], list[dict]]):
        self.transport = transport

    def tag(self, window: TokenStream) -> list[EntitySpan]:
        spans = spans_from_wire(self.transport(window.surfaces))
        check_spans(spans, len(window))
        return spans


_YEAR_RE = re.compile(r"^(1[6-9]|20)\d\d[a-z]?$")
_INITIAL_RE = re.compile(r"^[A-Z]$")

HONORIFICS = frozenset({"Dr", "Prof", "Professor", "Mr", "Mrs", "Ms", "Sir", "Dame"})
CITATION_CONNECTORS = frozenset({"et", "al", ".", ",", "&", "and"})
FELLOWSHIP_CUES = frozenset({"Fellowship", "Fellowships", "Fellow", "Scholarship"})
GRANT_CUES = frozenset({"Grant", "Grants", "grant", "grants", "Award", "Prize"})
TELESCOPE_CUES = frozenset({"Telescope", "Telescopes", "telescope", "Observatory",
                            "observatory", "Array", "Interferometer"})
MISSION_CUES = frozenset({"Mission", "mission", "missions", "Spacecraft", "spacecraft",
                          "Probe", "probe", "Program", "program", "Lander", "lander",
                          "astronaut", "astronauts", "Landing", "landing", "samples"})
MODEL_CUES = frozenset("""
    model models equation equations theorem theorems law laws theory function functions
    formula number numbers sphere spheres radius radii problem determinant stability
    criterion criteria plot diameter parameters angles integration method methods series
    projection projections fraction polynomial identity characteristic circuit path
    shading reflectance scattering buckling approximation scheme integral transform
    distribution diagram
""".split())
ORGANIZATION_CUES = frozenset({"University", "Institute", "Laboratory", "Laboratories",
                               "Foundation", "Inc", "Corp", "Corporation", "Ltd", "LLC",
                               "Company", "Agency", "Society", "Center", "Centre",
                               "Department", "College", "Systems"})
ORG_CONNECTORS = frozenset({"of", "for", "and", "&"})
LOCATION_LINKS = frozenset({",", "in"})
LOCATION_PREPOSITIONS = frozenset({"in", "at", "near", "from"})

DEFAULT_CELESTIAL_OBJECTS = frozenset(_resources.default_body_terms()) | frozenset({
    "Earth", "Sun", "Jupiter", "Saturn", "Uranus", "Neptune", "Pluto", "Charon"})
DEFAULT_CELESTIAL_REGIONS = frozenset("""
    Arabia Hellas Argyre Isidis Tharsis Elysium Utopia Amazonis Chryse Xanthe Syrtis
    Noachis Acidalia Arcadia Tempe Syria Aeolis Meridiani Procellarum
""".split())


def _is_cap(tok: str) -> bool:
    return tok[:1].isupper()


class RuleEntityTagger:
    """Deterministic cue-word tagger.

    Rules in priority order; a token claimed by an earlier rule is not
    re-tagged. Capitalized runs nobody claims become UNKNOWN spans.

    1. citations: "(Name [et al.][,] Year)", "Name et al.", "Name (Year)"
    2. people: honorific or initials before a capitalized run
    3. fellowships / grants / telescopes / missions / models: a capitalized
       run (possessive allowed) directly before a cue word
    4. organizations: a capitalized run containing an institutional cue word
    5. locations: "City, Region" / "City in Region", or a region after a
       locative preposition
    6. celestial objects and regions from lexicons, plus "<Name> <Descriptor>"
    """

    def __init__(self, cities: Iterable[str] | None = None, regions: Iterable[str] | None = None,
                 celestial_objects: Iterable[str] | None = None,
                 celestial_regions: Iterable[str] | None = None):
        default_cities, default_regions = _resources.places()
        self.cities = [self._words(c) for c in sorted(cities if cities is not None else default_cities)]
        self.regions = [self._words(r) for r in sorted(regions if regions is not None else default_regions)]
        self.celestial_objects = [self._words(c) for c in sorted(
            celestial_objects if celestial_objects is not None else DEFAULT_CELESTIAL_OBJECTS)]
        self.celestial_regions = [self._words(c) for c in sorted(
            celestial_regions if celestial_regions is not None else DEFAULT_CELESTIAL_REGIONS)]

    @staticmethod
    def _words(phrase: str) -> list[str]:
        return [s for s, _, _ in split_tokens(phrase)]

    def tag(self, window: TokenStream) -> list[EntitySpan]:
        toks = window.surfaces
        taken = [False] * len(toks)
        spans: list[EntitySpan] = []

        def claim(start, end, category, confidence=1.0):
            if start < 0 or end >= len(toks) or start > end:
                return False
            if any(taken[start:end + 1]):
                return False
            for k in range(start, end + 1):
                taken[k] = True
            spans.append(EntitySpan(start, end, category, confidence))
            return True

        self._citations(toks, claim)
        self._people(toks, claim)
        for cues, category in ((FELLOWSHIP_CUES, EntityCategory.FELLOWSHIP),
                               (GRANT_CUES, EntityCategory.GRANT),
                               (TELESCOPE_CUES, EntityCategory.TELESCOPE),
                               (MISSION_CUES, EntityCategory.MISSION),
                               (MODEL_CUES, EntityCategory.MODEL)):
            self._cue_before(toks, [t.pos for t in window], cues, category, claim)
        self._organizations(toks, claim)
        self._locations(toks, claim)
        self._lexicon(toks, self.celestial_objects, EntityCategory.CELESTIAL_OBJECT, claim)
        self._descriptor_regions(toks, claim)
        self._lexicon(toks, self.celestial_regions, EntityCategory.CELESTIAL_REGION, claim)

        i = 0
        while i < len(toks):
            if not taken[i] and window[i].pos is Pos.PROPN:
                j = i
                while j + 1 < len(toks) and not taken[j + 1] and window[j + 1].pos is Pos.PROPN:
                    j += 1
                claim(i, j, EntityCategory.UNKNOWN, 0.0)
                i = j + 1
            else:
                i += 1
        return sorted(spans, key=lambda s: s.token_start)

    @staticmethod
    def _citations(toks, claim):
        n = len(toks)
        depth_open = None
        for i, t in enumerate(toks):
            if t == "(":
                depth_open = i
            elif t == ")":
                depth_open = None
            if not _is_cap(t) or not t[0].isalpha():
                continue
            # Name et al.
            if i + 2 < n and toks[i + 1] == "et" and toks[i + 2] == "al":
                end = i + 3 if i + 3 < n and toks[i + 3] == "." else i + 2
                claim(i, end, EntityCategory.CITATION)
                continue
            # Name (Year)
            if i + 3 < n and toks[i + 1] == "(" and _YEAR_RE.match(toks[i + 2]) and toks[i + 3] == ")":
                claim(i, i + 3, EntityCategory.CITATION)
                continue
            # (Name [and Other][,] Year)
            if depth_open is not None:
                j = i + 1
                while j < n and j - i <= 8 and (toks[j] in CITATION_CONNECTORS
                                                or (_is_cap(toks[j]) and toks[j][0].isalpha())):
                    j += 1
                if j < n and _YEAR_RE.match(toks[j]):
                    claim(i, j, EntityCategory.CITATION)

    @staticmethod
    def _people(toks, claim):
        n = len(toks)
        for i, t in enumerate(toks):
            if t in HONORIFICS or (_INITIAL_RE.match(t) and i + 1 < n and toks[i + 1] == "."):
                j = i + 1
                while j < n and (toks[j] == "." or _INITIAL_RE.match(toks[j])):
                    j += 1
                end = j
                while end < n and _is_cap(toks[end]) and toks[end][0].isalpha():
                    end += 1
                if end > j:
                    claim(i, end - 1, EntityCategory.PERSON)

    @staticmethod
    def _cue_before(toks, pos, cues, category, claim):
        # a run of proper nouns (possessive or mission numbers allowed) ending at the cue
        for c, t in enumerate(toks):
            if t not in cues:
                continue
            start = c
            k = c - 1
            while k >= 0 and c - k <= 5 and (
                    pos[k] is Pos.PROPN or toks[k] in ("'s", "’s")
                    or (category is EntityCategory.MISSION and toks[k].isdigit())):
                start = k
                k -= 1
            while start < c and pos[start] is not Pos.PROPN:
                start += 1
            if start < c:
                claim(start, c, category)

    @staticmethod
    def _organizations(toks, claim):
        n = len(toks)
        for c, t in enumerate(toks):
            if t not in ORGANIZATION_CUES:
                continue
            start = c
            while start - 1 >= 0 and (_is_cap(toks[start - 1]) or
                                      (toks[start - 1] in ORG_CONNECTORS and start - 2 >= 0
                                       and _is_cap(toks[start - 2]))):
                start -= 1
            end = c
            while end + 1 < n and (_is_cap(toks[end + 1]) or
                                   (toks[end + 1] in ORG_CONNECTORS and end + 2 < n
                                    and _is_cap(toks[end + 2]))):
                end += 1
            claim(start, end, EntityCategory.ORGANIZATION)

    def _locations(self, toks, claim):
        n = len(toks)
        for city in self.cities:
            for s in find_runs(toks, city):
                e = s + len(city) - 1
                if e + 1 < n and toks[e + 1] in LOCATION_LINKS:
                    for region in self.regions:
                        if toks[e + 2:e + 2 + len(region)] == region:
                            claim(s, e + 1 + len(region), EntityCategory.LOCATION)
                            break
        for region in self.regions:
            for s in find_runs(toks, region):
                e = s + len(region) - 1
                followed_by_name = e + 1 < n and _is_cap(toks[e + 1])
                if s > 0 and toks[s - 1] in LOCATION_PREPOSITIONS and not followed_by_name:
                    claim(s, e, EntityCategory.LOCATION)

    @staticmethod
    def _lexicon(toks, lexicon, category, claim):
        for words in lexicon:
            for s in find_runs(toks, words):
                claim(s, s + len(words) - 1, category)

    @staticmethod
    def _descriptor_regions(toks, claim):
        for i in range(1, len(toks)):
            if toks[i] in DESCRIPTOR_TERMS and _is_cap(toks[i - 1]) and toks[i - 1][0].isalpha():
                claim(i - 1, i, EntityCategory.CELESTIAL_REGION)


_DEFAULT_TAGGER: RuleEntityTagger | None = None


def default_tagger() -> RuleEntityTagger:
    global _DEFAULT_TAGGER
    if _DEFAULT_TAGGER is None:
        _DEFAULT_TAGGER = RuleEntityTagger()
    return _DEFAULT_TAGGER


def tag_entities_rule_based(window: TokenStream) -> list[EntitySpan]:
    return default_tagger().tag(window)


def decide_keep(e: Excerpt, spans: Sequence[EntitySpan]) -> tuple[bool, EntityCategory | None]:
    """Keep unless the span over the mention has a non-surface category.

    Returns ``(keep, category)`` where category is that of the covering span,
    or None when nothing covers the mention.
    """
    check_spans(spans)
    mention = e.mention_span
    covering = [s for s in spans
                if s.token_start < mention.stop and s.token_end >= mention.start]
    if not covering:
        return True, None
    category = min(covering, key=lambda s: s.token_start).category
    return category in KEEP_CATEGORIES, category

"""Deterministic tokenizer and rule-based part-of-speech tagger.

Tokens are split on whitespace and punctuation. Hyphen-joined compounds
("Kaiser-Frazer", "bright-rim") stay a single token and a possessive
``'s`` is split off as its own token. Each token carries one tag from
``{NOUN, PROPN, ADJ, VERB, OTHER}``; see :func:`tag_word` for the rules.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Sequence

from surface_linker import _resources


class Pos(str, Enum):
    NOUN = "NOUN"
    PROPN = "PROPN"
    ADJ = "ADJ"
    VERB = "VERB"
    OTHER = "OTHER"


@dataclass(frozen=True)
class Token:
    surface: str
    pos: Pos
    char_start: int
    char_end: int

    @property
    def is_word(self) -> bool:
        return _is_word(self.surface)


@dataclass(frozen=True)
class TokenStream:
    """Ordered tokens with strictly increasing, non-overlapping offsets."""

    tokens: tuple[Token, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        prev_end = -1
        for t in self.tokens:
            if t.char_start < prev_end or t.char_end <= t.char_start:
                raise ValueError(f"token offsets out of order at {t!r}")
            prev_end = t.char_end

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self) -> Iterator[Token]:
        return iter(self.tokens)

    def __getitem__(self, item):
        if isinstance(item, slice):
            return TokenStream(self.tokens[item])
        return self.tokens[item]

    @property
    def surfaces(self) -> list[str]:
        return [t.surface for t in self.tokens]

    def text(self) -> str:
        return " ".join(self.surfaces)


_TOKEN_RE = re.compile(
    r"""
      [’']s\b                              # possessive clitic
    | \d+(?:[.,]\d+)*[^\W\d_]*             # numbers, incl. 11.8E and 1,000
    | [^\W\d_]\w*(?:[-‐]\w+)*              # words and hyphen compounds
    | [^\w\s]                              # any other single symbol
    """,
    re.VERBOSE,
)
_WORD_RE = re.compile(r"[^\W\d_]")
SENTENCE_END = frozenset({".", "!", "?", ":", ";"})


def _is_word(surface: str) -> bool:
    return bool(_WORD_RE.match(surface))


def split_tokens(text: str) -> list[tuple[str, int, int]]:
    """Surface tokens with character offsets, no tagging."""
    return [(m.group(), m.start(), m.end()) for m in _TOKEN_RE.finditer(text)]


CLOSED_CLASS = frozenset(_resources.stopwords()) | frozenset("""
    across along amid around behind beside besides beyond inside near onto outside
    toward towards unlike whereas whilst et al e g ie eg one two three four five six
    seven eight nine ten neither every another something nothing anything
""".split())

ADJECTIVES = frozenset("""
    black white green red blue gray grey brown yellow orange dark light bright pale
    large small big huge tiny giant little great long short wide narrow deep shallow
    high low tall broad thin thick north south east west northern southern eastern
    western northeast northwest southeast southwest upper lower central inner outer
    fresh old young new ancient smooth rough flat steep prominent fine partial
    complete similar different lunar martian solar planetary terrestrial global
    regional local recent early late main major minor prior possible likely
""".split())

VERBS = frozenset("""
    is are was were be been being am has have had do does did can could may might
    must shall should will would indicate indicates mean means show shows shown
    see seen suggest suggests appear appears correspond corresponds erode erodes
    form forms lie lies contain contains extend extends reveal reveals provide
    provides occur occurs exhibit exhibits make makes made find finds found
    become becomes give gives given take takes taken lead leads led cut cuts
    run runs seem seems remain remains include includes represent represents
    erupt erupts get gets got say says said use uses know known
""".split())

# -al / -ic words that are nouns in this register.
_NOUN_EXCEPTIONS = frozenset("""
    interval material signal crystal mineral animal metal journal total proposal
    arrival removal rival terminal topic logic basic critic
""".split())

_ADJ_SUFFIXES = ("ous", "ive", "ful", "less", "able", "ible")
_ADJ_SUFFIXES_LONG = ("al", "ic", "ical")


def _lowercase_rules(lower: str) -> Pos | None:
    if lower in CLOSED_CLASS:
        return Pos.OTHER
    if lower in ADJECTIVES:
        return Pos.ADJ
    if lower in VERBS:
        return Pos.VERB
    if len(lower) > 4 and lower.endswith("ly"):
        return Pos.OTHER
    if len(lower) > 4 and lower.endswith(("ing", "ed")):
        return Pos.VERB
    if lower in _NOUN_EXCEPTIONS:
        return Pos.NOUN
    if lower.endswith(_ADJ_SUFFIXES) and len(lower) > 5:
        return Pos.ADJ
    if lower.endswith(_ADJ_SUFFIXES_LONG) and len(lower) > 5:
        return Pos.ADJ
    return None


def tag_word(surface: str, sentence_initial: bool) -> Pos:
    """Tag one token.

    Rules, first hit wins:

    * non-words (numbers, punctuation, ``'s``) are OTHER;
    * closed-class words (determiners, prepositions, pronouns, ...) are OTHER;
    * a capitalized word not at a sentence start is PROPN;
    * a capitalized sentence-initial word is tagged by the lowercase rules
      below when one applies (so "Black indicates ..." gives ADJ), else PROPN;
    * lowercase words: color/size/direction lexicon -> ADJ, verb lexicon ->
      VERB, ``-ly`` -> OTHER, ``-ing``/``-ed`` -> VERB, adjective suffixes
      -> ADJ, anything else NOUN.
    """
    if not _is_word(surface):
        return Pos.OTHER
    lower = surface.lower()
    if surface[0].isupper():
        if lower in CLOSED_CLASS:
            return Pos.OTHER
        if not sentence_initial:
            return Pos.PROPN
        return _lowercase_rules(lower) or Pos.PROPN
    return _lowercase_rules(lower) or Pos.NOUN


def tokenize(text: str) -> TokenStream:
    tokens = []
    sentence_initial = True
    for surface, start, end in split_tokens(text):
        pos = tag_word(surface, sentence_initial)
        tokens.append(Token(surface, pos, start, end))
        if _is_word(surface):
            sentence_initial = False
        elif surface in SENTENCE_END:
            sentence_initial = True
    return TokenStream(tuple(tokens))


def find_runs(surfaces: Sequence[str], needle: Sequence[str]) -> list[int]:
    """Start indices where ``needle`` occurs as a contiguous run."""
    k = len(needle)
    if k == 0:
        return []
    first = needle[0]
    return [i for i in range(len(surfaces) - k + 1)
            if surfaces[i] == first and list(surfaces[i:i + k]) == list(needle)]

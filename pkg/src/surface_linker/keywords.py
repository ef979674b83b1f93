"""Top-10 keyword sets per excerpt from three sources.

* statistical: position/frequency scored 1- and 2-grams (lower is better)
* entity: entity-typed spans and nouns from a tagger
* vocabulary: controlled planetary terms found in the window

:func:`merge_top_keywords` folds them into one ordered, lemmatized list.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

from surface_linker import _resources
from surface_linker.entities import EntityCategory, EntityTagger
from surface_linker.text import Pos, TokenStream, find_runs, split_tokens

MAX_KEYWORDS = 10
DEDUP_SIMILARITY = 0.9

ENTITY_KEYWORD_CATEGORIES = frozenset({
    EntityCategory.LOCATION, EntityCategory.ORGANIZATION, EntityCategory.PERSON,
    EntityCategory.CELESTIAL_OBJECT, EntityCategory.CELESTIAL_REGION})


class Source(str, Enum):
    STATISTICAL = "STATISTICAL"
    ENTITY = "ENTITY"
    VOCAB = "VOCAB"


@dataclass(frozen=True)
class KeywordCandidate:
    term: str
    score: float
    source: Source

    def __post_init__(self):
        if not self.term:
            raise ValueError("empty keyword term")
        if self.score < 0:
            raise ValueError("keyword score must be non-negative")


@dataclass(frozen=True)
class KeywordSet:
    keywords: tuple[str, ...] = ()
    sources: tuple[frozenset[Source], ...] = ()

    def __post_init__(self):
        if len(self.keywords) > MAX_KEYWORDS:
            raise ValueError(f"more than {MAX_KEYWORDS} keywords")
        if len(set(self.keywords)) != len(self.keywords):
            raise ValueError("duplicate keywords")
        if len(self.sources) != len(self.keywords):
            raise ValueError("sources must parallel keywords")

    def __len__(self) -> int:
        return len(self.keywords)

    def __iter__(self):
        return iter(self.keywords)


# ---------------------------------------------------------------- lemmatizer

_UNCHANGED = frozenset("""
    mars venus uranus phobos deimos mimas hellas atlas pallas texas chaos cosmos
    helios series species physics mathematics dynamics optics kinematics
    always perhaps thus whereas towards afterwards lens news
    valles fossae montes dorsa paterae catenae chasmata mensae rimae tholi sulci
    terrae undae colles planitiae insulae maria lineae coronae scopuli cavi
""".split())

_IRREGULAR = {
    "analyses": "analysis", "hypotheses": "hypothesis", "ellipses": "ellipse",
    "cases": "case", "causes": "cause", "phases": "phase", "uses": "use",
    "houses": "house", "bases": "base", "releases": "release", "purposes": "purpose",
    "responses": "response", "courses": "course", "increases": "increase",
    "decreases": "decrease", "doses": "dose", "poses": "pose", "rises": "rise",
    "surprises": "surprise", "clauses": "clause", "pulses": "pulse", "lenses": "lens",
    "closes": "close", "noses": "nose", "databases": "database", "impulses": "impulse",
    "radii": "radius", "nuclei": "nucleus", "data": "datum", "criteria": "criterion",
    "phenomena": "phenomenon", "spectra": "spectrum", "maxima": "maximum",
    "minima": "minimum", "formulae": "formula", "children": "child", "men": "man",
    "women": "woman", "feet": "foot", "teeth": "tooth", "mice": "mouse",
}


def _lemmatize_word(word: str) -> str:
    w = word.lower()
    if w in _IRREGULAR:
        return _IRREGULAR[w]
    if w in _UNCHANGED or len(w) <= 3 or not w.isalpha():
        return w
    if w.endswith(("ss", "us", "is")):
        return w
    if w.endswith("ies") and len(w) > 4:
        return w[:-3] + "y"
    if w.endswith("sses"):
        return w[:-2]
    if w.endswith("ses"):
        return w[:-3] + "sis"
    if w.endswith(("xes", "zes", "ches", "shes", "oes")):
        return w[:-2]
    if w.endswith("s"):
        return w[:-1]
    return w


def lemmatize(term: str) -> str:
    """Lowercase and strip plural suffixes word by word.

    >>> lemmatize("light plains")
    'light plain'
    """
    return " ".join(_lemmatize_word(w) for w in term.split())


# ---------------------------------------------------------------- statistical

def edit_distance(a: str, b: str) -> int:
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def edit_similarity(a: str, b: str) -> float:
    if not a and not b:
        return 1.0
    return 1.0 - edit_distance(a, b) / max(len(a), len(b))


def _content_word(tok: str) -> bool:
    return tok[:1].isalpha() and len(tok) > 1 and tok.lower() not in _resources.stopwords()


def statistical_score(first_position: int, tf: int, capitalized_fraction: float) -> float:
    """Lower is better: early, frequent and capitalized terms rank first."""
    return first_position / (tf * (1.0 + capitalized_fraction))


def extract_statistical(window: TokenStream, top_k: int = 20) -> list[KeywordCandidate]:
    """Score stopword-free 1- and 2-grams, then drop near-duplicates.

    ``first_position`` is the 1-based token index of the first occurrence.
    Ties go to the longer n-gram, then the earlier one.
    """
    toks = window.surfaces
    stats: dict[str, list] = {}  # term -> [first_pos, tf, n_capitalized, n_words]
    for i, tok in enumerate(toks):
        if not _content_word(tok):
            continue
        grams = [(tok,)]
        if i + 1 < len(toks) and _content_word(toks[i + 1]):
            grams.append((tok, toks[i + 1]))
        for gram in grams:
            term = lemmatize(" ".join(gram))
            entry = stats.setdefault(term, [i + 1, 0, 0, len(gram)])
            entry[1] += 1
            entry[2] += gram[0][:1].isupper()

    ranked = sorted(
        ((statistical_score(first, tf, caps / tf), -n_words, first, term)
         for term, (first, tf, caps, n_words) in stats.items()))
    kept: list[KeywordCandidate] = []
    for score, _, _, term in ranked:
        if any(edit_similarity(term, k.term) >= DEDUP_SIMILARITY for k in kept):
            continue
        kept.append(KeywordCandidate(term, score, Source.STATISTICAL))
        if len(kept) >= top_k:
            break
    return kept


# ---------------------------------------------------------------- entity

def extract_entity_keywords(window: TokenStream, tagger: EntityTagger) -> list[KeywordCandidate]:
    """Entity-typed terms plus nouns; scored by 1-based first position.

    Spans longer than two words contribute their words one by one. Tokens
    inside spans of other categories (citations, telescopes, ...) are skipped.
    """
    spans = tagger.tag(window)
    owner = {}
    for s in spans:
        for k in range(s.token_start, s.token_end + 1):
            owner[k] = s
    found: dict[str, int] = {}

    def add(term, pos):
        term = lemmatize(term)
        if term and term not in found:
            found[term] = pos

    i = 0
    while i < len(window):
        span = owner.get(i)
        if span is not None and span.category in ENTITY_KEYWORD_CATEGORIES:
            words = [t for t in window.surfaces[span.token_start:span.token_end + 1]
                     if _content_word(t)]
            if 1 <= len(words) <= 2:
                add(" ".join(words), span.token_start + 1)
            else:
                for k, w in enumerate(words):
                    add(w, span.token_start + 1 + k)
            i = span.token_end + 1
            continue
        if span is None or span.category is EntityCategory.UNKNOWN:
            tok = window[i]
            if tok.pos in (Pos.NOUN, Pos.PROPN) and _content_word(tok.surface):
                add(tok.surface, i + 1)
        i += 1
    return [KeywordCandidate(t, float(p), Source.ENTITY) for t, p in found.items()]


# ---------------------------------------------------------------- vocabulary

@dataclass(frozen=True)
class ControlledVocabulary:
    terms: frozenset[str]

    def __post_init__(self):
        terms = frozenset(lemmatize(t) for t in self.terms if t.strip())
        if not terms:
            raise ValueError("vocabulary must be nonempty")
        object.__setattr__(self, "terms", terms)

    def __contains__(self, term: str) -> bool:
        return lemmatize(term) in self.terms

    def __len__(self) -> int:
        return len(self.terms)


def load_vocabulary(path: str | Path | None = None) -> ControlledVocabulary:
    """One term per line, ``#`` comments. Defaults to the bundled vocabulary."""
    if path is None:
        lines = _resources.read_lines("vocabulary.txt")
    else:
        text = Path(path).read_text(encoding="utf-8")
        lines = [ln.strip() for ln in text.splitlines()
                 if ln.strip() and not ln.lstrip().startswith("#")]
    return ControlledVocabulary(frozenset(lines))


def lemmatized_surfaces(window: TokenStream) -> list[str]:
    return [lemmatize(s) for s in window.surfaces]


def match_vocabulary(window: TokenStream, v: ControlledVocabulary) -> list[KeywordCandidate]:
    """Vocabulary terms present as contiguous lemmatized runs, in window order."""
    lemmas = lemmatized_surfaces(window)
    hits = []
    for term in v.terms:
        words = [lemmatize(s) for s, _, _ in split_tokens(term)]
        starts = find_runs(lemmas, words)
        if starts:
            hits.append((starts[0], -len(words), term))
    hits.sort()
    return [KeywordCandidate(term, float(pos + 1), Source.VOCAB) for pos, _, term in hits]


def count_vocabulary_hits(window: TokenStream, v: ControlledVocabulary) -> int:
    """Total occurrences of vocabulary terms (not distinct terms)."""
    lemmas = lemmatized_surfaces(window)
    return sum(len(find_runs(lemmas, [lemmatize(s) for s, _, _ in split_tokens(t)]))
               for t in v.terms)


# ---------------------------------------------------------------- merge

def _ranked(cands: Iterable[KeywordCandidate]) -> list[KeywordCandidate]:
    return sorted(cands, key=lambda c: c.score)


def merge_top_keywords(stat: Sequence[KeywordCandidate], entity: Sequence[KeywordCandidate],
                       vocab: Sequence[KeywordCandidate], limit: int = MAX_KEYWORDS) -> KeywordSet:
    """Merge in three passes and cap at ``limit``.

    1. terms found by both the statistical and entity extractors, by
       statistical score;
    2. vocabulary terms not yet present, in window order;
    3. the rest, alternating statistical then entity, each by its own rank.
    """
    stat, entity, vocab = _ranked(stat), _ranked(entity), _ranked(vocab)
    entity_terms = {c.term for c in entity}
    out: dict[str, set[Source]] = {}

    def push(term, *sources):
        if term in out:
            out[term].update(sources)
        elif len(out) < limit:
            out[term] = set(sources)

    for c in stat:
        if c.term in entity_terms:
            push(c.term, Source.STATISTICAL, Source.ENTITY)
    for c in vocab:
        push(c.term, Source.VOCAB)
    queues = [[c.term for c in stat], [c.term for c in entity]]
    tags = [Source.STATISTICAL, Source.ENTITY]
    idx = [0, 0]
    turn = 0
    while len(out) < limit and (idx[0] < len(queues[0]) or idx[1] < len(queues[1])):
        q = queues[turn]
        while idx[turn] < len(q) and q[idx[turn]] in out:
            idx[turn] += 1
        if idx[turn] < len(q):
            push(q[idx[turn]], tags[turn])
            idx[turn] += 1
        turn = 1 - turn
    terms = tuple(out)
    return KeywordSet(terms, tuple(frozenset(out[t]) for t in terms))


def harvest_keywords(window: TokenStream, tagger: EntityTagger, vocabulary: ControlledVocabulary,
                     top_k: int = 20, exclude: str | None = None) -> KeywordSet:
    """Run the three extractors and merge.

    ``exclude`` drops one term from every source before merging; callers pass
    the feature name, which every excerpt contains and so says nothing.
    """
    sources = (extract_statistical(window, top_k), extract_entity_keywords(window, tagger),
               match_vocabulary(window, vocabulary))
    if exclude is not None:
        skip = lemmatize(exclude)
        sources = tuple([c for c in src if c.term != skip] for src in sources)
    return merge_top_keywords(*sources)

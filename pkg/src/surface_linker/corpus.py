"""In-memory document store with co-occurrence search and record-level filters.

A corpus directory holds one ``<id>.txt`` full-text file per document and a
``<id>.meta`` sidecar of ``key: value`` lines (``id``, ``title``,
``journal``, ``collections`` as a comma list, optional ``abstract`` and
``language``). A sidecar without a text file gives a metadata-only record.

Search tokenizes like a bibliographic search engine: every run of word
characters is a term, so "Kaiser-Frazer" is indexed as "Kaiser" and
"Frazer". Title, abstract and full text are indexed as one positional
stream, so a body named only in the title can still pull a record in; the
full-text filters downstream are what reject it. Strict mention matching
happens later, on excerpt tokens.
"""

from __future__ import annotations

import copy
import logging
import re
import threading
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Protocol, Sequence

from surface_linker import _resources
from surface_linker.gazetteer import CelestialBody

logger = logging.getLogger(__name__)

LANGUAGE_THRESHOLD = 0.02

_INDEX_TOKEN_RE = re.compile(r"\w+")


class DuplicateRecordError(KeyError):
    pass


class FrozenStoreError(RuntimeError):
    pass


@dataclass(frozen=True)
class DocumentRecord:
    id: str
    title: str = ""
    abstract: str = ""
    full_text: str = ""
    journal: str = ""
    collections: frozenset[str] = frozenset()
    language_hint: str | None = None

    def __post_init__(self):
        if not self.id:
            raise ValueError("record id must be nonempty")
        object.__setattr__(self, "collections", frozenset(self.collections))

    @property
    def metadata_only(self) -> bool:
        return not self.full_text.strip()


@dataclass(frozen=True)
class CorpusQuery:
    feature_name: str
    body: str
    max_token_distance: int = 50

    def __post_init__(self):
        if self.max_token_distance <= 0:
            raise ValueError("max_token_distance must be positive")
        if not self.feature_name:
            raise ValueError("feature_name must be nonempty")


@dataclass(frozen=True)
class SearchHit:
    record_id: str
    match_positions: tuple[int, ...]

    def __post_init__(self):
        pos = tuple(self.match_positions)
        object.__setattr__(self, "match_positions", pos)
        if not pos or any(b <= a for a, b in zip(pos, pos[1:])):
            raise ValueError("match_positions must be nonempty and strictly increasing")


def index_terms(text: str) -> list[str]:
    return _INDEX_TOKEN_RE.findall(text)


def searchable_text(record: DocumentRecord) -> str:
    return "\n".join((record.title, record.abstract, record.full_text))


def _phrase_positions(postings: Mapping[str, Sequence[int]], words: Sequence[str]) -> list[int]:
    """Start positions of the consecutive term run ``words``."""
    if not words or any(w not in postings for w in words):
        return []
    starts = set(postings[words[0]])
    for k, w in enumerate(words[1:], 1):
        starts &= {p - k for p in postings[w]}
    return sorted(starts)


def _min_distance(a: Sequence[int], b: Sequence[int]) -> int | None:
    """Smallest |x - y| over sorted position lists, by a merge walk."""
    if not a or not b:
        return None
    i = j = 0
    best = abs(a[0] - b[0])
    while i < len(a) and j < len(b):
        d = a[i] - b[j]
        best = min(best, abs(d))
        if d < 0:
            i += 1
        else:
            j += 1
    return best


class CorpusStore:
    """Documents plus a positional inverted index over their full text.

    Ingestion is serialized by a lock. :meth:`freeze` returns an immutable
    snapshot that is safe to query from many threads.
    """

    def __init__(self):
        self._records: dict[str, DocumentRecord] = {}
        # term -> record id -> positions
        self._index: dict[str, dict[str, list[int]]] = defaultdict(dict)
        self._lock = threading.Lock()
        self._frozen = False

    def __len__(self) -> int:
        return len(self._records)

    def __contains__(self, record_id: str) -> bool:
        return record_id in self._records

    @property
    def frozen(self) -> bool:
        return self._frozen

    def ids(self) -> list[str]:
        return sorted(self._records)

    def records(self) -> list[DocumentRecord]:
        return [self._records[i] for i in self.ids()]

    def get(self, record_id: str) -> DocumentRecord:
        return self._records[record_id]

    def ingest(self, record: DocumentRecord) -> str:
        if self._frozen:
            raise FrozenStoreError("cannot ingest into a frozen store")
        with self._lock:
            if record.id in self._records:
                raise DuplicateRecordError(f"record {record.id!r} already ingested")
            self._records[record.id] = record
            for pos, term in enumerate(index_terms(searchable_text(record))):
                self._index[term].setdefault(record.id, []).append(pos)
        return record.id

    def freeze(self) -> "CorpusStore":
        with self._lock:
            snap = CorpusStore()
            snap._records = dict(self._records)
            snap._index = copy.deepcopy(dict(self._index))
            snap._frozen = True
        return snap

    def _postings_for(self, record_id: str, words: Iterable[str]) -> dict[str, list[int]]:
        return {w: self._index[w][record_id] for w in words
                if w in self._index and record_id in self._index[w]}

    def search_cooccurrence(self, query: CorpusQuery, body: CelestialBody) -> list[SearchHit]:
        """Records where the name and a body term co-occur within the distance bound."""
        name_words = index_terms(query.feature_name)
        term_words = {t: index_terms(t) for t in body.context_terms}
        if not name_words:
            return []
        candidate_ids = set.intersection(
            *(set(self._index.get(w, {})) for w in name_words))
        hits = []
        for rid in sorted(candidate_ids):
            postings = self._postings_for(rid, set(name_words).union(*term_words.values()))
            name_pos = _phrase_positions(postings, name_words)
            if not name_pos:
                continue
            body_pos = sorted({p for words in term_words.values()
                               for p in _phrase_positions(postings, words)})
            d = _min_distance(name_pos, body_pos)
            if d is not None and d <= query.max_token_distance:
                hits.append(SearchHit(rid, tuple(name_pos)))
        return hits

    def handle_remote_request(self, request: Mapping) -> list[dict]:
        """Serve the remote-search wire contract from this store."""
        terms = frozenset(request["body_terms"])
        body = CelestialBody(sorted(terms)[0], terms) if terms else None
        if body is None:
            raise ValueError("body_terms must be nonempty")
        q = CorpusQuery(request["feature_name"], body.name, int(request["max_distance"]))
        return [{"record_id": h.record_id, "positions": list(h.match_positions)}
                for h in self.search_cooccurrence(q, body)]


def search_cooccurrence(store: CorpusStore, query: CorpusQuery,
                        bodies: Mapping[str, CelestialBody]) -> list[SearchHit]:
    """Resolve ``query.body`` in ``bodies`` and search ``store``."""
    if query.body not in bodies:
        raise LookupError(f"unknown celestial body {query.body!r}")
    return store.search_cooccurrence(query, bodies[query.body])


class RemoteSearchAdapter(Protocol):
    """Out-of-process search service.

    Request: ``{"feature_name": str, "body_terms": [str], "max_distance": int}``.
    Response: ``[{"record_id": str, "positions": [int]}]``.
    """

    def search(self, request: dict) -> list[dict]: ...


def remote_search_cooccurrence(adapter: RemoteSearchAdapter, query: CorpusQuery,
                               body: CelestialBody) -> list[SearchHit]:
    request = {
        "feature_name": query.feature_name,
        "body_terms": sorted(body.context_terms),
        "max_distance": query.max_token_distance,
    }
    response = adapter.search(request)
    hits = [SearchHit(str(r["record_id"]), tuple(int(p) for p in r["positions"]))
            for r in response]
    return sorted(hits, key=lambda h: h.record_id)


def english_stopword_fraction(text: str) -> float:
    words = [w.lower() for w in index_terms(text) if not w.isdigit()]
    if not words:
        return 0.0
    stop = _resources.stopwords()
    return sum(w in stop for w in words) / len(words)


def is_english(record: DocumentRecord, threshold: float = LANGUAGE_THRESHOLD) -> bool:
    if record.metadata_only:
        return True
    return english_stopword_fraction(record.full_text) >= threshold


def filter_language(records: Iterable[DocumentRecord],
                    threshold: float = LANGUAGE_THRESHOLD
                    ) -> tuple[list[DocumentRecord], list[DocumentRecord]]:
    """Split into (kept, dropped) by the English stopword heuristic.

    Metadata-only records are kept; check ``record.metadata_only`` to see them.
    """
    kept, dropped = [], []
    for r in records:
        (kept if is_english(r, threshold) else dropped).append(r)
    return kept, dropped


def filter_body_mention(record: DocumentRecord, body: CelestialBody) -> tuple[bool, str]:
    """Keep only if the full text names the body through one of its context terms.

    Matching is case-sensitive, so "moons" never stands in for "Moon", and
    metadata fields (titles, author addresses) are not consulted.
    """
    if record.metadata_only:
        return False, "no full text"
    terms = index_terms(record.full_text)
    present = set(terms)
    for term in sorted(body.context_terms):
        words = index_terms(term)
        if len(words) == 1 and words[0] in present:
            return True, f"mentions {term!r}"
        if len(words) > 1:
            joined = " ".join(terms)
            if re.search(rf"(?<!\w){re.escape(' '.join(words))}(?!\w)", joined):
                return True, f"mentions {term!r}"
    return False, f"full text never mentions {body.name}"


def _parse_meta(path: Path) -> dict[str, str]:
    meta = {}
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        key, sep, value = raw.partition(":")
        if not sep:
            raise ValueError(f"{path}:{lineno}: expected 'key: value'")
        meta[key.strip().lower()] = value.strip()
    return meta


def read_corpus_dir(directory: str | Path) -> list[DocumentRecord]:
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"corpus directory {directory} does not exist")
    records = []
    for meta_path in sorted(directory.glob("*.meta")):
        meta = _parse_meta(meta_path)
        rid = meta.get("id") or meta_path.stem
        text_path = meta_path.with_suffix(".txt")
        full_text = text_path.read_text(encoding="utf-8") if text_path.exists() else ""
        collections = frozenset(c.strip() for c in meta.get("collections", "").split(",") if c.strip())
        records.append(DocumentRecord(
            id=rid,
            title=meta.get("title", ""),
            abstract=meta.get("abstract", ""),
            full_text=full_text,
            journal=meta.get("journal", ""),
            collections=collections,
            language_hint=meta.get("language") or None,
        ))
    return records


def load_corpus_dir(directory: str | Path) -> CorpusStore:
    store = CorpusStore()
    for record in read_corpus_dir(directory):
        store.ingest(record)
    logger.info("ingested %d records from %s", len(store), directory)
    return store

"""Access to the bundled data files."""

from __future__ import annotations

from functools import lru_cache
from importlib import resources
from pathlib import Path


def data_path(name: str) -> Path:
    return Path(str(resources.files("surface_linker") / "data" / name))


def read_lines(name: str) -> list[str]:
    """Non-empty, non-comment lines of a bundled data file."""
    text = data_path(name).read_text(encoding="utf-8")
    return [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]


@lru_cache(maxsize=None)
def stopwords() -> frozenset[str]:
    return frozenset(w for ln in read_lines("stopwords_en.txt") for w in ln.split())


@lru_cache(maxsize=None)
def default_body_terms() -> dict[str, frozenset[str]]:
    out = {}
    for ln in read_lines("bodies.txt")[1:]:
        name, _, terms = (p.strip() for p in ln.partition("|"))
        out[name] = frozenset(t.strip() for t in terms.split(";") if t.strip())
    return out


@lru_cache(maxsize=None)
def places() -> tuple[frozenset[str], frozenset[str]]:
    """(cities, regions) from the place lexicon."""
    cities, regions = set(), set()
    for ln in read_lines("places.txt")[1:]:
        kind, _, name = (p.strip() for p in ln.partition("|"))
        (cities if kind == "city" else regions).add(name)
    return frozenset(cities), frozenset(regions)

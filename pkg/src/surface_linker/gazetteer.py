"""Planetary nomenclature lexicon: features, host bodies and feature types.

File format (UTF-8, ``|``-delimited, header line required)::

    name | body | feature_type | blocklist
    Alamos | Mars | crater | Los Alamos
    Kaiser | Mars | crater | Kaiser Optical Systems;Kaiser-Frazer

Body context terms live in a companion file of ``body | term;term`` lines.
Bodies without an explicit row fall back to the built-in defaults.
"""

from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

from surface_linker import _resources

GAZETTEER_HEADER = ("name", "body", "feature_type", "blocklist")
BODY_HEADER = ("body", "terms")


class GazetteerFormatError(ValueError):
    """A gazetteer or body-terms file does not parse."""

    def __init__(self, message: str, path: str | Path | None = None, line: int | None = None):
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)
        self.path = path
        self.line = line


class GazetteerValidationError(ValueError):
    """Rows parse but violate a gazetteer invariant (e.g. duplicate entry)."""


@dataclass(frozen=True)
class CelestialBody:
    name: str
    context_terms: frozenset[str]

    def __post_init__(self):
        if not self.name:
            raise GazetteerValidationError("body name must be nonempty")
        terms = frozenset(self.context_terms) | {self.name}
        object.__setattr__(self, "context_terms", terms)


@dataclass(frozen=True)
class FeatureType:
    name: str

    def __post_init__(self):
        canonical = " ".join(self.name.lower().split())
        if not canonical:
            raise GazetteerValidationError("feature type must be nonempty")
        object.__setattr__(self, "name", canonical)


def _contains_word(phrase: str, name: str) -> bool:
    return re.search(rf"(?<![\w]){re.escape(name)}(?![\w])", phrase) is not None


@dataclass(frozen=True)
class FeatureEntry:
    name: str
    body: CelestialBody
    ftype: FeatureType
    containment_blocklist: frozenset[str] = frozenset()

    def __post_init__(self):
        if not self.name:
            raise GazetteerValidationError("feature name must be nonempty")
        object.__setattr__(self, "containment_blocklist", frozenset(self.containment_blocklist))
        for phrase in self.containment_blocklist:
            if not _contains_word(phrase, self.name):
                raise GazetteerValidationError(
                    f"blocklist phrase {phrase!r} does not contain {self.name!r} as a whole word"
                )

    @property
    def key(self) -> tuple[str, str]:
        return (self.name, self.body.name)


def default_body(name: str) -> CelestialBody:
    """Body with the bundled context terms, or just its own name if unknown."""
    terms = _resources.default_body_terms().get(name, frozenset())
    return CelestialBody(name, frozenset(terms) | {name})


class Gazetteer:
    """Immutable collection of feature entries indexed by name and (name, body)."""

    def __init__(self, entries: Iterable[FeatureEntry] = (), bodies: Iterable[CelestialBody] = ()):
        self._bodies: dict[str, CelestialBody] = {}
        for b in bodies:
            self._bodies[b.name] = b
        self._entries: list[FeatureEntry] = []
        self._by_key: dict[tuple[str, str], FeatureEntry] = {}
        self._by_name: dict[str, list[FeatureEntry]] = defaultdict(list)
        for e in entries:
            if e.key in self._by_key:
                raise GazetteerValidationError(f"duplicate entry {e.key}")
            if e.body.name not in self._bodies:
                self._bodies[e.body.name] = e.body
            self._entries.append(e)
            self._by_key[e.key] = e
            self._by_name[e.name].append(e)

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[FeatureEntry]:
        return iter(self._entries)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Gazetteer):
            return NotImplemented
        return (set(self._entries) == set(other._entries)
                and self._bodies == other._bodies)

    @property
    def entries(self) -> tuple[FeatureEntry, ...]:
        return tuple(self._entries)

    @property
    def bodies(self) -> dict[str, CelestialBody]:
        return dict(self._bodies)

    def body(self, name: str) -> CelestialBody:
        try:
            return self._bodies[name]
        except KeyError:
            raise LookupError(f"unknown celestial body {name!r}") from None

    def get(self, name: str, body: str) -> FeatureEntry | None:
        return self._by_key.get((name, body))

    def lookup(self, name: str) -> list[FeatureEntry]:
        return list(self._by_name.get(name, ()))

    def bodies_for(self, name: str) -> list[CelestialBody]:
        """Bodies hosting a feature called ``name``, in gazetteer order."""
        return [e.body for e in self._by_name.get(name, ())]


def lookup_name(g: Gazetteer, name: str) -> list[FeatureEntry]:
    """All entries whose name equals ``name`` exactly (case-sensitive)."""
    return g.lookup(name)


def shared_names(g: Gazetteer, body_a: str, body_b: str, ftype: str) -> list[str]:
    """Sorted names with an entry of type ``ftype`` on both bodies."""
    g.body(body_a)
    g.body(body_b)
    ftype = FeatureType(ftype).name

    def names_on(body):
        return {e.name for e in g if e.body.name == body and e.ftype.name == ftype}

    return sorted(names_on(body_a) & names_on(body_b))


def _split_row(line: str, width: int, path, lineno) -> list[str]:
    parts = [p.strip() for p in line.split("|")]
    if len(parts) == width - 1:
        parts.append("")
    if len(parts) != width:
        raise GazetteerFormatError(
            f"expected {width} '|'-separated fields, got {len(parts)}", path, lineno)
    return parts


def _data_lines(text: str) -> Iterator[tuple[int, str]]:
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield lineno, line


def _check_header(line: str, expected: tuple[str, ...], path, lineno):
    got = tuple(p.strip().lower() for p in line.split("|"))
    if got != expected:
        raise GazetteerFormatError(
            f"bad header {line!r}, expected {' | '.join(expected)!r}", path, lineno)


def load_body_terms(path: str | Path) -> dict[str, CelestialBody]:
    """Parse a ``body | term;term`` file."""
    path = Path(path)
    bodies: dict[str, CelestialBody] = {}
    lines = _data_lines(path.read_text(encoding="utf-8"))
    header = next(lines, None)
    if header is None:
        raise GazetteerFormatError("missing header line", path)
    _check_header(header[1], BODY_HEADER, path, header[0])
    for lineno, line in lines:
        name, terms = _split_row(line, 2, path, lineno)
        if not name:
            raise GazetteerFormatError("empty body name", path, lineno)
        if name in bodies:
            raise GazetteerValidationError(f"{path}:{lineno}: duplicate body {name!r}")
        term_set = {t.strip() for t in terms.split(";") if t.strip()}
        bodies[name] = CelestialBody(name, frozenset(term_set))
    return bodies


def load_gazetteer(path: str | Path, bodies_path: str | Path | None = None) -> Gazetteer:
    """Read a gazetteer file; see the module docstring for the format."""
    path = Path(path)
    known = load_body_terms(bodies_path) if bodies_path is not None else {}
    lines = _data_lines(path.read_text(encoding="utf-8"))
    header = next(lines, None)
    if header is None:
        raise GazetteerFormatError("missing header line", path)
    _check_header(header[1], GAZETTEER_HEADER, path, header[0])

    entries: list[FeatureEntry] = []
    seen: dict[tuple[str, str], int] = {}
    for lineno, line in lines:
        name, body_name, ftype, blocklist = _split_row(line, 4, path, lineno)
        if not name or not body_name or not ftype:
            raise GazetteerFormatError("name, body and feature_type are required", path, lineno)
        if (name, body_name) in seen:
            raise GazetteerValidationError(
                f"{path}:{lineno}: duplicate entry ({name!r}, {body_name!r}), "
                f"first seen on line {seen[(name, body_name)]}")
        seen[(name, body_name)] = lineno
        if body_name not in known:
            known[body_name] = default_body(body_name)
        phrases = frozenset(p.strip() for p in blocklist.split(";") if p.strip())
        try:
            entries.append(FeatureEntry(name, known[body_name], FeatureType(ftype), phrases))
        except GazetteerValidationError as exc:
            raise GazetteerValidationError(f"{path}:{lineno}: {exc}") from None
    return Gazetteer(entries, known.values())


def save_gazetteer(g: Gazetteer, path: str | Path, bodies_path: str | Path | None = None) -> None:
    """Write ``g`` in the format read by :func:`load_gazetteer`."""
    rows = [" | ".join(GAZETTEER_HEADER)]
    for e in g:
        rows.append(" | ".join([e.name, e.body.name, e.ftype.name,
                                ";".join(sorted(e.containment_blocklist))]))
    Path(path).write_text("\n".join(rows) + "\n", encoding="utf-8")
    if bodies_path is not None:
        rows = [" | ".join(BODY_HEADER)]
        for b in sorted(g.bodies.values(), key=lambda b: b.name):
            rows.append(f"{b.name} | {';'.join(sorted(b.context_terms))}")
        Path(bodies_path).write_text("\n".join(rows) + "\n", encoding="utf-8")

from __future__ import annotations

from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from surface_linker.entities import (
    KEEP_CATEGORIES, EntityCategory, EntitySpan, RuleEntityTagger, SpanContractError,
    WireEntityTagger, check_spans, decide_keep, spans_from_wire, spans_to_wire,
    tag_entities_rule_based)
from surface_linker.excerpts import extract_window, find_name_matches
from surface_linker.text import tokenize

FIXTURES = Path(__file__).parent / "fixtures"


def _excerpt(text, name):
    ts = tokenize(text)
    return extract_window(ts, find_name_matches(ts, name)[0], name)


def _category_at(text, word):
    ts = tokenize(text)
    i = ts.surfaces.index(word)
    for s in tag_entities_rule_based(ts):
        if s.covers(i):
            return s.category
    return None


def test_parenthetical_citation():
    assert _category_at("as shown previously (Kaiser 2011) showed that", "Kaiser") is EntityCategory.CITATION


def test_et_al_citation():
    assert _category_at("Kaiser et al. (2015) found dunes", "Kaiser") is EntityCategory.CITATION


def test_hubble_space_telescope():
    ts = tokenize("images from the Hubble Space Telescope")
    (span,) = [s for s in tag_entities_rule_based(ts) if s.covers(3)]
    assert span.category is EntityCategory.TELESCOPE
    assert (span.token_start, span.token_end) == (3, 5)


def test_crater_kaiser_is_unknown():
    assert _category_at("the crater Kaiser (17) is dark", "Kaiser") is EntityCategory.UNKNOWN


def test_person_with_honorific():
    assert _category_at("Prof. Kaiser presented new results", "Kaiser") is EntityCategory.PERSON


def test_city_in_region_is_location():
    assert _category_at("Tempe in Arizona is hot in summer", "Tempe") is EntityCategory.LOCATION


def test_celestial_region_lexicon():
    assert _category_at("bright-rim craters in Arabia show layering", "Arabia") is EntityCategory.CELESTIAL_REGION


def test_mission_cue_with_number():
    assert _category_at("samples from the Apollo 15 mission", "Apollo") is EntityCategory.MISSION


def test_decide_keep_drops_citation():
    e = _excerpt("Layered deposits on Mars (Kaiser 2011) record climate.", "Kaiser")
    assert decide_keep(e, tag_entities_rule_based(e.window)) == (False, EntityCategory.CITATION)


def test_decide_keep_drops_location():
    e = _excerpt("Tempe in Arizona is an albedo feature on Mars.", "Tempe")
    assert decide_keep(e, tag_entities_rule_based(e.window)) == (False, EntityCategory.LOCATION)


def test_decide_keep_uncovered_mention():
    e = _excerpt("Dunes inside Kaiser are dark.", "Kaiser")
    assert decide_keep(e, []) == (True, None)


def _senses():
    rows = []
    for raw in (FIXTURES / "adversarial_senses.txt").read_text(encoding="utf-8").splitlines():
        if raw.strip() and not raw.startswith("#"):
            name, phrase = (p.strip() for p in raw.split("|"))
            rows.append((name, phrase))
    return rows


@pytest.mark.parametrize("name, phrase", _senses())
def test_adversarial_senses_are_models(name, phrase):
    e = _excerpt(f"We then applied the {phrase} to the Moon data.", name)
    keep, category = decide_keep(e, tag_entities_rule_based(e.window))
    assert not keep and category is EntityCategory.MODEL


def test_lunar_crater_named_after_euler():
    ts = tokenize("The lunar crater named after Leonhard Euler is Euler, a crater on the Moon.")
    spans = tag_entities_rule_based(ts)
    person, crater = (extract_window(ts, i, "Euler") for i in find_name_matches(ts, "Euler"))
    assert decide_keep(person, spans)[0] is True  # unmarked full name stays UNKNOWN
    assert decide_keep(crater, spans)[0] is True


def test_spans_never_overlap_on_fixture_texts():
    for name, phrase in _senses():
        ts = tokenize(f"Dr. {name} et al. (2019) used the {phrase} near Tempe in Arizona and Arabia.")
        check_spans(tag_entities_rule_based(ts), len(ts))


def test_check_spans_rejects_overlap_and_out_of_range():
    with pytest.raises(SpanContractError):
        check_spans([EntitySpan(0, 2, EntityCategory.PERSON, 1.0), EntitySpan(2, 3, EntityCategory.MODEL, 1.0)])
    with pytest.raises(SpanContractError):
        check_spans([EntitySpan(0, 5, EntityCategory.PERSON, 1.0)], length=3)


def test_span_invariants():
    with pytest.raises(ValueError):
        EntitySpan(3, 2, EntityCategory.PERSON, 1.0)
    with pytest.raises(ValueError):
        EntitySpan(0, 0, EntityCategory.PERSON, 1.5)


def test_wire_round_trip_and_adapter():
    spans = [EntitySpan(0, 1, EntityCategory.CITATION, 0.9), EntitySpan(3, 3, EntityCategory.UNKNOWN, 0.0)]
    wire = spans_to_wire(spans)
    assert wire[0] == {"start": 0, "end": 1, "category": "CITATION", "confidence": 0.9}
    assert spans_from_wire(wire) == spans
    seen = []

    def transport(tokens):
        seen.append(tokens)
        return wire

    tagger = WireEntityTagger(transport)
    assert tagger.tag(tokenize("Kaiser 2011 shows Mars")) == spans
    assert seen == [["Kaiser", "2011", "shows", "Mars"]]


def test_wire_adapter_rejects_overlapping_response():
    tagger = WireEntityTagger(lambda toks: [{"start": 0, "end": 1, "category": "PERSON", "confidence": 1},
                                            {"start": 1, "end": 2, "category": "MODEL", "confidence": 1}])
    with pytest.raises(SpanContractError):
        tagger.tag(tokenize("a b c"))


WORDS = st.sampled_from(["Kaiser", "(", "2011", ")", "et", "al", ".", "Dr", "Telescope", "crater",
                         "in", "Arizona", "Tempe", "Mars", "the", "Hill", "sphere", "Inc", "University"])


@settings(max_examples=200, deadline=None)
@given(st.lists(WORDS, max_size=40))
def test_rule_tagger_pure_and_non_overlapping(words):
    ts = tokenize(" ".join(words))
    a = RuleEntityTagger().tag(ts)
    assert a == RuleEntityTagger().tag(ts)
    check_spans(a, len(ts))


@settings(max_examples=200, deadline=None)
@given(st.lists(WORDS, min_size=1, max_size=30), st.lists(
    st.tuples(st.integers(0, 29), st.integers(0, 3), st.sampled_from(list(EntityCategory))), max_size=5))
def test_decide_keep_depends_only_on_covering_span(words, extra):
    ts = tokenize(" ".join(["Kaiser"] + words))
    e = extract_window(ts, 0, "Kaiser")
    base = [s for s in RuleEntityTagger().tag(ts)]
    decision = decide_keep(e, base)
    taken = {k for s in base for k in range(s.token_start, s.token_end + 1)} | {0}
    added = list(base)
    for start, length, cat in extra:
        end = min(start + length, len(ts) - 1)
        if start > end or any(k in taken for k in range(start, end + 1)):
            continue
        taken |= set(range(start, end + 1))
        added.append(EntitySpan(start, end, cat, 0.5))
    assert decide_keep(e, sorted(added, key=lambda s: s.token_start)) == decision


def test_keep_categories():
    assert KEEP_CATEGORIES == {EntityCategory.CELESTIAL_OBJECT, EntityCategory.CELESTIAL_REGION,
                               EntityCategory.UNKNOWN}

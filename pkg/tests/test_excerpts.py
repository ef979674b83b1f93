from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from surface_linker.excerpts import (
    WINDOW_SIZE, BodyContextProfile, adjective_filter, body_context_probability,
    containment_filter, extract_window, find_name_matches, retain_by_threshold)
from surface_linker.gazetteer import (
    CelestialBody, FeatureEntry, FeatureType, Gazetteer, default_body, load_gazetteer)
from surface_linker import _resources
from surface_linker.text import tokenize

MARS = CelestialBody("Mars", frozenset({"Mars", "Martian"}))
MOON = CelestialBody("Moon", frozenset({"Moon", "lunar"}))


def _profile(probs):
    return BodyContextProfile({b: 0 for b in probs}, dict(probs))


# ---------------------------------------------------------------- body context

def test_140_mars_tokens_to_1_moon_token():
    ts = tokenize(" ".join(["Mars"] * 140 + ["Moon"]))
    p = body_context_probability(ts, [MARS, MOON])
    assert p.counts == {"Mars": 140, "Moon": 1}
    assert p.probabilities["Mars"] == pytest.approx(0.9929, abs=1e-4)
    assert p.probabilities["Moon"] == pytest.approx(0.0071, abs=1e-4)


def test_equal_counts_split_evenly():
    p = body_context_probability(tokenize("Mars Moon Martian lunar"), [MARS, MOON])
    assert p.probabilities == {"Mars": 0.5, "Moon": 0.5}


def test_zero_counts_uniform_over_three_bodies():
    p = body_context_probability(tokenize("nothing here"), [MARS, MOON, default_body("Mimas")])
    assert all(v == pytest.approx(1 / 3) for v in p.probabilities.values())
    assert p.n_bodies == 3


def test_context_terms_are_case_sensitive():
    p = body_context_probability(tokenize("mars moon Moon"), [MARS, MOON])
    assert p.counts == {"Mars": 0, "Moon": 1}


@pytest.mark.parametrize("p, keep", [(0.334, True), (0.20, False)])
def test_threshold_three_bodies(p, keep):
    rest = (1 - p) / 2
    assert retain_by_threshold(_profile({"A": p, "B": rest, "C": rest}), "A") is keep


def test_threshold_two_bodies_exact_half_kept():
    assert retain_by_threshold(_profile({"A": 0.5, "B": 0.5}), "A")


def test_threshold_unknown_target():
    with pytest.raises(KeyError):
        retain_by_threshold(_profile({"A": 1.0}), "B")


@settings(max_examples=200, deadline=None)
@given(st.lists(st.sampled_from(["Mars", "Moon", "lunar", "Martian", "Mimas", "x", "the"]), max_size=60))
def test_profile_sums_to_one_and_argmax_kept(words):
    bodies = [MARS, MOON, default_body("Mimas")]
    p = body_context_probability(tokenize(" ".join(words)), bodies)
    assert sum(p.probabilities.values()) == pytest.approx(1.0, abs=1e-9)
    assert all(0 <= v <= 1 for v in p.probabilities.values())
    best = max(p.probabilities, key=p.probabilities.get)
    assert retain_by_threshold(p, best)


# ---------------------------------------------------------------- matching and windows

def test_kaiser_crater_seventeen_single_match():
    assert len(find_name_matches(tokenize("dunes in and Kaiser Crater (17) are dark"), "Kaiser")) == 1


def test_kaiser_frazer_no_match():
    assert find_name_matches(tokenize("the Kaiser-Frazer sedan"), "Kaiser") == []


def test_mare_australe_two_token_match():
    ts = tokenize("Mare Australe is a large dark plain")
    assert find_name_matches(ts, "Mare Australe") == [0]
    e = extract_window(ts, 0, "Mare Australe")
    assert list(e.mention_span) == [0, 1]


def test_lowercase_name_no_match():
    assert find_name_matches(tokenize("the west rim"), "West") == []


def _doc(n):
    return tokenize(" ".join(f"w{i}" for i in range(n)))


def test_window_in_the_middle():
    e = extract_window(_doc(1000), 200)
    assert e.window_start == 136 and len(e.window) == 129
    assert e.window[0].surface == "w136" and e.window[-1].surface == "w264"
    assert e.center_index == 64


def test_window_near_start():
    e = extract_window(_doc(1000), 3)
    assert e.window_start == 0 and len(e.window) == 68 and e.center_index == 3


def test_window_whole_short_doc():
    ts = _doc(10)
    e = extract_window(ts, 5)
    assert e.window.surfaces == ts.surfaces


def test_window_provenance_spans_multiword_mention():
    text = "dust in Mare Australe today"
    ts = tokenize(text)
    e = extract_window(ts, 2, "Mare Australe")
    assert text[e.provenance[0]:e.provenance[1]] == "Mare Australe"


def test_window_index_out_of_range():
    with pytest.raises(IndexError):
        extract_window(_doc(5), 5)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 600), st.data())
def test_window_never_exceeds_129(n, data):
    i = data.draw(st.integers(0, n - 1))
    e = extract_window(_doc(n), i)
    # oracle: independent arithmetic
    lo, hi = max(0, i - 64), min(n - 1, i + 64)
    assert len(e.window) == hi - lo + 1 <= WINDOW_SIZE
    assert e.window[e.center_index].surface == f"w{i}"


# ---------------------------------------------------------------- phrase filters

GAZ = load_gazetteer(_resources.data_path("gazetteer.txt"), _resources.data_path("bodies.txt"))


def _excerpt(text, name, body="Mars"):
    ts = tokenize(text)
    (i, *_) = find_name_matches(ts, name)
    return extract_window(ts, i, name, "r", body), GAZ.get(name, body)


def test_black_as_adjective_dropped():
    e, _ = _excerpt("Black indicates that a crater is fresh.", "Black", "Moon")
    assert not adjective_filter(e)


def test_crater_black_kept():
    e, _ = _excerpt("The crater Black is 18 km wide.", "Black", "Moon")
    assert adjective_filter(e)


def test_los_alamos_dropped():
    e, entry = _excerpt("work at Los Alamos National Laboratory on Mars", "Alamos")
    assert not containment_filter(e, entry, GAZ)


def test_siddons_patera_dropped():
    e, entry = _excerpt("Siddons Patera erupted long ago on Venus", "Siddons", "Venus")
    assert not containment_filter(e, entry, GAZ)


def test_qidu_fossae_dropped():
    e, entry = _excerpt("troughs of Qidu Fossae cut the Martian plains", "Qidu")
    assert not containment_filter(e, entry, GAZ)


def test_crater_alamos_kept():
    e, entry = _excerpt("the crater Alamos on Mars is small", "Alamos")
    assert containment_filter(e, entry, GAZ)


def test_company_name_dropped():
    e, entry = _excerpt("a grating from Kaiser Optical Systems Inc. for the Mars rover", "Kaiser")
    assert not containment_filter(e, entry, GAZ)
    e, entry = _excerpt("plate from Kaiser Aluminum Corporation for Mars landers", "Kaiser")
    assert not containment_filter(e, entry, GAZ)


def test_blocklist_only_covers_the_mention_it_contains():
    # "Los Alamos" elsewhere in the window does not disqualify a separate mention
    e, entry = _excerpt("the crater Alamos on Mars, studied at Los Alamos", "Alamos")
    assert containment_filter(e, entry, GAZ)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.sampled_from(["Black", "black", "crater", "Los", "Alamos", "Patera", "is", "The", "."]),
                min_size=1, max_size=30))
def test_filter_order_does_not_change_outcome(words):
    ts = tokenize(" ".join(words))
    entry = FeatureEntry("Alamos", default_body("Mars"), FeatureType("crater"), ("Los Alamos",))
    g = Gazetteer([entry], [default_body("Mars")])
    for i in find_name_matches(ts, "Alamos"):
        e = extract_window(ts, i, "Alamos")
        checks = [lambda: adjective_filter(e), lambda: containment_filter(e, entry, g)]
        outcomes = {all(c() for c in order) for order in itertools.permutations(checks)}
        assert len(outcomes) == 1

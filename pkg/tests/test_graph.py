from __future__ import annotations

import math
import random

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from surface_linker.graph import (
    DisambiguationGraphPair, KgEdge, KgNode, KnowledgeGraph, NodeKind, Relation, add_observation,
    feature_node, keyword_node, kg_probability, load_pair, save_pair, shared_keyword_count,
    type_node)


def _pair(name="Kaiser"):
    return DisambiguationGraphPair(name, "Mars", "crater")


def test_fresh_planetary_observation():
    p = add_observation(_pair(), ["depression", "light plain"], "planetary")
    fn = feature_node("Kaiser")
    assert p.planetary.weight(keyword_node("depression"), fn, Relation.APPEARED_WITH) == 1
    assert p.planetary.weight(keyword_node("light plain"), fn, Relation.APPEARED_WITH) == 1
    assert p.planetary.keyword_labels() == {"depression", "light plain"}
    assert p.other.keyword_labels() == set()


def test_same_observation_twice_doubles_weights():
    p = _pair()
    for _ in range(2):
        add_observation(p, ["depression", "light plain"], "planetary")
    assert p.planetary.weight(keyword_node("depression"), feature_node("Kaiser")) == 2


def test_other_observation_only_in_other_graph():
    p = add_observation(_pair(), ["telescope"], "other")
    assert p.other.keyword_labels() == {"telescope"}
    assert "telescope" not in p.planetary.keyword_labels()


def test_observation_needs_keywords():
    with pytest.raises(ValueError):
        add_observation(_pair(), [], "planetary")


def test_pair_invariants():
    p = _pair()
    fn, tn = feature_node("Kaiser"), type_node("crater")
    assert fn in p.planetary.nodes and fn in p.other.nodes
    assert p.planetary.weight(fn, tn, Relation.PART_OF) == 1


def test_edge_invariants():
    with pytest.raises(ValueError):
        KgEdge(feature_node("a"), type_node("crater"), Relation.PART_OF, 0)
    with pytest.raises(ValueError):
        KgEdge(keyword_node("a"), type_node("crater"), Relation.PART_OF, 1)
    with pytest.raises(ValueError):
        KgEdge(feature_node("a"), type_node("crater"), Relation.APPEARED_WITH, 1)


def test_probability_three_to_one():
    p = _pair()
    for _ in range(3):
        add_observation(p, ["dune"], "planetary")
    add_observation(p, ["dune"], "other")
    assert kg_probability(p, ["dune"]) == 0.75


def test_probability_unknown_keywords_half():
    assert kg_probability(_pair(), ["nothing"]) == 0.5


def test_probability_planetary_only():
    p = _pair()
    add_observation(p, ["dune", "rim"], "planetary")
    add_observation(p, ["dune"], "planetary")
    add_observation(p, ["palace"], "other")
    assert kg_probability(p, ["dune", "rim"]) == 1.0


def test_keyword_reaches_feature_through_shared_type():
    # "light plain" seen with Apollo; Balmer shares the crater type
    p = DisambiguationGraphPair("Balmer", "Moon", "crater")
    add_observation(p, ["light plain"], "planetary", source_feature="Apollo", source_type="crater")
    add_observation(p, ["light plain"], "planetary", source_feature="Apollo", source_type="crater")
    # w(light plain, Apollo) * w(Apollo, crater) * w(Balmer, crater) = 2 * 1 * 1
    assert p.planetary.path_weight("light plain", "Balmer") == 2
    assert kg_probability(p, ["light plain"]) == 1.0


def test_shared_keyword_counts():
    a, b = KnowledgeGraph(), KnowledgeGraph()
    for k in "abc":
        a.add_edge(keyword_node(k), feature_node("F"), Relation.APPEARED_WITH)
    for k in "xyz":
        b.add_edge(keyword_node(k), feature_node("F"), Relation.APPEARED_WITH)
    assert shared_keyword_count(a, b) == (3, 3, 0)
    assert shared_keyword_count(a, a) == (3, 3, 3)


def test_node_round_trip():
    n = keyword_node("light plain")
    assert KgNode.parse(str(n)) == n
    assert str(feature_node("Kaiser")) == "FEATURE_NAME:Kaiser"


def test_save_load_pair(tmp_path):
    p = _pair()
    add_observation(p, ["dune", "rim"], "planetary")
    add_observation(p, ["palace"], "other")
    add_observation(p, ["ejecta"], "planetary", source_feature="Galle")
    save_pair(p, tmp_path)
    q = load_pair(tmp_path, "Kaiser", "Mars")
    assert q.planetary == p.planetary and q.other == p.other
    assert q.feature_type == "crater"


# ---------------------------------------------------------------- oracle

def _to_networkx(g: KnowledgeGraph) -> nx.Graph:
    G = nx.Graph()
    G.add_nodes_from(g.nodes)
    for e in g.edges():
        w = G.edges[e.source, e.target]["weight"] if G.has_edge(e.source, e.target) else 0
        G.add_edge(e.source, e.target, weight=w + e.weight)
    return G


def brute_force_weight(g: KnowledgeGraph, keyword: str, feature: str) -> int:
    """Enumerate simple paths with networkx and keep the two admitted shapes."""
    G = _to_networkx(g)
    k, f = keyword_node(keyword), feature_node(feature)
    if k not in G or f not in G:
        return 0
    total = 0
    for path in nx.all_simple_paths(G, k, f, cutoff=3):
        kinds = [n.kind for n in path[1:-1]]
        if kinds in ([], [NodeKind.FEATURE_NAME, NodeKind.FEATURE_TYPE]):
            total += math.prod(G.edges[a, b]["weight"] for a, b in zip(path, path[1:]))
    return total


def random_pair(rng: random.Random, direct_only: bool) -> DisambiguationGraphPair:
    p = DisambiguationGraphPair("F0", "Mars", "crater")
    for _ in range(rng.randint(1, 12)):
        label = rng.choice(["planetary", "other"])
        kws = rng.sample([f"k{i}" for i in range(8)], rng.randint(1, 4))
        source = None if direct_only or rng.random() < 0.5 else rng.choice(["F1", "F2"])
        for _ in range(rng.randint(1, 3)):
            add_observation(p, kws, label, source_feature=source,
                            source_type=rng.choice(["crater", "crater", "mons"]) if source else None)
    return p


def brute_force_probability(p: DisambiguationGraphPair, keywords) -> float:
    wp = sum(brute_force_weight(p.planetary, k, p.feature_name) for k in dict.fromkeys(keywords))
    wo = sum(brute_force_weight(p.other, k, p.feature_name) for k in dict.fromkeys(keywords))
    return 0.5 if wp + wo == 0 else wp / (wp + wo)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.booleans())
def test_probability_matches_path_enumeration(seed, direct_only):
    rng = random.Random(seed)
    p = random_pair(rng, direct_only)
    kws = rng.sample([f"k{i}" for i in range(10)], rng.randint(1, 5))
    assert kg_probability(p, kws) == pytest.approx(brute_force_probability(p, kws), abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_swap_complements(seed):
    rng = random.Random(seed)
    p = random_pair(rng, direct_only=False)
    kws = rng.sample([f"k{i}" for i in range(10)], rng.randint(1, 5))
    assert kg_probability(p.swapped(), kws) == pytest.approx(1 - kg_probability(p, kws), abs=1e-12)
    assert 0.0 <= kg_probability(p, kws) <= 1.0


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.sampled_from(["planetary", "other"]),
                          st.lists(st.sampled_from(list("abcdef")), min_size=1, max_size=3)),
                max_size=10), st.randoms())
def test_observations_commute(observations, rnd):
    a, b = _pair(), _pair()
    for label, kws in observations:
        add_observation(a, kws, label)
    shuffled = list(observations)
    rnd.shuffle(shuffled)
    for label, kws in shuffled:
        add_observation(b, kws, label)
    assert a.planetary == b.planetary and a.other == b.other


def test_merge_is_commutative_and_associative():
    rng = random.Random(7)
    gs = [random_pair(rng, False).planetary for _ in range(3)]
    assert gs[0].merge(gs[1]) == gs[1].merge(gs[0])
    assert gs[0].merge(gs[1]).merge(gs[2]) == gs[0].merge(gs[1].merge(gs[2]))

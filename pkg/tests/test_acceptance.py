"""
Randomized suites over seeded corpora: deck groups two ways, the cover
tests, normalizer algebra and completion to covers.
"""
import random

import pytest

from conftest import (
    LETTERS,
    bouquet_pair,
    random_corpus,
    random_cover,
    random_folded_graph,
    random_walk_subgraph,
    random_word,
)
from fimgraph.cover import (
    complete_to_cover,
    extend_deck,
    find_missing_lift,
    is_full,
    is_normal_cover,
    is_universal_cover,
    quotient_by_deck,
)
from fimgraph.deck import brute_force_deck, deck_group, deck_witnesses, omega_coset_group, partial_iso
from fimgraph.graph_core import Edge, Label, LabeledGraph, LocalClass, is_tree, read_word
from fimgraph.munn import Word
from fimgraph.submonoid import (
    CosetGraph,
    ImmersionPair,
    contains,
    coset_equal,
    induced_immersion,
    normalizer_contains,
)
from oracles import dyck_words, has_reduced_circuit, is_cover_by_stars

CORPUS = random_corpus(200, seed=2024)


def cover_pairs(count, seed):
    rng = random.Random(seed)
    pairs = []
    for _ in range(count):
        target = random_cover(rng)
        pairs.append(induced_immersion(CosetGraph.from_graph(target, 's0'), target, 's0'))
        pairs.append(bouquet_pair(target, base='s0'))
    return pairs


def test_deck_group_matches_brute_force():
    for graph in CORPUS:
        pair = bouquet_pair(graph)
        fast, slow = deck_group(pair), brute_force_deck(pair)
        assert fast.elements == slow.elements
        assert fast.cayley_rows() == slow.cayley_rows()


def test_deck_group_matches_brute_force_on_covers():
    for pair in cover_pairs(40, seed=7):
        fast, slow = deck_group(pair), brute_force_deck(pair, workers=2)
        assert fast.elements == slow.elements
        assert fast.cayley_rows() == slow.cayley_rows()


def test_cover_predicates():
    pairs = [bouquet_pair(graph) for graph in CORPUS] + cover_pairs(40, seed=8)
    for pair in pairs:
        assert is_full(pair) == (pair.local_class is LocalClass.COVER)
        normal = is_normal_cover(pair)
        if normal:
            assert len(deck_witnesses(pair)) == len(pair.fiber())
        assert is_universal_cover(pair) == (pair.local_class is LocalClass.COVER and is_tree(pair.source))


def test_coset_group_matches_deck_group():
    for graph in CORPUS[:50]:
        h = CosetGraph.from_graph(graph, 'v0')
        cosets = omega_coset_group(h)
        deck = deck_group(bouquet_pair(graph))
        assert cosets.elements == deck.elements
        assert cosets.cayley_rows() == deck.cayley_rows()


def normalizer_words(h, rng):
    """Words in N(H): coset representatives padded with elements of H."""
    group = omega_coset_group(h)
    reps = [h.representatives[u] for u in group.elements]
    padded = []
    for rep in reps:
        g = rng.choice(h.generators) if h.generators else Word()
        padded += [rep, g + rep, rep + g.inverse()]
    return padded


def test_normalizer_is_closed_and_two_sided():
    rng = random.Random(31)
    for graph in CORPUS[:100]:
        h = CosetGraph.from_graph(graph, 'v0')
        words = normalizer_words(h, rng)
        for p in words:
            assert normalizer_contains(h, p)
            for q in rng.sample(words, min(3, len(words))):
                assert normalizer_contains(h, p + q)
                for g in h.generators[:3]:
                    assert coset_equal(h, g + p + q, p + q)
            for _ in range(10):
                x = Word.parse(random_word(rng))
                assert contains(h, x + p.inverse()) == contains(h, p.inverse() + x)


@pytest.mark.parametrize('seed', [1, 2])
def test_completion_to_cover(seed):
    rng = random.Random(seed)
    pairs = []
    for _ in range(25):
        pairs.append(bouquet_pair(random_folded_graph(rng, 8)))
        target = random_cover(rng)
        sub = random_walk_subgraph(rng, target, 's0', rng.randint(0, 10))
        pairs.append(induced_immersion(CosetGraph.from_graph(sub, 's0'), target, 's0'))

    for pair in pairs:
        deck = deck_witnesses(pair)
        previous = None
        for depth in (1, 2, 3):
            cc = complete_to_cover(pair, depth)
            assert cc.is_interior_complete()
            original = set(pair.source.vertices)
            assert set(cc.completed_graph.subgraph(original).edges) == set(pair.source.edges)
            assert all(cc.completed_map(v) == pair.total(v) for v in original)

            extensions = {}
            for u, gamma in deck.items():
                extended = extend_deck(cc, gamma)
                assert all(cc.completed_map(extended[v]) == cc.completed_map(v) for v in extended)
                extensions[u] = extended

            if previous is not None:
                cut = cc.truncate(depth - 1)
                assert set(cut.completed_graph.edges) == set(previous[0].completed_graph.edges)
                for u, extended in extensions.items():
                    below = previous[1][u]
                    assert {v: extended[v] for v in below} == below
            previous = (cc, extensions)


def test_idempotent_circuits_lift_exactly_on_covers():
    idempotents = dyck_words(LETTERS, 10)
    for pair in cover_pairs(5, seed=9):
        assert pair.local_class is LocalClass.COVER
        for w in idempotents:
            assert read_word(pair.source, pair.base_up, w) == pair.base_up

    for graph in CORPUS:
        pair = bouquet_pair(graph)
        missing = find_missing_lift(pair)
        if pair.local_class is LocalClass.COVER:
            assert missing is None
            continue
        assert read_word(pair.target, pair.base_down, missing.idempotent) == pair.base_down
        assert read_word(pair.source, pair.base_up, missing.idempotent) != pair.base_up


TREES = [
    LabeledGraph(('p',)),
    LabeledGraph(('p', 'q', 'r'), (Edge('x', 'a', 'p', 'q'), Edge('y', 'b', 'r', 'q'))),
]


def test_universal_cover_means_no_reduced_circuits():
    small = [graph for graph in CORPUS if len(graph.vertices) <= 5]
    pairs = [bouquet_pair(graph) for graph in small]
    pairs += [induced_immersion(CosetGraph.from_graph(g, 'v0'), g, 'v0') for g in small]
    pairs += [induced_immersion(CosetGraph.from_graph(g, 'p'), g, 'p') for g in TREES]
    pairs += cover_pairs(10, seed=10)
    universal = 0
    for pair in pairs:
        bound = 2 * len(pair.source.vertices)
        expected = is_cover_by_stars(pair.total) and not has_reduced_circuit(pair.source, pair.base_up, bound)
        assert is_universal_cover(pair) == expected
        universal += expected
    assert universal >= len(TREES)


def test_quotient_by_deck_group_is_a_normal_cover():
    pairs = [bouquet_pair(graph) for graph in CORPUS[:80]] + cover_pairs(20, seed=12)
    for pair in pairs:
        quotient = quotient_by_deck(pair)
        down = ImmersionPair(quotient.projection, pair.base_up, quotient.projection(pair.base_up))
        assert down.local_class is LocalClass.COVER
        assert is_normal_cover(down)
        assert deck_group(down).order == quotient.group.order
        assert len(down.fiber()) == quotient.group.order


def test_deck_transformations_act_freely():
    for graph in CORPUS:
        group = deck_group(bouquet_pair(graph))
        for u, gamma in group.witness_maps.items():
            if u == group.identity:
                assert all(gamma[v] == v for v in graph.vertices)
                continue
            assert all(gamma[v] != v for v in graph.vertices)
            for edge in graph.edges:
                image = graph.move(gamma[edge.src], Label(edge.letter))
                assert image.step.edge != edge.id


def test_partial_isomorphisms_compose():
    rng = random.Random(41)
    composed = 0
    for graph in CORPUS[:100]:
        pair = bouquet_pair(graph)
        vertices = list(graph.vertices)
        for _ in range(5):
            v1, v2, v3 = (rng.choice(vertices) for _ in range(3))
            dom = random_walk_subgraph(rng, graph, v1, rng.randint(0, 6))
            first = partial_iso(pair, v1, v2, dom)
            if first is None:
                continue
            image = graph.subgraph(first.vertex_map.values(), first.edge_map.values())
            second = partial_iso(pair, v2, v3, image)
            if second is None:
                continue
            composite = first.then(second)
            direct = partial_iso(pair, v1, v3, dom)
            assert composite.is_valid_for(pair)
            assert dict(composite.vertex_map) == dict(direct.vertex_map)
            assert dict(composite.edge_map) == dict(direct.edge_map)
            round_trip = composite.then(composite.inverse())
            assert dict(round_trip.vertex_map) == {v: v for v in dom.vertices}
            composed += 1
    assert composed > 0

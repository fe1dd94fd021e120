import pytest

from conftest import bouquet_pair
from fimgraph.cover import (
    classify_pair,
    complete_to_cover,
    extend_deck,
    find_missing_lift,
    find_missing_lifts,
    is_full,
    is_normal_cover,
    is_universal_cover,
    quotient_by_deck,
    universal_cover,
)
from fimgraph.deck import deck_witnesses
from fimgraph.errors import DomainError
from fimgraph.graph_core import Edge, Label, LabeledGraph, LocalClass, bouquet, is_tree, serialize_graph
from fimgraph.submonoid import CosetGraph, contains, induced_immersion


def test_fig3_is_an_immersion_only(fig3_pair, fig3_coset):
    assert not is_full(fig3_pair)
    assert not is_full(fig3_coset)
    assert not is_normal_cover(fig3_pair)
    assert not is_universal_cover(fig3_pair)
    report = classify_pair(fig3_pair)
    assert report.local_class is LocalClass.IMMERSION
    assert report.missing.vertex == 'v1'
    assert str(report.missing.label) == 'B'
    assert str(report.missing.idempotent) == 'Bb'


def test_missing_lift_idempotent_escapes_h(fig3_pair, fig3_coset):
    for missing in find_missing_lifts(fig3_pair):
        assert not contains(fig3_coset, missing.idempotent)
        assert contains(CosetGraph.from_graph(bouquet('ab'), 'o'), missing.idempotent)


def test_single_edge_missing_lifts(single_edge_pair):
    found = [(m.vertex, str(m.label), str(m.idempotent)) for m in find_missing_lifts(single_edge_pair)]
    assert found == [('v', 'A', 'Aa'), ('w', 'a', 'aaAA')]
    assert find_missing_lift(single_edge_pair).vertex == 'v'


def test_square_is_a_normal_cover(square_pair):
    assert is_full(square_pair)
    assert is_normal_cover(square_pair)
    assert not is_universal_cover(square_pair)
    assert find_missing_lift(square_pair) is None
    assert classify_pair(square_pair).describe() == "class: cover\nfull: true\nnormal: true\nuniversal: false"


def test_tree_covering_itself_is_universal():
    path = LabeledGraph(('p', 'q'), (Edge('e', 'a', 'p', 'q'),))
    pair = induced_immersion(CosetGraph.from_graph(path, 'p'), path, 'p')
    assert is_universal_cover(pair)
    assert is_normal_cover(pair)


def three_sheets():
    """Degree-3 cover of the a/b bouquet with a trivial deck group."""
    return LabeledGraph(
        ('p', 'q', 'r'),
        (Edge('x1', 'a', 'p', 'p'), Edge('x2', 'a', 'q', 'r'), Edge('x3', 'a', 'r', 'q'),
         Edge('y1', 'b', 'p', 'q'), Edge('y2', 'b', 'q', 'p'), Edge('y3', 'b', 'r', 'r')),
    )


def test_non_normal_cover():
    pair = bouquet_pair(three_sheets(), base='p')
    assert is_full(pair)
    assert not is_normal_cover(pair)
    assert len(deck_witnesses(pair)) == 1


def test_completion_of_single_edge(single_edge_pair):
    cc = complete_to_cover(single_edge_pair, 2)
    assert sorted(cc.completed_graph.vertices) == ['v', 'v.A', 'v.A.A', 'w', 'w.a', 'w.a.a']
    assert cc.frontier == frozenset({'v.A.A', 'w.a.a'})
    assert cc.is_interior_complete()
    assert cc.completed_graph.edge_index['v.A'] == Edge('v.A', 'a', 'v.A', 'v')
    assert cc.attachments['w.a.a'] == ('w', (Label('a'), Label('a')))
    text = serialize_graph(cc.completed_graph, 'v', cc.frontier)
    assert text.endswith("base v\nfrontier v.A.A\nfrontier w.a.a\n")


def test_completion_of_fig3_depth_one(fig3_pair):
    cc = complete_to_cover(fig3_pair, 1)
    assert cc.frontier == frozenset({'v1.B', 'v2.b', 'v3.b', 'v4.B'})
    assert len(cc.completed_graph.vertices) == 8
    assert is_tree(cc.completed_graph.subgraph(['v1', 'v1.B']))


def test_completion_of_a_cover_adds_nothing(square_pair):
    cc = complete_to_cover(square_pair, 3)
    assert cc.completed_graph.vertices == square_pair.source.vertices
    assert cc.frontier == frozenset()


def test_completion_depth_must_be_positive(single_edge_pair):
    with pytest.raises(DomainError):
        complete_to_cover(single_edge_pair, 0)


def test_truncate_matches_shallower_completion(fig3_pair):
    deep = complete_to_cover(fig3_pair, 3)
    shallow = complete_to_cover(fig3_pair, 2)
    cut = deep.truncate(2)
    assert set(cut.completed_graph.edges) == set(shallow.completed_graph.edges)
    assert cut.frontier == shallow.frontier
    with pytest.raises(DomainError):
        deep.truncate(4)


def test_universal_cover_of_bouquet():
    cc = universal_cover(bouquet('ab'), 'o', 2)
    assert len(cc.completed_graph.vertices) == 1 + 4 + 12
    assert is_tree(cc.completed_graph)
    assert len(cc.frontier) == 12


def test_extend_deck_on_fig3(fig3_pair):
    cc = complete_to_cover(fig3_pair, 2)
    swap = deck_witnesses(fig3_pair)['v4']
    extended = extend_deck(cc, swap)
    assert extended['v1.B'] == 'v4.B'
    assert extended['v2.b.b'] == 'v3.b.b'
    with pytest.raises(DomainError):
        extend_deck(cc, {'v1': 'v2', 'v2': 'v1', 'v3': 'v4', 'v4': 'v3'})


def test_fig3_quotient(fig3_pair):
    quotient = quotient_by_deck(fig3_pair)
    assert quotient.graph.vertices == ('v1', 'v2')
    assert set(quotient.graph.edges) == {
        Edge('e1', 'b', 'v1', 'v2'),
        Edge('e2', 'a', 'v2', 'v2'),
        Edge('e4', 'a', 'v1', 'v1'),
    }
    assert quotient.vertex_orbits == {'v1': ('v1', 'v4'), 'v2': ('v2', 'v3')}
    assert quotient.orbit_table().startswith("# orbit v1: v1 v4\n# orbit v2: v2 v3\n")
    down = induced_immersion(CosetGraph.from_graph(fig3_pair.source, 'v1'), quotient.graph, 'v1')
    assert is_normal_cover(down)
    assert not is_universal_cover(down)


def test_quotient_by_trivial_group_keeps_every_vertex():
    quotient = quotient_by_deck(bouquet_pair(three_sheets(), base='p'))
    assert quotient.graph.vertices == ('p', 'q', 'r')
    assert quotient.group.order == 1
    assert all(len(orbit) == 1 for orbit in quotient.edge_orbits.values())

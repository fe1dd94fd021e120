import random
from pathlib import Path

import pytest
from hypothesis import strategies as st

from fimgraph.graph_core import Edge, LabeledGraph, bouquet, fold, parse_graph
from fimgraph.submonoid import CosetGraph, induced_immersion

DATA = Path(__file__).parent / 'data'

LETTERS = ('a', 'b')


def load(name):
    return parse_graph((DATA / name).read_text())


def random_folded_graph(rng, max_vertices=12, letters=LETTERS):
    """Random tree plus a few extra edges, folded and rooted at v0."""
    n = rng.randint(1, max_vertices)
    vertices = [f"x{i}" for i in range(n)]
    edges = []
    for i in range(1, n):
        parent = vertices[rng.randrange(i)]
        letter = rng.choice(letters)
        ends = (parent, vertices[i]) if rng.random() < 0.5 else (vertices[i], parent)
        edges.append(Edge(f"t{i}", letter, *ends))
    for j in range(rng.randint(0, n + 1)):
        edges.append(Edge(f"c{j}", rng.choice(letters), rng.choice(vertices), rng.choice(vertices)))
    folded = fold(LabeledGraph(tuple(vertices), tuple(edges)), root='x0')
    return folded.graph


def random_cover(rng, max_sheets=6, letters=LETTERS):
    """Connected permutation cover of the bouquet, sheets s0, s1, ..."""
    while True:
        n = rng.randint(1, max_sheets)
        vertices = tuple(f"s{i}" for i in range(n))
        edges = []
        for letter in letters:
            image = list(range(n))
            rng.shuffle(image)
            edges += [Edge(f"{letter}{i}", letter, vertices[i], vertices[image[i]]) for i in range(n)]
        graph = LabeledGraph(vertices, tuple(edges))
        if graph.is_connected():
            return graph


def random_walk_subgraph(rng, graph, start, steps):
    """The vertices and edges a random walk from start passes through."""
    here = start
    vertices, edge_ids = {start}, set()
    for _ in range(steps):
        entry = rng.choice(graph.star(here))
        edge_ids.add(entry.step.edge)
        here = entry.end
        vertices.add(here)
    return graph.subgraph(vertices, edge_ids)


def random_walk_word(rng, graph, start, steps):
    """Label word of a random walk from start; every such word is readable."""
    here = start
    labels = []
    for _ in range(steps):
        star = graph.star(here)
        if not star:
            break
        entry = rng.choice(star)
        labels.append(str(entry.label))
        here = entry.end
    return ''.join(labels)


def random_word(rng, max_length=8, letters=LETTERS):
    alphabet = ''.join(letters) + ''.join(letters).upper()
    return ''.join(rng.choice(alphabet) for _ in range(rng.randint(0, max_length)))


def bouquet_pair(graph, base='v0', letters=LETTERS):
    h = CosetGraph.from_graph(graph, base)
    return induced_immersion(h, bouquet(letters), 'o')


def random_corpus(count, seed, max_vertices=12):
    rng = random.Random(seed)
    return [random_folded_graph(rng, max_vertices) for _ in range(count)]


@st.composite
def folded_graphs(draw, max_vertices=8):
    return random_folded_graph(draw(st.randoms(use_true_random=False)), max_vertices)


words = st.text(alphabet='aAbB', max_size=8)


@pytest.fixture
def fig3():
    return load('fig3.graph')


@pytest.fixture
def fig3_coset(fig3):
    return CosetGraph.from_graph(fig3.graph, fig3.base)


@pytest.fixture
def fig3_pair(fig3_coset):
    return induced_immersion(fig3_coset, bouquet(LETTERS), 'o')


@pytest.fixture
def single_edge_pair():
    parsed = load('single_edge.graph')
    return induced_immersion(CosetGraph.from_graph(parsed.graph, parsed.base), bouquet('a'), 'o')


@pytest.fixture
def square_pair():
    parsed = load('square.graph')
    return induced_immersion(CosetGraph.from_graph(parsed.graph, parsed.base), bouquet('a'), 'o')

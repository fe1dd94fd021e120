"""
Closed inverse submonoids of FIM(X), held as pointed coset graphs.

The vertex reached from the base by reading m is the right omega-coset
(Hm)^w; H itself is the set of words labelling circuits at the base.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional, Sequence

from fimgraph.errors import DomainError, GraphError
from fimgraph.graph_core import (
    Edge,
    GraphMorphism,
    LabeledGraph,
    LocalClass,
    based_isomorphism,
    bouquet,
    classify_local,
    fold,
    geodesic_words,
    id_key,
    induced_morphism,
    is_deterministic,
    read_word,
    spanning_tree_edges,
)
from fimgraph.munn import Word, WordLike, as_word, reduce

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class CosetGraph:
    graph: LabeledGraph
    base: str
    generators: tuple[Word, ...] = ()

    def __post_init__(self):
        self.graph.require_vertex(self.base)
        self.graph.require_connected("a coset graph")
        if not is_deterministic(self.graph):
            raise GraphError("a coset graph must be deterministic")
        object.__setattr__(self, 'generators', tuple(as_word(g) for g in self.generators))

    @classmethod
    def from_graph(cls, graph: LabeledGraph, base: str) -> CosetGraph:
        """Wrap a pointed deterministic graph, recovering generators from its edges."""
        return cls(graph, base, tuple(loop_generators(graph, base)))

    @cached_property
    def representatives(self) -> dict[str, Word]:
        return coset_representatives(self)


@dataclass(frozen=True, eq=False)
class ImmersionPair:
    total: GraphMorphism
    base_up: str
    base_down: str

    def __post_init__(self):
        self.total.source.require_connected("an immersion pair")
        if classify_local(self.total) is LocalClass.NOT_IMMERSION:
            raise GraphError("the morphism is not an immersion")
        if self.total(self.base_up) != self.base_down:
            raise GraphError(f"{self.base_up} does not lie over {self.base_down}")

    @property
    def source(self) -> LabeledGraph:
        return self.total.source

    @property
    def target(self) -> LabeledGraph:
        return self.total.target

    @cached_property
    def local_class(self) -> LocalClass:
        return classify_local(self.total)

    def fiber(self, v: Optional[str] = None) -> list[str]:
        """Vertices of the source over v (default: over the base)."""
        v = self.base_down if v is None else v
        return sorted((x for x in self.source.vertices if self.total(x) == v), key=id_key)


def flower(generators: Sequence[Word], base: str = 'base') -> LabeledGraph:
    """One petal per generator, all attached at base."""
    vertices = [base]
    edges = []
    for i, gen in enumerate(generators):
        if not gen:
            continue
        stops = [base] + [f"p{i}.{j}" for j in range(1, len(gen))] + [base]
        vertices += stops[1:-1]
        for j, label in enumerate(gen):
            src, dst = stops[j], stops[j + 1]
            if not label.positive:
                src, dst = dst, src
            edges.append(Edge(f"p{i}.e{j}", label.letter, src, dst))
    return LabeledGraph(tuple(vertices), tuple(edges))


def from_generators(generators: Iterable[WordLike]) -> CosetGraph:
    """Coset graph of the closed inverse submonoid generated by the words."""
    gens = tuple(as_word(g) for g in generators)
    folded = fold(flower(gens), root='base')
    logger.info(f"Coset graph for {len(gens)} generators has {len(folded.graph.vertices)} vertices")
    return CosetGraph(folded.graph, folded.projection['base'], gens)


def loop_generators(graph: LabeledGraph, root: str) -> list[Word]:
    """
    One circuit word per positive edge, geo(src) x geo(dst)^-1. Together
    they generate L(graph, root) as a closed inverse submonoid.
    """
    graph.require_connected("loop_generators")
    words = {v: Word(w) for v, w in geodesic_words(graph, root).items()}
    out = []
    for edge in sorted(graph.edges, key=lambda e: id_key(e.id)):
        out.append(words[edge.src] + Word.parse(edge.letter) + words[edge.dst].inverse())
    return out


def free_basis(graph: LabeledGraph, root: str) -> list[Word]:
    """Reduced circuit words of the edges outside the breadth-first spanning tree."""
    tree = spanning_tree_edges(graph, root)
    words = {v: Word(w) for v, w in geodesic_words(graph, root).items()}
    return [
        reduce(words[e.src] + Word.parse(e.letter) + words[e.dst].inverse())
        for e in sorted(graph.edges, key=lambda e: id_key(e.id))
        if e.id not in tree
    ]


def contains(h: CosetGraph, w: WordLike) -> bool:
    return read_word(h.graph, h.base, as_word(w)) == h.base


def omega_coset(h: CosetGraph, m: WordLike) -> Optional[str]:
    """The vertex (Hm)^w, or None when mm^-1 is not in H."""
    return read_word(h.graph, h.base, as_word(m))


def coset_equal(h: CosetGraph, m: WordLike, n: WordLike) -> bool:
    first, second = omega_coset(h, m), omega_coset(h, n)
    if first is None or second is None:
        undefined = m if first is None else n
        raise DomainError(f"the omega-coset of {as_word(undefined)} is undefined")
    return first == second


def act(h: CosetGraph, vertex: str, m: WordLike) -> Optional[str]:
    h.graph.require_vertex(vertex)
    return read_word(h.graph, vertex, as_word(m))


def coset_representatives(h: CosetGraph) -> dict[str, Word]:
    """Shortlex-least geodesic word reaching each vertex from the base."""
    return {v: Word(w) for v, w in geodesic_words(h.graph, h.base).items()}


def coset_name(h: CosetGraph, vertex: str) -> str:
    word = h.representatives[vertex]
    return 'H' if not word else f"(H{word})^ω"


def induced_immersion(h: CosetGraph, target: LabeledGraph, v: str) -> ImmersionPair:
    """Realize H inside L(target, v) as an immersion h.graph -> target."""
    target.require_connected("induced_immersion")
    if not is_deterministic(target):
        raise GraphError("induced_immersion requires a deterministic target")
    target.require_vertex(v)
    for gen in h.generators:
        if read_word(target, v, gen) != v:
            raise DomainError(f"generator {gen} is not a circuit at {v}")
    morphism = induced_morphism(h.graph, h.base, target, v)
    if morphism is None:
        raise DomainError(f"no label-preserving morphism sends {h.base} to {v}")
    return ImmersionPair(morphism, h.base, v)


def tautological_immersion(h: CosetGraph, alphabet: Optional[Iterable[str]] = None, vertex: str = 'o') -> ImmersionPair:
    letters = h.graph.alphabet() if alphabet is None else frozenset(alphabet)
    return induced_immersion(h, bouquet(letters, vertex), vertex)


def normalizer_contains(h: CosetGraph, p: WordLike, immersion: Optional[ImmersionPair] = None) -> bool:
    """
    p is in N(H) iff (Hp)^w exists and moving the base there is a based
    isomorphism of the coset graph (commuting with the immersion, if given).
    """
    u = omega_coset(h, p)
    if u is None:
        return False
    iso = based_isomorphism(h.graph, h.base, h.graph, u)
    if iso is None:
        return False
    if immersion is not None:
        f = immersion.total
        return all(f(iso(x)) == f(x) for x in h.graph.vertices)
    return True


def conjugate_test(h1: CosetGraph, h2: CosetGraph,
                   immersions: Optional[tuple[ImmersionPair, ImmersionPair]] = None) -> bool:
    """True iff h1 is the loop monoid of h2's graph at some vertex."""
    if len(h1.graph.vertices) != len(h2.graph.vertices) or len(h1.graph.edges) != len(h2.graph.edges):
        return False
    for u in sorted(h2.graph.vertices, key=id_key):
        iso = based_isomorphism(h1.graph, h1.base, h2.graph, u)
        if iso is None:
            continue
        if immersions is None:
            return True
        f1, f2 = immersions[0].total, immersions[1].total
        if all(f2(iso(x)) == f1(x) for x in h1.graph.vertices):
            return True
    return False

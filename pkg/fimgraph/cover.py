"""
Covers: the fullness / normality / universality tests, quotients of an
immersion by its deck group, and completion of an immersion to a cover by
attaching trees at incomplete vertices (truncated at a given depth).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Mapping, NamedTuple, Optional, Union

from fimgraph.deck import DeckGroup, deck_fiber, deck_group, deck_witnesses
from fimgraph.errors import DomainError, GraphError, InternalConsistencyError
from fimgraph.graph_core import (
    Edge,
    GraphMorphism,
    Label,
    LabeledGraph,
    LocalClass,
    based_isomorphism,
    classify_local,
    geodesic_paths,
    id_key,
    is_tree,
    read_word,
)
from fimgraph.munn import Word
from fimgraph.submonoid import CosetGraph, ImmersionPair, tautological_immersion

logger = logging.getLogger(__name__)


class MissingLift(NamedTuple):
    vertex: str
    label: Label
    path_word: Word
    idempotent: Word


def find_missing_lifts(pair: ImmersionPair) -> list[MissingLift]:
    """
    Every incomplete vertex and missing label, breadth-first from the
    basepoint. The idempotent p x x^-1 p^-1 is a circuit at the base below
    that does not lift to a circuit above.
    """
    graph, target, f = pair.source, pair.target, pair.total
    found = []
    for v, path in geodesic_paths(graph, pair.base_up).items():
        present = {entry.label for entry in graph.star(v)}
        wanted = sorted({entry.label for entry in target.star(f(v))})
        for label in wanted:
            if label in present:
                continue
            p = Word(path.word(graph))
            x = Word((label,))
            found.append(MissingLift(v, label, p, p + x + x.inverse() + p.inverse()))
    return found


def find_missing_lift(pair: ImmersionPair) -> Optional[MissingLift]:
    missing = find_missing_lifts(pair)
    return missing[0] if missing else None


def is_full(subject: Union[CosetGraph, ImmersionPair]) -> bool:
    """H is full in L(Γ, v0) exactly when the immersion is a cover."""
    pair = tautological_immersion(subject) if isinstance(subject, CosetGraph) else subject
    return pair.local_class is LocalClass.COVER


def is_normal_cover(pair: ImmersionPair) -> bool:
    if pair.local_class is not LocalClass.COVER:
        return False
    witnesses = deck_witnesses(pair)

    transitive = True
    for v in pair.target.vertices:
        fiber = pair.fiber(v)
        if not fiber:
            continue
        orbit = {gamma[fiber[0]] for gamma in witnesses.values()}
        if orbit != set(fiber):
            transitive = False
            break

    whole_base_fiber = set(deck_fiber(pair)) == set(pair.fiber())
    if transitive != whole_base_fiber:
        raise InternalConsistencyError(
            f"normality routes disagree: transitive fibers={transitive}, "
            f"N(H, v0) = L(Γ, v0) route={whole_base_fiber}")
    return transitive


def is_universal_cover(pair: ImmersionPair) -> bool:
    return pair.local_class is LocalClass.COVER and is_tree(pair.source)


@dataclass(frozen=True)
class CoverReport:
    local_class: LocalClass
    full: bool
    normal: bool
    universal: bool
    missing: Optional[MissingLift]

    def describe(self) -> str:
        lines = [
            f"class: {self.local_class.value}",
            f"full: {str(self.full).lower()}",
            f"normal: {str(self.normal).lower()}",
            f"universal: {str(self.universal).lower()}",
        ]
        if self.missing is not None:
            lines.append(f"missing: {self.missing.vertex} {self.missing.label} {self.missing.idempotent}")
        return "\n".join(lines)


def classify_pair(pair: ImmersionPair) -> CoverReport:
    return CoverReport(
        local_class=pair.local_class,
        full=is_full(pair),
        normal=is_normal_cover(pair),
        universal=is_universal_cover(pair),
        missing=find_missing_lift(pair),
    )


@dataclass(frozen=True, eq=False)
class CompletedCover:
    original: ImmersionPair
    completed_graph: LabeledGraph
    frontier: frozenset[str]
    depth: int
    completed_map: GraphMorphism
    levels: Mapping[str, int]
    attachments: Mapping[str, tuple[str, tuple[Label, ...]]]

    def interior_vertices(self) -> list[str]:
        return [v for v in self.completed_graph.vertices if v not in self.frontier]

    def is_interior_complete(self) -> bool:
        return all(self.completed_map.star_class(v) is LocalClass.COVER for v in self.interior_vertices())

    def as_pair(self) -> ImmersionPair:
        return ImmersionPair(self.completed_map, self.original.base_up, self.original.base_down)

    def truncate(self, depth: int) -> CompletedCover:
        """The completion cut back to depth (as complete_to_cover would build it)."""
        if depth < 1 or depth > self.depth:
            raise DomainError(f"cannot truncate a depth-{self.depth} completion to depth {depth}")
        keep = [v for v in self.completed_graph.vertices if self.levels.get(v, 0) <= depth]
        graph = self.completed_graph.subgraph(keep)
        return CompletedCover(
            original=self.original,
            completed_graph=graph,
            frontier=frozenset(v for v in keep if self.levels.get(v) == depth),
            depth=depth,
            completed_map=GraphMorphism(graph, self.completed_map.target,
                                        {v: self.completed_map(v) for v in keep}),
            levels={v: n for v, n in self.levels.items() if n <= depth},
            attachments={v: a for v, a in self.attachments.items() if self.levels[v] <= depth},
        )


def complete_to_cover(pair: ImmersionPair, depth: int) -> CompletedCover:
    """
    Attach a new vertex and edge for every missing label at every incomplete
    vertex, level after level. New vertices are named <parent>.<label>.
    """
    if depth < 1:
        raise DomainError("completion depth must be at least 1")
    graph, target, f = pair.source, pair.target, pair.total
    vertices = list(graph.vertices)
    edges = list(graph.edges)
    used_vertices = set(vertices)
    used_edges = {e.id for e in edges}
    images = dict(f.vertex_map)
    present = {v: {entry.label for entry in graph.star(v)} for v in vertices}
    levels = {}
    attachments = {}

    pending = list(graph.vertices)
    for level in range(1, depth + 1):
        added = []
        for v in pending:
            for entry in target.star(images[v]):
                if entry.label in present[v]:
                    continue
                child = f"{v}.{entry.label}"
                if child in used_vertices or child in used_edges:
                    raise GraphError(f"cannot name new vertex {child}: id already in use")
                x = entry.label
                src, dst = (v, child) if x.positive else (child, v)
                vertices.append(child)
                edges.append(Edge(child, x.letter, src, dst))
                used_vertices.add(child)
                used_edges.add(child)
                images[child] = entry.end
                present[v].add(x)
                present[child] = {x.inverse()}
                levels[child] = level
                root, labels = attachments.get(v, (v, ()))
                attachments[child] = (root, labels + (x,))
                added.append(child)
        logger.info(f"Completion level {level}: {len(added)} new vertices")
        if not added:
            break
        pending = added

    completed = LabeledGraph(tuple(vertices), tuple(edges))
    result = CompletedCover(
        original=pair,
        completed_graph=completed,
        frontier=frozenset(v for v, n in levels.items() if n == depth),
        depth=depth,
        completed_map=GraphMorphism(completed, target, images),
        levels=levels,
        attachments=attachments,
    )
    if not result.is_interior_complete():
        raise InternalConsistencyError("completion left an interior vertex incomplete")
    return result


def universal_cover(target: LabeledGraph, v0: str, depth: int) -> CompletedCover:
    """Depth-truncated universal cover: complete the one-vertex immersion at v0."""
    target.require_vertex(v0)
    seed = LabeledGraph((v0,))
    return complete_to_cover(ImmersionPair(GraphMorphism(seed, target, {v0: v0}), v0, v0), depth)


def _require_deck_transformation(pair: ImmersionPair, gamma: Mapping[str, str]) -> None:
    graph = pair.source
    if set(gamma) != set(graph.vertices):
        raise DomainError("deck map must be defined on every vertex of the original graph")
    start = gamma[pair.base_up]
    graph.require_vertex(start)
    iso = based_isomorphism(graph, pair.base_up, graph, start)
    if iso is None or any(iso(x) != gamma[x] for x in graph.vertices):
        raise DomainError("map is not an automorphism of the original graph")
    if any(pair.total(gamma[x]) != pair.total(x) for x in graph.vertices):
        raise DomainError("map does not commute with the immersion")


def extend_deck(cc: CompletedCover, gamma: Mapping[str, str]) -> dict[str, str]:
    """
    Extend a deck transformation of the original immersion over the added
    trees: a vertex reached from w by a label path goes to the vertex
    reached from gamma(w) by the same labels.
    """
    _require_deck_transformation(cc.original, gamma)
    graph = cc.completed_graph
    g = cc.completed_map
    extended = dict(gamma)
    for child, (root, labels) in cc.attachments.items():
        image = read_word(graph, gamma[root], labels)
        if image is None or cc.levels.get(image) != cc.levels[child]:
            raise InternalConsistencyError(f"cannot carry {child} along the deck transformation")
        extended[child] = image

    if len(set(extended.values())) != len(graph.vertices):
        raise InternalConsistencyError("extended deck map is not a bijection")
    if {extended[v] for v in cc.frontier} != set(cc.frontier):
        raise InternalConsistencyError("extended deck map does not preserve the frontier")
    for edge in graph.edges:
        entry = graph.move(extended[edge.src], Label(edge.letter))
        if entry is None or entry.end != extended[edge.dst]:
            raise InternalConsistencyError(f"extended deck map breaks edge {edge.id}")
    if any(g(extended[v]) != g(v) for v in graph.vertices):
        raise InternalConsistencyError("extended deck map does not commute with the cover")
    return extended


class QuotientResult(NamedTuple):
    graph: LabeledGraph
    projection: GraphMorphism
    vertex_orbits: dict[str, tuple[str, ...]]
    edge_orbits: dict[str, tuple[str, ...]]
    group: DeckGroup

    def orbit_table(self) -> str:
        lines = [f"# orbit {name}: {' '.join(members)}" for name, members in self.vertex_orbits.items()]
        lines += [f"# edge orbit {name}: {' '.join(members)}" for name, members in self.edge_orbits.items()]
        return "\n".join(lines) + "\n"


def quotient_by_deck(pair: ImmersionPair) -> QuotientResult:
    """Δ/G for the deck group G; the projection is a normal cover."""
    group = deck_group(pair)
    graph = pair.source
    maps = list(group.witness_maps.values())

    vertex_names = {}
    vertex_orbits = {}
    for v in sorted(graph.vertices, key=id_key):
        if v in vertex_names:
            continue
        orbit = tuple(sorted({gamma[v] for gamma in maps}, key=id_key))
        vertex_orbits[orbit[0]] = orbit
        for member in orbit:
            vertex_names[member] = orbit[0]

    def edge_image(gamma, edge):
        return graph.move(gamma[edge.src], Label(edge.letter)).step.edge

    edge_names = {}
    edge_orbits = {}
    quotient_edges = []
    for edge in sorted(graph.edges, key=lambda e: id_key(e.id)):
        if edge.id in edge_names:
            continue
        orbit = tuple(sorted({edge_image(gamma, edge) for gamma in maps}, key=id_key))
        edge_orbits[orbit[0]] = orbit
        for member in orbit:
            edge_names[member] = orbit[0]
        quotient_edges.append(Edge(orbit[0], edge.letter, vertex_names[edge.src], vertex_names[edge.dst]))

    quotient = LabeledGraph(tuple(vertex_orbits), tuple(quotient_edges))
    projection = GraphMorphism(graph, quotient, vertex_names)
    if classify_local(projection) is not LocalClass.COVER:
        raise InternalConsistencyError("quotient map by the deck group is not a cover")
    logger.info(f"Quotient by a deck group of order {group.order}: "
                f"{len(quotient.vertices)} vertices, {len(quotient.edges)} edges")
    return QuotientResult(quotient, projection, vertex_orbits, edge_orbits, group)

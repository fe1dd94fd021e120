"""
Edge-labeled Serre graphs over an alphabet X.

Only positively oriented edges are stored; every edge e carries an implicit
inverse e^-1 running the other way with the inverted label. A step along a
path is an edge id plus a direction. Graphs are immutable values.
"""
from __future__ import annotations

import logging
import re
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple, Optional

import networkx as nx
from networkx.utils import UnionFind

from fimgraph.errors import GraphError, GraphParseError, WordError

logger = logging.getLogger(__name__)


def id_key(identifier: str):
    """Natural sort key for vertex and edge ids (v2 before v10)."""
    chunks = re.split(r'(\d+)', identifier)
    return ([int(c) if i % 2 else c for i, c in enumerate(chunks)], identifier)


@dataclass(frozen=True)
class Label:
    letter: str
    positive: bool = True

    def __post_init__(self):
        if len(self.letter) != 1 or not ('a' <= self.letter <= 'z'):
            raise WordError(f"label letter must be one lowercase ASCII letter, got {self.letter!r}")

    @classmethod
    def parse(cls, char: str) -> Label:
        if len(char) != 1 or not char.isascii() or not char.isalpha():
            raise WordError(f"not a label: {char!r}")
        return cls(char.lower(), char.islower())

    def inverse(self) -> Label:
        return Label(self.letter, not self.positive)

    @property
    def sort_key(self):
        # a < A < b < B < ...
        return (self.letter, not self.positive)

    def __lt__(self, other: Label) -> bool:
        return self.sort_key < other.sort_key

    def __str__(self) -> str:
        return self.letter if self.positive else self.letter.upper()

    def __repr__(self) -> str:
        return f"Label({str(self)!r})"


@dataclass(frozen=True)
class Edge:
    id: str
    letter: str
    src: str
    dst: str


@dataclass(frozen=True)
class Step:
    edge: str
    forward: bool = True

    def inverse(self) -> Step:
        return Step(self.edge, not self.forward)


class StarEntry(NamedTuple):
    label: Label
    step: Step
    end: str


@dataclass(frozen=True)
class LabeledGraph:
    vertices: tuple[str, ...]
    edges: tuple[Edge, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'vertices', tuple(self.vertices))
        object.__setattr__(self, 'edges', tuple(self.edges))
        if len(set(self.vertices)) != len(self.vertices):
            raise GraphError("duplicate vertex id")
        declared = set(self.vertices)
        seen = set()
        for edge in self.edges:
            if edge.id in seen:
                raise GraphError(f"duplicate edge id {edge.id}")
            seen.add(edge.id)
            for end in (edge.src, edge.dst):
                if end not in declared:
                    raise GraphError(f"edge {edge.id} uses unknown vertex {end}")
            Label(edge.letter)

    @cached_property
    def edge_index(self) -> dict[str, Edge]:
        return {edge.id: edge for edge in self.edges}

    @cached_property
    def _stars(self) -> dict[str, tuple[StarEntry, ...]]:
        stars = {v: [] for v in self.vertices}
        for edge in self.edges:
            label = Label(edge.letter)
            stars[edge.src].append(StarEntry(label, Step(edge.id, True), edge.dst))
            stars[edge.dst].append(StarEntry(label.inverse(), Step(edge.id, False), edge.src))
        return {
            v: tuple(sorted(entries, key=lambda s: (s.label.sort_key, id_key(s.step.edge), s.step.forward)))
            for v, entries in stars.items()
        }

    @cached_property
    def _transitions(self) -> dict[tuple[str, Label], StarEntry]:
        table = {}
        for v, entries in self._stars.items():
            for entry in entries:
                table.setdefault((v, entry.label), entry)
        return table

    def has_vertex(self, v: str) -> bool:
        return v in self._stars

    def require_vertex(self, v: str) -> None:
        if v not in self._stars:
            raise GraphError(f"unknown vertex {v}")

    def star(self, v: str) -> tuple[StarEntry, ...]:
        """Edges leaving v, inverse edges included, in label order."""
        self.require_vertex(v)
        return self._stars[v]

    def move(self, v: str, label: Label) -> Optional[StarEntry]:
        """The (first) edge leaving v with the given label, or None."""
        return self._transitions.get((v, label))

    def step_label(self, step: Step) -> Label:
        label = Label(self.edge_index[step.edge].letter)
        return label if step.forward else label.inverse()

    def step_ends(self, step: Step) -> tuple[str, str]:
        edge = self.edge_index.get(step.edge)
        if edge is None:
            raise GraphError(f"unknown edge {step.edge}")
        return (edge.src, edge.dst) if step.forward else (edge.dst, edge.src)

    def alphabet(self) -> frozenset[str]:
        return frozenset(edge.letter for edge in self.edges)

    def to_networkx(self) -> nx.MultiGraph:
        graph = nx.MultiGraph()
        graph.add_nodes_from(self.vertices)
        graph.add_edges_from((e.src, e.dst, e.id) for e in self.edges)
        return graph

    def components(self) -> list[frozenset[str]]:
        parts = [frozenset(c) for c in nx.connected_components(self.to_networkx())]
        return sorted(parts, key=lambda c: id_key(min(c, key=id_key)))

    def is_connected(self) -> bool:
        return bool(self.vertices) and nx.is_connected(self.to_networkx())

    def require_connected(self, operation: str) -> None:
        if not self.is_connected():
            raise GraphError(f"{operation} requires a connected graph")

    def subgraph(self, vertices: Iterable[str], edge_ids: Optional[Iterable[str]] = None) -> LabeledGraph:
        """Subgraph on the given vertices; induced unless edge ids are given."""
        keep = set(vertices)
        for v in keep:
            self.require_vertex(v)
        if edge_ids is None:
            edges = [e for e in self.edges if e.src in keep and e.dst in keep]
        else:
            wanted = set(edge_ids)
            unknown = wanted - set(self.edge_index)
            if unknown:
                raise GraphError(f"unknown edges {sorted(unknown, key=id_key)}")
            edges = [e for e in self.edges if e.id in wanted]
        return LabeledGraph(tuple(v for v in self.vertices if v in keep), tuple(edges))


@dataclass(frozen=True)
class PathWitness:
    start: str
    steps: tuple[Step, ...] = ()

    def validate(self, graph: LabeledGraph) -> None:
        graph.require_vertex(self.start)
        here = self.start
        for i, step in enumerate(self.steps):
            alpha, omega = graph.step_ends(step)
            if alpha != here:
                raise GraphError(f"step {i} of path leaves {alpha}, expected {here}")
            here = omega

    def end(self, graph: LabeledGraph) -> str:
        here = self.start
        for step in self.steps:
            here = graph.step_ends(step)[1]
        return here

    def word(self, graph: LabeledGraph) -> tuple[Label, ...]:
        return tuple(graph.step_label(step) for step in self.steps)

    def inverse(self, graph: LabeledGraph) -> PathWitness:
        return PathWitness(self.end(graph), tuple(s.inverse() for s in reversed(self.steps)))

    def __len__(self) -> int:
        return len(self.steps)


class ParsedGraph(NamedTuple):
    graph: LabeledGraph
    base: Optional[str]
    frontier: frozenset[str]


def parse_graph(text: str) -> ParsedGraph:
    """
    Read the line-based graph format:

        # comment
        vertex <id>
        edge <id> <letter> <src> <dst>
        base <id>
        frontier <id>
    """
    vertices = []
    vertex_lines = {}
    edges = []
    edge_lines = {}
    base = None
    base_line = None
    frontier = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith('#'):
            continue
        parts = line.split()
        directive, args = parts[0], parts[1:]
        if directive == 'vertex':
            if len(args) != 1:
                raise GraphParseError(number, "expected: vertex <id>")
            if args[0] in vertex_lines:
                raise GraphParseError(number, f"duplicate vertex {args[0]}")
            vertex_lines[args[0]] = number
            vertices.append(args[0])
        elif directive == 'edge':
            if len(args) != 4:
                raise GraphParseError(number, "expected: edge <id> <letter> <src> <dst>")
            edge_id, letter, src, dst = args
            if edge_id in edge_lines:
                raise GraphParseError(number, f"duplicate edge id {edge_id}")
            if len(letter) != 1 or not ('a' <= letter <= 'z'):
                raise GraphParseError(number, f"label must be a single lowercase letter, got {letter!r}")
            edge_lines[edge_id] = number
            edges.append(Edge(edge_id, letter, src, dst))
        elif directive == 'base':
            if len(args) != 1:
                raise GraphParseError(number, "expected: base <id>")
            if base is not None:
                raise GraphParseError(number, "duplicate base directive")
            base, base_line = args[0], number
        elif directive == 'frontier':
            if len(args) != 1:
                raise GraphParseError(number, "expected: frontier <id>")
            frontier.append((args[0], number))
        else:
            raise GraphParseError(number, f"unknown directive {directive!r}")

    for edge in edges:
        for end in (edge.src, edge.dst):
            if end not in vertex_lines:
                raise GraphParseError(edge_lines[edge.id], f"unknown vertex {end}")
    if base is not None and base not in vertex_lines:
        raise GraphParseError(base_line, f"unknown vertex {base}")
    for vertex, number in frontier:
        if vertex not in vertex_lines:
            raise GraphParseError(number, f"unknown vertex {vertex}")

    graph = LabeledGraph(tuple(vertices), tuple(edges))
    return ParsedGraph(graph, base, frozenset(v for v, _ in frontier))


def serialize_graph(graph: LabeledGraph, base: Optional[str] = None, frontier: Iterable[str] = ()) -> str:
    lines = [f"vertex {v}" for v in sorted(graph.vertices, key=id_key)]
    lines += [f"edge {e.id} {e.letter} {e.src} {e.dst}" for e in sorted(graph.edges, key=lambda e: id_key(e.id))]
    if base is not None:
        graph.require_vertex(base)
        lines.append(f"base {base}")
    lines += [f"frontier {v}" for v in sorted(frontier, key=id_key)]
    return "\n".join(lines) + "\n"


def bouquet(alphabet: Iterable[str], vertex: str = 'o') -> LabeledGraph:
    """B_X: one vertex, one positive loop per letter."""
    letters = sorted(set(alphabet))
    return LabeledGraph((vertex,), tuple(Edge(x, x, vertex, vertex) for x in letters))


def is_deterministic(graph: LabeledGraph) -> bool:
    for v in graph.vertices:
        labels = [entry.label for entry in graph.star(v)]
        if len(labels) != len(set(labels)):
            return False
    return True


def read_word(graph: LabeledGraph, start: str, labels: Iterable[Label]) -> Optional[str]:
    """Endpoint of the path from start spelling labels, None if it leaves the graph."""
    graph.require_vertex(start)
    here = start
    for label in labels:
        entry = graph.move(here, label)
        if entry is None:
            return None
        here = entry.end
    return here


def path_for_word(graph: LabeledGraph, start: str, labels: Iterable[Label]) -> Optional[PathWitness]:
    graph.require_vertex(start)
    here = start
    steps = []
    for label in labels:
        entry = graph.move(here, label)
        if entry is None:
            return None
        steps.append(entry.step)
        here = entry.end
    return PathWitness(start, tuple(steps))


def geodesic_paths(graph: LabeledGraph, root: str) -> dict[str, PathWitness]:
    """Breadth-first shortest paths from root, labels taken in order a < A < b < B."""
    graph.require_vertex(root)
    paths = {root: PathWitness(root)}
    queue = deque([root])
    while queue:
        here = queue.popleft()
        for entry in graph.star(here):
            if entry.end not in paths:
                paths[entry.end] = PathWitness(root, paths[here].steps + (entry.step,))
                queue.append(entry.end)
    return paths


def geodesic_words(graph: LabeledGraph, root: str) -> dict[str, tuple[Label, ...]]:
    return {v: path.word(graph) for v, path in geodesic_paths(graph, root).items()}


def spanning_tree_edges(graph: LabeledGraph, root: str) -> frozenset[str]:
    """Positive edges of the breadth-first spanning tree at root."""
    graph.require_connected("spanning_tree_edges")
    return frozenset(path.steps[-1].edge for path in geodesic_paths(graph, root).values() if path.steps)


class LocalClass(str, Enum):
    NOT_IMMERSION = 'not_immersion'
    IMMERSION = 'immersion'
    COVER = 'cover'


@dataclass(frozen=True, eq=False)
class GraphMorphism:
    """
    Label-preserving morphism given by its vertex map; the edge map is
    induced through the (deterministic) target.
    """
    source: LabeledGraph
    target: LabeledGraph
    vertex_map: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, 'vertex_map', dict(self.vertex_map))
        missing = [v for v in self.source.vertices if v not in self.vertex_map]
        if missing:
            raise GraphError(f"vertex map is not total, missing {missing[0]}")
        for v, image in self.vertex_map.items():
            self.source.require_vertex(v)
            self.target.require_vertex(image)
        if not is_deterministic(self.target):
            raise GraphError("morphism target must be deterministic")
        self.edge_map  # validates incidence

    @cached_property
    def edge_map(self) -> dict[str, str]:
        images = {}
        for edge in self.source.edges:
            entry = self.target.move(self.vertex_map[edge.src], Label(edge.letter))
            if entry is None or entry.end != self.vertex_map[edge.dst]:
                raise GraphError(f"edge {edge.id} has no image with label {edge.letter}")
            images[edge.id] = entry.step.edge
        return images

    def __call__(self, v: str) -> str:
        return self.vertex_map[v]

    def map_step(self, step: Step) -> Step:
        return Step(self.edge_map[step.edge], step.forward)

    def map_path(self, path: PathWitness) -> PathWitness:
        return PathWitness(self.vertex_map[path.start], tuple(self.map_step(s) for s in path.steps))

    def star_class(self, v: str) -> LocalClass:
        images = [self.map_step(entry.step) for entry in self.source.star(v)]
        if len(set(images)) != len(images):
            return LocalClass.NOT_IMMERSION
        target_star = {entry.step for entry in self.target.star(self.vertex_map[v])}
        return LocalClass.COVER if set(images) == target_star else LocalClass.IMMERSION


def classify_local(morphism: GraphMorphism) -> LocalClass:
    result = LocalClass.COVER
    for v in morphism.source.vertices:
        local = morphism.star_class(v)
        if local is LocalClass.NOT_IMMERSION:
            return local
        if local is LocalClass.IMMERSION:
            result = LocalClass.IMMERSION
    return result


def induced_morphism(graph: LabeledGraph, v: str, other: LabeledGraph, w: str) -> Optional[GraphMorphism]:
    """The unique label-preserving morphism sending v to w, or None."""
    graph.require_connected("induced_morphism")
    if not is_deterministic(graph):
        raise GraphError("induced_morphism requires a deterministic source")
    if not is_deterministic(other):
        raise GraphError("induced_morphism requires a deterministic target")
    graph.require_vertex(v)
    other.require_vertex(w)
    mapping = {v: w}
    queue = deque([v])
    while queue:
        here = queue.popleft()
        for entry in graph.star(here):
            image = other.move(mapping[here], entry.label)
            if image is None:
                return None
            if entry.end in mapping:
                if mapping[entry.end] != image.end:
                    return None
            else:
                mapping[entry.end] = image.end
                queue.append(entry.end)
    return GraphMorphism(graph, other, mapping)


class LiftResult(NamedTuple):
    lifted: PathWitness
    suffix: tuple[Step, ...]


def lift_maximal(morphism: GraphMorphism, path: PathWitness, start: str) -> LiftResult:
    """Lift the longest possible initial segment of path at start."""
    if classify_local(morphism) is LocalClass.NOT_IMMERSION:
        raise GraphError("lift_maximal requires an immersion")
    path.validate(morphism.target)
    morphism.source.require_vertex(start)
    if morphism(start) != path.start:
        raise GraphError(f"{start} does not lie over {path.start}")
    here = start
    lifted = []
    for i, step in enumerate(path.steps):
        entry = morphism.source.move(here, morphism.target.step_label(step))
        if entry is None or morphism.map_step(entry.step) != step:
            return LiftResult(PathWitness(start, tuple(lifted)), path.steps[i:])
        lifted.append(entry.step)
        here = entry.end
    return LiftResult(PathWitness(start, tuple(lifted)), ())


def based_isomorphism(graph: LabeledGraph, v: str, other: LabeledGraph, w: str) -> Optional[GraphMorphism]:
    if len(graph.vertices) != len(other.vertices) or len(graph.edges) != len(other.edges):
        return None
    there = induced_morphism(graph, v, other, w)
    if there is None:
        return None
    back = induced_morphism(other, w, graph, v)
    if back is None:
        return None
    if any(back(there(x)) != x for x in graph.vertices):
        return None
    if any(there(back(y)) != y for y in other.vertices):
        return None
    return there


def based_isomorphic(graph: LabeledGraph, v: str, other: LabeledGraph, w: str) -> bool:
    return based_isomorphism(graph, v, other, w) is not None


class FoldResult(NamedTuple):
    graph: LabeledGraph
    projection: dict[str, str]


def fold(graph: LabeledGraph, root: Optional[str] = None) -> FoldResult:
    """
    Stallings folding: merge co-initial (or co-terminal) edges with equal
    labels until the graph is deterministic. Output ids are canonical:
    vertices v0, v1, ... and edges e0, e1, ... in breadth-first order from
    the class of root (default: the smallest vertex id). Each later
    component starts at its smallest vertex id in natural order, so folding
    a folded graph again keeps every name.
    """
    classes = UnionFind(graph.vertices)
    alive = list(graph.edges)
    changed = True
    while changed:
        changed = False
        outgoing = {}
        incoming = {}
        survivors = []
        for edge in alive:
            src, dst = classes[edge.src], classes[edge.dst]
            twin = outgoing.get((src, edge.letter))
            if twin is not None:
                classes.union(twin.dst, edge.dst)
                changed = True
                continue
            twin = incoming.get((dst, edge.letter))
            if twin is not None:
                classes.union(twin.src, edge.src)
                changed = True
                continue
            outgoing[(src, edge.letter)] = edge
            incoming[(dst, edge.letter)] = edge
            survivors.append(edge)
        alive = survivors

    reps = []
    for v in graph.vertices:
        if classes[v] not in reps:
            reps.append(classes[v])
    folded = LabeledGraph(
        tuple(reps),
        tuple(Edge(e.id, e.letter, classes[e.src], classes[e.dst]) for e in alive),
    )

    starts = [] if root is None else [root]
    starts += sorted(graph.vertices, key=id_key)
    vertex_names = {}
    edge_names = {}
    for start in starts:
        if classes[start] in vertex_names:
            continue
        vertex_names[classes[start]] = f"v{len(vertex_names)}"
        queue = deque([classes[start]])
        while queue:
            here = queue.popleft()
            for entry in folded.star(here):
                if entry.step.edge not in edge_names:
                    edge_names[entry.step.edge] = f"e{len(edge_names)}"
                if entry.end not in vertex_names:
                    vertex_names[entry.end] = f"v{len(vertex_names)}"
                    queue.append(entry.end)

    order = sorted(folded.edges, key=lambda e: int(edge_names[e.id][1:]))
    result = LabeledGraph(
        tuple(sorted(vertex_names.values(), key=id_key)),
        tuple(Edge(edge_names[e.id], e.letter, vertex_names[e.src], vertex_names[e.dst]) for e in order),
    )
    projection = {v: vertex_names[classes[v]] for v in graph.vertices}
    logger.info(f"Folded {len(graph.vertices)} vertices / {len(graph.edges)} edges "
                f"into {len(result.vertices)} / {len(result.edges)}")
    return FoldResult(result, projection)


def is_tree(graph: LabeledGraph) -> bool:
    graph.require_connected("is_tree")
    return len(graph.edges) == len(graph.vertices) - 1


def fg_rank(graph: LabeledGraph) -> int:
    """Rank of the free fundamental group: edges outside a spanning tree."""
    graph.require_connected("fg_rank")
    return len(graph.edges) - len(graph.vertices) + 1

"""
Deck transformations of an immersion f: Δ -> Γ.

A deck transformation is pinned down by where it sends the basepoint, so
group elements are named by that vertex. The group is built two ways:
by lifting paths (the N(H)/H route) and by brute force over all
candidate basepoint images.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Optional

from fimgraph.errors import GraphError, InternalConsistencyError
from fimgraph.graph_core import (
    LabeledGraph,
    PathWitness,
    based_isomorphic,
    based_isomorphism,
    geodesic_paths,
    id_key,
    induced_morphism,
    lift_maximal,
)
from fimgraph.submonoid import (
    CosetGraph,
    ImmersionPair,
    act,
    coset_name,
    from_generators,
    loop_generators,
    normalizer_contains,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DeckGroup:
    elements: tuple[str, ...]
    identity: str
    table: Mapping[tuple[str, str], str]
    witness_maps: Mapping[str, Mapping[str, str]]
    coset_names: Optional[Mapping[str, str]] = field(default=None)

    @property
    def order(self) -> int:
        return len(self.elements)

    def multiply(self, a: str, b: str) -> str:
        return self.table[(a, b)]

    def inverse(self, a: str) -> str:
        for b in self.elements:
            if self.table[(a, b)] == self.identity:
                return b
        raise InternalConsistencyError(f"element {a} has no inverse")

    def check_axioms(self) -> None:
        """Exhaustive group-table check."""
        members = set(self.elements)
        for a in self.elements:
            if self.table[(self.identity, a)] != a or self.table[(a, self.identity)] != a:
                raise InternalConsistencyError(f"{self.identity} is not an identity for {a}")
            for b in self.elements:
                if self.table[(a, b)] not in members:
                    raise InternalConsistencyError(f"product {a}*{b} leaves the group")
                for c in self.elements:
                    if self.table[(self.table[(a, b)], c)] != self.table[(a, self.table[(b, c)])]:
                        raise InternalConsistencyError(f"table is not associative at {a},{b},{c}")
        for a in self.elements:
            self.inverse(a)

    def name(self, element: str) -> str:
        return self.coset_names[element] if self.coset_names else element

    def cayley_rows(self) -> list[list[str]]:
        return [[self.table[(a, b)] for b in self.elements] for a in self.elements]

    def describe(self) -> str:
        names = [self.name(e) for e in self.elements]
        width = max(len(n) for n in names)
        lines = [f"order: {self.order}", f"elements: {' '.join(names)}", "table:"]
        lines.append(f"{'*':<{width}} | " + ' '.join(f"{n:<{width}}" for n in names).rstrip())
        for a, row in zip(names, self.cayley_rows()):
            lines.append(f"{a:<{width}} | " + ' '.join(f"{self.name(c):<{width}}" for c in row).rstrip())
        return "\n".join(lines)

    def as_dict(self) -> dict:
        return {
            'order': self.order,
            'identity': self.name(self.identity),
            'elements': [self.name(e) for e in self.elements],
            'fiber_vertices': list(self.elements),
            'table': [[self.name(c) for c in row] for row in self.cayley_rows()],
        }


def _commutes(pair: ImmersionPair, vertex_map: Mapping[str, str]) -> bool:
    f = pair.total
    return all(f(vertex_map[x]) == f(x) for x in pair.source.vertices)


def deck_witnesses(pair: ImmersionPair) -> dict[str, dict[str, str]]:
    witnesses = {}
    for v in pair.fiber():
        iso = based_isomorphism(pair.source, pair.base_up, pair.source, v)
        if iso is not None and _commutes(pair, iso.vertex_map):
            witnesses[v] = dict(iso.vertex_map)
    return witnesses


def deck_fiber(pair: ImmersionPair) -> list[str]:
    """Fiber vertices that some deck transformation takes the basepoint to."""
    return sorted(deck_witnesses(pair), key=id_key)


def _check_coset_identification(pair: ImmersionPair) -> None:
    rebuilt = from_generators(loop_generators(pair.source, pair.base_up))
    if not based_isomorphic(rebuilt.graph, rebuilt.base, pair.source, pair.base_up):
        raise InternalConsistencyError(
            "total graph is not the coset graph of its own loop monoid; folding is broken")


def deck_group(pair: ImmersionPair, paths: Optional[Mapping[str, PathWitness]] = None) -> DeckGroup:
    """
    G(Δ) through N(H, v0)/H: the product u*w is the endpoint of the lift
    at u of (the image of) a path from the basepoint to w.
    """
    _check_coset_identification(pair)
    witnesses = deck_witnesses(pair)
    elements = tuple(sorted(witnesses, key=id_key))
    chosen = geodesic_paths(pair.source, pair.base_up)
    if paths:
        chosen.update(paths)
    f = pair.total
    table = {}
    for w in elements:
        route = chosen[w]
        route.validate(pair.source)
        if route.start != pair.base_up or route.end(pair.source) != w:
            raise GraphError(f"path for {w} must run from {pair.base_up} to {w}")
        image = f.map_path(route)
        for u in elements:
            lifted, suffix = lift_maximal(f, image, u)
            if suffix:
                raise InternalConsistencyError(f"path to {w} does not lift at {u}")
            table[(u, w)] = lifted.end(pair.source)
    group = DeckGroup(elements, pair.base_up, table, witnesses)
    group.check_axioms()
    logger.info(f"Deck group of order {group.order} at basepoint {pair.base_up}")
    return group


def _automorphism_to(pair: ImmersionPair, candidate: str) -> Optional[dict[str, str]]:
    graph = pair.source
    morphism = induced_morphism(graph, pair.base_up, graph, candidate)
    if morphism is None:
        return None
    if len(set(morphism.vertex_map.values())) != len(graph.vertices):
        return None
    if len(set(morphism.edge_map.values())) != len(graph.edges):
        return None
    if not _commutes(pair, morphism.vertex_map):
        return None
    return dict(morphism.vertex_map)


def brute_force_deck(pair: ImmersionPair, workers: int = 1) -> DeckGroup:
    """Try every vertex as the image of the basepoint; compose maps for the table."""
    candidates = sorted(pair.source.vertices, key=id_key)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            found = list(pool.map(lambda c: _automorphism_to(pair, c), candidates))
    else:
        found = [_automorphism_to(pair, c) for c in candidates]
    witnesses = {c: m for c, m in zip(candidates, found) if m is not None}
    elements = tuple(witnesses)
    base = pair.base_up
    table = {(a, b): witnesses[a][witnesses[b][base]] for a in elements for b in elements}
    group = DeckGroup(elements, base, table, witnesses)
    group.check_axioms()
    return group


def omega_coset_group(h: CosetGraph) -> DeckGroup:
    """N(H)/H with (Hp)(Hq) = (Hpq), on the normalizing cosets."""
    reps = h.representatives
    elements = tuple(v for v in sorted(h.graph.vertices, key=id_key) if normalizer_contains(h, reps[v]))
    table = {}
    for u in elements:
        for w in elements:
            product = act(h, h.base, reps[u] + reps[w])
            if product not in elements:
                raise InternalConsistencyError(f"coset product {reps[u]}*{reps[w]} left N(H)/H")
            table[(u, w)] = product
    witnesses = {u: dict(based_isomorphism(h.graph, h.base, h.graph, u).vertex_map) for u in elements}
    group = DeckGroup(elements, h.base, table, witnesses, {u: coset_name(h, u) for u in elements})
    group.check_axioms()
    return group


@dataclass(frozen=True, eq=False)
class PartialIsomorphism:
    """Label-preserving isomorphism between two subgraphs of the total graph."""
    vertex_map: Mapping[str, str]
    edge_map: Mapping[str, str]

    def then(self, other: PartialIsomorphism) -> PartialIsomorphism:
        """Apply self, then other, on the part of self's range that other accepts."""
        return PartialIsomorphism(
            {x: other.vertex_map[y] for x, y in self.vertex_map.items() if y in other.vertex_map},
            {e: other.edge_map[d] for e, d in self.edge_map.items() if d in other.edge_map},
        )

    def inverse(self) -> PartialIsomorphism:
        return PartialIsomorphism(
            {y: x for x, y in self.vertex_map.items()},
            {d: e for e, d in self.edge_map.items()},
        )

    def is_valid_for(self, pair: ImmersionPair) -> bool:
        graph = pair.source
        f = pair.total
        if len(set(self.vertex_map.values())) != len(self.vertex_map):
            return False
        if len(set(self.edge_map.values())) != len(self.edge_map):
            return False
        for x, y in self.vertex_map.items():
            if f(x) != f(y):
                return False
        for e, d in self.edge_map.items():
            source, image = graph.edge_index[e], graph.edge_index[d]
            if source.letter != image.letter:
                return False
            if self.vertex_map.get(source.src) != image.src or self.vertex_map.get(source.dst) != image.dst:
                return False
        return True


def partial_iso(pair: ImmersionPair, v1: str, v2: str, dom: LabeledGraph) -> Optional[PartialIsomorphism]:
    graph = pair.source
    for v in dom.vertices:
        graph.require_vertex(v)
    for e in dom.edges:
        known = graph.edge_index.get(e.id)
        if known != e:
            raise GraphError(f"edge {e.id} of the domain is not an edge of the total graph")
    if not dom.has_vertex(v1):
        raise GraphError(f"{v1} is not in the domain")
    dom.require_connected("partial_iso")
    graph.require_vertex(v2)
    f = pair.total
    vertex_map = {v1: v2}
    edge_map = {}
    queue = [v1]
    while queue:
        here = queue.pop(0)
        if f(here) != f(vertex_map[here]):
            return None
        for entry in dom.star(here):
            image = graph.move(vertex_map[here], entry.label)
            if image is None:
                return None
            if edge_map.setdefault(entry.step.edge, image.step.edge) != image.step.edge:
                return None
            if entry.end in vertex_map:
                if vertex_map[entry.end] != image.end:
                    return None
            else:
                vertex_map[entry.end] = image.end
                queue.append(entry.end)
    if len(set(vertex_map.values())) != len(vertex_map) or len(set(edge_map.values())) != len(edge_map):
        return None
    return PartialIsomorphism(vertex_map, edge_map)

"""
The free inverse monoid FIM(X) through Munn trees.

An element is a finite subtree of the Cayley tree of the free group,
stored as its sorted set of reduced-word vertices, together with the
reduced word of its terminal root. Two words are equal in FIM(X) exactly
when these pairs agree.

Word strings use lowercase for generators and uppercase for their
inverses; the empty word is written ``1``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Iterator, Union

from fimgraph.errors import WordError
from fimgraph.graph_core import Edge, LabeledGraph, Label

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Word:
    labels: tuple[Label, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'labels', tuple(self.labels))

    @classmethod
    def parse(cls, text: str) -> Word:
        text = text.strip()
        if text in ('', '1'):
            return cls(())
        try:
            return cls(tuple(Label.parse(ch) for ch in text))
        except WordError:
            raise WordError(f"not a word: {text!r} (use letters, uppercase for inverses, 1 for empty)")

    @property
    def sort_key(self):
        """Shortlex with a < A < b < B < ..."""
        return (len(self.labels), tuple(label.sort_key for label in self.labels))

    def inverse(self) -> Word:
        return Word(tuple(label.inverse() for label in reversed(self.labels)))

    def alphabet(self) -> frozenset[str]:
        return frozenset(label.letter for label in self.labels)

    def __add__(self, other: Word) -> Word:
        return Word(self.labels + other.labels)

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self) -> Iterator[Label]:
        return iter(self.labels)

    def __getitem__(self, index):
        if isinstance(index, slice):
            return Word(self.labels[index])
        return self.labels[index]

    def __bool__(self) -> bool:
        return bool(self.labels)

    def __str__(self) -> str:
        return ''.join(str(label) for label in self.labels) or '1'

    def __repr__(self) -> str:
        return f"Word({str(self)!r})"


WordLike = Union[Word, str]


def as_word(w: WordLike) -> Word:
    return w if isinstance(w, Word) else Word.parse(w)


def reduce(w: WordLike) -> Word:
    """Free reduction: cancel adjacent x x^-1 pairs until none remain."""
    stack = []
    for label in as_word(w):
        if stack and stack[-1] == label.inverse():
            stack.pop()
        else:
            stack.append(label)
    return Word(tuple(stack))


@dataclass(frozen=True)
class MunnElement:
    tree: tuple[Word, ...]
    root: Word

    def __post_init__(self):
        vertices = sorted(set(self.tree), key=lambda t: t.sort_key)
        object.__setattr__(self, 'tree', tuple(vertices))
        members = set(vertices)
        if Word() not in members:
            raise WordError("Munn tree must contain the empty word")
        if self.root not in members:
            raise WordError(f"root {self.root} is not a tree vertex")
        for t in vertices:
            if t and t[:-1] not in members:
                raise WordError(f"tree is not prefix closed at {t}")

    def inverse(self) -> MunnElement:
        back = self.root.inverse()
        return MunnElement(tuple(reduce(back + t) for t in self.tree), back)

    def is_idempotent(self) -> bool:
        return not self.root

    def children(self) -> dict[Word, list[Word]]:
        kids = {t: [] for t in self.tree}
        for t in self.tree:
            if t:
                kids[t[:-1]].append(t)
        return kids

    def to_word(self) -> Word:
        """
        A representative: walk every branch of the tree in label order and
        come back, then read the geodesic to the root.
        """
        kids = self.children()
        out = []
        descent = []
        stack = [iter(kids[Word()])]
        while stack:
            child = next(stack[-1], None)
            if child is None:
                stack.pop()
                if descent:
                    out.append(descent.pop().inverse())
                continue
            last = child[-1]
            out.append(last)
            descent.append(last)
            stack.append(iter(kids[child]))
        return Word(tuple(out)) + self.root

    def describe(self) -> str:
        return f"vertices: {' '.join(str(t) for t in self.tree)}\nroot: {self.root}"


IDENTITY = MunnElement((Word(),), Word())


def munn_element(w: WordLike) -> MunnElement:
    """Walk w through the Cayley tree from 1, recording every vertex visited."""
    here = []
    visited = {Word()}
    for label in as_word(w):
        if here and here[-1] == label.inverse():
            here.pop()
        else:
            here.append(label)
        visited.add(Word(tuple(here)))
    return MunnElement(tuple(visited), Word(tuple(here)))


def munn_element_from_prefixes(w: WordLike) -> MunnElement:
    """Same element computed from the reduced forms of all prefixes."""
    w = as_word(w)
    return MunnElement(tuple(reduce(w[:i]) for i in range(len(w) + 1)), reduce(w))


def fim_equal(u: WordLike, v: WordLike) -> bool:
    return munn_element(u) == munn_element(v)


def fim_mul(u: MunnElement, v: MunnElement) -> MunnElement:
    """MT(uv) = MT(u) together with MT(v) translated by r(u)."""
    shifted = tuple(reduce(u.root + t) for t in v.tree)
    return MunnElement(u.tree + shifted, reduce(u.root + v.root))


def fim_product(words: Iterable[WordLike]) -> MunnElement:
    result = IDENTITY
    for w in words:
        result = fim_mul(result, munn_element(w))
    return result


def fim_inverse(w: WordLike) -> Word:
    return as_word(w).inverse()


def is_idempotent(w: WordLike) -> bool:
    return not reduce(w)


def nat_leq(u: WordLike, v: WordLike) -> bool:
    """u <= v in the natural partial order: MT(v) inside MT(u), same root."""
    mu, mv = munn_element(u), munn_element(v)
    return mu.root == mv.root and set(mv.tree) <= set(mu.tree)


def munn_tree_graph(element: MunnElement) -> tuple[LabeledGraph, str]:
    """The Munn tree as a labeled graph based at the vertex ``1``."""
    vertices = tuple(str(t) for t in element.tree)
    edges = []
    for t in element.tree:
        if not t:
            continue
        last, parent = t[-1], t[:-1]
        if last.positive:
            edges.append(Edge(f"e_{t}", last.letter, str(parent), str(t)))
        else:
            edges.append(Edge(f"e_{t}", last.letter, str(t), str(parent)))
    return LabeledGraph(vertices, tuple(edges)), str(Word())

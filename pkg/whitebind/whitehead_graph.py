"""Whitehead graphs of cyclic words and the Stallings cut-vertex criterion."""

from dataclasses import dataclass
from enum import Enum
from typing import Any

import networkx as nx

from whitebind.automorphisms import TypeIIMove, check_rank
from whitebind.errors import EmptyWord
from whitebind.words import (
    CyclicWord,
    Letter,
    format_word,
    generator,
    letter_key,
    letter_name,
    signed_letters,
)


@dataclass(frozen=True)
class WhiteheadGraph:
    """Multigraph on the 2g signed letters, one edge per cyclically adjacent pair.

    Attributes:
        rank: Rank of the free group
        edges: Edge multiset; each pair is ordered by vertex order (x1, X1, x2, ...)
            and the tuple is sorted, parallel edges repeated
    """

    rank: int
    edges: tuple[tuple[Letter, Letter], ...]

    @property
    def vertices(self) -> tuple[Letter, ...]:
        return signed_letters(self.rank)

    def to_networkx(self) -> nx.MultiGraph:
        graph = nx.MultiGraph()
        graph.add_nodes_from(self.vertices)
        graph.add_edges_from(self.edges)
        return graph


def _edge(u: Letter, v: Letter) -> tuple[Letter, Letter]:
    return (u, v) if letter_key(u) <= letter_key(v) else (v, u)


def build(cyclic: CyclicWord) -> WhiteheadGraph:
    """Whitehead graph of a cyclic word.

    Each cyclically adjacent pair (w_i, w_{i+1}) contributes the edge
    {w_i, w_{i+1}^-1}, so the graph has exactly as many edges as the word has
    letters.

    Raises:
        EmptyWord: for the identity
    """
    letters = cyclic.letters
    if not letters:
        raise EmptyWord("the identity has no Whitehead graph")
    n = len(letters)
    edges = [_edge(letters[i], -letters[(i + 1) % n]) for i in range(n)]
    edges.sort(key=lambda edge: (letter_key(edge[0]), letter_key(edge[1])))
    return WhiteheadGraph(cyclic.rank, tuple(edges))


def is_connected(graph: WhiteheadGraph) -> bool:
    """Connectivity over all 2g vertices; an unused generator disconnects."""
    return bool(nx.is_connected(graph.to_networkx()))


def cut_vertices(graph: WhiteheadGraph) -> frozenset[Letter]:
    """Articulation points.

    Removing a vertex is unaffected by edge multiplicity, so the points are
    computed on the simple graph underneath the multigraph.
    """
    simple = nx.Graph(graph.to_networkx())
    return frozenset(nx.articulation_points(simple))


def components(graph: WhiteheadGraph) -> list[list[Letter]]:
    """Connected components, each in vertex order, ordered by first vertex."""
    parts = [sorted(part, key=letter_key) for part in nx.connected_components(graph.to_networkx())]
    return sorted(parts, key=lambda part: letter_key(part[0]))


def cut_size(graph: WhiteheadGraph, subset: frozenset[Letter]) -> int:
    """Number of edges with exactly one end in the subset."""
    return sum(1 for u, v in graph.edges if (u in subset) != (v in subset))


def type_II_image_length(graph: WhiteheadGraph, move: TypeIIMove) -> int:
    """Cyclic length of the image under a type II move, read off the Whitehead graph.

    Letters of other generators survive unchanged; between them the image holds
    powers of the multiplier, one letter per edge crossing the move's set. So the
    new length is |w| - deg(a) + cut_size(S).

    Raises:
        RankMismatch: if the move does not fit the graph's rank
    """
    check_rank(move, graph.rank)
    a = generator(move.multiplier)
    degree = sum((generator(u) == a) + (generator(v) == a) for u, v in graph.edges)
    return len(graph.edges) - degree // 2 + cut_size(graph, move.subset)


class CriterionOutcome(str, Enum):
    BINDS_CERTIFIED = "binds_certified"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class StallingsCriterion:
    """Result of the Stallings test on one cyclic word.

    ``INCONCLUSIVE`` never means separable; the test only certifies binding.
    """

    word: CyclicWord
    outcome: CriterionOutcome
    connected: bool
    cut_vertices: frozenset[Letter]
    components: tuple[tuple[Letter, ...], ...]

    @property
    def certified(self) -> bool:
        return self.outcome is CriterionOutcome.BINDS_CERTIFIED

    @property
    def explanation(self) -> str:
        word = format_word(self.word)
        if self.certified:
            return (
                f"The Whitehead graph of {word} is connected and has no cut vertex, so {word} "
                f"lies in no proper free factor (Stallings). For a curve on the boundary of "
                f"the genus {self.word.rank} handlebody this means it meets every disk of a "
                f"complete meridian disk system essentially."
            )
        if not self.connected:
            parts = ", ".join(
                "{" + ", ".join(letter_name(v) for v in part) + "}" for part in self.components
            )
            return (
                f"The Whitehead graph of {word} is disconnected ({parts}); "
                f"the criterion is inconclusive."
            )
        cuts = ", ".join(letter_name(v) for v in sorted(self.cut_vertices, key=letter_key))
        return (
            f"The Whitehead graph of {word} has cut vertices {cuts}; "
            f"the criterion is inconclusive."
        )


def stallings_criterion(cyclic: CyclicWord) -> StallingsCriterion:
    """Certify binding when the Whitehead graph is connected without cut vertices.

    Raises:
        EmptyWord: for the identity
    """
    graph = build(cyclic)
    connected = is_connected(graph)
    cuts = cut_vertices(graph) if connected else frozenset()
    outcome = (
        CriterionOutcome.BINDS_CERTIFIED
        if connected and not cuts
        else CriterionOutcome.INCONCLUSIVE
    )
    return StallingsCriterion(
        word=cyclic,
        outcome=outcome,
        connected=connected,
        cut_vertices=cuts,
        components=tuple(tuple(part) for part in components(graph)),
    )


def to_dot(graph: WhiteheadGraph) -> str:
    """Deterministic DOT text: vertices in order x1, X1, x2, ..., then sorted edges."""
    lines = ["graph whitehead {"]
    lines.extend(f"  {letter_name(vertex)};" for vertex in graph.vertices)
    lines.extend(f"  {letter_name(u)} -- {letter_name(v)};" for u, v in graph.edges)
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_json(graph: WhiteheadGraph) -> dict[str, Any]:
    """JSON form {"vertices": [...], "edges": [[v, w], ...]} in DOT order."""
    return {
        "vertices": [letter_name(vertex) for vertex in graph.vertices],
        "edges": [[letter_name(u), letter_name(v)] for u, v in graph.edges],
    }

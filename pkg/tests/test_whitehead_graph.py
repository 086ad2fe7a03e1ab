import json
from pathlib import Path

import pytest
from conftest import invert_cyclic

from whitebind.automorphisms import TypeIIMove, apply_move, enumerate_type_II
from whitebind.errors import EmptyWord
from whitebind.whitehead_graph import (
    CriterionOutcome,
    WhiteheadGraph,
    build,
    components,
    cut_size,
    cut_vertices,
    is_connected,
    stallings_criterion,
    to_dot,
    to_json,
    type_II_image_length,
)
from whitebind.words import canonical_cyclic, letter_key, parse_cyclic

GOLDEN = Path(__file__).parent / "golden"


def graph_of(text: str, rank: int = 2) -> WhiteheadGraph:
    return build(parse_cyclic(text, rank))


class TestBuild:
    def test_commutator_is_a_four_cycle(self) -> None:
        graph = graph_of("abAB")
        assert graph.edges == ((1, 2), (1, -2), (-1, 2), (-1, -2))

    def test_minimal_binding_word(self) -> None:
        graph = graph_of("aabb")
        assert sorted(graph.edges) == sorted([(1, -1), (1, -2), (2, -2), (-1, 2)])

    def test_one_edge_per_letter(self, sample_word) -> None:
        for _ in range(1000):
            cyclic = canonical_cyclic(sample_word(3, 12).letters, 3)
            if cyclic.is_identity:
                continue
            assert build(cyclic).to_networkx().number_of_edges() == len(cyclic)

    def test_vertices(self) -> None:
        assert graph_of("a", 3).vertices == (1, -1, 2, -2, 3, -3)

    def test_identity(self) -> None:
        with pytest.raises(EmptyWord):
            graph_of("")

    def test_inverse_mirrors_the_graph(self, sample_word) -> None:
        def mirrored(edges: tuple[tuple[int, int], ...]) -> list[tuple[int, ...]]:
            flipped = [tuple(sorted((-u, -v), key=letter_key)) for u, v in edges]
            return sorted(flipped, key=lambda edge: (letter_key(edge[0]), letter_key(edge[1])))

        for _ in range(200):
            cyclic = canonical_cyclic(sample_word(3, 14).letters, 3)
            if cyclic.is_identity:
                continue
            inverse = build(invert_cyclic(cyclic))
            assert mirrored(inverse.edges) == list(build(cyclic).edges)


class TestTypeIIImageLength:
    def test_cut_size(self) -> None:
        graph = graph_of("abAB")
        assert cut_size(graph, frozenset({1})) == 2
        assert cut_size(graph, frozenset({1, -1})) == 4
        assert cut_size(graph, frozenset({1, 2})) == 2

    def test_hand_computed(self) -> None:
        assert type_II_image_length(graph_of("ababbb"), TypeIIMove(2, frozenset({2, -1}))) == 4
        assert type_II_image_length(graph_of("abab"), TypeIIMove(1, frozenset({1, -2}))) == 2
        assert type_II_image_length(graph_of("aabb"), TypeIIMove(1, frozenset({1, -2}))) == 4

    @pytest.mark.parametrize("rank", [2, 3])
    def test_matches_applied_move(self, rank: int, sample_word) -> None:
        moves = enumerate_type_II(rank)
        for _ in range(30):
            cyclic = canonical_cyclic(sample_word(rank, 12).letters, rank)
            if cyclic.is_identity:
                continue
            graph = build(cyclic)
            for move in moves:
                assert type_II_image_length(graph, move) == len(apply_move(move, cyclic))


class TestConnectivity:
    def test_four_cycle(self) -> None:
        graph = graph_of("abAB")
        assert is_connected(graph)
        assert cut_vertices(graph) == frozenset()

    def test_cut_vertex_in_binding_example(self) -> None:
        graph = graph_of("ababbb")
        assert is_connected(graph)
        assert -2 in cut_vertices(graph)
        # The graph is the path a - B - b - A.
        assert cut_vertices(graph) == {2, -2}

    def test_unused_generator_disconnects(self) -> None:
        assert not is_connected(graph_of("aa"))

    def test_components(self) -> None:
        assert components(graph_of("abab")) == [[1, -2], [-1, 2]]

    def test_parallel_edges_do_not_protect_a_cut_vertex(self) -> None:
        # B hangs off a by two parallel edges and b hangs off A the same way.
        graph = WhiteheadGraph(2, ((1, -1), (1, -2), (1, -2), (-1, 2), (-1, 2)))
        assert is_connected(graph)
        assert cut_vertices(graph) == {1, -1}


class TestStallingsCriterion:
    def test_certified(self) -> None:
        criterion = stallings_criterion(parse_cyclic("abAB", 2))
        assert criterion.outcome is CriterionOutcome.BINDS_CERTIFIED
        assert criterion.certified
        assert "no cut vertex" in criterion.explanation
        assert "meridian disk system" in criterion.explanation

    def test_cut_vertex_is_inconclusive(self) -> None:
        criterion = stallings_criterion(parse_cyclic("ababbb", 2))
        assert criterion.outcome is CriterionOutcome.INCONCLUSIVE
        assert criterion.connected
        assert "cut vertices x2, X2" in criterion.explanation

    def test_disconnected_is_inconclusive(self) -> None:
        criterion = stallings_criterion(parse_cyclic("abab", 2))
        assert criterion.outcome is CriterionOutcome.INCONCLUSIVE
        assert not criterion.connected
        assert criterion.components == ((1, -2), (-1, 2))
        assert "disconnected ({x1, X2}, {X1, x2})" in criterion.explanation

    def test_rank_one(self) -> None:
        assert stallings_criterion(parse_cyclic("a", 1)).certified

    def test_sample_words(self) -> None:
        assert stallings_criterion(parse_cyclic("aabb", 2)).certified
        assert stallings_criterion(parse_cyclic("aabbcc", 3)).certified


class TestExport:
    @pytest.mark.parametrize(
        "text,rank,golden", [("aa", 2, "aa.dot"), ("abAB", 2, "abAB.dot"), ("a", 1, "a_rank1.dot")]
    )
    def test_dot_golden(self, text: str, rank: int, golden: str) -> None:
        assert to_dot(graph_of(text, rank)) == (GOLDEN / golden).read_text()

    def test_dot_parallel_edges_repeated(self) -> None:
        lines = to_dot(graph_of("aa")).splitlines()
        assert len([line for line in lines if line.endswith(";") and "--" not in line]) == 4
        assert lines.count("  x1 -- X1;") == 2

    def test_json_golden(self) -> None:
        text = json.dumps(to_json(graph_of("abAB"))) + "\n"
        assert text == (GOLDEN / "abAB.json").read_text()

    def test_dot_is_rotation_independent(self) -> None:
        assert to_dot(graph_of("bAB" + "a")) == to_dot(graph_of("abAB"))

import json

import pytest

from whitebind.automorphisms import (
    AutomorphismWitness,
    NielsenKind,
    NielsenMove,
    TypeIIMove,
    TypeIMove,
    apply_move,
    apply_nielsen_to_tuple,
    apply_type_I,
    apply_type_II,
    apply_witness,
    apply_witness_to_tuple,
    enumerate_multiplications,
    enumerate_nielsen,
    enumerate_type_I,
    enumerate_type_II,
    invert_move,
    is_basis,
    move_from_json,
    move_to_json,
    nielsen_reduce,
    type_I_normal_form,
)
from whitebind.errors import RankMismatch
from whitebind.words import (
    abelian_determinant,
    as_cyclic,
    concat,
    format_word,
    invert,
    parse_cyclic,
    parse_word,
)


def words(*texts: str, rank: int = 2):
    return tuple(parse_word(text, rank) for text in texts)


class TestMoveValidation:
    def test_type_II_needs_multiplier_in_set(self) -> None:
        with pytest.raises(ValueError):
            TypeIIMove(1, frozenset({2}))

    def test_type_II_rejects_inverse_of_multiplier(self) -> None:
        with pytest.raises(ValueError):
            TypeIIMove(1, frozenset({1, -1}))

    def test_type_I_needs_permutation(self) -> None:
        with pytest.raises(ValueError):
            TypeIMove((1, 1))

    def test_nielsen_needs_distinct_positions(self) -> None:
        with pytest.raises(ValueError):
            NielsenMove.left_multiply(1, 1)

    def test_nielsen_sign(self) -> None:
        with pytest.raises(ValueError):
            NielsenMove.right_multiply(1, 2, 2)


class TestTypeII:
    def test_shortens_binding_example(self) -> None:
        # x1 -> x1 x2^-1
        move = TypeIIMove(-2, frozenset({-2, 1}))
        image = apply_type_II(move, parse_cyclic("ababbb", 2))
        assert format_word(image) == "aabb"

    def test_rule_on_generators(self) -> None:
        a = parse_word("a", 3)
        b = parse_word("b", 3)
        c = parse_word("c", 3)
        move = TypeIIMove(1, frozenset({1, 2, -3}))
        assert format_word(apply_move(move, a)) == "a"
        assert format_word(apply_move(move, b)) == "ba"
        assert format_word(apply_move(move, c)) == "Ac"
        conjugating = TypeIIMove(1, frozenset({1, 2, -2}))
        assert format_word(apply_move(conjugating, b)) == "Aba"

    def test_singleton_set_is_identity(self, sample_word) -> None:
        move = TypeIIMove(2, frozenset({2}))
        for _ in range(20):
            word = sample_word(2, 10)
            assert apply_type_II(move, word) == word

    def test_inverse_undoes_move(self, rng, sample_word) -> None:
        for _ in range(500):
            rank = rng.randint(2, 4)
            move = rng.choice(enumerate_type_II(rank))
            word = sample_word(rank, 12)
            assert apply_move(invert_move(move), apply_move(move, word)) == word
            cyclic = as_cyclic(word)
            assert apply_move(invert_move(move), apply_move(move, cyclic)) == cyclic

    def test_homomorphism(self, rng, sample_word) -> None:
        for _ in range(200):
            rank = rng.randint(2, 3)
            move = rng.choice(enumerate_type_II(rank))
            u = sample_word(rank, 8)
            v = sample_word(rank, 8)
            assert apply_move(move, concat(u, v)) == concat(
                apply_move(move, u), apply_move(move, v)
            )

    def test_rank_mismatch(self) -> None:
        with pytest.raises(RankMismatch):
            apply_type_II(TypeIIMove(3, frozenset({3, 1})), parse_word("ab", 2))

    def test_wrong_move_type(self) -> None:
        with pytest.raises(TypeError):
            apply_type_II(TypeIMove.identity(2), parse_word("ab", 2))  # type: ignore[arg-type]


class TestTypeI:
    def test_swap_on_cyclic_word(self) -> None:
        cyclic = parse_cyclic("ab", 2)
        assert apply_type_I(TypeIMove((2, 1)), cyclic) == cyclic

    def test_swap_on_word(self) -> None:
        assert format_word(apply_type_I(TypeIMove((2, 1)), parse_word("ab", 2))) == "ba"

    def test_flip(self) -> None:
        move = TypeIMove((1, 2), frozenset({1}))
        assert format_word(apply_type_I(move, parse_word("aab", 2))) == "AAb"

    def test_identity(self, sample_word) -> None:
        word = sample_word(3, 10)
        assert apply_type_I(TypeIMove.identity(3), word) == word

    def test_preserves_cyclic_length(self, rng, sample_word) -> None:
        for _ in range(200):
            move = rng.choice(enumerate_type_I(3))
            cyclic = as_cyclic(sample_word(3, 12))
            assert len(apply_type_I(move, cyclic)) == len(cyclic)

    def test_inverse(self, rng, sample_word) -> None:
        for _ in range(100):
            move = rng.choice(enumerate_type_I(3))
            word = sample_word(3, 10)
            assert apply_move(invert_move(move), apply_move(move, word)) == word

    def test_rank_mismatch(self) -> None:
        with pytest.raises(RankMismatch):
            apply_type_I(TypeIMove((1, 2)), parse_word("c", 3))

    def test_normal_form_examples(self) -> None:
        assert type_I_normal_form(parse_cyclic("BBAA", 2))[0] == parse_cyclic("aabb", 2)
        assert type_I_normal_form(parse_cyclic("cbcB", 3))[0] == parse_cyclic("abaB", 3)

    def test_normal_form_move_reaches_it(self, sample_word) -> None:
        for _ in range(100):
            cyclic = as_cyclic(sample_word(3, 12))
            normal, move = type_I_normal_form(cyclic)
            assert apply_move(move, cyclic) == normal
            assert len(normal) == len(cyclic)

    def test_normal_form_is_constant_on_relabelings(self, sample_word) -> None:
        for _ in range(20):
            cyclic = as_cyclic(sample_word(3, 12))
            normal = type_I_normal_form(cyclic)[0]
            for move in enumerate_type_I(3):
                assert type_I_normal_form(apply_move(move, cyclic))[0] == normal


class TestEnumeration:
    @pytest.mark.parametrize("rank,count", [(1, 0), (2, 12), (3, 90)])
    def test_type_II_count(self, rank: int, count: int) -> None:
        assert len(enumerate_type_II(rank)) == count

    def test_type_II_order(self) -> None:
        moves = enumerate_type_II(2)
        assert moves[0] == TypeIIMove(1, frozenset({1, 2}))
        assert moves[1] == TypeIIMove(1, frozenset({1, -2}))
        assert moves[7] == TypeIIMove(2, frozenset({2, -1}))
        assert len(set(moves)) == len(moves)

    def test_type_I(self) -> None:
        moves = enumerate_type_I(2)
        assert len(moves) == 8
        assert moves[0] == TypeIMove.identity(2)

    def test_nielsen(self) -> None:
        assert len(enumerate_multiplications(2)) == 8
        assert len(enumerate_nielsen(2)) == 11
        assert len(enumerate_nielsen(3)) == 3 + 3 + 24


class TestNielsenMoves:
    def test_on_words(self) -> None:
        a = parse_word("a", 2)
        assert format_word(apply_move(NielsenMove.left_multiply(1, 2), a)) == "ba"
        assert format_word(apply_move(NielsenMove.right_multiply(1, 2, -1), a)) == "aB"
        assert format_word(apply_move(NielsenMove.swap(1, 2), a)) == "b"
        assert format_word(apply_move(NielsenMove.invert(1), a)) == "A"

    def test_on_tuples(self) -> None:
        pair = words("ab", "b")
        reduced = apply_nielsen_to_tuple(NielsenMove.right_multiply(1, 2, -1), pair)
        assert reduced == words("a", "b")
        assert apply_nielsen_to_tuple(NielsenMove.swap(1, 2), pair) == words("b", "ab")
        assert apply_nielsen_to_tuple(NielsenMove.invert(1), pair) == words("BA", "b")

    def test_tuple_position_out_of_range(self) -> None:
        with pytest.raises(RankMismatch):
            apply_nielsen_to_tuple(NielsenMove.swap(1, 3), words("a", "b"))


class TestWitness:
    def test_empty_witness(self, sample_word) -> None:
        word = sample_word(2, 8)
        assert apply_witness(AutomorphismWitness(), word) == word

    def test_swap_twice(self, sample_word) -> None:
        swap = NielsenMove.swap(1, 2)
        word = sample_word(2, 8)
        assert apply_witness(AutomorphismWitness((swap, swap)), word) == word

    def test_witness_then_inverse(self, rng, sample_word) -> None:
        for _ in range(100):
            moves = tuple(
                rng.choice(enumerate_type_II(3) + enumerate_type_I(3) + enumerate_nielsen(3))
                for _ in range(4)
            )
            witness = AutomorphismWitness(moves)
            word = sample_word(3, 10)
            assert apply_witness(witness.then(witness.inverse()), word) == word

    def test_move_records(self) -> None:
        assert move_to_json(TypeIIMove(-2, frozenset({1, -2}))) == {
            "kind": "typeII",
            "multiplier": -2,
            "set": [1, -2],
        }
        assert move_to_json(TypeIMove((2, 1), frozenset({2}))) == {
            "kind": "typeI",
            "permutation": [2, 1],
            "flips": [2],
        }
        assert move_to_json(NielsenMove.invert(2)) == {"kind": "nielsen", "op": "invert", "i": 2}
        assert move_to_json(NielsenMove.left_multiply(1, 2, -1)) == {
            "kind": "nielsen",
            "op": "left_multiply",
            "i": 1,
            "j": 2,
            "sign": -1,
        }

    def test_json_is_bit_exact(self) -> None:
        text = (
            '[{"kind": "typeI", "permutation": [2, 3, 1], "flips": [1, 3]}, '
            '{"kind": "typeII", "multiplier": -1, "set": [-1, 2, -3]}, '
            '{"kind": "nielsen", "op": "swap", "i": 1, "j": 3}, '
            '{"kind": "nielsen", "op": "right_multiply", "i": 2, "j": 1, "sign": 1}]'
        )
        witness = AutomorphismWitness.from_json(json.loads(text))
        assert json.dumps(witness.to_json()) == text
        assert witness.moves[2] == NielsenMove(NielsenKind.SWAP, 1, 3)

    @pytest.mark.parametrize(
        "record",
        [{"kind": "typeIII"}, {"kind": "typeII", "multiplier": 1}, {"op": "swap"}],
    )
    def test_malformed_records(self, record: dict) -> None:
        with pytest.raises(ValueError):
            move_from_json(record)

    def test_validate(self) -> None:
        witness = AutomorphismWitness((TypeIIMove(3, frozenset({3, 1})),))
        witness.validate(3)
        with pytest.raises(RankMismatch):
            witness.validate(2)


class TestNielsenReduce:
    def test_one_move(self) -> None:
        reduced, witness = nielsen_reduce(words("ab", "b"))
        assert reduced == words("a", "b")
        assert witness.moves == (NielsenMove.right_multiply(1, 2, -1),)
        assert apply_witness_to_tuple(witness, words("ab", "b")) == reduced

    def test_already_reduced(self) -> None:
        reduced, witness = nielsen_reduce(words("a", "b"))
        assert reduced == words("a", "b")
        assert len(witness) == 0

    def test_no_decreasing_move(self) -> None:
        reduced, witness = nielsen_reduce(words("aa", "b"))
        assert reduced == words("aa", "b")
        assert len(witness) == 0

    def test_mixed_ranks(self) -> None:
        with pytest.raises(RankMismatch):
            nielsen_reduce((parse_word("a", 1), parse_word("b", 2)))


class TestIsBasis:
    @pytest.mark.parametrize(
        "texts,expected",
        [(("ab", "b"), True), (("a", "b"), True), (("aa", "b"), False), (("ab", "ba"), False)],
    )
    def test_examples(self, texts: tuple[str, str], expected: bool) -> None:
        assert is_basis(words(*texts), 2).is_basis is expected

    def test_witness_reaches_standard_basis(self) -> None:
        check = is_basis(words("ab", "b"), 2)
        assert check.witness is not None
        assert len(check.witness) == 1
        assert apply_witness_to_tuple(check.witness, words("ab", "b")) == words("a", "b")

    def test_permuted_and_inverted_entries(self) -> None:
        for texts in (("b", "ab"), ("BA", "b"), ("b", "BA")):
            check = is_basis(words(*texts), 2)
            assert check.is_basis
            assert check.witness is not None
            assert apply_witness_to_tuple(check.witness, words(*texts)) == words("a", "b")

    def test_no_witness_when_false(self) -> None:
        check = is_basis(words("aa", "b"), 2)
        assert check.witness is None
        assert abelian_determinant(list(check.reduced)) == 2

    def test_wrong_size(self) -> None:
        with pytest.raises(RankMismatch):
            is_basis(words("a"), 2)

    def test_basis_needing_a_length_preserving_move(self) -> None:
        basis = words("cbbA", "aBC", "bC", rank=3)
        check = is_basis(basis, 3)
        assert check.is_basis
        assert check.witness is not None
        assert apply_witness_to_tuple(check.witness, basis) == words("a", "b", "c", rank=3)

    def test_reduced_tuple_has_no_full_middle_cancellation(self) -> None:
        reduced, _ = nielsen_reduce(words("aC", "aBC", "bC", rank=3))
        signed = [w for word in reduced for w in (word, invert(word))]
        for u in signed:
            for v in signed:
                for w in signed:
                    if concat(u, v).is_identity or concat(v, w).is_identity:
                        continue
                    assert len(concat(concat(u, v), w)) > len(u) - len(v) + len(w)

    @pytest.mark.parametrize("rank", [2, 3])
    def test_random_bases_are_recognized(self, rng, rank: int) -> None:
        standard = tuple(parse_word(chr(ord("a") + k), rank) for k in range(rank))
        for _ in range(200):
            basis = standard
            for _ in range(rng.randint(1, 12)):
                basis = apply_nielsen_to_tuple(rng.choice(enumerate_nielsen(rank)), basis)
            assert abelian_determinant(list(basis)) in (1, -1)
            check = is_basis(basis, rank)
            assert check.is_basis, [format_word(word) for word in basis]
            assert check.witness is not None
            assert apply_witness_to_tuple(check.witness, basis) == standard

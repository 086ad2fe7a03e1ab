"""Whitehead automorphisms, elementary Nielsen moves and Nielsen reduction of tuples.

Three kinds of move are supported:

- ``TypeIMove``: a signed permutation of the generators (length preserving).
- ``TypeIIMove``: a Whitehead multiplier move (a, S) with a in S and a^-1 not in S.
- ``NielsenMove``: one of the four elementary Nielsen transformations. On a tuple
  (y_1, ..., y_n) it swaps, inverts or multiplies entries; on a word it acts as the
  automorphism obtained by applying the same transformation to the standard basis.
  Multiplication follows the Lyndon-Schupp convention: y_i is replaced by
  y_j^e * y_i (left) or y_i * y_j^e (right), i != j.

Moves do not store a rank; it is checked when a move is applied.
"""

import itertools
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Any, TypeVar

from loguru import logger

from whitebind.errors import RankMismatch
from whitebind.words import (
    CyclicWord,
    Letter,
    Word,
    canonical_cyclic,
    free_reduce,
    generator,
    letter_key,
    sign,
    signed_letters,
    validate_rank,
)

W = TypeVar("W", Word, CyclicWord)


@dataclass(frozen=True, slots=True)
class TypeIMove:
    """Signed permutation: x_i -> x_{permutation[i-1]}, inverted when i is in flips."""

    permutation: tuple[int, ...]
    flips: frozenset[int] = frozenset()

    def __post_init__(self) -> None:
        rank = len(self.permutation)
        if sorted(self.permutation) != list(range(1, rank + 1)):
            raise ValueError(f"{self.permutation} is not a permutation of 1..{rank}")
        if any(k < 1 or k > rank for k in self.flips):
            raise ValueError(f"flips {sorted(self.flips)} outside 1..{rank}")

    @classmethod
    def identity(cls, rank: int) -> "TypeIMove":
        return cls(tuple(range(1, rank + 1)))


@dataclass(frozen=True, slots=True)
class TypeIIMove:
    """Whitehead multiplier move (a, S).

    For a generator x other than a^+-1: x -> x a when only x is in S,
    x -> a^-1 x when only x^-1 is in S, x -> a^-1 x a when both are, and x is fixed
    otherwise. The multiplier's own generator is fixed.
    """

    multiplier: Letter
    subset: frozenset[Letter]

    def __post_init__(self) -> None:
        if self.multiplier == 0 or 0 in self.subset:
            raise ValueError("0 is not a letter")
        if self.multiplier not in self.subset:
            raise ValueError(f"multiplier {self.multiplier} must belong to the set")
        if -self.multiplier in self.subset:
            raise ValueError(f"the set must not contain the inverse of {self.multiplier}")


class NielsenKind(str, Enum):
    SWAP = "swap"
    INVERT = "invert"
    LEFT_MULTIPLY = "left_multiply"
    RIGHT_MULTIPLY = "right_multiply"


@dataclass(frozen=True, slots=True)
class NielsenMove:
    """Elementary Nielsen transformation on positions i (and j)."""

    kind: NielsenKind
    i: int
    j: int = 0
    sign: int = 1

    def __post_init__(self) -> None:
        if self.i < 1:
            raise ValueError(f"position must be at least 1, got {self.i}")
        if self.kind is NielsenKind.INVERT:
            if self.j != 0 or self.sign != 1:
                raise ValueError("invert takes a single position")
            return
        if self.j < 1 or self.i == self.j:
            raise ValueError(f"{self.kind.value} needs distinct positions, got {self.i}, {self.j}")
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign}")
        if self.kind is NielsenKind.SWAP and self.sign != 1:
            raise ValueError("swap takes no sign")

    @classmethod
    def swap(cls, i: int, j: int) -> "NielsenMove":
        return cls(NielsenKind.SWAP, i, j)

    @classmethod
    def invert(cls, i: int) -> "NielsenMove":
        return cls(NielsenKind.INVERT, i)

    @classmethod
    def left_multiply(cls, i: int, j: int, sign: int = 1) -> "NielsenMove":
        return cls(NielsenKind.LEFT_MULTIPLY, i, j, sign)

    @classmethod
    def right_multiply(cls, i: int, j: int, sign: int = 1) -> "NielsenMove":
        return cls(NielsenKind.RIGHT_MULTIPLY, i, j, sign)


Move = TypeIMove | TypeIIMove | NielsenMove


def _required_rank(move: Move) -> int:
    if isinstance(move, TypeIMove):
        return len(move.permutation)
    if isinstance(move, TypeIIMove):
        return max(generator(letter) for letter in move.subset)
    return max(move.i, move.j)


def check_rank(move: Move, rank: int) -> None:
    """Raise RankMismatch unless the move acts on the free group of this rank."""
    if isinstance(move, TypeIMove):
        if len(move.permutation) != rank:
            raise RankMismatch(
                f"type I move on {len(move.permutation)} generators applied in rank {rank}"
            )
    elif _required_rank(move) > rank:
        raise RankMismatch(f"{move} needs rank at least {_required_rank(move)}, got {rank}")


def _generator_image(move: Move, k: int) -> tuple[Letter, ...]:
    if isinstance(move, TypeIMove):
        target = move.permutation[k - 1]
        return (-target,) if k in move.flips else (target,)

    if isinstance(move, TypeIIMove):
        a = move.multiplier
        if k == generator(a):
            return (k,)
        forward, backward = k in move.subset, -k in move.subset
        if forward and backward:
            return (-a, k, a)
        if forward:
            return (k, a)
        if backward:
            return (-a, k)
        return (k,)

    if move.kind is NielsenKind.SWAP:
        return (move.j,) if k == move.i else (move.i,) if k == move.j else (k,)
    if k != move.i:
        return (k,)
    if move.kind is NielsenKind.INVERT:
        return (-k,)
    if move.kind is NielsenKind.LEFT_MULTIPLY:
        return (move.sign * move.j, k)
    return (k, move.sign * move.j)


@lru_cache(maxsize=65536)
def letter_images(move: Move, rank: int) -> dict[Letter, tuple[Letter, ...]]:
    """Image of every letter of the given rank under the move."""
    check_rank(move, rank)
    images: dict[Letter, tuple[Letter, ...]] = {}
    for k in range(1, rank + 1):
        image = _generator_image(move, k)
        images[k] = image
        images[-k] = tuple(-letter for letter in reversed(image))
    return images


def apply_move(move: Move, word: W) -> W:
    """Image of a word (or conjugacy class) under the automorphism of a move.

    Words come back freely reduced; cyclic words come back cyclically reduced and
    canonically rotated.

    Raises:
        RankMismatch: if the move does not fit the word's rank
    """
    images = letter_images(move, word.rank)
    substituted = itertools.chain.from_iterable(images[letter] for letter in word.letters)
    if isinstance(word, CyclicWord):
        return canonical_cyclic(substituted, word.rank)
    return free_reduce(substituted, word.rank)


def apply_type_I(move: TypeIMove, word: W) -> W:
    """Relabel (and possibly invert) generators; lengths are preserved."""
    if not isinstance(move, TypeIMove):
        raise TypeError(f"expected a TypeIMove, got {type(move).__name__}")
    return apply_move(move, word)


def apply_type_II(move: TypeIIMove, word: W) -> W:
    """Apply a Whitehead multiplier move."""
    if not isinstance(move, TypeIIMove):
        raise TypeError(f"expected a TypeIIMove, got {type(move).__name__}")
    return apply_move(move, word)


def invert_move(move: Move) -> Move:
    """The move whose automorphism is the inverse of the given one."""
    if isinstance(move, TypeIMove):
        inverse = [0] * len(move.permutation)
        for source, target in enumerate(move.permutation, start=1):
            inverse[target - 1] = source
        return TypeIMove(tuple(inverse), frozenset(move.permutation[k - 1] for k in move.flips))
    if isinstance(move, TypeIIMove):
        a = move.multiplier
        return TypeIIMove(-a, (move.subset - {a}) | {-a})
    if move.kind in (NielsenKind.SWAP, NielsenKind.INVERT):
        return move
    return NielsenMove(move.kind, move.i, move.j, -move.sign)


@dataclass(frozen=True, slots=True)
class AutomorphismWitness:
    """A replayable sequence of moves, applied first to last."""

    moves: tuple[Move, ...] = field(default=())

    def __len__(self) -> int:
        return len(self.moves)

    def __iter__(self) -> Iterator[Move]:
        return iter(self.moves)

    def then(self, other: "AutomorphismWitness | Move") -> "AutomorphismWitness":
        """This witness followed by another witness or a single move."""
        if isinstance(other, AutomorphismWitness):
            return AutomorphismWitness(self.moves + other.moves)
        return AutomorphismWitness(self.moves + (other,))

    def inverse(self) -> "AutomorphismWitness":
        """Witness undoing this one: inverted moves in reverse order."""
        return AutomorphismWitness(tuple(invert_move(move) for move in reversed(self.moves)))

    def validate(self, rank: int) -> None:
        """Raise RankMismatch if some move is ill-formed for the rank."""
        for move in self.moves:
            check_rank(move, rank)

    def to_json(self) -> list[dict[str, Any]]:
        return [move_to_json(move) for move in self.moves]

    @classmethod
    def from_json(cls, records: Sequence[dict[str, Any]]) -> "AutomorphismWitness":
        return cls(tuple(move_from_json(record) for record in records))


def apply_witness(witness: AutomorphismWitness, word: W) -> W:
    """Apply every move of the witness to the word, in order."""
    for move in witness.moves:
        word = apply_move(move, word)
    return word


def move_to_json(move: Move) -> dict[str, Any]:
    """JSON record of a move; signed letters are written as +-k."""
    if isinstance(move, TypeIMove):
        return {
            "kind": "typeI",
            "permutation": list(move.permutation),
            "flips": sorted(move.flips),
        }
    if isinstance(move, TypeIIMove):
        return {
            "kind": "typeII",
            "multiplier": move.multiplier,
            "set": sorted(move.subset, key=letter_key),
        }
    record: dict[str, Any] = {"kind": "nielsen", "op": move.kind.value, "i": move.i}
    if move.kind is not NielsenKind.INVERT:
        record["j"] = move.j
    if move.kind in (NielsenKind.LEFT_MULTIPLY, NielsenKind.RIGHT_MULTIPLY):
        record["sign"] = move.sign
    return record


def move_from_json(record: dict[str, Any]) -> Move:
    """Inverse of ``move_to_json``; raises ValueError on malformed records."""
    try:
        kind = record["kind"]
        if kind == "typeI":
            return TypeIMove(
                tuple(int(k) for k in record["permutation"]),
                frozenset(int(k) for k in record.get("flips", [])),
            )
        if kind == "typeII":
            return TypeIIMove(int(record["multiplier"]), frozenset(int(k) for k in record["set"]))
        if kind == "nielsen":
            return NielsenMove(
                NielsenKind(record["op"]),
                int(record["i"]),
                int(record.get("j", 0)),
                int(record.get("sign", 1)),
            )
    except (KeyError, TypeError) as e:
        raise ValueError(f"malformed move record {record!r}: {e}") from e
    raise ValueError(f"unknown move kind {kind!r}")


@lru_cache(maxsize=None)
def enumerate_type_II(rank: int) -> tuple[TypeIIMove, ...]:
    """All non-trivial type II moves, in a fixed order.

    Multipliers run through x1, x1^-1, x2, ...; for each, the extra letters of S are
    subsets of the other 2g-2 letters taken by ascending bitmask. The trivial move
    S = {a} is left out, so there are 2g * (2^(2g-2) - 1) moves.
    """
    validate_rank(rank)
    moves = []
    letters = signed_letters(rank)
    for a in letters:
        others = [letter for letter in letters if generator(letter) != generator(a)]
        for mask in range(1, 1 << len(others)):
            chosen = {others[bit] for bit in range(len(others)) if mask >> bit & 1}
            moves.append(TypeIIMove(a, frozenset(chosen | {a})))
    return tuple(moves)


@lru_cache(maxsize=None)
def enumerate_type_I(rank: int) -> tuple[TypeIMove, ...]:
    """All 2^g * g! signed permutations, identity first."""
    validate_rank(rank)
    moves = []
    for permutation in itertools.permutations(range(1, rank + 1)):
        for mask in range(1 << rank):
            flips = frozenset(k for k in range(1, rank + 1) if mask >> (k - 1) & 1)
            moves.append(TypeIMove(permutation, flips))
    return tuple(moves)


def type_I_normal_form(cyclic: CyclicWord) -> tuple[CyclicWord, TypeIMove]:
    """Least image of a cyclic word under signed permutations of the generators.

    From each starting point, generators are renamed x1, x2, ... in order of first
    appearance, with the sign they first appear with; that is the least relabeling
    read from that point. The least over all starting points is the normal form.

    Returns:
        (normal form, a type I move sending the word to it)
    """
    rank = cyclic.rank
    letters = cyclic.letters
    n = len(letters)
    best: tuple[int, ...] | None = None
    best_labels: dict[int, int] = {}
    for start in range(n):
        labels: dict[int, int] = {}
        key = []
        for offset in range(n):
            letter = letters[(start + offset) % n]
            k = generator(letter)
            if k not in labels:
                labels[k] = (len(labels) + 1) * sign(letter)
            key.append(letter_key(labels[k] * sign(letter)))
        if best is None or tuple(key) < best:
            best, best_labels = tuple(key), labels

    unused = iter(range(len(best_labels) + 1, rank + 1))
    permutation = tuple(
        abs(best_labels[k]) if k in best_labels else next(unused) for k in range(1, rank + 1)
    )
    flips = frozenset(k for k, label in best_labels.items() if label < 0)
    move = TypeIMove(permutation, flips)
    return apply_move(move, cyclic), move


@lru_cache(maxsize=None)
def enumerate_multiplications(size: int) -> tuple[NielsenMove, ...]:
    """Left and right multiplication moves on a tuple of the given size."""
    moves = []
    for i in range(1, size + 1):
        for j in range(1, size + 1):
            if i == j:
                continue
            for sign in (1, -1):
                moves.append(NielsenMove.left_multiply(i, j, sign))
                moves.append(NielsenMove.right_multiply(i, j, sign))
    return tuple(moves)


@lru_cache(maxsize=None)
def enumerate_nielsen(size: int) -> tuple[NielsenMove, ...]:
    """Every elementary Nielsen move on a tuple of the given size."""
    swaps = [NielsenMove.swap(i, j) for i in range(1, size + 1) for j in range(i + 1, size + 1)]
    inverts = [NielsenMove.invert(i) for i in range(1, size + 1)]
    return tuple(swaps + inverts) + enumerate_multiplications(size)


def _check_tuple(words: Sequence[Word]) -> int:
    if not words:
        raise ValueError("the tuple must not be empty")
    rank = words[0].rank
    for word in words:
        if word.rank != rank:
            raise RankMismatch(f"tuple mixes ranks {rank} and {word.rank}")
    return rank


def _nielsen_entry(move: NielsenMove, words: Sequence[Word]) -> Word:
    """New value of position move.i after a multiplication move."""
    target = words[move.i - 1]
    factor = words[move.j - 1]
    if move.sign < 0:
        factor = Word(tuple(-letter for letter in reversed(factor.letters)), factor.rank)
    if move.kind is NielsenKind.LEFT_MULTIPLY:
        return free_reduce(factor.letters + target.letters, target.rank)
    return free_reduce(target.letters + factor.letters, target.rank)


def apply_nielsen_to_tuple(move: NielsenMove, words: Sequence[Word]) -> tuple[Word, ...]:
    """Apply an elementary Nielsen transformation to a tuple of words."""
    _check_tuple(words)
    if max(move.i, move.j) > len(words):
        raise RankMismatch(f"{move} does not fit a tuple of size {len(words)}")
    result = list(words)
    if move.kind is NielsenKind.SWAP:
        result[move.i - 1], result[move.j - 1] = result[move.j - 1], result[move.i - 1]
    elif move.kind is NielsenKind.INVERT:
        entry = result[move.i - 1]
        result[move.i - 1] = Word(tuple(-letter for letter in reversed(entry.letters)), entry.rank)
    else:
        result[move.i - 1] = _nielsen_entry(move, words)
    return tuple(result)


def apply_witness_to_tuple(
    witness: AutomorphismWitness, words: Sequence[Word]
) -> tuple[Word, ...]:
    """Replay a witness on a tuple.

    Nielsen moves act on positions; type I and type II moves act on every entry.
    """
    current = tuple(words)
    for move in witness.moves:
        if isinstance(move, NielsenMove):
            current = apply_nielsen_to_tuple(move, current)
        else:
            current = tuple(apply_move(move, word) for word in current)
    return current


def _half(letters: tuple[Letter, ...]) -> tuple[int, ...]:
    return tuple(letter_key(letter) for letter in letters[: (len(letters) + 1) // 2])


def _reduction_key(word: Word) -> tuple[int, tuple[int, ...], tuple[int, ...]]:
    """Well-order on words up to inversion used to break length ties.

    Words compare by length, then by the smaller and the larger of the left halves of
    the word and of its inverse.
    """
    inverse = tuple(-letter for letter in reversed(word.letters))
    halves = sorted((_half(word.letters), _half(inverse)))
    return len(word), halves[0], halves[1]


def _next_reduction(current: Sequence[Word]) -> tuple[NielsenMove, Word] | None:
    candidates = enumerate_multiplications(len(current))
    for move in candidates:
        entry = _nielsen_entry(move, current)
        if len(entry) < len(current[move.i - 1]):
            return move, entry
    for move in candidates:
        entry = _nielsen_entry(move, current)
        if _reduction_key(entry) < _reduction_key(current[move.i - 1]):
            return move, entry
    return None


def nielsen_reduce(words: Sequence[Word]) -> tuple[tuple[Word, ...], AutomorphismWitness]:
    """Nielsen reduction of a tuple.

    Applies the first multiplication move (in ``enumerate_multiplications`` order) that
    shortens an entry. When no move shortens anything, a length-preserving move that
    lowers the entry in ``_reduction_key`` order is taken instead; these moves clear the
    triples whose middle entry cancels completely. Every step lowers one entry in a
    well-order, so the loop ends, and it ends at a Nielsen-reduced tuple.

    Returns:
        (reduced tuple, witness replaying the reduction on the input tuple)
    """
    _check_tuple(words)
    current = list(words)
    moves: list[Move] = []

    while (step := _next_reduction(current)) is not None:
        move, entry = step
        logger.debug(f"Nielsen move {move_to_json(move)} lowers entry {move.i}")
        current[move.i - 1] = entry
        moves.append(move)

    return tuple(current), AutomorphismWitness(tuple(moves))


@dataclass(frozen=True)
class BasisCheck:
    """Outcome of ``is_basis``.

    Attributes:
        is_basis: Whether the tuple is a free basis
        reduced: The Nielsen-reduced tuple
        witness: When is_basis, replays the input tuple to exactly (x1, ..., xg)
    """

    is_basis: bool
    reduced: tuple[Word, ...]
    witness: AutomorphismWitness | None


def is_basis(words: Sequence[Word], rank: int) -> BasisCheck:
    """Decide whether g words form a basis of the free group of rank g.

    The tuple is a basis iff its Nielsen reduction is the standard basis up to
    a signed permutation.

    Raises:
        RankMismatch: if the tuple size or a word's rank differs from the rank
    """
    validate_rank(rank)
    if len(words) != rank:
        raise RankMismatch(f"a basis of rank {rank} has {rank} elements, got {len(words)}")
    if _check_tuple(words) != rank:
        raise RankMismatch(f"words of rank {words[0].rank} tested against rank {rank}")

    reduced, witness = nielsen_reduce(words)
    if any(len(word) != 1 for word in reduced):
        return BasisCheck(False, reduced, None)
    if len({generator(word.letters[0]) for word in reduced}) != rank:
        return BasisCheck(False, reduced, None)

    # Sort the single letters into x1, ..., xg with swaps and inversions.
    current = reduced
    for position in range(1, rank + 1):
        source = next(
            index
            for index in range(position, rank + 1)
            if generator(current[index - 1].letters[0]) == position
        )
        if source != position:
            swap = NielsenMove.swap(position, source)
            current = apply_nielsen_to_tuple(swap, current)
            witness = witness.then(swap)
        if current[position - 1].letters[0] < 0:
            flip = NielsenMove.invert(position)
            current = apply_nielsen_to_tuple(flip, current)
            witness = witness.then(flip)

    return BasisCheck(True, reduced, witness)

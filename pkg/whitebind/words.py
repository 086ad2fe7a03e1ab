"""Freely reduced and cyclically reduced words over a free group of finite rank.

A letter is a non-zero int: ``k`` stands for the generator x_k and ``-k`` for its
inverse. Words are immutable values, so they can be shared freely between threads and
processes.
"""

import re
import string
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction

from whitebind.errors import EmptyWord, RankExceeded, RankMismatch, WordSyntaxError

Letter = int

COMPACT_MAX_RANK = len(string.ascii_lowercase)

_INDEXED_START = re.compile(r"[xX][0-9]")
_INDEXED_TOKEN = re.compile(r"([xX])([0-9]+)")


def generator(letter: Letter) -> int:
    """Generator index of a letter."""
    return letter if letter > 0 else -letter


def sign(letter: Letter) -> int:
    """+1 for a generator, -1 for an inverse."""
    return 1 if letter > 0 else -1


def letter_key(letter: Letter) -> int:
    """Sort key for letters: generator index ascending, then x_k before its inverse."""
    return 2 * letter if letter > 0 else -2 * letter + 1


def validate_rank(rank: int) -> int:
    """Return the rank unchanged, raising ValueError unless it is a positive int."""
    if isinstance(rank, bool) or not isinstance(rank, int) or rank < 1:
        raise ValueError(f"rank must be a positive integer, got {rank!r}")
    return rank


def signed_letters(rank: int) -> tuple[Letter, ...]:
    """All 2g letters in canonical order: x1, x1^-1, x2, x2^-1, ..."""
    validate_rank(rank)
    return tuple(letter for k in range(1, rank + 1) for letter in (k, -k))


def _check_letters(letters: Sequence[Letter], rank: int) -> None:
    for letter in letters:
        if letter == 0:
            raise ValueError("0 is not a letter")
        if generator(letter) > rank:
            raise RankExceeded(generator(letter), rank)


@dataclass(frozen=True, slots=True)
class Word:
    """A freely reduced word in the free group of the given rank.

    The empty word is the identity.
    """

    letters: tuple[Letter, ...]
    rank: int

    def __post_init__(self) -> None:
        validate_rank(self.rank)
        _check_letters(self.letters, self.rank)
        for left, right in zip(self.letters, self.letters[1:]):
            if left == -right:
                raise ValueError(f"word {self.letters} is not freely reduced")

    @classmethod
    def identity(cls, rank: int) -> "Word":
        return cls((), rank)

    @property
    def is_identity(self) -> bool:
        return not self.letters

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return format_letters(self.letters, self.rank)


@dataclass(frozen=True, slots=True)
class CyclicWord:
    """A conjugacy class, stored as its canonical cyclically reduced representative.

    The letters are cyclically reduced and stored in their least rotation under
    ``letter_key``. Use ``cyclic_word`` or ``cyclic_reduce`` to build one from
    arbitrary letters.
    """

    letters: tuple[Letter, ...]
    rank: int

    def __post_init__(self) -> None:
        validate_rank(self.rank)
        _check_letters(self.letters, self.rank)
        if not _is_cyclically_reduced(self.letters):
            raise ValueError(f"word {self.letters} is not cyclically reduced")
        if canonical_rotation(self.letters) != self.letters:
            raise ValueError(f"word {self.letters} is not in canonical rotation")

    @property
    def is_identity(self) -> bool:
        return not self.letters

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return format_letters(self.letters, self.rank)

    def as_word(self) -> Word:
        """The representative as an ordinary (freely reduced) word."""
        return Word(self.letters, self.rank)


def _make_cyclic(letters: tuple[Letter, ...], rank: int) -> CyclicWord:
    # Callers guarantee the invariants; skips the checks in the hot loops.
    cyclic = object.__new__(CyclicWord)
    object.__setattr__(cyclic, "letters", letters)
    object.__setattr__(cyclic, "rank", rank)
    return cyclic


def _is_cyclically_reduced(letters: Sequence[Letter]) -> bool:
    for left, right in zip(letters, letters[1:]):
        if left == -right:
            return False
    return len(letters) <= 1 or letters[0] != -letters[-1]


def _reduce_letters(letters: Iterable[Letter]) -> tuple[Letter, ...]:
    stack: list[Letter] = []
    for letter in letters:
        if stack and stack[-1] == -letter:
            stack.pop()
        else:
            stack.append(letter)
    return tuple(stack)


def _cyclic_core_span(letters: tuple[Letter, ...]) -> int:
    """Number of letters to strip from each end of a freely reduced word."""
    n = len(letters)
    i = 0
    while i < n - 1 - i and letters[i] == -letters[n - 1 - i]:
        i += 1
    return i


def _least_rotation_index(letters: Sequence[Letter]) -> int:
    n = len(letters)
    if n <= 1:
        return 0
    keys = [letter_key(letter) for letter in letters]
    doubled = keys + keys
    return min(range(n), key=lambda start: doubled[start : start + n])


def canonical_rotation(letters: Sequence[Letter]) -> tuple[Letter, ...]:
    """Least rotation of a letter sequence under ``letter_key``."""
    start = _least_rotation_index(letters)
    return tuple(letters[start:]) + tuple(letters[:start])


def canonical_cyclic(letters: Iterable[Letter], rank: int) -> CyclicWord:
    """Cyclic word of an arbitrary letter sequence (reduced and rotated here).

    Does not check generator bounds; internal callers produce valid letters.
    """
    reduced = _reduce_letters(letters)
    strip = _cyclic_core_span(reduced)
    core = reduced[strip : len(reduced) - strip]
    return _make_cyclic(canonical_rotation(core), rank)


def free_reduce(letters: Iterable[Letter], rank: int) -> Word:
    """Freely reduce a letter sequence.

    Args:
        letters: Any sequence of letters, possibly with adjacent inverse pairs
        rank: Rank of the ambient free group

    Returns:
        The freely reduced word equal to the input in the free group
    """
    validate_rank(rank)
    sequence = tuple(letters)
    _check_letters(sequence, rank)
    return Word(_reduce_letters(sequence), rank)


def _require_same_rank(first: Word | CyclicWord, second: Word | CyclicWord) -> None:
    if first.rank != second.rank:
        raise RankMismatch(f"rank {first.rank} does not match rank {second.rank}")


def invert(word: Word) -> Word:
    """Group inverse: reverse the letters and flip every sign."""
    return Word(tuple(-letter for letter in reversed(word.letters)), word.rank)


def concat(first: Word, second: Word) -> Word:
    """Reduced product of two words of the same rank."""
    _require_same_rank(first, second)
    return Word(_reduce_letters(first.letters + second.letters), first.rank)


def cyclic_reduce(word: Word) -> tuple[CyclicWord, Word]:
    """Split a word into its canonical cyclic core and a conjugator.

    Returns:
        (core, conjugator) with word = conjugator * core * conjugator^-1
    """
    letters = word.letters
    strip = _cyclic_core_span(letters)
    outer = letters[:strip]
    core = letters[strip : len(letters) - strip]

    # Rotating core = p * s to s * p conjugates by p: p*s = p * (s*p) * p^-1.
    start = _least_rotation_index(core)
    rotated = core[start:] + core[:start]
    conjugator = _reduce_letters(outer + core[:start])
    return _make_cyclic(rotated, word.rank), Word(conjugator, word.rank)


def cyclic_word(letters: Iterable[Letter], rank: int) -> CyclicWord:
    """Conjugacy class of the word spelled by the letters."""
    return cyclic_reduce(free_reduce(letters, rank))[0]


def as_cyclic(word: Word | CyclicWord) -> CyclicWord:
    """The cyclic core of a word; cyclic words are returned unchanged."""
    if isinstance(word, CyclicWord):
        return word
    return cyclic_reduce(word)[0]


def cyclic_root(cyclic: CyclicWord) -> tuple[CyclicWord, int]:
    """Write a cyclic word as root^exponent with the largest possible exponent.

    Raises:
        EmptyWord: for the identity
    """
    letters = cyclic.letters
    n = len(letters)
    if n == 0:
        raise EmptyWord("the identity has no root")
    for period in range(1, n + 1):
        if n % period:
            continue
        root = _make_cyclic(canonical_rotation(letters[:period]), cyclic.rank)
        if power(root, n // period) == cyclic:
            return root, n // period
    raise AssertionError("unreachable: the full length is always a period")


def power(cyclic: CyclicWord, exponent: int) -> CyclicWord:
    """root^exponent as a cyclic word (exponent >= 1)."""
    if exponent < 1:
        raise ValueError(f"exponent must be positive, got {exponent}")
    return _make_cyclic(canonical_rotation(cyclic.letters * exponent), cyclic.rank)


def support(word: Word | CyclicWord) -> frozenset[int]:
    """Generator indices occurring in the word."""
    return frozenset(generator(letter) for letter in word.letters)


def missing_generators(word: Word | CyclicWord) -> list[int]:
    """Generators of the ambient rank that do not occur, ascending."""
    present = support(word)
    return [k for k in range(1, word.rank + 1) if k not in present]


def exponent_sums(word: Word | CyclicWord) -> tuple[int, ...]:
    """Image of the word in the abelianization Z^g."""
    sums = [0] * word.rank
    for letter in word.letters:
        sums[generator(letter) - 1] += sign(letter)
    return tuple(sums)


def abelian_determinant(words: Sequence[Word | CyclicWord]) -> int:
    """Determinant of the exponent-sum matrix of g words of rank g."""
    if not words:
        raise ValueError("need at least one word")
    rank = words[0].rank
    if len(words) != rank or any(word.rank != rank for word in words):
        raise RankMismatch(f"need {rank} words of rank {rank}")
    matrix = [[Fraction(value) for value in exponent_sums(word)] for word in words]

    determinant = Fraction(1)
    for col in range(rank):
        pivot = next((row for row in range(col, rank) if matrix[row][col] != 0), None)
        if pivot is None:
            return 0
        if pivot != col:
            matrix[col], matrix[pivot] = matrix[pivot], matrix[col]
            determinant = -determinant
        determinant *= matrix[col][col]
        for row in range(col + 1, rank):
            factor = matrix[row][col] / matrix[col][col]
            for k in range(col, rank):
                matrix[row][k] -= factor * matrix[col][k]
    return int(determinant)


def _tokenize(text: str) -> list[Letter]:
    stripped = text.strip()
    if not stripped:
        return []

    if _INDEXED_START.match(stripped):
        letters = []
        for token in stripped.split():
            match = _INDEXED_TOKEN.fullmatch(token)
            if match is None:
                raise WordSyntaxError(f"bad token {token!r} in indexed word", text)
            index = int(match.group(2))
            if index < 1:
                raise WordSyntaxError(f"generator index must be at least 1 in {token!r}", text)
            letters.append(index if match.group(1) == "x" else -index)
        return letters

    letters = []
    for position, char in enumerate(stripped):
        if char in string.ascii_lowercase:
            letters.append(ord(char) - ord("a") + 1)
        elif char in string.ascii_uppercase:
            letters.append(-(ord(char) - ord("A") + 1))
        else:
            raise WordSyntaxError(f"unexpected character {char!r} in compact word", text, position)
    return letters


def parse_word(text: str, rank: int) -> Word:
    """Parse a word in compact ("abAB") or indexed ("x1 x2 X1 X2") form.

    Args:
        text: The word; the empty string is the identity
        rank: Rank of the ambient free group

    Returns:
        The freely reduced word spelled by the text

    Raises:
        WordSyntaxError: if the text follows neither grammar or mixes them
        RankExceeded: if a generator index is larger than the rank
    """
    validate_rank(rank)
    return free_reduce(_tokenize(text), rank)


def parse_cyclic(text: str, rank: int) -> CyclicWord:
    """Parse a word and return its conjugacy class."""
    return cyclic_reduce(parse_word(text, rank))[0]


def infer_rank(text: str) -> int:
    """Largest generator index the text mentions (0 for the identity)."""
    return max((generator(letter) for letter in _tokenize(text)), default=0)


def format_letters(letters: Sequence[Letter], rank: int) -> str:
    """Compact form when the rank allows it, indexed form otherwise."""
    if rank <= COMPACT_MAX_RANK:
        return "".join(
            string.ascii_lowercase[letter - 1]
            if letter > 0
            else string.ascii_uppercase[-letter - 1]
            for letter in letters
        )
    return format_indexed(letters)


def format_indexed(letters: Sequence[Letter]) -> str:
    """Indexed form: whitespace-separated x<k> / X<k> tokens."""
    return " ".join(f"x{letter}" if letter > 0 else f"X{-letter}" for letter in letters)


def format_word(word: Word | CyclicWord) -> str:
    """String form of a word, inverse of ``parse_word``."""
    return format_letters(word.letters, word.rank)


def letter_name(letter: Letter) -> str:
    """Vertex name used in graph exports: x1, X1, ..."""
    return format_indexed((letter,))


def resolve_rank(texts: Sequence[str], rank: int | None = None) -> int:
    """Rank for a set of word strings.

    Without an explicit rank, the largest generator index mentioned is used. An
    explicit rank may raise that; a smaller one makes ``parse_word`` fail.

    Raises:
        ValueError: when no rank is given and the words mention no generator
    """
    if rank is not None:
        return validate_rank(rank)
    inferred = max((infer_rank(text) for text in texts), default=0)
    if inferred == 0:
        raise ValueError("the rank cannot be inferred from the identity; pass a rank")
    return inferred

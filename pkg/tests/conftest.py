import itertools
import random
import sys
from collections.abc import Callable, Iterator

import pytest
from loguru import logger

from whitebind.words import CyclicWord, Word, canonical_cyclic, free_reduce

Sampler = Callable[[int, int], Word]


@pytest.fixture(autouse=True)
def reset_logging() -> Iterator[None]:
    # CLI tests point loguru at CliRunner streams that close after each invoke.
    yield
    logger.remove()
    logger.add(sys.stderr, level="WARNING")


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240611)


def random_word(rng: random.Random, rank: int, max_length: int) -> Word:
    """Uniform-ish random freely reduced word: each step avoids cancelling the last letter."""
    length = rng.randint(0, max_length)
    letters: list[int] = []
    while len(letters) < length:
        letter = rng.choice([k for k in range(1, rank + 1)] + [-k for k in range(1, rank + 1)])
        if letters and letters[-1] == -letter:
            continue
        letters.append(letter)
    return free_reduce(letters, rank)


@pytest.fixture
def sample_word(rng: random.Random) -> Sampler:
    def sample(rank: int, max_length: int) -> Word:
        return random_word(rng, rank, max_length)

    return sample


def all_cyclic_words(rank: int, max_length: int) -> list[CyclicWord]:
    """Every non-trivial conjugacy class with a cyclically reduced length up to max_length."""
    letters = [k for k in range(1, rank + 1)] + [-k for k in range(1, rank + 1)]
    seen: dict[CyclicWord, None] = {}
    for length in range(1, max_length + 1):
        for candidate in itertools.product(letters, repeat=length):
            cyclic = canonical_cyclic(candidate, rank)
            if len(cyclic) == length:
                seen.setdefault(cyclic, None)
    return list(seen)


def invert_cyclic(cyclic: CyclicWord) -> CyclicWord:
    """Conjugacy class of the inverse."""
    return canonical_cyclic(tuple(-letter for letter in reversed(cyclic.letters)), cyclic.rank)

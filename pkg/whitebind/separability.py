"""Decide whether a free-group element binds the free group.

An element binds F_g when it lies in no proper free factor. The decision runs
Whitehead's algorithm: greedy length descent by type II moves, then the closure of
the minimal word under length-preserving Whitehead moves, taken up to relabeling of
the generators. The element is separable exactly when some word in that closure
omits a generator. Every verdict carries a certificate that ``whitebind.certificates``
can replay.
"""

import itertools
from collections import deque
from collections.abc import Callable, Iterator
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Any

from loguru import logger

from whitebind.automorphisms import (
    AutomorphismWitness,
    Move,
    TypeIIMove,
    apply_move,
    enumerate_nielsen,
    enumerate_type_I,
    enumerate_type_II,
    type_I_normal_form,
)
from whitebind.config import Limits
from whitebind.errors import EmptyWord, RankMismatch, ResourceLimit, WhitebindError
from whitebind.whitehead_graph import build, stallings_criterion, type_II_image_length
from whitebind.words import (
    CyclicWord,
    Word,
    as_cyclic,
    cyclic_reduce,
    cyclic_root,
    cyclic_word,
    format_word,
    missing_generators,
    validate_rank,
)

LEVEL_SET_PROGRESS_EVERY = 10_000


class VerdictKind(str, Enum):
    BINDS = "binds"
    SEPARABLE = "separable"


class MoveBudget:
    """Counts move applications against ``Limits.max_moves``."""

    def __init__(self, limit: int) -> None:
        self.limit = limit
        self.used = 0

    def spend(self, stage: str, partial: Any = None) -> None:
        self.used += 1
        if self.used > self.limit:
            logger.warning(f"{stage}: move budget of {self.limit} exhausted")
            raise ResourceLimit(stage, self.limit, self.used, partial)


@dataclass(frozen=True)
class MinimizationResult:
    """Outcome of Whitehead descent.

    Replaying ``witness`` on ``original`` gives ``minimal``; no type II move shortens
    ``minimal``.
    """

    original: CyclicWord
    minimal: CyclicWord
    witness: AutomorphismWitness

    @property
    def original_length(self) -> int:
        return len(self.original)

    @property
    def minimal_length(self) -> int:
        return len(self.minimal)


def _check_rank(word: Word | CyclicWord, rank: int) -> None:
    validate_rank(rank)
    if word.rank != rank:
        raise RankMismatch(f"word has rank {word.rank}, expected {rank}")


def minimize(
    cyclic: CyclicWord, limits: Limits | None = None, budget: MoveBudget | None = None
) -> MinimizationResult:
    """Shorten a cyclic word by type II moves until no move shortens it.

    Each round applies the first strictly shortening move in ``enumerate_type_II``
    order. By peak reduction the result has the least length in the automorphism
    orbit.

    Raises:
        ResourceLimit: if the move budget runs out
    """
    limits = limits or Limits()
    budget = budget or MoveBudget(limits.max_moves)
    moves = enumerate_type_II(cyclic.rank)
    current = cyclic
    witness = AutomorphismWitness()

    improved = bool(current.letters)
    while improved:
        improved = False
        for move in moves:
            budget.spend("minimize", MinimizationResult(cyclic, current, witness))
            image = apply_move(move, current)
            if len(image) < len(current):
                logger.debug(
                    f"Whitehead move {move}: {format_word(current)} -> {format_word(image)}"
                )
                current = image
                witness = witness.then(move)
                improved = True
                break

    logger.debug(f"Minimized {format_word(cyclic)} to {format_word(current)}")
    return MinimizationResult(cyclic, current, witness)


@dataclass
class LevelSet:
    """Breadth-first closure of a seed under length-preserving Whitehead moves.

    Attributes:
        seed: The starting word, normally the output of ``minimize``
        members: Members in discovery order
        parents: For each member, the member and moves it was first reached from
        entry: Moves taking the seed to the first member
        truncated: True when the member cap stopped the closure early
        stopped_at: Member at which a caller-supplied stop test fired, if any
    """

    seed: CyclicWord
    members: list[CyclicWord] = field(default_factory=list)
    parents: dict[CyclicWord, tuple[CyclicWord, tuple[Move, ...]] | None] = field(
        default_factory=dict
    )
    entry: AutomorphismWitness = field(default_factory=AutomorphismWitness)
    truncated: bool = False
    stopped_at: CyclicWord | None = None

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, word: object) -> bool:
        return word in self.parents

    def __iter__(self) -> Iterator[CyclicWord]:
        return iter(self.members)

    @property
    def exhausted(self) -> bool:
        return not self.truncated and self.stopped_at is None

    def witness(self, member: CyclicWord) -> AutomorphismWitness:
        """Moves taking the seed to the member."""
        if member not in self.parents:
            raise KeyError(f"{format_word(member)} is not in the level set")
        steps: list[tuple[Move, ...]] = []
        step = self.parents[member]
        while step is not None:
            previous, moves = step
            steps.append(moves)
            step = self.parents[previous]
        path = tuple(move for moves in reversed(steps) for move in moves)
        return self.entry.then(AutomorphismWitness(path))


def _length_preserving_type_II(member: CyclicWord) -> Iterator[TypeIIMove]:
    graph = build(member)
    return (
        move
        for move in enumerate_type_II(member.rank)
        if type_II_image_length(graph, move) == len(member)
    )


def _relabel(word: CyclicWord) -> tuple[CyclicWord, tuple[Move, ...]]:
    normal, move = type_I_normal_form(word)
    return normal, (() if normal == word else (move,))


def _close_level(
    seed: CyclicWord,
    limits: Limits,
    budget: MoveBudget,
    stop: Callable[[CyclicWord], bool] | None = None,
    by_class: bool = False,
) -> LevelSet:
    # With by_class, members are type I normal forms and only type II moves are used.
    start, entry = _relabel(seed) if by_class else (seed, ())
    levels = LevelSet(
        seed=seed,
        members=[start],
        parents={start: None},
        entry=AutomorphismWitness(entry),
    )
    if stop is not None and stop(start):
        levels.stopped_at = start
        return levels
    if start.is_identity:
        return levels

    # The identity signed permutation is first and moves nothing.
    type_I: tuple[Move, ...] = () if by_class else enumerate_type_I(seed.rank)[1:]
    queue = deque([start])
    while queue:
        current = queue.popleft()
        for move in itertools.chain(type_I, _length_preserving_type_II(current)):
            budget.spend("level_set", levels)
            image = apply_move(move, current)
            if len(image) != len(start):
                continue
            step: tuple[Move, ...] = (move,)
            if by_class:
                image, relabel = _relabel(image)
                step += relabel
            if image in levels.parents:
                continue
            levels.parents[image] = (current, step)
            levels.members.append(image)
            if len(levels.members) > limits.max_level_set:
                levels.truncated = True
                logger.warning(
                    f"Level set of {format_word(seed)} passed {limits.max_level_set} members"
                )
                raise ResourceLimit("level_set", limits.max_level_set, len(levels), levels)
            if len(levels.members) % LEVEL_SET_PROGRESS_EVERY == 0:
                logger.debug(f"Level set of {format_word(seed)}: {len(levels)} members")
            if stop is not None and stop(image):
                levels.stopped_at = image
                return levels
            queue.append(image)
    return levels


def level_set(seed: CyclicWord, limits: Limits | None = None) -> LevelSet:
    """Full closure of a (minimal) seed under length-preserving type I and II moves.

    Type II moves that would change the length, as read off the Whitehead graph, are
    skipped without being applied.

    Raises:
        ResourceLimit: when the member cap or move budget is exceeded; the error's
            ``partial`` is the truncated LevelSet
    """
    limits = limits or Limits()
    return _close_level(seed, limits, MoveBudget(limits.max_moves))


def level_classes(seed: CyclicWord, limits: Limits | None = None) -> LevelSet:
    """The level set of a (minimal) seed up to signed permutations of the generators.

    Members are ``type_I_normal_form`` representatives, reached by type II moves alone.
    A type II move conjugated by a signed permutation is again a type II move, so these
    classes are exactly the classes of ``level_set(seed)``. Support and the Stallings
    test do not see relabeling, which makes this the set ``decide`` searches.

    Raises:
        ResourceLimit: as for ``level_set``, counting classes against the member cap
    """
    limits = limits or Limits()
    return _close_level(seed, limits, MoveBudget(limits.max_moves), by_class=True)


@dataclass(frozen=True)
class SeparableCertificate:
    """Replaying ``witness`` on the word gives ``image``, which omits a generator."""

    witness: AutomorphismWitness
    omitted_generator: int
    image: CyclicWord

    def to_json(self) -> dict[str, Any]:
        return {
            "type": "omitted_generator",
            "omitted_generator": self.omitted_generator,
            "image": format_word(self.image),
            "witness": self.witness.to_json(),
        }


class BindsMethod(str, Enum):
    RANK_ONE = "rank_one"
    STALLINGS = "stallings"
    LEVEL_SET = "level_set"


@dataclass(frozen=True)
class BindsCertificate:
    """Evidence that a word binds.

    Attributes:
        method: How binding was established
        minimal: Minimal-length representative (the word itself on fast paths)
        witness: Moves from the word's cyclic core to ``minimal``
        level_set_size: Size of the exhausted level set (0 when none was built)
        member: A word passing the Stallings test, when one was found
        member_witness: Moves from the cyclic core to ``member``
    """

    method: BindsMethod
    minimal: CyclicWord
    witness: AutomorphismWitness
    level_set_size: int = 0
    member: CyclicWord | None = None
    member_witness: AutomorphismWitness | None = None

    def to_json(self) -> dict[str, Any]:
        return {
            "type": self.method.value,
            "minimal_word": format_word(self.minimal),
            "witness": self.witness.to_json(),
            "level_set_size": self.level_set_size,
            "member": None if self.member is None else format_word(self.member),
            "member_witness": None
            if self.member_witness is None
            else self.member_witness.to_json(),
        }


@dataclass(frozen=True)
class VerdictStats:
    minimal_length: int | None
    level_set_size: int
    fast_path: bool


@dataclass(frozen=True)
class Verdict:
    """Binds or Separable, with a certificate."""

    word: Word
    core: CyclicWord
    kind: VerdictKind
    certificate: SeparableCertificate | BindsCertificate
    stats: VerdictStats

    @property
    def binds(self) -> bool:
        return self.kind is VerdictKind.BINDS

    @property
    def rank(self) -> int:
        return self.word.rank

    def to_json(self) -> dict[str, Any]:
        return {
            "word": format_word(self.word),
            "rank": self.rank,
            "verdict": self.kind.value,
            "certificate": self.certificate.to_json(),
            "stats": {
                "minimal_length": self.stats.minimal_length,
                "level_set_size": self.stats.level_set_size,
                "fast_path": self.stats.fast_path,
            },
        }


def _separable(
    word: Word,
    core: CyclicWord,
    witness: AutomorphismWitness,
    image: CyclicWord,
    stats: VerdictStats,
) -> Verdict:
    omitted = missing_generators(image)[0]
    logger.info(f"{format_word(word)} is separable: image {format_word(image)} omits x{omitted}")
    certificate = SeparableCertificate(witness, omitted, image)
    return Verdict(word, core, VerdictKind.SEPARABLE, certificate, stats)


def decide(word: Word | CyclicWord, rank: int, limits: Limits | None = None) -> Verdict:
    """Decide whether the word binds the free group of the given rank.

    Pipeline: the identity is separable; in rank 1 every other word binds; a cyclic
    core missing a generator is separable; a core passing the Stallings test binds;
    otherwise minimize and search the level set of the minimal word for a member
    missing a generator. If the exhausted level set has none, the word binds.

    Raises:
        RankMismatch: if the word's rank is not ``rank``
        ResourceLimit: if a search cap is hit (never turned into a verdict)
    """
    _check_rank(word, rank)
    limits = limits or Limits()
    plain = word.as_word() if isinstance(word, CyclicWord) else word
    empty = AutomorphismWitness()

    # Step 0: the identity lies in every free factor.
    if plain.is_identity:
        core = cyclic_reduce(plain)[0]
        return _separable(plain, core, empty, core, VerdictStats(0, 0, True))

    core = cyclic_reduce(plain)[0]

    # Step 1: in rank 1 every non-trivial element binds.
    if rank == 1:
        certificate = BindsCertificate(
            BindsMethod.RANK_ONE, core, empty, member=core, member_witness=empty
        )
        stats = VerdictStats(len(core), 0, True)
        return Verdict(plain, core, VerdictKind.BINDS, certificate, stats)

    # Step 2: a visible proper free factor.
    if missing_generators(core):
        return _separable(plain, core, empty, core, VerdictStats(None, 0, True))

    # Step 3: Stallings fast path.
    if stallings_criterion(core).certified:
        logger.info(f"{format_word(plain)} binds: Whitehead graph has no cut vertex")
        certificate = BindsCertificate(
            BindsMethod.STALLINGS, core, empty, member=core, member_witness=empty
        )
        stats = VerdictStats(len(core), 0, True)
        return Verdict(plain, core, VerdictKind.BINDS, certificate, stats)

    # Step 4: Whitehead descent.
    budget = MoveBudget(limits.max_moves)
    result = minimize(core, limits, budget)
    logger.info(
        f"Minimized {format_word(plain)}: length {result.original_length} -> "
        f"{result.minimal_length}"
    )
    if missing_generators(result.minimal):
        stats = VerdictStats(result.minimal_length, 0, False)
        return _separable(plain, core, result.witness, result.minimal, stats)

    # Step 5: level set of the minimal word.
    levels = _close_level(
        result.minimal,
        limits,
        budget,
        stop=lambda member: bool(missing_generators(member)),
        by_class=True,
    )
    if levels.stopped_at is not None:
        witness = result.witness.then(levels.witness(levels.stopped_at))
        stats = VerdictStats(result.minimal_length, len(levels), False)
        return _separable(plain, core, witness, levels.stopped_at, stats)

    member = next((m for m in levels if stallings_criterion(m).certified), None)
    member_witness = None if member is None else result.witness.then(levels.witness(member))
    certificate = BindsCertificate(
        BindsMethod.LEVEL_SET,
        result.minimal,
        result.witness,
        level_set_size=len(levels),
        member=member,
        member_witness=member_witness,
    )
    logger.info(f"{format_word(plain)} binds: level set of {len(levels)} words, all full support")
    stats = VerdictStats(result.minimal_length, len(levels), False)
    return Verdict(plain, core, VerdictKind.BINDS, certificate, stats)


def is_primitive(word: Word | CyclicWord, rank: int, limits: Limits | None = None) -> bool:
    """True iff the element belongs to some free basis."""
    _check_rank(word, rank)
    cyclic = as_cyclic(word)
    if cyclic.is_identity:
        return False
    return minimize(cyclic, limits).minimal_length == 1


def is_power_of_primitive(
    word: Word | CyclicWord, rank: int, limits: Limits | None = None
) -> tuple[bool, int]:
    """Whether the element is a power of a primitive element.

    Returns:
        (flag, exponent) where exponent is that of the cyclic root of the element

    Raises:
        EmptyWord: for the identity
    """
    _check_rank(word, rank)
    cyclic = as_cyclic(word)
    if cyclic.is_identity:
        raise EmptyWord("the identity is not a power of anything non-trivial")
    root, exponent = cyclic_root(cyclic)
    return is_primitive(root, rank, limits), exponent


def rank_two_binds(word: Word | CyclicWord, limits: Limits | None = None) -> bool:
    """Rank-2 shortcut: a non-trivial element binds F_2 iff it is no power of a primitive."""
    _check_rank(word, 2)
    if as_cyclic(word).is_identity:
        return False
    return not is_power_of_primitive(word, 2, limits)[0]


class OracleOutcome(str, Enum):
    SEPARABLE_WITNESS_FOUND = "separable_witness_found"
    NO_WITNESS_TO_DEPTH = "no_witness_to_depth"


@dataclass(frozen=True)
class OracleResult:
    outcome: OracleOutcome
    depth: int
    states: int
    witness: AutomorphismWitness | None = None
    image: CyclicWord | None = None

    @property
    def found(self) -> bool:
        return self.outcome is OracleOutcome.SEPARABLE_WITNESS_FOUND

    def to_json(self) -> dict[str, Any]:
        return {
            "outcome": self.outcome.value,
            "depth": self.depth,
            "states": self.states,
            "image": None if self.image is None else format_word(self.image),
            "witness": None if self.witness is None else self.witness.to_json(),
        }


def brute_force_oracle(word: Word | CyclicWord, rank: int, depth: int) -> OracleResult:
    """Bounded search for an automorphic image that omits a generator.

    Breadth-first over sequences of elementary Nielsen automorphisms of length at most
    ``depth``, with image length capped at |word| + depth. It uses no length descent or
    peak reduction, so it checks ``decide`` independently.
    """
    _check_rank(word, rank)
    if depth < 0:
        raise ValueError(f"depth must be non-negative, got {depth}")
    start = as_cyclic(word)
    if missing_generators(start):
        return OracleResult(
            OracleOutcome.SEPARABLE_WITNESS_FOUND, 0, 1, AutomorphismWitness(), start
        )

    cap = len(start) + depth
    moves = enumerate_nielsen(rank)
    parents: dict[CyclicWord, tuple[CyclicWord, Move] | None] = {start: None}

    def witness_to(state: CyclicWord) -> AutomorphismWitness:
        path: list[Move] = []
        step = parents[state]
        while step is not None:
            previous, move = step
            path.append(move)
            step = parents[previous]
        return AutomorphismWitness(tuple(reversed(path)))

    frontier = [start]
    for level in range(1, depth + 1):
        next_frontier = []
        for state in frontier:
            for move in moves:
                image = apply_move(move, state)
                if len(image) > cap or image in parents:
                    continue
                parents[image] = (state, move)
                if missing_generators(image):
                    return OracleResult(
                        OracleOutcome.SEPARABLE_WITNESS_FOUND,
                        level,
                        len(parents),
                        witness_to(image),
                        image,
                    )
                next_frontier.append(image)
        logger.debug(f"Oracle depth {level}: {len(next_frontier)} new, {len(parents)} states")
        frontier = next_frontier
        if not frontier:
            break
    return OracleResult(OracleOutcome.NO_WITNESS_TO_DEPTH, depth, len(parents))


@lru_cache(maxsize=None)
def sample_binding_word(rank: int) -> CyclicWord:
    """A word binding F_g: x1 for g = 1, x1^2 x2^2 ... xg^2 otherwise.

    The word is checked with ``decide`` before it is returned.
    """
    validate_rank(rank)
    letters = (1,) if rank == 1 else tuple(k for k in range(1, rank + 1) for _ in range(2))
    sample = cyclic_word(letters, rank)
    if not decide(sample, rank).binds:
        raise WhitebindError(f"sample word {format_word(sample)} does not bind rank {rank}")
    return sample

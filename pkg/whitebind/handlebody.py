"""Topological reading of binding verdicts for knots in a handlebody.

The fundamental group of a genus g handlebody V is identified with F_g through a
fixed one-vertex spine, so a homotopy class of knots in V is a conjugacy class in
F_g. This module does no topology of its own: it runs ``decide`` once and states
which known result turns the algebraic verdict into each topological flag.
"""

from dataclasses import dataclass
from typing import Any

from whitebind.config import Limits
from whitebind.separability import Verdict, decide
from whitebind.words import CyclicWord, Word, as_cyclic, format_word, validate_rank


@dataclass(frozen=True)
class Citation:
    """A known result, by stable key, the name it is usually cited under, and content."""

    key: str
    source: str
    statement: str

    def __str__(self) -> str:
        return f"[{self.key}] {self.source}: {self.statement}"


BINDING_BOUNDARY_INCOMPRESSIBLE = Citation(
    "binding-boundary-incompressible",
    "Lemma 1.1",
    "For a knot K on the boundary of M, the surface ∂M∖K is incompressible in M "
    "if and only if K binds π₁(M).",
)
BINDING_FILLS_UP = Citation(
    "binding-fills-up",
    "Lemma 1.4",
    "If K binds π₁(M) then K fills up M; the converse holds when M satisfies the "
    "strong bounded Kneser conjecture.",
)
HANDLEBODY_SBKC = Citation(
    "handlebody-sbkc",
    "§1 SBKC remark",
    "A handlebody of genus g satisfies the strong bounded Kneser conjecture, so in a "
    "handlebody a knot fills up exactly when it binds.",
)

BOUNDARY_NOTE = (
    "This flag concerns a curve realizing the class on ∂V; whether an arbitrary class "
    "of interior knots is realized by a curve on ∂V is not decided here."
)


@dataclass(frozen=True)
class HandlebodyContext:
    """A genus g handlebody with π₁ identified with F_g."""

    genus: int

    def __post_init__(self) -> None:
        validate_rank(self.genus)


@dataclass(frozen=True)
class Finding:
    """One topological flag with the reasoning that licenses it."""

    value: bool
    explanation: str
    citations: tuple[Citation, ...]
    note: str | None = None


def _fills_up(verdict: Verdict) -> Finding:
    word = format_word(verdict.word) or "the trivial class"
    if verdict.binds:
        explanation = f"{word} binds F_{verdict.rank}, so the knot fills up the handlebody."
    else:
        explanation = (
            f"{word} lies in a proper free factor of F_{verdict.rank}; since handlebodies "
            f"satisfy the strong bounded Kneser conjecture, the knot does not fill up."
        )
    return Finding(verdict.binds, explanation, (BINDING_FILLS_UP, HANDLEBODY_SBKC))


def _boundary_complement(verdict: Verdict) -> Finding:
    word = format_word(verdict.word) or "the trivial class"
    if verdict.binds:
        explanation = f"{word} binds F_{verdict.rank}, so ∂V∖K is incompressible in V."
    else:
        explanation = f"{word} does not bind F_{verdict.rank}, so ∂V∖K compresses in V."
    return Finding(
        verdict.binds, explanation, (BINDING_BOUNDARY_INCOMPRESSIBLE,), note=BOUNDARY_NOTE
    )


def fills_up(
    ctx: HandlebodyContext, word: Word | CyclicWord, limits: Limits | None = None
) -> Finding:
    """Whether knots in the class fill up the handlebody (same as binding)."""
    return _fills_up(decide(word, ctx.genus, limits))


def boundary_complement_incompressible(
    ctx: HandlebodyContext, word: Word | CyclicWord, limits: Limits | None = None
) -> Finding:
    """Whether ∂V∖K is incompressible for a boundary curve K in the class."""
    return _boundary_complement(decide(word, ctx.genus, limits))


@dataclass(frozen=True)
class TopologicalVerdict:
    """All topological flags of one knot class, from a single decision."""

    word: CyclicWord
    genus: int
    verdict: Verdict
    fills_up: Finding
    boundary_complement_incompressible: Finding

    @property
    def binds(self) -> bool:
        return self.verdict.binds

    @property
    def citations(self) -> list[Citation]:
        seen: list[Citation] = []
        for finding in (self.fills_up, self.boundary_complement_incompressible):
            for citation in finding.citations:
                if citation not in seen:
                    seen.append(citation)
        return seen

    @property
    def explanations(self) -> list[str]:
        lines = [self.fills_up.explanation, self.boundary_complement_incompressible.explanation]
        if self.boundary_complement_incompressible.note:
            lines.append(self.boundary_complement_incompressible.note)
        return lines

    def to_json(self) -> dict[str, Any]:
        return {
            "word": format_word(self.word),
            "genus": self.genus,
            "binds": self.binds,
            "fills_up": self.fills_up.value,
            "boundary_complement_incompressible": self.boundary_complement_incompressible.value,
            "explanations": self.explanations,
            "citations": [str(citation) for citation in self.citations],
            "implications": [
                "binds => fills up",
                "fills up => binds (strong bounded Kneser conjecture holds in handlebodies)",
                "binds <=> boundary complement incompressible (curves on the boundary)",
            ],
            "verdict": self.verdict.to_json(),
        }


def report(
    ctx: HandlebodyContext, word: Word | CyclicWord, limits: Limits | None = None
) -> TopologicalVerdict:
    """Decide once and fan the verdict out to every topological flag."""
    verdict = decide(word, ctx.genus, limits)
    return TopologicalVerdict(
        word=as_cyclic(word),
        genus=ctx.genus,
        verdict=verdict,
        fills_up=_fills_up(verdict),
        boundary_complement_incompressible=_boundary_complement(verdict),
    )

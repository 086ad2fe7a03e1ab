"""Run commands over JSONL records and build the JSON result of each command."""

import json
from collections.abc import Iterable
from concurrent.futures import ProcessPoolExecutor
from typing import Any

from loguru import logger

from whitebind.automorphisms import is_basis
from whitebind.config import Limits
from whitebind.errors import ResourceLimit, WhitebindError
from whitebind.handlebody import HandlebodyContext, fills_up, report
from whitebind.separability import (
    decide,
    is_power_of_primitive,
    is_primitive,
    minimize,
)
from whitebind.whitehead_graph import build, stallings_criterion, to_json
from whitebind.words import as_cyclic, format_word, parse_word, resolve_rank

COMMANDS = (
    "binds",
    "minimize",
    "primitive",
    "power_of_primitive",
    "basis",
    "fills_up",
    "report",
    "wgraph",
)


def run_command(
    command: str, texts: list[str], rank: int | None, limits: Limits
) -> dict[str, Any]:
    """Run one command and return its JSON result.

    Args:
        command: One of COMMANDS
        texts: The word strings (one word, or g words for "basis")
        rank: Explicit rank, or None to infer it from the words
        limits: Search caps

    Returns:
        The command's JSON object
    """
    if command not in COMMANDS:
        raise ValueError(f"unknown command {command!r}; expected one of {', '.join(COMMANDS)}")
    rank = resolve_rank(texts, rank)
    words = [parse_word(text, rank) for text in texts]

    if command == "basis":
        check = is_basis(words, rank)
        return {
            "words": [format_word(word) for word in words],
            "rank": rank,
            "basis": check.is_basis,
            "reduced": [format_word(word) for word in check.reduced],
            "witness": None if check.witness is None else check.witness.to_json(),
        }

    if len(words) != 1:
        raise ValueError(f"{command} takes exactly one word, got {len(words)}")
    word = words[0]

    if command == "binds":
        return decide(word, rank, limits).to_json()
    if command == "minimize":
        result = minimize(as_cyclic(word), limits)
        return {
            "word": format_word(word),
            "rank": rank,
            "original_length": result.original_length,
            "minimal_length": result.minimal_length,
            "minimal_word": format_word(result.minimal),
            "witness": result.witness.to_json(),
        }
    if command == "primitive":
        return {
            "word": format_word(word),
            "rank": rank,
            "primitive": is_primitive(word, rank, limits),
        }
    if command == "power_of_primitive":
        flag, exponent = is_power_of_primitive(word, rank, limits)
        return {
            "word": format_word(word),
            "rank": rank,
            "power_of_primitive": flag,
            "exponent": exponent,
        }
    if command == "fills_up":
        finding = fills_up(HandlebodyContext(rank), word, limits)
        return {
            "word": format_word(word),
            "genus": rank,
            "fills_up": finding.value,
            "explanation": finding.explanation,
            "citations": [str(citation) for citation in finding.citations],
        }
    if command == "report":
        return report(HandlebodyContext(rank), word, limits).to_json()

    cyclic = as_cyclic(word)
    graph = build(cyclic)
    criterion = stallings_criterion(cyclic)
    return {
        "word": format_word(cyclic),
        "rank": rank,
        **to_json(graph),
        "stallings": criterion.outcome.value,
    }


def run_record(record: Any, limits: Limits) -> dict[str, Any]:
    """Run a parsed BatchRecord.

    A record is {"word": "...", "rank": g, "command": "binds"}; "basis" records give
    "words" instead of "word". Rank is optional when the words determine it.
    """
    if not isinstance(record, dict):
        raise ValueError(f"a record must be a JSON object, got {type(record).__name__}")
    command = record.get("command", "binds")
    if command == "basis":
        texts = record.get("words")
        if not isinstance(texts, list) or not all(isinstance(text, str) for text in texts):
            raise ValueError('a basis record needs "words": a list of strings')
    else:
        text = record.get("word")
        if not isinstance(text, str):
            raise ValueError('a record needs "word": a string')
        texts = [text]
    rank = record.get("rank")
    if rank is not None and (isinstance(rank, bool) or not isinstance(rank, int)):
        raise ValueError(f'"rank" must be an integer, got {rank!r}')
    return run_command(command, texts, rank, limits)


def run_line(item: tuple[int, str, Limits]) -> dict[str, Any]:
    """Run one JSONL line; failures become an error object instead of raising."""
    number, line, limits = item
    try:
        if not line.strip():
            raise ValueError("blank line")
        result = run_record(json.loads(line), limits)
    except ResourceLimit as e:
        logger.warning(f"Line {number}: {e}")
        return {"line": number, "error": f"ResourceLimit: {e}"}
    except (WhitebindError, ValueError) as e:
        logger.warning(f"Line {number}: {e}")
        return {"line": number, "error": f"{type(e).__name__}: {e}"}
    return {"line": number, **result}


def run_batch(lines: Iterable[str], limits: Limits, workers: int = 1) -> list[dict[str, Any]]:
    """Run every line; results come back in input order, blank lines as errors.

    Args:
        lines: JSONL text lines, one BatchRecord each
        limits: Search caps
        workers: Number of worker processes; 1 runs inline

    Returns:
        One result object per input line
    """
    items = [(number, line, limits) for number, line in enumerate(lines, start=1)]
    logger.info(f"Running {len(items)} batch record(s) with {workers} worker(s)")
    if workers <= 1:
        return [run_line(item) for item in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_line, items))

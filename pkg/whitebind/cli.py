"""Command-line front end for whitebind.

Exit codes: 0 = true / binds, 1 = false / separable, 2 = input error,
3 = resource limit reached.
"""

import json
import sys
from collections.abc import Callable, Iterator
from contextlib import contextmanager
from typing import IO, Any, TypeVar

import click
from loguru import logger

from whitebind.batch import run_batch, run_command
from whitebind.certificates import verdict_from_json, verify_verdict
from whitebind.config import default_log_level, load_limits
from whitebind.errors import CertificateError, ResourceLimit, WhitebindError
from whitebind.separability import brute_force_oracle, decide, sample_binding_word
from whitebind.whitehead_graph import build, stallings_criterion, to_dot, to_json
from whitebind.words import as_cyclic, format_word, parse_word, resolve_rank

EXIT_TRUE = 0
EXIT_FALSE = 1
EXIT_INPUT_ERROR = 2
EXIT_RESOURCE_LIMIT = 3

F = TypeVar("F", bound=Callable[..., Any])


def configure_logging(verbose: bool, quiet: bool) -> None:
    """Send loguru output to stderr so stdout stays machine-readable."""
    level = "DEBUG" if verbose else "WARNING" if quiet else default_log_level()
    logger.remove()
    logger.add(sys.stderr, level=level, format="<level>{level: <8}</level> {message}")


@contextmanager
def handle_errors() -> Iterator[None]:
    """Turn library errors into the documented exit codes."""
    try:
        yield
    except ResourceLimit as e:
        logger.error(f"Resource limit: {e}")
        sys.exit(EXIT_RESOURCE_LIMIT)
    except (WhitebindError, ValueError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        sys.exit(EXIT_INPUT_ERROR)


def rank_option(func: F) -> F:
    return click.option(
        "--rank",
        "-r",
        type=click.IntRange(min=1),
        default=None,
        help="Rank of the free group (default: largest generator in the word)",
    )(func)


def limit_options(func: F) -> F:
    func = click.option(
        "--max-moves",
        type=click.IntRange(min=1),
        default=None,
        help="Cap on move applications (default: env WHITEBIND_MAX_MOVES or 10000000)",
    )(func)
    return click.option(
        "--max-level-set",
        type=click.IntRange(min=1),
        default=None,
        help="Cap on level-set size (default: env WHITEBIND_MAX_LEVEL_SET or 200000)",
    )(func)


def json_option(func: F) -> F:
    return click.option("--json", "as_json", is_flag=True, help="Print JSON output")(func)


def echo_json(data: Any) -> None:
    click.echo(json.dumps(data))


@click.group()
@click.option("--verbose", "-v", is_flag=True, help="Log search progress")
@click.option("--quiet", "-q", is_flag=True, help="Only log warnings and errors")
def main(verbose: bool, quiet: bool) -> None:
    """Decide whether free-group elements bind the free group.

    Words are written compactly (a = x1, A = x1^-1, b = x2, ...) or as indexed
    tokens ("x1 x2 X1 X2").

    Examples:

      # The element x1 x2 x1 x2^3 binds F_2
      whitebind binds ababbb --rank 2

      # Whitehead graph as DOT
      whitebind wgraph abAB --dot

      # Run a JSONL file of records with 4 worker processes
      whitebind batch words.jsonl --workers 4
    """
    configure_logging(verbose, quiet)


@main.command("binds")
@click.argument("word")
@rank_option
@json_option
@limit_options
def cmd_binds(
    word: str,
    rank: int | None,
    as_json: bool,
    max_level_set: int | None,
    max_moves: int | None,
) -> None:
    """Decide whether WORD binds F_g (exit 0) or is separable (exit 1)."""
    with handle_errors():
        limits = load_limits(max_level_set, max_moves)
        rank = resolve_rank([word], rank)
        verdict = decide(parse_word(word, rank), rank, limits)

    if as_json:
        echo_json(verdict.to_json())
    else:
        click.echo(f"{format_word(verdict.word) or '1'}: {verdict.kind.value} F_{rank}")
        certificate = verdict.certificate.to_json()
        if certificate["type"] == "omitted_generator":
            click.echo(
                f"  image {certificate['image'] or '1'} omits x{certificate['omitted_generator']}"
                f" after {len(certificate['witness'])} move(s)"
            )
        else:
            click.echo(f"  certificate: {certificate['type']}")
            if certificate["member"] is not None:
                click.echo(f"  Whitehead graph of {certificate['member']} has no cut vertex")
    sys.exit(EXIT_TRUE if verdict.binds else EXIT_FALSE)


@main.command("wgraph")
@click.argument("word")
@rank_option
@click.option("--dot", "as_dot", is_flag=True, help="Print DOT (the default)")
@json_option
def cmd_wgraph(word: str, rank: int | None, as_dot: bool, as_json: bool) -> None:
    """Print the Whitehead graph of WORD."""
    with handle_errors():
        rank = resolve_rank([word], rank)
        cyclic = as_cyclic(parse_word(word, rank))
        graph = build(cyclic)
        criterion = stallings_criterion(cyclic)

    if as_json:
        echo_json(to_json(graph))
    else:
        click.echo(to_dot(graph), nl=False)
    logger.info(criterion.explanation)


@main.command("minimize")
@click.argument("word")
@rank_option
@json_option
@limit_options
def cmd_minimize(
    word: str,
    rank: int | None,
    as_json: bool,
    max_level_set: int | None,
    max_moves: int | None,
) -> None:
    """Whitehead-minimize WORD."""
    with handle_errors():
        result = run_command("minimize", [word], rank, load_limits(max_level_set, max_moves))

    if as_json:
        echo_json(result)
    else:
        click.echo(
            f"length {result['original_length']} -> {result['minimal_length']}: "
            f"{result['minimal_word'] or '1'}"
        )
        click.echo(f"  witness: {json.dumps(result['witness'])}")


@main.command("primitive")
@click.argument("word")
@rank_option
@json_option
@limit_options
def cmd_primitive(
    word: str,
    rank: int | None,
    as_json: bool,
    max_level_set: int | None,
    max_moves: int | None,
) -> None:
    """Is WORD a member of some free basis? (exit 0 yes, 1 no)"""
    with handle_errors():
        result = run_command("primitive", [word], rank, load_limits(max_level_set, max_moves))

    if as_json:
        echo_json(result)
    else:
        click.echo(f"primitive: {str(result['primitive']).lower()}")
    sys.exit(EXIT_TRUE if result["primitive"] else EXIT_FALSE)


@main.command("power-of-primitive")
@click.argument("word")
@rank_option
@json_option
@limit_options
def cmd_power_of_primitive(
    word: str,
    rank: int | None,
    as_json: bool,
    max_level_set: int | None,
    max_moves: int | None,
) -> None:
    """Is WORD a power of a primitive element? (exit 0 yes, 1 no)"""
    with handle_errors():
        limits = load_limits(max_level_set, max_moves)
        result = run_command("power_of_primitive", [word], rank, limits)

    if as_json:
        echo_json(result)
    else:
        flag = str(result["power_of_primitive"]).lower()
        click.echo(f"power of primitive: {flag} (exponent {result['exponent']})")
    sys.exit(EXIT_TRUE if result["power_of_primitive"] else EXIT_FALSE)


@main.command("basis")
@click.argument("words", nargs=-1, required=True)
@rank_option
@json_option
def cmd_basis(words: tuple[str, ...], rank: int | None, as_json: bool) -> None:
    """Do WORDS form a free basis? (exit 0 yes, 1 no)"""
    with handle_errors():
        result = run_command("basis", list(words), rank, load_limits())

    if as_json:
        echo_json(result)
    else:
        click.echo(f"basis: {str(result['basis']).lower()}")
        if result["witness"] is not None:
            click.echo(f"  witness: {json.dumps(result['witness'])}")
        else:
            click.echo(f"  Nielsen-reduced: {' '.join(w or '1' for w in result['reduced'])}")
    sys.exit(EXIT_TRUE if result["basis"] else EXIT_FALSE)


@main.command("fills-up")
@click.argument("word")
@rank_option
@json_option
@limit_options
def cmd_fills_up(
    word: str,
    rank: int | None,
    as_json: bool,
    max_level_set: int | None,
    max_moves: int | None,
) -> None:
    """Does a knot in the class WORD fill up the genus-g handlebody? (exit 0 yes, 1 no)"""
    with handle_errors():
        result = run_command("fills_up", [word], rank, load_limits(max_level_set, max_moves))

    if as_json:
        echo_json(result)
    else:
        click.echo(f"fills up: {str(result['fills_up']).lower()}")
        click.echo(f"  {result['explanation']}")
        for citation in result["citations"]:
            click.echo(f"  {citation}")
    sys.exit(EXIT_TRUE if result["fills_up"] else EXIT_FALSE)


@main.command("report")
@click.argument("word")
@rank_option
@json_option
@limit_options
def cmd_report(
    word: str,
    rank: int | None,
    as_json: bool,
    max_level_set: int | None,
    max_moves: int | None,
) -> None:
    """All handlebody flags for the class WORD, with citations."""
    with handle_errors():
        result = run_command("report", [word], rank, load_limits(max_level_set, max_moves))

    if as_json:
        echo_json(result)
    else:
        click.echo(f"{result['word'] or '1'} in the genus {result['genus']} handlebody")
        click.echo(f"  binds: {str(result['binds']).lower()}")
        click.echo(f"  fills up: {str(result['fills_up']).lower()}")
        flag = str(result["boundary_complement_incompressible"]).lower()
        click.echo(f"  boundary complement incompressible: {flag}")
        for line in result["explanations"]:
            click.echo(f"  {line}")
        for citation in result["citations"]:
            click.echo(f"  {citation}")
    sys.exit(EXIT_TRUE if result["binds"] else EXIT_FALSE)


@main.command("verify-certificate")
@click.argument("source", type=click.File("r"))
@limit_options
def cmd_verify_certificate(
    source: IO[str], max_level_set: int | None, max_moves: int | None
) -> None:
    """Replay the Verdict JSON in SOURCE (one per line, "-" for stdin)."""
    with handle_errors():
        limits = load_limits(max_level_set, max_moves)
        try:
            verdicts = [
                verdict_from_json(json.loads(line)) for line in source.read().splitlines()
                if line.strip()
            ]
        except json.JSONDecodeError as e:
            raise ValueError(f"not JSON: {e}") from e
        if not verdicts:
            raise ValueError("no verdict to verify")

    failures = 0
    with handle_errors():
        for verdict in verdicts:
            name = format_word(verdict.word) or "1"
            try:
                verify_verdict(verdict, limits)
            except CertificateError as e:
                failures += 1
                click.echo(f"{name}: REJECTED ({e})")
                continue
            click.echo(f"{name}: {verdict.kind.value} verified")
    sys.exit(EXIT_TRUE if failures == 0 else EXIT_FALSE)


@main.command("batch")
@click.argument("source", type=click.File("r"))
@click.option(
    "--workers", type=click.IntRange(min=1), default=1, help="Worker processes (default: 1)"
)
@limit_options
def cmd_batch(
    source: IO[str], workers: int, max_level_set: int | None, max_moves: int | None
) -> None:
    """Run a JSONL file of records; one JSON result per line, in input order.

    Each record is {"word": "...", "rank": g, "command": "binds"}. Commands: binds,
    minimize, primitive, power_of_primitive, basis (with "words"), fills_up, report,
    wgraph.
    """
    with handle_errors():
        limits = load_limits(max_level_set, max_moves)
        try:
            lines = source.read().splitlines()
        except UnicodeDecodeError as e:
            raise ValueError(f"batch file is not text: {e}") from e

    for result in run_batch(lines, limits, workers):
        echo_json(result)


@main.command("sample")
@rank_option
def cmd_sample(rank: int | None) -> None:
    """Print a word that binds F_g (x1^2 x2^2 ... xg^2), checked by the decision procedure."""
    rank = rank or 2
    with handle_errors():
        sample = sample_binding_word(rank)
    click.echo(f"{format_word(sample)}: binds F_{rank}")


@main.command("oracle")
@click.argument("word")
@rank_option
@click.option(
    "--oracle-depth", type=click.IntRange(min=0), default=6, help="Search depth (default: 6)"
)
@json_option
def cmd_oracle(word: str, rank: int | None, oracle_depth: int, as_json: bool) -> None:
    """Brute-force search for a separating automorphism (exit 1 if one is found)."""
    with handle_errors():
        rank = resolve_rank([word], rank)
        result = brute_force_oracle(parse_word(word, rank), rank, oracle_depth)

    if as_json:
        echo_json(result.to_json())
    else:
        click.echo(f"{result.outcome.value} (depth {result.depth}, {result.states} states)")
    sys.exit(EXIT_FALSE if result.found else EXIT_TRUE)


if __name__ == "__main__":
    main()

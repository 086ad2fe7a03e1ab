"""Read Verdict JSON back and replay its certificate."""

from typing import Any

from loguru import logger

from whitebind.automorphisms import (
    AutomorphismWitness,
    apply_move,
    apply_witness,
    enumerate_type_II,
)
from whitebind.config import Limits
from whitebind.errors import CertificateError, WhitebindError
from whitebind.separability import (
    BindsCertificate,
    BindsMethod,
    SeparableCertificate,
    Verdict,
    VerdictKind,
    VerdictStats,
    level_classes,
)
from whitebind.whitehead_graph import stallings_criterion
from whitebind.words import (
    CyclicWord,
    cyclic_reduce,
    format_word,
    missing_generators,
    parse_cyclic,
    parse_word,
    support,
)


def _witness(raw: Any) -> AutomorphismWitness:
    if not isinstance(raw, list):
        raise CertificateError(f"witness must be a list of moves, got {raw!r}")
    try:
        return AutomorphismWitness.from_json(raw)
    except ValueError as e:
        raise CertificateError(str(e)) from e


def verdict_from_json(data: dict[str, Any]) -> Verdict:
    """Rebuild a Verdict from its JSON form.

    Raises:
        CertificateError: if a field is missing or malformed
    """
    try:
        rank = int(data["rank"])
        word = parse_word(data["word"], rank)
        kind = VerdictKind(data["verdict"])
        raw = data["certificate"]
        stats_raw = data.get("stats", {})
        stats = VerdictStats(
            stats_raw.get("minimal_length"),
            int(stats_raw.get("level_set_size", 0)),
            bool(stats_raw.get("fast_path", False)),
        )

        certificate: SeparableCertificate | BindsCertificate
        if raw["type"] == "omitted_generator":
            certificate = SeparableCertificate(
                _witness(raw["witness"]),
                int(raw["omitted_generator"]),
                parse_cyclic(raw["image"], rank),
            )
        else:
            member = raw.get("member")
            member_witness = raw.get("member_witness")
            certificate = BindsCertificate(
                BindsMethod(raw["type"]),
                parse_cyclic(raw["minimal_word"], rank),
                _witness(raw["witness"]),
                int(raw.get("level_set_size", 0)),
                None if member is None else parse_cyclic(member, rank),
                None if member_witness is None else _witness(member_witness),
            )
    except (KeyError, TypeError, ValueError) as e:
        raise CertificateError(f"malformed verdict: {e}") from e

    core = cyclic_reduce(word)[0]
    return Verdict(word, core, kind, certificate, stats)


def _replay(witness: AutomorphismWitness, core: CyclicWord) -> CyclicWord:
    try:
        return apply_witness(witness, core)
    except WhitebindError as e:
        raise CertificateError(f"witness does not replay: {e}") from e


def _verify_separable(verdict: Verdict, certificate: SeparableCertificate) -> None:
    image = _replay(certificate.witness, verdict.core)
    if image != certificate.image:
        raise CertificateError(
            f"witness sends {format_word(verdict.core)} to {format_word(image)}, "
            f"not {format_word(certificate.image)}"
        )
    if certificate.omitted_generator in support(image) or not (
        1 <= certificate.omitted_generator <= verdict.rank
    ):
        raise CertificateError(
            f"{format_word(image)} does not omit x{certificate.omitted_generator}"
        )


def _verify_binds(verdict: Verdict, certificate: BindsCertificate, limits: Limits) -> None:
    core = verdict.core
    if core.is_identity:
        raise CertificateError("the identity never binds")

    if certificate.method is BindsMethod.RANK_ONE:
        if verdict.rank != 1:
            raise CertificateError(f"rank-one certificate used in rank {verdict.rank}")
        return

    minimal = _replay(certificate.witness, core)
    if minimal != certificate.minimal:
        raise CertificateError(
            f"witness sends {format_word(core)} to {format_word(minimal)}, "
            f"not {format_word(certificate.minimal)}"
        )

    # A member passing the Stallings test settles it on its own.
    if certificate.member is not None:
        member_witness = certificate.member_witness or AutomorphismWitness()
        member = _replay(member_witness, core)
        if member != certificate.member:
            raise CertificateError(
                f"member witness gives {format_word(member)}, "
                f"not {format_word(certificate.member)}"
            )
        if not stallings_criterion(member).certified:
            raise CertificateError(f"{format_word(member)} fails the Stallings criterion")
        return

    if certificate.method is not BindsMethod.LEVEL_SET:
        raise CertificateError(f"{certificate.method.value} certificate without a member")

    for move in enumerate_type_II(minimal.rank):
        if len(apply_move(move, minimal)) < len(minimal):
            raise CertificateError(f"{format_word(minimal)} is not minimal")
    levels = level_classes(minimal, limits)
    if len(levels) != certificate.level_set_size:
        raise CertificateError(
            f"level set has {len(levels)} members, certificate claims "
            f"{certificate.level_set_size}"
        )
    for member in levels:
        if missing_generators(member):
            raise CertificateError(f"level set member {format_word(member)} omits a generator")


def verify_verdict(verdict: Verdict, limits: Limits | None = None) -> None:
    """Replay a verdict's certificate.

    Raises:
        CertificateError: if the certificate does not confirm the verdict
        ResourceLimit: if re-checking a level set runs over the caps
    """
    limits = limits or Limits()
    certificate = verdict.certificate
    if verdict.kind is VerdictKind.SEPARABLE:
        if not isinstance(certificate, SeparableCertificate):
            raise CertificateError("a separable verdict needs an omitted-generator certificate")
        _verify_separable(verdict, certificate)
    else:
        if not isinstance(certificate, BindsCertificate):
            raise CertificateError("a binds verdict needs a binding certificate")
        _verify_binds(verdict, certificate, limits)
    logger.debug(f"Certificate for {format_word(verdict.word)} ({verdict.kind.value}) verified")


def verify_verdict_json(data: dict[str, Any], limits: Limits | None = None) -> Verdict:
    """Parse Verdict JSON and replay its certificate; returns the verified Verdict."""
    verdict = verdict_from_json(data)
    verify_verdict(verdict, limits)
    return verdict

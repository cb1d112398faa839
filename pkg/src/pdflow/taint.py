"""Intra-procedural source/sink identification over one scope.

A single forward pass per scope: identifiers are matched against the rule
pack, string literals against the literal rules, callees against the sink
rules. Statements owning both a source and a sink yield a raw flow. When a
solid flow deposits source-derived data into a non-source assignment target,
the target joins the scope's taint set and seeds later statements.

Receivers are matched on their final chain segment only; arguments and
targets may also match a rule on an intermediate segment (``user.id``
matches on ``user`` and is reported as ``user.id``).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from enum import Enum

from .rulepack import Certainty, RulePack, SinkRule, SourceCategory
from .stmt import Arg, ArgKind, ChainRef, Statement, StatementKind


class Confidence(Enum):
    HIGH = "high"
    LOW = "low"


@dataclass(frozen=True)
class TaintedVar:
    name: str
    categories: tuple[SourceCategory, ...]
    stems: tuple[str, ...]
    origin: str  # "seeded:<rule-id>" or "derived:<finding-id>"
    confidence: Confidence


@dataclass(frozen=True)
class SourcePart:
    """One source participant of a raw flow."""

    position: str  # "target" | "receiver" | "arg:<i>" | "lit:<i>"
    name: str  # matched identifier (segment..tail) or literal text
    display: str  # full chain text as written, used in renderings
    stem: str
    categories: tuple[SourceCategory, ...]
    confidence: Confidence
    origin: str  # "rule:<id>" | "taint:<origin>" | "literal:<id>"

    @property
    def is_literal(self) -> bool:
        return self.position.startswith("lit:")


@dataclass(frozen=True)
class RawFlow:
    statement: Statement
    sources: tuple[SourcePart, ...]  # ordered: target?, receiver?, args by index
    sink: SinkRule
    callee: str
    sink_display: str

    def flags(self) -> tuple[bool, bool, bool, bool]:
        """(is-assignment, target-is-source, receiver-is-source, any-arg-is-source)."""
        a = self.statement.kind is StatementKind.ASSIGNMENT
        t = any(p.position == "target" for p in self.sources)
        r = any(p.position == "receiver" for p in self.sources)
        g = any(p.position.startswith(("arg:", "lit:")) for p in self.sources)
        return a, t, r, g


@dataclass
class ScopeStats:
    source_only: int = 0
    sink_only: int = 0
    inner_sink_matches: int = 0


@dataclass
class ScopeResult:
    flows: list[RawFlow] = field(default_factory=list)
    stats: ScopeStats = field(default_factory=ScopeStats)


def finding_id_for(flow: RawFlow) -> str:
    """Stable id: hash of path, span, and participating rule ids."""
    origins = ",".join(p.origin for p in flow.sources)
    key = f"{flow.statement.file}|{flow.statement.span.as_tuple()}|{origins}|{flow.sink.id}"
    return hashlib.sha256(key.encode("utf-8")).hexdigest()[:16]


@dataclass(frozen=True)
class SourceHit:
    name: str
    display: str
    stem: str
    categories: tuple[SourceCategory, ...]
    confidence: Confidence
    origin: str


def category_of(
    chain: ChainRef,
    taint: dict[str, TaintedVar],
    pack: RulePack,
    *,
    intermediate_rules: bool = True,
) -> SourceHit | None:
    """Source-ness of an identifier chain: rules first, then the taint set.

    The matched identifier (segment through tail) is the source name; the
    full chain text stays as the display. With ``intermediate_rules`` off,
    only the final segment is tried against the rules (receiver position).
    """
    ids = chain.ids
    if not ids:
        return None
    hit = pack.match_source(ids[-1])
    if hit is not None:
        rule, stem = hit
        return SourceHit(
            name=ids[-1], display=chain.text, stem=stem,
            categories=(rule.category,), confidence=Confidence.HIGH,
            origin=f"rule:{rule.id}",
        )
    if intermediate_rules:
        for idx in range(len(ids) - 2, -1, -1):
            hit = pack.match_source(ids[idx])
            if hit is not None:
                rule, stem = hit
                return SourceHit(
                    name=".".join(ids[idx:]), display=chain.text, stem=stem,
                    categories=(rule.category,), confidence=Confidence.HIGH,
                    origin=f"rule:{rule.id}",
                )
    dotted = ".".join(ids)
    if dotted in taint:
        var = taint[dotted]
        return SourceHit(
            name=dotted, display=chain.text, stem=var.stems[0],
            categories=var.categories, confidence=var.confidence,
            origin=f"taint:{var.origin}",
        )
    for idx in range(len(ids) - 1, -1, -1):
        if ids[idx] in taint:
            var = taint[ids[idx]]
            return SourceHit(
                name=".".join(ids[idx:]), display=chain.text, stem=var.stems[0],
                categories=var.categories, confidence=var.confidence,
                origin=f"taint:{var.origin}",
            )
    return None


def _arg_parts(
    index: int, arg: Arg, taint: dict[str, TaintedVar], pack: RulePack
) -> list[SourcePart]:
    parts: list[SourcePart] = []
    if arg.kind is ArgKind.STRING_LITERAL:
        content = arg.content or ""
        for rule, _span in pack.match_literal(content):
            start, end = _span
            matched = content.encode("utf-8")[start:end].decode("utf-8", errors="replace")
            parts.append(
                SourcePart(
                    position=f"lit:{index}", name=matched, display=matched,
                    stem=rule.stem, categories=(rule.category,),
                    confidence=Confidence.LOW, origin=f"literal:{rule.id}",
                )
            )
        return parts
    for chain in arg.chains:
        hit = category_of(chain, taint, pack, intermediate_rules=True)
        if hit is not None:
            parts.append(
                SourcePart(
                    position=f"arg:{index}", name=hit.name, display=hit.display,
                    stem=hit.stem, categories=hit.categories,
                    confidence=hit.confidence, origin=hit.origin,
                )
            )
    return parts


def analyze_scope(
    statements: list[Statement], pack: RulePack, *, propagate: bool = True
) -> ScopeResult:
    """One forward pass over a scope's statements, in source order."""
    result = ScopeResult()
    taint: dict[str, TaintedVar] = {}
    for statement in statements:
        if statement.kind is StatementKind.OTHER:
            continue
        call = statement.call
        parts: list[SourcePart] = []

        if statement.kind is StatementKind.ASSIGNMENT and statement.target is not None:
            hit = category_of(statement.target, taint, pack, intermediate_rules=True)
            if hit is not None:
                parts.append(
                    SourcePart(
                        position="target", name=hit.name, display=hit.display,
                        stem=hit.stem, categories=hit.categories,
                        confidence=hit.confidence, origin=hit.origin,
                    )
                )

        sink = None
        if call is not None:
            if call.receiver:
                recv_chain = ChainRef(ids=call.receiver, text=".".join(call.receiver))
                hit = category_of(recv_chain, taint, pack, intermediate_rules=False)
                if hit is not None:
                    parts.append(
                        SourcePart(
                            position="receiver", name=hit.name, display=hit.display,
                            stem=hit.stem, categories=hit.categories,
                            confidence=hit.confidence, origin=hit.origin,
                        )
                    )
            for index, arg in enumerate(call.args):
                parts.extend(_arg_parts(index, arg, taint, pack))
            sink = pack.match_sink(call.callee)
            for inner in call.nested:
                if pack.match_sink(inner.callee) is not None:
                    result.stats.inner_sink_matches += 1

        if sink is not None and parts:
            flow = RawFlow(
                statement=statement,
                sources=tuple(parts),
                sink=sink,
                callee=call.callee,
                sink_display=call.display,
            )
            result.flows.append(flow)
            if propagate:
                _maybe_derive(flow, taint)
        elif parts:
            result.stats.source_only += 1
        elif sink is not None:
            result.stats.sink_only += 1
    return result


def _maybe_derive(flow: RawFlow, taint: dict[str, TaintedVar]) -> None:
    """Pattern-5 semantics: a solid flow into a non-source target makes it a source."""
    a, t, r, g = flow.flags()
    if not (a and not t and (r or g) and flow.sink.certainty is Certainty.SOLID):
        return
    target = flow.statement.target
    if target is None or not target.ids:
        return
    categories: list[SourceCategory] = []
    stems: list[str] = []
    confidence = Confidence.LOW
    for part in flow.sources:
        for cat in part.categories:
            if cat not in categories:
                categories.append(cat)
        if part.stem not in stems:
            stems.append(part.stem)
        if part.confidence is Confidence.HIGH:
            confidence = Confidence.HIGH
    taint[target.dotted] = TaintedVar(
        name=target.dotted,
        categories=tuple(categories),
        stems=tuple(stems),
        origin=f"derived:{finding_id_for(flow)}",
        confidence=confidence,
    )

"""Flow-pattern classification and rendering.

Every raw flow with a sink maps to one of eight shapes through a decision
table over four structural facts: is the statement an assignment (A), is the
target a source (T), is the receiver a source (R), is any argument a source
(G). Shape and arrow kind are orthogonal: the arrow is solid or dashed purely
by the sink rule's certainty, and only the P4/P5 split depends on it.

Rendered instances follow an ASCII grammar, bit-exact for golden tests:
sources join with ``+``, the non-personal placeholder is ``_``, a solid
arrow is ``-<sink>->`` and a dashed one ``~<sink>~>``; the P8 right-hand
side is ``<sink>(<source>)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import Unclassifiable
from .rulepack import Certainty, SinkCategory, SourceCategory
from .stmt import StatementKind
from .taint import Confidence, RawFlow, SourcePart, finding_id_for


class FlowShape(Enum):
    """The eight flow patterns, in canonical order."""

    P1 = "P1"  # E[_] -m-> v
    P2 = "P2"  # v2 + E[_] -m-> v1
    P3 = "P3"  # v2(E[_]) -m-> v1
    P4 = "P4"  # v ~m~> E[_]
    P5 = "P5"  # v -m-> E[_]   (target becomes a new source)
    P6 = "P6"  # v1 + v2 -m-> v1
    P7 = "P7"  # v + E[_] -m-> v
    P8 = "P8"  # v -m-> m(v)


class ArrowKind(Enum):
    SOLID = "solid"
    DASHED = "dashed"


@dataclass(frozen=True)
class FlowInstance:
    shape: FlowShape
    arrow: ArrowKind
    lhs_parts: tuple[str, ...]
    sink_name: str
    rhs: str
    rendered: str


@dataclass(frozen=True)
class FindingSource:
    display: str
    name: str
    stem: str
    categories: tuple[SourceCategory, ...]
    origin: str
    position: str


@dataclass(frozen=True)
class FindingSink:
    callee: str
    display: str
    category: SinkCategory
    certainty: Certainty
    rule_id: str


@dataclass(frozen=True)
class Finding:
    id: str
    path: str
    span: tuple[int, int, int, int]
    snippet: str
    source: FindingSource
    sink: FindingSink
    instance: FlowInstance
    confidence: Confidence


def render(shape: FlowShape, arrow: ArrowKind, lhs_parts: tuple[str, ...], sink: str, rhs: str) -> str:
    joined = "+".join(lhs_parts)
    arrow_text = f" -{sink}-> " if arrow is ArrowKind.SOLID else f" ~{sink}~> "
    return f"{joined}{arrow_text}{rhs}"


def _part_by_position(parts: tuple[SourcePart, ...], position: str) -> SourcePart | None:
    for part in parts:
        if part.position == position:
            return part
    return None


def _arg_parts(parts: tuple[SourcePart, ...]) -> list[SourcePart]:
    return [p for p in parts if p.position.startswith(("arg:", "lit:"))]


def classify(flow: RawFlow) -> FlowInstance:
    """Map a raw flow to its shape and build the rendered instance."""
    if flow.statement.kind is StatementKind.OTHER:
        raise Unclassifiable("statement kind Other")
    a, t, r, g = flow.flags()
    arrow = ArrowKind.DASHED if flow.sink.certainty is Certainty.DASHED else ArrowKind.SOLID
    sink = flow.callee
    target = _part_by_position(flow.sources, "target")
    receiver = _part_by_position(flow.sources, "receiver")
    args = _arg_parts(flow.sources)
    target_display = (
        target.display if target is not None
        else (flow.statement.target.text if flow.statement.target else "_")
    )

    if a and t and not r and not g:
        shape = FlowShape.P1
        lhs: tuple[str, ...] = ("_",)
        rhs = target_display
    elif a and t and not r and g:
        shape = FlowShape.P2
        lhs = tuple(p.display for p in args) + ("_",)
        rhs = target_display
    elif a and t and r:
        # Covers the all-positions case too: extra arg sources are appended.
        shape = FlowShape.P3
        assert receiver is not None
        lhs = (f"{receiver.name}(_)",) + tuple(p.display for p in args)
        rhs = target_display
    elif a and not t and (r or g):
        shape = FlowShape.P5 if arrow is ArrowKind.SOLID else FlowShape.P4
        lhs = tuple(
            [receiver.name] if receiver is not None else []
        ) + tuple(p.display for p in args)
        rhs = target_display
    elif not a and r and g:
        shape = FlowShape.P6
        assert receiver is not None
        lhs = (receiver.name,) + tuple(p.display for p in args)
        rhs = receiver.name
    elif not a and r and not g:
        shape = FlowShape.P7
        assert receiver is not None
        lhs = (receiver.name, "_")
        rhs = receiver.name
    elif not a and not r and g:
        shape = FlowShape.P8
        lhs = tuple(p.display for p in args)
        rhs = f"{sink}({'+'.join(lhs)})"
    else:
        raise Unclassifiable(f"no shape for flags A={a} T={t} R={r} G={g}")

    return FlowInstance(
        shape=shape,
        arrow=arrow,
        lhs_parts=lhs,
        sink_name=sink,
        rhs=rhs,
        rendered=render(shape, arrow, lhs, sink, rhs),
    )


def designated_source(parts: tuple[SourcePart, ...]) -> SourcePart:
    """The flow's origin: first argument source, else receiver, else target."""
    args = _arg_parts(parts)
    if args:
        return args[0]
    receiver = _part_by_position(parts, "receiver")
    if receiver is not None:
        return receiver
    target = _part_by_position(parts, "target")
    assert target is not None
    return target


def make_finding(flow: RawFlow, instance: FlowInstance | None = None) -> Finding:
    if instance is None:
        instance = classify(flow)
    source_part = designated_source(flow.sources)
    confidence = (
        Confidence.HIGH
        if any(p.confidence is Confidence.HIGH for p in flow.sources)
        else Confidence.LOW
    )
    return Finding(
        id=finding_id_for(flow),
        path=flow.statement.file,
        span=flow.statement.span.as_tuple(),
        snippet=flow.statement.text,
        source=FindingSource(
            display=source_part.display,
            name=source_part.name,
            stem=source_part.stem,
            categories=source_part.categories,
            origin=source_part.origin,
            position=source_part.position,
        ),
        sink=FindingSink(
            callee=flow.callee,
            display=flow.sink_display,
            category=flow.sink.category,
            certainty=flow.sink.certainty,
            rule_id=flow.sink.id,
        ),
        instance=instance,
        confidence=confidence,
    )

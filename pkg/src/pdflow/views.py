"""Reviewer views built from a findings list.

All builders are pure functions of the findings; rebuilding from the same
document is byte-identical. Counting uses each finding's designated source
(the flow's origin); a multi-category source (a derived variable) increments
every category it carries, which keeps the type view, heatmap, and ROPA
summary consistent with each other.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParseError, UnknownKey
from .patterns import Finding
from .rulepack import (
    SINK_CATEGORY_ORDER,
    SOURCE_CATEGORY_ORDER,
    SinkCategory,
    SourceCategory,
)


# ---------------------------------------------------------------------------
# Personal Data Type View

@dataclass
class VariantNode:
    name: str
    count: int


@dataclass
class StemNode:
    name: str
    count: int
    variants: list[VariantNode]


@dataclass
class CategoryNode:
    category: SourceCategory
    count: int
    stems: list[StemNode]


@dataclass
class DataTypeTree:
    categories: list[CategoryNode]
    total: int


def build_type_view(findings: list[Finding]) -> DataTypeTree:
    """Category -> stem -> identifier-variant tree with occurrence counts.

    Variants group under the stem of the rule that matched them, so
    ``email_addr``, ``email_id``, and ``email`` all land under ``email``.
    Children are ordered by count descending, then name ascending; categories
    with no findings are omitted.
    """
    counts: dict[SourceCategory, dict[str, dict[str, int]]] = {}
    for finding in findings:
        for category in finding.source.categories:
            stems = counts.setdefault(category, {})
            variants = stems.setdefault(finding.source.stem, {})
            variants[finding.source.name] = variants.get(finding.source.name, 0) + 1
    categories: list[CategoryNode] = []
    for category in SOURCE_CATEGORY_ORDER:
        if category not in counts:
            continue
        stack: list[StemNode] = []
        for stem_name, variants in counts[category].items():
            leaves = [VariantNode(name=n, count=c) for n, c in variants.items()]
            leaves.sort(key=lambda v: (-v.count, v.name))
            stack.append(StemNode(name=stem_name, count=sum(v.count for v in leaves), variants=leaves))
        stack.sort(key=lambda s: (-s.count, s.name))
        categories.append(
            CategoryNode(category=category, count=sum(s.count for s in stack), stems=stack)
        )
    categories.sort(key=lambda c: (-c.count, c.category.abbreviation))
    return DataTypeTree(categories=categories, total=sum(c.count for c in categories))


# ---------------------------------------------------------------------------
# Detailed Flow View

@dataclass(frozen=True)
class FlowTableRow:
    path: str
    source: str
    sink: str
    sink_type: str
    instance: str
    finding_id: str
    confidence: str
    span: tuple[int, int, int, int]


@dataclass
class FlowGroup:
    key: str | None
    rows: list[FlowTableRow]


GROUP_KEYS = ("source-stem", "source-category", "sink-category", "sink-name", "file", "pattern-shape", "none")
FILTER_KEYS = GROUP_KEYS[:-1] + ("confidence",)

_KEY_ALIASES = {
    "stem": "source-stem",
    "category": "source-category",
    "path": "file",
    "shape": "pattern-shape",
}


def _resolve_key(key: str, *, for_filter: bool) -> str:
    resolved = _KEY_ALIASES.get(key, key)
    allowed = FILTER_KEYS if for_filter else GROUP_KEYS
    if resolved not in allowed:
        raise UnknownKey(f"unknown {'filter' if for_filter else 'group'} key: {key!r}")
    return resolved


def _key_values(finding: Finding, key: str) -> list[str]:
    if key == "source-stem":
        return [finding.source.stem]
    if key == "source-category":
        return [c.abbreviation for c in finding.source.categories]
    if key == "sink-category":
        return [finding.sink.category.abbreviation]
    if key == "sink-name":
        return [finding.sink.callee]
    if key == "file":
        return [finding.path]
    if key == "pattern-shape":
        return [finding.instance.shape.value]
    if key == "confidence":
        return [finding.confidence.value]
    raise UnknownKey(f"unknown key: {key!r}")


def _to_row(finding: Finding) -> FlowTableRow:
    return FlowTableRow(
        path=finding.path,
        source=finding.source.display,
        sink=finding.sink.display,
        sink_type=finding.sink.category.abbreviation,
        instance=finding.instance.rendered,
        finding_id=finding.id,
        confidence=finding.confidence.value,
        span=finding.span,
    )


def build_flow_table(
    findings: list[Finding],
    group_by: str = "none",
    filters: list[tuple[str, str]] | None = None,
) -> list[FlowGroup]:
    """Filter, then group, then sort rows by (path, span) within each group.

    Groups rank by finding count descending then key; rows with High
    confidence sort before Low within a group.
    """
    group_key = _resolve_key(group_by or "none", for_filter=False)
    resolved_filters = [
        (_resolve_key(k, for_filter=True), v) for k, v in (filters or [])
    ]
    selected = [
        f
        for f in findings
        if all(value in _key_values(f, key) for key, value in resolved_filters)
    ]
    if group_key == "none":
        rows = sorted(
            (_to_row(f) for f in selected),
            key=lambda r: (r.confidence != "high", r.path, r.span),
        )
        return [FlowGroup(key=None, rows=rows)]
    buckets: dict[str, list[Finding]] = {}
    for finding in selected:
        for value in _key_values(finding, group_key):
            buckets.setdefault(value, []).append(finding)
    groups = [
        FlowGroup(
            key=value,
            rows=sorted(
                (_to_row(f) for f in bucket),
                key=lambda r: (r.confidence != "high", r.path, r.span),
            ),
        )
        for value, bucket in buckets.items()
    ]
    groups.sort(key=lambda g: (-len(g.rows), g.key or ""))
    return groups


# ---------------------------------------------------------------------------
# Heatmap

@dataclass
class HeatmapStats:
    """Finding counts per (source category, sink category), Table-1 order."""

    matrix: list[list[int]]  # 10 rows (sources) x 6 columns (sinks)
    row_totals: list[int]
    col_totals: list[int]
    total: int


def build_heatmap(findings: list[Finding]) -> HeatmapStats:
    rows = len(SOURCE_CATEGORY_ORDER)
    cols = len(SINK_CATEGORY_ORDER)
    src_index = {c: i for i, c in enumerate(SOURCE_CATEGORY_ORDER)}
    snk_index = {c: i for i, c in enumerate(SINK_CATEGORY_ORDER)}
    matrix = [[0] * cols for _ in range(rows)]
    for finding in findings:
        col = snk_index[finding.sink.category]
        for category in finding.source.categories:
            matrix[src_index[category]][col] += 1
    row_totals = [sum(row) for row in matrix]
    col_totals = [sum(matrix[r][c] for r in range(rows)) for c in range(cols)]
    return HeatmapStats(
        matrix=matrix, row_totals=row_totals, col_totals=col_totals, total=sum(row_totals)
    )


# ---------------------------------------------------------------------------
# ROPA summary

@dataclass
class RopaSummary:
    """The four code-derivable ROPA sections, keyed by category abbreviation."""

    categories_of_personal_data: list[str]
    categories_of_processing: dict[str, list[str]]  # sink abbr -> source abbrs feeding it
    database_or_third_party_transfers: dict[str, int]  # source abbr -> DB/T finding count
    encryption_or_anonymization: dict[str, int]  # source abbr -> E finding count
    logging: dict[str, int]  # source abbr -> L finding count


def build_ropa(findings: list[Finding]) -> RopaSummary:
    personal: set[SourceCategory] = set()
    processing: dict[SinkCategory, set[SourceCategory]] = {}
    transfers: dict[SourceCategory, int] = {}
    encryption: dict[SourceCategory, int] = {}
    logging_counts: dict[SourceCategory, int] = {}
    for finding in findings:
        sink_cat = finding.sink.category
        for category in finding.source.categories:
            personal.add(category)
            processing.setdefault(sink_cat, set()).add(category)
            if sink_cat in (SinkCategory.DATABASE, SinkCategory.TRANSPORTATION):
                transfers[category] = transfers.get(category, 0) + 1
            if sink_cat is SinkCategory.ENCRYPTION:
                encryption[category] = encryption.get(category, 0) + 1
            if sink_cat is SinkCategory.LOG:
                logging_counts[category] = logging_counts.get(category, 0) + 1

    def ordered(categories: set[SourceCategory]) -> list[str]:
        return [c.abbreviation for c in SOURCE_CATEGORY_ORDER if c in categories]

    def ordered_counts(counts: dict[SourceCategory, int]) -> dict[str, int]:
        return {c.abbreviation: counts[c] for c in SOURCE_CATEGORY_ORDER if c in counts}

    return RopaSummary(
        categories_of_personal_data=ordered(personal),
        categories_of_processing={
            s.abbreviation: ordered(processing[s]) for s in SINK_CATEGORY_ORDER if s in processing
        },
        database_or_third_party_transfers=ordered_counts(transfers),
        encryption_or_anonymization=ordered_counts(encryption),
        logging=ordered_counts(logging_counts),
    )


def load_declared_categories(text: str) -> set[str]:
    """Parse a declared-categories file: a YAML list of Table-1 abbreviations
    (or a mapping with a ``categories`` key)."""
    import yaml

    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ParseError(f"declared-categories file is not valid YAML: {exc}") from exc
    if isinstance(data, dict):
        data = data.get("categories")
    if data is None:
        return set()
    if not isinstance(data, list):
        raise ParseError("declared-categories file must hold a list of abbreviations")
    out = set()
    for item in data:
        out.add(SourceCategory.from_abbreviation(str(item)).abbreviation)
    return out


def coverage_diff(found: list[str], declared: set[str]) -> str:
    """Coverage notation: ``+`` when every found category is declared,
    otherwise the undisclosed ones as ``-ABBR`` joined by commas."""
    missing = [abbr for abbr in found if abbr not in declared]
    if not missing:
        return "+"
    return ", ".join(f"-{abbr}" for abbr in missing)

"""Serialization: canonical findings JSON, SARIF 2.1.0, Mermaid, and text tables.

The findings JSON is the single interchange format between the CLI, the view
builders, and the review server. Emission is canonical (sorted keys, fixed
indentation) so that equal documents serialize to identical bytes on any
platform. Timing is measured by the CLI but stored as zero unless explicitly
requested, keeping scan outputs reproducible byte-for-byte.
"""

from __future__ import annotations

import json
from importlib import resources

from .errors import SchemaMismatch
from .patterns import (
    ArrowKind,
    Finding,
    FindingSink,
    FindingSource,
    FlowInstance,
    FlowShape,
)
from .rulepack import Certainty, SinkCategory, SourceCategory
from .scanner import FindingsDocument, ScanStats
from .taint import Confidence
from .views import DataTypeTree, HeatmapStats, RopaSummary, FlowGroup

SCHEMA_NAME = "pdflow-findings@1"
SARIF_SCHEMA_URI = (
    "https://raw.githubusercontent.com/oasis-tcs/sarif-spec/master/Schemata/sarif-schema-2.1.0.json"
)


# ---------------------------------------------------------------------------
# Findings JSON

def finding_to_dict(finding: Finding) -> dict:
    return {
        "id": finding.id,
        "path": finding.path,
        "span": list(finding.span),
        "snippet": finding.snippet,
        "confidence": finding.confidence.value,
        "source": {
            "display": finding.source.display,
            "name": finding.source.name,
            "stem": finding.source.stem,
            "categories": [c.abbreviation for c in finding.source.categories],
            "origin": finding.source.origin,
            "position": finding.source.position,
        },
        "sink": {
            "callee": finding.sink.callee,
            "display": finding.sink.display,
            "category": finding.sink.category.abbreviation,
            "certainty": finding.sink.certainty.value,
            "rule": finding.sink.rule_id,
        },
        "instance": {
            "shape": finding.instance.shape.value,
            "arrow": finding.instance.arrow.value,
            "lhs": list(finding.instance.lhs_parts),
            "sink": finding.instance.sink_name,
            "rhs": finding.instance.rhs,
            "rendered": finding.instance.rendered,
        },
    }


def document_to_dict(doc: FindingsDocument) -> dict:
    return {
        "schema": SCHEMA_NAME,
        "tool": {
            "name": doc.tool_name,
            "version": doc.tool_version,
            "rulepack_version": doc.rulepack_version,
        },
        "stats": {
            "files": doc.stats.files,
            "statements": doc.stats.statements,
            "elapsed_ms": doc.stats.elapsed_ms,
            "source_only": doc.stats.source_only,
            "sink_only": doc.stats.sink_only,
            "unclassifiable": doc.stats.unclassifiable,
            "inner_sink_matches": doc.stats.inner_sink_matches,
            "skipped_files": doc.stats.skipped_files,
        },
        "findings": [finding_to_dict(f) for f in doc.findings],
    }


def emit_findings_json(doc: FindingsDocument) -> str:
    return json.dumps(document_to_dict(doc), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _require(mapping: dict, key: str, kind: type):
    if not isinstance(mapping, dict) or key not in mapping:
        raise SchemaMismatch(f"missing key {key!r}")
    value = mapping[key]
    if not isinstance(value, kind):
        raise SchemaMismatch(f"key {key!r}: expected {kind.__name__}, got {type(value).__name__}")
    return value


def finding_from_dict(data: dict) -> Finding:
    source = _require(data, "source", dict)
    sink = _require(data, "sink", dict)
    instance = _require(data, "instance", dict)
    span = _require(data, "span", list)
    if len(span) != 4 or not all(isinstance(x, int) for x in span):
        raise SchemaMismatch("span must be four integers")
    try:
        return Finding(
            id=_require(data, "id", str),
            path=_require(data, "path", str),
            span=tuple(span),
            snippet=_require(data, "snippet", str),
            confidence=Confidence(_require(data, "confidence", str)),
            source=FindingSource(
                display=_require(source, "display", str),
                name=_require(source, "name", str),
                stem=_require(source, "stem", str),
                categories=tuple(
                    SourceCategory.from_abbreviation(c)
                    for c in _require(source, "categories", list)
                ),
                origin=_require(source, "origin", str),
                position=_require(source, "position", str),
            ),
            sink=FindingSink(
                callee=_require(sink, "callee", str),
                display=_require(sink, "display", str),
                category=SinkCategory.from_abbreviation(_require(sink, "category", str)),
                certainty=Certainty(_require(sink, "certainty", str)),
                rule_id=_require(sink, "rule", str),
            ),
            instance=FlowInstance(
                shape=FlowShape(_require(instance, "shape", str)),
                arrow=ArrowKind(_require(instance, "arrow", str)),
                lhs_parts=tuple(_require(instance, "lhs", list)),
                sink_name=_require(instance, "sink", str),
                rhs=_require(instance, "rhs", str),
                rendered=_require(instance, "rendered", str),
            ),
        )
    except (ValueError, KeyError) as exc:
        raise SchemaMismatch(f"bad finding field: {exc}") from exc


def load_findings_json(text: str) -> FindingsDocument:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaMismatch(f"not valid JSON: {exc}") from exc
    if not isinstance(data, dict) or data.get("schema") != SCHEMA_NAME:
        raise SchemaMismatch(f"expected schema {SCHEMA_NAME!r}")
    tool = _require(data, "tool", dict)
    stats = _require(data, "stats", dict)
    findings = [finding_from_dict(f) for f in _require(data, "findings", list)]
    doc = FindingsDocument(
        tool_name=_require(tool, "name", str),
        tool_version=_require(tool, "version", str),
        rulepack_version=_require(tool, "rulepack_version", str),
        stats=ScanStats(
            files=_require(stats, "files", int),
            statements=_require(stats, "statements", int),
            elapsed_ms=_require(stats, "elapsed_ms", int),
            source_only=_require(stats, "source_only", int),
            sink_only=_require(stats, "sink_only", int),
            unclassifiable=_require(stats, "unclassifiable", int),
            inner_sink_matches=stats.get("inner_sink_matches", 0),
            skipped_files=stats.get("skipped_files", 0),
        ),
        findings=findings,
    )
    return doc


# ---------------------------------------------------------------------------
# SARIF

def sarif_rule_id(finding: Finding) -> str:
    src = finding.source.categories[0].abbreviation
    return f"pdflow/{src}/{finding.sink.category.abbreviation}/{finding.instance.shape.value}"


def emit_sarif(doc: FindingsDocument) -> str:
    """SARIF 2.1.0 text: one reporting rule per distinct rule id, one result
    per finding, each message naming source, sink, and the rendered instance."""
    rule_ids = sorted({sarif_rule_id(f) for f in doc.findings})
    rule_index = {rid: i for i, rid in enumerate(rule_ids)}
    rules = [
        {
            "id": rid,
            "name": rid.replace("pdflow/", "").replace("/", "-"),
            "shortDescription": {
                "text": "Personal data flow: source category {0}, sink category {1}, shape {2}".format(
                    *rid.split("/")[1:]
                )
            },
        }
        for rid in rule_ids
    ]
    results = []
    for finding in doc.findings:
        rid = sarif_rule_id(finding)
        start_line, start_col, end_line, end_col = finding.span
        results.append(
            {
                "ruleId": rid,
                "ruleIndex": rule_index[rid],
                "level": "warning" if finding.confidence is Confidence.HIGH else "note",
                "message": {
                    "text": (
                        f"Personal data '{finding.source.display}' "
                        f"({'/'.join(c.abbreviation for c in finding.source.categories)}) "
                        f"reaches sink '{finding.sink.display}' "
                        f"({finding.sink.category.abbreviation}): "
                        f"{finding.instance.rendered}"
                    )
                },
                "locations": [
                    {
                        "physicalLocation": {
                            "artifactLocation": {"uri": finding.path},
                            "region": {
                                "startLine": start_line,
                                "startColumn": start_col,
                                "endLine": end_line,
                                "endColumn": end_col,
                            },
                        }
                    }
                ],
                "partialFingerprints": {"pdflowFindingId/v1": finding.id},
            }
        )
    sarif = {
        "$schema": SARIF_SCHEMA_URI,
        "version": "2.1.0",
        "runs": [
            {
                "tool": {
                    "driver": {
                        "name": doc.tool_name,
                        "version": doc.tool_version,
                        "informationUri": "https://example.invalid/pdflow",
                        "rules": rules,
                    }
                },
                "results": results,
            }
        ],
    }
    return json.dumps(sarif, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def sarif_schema() -> dict:
    """The bundled SARIF 2.1.0 JSON schema (for validation in tests/tools)."""
    data = resources.files("pdflow").joinpath("data/sarif-schema-2.1.0.json").read_text("utf-8")
    return json.loads(data)


# ---------------------------------------------------------------------------
# Mermaid

def _mermaid_label(name: str, count: int) -> str:
    safe = name.replace('"', "'")
    return f'"{safe} ({count})"'


def emit_mermaid(tree: DataTypeTree) -> str:
    """Mermaid flowchart of the type view: root -> category -> stem -> variant."""
    lines = ["flowchart TD", f"  root[{_mermaid_label('Personal Data', tree.total)}]"]
    for ci, cat in enumerate(tree.categories):
        cid = f"c{ci}"
        lines.append(f"  {cid}[{_mermaid_label(cat.category.abbreviation, cat.count)}]")
        lines.append(f"  root --> {cid}")
        for si, stem in enumerate(cat.stems):
            sid = f"{cid}_s{si}"
            lines.append(f"  {sid}[{_mermaid_label(stem.name, stem.count)}]")
            lines.append(f"  {cid} --> {sid}")
            for vi, variant in enumerate(stem.variants):
                vid = f"{sid}_v{vi}"
                lines.append(f"  {vid}[{_mermaid_label(variant.name, variant.count)}]")
                lines.append(f"  {sid} --> {vid}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Text / markdown renderings

FLOW_TABLE_HEADERS = ("Path", "Source", "Sink", "Sink Type", "Flow Pattern Instance")


def _rows_as_cells(groups: list[FlowGroup]) -> list[tuple[str, ...]]:
    cells = []
    for group in groups:
        for row in group.rows:
            cells.append((row.path, row.source, row.sink, row.sink_type, row.instance))
    return cells


def render_flow_table_text(groups: list[FlowGroup]) -> str:
    out = []
    for group in groups:
        if group.key is not None:
            out.append(f"== {group.key} ({len(group.rows)})")
        widths = [len(h) for h in FLOW_TABLE_HEADERS]
        rows = [(r.path, r.source, r.sink, r.sink_type, r.instance) for r in group.rows]
        for row in rows:
            widths = [max(w, len(c)) for w, c in zip(widths, row)]
        header = "  ".join(h.ljust(w) for h, w in zip(FLOW_TABLE_HEADERS, widths))
        out.append(header)
        out.append("  ".join("-" * w for w in widths))
        for row in rows:
            out.append("  ".join(c.ljust(w) for c, w in zip(row, widths)))
        out.append("")
    return "\n".join(out).rstrip("\n") + "\n"


def render_flow_table_markdown(groups: list[FlowGroup]) -> str:
    out = []
    for group in groups:
        if group.key is not None:
            out.append(f"### {group.key} ({len(group.rows)})")
            out.append("")
        out.append("| " + " | ".join(FLOW_TABLE_HEADERS) + " |")
        out.append("|" + "|".join(" --- " for _ in FLOW_TABLE_HEADERS) + "|")
        for row in group.rows:
            cells = (row.path, row.source, row.sink, row.sink_type, row.instance)
            out.append("| " + " | ".join(c.replace("|", "\\|") for c in cells) + " |")
        out.append("")
    return "\n".join(out).rstrip("\n") + "\n"


def render_type_tree_text(tree: DataTypeTree) -> str:
    lines = [f"personal data ({tree.total})"]
    for cat in tree.categories:
        lines.append(f"  {cat.category.abbreviation} ({cat.count})")
        for stem in cat.stems:
            lines.append(f"    {stem.name} ({stem.count})")
            for variant in stem.variants:
                lines.append(f"      {variant.name} ({variant.count})")
    return "\n".join(lines) + "\n"


def render_heatmap_text(stats: HeatmapStats) -> str:
    from .rulepack import SINK_CATEGORY_ORDER, SOURCE_CATEGORY_ORDER

    sink_headers = [c.abbreviation for c in SINK_CATEGORY_ORDER]
    width = max(5, *(len(h) for h in sink_headers))
    header = "     " + "".join(h.rjust(width + 1) for h in sink_headers) + "  total".rjust(8)
    lines = [header]
    for i, cat in enumerate(SOURCE_CATEGORY_ORDER):
        row = stats.matrix[i]
        cells = "".join(str(v).rjust(width + 1) for v in row)
        lines.append(f"{cat.abbreviation:<5}{cells}{str(stats.row_totals[i]).rjust(8)}")
    totals = "".join(str(v).rjust(width + 1) for v in stats.col_totals)
    lines.append(f"{'total':<5}{totals}{str(stats.total).rjust(8)}")
    return "\n".join(lines) + "\n"


def render_ropa_markdown(
    summary: RopaSummary,
    declared: set[str] | None = None,
) -> str:
    """The four code-derivable ROPA sections, manual-entry placeholders, and
    (when a declared-categories set is supplied) the coverage diff."""
    from .views import coverage_diff

    lines = ["# ROPA summary (generated from scan findings)", ""]
    lines.append("## Categories of personal data")
    if summary.categories_of_personal_data:
        lines.append(", ".join(summary.categories_of_personal_data))
    else:
        lines.append("none identified")
    lines.append("")
    lines.append("## Categories of processing")
    if summary.categories_of_processing:
        for sink_abbr, sources in summary.categories_of_processing.items():
            lines.append(f"- {sink_abbr}: {', '.join(sources)}")
    else:
        lines.append("none identified")
    lines.append("")
    lines.append("## Transfer to a database or third-party APIs")
    if summary.database_or_third_party_transfers:
        for abbr, count in summary.database_or_third_party_transfers.items():
            lines.append(f"- {abbr}: {count} flow(s)")
    else:
        lines.append("none identified")
    lines.append("")
    lines.append("## Data encryption or anonymization")
    if summary.encryption_or_anonymization:
        for abbr, count in summary.encryption_or_anonymization.items():
            lines.append(f"- {abbr}: {count} flow(s)")
    else:
        lines.append("none identified")
    lines.append("")
    lines.append("## Personal data logging")
    if summary.logging:
        for abbr, count in summary.logging.items():
            lines.append(f"- {abbr}: {count} flow(s)")
    else:
        lines.append("none identified")
    lines.append("")
    if declared is not None:
        lines.append("## Coverage against declared categories")
        lines.append(coverage_diff(summary.categories_of_personal_data, declared))
        lines.append("")
    lines.append("## Manual entry required")
    lines.append("- Retention schedules: <fill in>")
    lines.append("- Categories of recipients: <fill in>")
    lines.append("- Transfers to third countries: <fill in>")
    lines.append("- Organizational security measures: <fill in>")
    return "\n".join(lines) + "\n"

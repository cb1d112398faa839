"""Command-line entry point: scan, view, export, triage, serve."""

from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path

from . import report
from .errors import ParseError, PdflowError, PortInUse, SchemaMismatch, UnknownKey
from .rulepack import load_rulepack
from .scanner import scan
from .server import ReviewServer
from .triage import (
    DEFAULT_SUPPRESSION_THRESHOLD,
    apply_labels,
    load_labels,
    make_label,
    precision_table,
    render_precision_text,
    save_labels,
)
from .views import (
    build_flow_table,
    build_heatmap,
    build_ropa,
    build_type_view,
    load_declared_categories,
)

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_CONFIG = 2
EXIT_INTERNAL = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pdflow",
        description="Pinpoint personal data and its processing for GDPR-focused review",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_scan = sub.add_parser("scan", help="scan source trees and write findings JSON")
    p_scan.add_argument("paths", nargs="+", help="files or directories to scan")
    p_scan.add_argument("--rules", default=None, help="rule-pack YAML (default: embedded pack; env PDFLOW_RULES)")
    p_scan.add_argument("--out", default="findings.json", help="findings JSON output path")
    p_scan.add_argument("--sarif", default=None, help="also write SARIF 2.1.0 to this path")
    p_scan.add_argument("--workers", type=int, default=1, help="parallel file workers")
    p_scan.add_argument("--languages", default=None, help="comma list: java,javascript,typescript")
    p_scan.add_argument("--no-propagation", action="store_true", help="disable derived-source taint propagation")
    p_scan.add_argument("--fail-on-findings", action="store_true", help="exit 1 when findings exist (CI gate)")
    p_scan.add_argument("--record-timing", action="store_true",
                        help="embed wall-clock elapsed_ms in the document (breaks byte reproducibility)")

    p_view = sub.add_parser("view", help="render a view of a findings document")
    p_view.add_argument("kind", choices=("types", "flows", "heatmap"))
    p_view.add_argument("--findings", required=True, help="findings JSON path")
    p_view.add_argument("--group-by", default="none", help="flows: grouping key")
    p_view.add_argument("--filter", action="append", default=[], metavar="KEY=VALUE")
    p_view.add_argument("--format", default="text", choices=("text", "markdown", "mermaid"))

    p_export = sub.add_parser("export", help="export summaries")
    export_sub = p_export.add_subparsers(dest="what", required=True)
    p_ropa = export_sub.add_parser("ropa", help="ROPA-aligned markdown summary")
    p_ropa.add_argument("--findings", required=True)
    p_ropa.add_argument("--declared", default=None, help="declared-categories file for the coverage diff")
    p_ropa.add_argument("--out", default=None, help="write to file instead of stdout")

    p_triage = sub.add_parser("triage", help="record labels / show precision metrics")
    triage_sub = p_triage.add_subparsers(dest="what", required=True)
    p_label = triage_sub.add_parser("label", help="record a TP/FP verdict")
    p_label.add_argument("--findings", required=True)
    p_label.add_argument("--labels", required=True)
    p_label.add_argument("--id", required=True, dest="finding_id")
    p_label.add_argument("--verdict", required=True, choices=("TP", "FP", "Unreviewed"))
    p_label.add_argument("--note", default=None)
    p_label.add_argument("--reviewer", default=None)
    p_metrics = triage_sub.add_parser("metrics", help="precision per source/sink cell")
    p_metrics.add_argument("--findings", required=True)
    p_metrics.add_argument("--labels", required=True)
    p_metrics.add_argument("--threshold", type=int, default=DEFAULT_SUPPRESSION_THRESHOLD)

    p_serve = sub.add_parser("serve", help="serve the review UI and JSON API")
    p_serve.add_argument("--findings", required=True)
    p_serve.add_argument("--labels", default="labels.json")
    p_serve.add_argument("--port", type=int, default=8731)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--root", default=".", help="scan root for the snippet endpoint")
    p_serve.add_argument("--ui", default=None, help="static UI bundle directory")
    return parser


def _load_doc(path: str):
    try:
        return report.load_findings_json(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ParseError(f"cannot read findings file: {exc}") from exc


def _parse_filters(raw: list[str]) -> list[tuple[str, str]]:
    filters = []
    for item in raw:
        if "=" not in item:
            raise UnknownKey(f"bad --filter {item!r}; expected KEY=VALUE")
        key, value = item.split("=", 1)
        filters.append((key, value))
    return filters


def cmd_scan(args) -> int:
    for path in args.paths:
        if not Path(path).exists():
            print(f"error: path does not exist: {path}", file=sys.stderr)
            return EXIT_CONFIG
    rules = args.rules or os.environ.get("PDFLOW_RULES") or "default"
    pack = load_rulepack(rules)
    languages = set(args.languages.split(",")) if args.languages else None
    started = time.monotonic()
    doc = scan(
        args.paths,
        pack,
        languages=languages,
        propagate=not args.no_propagation,
        workers=max(1, args.workers),
    )
    elapsed_ms = int((time.monotonic() - started) * 1000)
    if args.record_timing:
        doc.stats.elapsed_ms = elapsed_ms
    Path(args.out).write_text(report.emit_findings_json(doc), encoding="utf-8")
    if args.sarif:
        Path(args.sarif).write_text(report.emit_sarif(doc), encoding="utf-8")
    print(
        f"scanned {doc.stats.files} files, {doc.stats.statements} statements: "
        f"{len(doc.findings)} findings in {elapsed_ms} ms "
        f"(source-only {doc.stats.source_only}, sink-only {doc.stats.sink_only}, "
        f"unclassifiable {doc.stats.unclassifiable})"
    )
    print(f"findings written to {args.out}" + (f", SARIF to {args.sarif}" if args.sarif else ""))
    if args.fail_on_findings and doc.findings:
        return EXIT_FINDINGS
    return EXIT_OK


def cmd_view(args) -> int:
    doc = _load_doc(args.findings)
    if args.kind == "types":
        tree = build_type_view(doc.findings)
        if args.format == "mermaid":
            sys.stdout.write(report.emit_mermaid(tree))
        else:
            sys.stdout.write(report.render_type_tree_text(tree))
        return EXIT_OK
    if args.kind == "heatmap":
        sys.stdout.write(report.render_heatmap_text(build_heatmap(doc.findings)))
        return EXIT_OK
    groups = build_flow_table(doc.findings, group_by=args.group_by, filters=_parse_filters(args.filter))
    if args.format == "markdown":
        sys.stdout.write(report.render_flow_table_markdown(groups))
    else:
        sys.stdout.write(report.render_flow_table_text(groups))
    return EXIT_OK


def cmd_export(args) -> int:
    doc = _load_doc(args.findings)
    declared = None
    if args.declared:
        declared = load_declared_categories(Path(args.declared).read_text(encoding="utf-8"))
    text = report.render_ropa_markdown(build_ropa(doc.findings), declared)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"ROPA summary written to {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_triage(args) -> int:
    doc = _load_doc(args.findings)
    if args.what == "label":
        labels = load_labels(args.labels)
        if all(f.id != args.finding_id for f in doc.findings):
            print(f"warning: unknown finding id {args.finding_id!r}", file=sys.stderr)
        labels.append(make_label(args.finding_id, args.verdict, args.note, args.reviewer))
        save_labels(args.labels, labels)
        print(f"recorded {args.verdict} for {args.finding_id}")
        return EXIT_OK
    labels = load_labels(args.labels)
    merged, warnings = apply_labels(doc.findings, labels)
    for warning in warnings:
        print(f"warning: {warning}", file=sys.stderr)
    table = precision_table(doc.findings, merged, args.threshold)
    sys.stdout.write(render_precision_text(table))
    return EXIT_OK


def cmd_serve(args) -> int:
    doc = _load_doc(args.findings)
    ui_dir = args.ui
    if ui_dir is None:
        bundled = Path(__file__).parent / "ui"
        sibling = Path.cwd() / "frontend" / "dist"
        if bundled.is_dir():
            ui_dir = bundled
        elif sibling.is_dir():
            ui_dir = sibling
    server = ReviewServer(
        doc, args.labels, scan_root=args.root, ui_dir=ui_dir
    )
    print(f"serving {len(doc.findings)} findings on http://{args.host}:{args.port}/ (Ctrl-C stops)")
    try:
        server.serve_forever(host=args.host, port=args.port)
    except KeyboardInterrupt:
        print("stopped")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "scan":
            return cmd_scan(args)
        if args.command == "view":
            return cmd_view(args)
        if args.command == "export":
            return cmd_export(args)
        if args.command == "triage":
            return cmd_triage(args)
        if args.command == "serve":
            return cmd_serve(args)
        parser.error(f"unknown command {args.command!r}")
        return EXIT_CONFIG
    except (ParseError, SchemaMismatch, UnknownKey, PortInUse, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PdflowError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())

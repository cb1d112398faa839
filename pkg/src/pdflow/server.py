"""Local HTTP server for the reviewer workflow.

Serves the findings document (read-only) plus the view/metrics JSON API and
persists triage labels. Findings are immutable for the server's lifetime;
label writes are serialized through a lock and hit disk via atomic replace.
Meant for localhost review sessions; there is no authentication.
"""

from __future__ import annotations

import json
import mimetypes
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, unquote, urlparse

from .errors import PortInUse, UnknownKey
from .scanner import FindingsDocument
from .triage import (
    DEFAULT_SUPPRESSION_THRESHOLD,
    TriageLabel,
    apply_labels,
    load_labels,
    make_label,
    precision_table,
    save_labels,
)
from .views import (
    DataTypeTree,
    HeatmapStats,
    RopaSummary,
    build_flow_table,
    build_heatmap,
    build_ropa,
    build_type_view,
)

_FALLBACK_PAGE = """<!doctype html>
<html><head><title>pdflow</title></head>
<body><h1>pdflow review server</h1>
<p>No UI bundle is installed. The JSON API lives under <code>/api/</code>:
findings, views/types, views/heatmap, ropa, metrics, snippet/&lt;id&gt;, labels.</p>
</body></html>
"""


def tree_to_dict(tree: DataTypeTree) -> dict:
    return {
        "total": tree.total,
        "categories": [
            {
                "category": cat.category.abbreviation,
                "count": cat.count,
                "stems": [
                    {
                        "name": stem.name,
                        "count": stem.count,
                        "variants": [
                            {"name": v.name, "count": v.count} for v in stem.variants
                        ],
                    }
                    for stem in cat.stems
                ],
            }
            for cat in tree.categories
        ],
    }


def heatmap_to_dict(stats: HeatmapStats) -> dict:
    from .rulepack import SINK_CATEGORY_ORDER, SOURCE_CATEGORY_ORDER

    return {
        "sources": [c.abbreviation for c in SOURCE_CATEGORY_ORDER],
        "sinks": [c.abbreviation for c in SINK_CATEGORY_ORDER],
        "matrix": stats.matrix,
        "row_totals": stats.row_totals,
        "col_totals": stats.col_totals,
        "total": stats.total,
    }


def ropa_to_dict(summary: RopaSummary) -> dict:
    return {
        "categories_of_personal_data": summary.categories_of_personal_data,
        "categories_of_processing": summary.categories_of_processing,
        "database_or_third_party_transfers": summary.database_or_third_party_transfers,
        "encryption_or_anonymization": summary.encryption_or_anonymization,
        "logging": summary.logging,
    }


class ReviewServer:
    def __init__(
        self,
        doc: FindingsDocument,
        labels_path: str | Path,
        *,
        scan_root: str | Path = ".",
        ui_dir: str | Path | None = None,
        threshold: int = DEFAULT_SUPPRESSION_THRESHOLD,
    ):
        self.doc = doc
        self.labels_path = Path(labels_path)
        self.scan_root = Path(scan_root).resolve()
        self.ui_dir = Path(ui_dir).resolve() if ui_dir else None
        self.threshold = threshold
        self._labels: list[TriageLabel] = load_labels(self.labels_path)
        self._lock = threading.Lock()
        self._by_id = {f.id: f for f in doc.findings}
        self._httpd: ThreadingHTTPServer | None = None

    # -- label state ------------------------------------------------------

    def merged_labels(self) -> dict[str, TriageLabel]:
        with self._lock:
            merged, _ = apply_labels(self.doc.findings, self._labels)
        return merged

    def add_label(self, finding_id: str, verdict: str, note: str | None, reviewer: str | None) -> None:
        label = make_label(finding_id, verdict, note, reviewer)
        with self._lock:
            self._labels.append(label)
            save_labels(self.labels_path, self._labels)

    # -- api payloads -----------------------------------------------------

    def findings_payload(self, query: dict[str, list[str]]) -> dict:
        group_by = (query.get("group_by") or ["none"])[0]
        filters = []
        for raw in query.get("filter", []):
            if ":" not in raw:
                raise UnknownKey(f"bad filter {raw!r}; expected key:value")
            key, value = raw.split(":", 1)
            filters.append((key, value))
        groups = build_flow_table(self.doc.findings, group_by=group_by, filters=filters)
        page = max(1, int((query.get("page") or ["1"])[0]))
        page_size = max(1, int((query.get("page_size") or ["200"])[0]))
        labels = self.merged_labels()

        def row_dict(row):
            label = labels.get(row.finding_id)
            return {
                "id": row.finding_id,
                "path": row.path,
                "source": row.source,
                "sink": row.sink,
                "sink_type": row.sink_type,
                "instance": row.instance,
                "confidence": row.confidence,
                "span": list(row.span),
                "verdict": label.verdict if label else "Unreviewed",
            }

        total = sum(len(g.rows) for g in groups)
        out_groups = []
        cursor = 0
        start = (page - 1) * page_size
        end = start + page_size
        for group in groups:
            rows = []
            for row in group.rows:
                if start <= cursor < end:
                    rows.append(row_dict(row))
                cursor += 1
            if rows or group.key is None:
                out_groups.append({"key": group.key, "rows": rows})
        return {
            "total": total,
            "page": page,
            "page_size": page_size,
            "group_by": group_by,
            "groups": out_groups,
        }

    def snippet_payload(self, finding_id: str, context: int) -> dict | None:
        finding = self._by_id.get(finding_id)
        if finding is None:
            return None
        target = (self.scan_root / finding.path).resolve()
        if not str(target).startswith(str(self.scan_root)) or not target.is_file():
            return None
        try:
            lines = target.read_text(encoding="utf-8", errors="replace").splitlines()
        except OSError:
            return None
        start_line, _, end_line, _ = finding.span
        lo = max(1, start_line - context)
        hi = min(len(lines), end_line + context)
        return {
            "id": finding.id,
            "path": finding.path,
            "rule": finding.sink.rule_id,
            "source": finding.source.display,
            "sink": finding.sink.display,
            "instance": finding.instance.rendered,
            "span": list(finding.span),
            "first_line": lo,
            "lines": lines[lo - 1 : hi],
        }

    def metrics_payload(self) -> dict:
        table = precision_table(self.doc.findings, self.merged_labels(), self.threshold)
        return {
            "threshold": table.threshold,
            "reviewed": table.reviewed,
            "total": table.total,
            "coverage": table.coverage,
            "sources": [row[0].source for row in table.cells],
            "sinks": [cell.sink for cell in table.cells[0]] if table.cells else [],
            "cells": [
                [
                    {
                        "tp": cell.tp,
                        "fp": cell.fp,
                        "suppressed": cell.suppressed,
                        "precision": cell.precision,
                        "rendered": cell.rendered(),
                    }
                    for cell in row
                ]
                for row in table.cells
            ],
        }

    # -- http plumbing ----------------------------------------------------

    def make_handler(self):
        server = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, fmt, *args):  # quiet by default
                pass

            def _send_json(self, payload, status=200):
                body = json.dumps(payload, sort_keys=True).encode("utf-8")
                self.send_response(status)
                self.send_header("Content-Type", "application/json; charset=utf-8")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

            def _send_error_json(self, status, message):
                self._send_json({"error": message}, status=status)

            def do_GET(self):
                parsed = urlparse(self.path)
                route = unquote(parsed.path)
                query = parse_qs(parsed.query)
                try:
                    if route == "/api/findings":
                        self._send_json(server.findings_payload(query))
                    elif route == "/api/views/types":
                        self._send_json(tree_to_dict(build_type_view(server.doc.findings)))
                    elif route == "/api/views/heatmap":
                        self._send_json(heatmap_to_dict(build_heatmap(server.doc.findings)))
                    elif route == "/api/ropa":
                        self._send_json(ropa_to_dict(build_ropa(server.doc.findings)))
                    elif route == "/api/metrics":
                        self._send_json(server.metrics_payload())
                    elif route.startswith("/api/snippet/"):
                        finding_id = route.rsplit("/", 1)[-1]
                        context = int((query.get("context") or ["3"])[0])
                        payload = server.snippet_payload(finding_id, context)
                        if payload is None:
                            self._send_error_json(404, "snippet unavailable")
                        else:
                            self._send_json(payload)
                    else:
                        self._serve_static(route)
                except UnknownKey as exc:
                    self._send_error_json(400, str(exc))
                except (ValueError, KeyError) as exc:
                    self._send_error_json(400, f"bad request: {exc}")

            def do_POST(self):
                parsed = urlparse(self.path)
                if unquote(parsed.path) != "/api/labels":
                    self._send_error_json(404, "not found")
                    return
                length = int(self.headers.get("Content-Length") or 0)
                try:
                    body = json.loads(self.rfile.read(length) or b"{}")
                    finding_id = str(body["finding_id"])
                    verdict = str(body["verdict"])
                except (json.JSONDecodeError, KeyError) as exc:
                    self._send_error_json(400, f"bad label payload: {exc}")
                    return
                if verdict not in ("TP", "FP", "Unreviewed"):
                    self._send_error_json(400, f"bad verdict {verdict!r}")
                    return
                if finding_id not in server._by_id:
                    self._send_error_json(404, f"unknown finding id {finding_id!r}")
                    return
                server.add_label(finding_id, verdict, body.get("note"), body.get("reviewer"))
                self._send_json({"ok": True, "finding_id": finding_id, "verdict": verdict})

            def _serve_static(self, route):
                if server.ui_dir is None:
                    if route in ("/", "/index.html"):
                        body = _FALLBACK_PAGE.encode("utf-8")
                        self.send_response(200)
                        self.send_header("Content-Type", "text/html; charset=utf-8")
                        self.send_header("Content-Length", str(len(body)))
                        self.end_headers()
                        self.wfile.write(body)
                    else:
                        self._send_error_json(404, "not found")
                    return
                rel = route.lstrip("/") or "index.html"
                target = (server.ui_dir / rel).resolve()
                if not str(target).startswith(str(server.ui_dir)) or not target.is_file():
                    if route == "/":
                        target = server.ui_dir / "index.html"
                        if not target.is_file():
                            self._send_error_json(404, "not found")
                            return
                    else:
                        self._send_error_json(404, "not found")
                        return
                ctype = mimetypes.guess_type(str(target))[0] or "application/octet-stream"
                body = target.read_bytes()
                self.send_response(200)
                self.send_header("Content-Type", ctype)
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

        return Handler

    def start(self, host: str = "127.0.0.1", port: int = 0) -> int:
        """Bind and serve on a background thread; returns the bound port."""
        try:
            self._httpd = ThreadingHTTPServer((host, port), self.make_handler())
        except OSError as exc:
            raise PortInUse(f"cannot bind {host}:{port}: {exc}") from exc
        thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)
        thread.start()
        return self._httpd.server_address[1]

    def serve_forever(self, host: str = "127.0.0.1", port: int = 8731) -> None:
        try:
            self._httpd = ThreadingHTTPServer((host, port), self.make_handler())
        except OSError as exc:
            raise PortInUse(f"cannot bind {host}:{port}: {exc}") from exc
        self._httpd.serve_forever()

    def stop(self) -> None:
        if self._httpd is not None:
            self._httpd.shutdown()
            self._httpd.server_close()
            self._httpd = None

"""Scan orchestration: walk files, extract statements, analyze, classify.

Results are deterministic for a given tree, pack, and flags regardless of the
worker count: files are processed independently and merged in sorted path
order, and every downstream stage is a pure function.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .errors import Unclassifiable
from .patterns import Finding, classify, make_finding
from .rulepack import RulePack
from .stmt import SourceFile, extract_statements, language_for_path
from .taint import analyze_scope

log = logging.getLogger("pdflow")

SKIP_DIRS = {".git", ".hg", ".svn", "node_modules", "build", "dist", "target", "__pycache__"}


@dataclass
class ScanStats:
    files: int = 0
    statements: int = 0
    elapsed_ms: int = 0
    source_only: int = 0
    sink_only: int = 0
    unclassifiable: int = 0
    inner_sink_matches: int = 0
    skipped_files: int = 0


@dataclass
class FindingsDocument:
    """Self-contained scan result; every view is reconstructible from it."""

    tool_name: str = "pdflow"
    tool_version: str = "0.1.0"
    rulepack_version: str = "0"
    stats: ScanStats = field(default_factory=ScanStats)
    findings: list[Finding] = field(default_factory=list)


@dataclass
class _FileResult:
    path: str
    statements: int
    source_only: int
    sink_only: int
    unclassifiable: int
    inner_sink_matches: int
    findings: list[Finding]
    skipped: bool = False


def collect_files(paths: list[str | Path], languages: set[str] | None = None) -> list[tuple[Path, str]]:
    """(absolute path, repo-relative display path) pairs, sorted by display path."""
    out: dict[str, Path] = {}
    for raw in paths:
        root = Path(raw)
        if root.is_file():
            if language_for_path(root) is not None:
                out.setdefault(root.as_posix(), root.resolve())
            continue
        for candidate in sorted(root.rglob("*")):
            if not candidate.is_file():
                continue
            if any(part in SKIP_DIRS for part in candidate.parts):
                continue
            lang = language_for_path(candidate)
            if lang is None:
                continue
            if languages and lang.value not in languages:
                continue
            rel = candidate.relative_to(root).as_posix()
            out.setdefault(rel, candidate.resolve())
    return sorted(((abs_path, rel) for rel, abs_path in out.items()), key=lambda p: p[1])


def scan_file(abs_path: Path, rel_path: str, pack: RulePack, *, propagate: bool = True) -> _FileResult:
    try:
        source = SourceFile.from_path(abs_path, repo_relative=rel_path)
    except UnicodeDecodeError:
        log.warning("skipping undecodable file: %s", rel_path)
        return _FileResult(rel_path, 0, 0, 0, 0, 0, [], skipped=True)
    except OSError as exc:
        log.warning("skipping unreadable file %s: %s", rel_path, exc)
        return _FileResult(rel_path, 0, 0, 0, 0, 0, [], skipped=True)
    return scan_source(source, pack, propagate=propagate)


def scan_source(source: SourceFile, pack: RulePack, *, propagate: bool = True) -> _FileResult:
    statements = extract_statements(source)
    scopes: dict[int, list] = {}
    for statement in statements:
        scopes.setdefault(statement.scope_id, []).append(statement)
    findings: list[Finding] = []
    source_only = sink_only = unclassifiable = inner = 0
    for scope_id in sorted(scopes):
        result = analyze_scope(scopes[scope_id], pack, propagate=propagate)
        source_only += result.stats.source_only
        sink_only += result.stats.sink_only
        inner += result.stats.inner_sink_matches
        for flow in result.flows:
            try:
                findings.append(make_finding(flow, classify(flow)))
            except Unclassifiable:
                unclassifiable += 1
    findings.sort(key=lambda f: f.span)
    return _FileResult(
        path=source.path,
        statements=len(statements),
        source_only=source_only,
        sink_only=sink_only,
        unclassifiable=unclassifiable,
        inner_sink_matches=inner,
        findings=findings,
    )


def scan(
    paths: list[str | Path],
    pack: RulePack,
    *,
    languages: set[str] | None = None,
    propagate: bool = True,
    workers: int = 1,
) -> FindingsDocument:
    """Scan ``paths`` with ``workers`` parallel file workers; output is
    byte-identical for any worker count."""
    files = collect_files(paths, languages)
    if workers <= 1 or len(files) <= 1:
        results = [scan_file(p, rel, pack, propagate=propagate) for p, rel in files]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(
                pool.map(lambda fr: scan_file(fr[0], fr[1], pack, propagate=propagate), files)
            )
    results.sort(key=lambda r: r.path)
    doc = FindingsDocument(rulepack_version=pack.version)
    for res in results:
        if res.skipped:
            doc.stats.skipped_files += 1
            continue
        doc.stats.files += 1
        doc.stats.statements += res.statements
        doc.stats.source_only += res.source_only
        doc.stats.sink_only += res.sink_only
        doc.stats.unclassifiable += res.unclassifiable
        doc.stats.inner_sink_matches += res.inner_sink_matches
        doc.findings.extend(res.findings)
    return doc

"""Review labels and precision metrics.

Labels live in their own JSON file and never mutate the findings document;
findings stay a pure scan artifact. Precision is computed per
(source category, sink category) cell as TP/(TP+FP) over reviewed findings,
and cells with fewer than 20 reviewed results render as "-".
"""

from __future__ import annotations

import json
import os
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path

from .errors import SchemaMismatch
from .patterns import Finding
from .rulepack import SINK_CATEGORY_ORDER, SOURCE_CATEGORY_ORDER

DEFAULT_SUPPRESSION_THRESHOLD = 20

VERDICTS = ("TP", "FP", "Unreviewed")


@dataclass(frozen=True)
class TriageLabel:
    finding_id: str
    verdict: str  # TP | FP | Unreviewed
    note: str | None = None
    reviewer: str | None = None
    timestamp: float = 0.0

    def __post_init__(self) -> None:
        if self.verdict not in VERDICTS:
            raise SchemaMismatch(f"bad verdict {self.verdict!r}; expected one of {VERDICTS}")


def make_label(
    finding_id: str, verdict: str, note: str | None = None, reviewer: str | None = None
) -> TriageLabel:
    return TriageLabel(
        finding_id=finding_id, verdict=verdict, note=note, reviewer=reviewer,
        timestamp=time.time(),
    )


def load_labels(path: str | Path) -> list[TriageLabel]:
    path = Path(path)
    if not path.exists():
        return []
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaMismatch(f"labels file is not valid JSON: {exc}") from exc
    if not isinstance(data, list):
        raise SchemaMismatch("labels file must hold a JSON list")
    labels = []
    for entry in data:
        if not isinstance(entry, dict) or "finding_id" not in entry or "verdict" not in entry:
            raise SchemaMismatch(f"bad label entry: {entry!r}")
        labels.append(
            TriageLabel(
                finding_id=str(entry["finding_id"]),
                verdict=str(entry["verdict"]),
                note=entry.get("note"),
                reviewer=entry.get("reviewer"),
                timestamp=float(entry.get("timestamp", 0.0)),
            )
        )
    return labels


def save_labels(path: str | Path, labels: list[TriageLabel]) -> None:
    """Atomic replace so a crash never truncates the labels file."""
    path = Path(path)
    payload = json.dumps(
        [
            {
                "finding_id": label.finding_id,
                "verdict": label.verdict,
                "note": label.note,
                "reviewer": label.reviewer,
                "timestamp": label.timestamp,
            }
            for label in labels
        ],
        indent=2,
        sort_keys=True,
    )
    fd, tmp = tempfile.mkstemp(dir=str(path.parent) or ".", prefix=".labels-", suffix=".json")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(payload + "\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def apply_labels(
    findings: list[Finding], labels: list[TriageLabel]
) -> tuple[dict[str, TriageLabel], list[str]]:
    """Last write wins per finding id; unknown ids come back as warnings."""
    known = {f.id for f in findings}
    merged: dict[str, TriageLabel] = {}
    warnings: list[str] = []
    for label in labels:
        if label.finding_id not in known:
            warnings.append(f"label for unknown finding id {label.finding_id!r}")
            continue
        merged[label.finding_id] = label
    return merged, warnings


@dataclass(frozen=True)
class PrecisionCell:
    source: str
    sink: str
    tp: int
    fp: int
    suppressed: bool

    @property
    def reviewed(self) -> int:
        return self.tp + self.fp

    @property
    def precision(self) -> float | None:
        if self.reviewed == 0:
            return None
        return self.tp / self.reviewed

    def rendered(self) -> str:
        if self.suppressed or self.precision is None:
            return "-"
        return f"{self.precision:.2f}"


@dataclass
class PrecisionTable:
    cells: list[list[PrecisionCell]]  # sources x sinks, Table-1 order
    reviewed: int
    total: int
    threshold: int = DEFAULT_SUPPRESSION_THRESHOLD

    @property
    def coverage(self) -> float:
        return self.reviewed / self.total if self.total else 0.0

    def cell(self, source_abbr: str, sink_abbr: str) -> PrecisionCell:
        for row in self.cells:
            for cell in row:
                if cell.source == source_abbr and cell.sink == sink_abbr:
                    return cell
        raise KeyError((source_abbr, sink_abbr))


def precision_table(
    findings: list[Finding],
    labels: dict[str, TriageLabel],
    threshold: int = DEFAULT_SUPPRESSION_THRESHOLD,
) -> PrecisionTable:
    """Unreviewed findings are excluded; cells under the threshold suppress."""
    tp: dict[tuple[str, str], int] = {}
    fp: dict[tuple[str, str], int] = {}
    reviewed = 0
    for finding in findings:
        label = labels.get(finding.id)
        if label is None or label.verdict == "Unreviewed":
            continue
        reviewed += 1
        sink_abbr = finding.sink.category.abbreviation
        bucket = tp if label.verdict == "TP" else fp
        for category in finding.source.categories:
            key = (category.abbreviation, sink_abbr)
            bucket[key] = bucket.get(key, 0) + 1
    cells = []
    for src in SOURCE_CATEGORY_ORDER:
        row = []
        for snk in SINK_CATEGORY_ORDER:
            key = (src.abbreviation, snk.abbreviation)
            cell_tp = tp.get(key, 0)
            cell_fp = fp.get(key, 0)
            row.append(
                PrecisionCell(
                    source=src.abbreviation,
                    sink=snk.abbreviation,
                    tp=cell_tp,
                    fp=cell_fp,
                    suppressed=(cell_tp + cell_fp) < threshold,
                )
            )
        cells.append(row)
    return PrecisionTable(cells=cells, reviewed=reviewed, total=len(findings), threshold=threshold)


def render_precision_text(table: PrecisionTable) -> str:
    sink_headers = [c.abbreviation for c in SINK_CATEGORY_ORDER]
    width = 6
    lines = ["     " + "".join(h.rjust(width) for h in sink_headers)]
    for row in table.cells:
        cells = "".join(cell.rendered().rjust(width) for cell in row)
        lines.append(f"{row[0].source:<5}{cells}")
    lines.append("")
    lines.append(
        f"reviewed {table.reviewed}/{table.total} findings "
        f"(coverage {table.coverage:.0%}); cells with fewer than "
        f"{table.threshold} reviewed results render as '-'"
    )
    return "\n".join(lines) + "\n"

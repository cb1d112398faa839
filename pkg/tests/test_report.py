from __future__ import annotations

import json
import random

import jsonschema
import pytest

from conftest import scan_fixture
from pdflow import report
from pdflow.errors import SchemaMismatch
from pdflow.patterns import (
    ArrowKind,
    Finding,
    FindingSink,
    FindingSource,
    FlowInstance,
    FlowShape,
)
from pdflow.rulepack import Certainty, SinkCategory, SourceCategory
from pdflow.scanner import FindingsDocument, ScanStats
from pdflow.taint import Confidence
from pdflow.views import build_type_view


@pytest.fixture(scope="module")
def sarif_validator():
    return jsonschema.Draft7Validator(report.sarif_schema())


def random_finding(rng: random.Random, seq: int) -> Finding:
    shape = rng.choice(list(FlowShape))
    arrow = rng.choice(list(ArrowKind))
    sources = rng.sample(list(SourceCategory), k=rng.randint(1, 3))
    sink_cat = rng.choice(list(SinkCategory))
    lhs = tuple(rng.choice(["email", "_", "users.email_addr", "SSN", "données"]) for _ in range(rng.randint(1, 3)))
    name = rng.choice(["email", "user.id", "SSN", "café"])
    path = rng.choice(["src/a.ts", "deep/путь/b.java", "c with space.js", "d.tsx"])
    snippet = rng.choice(['send(email);', 'x = f("a\nb");', 'print(SSN); // ok', '∂ = g(1);'])
    line = rng.randint(1, 4000)
    col = rng.randint(1, 200)
    return Finding(
        id=f"{seq:016x}",
        path=path,
        span=(line, col, line + rng.randint(0, 3), col + rng.randint(1, 40)),
        snippet=snippet,
        source=FindingSource(
            display=name, name=name, stem="email",
            categories=tuple(sources), origin="rule:src-x", position="arg:0",
        ),
        sink=FindingSink(
            callee="send", display="this.mailer.send", category=sink_cat,
            certainty=rng.choice(list(Certainty)), rule_id="snk-x",
        ),
        instance=FlowInstance(
            shape=shape, arrow=arrow, lhs_parts=lhs, sink_name="send",
            rhs="out", rendered="+".join(lhs) + " -send-> out",
        ),
        confidence=rng.choice(list(Confidence)),
    )


def random_document(rng: random.Random) -> FindingsDocument:
    count = rng.randint(0, 6)
    return FindingsDocument(
        rulepack_version="1.0",
        stats=ScanStats(
            files=rng.randint(0, 9), statements=rng.randint(0, 500),
            source_only=rng.randint(0, 50), sink_only=rng.randint(0, 50),
        ),
        findings=[random_finding(rng, i) for i in range(count)],
    )


class TestFindingsJson:
    def test_round_trip_identity(self):
        doc = scan_fixture("table3.js")
        text = report.emit_findings_json(doc)
        loaded = report.load_findings_json(text)
        assert report.emit_findings_json(loaded) == text
        assert loaded.findings == doc.findings

    def test_round_trip_on_random_documents(self):
        rng = random.Random(11)
        for _ in range(50):
            doc = random_document(rng)
            text = report.emit_findings_json(doc)
            assert report.emit_findings_json(report.load_findings_json(text)) == text

    def test_truncated_text_raises_schema_mismatch(self):
        doc = scan_fixture("table3.js")
        text = report.emit_findings_json(doc)
        with pytest.raises(SchemaMismatch):
            report.load_findings_json(text[: len(text) // 2])

    def test_wrong_schema_name_rejected(self):
        with pytest.raises(SchemaMismatch):
            report.load_findings_json(json.dumps({"schema": "other@9", "findings": []}))

    def test_missing_field_rejected(self):
        doc = scan_fixture("table3.js")
        data = json.loads(report.emit_findings_json(doc))
        del data["findings"][0]["sink"]["category"]
        with pytest.raises(SchemaMismatch):
            report.load_findings_json(json.dumps(data))

    def test_emission_is_deterministic(self):
        doc = scan_fixture("table3.js")
        assert report.emit_findings_json(doc) == report.emit_findings_json(doc)

    def test_doc_hash_is_platform_stable(self):
        import hashlib

        doc = scan_fixture("table3.js")
        digest = hashlib.sha256(report.emit_findings_json(doc).encode()).hexdigest()
        again = hashlib.sha256(report.emit_findings_json(doc).encode()).hexdigest()
        assert digest == again


class TestSarif:
    def test_single_finding_cardinality(self, sarif_validator):
        doc = scan_fixture("propagation.js")
        sarif = json.loads(report.emit_sarif(doc))
        assert len(sarif["runs"][0]["results"]) == len(doc.findings)
        first = doc.findings[0]
        region = sarif["runs"][0]["results"][0]["locations"][0]["physicalLocation"]["region"]
        assert (region["startLine"], region["startColumn"]) == (first.span[0], first.span[1])
        sarif_validator.validate(sarif)

    def test_empty_document_is_valid_sarif(self, sarif_validator):
        sarif = json.loads(report.emit_sarif(FindingsDocument()))
        assert sarif["runs"][0]["results"] == []
        sarif_validator.validate(sarif)

    def test_table4_messages_contain_rendered_instances(self, sarif_validator):
        doc = scan_fixture("flows_email.ts")
        sarif = json.loads(report.emit_sarif(doc))
        results = sarif["runs"][0]["results"]
        assert len(results) == 7
        messages = [r["message"]["text"] for r in results]
        for finding in doc.findings:
            assert any(finding.instance.rendered in m for m in messages)
        sarif_validator.validate(sarif)

    def test_rule_ids_follow_category_shape_format(self):
        doc = scan_fixture("table3.js")
        sarif = json.loads(report.emit_sarif(doc))
        for result in sarif["runs"][0]["results"]:
            parts = result["ruleId"].split("/")
            assert parts[0] == "pdflow"
            assert parts[1] in [c.abbreviation for c in SourceCategory]
            assert parts[2] in [c.abbreviation for c in SinkCategory]
            assert parts[3] in [s.value for s in FlowShape]
        rules = sarif["runs"][0]["tool"]["driver"]["rules"]
        assert len({r["id"] for r in rules}) == len(rules)

    def test_fuzzed_documents_validate(self, sarif_validator):
        rng = random.Random(23)
        for _ in range(100):
            doc = random_document(rng)
            sarif = json.loads(report.emit_sarif(doc))
            sarif_validator.validate(sarif)

    def test_emission_deterministic(self):
        doc = scan_fixture("flows_email.ts")
        assert report.emit_sarif(doc) == report.emit_sarif(doc)


class TestMermaid:
    def test_empty_tree_root_only(self):
        text = report.emit_mermaid(build_type_view([]))
        lines = [l for l in text.splitlines() if l.strip()]
        assert lines[0] == "flowchart TD"
        assert len(lines) == 2 and "root" in lines[1]

    def test_three_edges_for_single_variant(self):
        doc = scan_fixture("propagation.js")
        findings = [f for f in doc.findings if f.source.stem == "user" and f.source.position == "receiver"]
        text = report.emit_mermaid(build_type_view(findings))
        edges = [l for l in text.splitlines() if "-->" in l]
        assert len(edges) == 3  # root->category->stem->variant

    def test_node_order_stable(self):
        doc = scan_fixture("flows_email.ts")
        tree = build_type_view(doc.findings)
        assert report.emit_mermaid(tree) == report.emit_mermaid(tree)

    def test_labels_carry_counts(self):
        doc = scan_fixture("flows_email.ts")
        text = report.emit_mermaid(build_type_view(doc.findings))
        assert '"email (' in text

    def test_parses_as_flowchart_grammar(self):
        # structural check: every non-header line is a node decl or an edge
        import re

        doc = scan_fixture("table3.js")
        text = report.emit_mermaid(build_type_view(doc.findings))
        lines = text.splitlines()
        assert lines[0] == "flowchart TD"
        node = re.compile(r'^\s+[A-Za-z0-9_]+\["[^"]*"\]$')
        edge = re.compile(r"^\s+[A-Za-z0-9_]+ --> [A-Za-z0-9_]+$")
        for line in lines[1:]:
            assert node.match(line) or edge.match(line), line

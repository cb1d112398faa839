from __future__ import annotations

import random

import pytest

from conftest import TABLE4_ROWS, scan_fixture
from pdflow.errors import UnknownKey
from pdflow.patterns import make_finding
from pdflow.rulepack import SINK_CATEGORY_ORDER, SOURCE_CATEGORY_ORDER, default_pack
from pdflow.stmt import Language, SourceFile, extract_statements
from pdflow.taint import analyze_scope
from pdflow.views import (
    build_flow_table,
    build_heatmap,
    build_ropa,
    build_type_view,
    coverage_diff,
    load_declared_categories,
)


def findings_for(text: str):
    source = SourceFile(path="v.js", language=Language.JAVASCRIPT, text=text)
    flows = analyze_scope(extract_statements(source), default_pack()).flows
    return [make_finding(f) for f in flows]


class TestTypeView:
    def test_email_variants_grouped_under_stem(self):
        findings = findings_for(
            "send(email_addr);\nsend(email_addr);\nsend(email);\n"
        )
        tree = build_type_view(findings)
        (con,) = tree.categories
        assert con.category.abbreviation == "CON"
        assert con.count == 3
        (stem,) = con.stems
        assert stem.name == "email" and stem.count == 3
        assert [(v.name, v.count) for v in stem.variants] == [("email_addr", 2), ("email", 1)]

    def test_empty_findings_empty_tree(self):
        tree = build_type_view([])
        assert tree.categories == [] and tree.total == 0

    def test_two_categories_partition(self):
        findings = findings_for("send(email);\nprint(SSN);\n")
        tree = build_type_view(findings)
        assert sorted(c.category.abbreviation for c in tree.categories) == ["CON", "NID"]
        for cat in tree.categories:
            assert cat.count == 1

    def test_counts_sum_bottom_up(self):
        findings = findings_for(
            "send(email);\nsend(email_addr);\nsend(phone);\nprint(SSN);\nprint(SSN);\n"
        )
        tree = build_type_view(findings)
        for cat in tree.categories:
            assert cat.count == sum(s.count for s in cat.stems)
            for stem in cat.stems:
                assert stem.count == sum(v.count for v in stem.variants)
        assert tree.total == sum(c.count for c in tree.categories)


class TestFlowTable:
    def test_table4_fixture_rows(self):
        doc = scan_fixture("flows_email.ts")
        (group,) = build_flow_table(doc.findings, group_by="source-stem", filters=[("stem", "email")])
        assert group.key == "email"
        got = [(r.source, r.sink, r.sink_type, r.instance) for r in group.rows]
        assert got == TABLE4_ROWS
        assert [r.sink_type for r in group.rows] == ["DB", "DB", "DB", "C/D", "C/D", "T", "M"]

    def test_filter_with_no_matches_is_empty(self):
        findings = findings_for("send(email);\n")
        groups = build_flow_table(findings, filters=[("sink-category", "L")])
        assert groups[0].rows == []

    def test_grouping_preserves_row_multiset(self):
        doc = scan_fixture("flows_email.ts")
        flat = build_flow_table(doc.findings)[0].rows
        grouped = build_flow_table(doc.findings, group_by="sink-category")
        regrouped = [r for g in grouped for r in g.rows]
        assert sorted(r.finding_id for r in regrouped) == sorted(r.finding_id for r in flat)

    def test_no_filters_one_row_per_finding(self):
        doc = scan_fixture("table3.js")
        (group,) = build_flow_table(doc.findings)
        assert len(group.rows) == len(doc.findings)

    def test_unknown_key_raises(self):
        with pytest.raises(UnknownKey):
            build_flow_table([], group_by="bogus")
        with pytest.raises(UnknownKey):
            build_flow_table([], filters=[("bogus", "x")])

    def test_filter_aliases(self):
        doc = scan_fixture("flows_email.ts")
        via_alias = build_flow_table(doc.findings, filters=[("stem", "email")])
        via_full = build_flow_table(doc.findings, filters=[("source-stem", "email")])
        assert [r.finding_id for r in via_alias[0].rows] == [
            r.finding_id for r in via_full[0].rows
        ]

    def test_confidence_filter(self):
        findings = findings_for('send(email);\nsend("at noreply@test.org");\n')
        (high,) = build_flow_table(findings, filters=[("confidence", "high")])
        (low,) = build_flow_table(findings, filters=[("confidence", "low")])
        assert len(high.rows) == 1 and len(low.rows) == 1

    def test_high_confidence_ranks_before_low(self):
        findings = findings_for('send("at noreply@test.org");\nsend(email);\n')
        (group,) = build_flow_table(findings)
        assert [r.confidence for r in group.rows] == ["high", "low"]


class TestHeatmap:
    def test_single_finding_single_cell(self):
        findings = findings_for("query = createQueryBuilder(users.email);\n")
        stats = build_heatmap(findings)
        src = [c.abbreviation for c in SOURCE_CATEGORY_ORDER].index("CON")
        snk = [c.abbreviation for c in SINK_CATEGORY_ORDER].index("DB")
        assert stats.matrix[src][snk] == 1
        assert stats.total == 1
        assert sum(stats.row_totals) == 1 and sum(stats.col_totals) == 1

    def test_total_equals_findings_for_single_category_corpus(self):
        doc = scan_fixture("table3.js")
        stats = build_heatmap(doc.findings)
        assert stats.total == len(doc.findings)

    def test_brute_force_recount_matches(self):
        rng = random.Random(7)
        sources = ["email", "SSN", "location", "device", "card", "feedback"]
        sinks = ["send", "print", "encrypt", "update", "createQueryBuilder", "delete"]
        lines = [
            f"{rng.choice(sinks)}({rng.choice(sources)});" for _ in range(60)
        ]
        findings = findings_for("\n".join(lines) + "\n")
        stats = build_heatmap(findings)
        recount = {}
        for f in findings:
            for cat in f.source.categories:
                key = (cat.abbreviation, f.sink.category.abbreviation)
                recount[key] = recount.get(key, 0) + 1
        for i, src in enumerate(SOURCE_CATEGORY_ORDER):
            for j, snk in enumerate(SINK_CATEGORY_ORDER):
                assert stats.matrix[i][j] == recount.get(
                    (src.abbreviation, snk.abbreviation), 0
                )

    def test_tree_categories_never_disagree_with_heatmap(self):
        doc = scan_fixture("flows_email.ts")
        tree = build_type_view(doc.findings)
        stats = build_heatmap(doc.findings)
        for cat in tree.categories:
            idx = list(SOURCE_CATEGORY_ORDER).index(cat.category)
            assert stats.row_totals[idx] == cat.count


class TestRopa:
    def test_three_finding_example(self):
        findings = findings_for(
            "query = createQueryBuilder(account);\nencrypt(email);\nlog(email);\n"
        )
        summary = build_ropa(findings)
        assert summary.categories_of_personal_data == ["ACC", "CON"]
        assert summary.database_or_third_party_transfers == {"ACC": 1}
        assert summary.encryption_or_anonymization == {"CON": 1}
        assert summary.logging == {"CON": 1}
        assert summary.categories_of_processing["DB"] == ["ACC"]
        assert summary.categories_of_processing["E"] == ["CON"]
        assert summary.categories_of_processing["L"] == ["CON"]

    def test_empty_findings_empty_sections(self):
        summary = build_ropa([])
        assert summary.categories_of_personal_data == []
        assert summary.categories_of_processing == {}
        assert summary.database_or_third_party_transfers == {}
        assert summary.encryption_or_anonymization == {}
        assert summary.logging == {}

    def test_adding_findings_is_monotone(self):
        base = findings_for("encrypt(email);\n")
        more = base + findings_for("log(SSN);\n")
        small = build_ropa(base)
        large = build_ropa(more)
        assert set(small.categories_of_personal_data) <= set(large.categories_of_personal_data)
        for key in small.categories_of_processing:
            assert key in large.categories_of_processing

    def test_ropa_categories_equal_tree_categories(self):
        doc = scan_fixture("table3.js")
        summary = build_ropa(doc.findings)
        tree = build_type_view(doc.findings)
        assert summary.categories_of_personal_data == [
            c.category.abbreviation
            for c in sorted(tree.categories, key=lambda c: list(SOURCE_CATEGORY_ORDER).index(c.category))
        ]

    def test_rebuild_is_identical(self):
        doc = scan_fixture("flows_email.ts")
        assert build_ropa(doc.findings) == build_ropa(doc.findings)


class TestCoverage:
    def test_missing_category_notation(self):
        assert coverage_diff(["ACC", "CON", "LOC"], {"ACC", "CON"}) == "-LOC"
        assert coverage_diff(["ACC", "LOC"], set()) == "-ACC, -LOC"

    def test_full_coverage_plus(self):
        assert coverage_diff(["ACC", "CON"], {"ACC", "CON", "LOC"}) == "+"
        assert coverage_diff([], set()) == "+"

    def test_load_declared_categories(self):
        assert load_declared_categories("categories: [ACC, CON]") == {"ACC", "CON"}
        assert load_declared_categories("- ACC\n- LOC\n") == {"ACC", "LOC"}
        assert load_declared_categories("") == set()

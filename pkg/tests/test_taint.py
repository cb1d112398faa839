from __future__ import annotations

from pdflow.rulepack import RulePack, SourceCategory, default_pack
from pdflow.stmt import ChainRef, Language, SourceFile, extract_statements
from pdflow.taint import Confidence, analyze_scope, category_of


def scope_of(text: str, lang: Language = Language.JAVASCRIPT):
    source = SourceFile(path="scope.js", language=lang, text=text)
    return extract_statements(source)


class TestAnalyzeScope:
    def test_propagation_derives_new_source(self, pack):
        flows = analyze_scope(
            scope_of("choice = UserInfo.retrieve(2);\nsend(choice);\n"), pack
        ).flows
        assert len(flows) == 2
        second = flows[1]
        (part,) = second.sources
        assert part.origin.startswith("taint:derived:")
        assert part.categories == (SourceCategory.ACCOUNT,)
        assert part.stem == "user"

    def test_no_propagation_flag(self, pack):
        result = analyze_scope(
            scope_of("choice = UserInfo.retrieve(2);\nsend(choice);\n"), pack, propagate=False
        )
        assert len(result.flows) == 1

    def test_sink_without_source_is_dropped(self, pack):
        result = analyze_scope(scope_of("counter = count(items);"), pack)
        assert result.flows == []
        assert result.stats.sink_only == 0  # count is not a sink verb
        result = analyze_scope(scope_of("counter = update(items);"), pack)
        assert result.flows == []
        assert result.stats.sink_only == 1

    def test_source_without_sink_is_counted_not_emitted(self, pack):
        result = analyze_scope(scope_of("copy = duplicate(email);"), pack)
        assert result.flows == []
        assert result.stats.source_only == 1

    def test_seeded_arg_flow(self, pack):
        (flow,) = analyze_scope(scope_of("print(SSN);"), pack).flows
        (part,) = flow.sources
        assert part.position == "arg:0"
        assert part.categories == (SourceCategory.NATIONAL_ID,)
        assert flow.sink.category.abbreviation == "L"

    def test_dashed_flow_does_not_taint_target(self, pack):
        # match is a dashed verb: choice must not become a source
        flows = analyze_scope(
            scope_of("choice = match(name, list);\nsend(choice);\n"), pack
        ).flows
        assert len(flows) == 1

    def test_literal_sources_carry_low_confidence(self, pack):
        (flow,) = analyze_scope(scope_of('send("reach me at noreply@test.org");'), pack).flows
        (part,) = flow.sources
        assert part.is_literal
        assert part.confidence is Confidence.LOW

    def test_variable_sources_carry_high_confidence(self, pack):
        (flow,) = analyze_scope(scope_of("send(email);"), pack).flows
        assert flow.sources[0].confidence is Confidence.HIGH

    def test_no_source_rules_no_flows(self):
        bare = RulePack(sources=(), sinks=default_pack().sinks, version="x")
        text = "full_name = retrieve(record_data,2);\nprint(SSN);\nsend(email);\n"
        result = analyze_scope(scope_of(text), bare)
        assert result.flows == []
        assert result.stats.sink_only == 3

    def test_taint_growth_is_monotone_single_pass(self, pack):
        # send(alias) precedes the derivation of alias: one pass, no fixpoint
        text = "send(alias);\nalias = UserInfo.retrieve(2);\nsend(alias);\n"
        flows = analyze_scope(scope_of(text), pack).flows
        assert len(flows) == 2  # derivation flow + second send only

    def test_derived_union_of_categories(self, pack):
        text = "blob = merge(email, SSN);\nsend(blob);\n"
        flows = analyze_scope(scope_of(text), pack).flows
        assert len(flows) == 2
        cats = flows[1].sources[0].categories
        assert set(cats) == {SourceCategory.CONTACT, SourceCategory.NATIONAL_ID}

    def test_other_statements_are_skipped(self, pack):
        result = analyze_scope(scope_of("const [a, b] = split(email);"), pack)
        assert result.flows == []

    def test_inner_sink_matches_counted_not_emitted(self, pack):
        (flow,) = analyze_scope(scope_of("send(encrypt(email));"), pack).flows
        assert flow.callee == "send"
        stats = analyze_scope(scope_of("send(encrypt(email));"), pack).stats
        assert stats.inner_sink_matches == 1


class TestCategoryOf:
    def test_final_segment_match_with_full_display(self, pack):
        hit = category_of(ChainRef(ids=("users", "email_addr"), text="users.email_addr"), {}, pack)
        assert hit.categories == (SourceCategory.CONTACT,)
        assert hit.confidence is Confidence.HIGH
        assert hit.name == "email_addr"
        assert hit.display == "users.email_addr"

    def test_intermediate_segment_match_reports_segment_and_tail(self, pack):
        hit = category_of(ChainRef(ids=("user", "id"), text="user.id"), {}, pack)
        assert hit.categories == (SourceCategory.ACCOUNT,)
        assert hit.name == "user.id"

    def test_unmatched_chain_with_empty_taint(self, pack):
        assert category_of(ChainRef(ids=("tmp",), text="tmp"), {}, pack) is None

    def test_receiver_mode_ignores_intermediate_rule_matches(self, pack):
        chain = ChainRef(ids=("user", "organizationUsers"), text="user.organizationUsers")
        assert category_of(chain, {}, pack, intermediate_rules=False) is None
        assert category_of(chain, {}, pack, intermediate_rules=True) is not None

from __future__ import annotations

import pytest

from conftest import TABLE3_INSTANCES
from pdflow.patterns import ArrowKind, FlowShape, classify, make_finding
from pdflow.rulepack import Certainty, SinkRule, default_pack, merge_packs, RulePack
from pdflow.stmt import Language, SourceFile, extract_statements
from pdflow.taint import analyze_scope


def flows_for(text: str, pack=None):
    pack = pack or default_pack()
    source = SourceFile(path="snippets.js", language=Language.JAVASCRIPT, text=text)
    return analyze_scope(extract_statements(source), pack).flows


TABLE3_SNIPPETS = """full_name = retrieve(record_data,2);
isFemale = check(user_detail,'F');
first_name = UserInfo.get(2);
choice = match(name,list);
choice = UserInfo.retrieve(2);
AccountInfo.update(userId,index);
AccountInfo.update(index);
print(SSN);
"""

TABLE3_SHAPES = [
    FlowShape.P1, FlowShape.P2, FlowShape.P3, FlowShape.P4,
    FlowShape.P5, FlowShape.P6, FlowShape.P7, FlowShape.P8,
]


class TestGoldenSnippets:
    def test_eight_snippets_reproduce_shapes_and_instances(self):
        flows = flows_for(TABLE3_SNIPPETS)
        assert len(flows) == 8
        instances = [classify(f) for f in flows]
        assert [i.shape for i in instances] == TABLE3_SHAPES
        assert [i.rendered for i in instances] == TABLE3_INSTANCES

    def test_shape_is_invariant_under_nonsource_renaming(self):
        before = classify(flows_for("full_name = retrieve(record_data,2);")[0])
        after = classify(flows_for("full_name = retrieve(zzz_blob,7);")[0])
        assert before.shape == after.shape
        assert before.rendered == after.rendered  # only non-source names changed

    def test_renamed_source_changes_display_only(self):
        before = classify(flows_for("print(SSN);")[0])
        after = classify(flows_for("print(passport);")[0])
        assert before.shape == after.shape
        assert before.rendered != after.rendered


class TestDecisionTable:
    def test_all_positions_maps_to_p3_with_appended_args(self):
        # assignment, target+receiver+arg all sources
        (flow,) = flows_for("email = UserInfo.get(name);")
        instance = classify(flow)
        assert instance.shape is FlowShape.P3
        assert instance.lhs_parts == ("UserInfo(_)", "name")
        assert instance.rendered == "UserInfo(_)+name -get-> email"

    def test_p5_with_receiver_and_arg_sources(self):
        (flow,) = flows_for("combined = UserInfo.merge(email);")
        instance = classify(flow)
        assert instance.shape is FlowShape.P5
        assert instance.lhs_parts == ("UserInfo", "email")

    def test_multiple_arg_sources_join_in_arg_order(self):
        (flow,) = flows_for("total = merge(email, phone, 3);")
        instance = classify(flow)
        assert instance.shape is FlowShape.P5
        assert instance.rendered == "email+phone -merge-> total"

    def test_p8_with_multiple_sources(self):
        (flow,) = flows_for("send(email, SSN);")
        instance = classify(flow)
        assert instance.shape is FlowShape.P8
        assert instance.rendered == "email+SSN -send-> send(email+SSN)"


class TestArrowOrthogonality:
    def test_arrow_follows_sink_certainty_alone(self):
        pack = default_pack()
        solid = classify(flows_for("isFemale = check(user_detail, 2);", pack)[0])
        assert solid.arrow is ArrowKind.DASHED  # check is dashed by default

        flipped = merge_packs(
            pack,
            RulePack(
                sources=(),
                sinks=(SinkRule(id="snk-m-check", category=pack.match_sink("check").category,
                                pattern="check", certainty=Certainty.SOLID),),
                version="flip",
            ),
        )
        reflowed = classify(flows_for("isFemale = check(user_detail, 2);", flipped)[0])
        assert reflowed.arrow is ArrowKind.SOLID
        assert reflowed.shape == solid.shape  # A/T/R/G structure untouched
        assert reflowed.rendered == solid.rendered.replace("~check~>", "-check->")

    def test_p4_p5_split_flips_with_certainty(self):
        pack = default_pack()
        dashed = classify(flows_for("choice = match(name, list);", pack)[0])
        assert dashed.shape is FlowShape.P4
        flipped = merge_packs(
            pack,
            RulePack(
                sources=(),
                sinks=(SinkRule(id="snk-m-match", category=pack.match_sink("match").category,
                                pattern="match", certainty=Certainty.SOLID),),
                version="flip",
            ),
        )
        solid = classify(flows_for("choice = match(name, list);", flipped)[0])
        assert solid.shape is FlowShape.P5


class TestRenderGrammar:
    @pytest.mark.parametrize(
        "snippet,rendered",
        [
            ("UserInfo = this.usersRepository.findOne(email, organizationId);",
             "email+_ -findOne-> UserInfo"),
            ("UserInfo.update(email_addr);",
             "UserInfo+email_addr -update-> UserInfo"),
            ("query = createQueryBuilder(users.email_addr);",
             "users.email_addr -createQueryBuilder-> query"),
        ],
    )
    def test_rendered_grammar(self, snippet, rendered):
        (flow,) = flows_for(snippet)
        assert classify(flow).rendered == rendered

    def test_render_is_injective_on_distinct_inputs(self):
        seen = {}
        for snippet in TABLE3_SNIPPETS.strip().splitlines():
            (flow,) = flows_for(snippet + "\n")
            instance = classify(flow)
            key = (instance.shape, instance.arrow, instance.lhs_parts, instance.sink_name, instance.rhs)
            if key in seen:
                assert seen[key] == instance.rendered
            else:
                for other_key, other_rendered in seen.items():
                    if other_key != key:
                        assert other_rendered != instance.rendered
                seen[key] = instance.rendered


class TestFindings:
    def test_finding_id_is_deterministic(self):
        (one,) = flows_for("print(SSN);")
        (two,) = flows_for("print(SSN);")
        assert make_finding(one).id == make_finding(two).id

    def test_designated_source_prefers_args(self):
        (flow,) = flows_for("UserInfo.findOrCreateByEmail(email);")
        finding = make_finding(flow)
        assert finding.source.display == "email"
        assert finding.source.stem == "email"

    def test_designated_source_falls_back_to_receiver_then_target(self):
        (flow,) = flows_for("AccountInfo.update(index);")
        assert make_finding(flow).source.display == "AccountInfo"
        (flow,) = flows_for("full_name = retrieve(record_data,2);")
        assert make_finding(flow).source.display == "full_name"

    def test_confidence_high_when_any_variable_participates(self):
        (flow,) = flows_for('send(email, "at noreply@test.org");')
        assert make_finding(flow).confidence.value == "high"
        (flow,) = flows_for('send("at noreply@test.org");')
        assert make_finding(flow).confidence.value == "low"

import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from gen import random_layout
from uitrans.android_parser import PageRecord, parse_layout
from uitrans.generator import GeneratedComponent, render_generate, root_component
from uitrans.knowledge_base import KnowledgeBase, load_seed, query_mapping
from uitrans.llm_gateway import Gateway, TemplateBackend
from uitrans.reflector import dump_reports, reflect, reflect_loop, run_checks
from uitrans.task_planner import FunctionalDescription, decompose, template_description

SEED = load_seed()


def units_for(xml_or_tree, max_lines=40):
    root = parse_layout(xml_or_tree, "main") if isinstance(xml_or_tree, str) else xml_or_tree
    units = decompose(PageRecord("com.ex.A", xml_layouts=[("main", root)]), max_lines)
    for u in units:
        u.description = template_description(u)
    return units


def component(code, total=0):
    return GeneratedComponent("u1", code, "Unit_u1", attribute_total=total)


def checks_by_name(report):
    return {c.name: c for c in report.checks}


# -- single reflection -------------------------------------------------------

def test_all_green_passes(gateway):
    desc = FunctionalDescription("Button", "tap target", events=["click"])
    code = "Button('Go')\n  .width(10)\n  .onClick(() => {\n  })"
    report = reflect(component(code, 1), desc, gateway)
    assert report.verdict == "pass" and report.advisories == [] and report.critique == "OK"
    assert [c.name for c in report.checks] == ["C1", "C2", "C3", "C4"]


def test_missing_slot_fails_child_coverage(gateway):
    desc = FunctionalDescription("LinearLayout", "stack", child_summary=[("TextView", 2)])
    report = reflect(component("Column() {\n  /*__SLOT:a__*/\n}"), desc, gateway)
    assert report.verdict == "fail"
    assert [c.name for c in report.failed] == ["C2"]
    assert checks_by_name(report)["C2"].detail == "expected 2 slots, found 1"
    assert "C2" in report.critique


def test_coverage_between_floor_and_target_is_advisory(gateway):
    desc = FunctionalDescription("TextView", "label")
    code = "Text('a')\n  .fontSize(3)\n  .width(3)\n  .height(3)\n" + "\n".join(
        f"  // TODO(unmapped): android:x{i}" for i in range(4))
    report = reflect(component(code, 10), desc, gateway)
    assert report.verdict == "pass"
    assert checks_by_name(report)["C4"].detail.startswith("attribute coverage 0.60")
    assert report.advisories == ["attribute coverage 0.60 below 0.8"]


def test_coverage_below_floor_fails(gateway):
    code = "Text('a')\n" + "\n".join(f"  // TODO(unmapped): android:x{i}" for i in range(6))
    report = reflect(component(code, 10), FunctionalDescription("TextView", "label"), gateway)
    assert [c.name for c in report.failed] == ["C4"]


def test_unbalanced_code_fails_well_formedness(gateway):
    report = reflect(component("Column() {\n  Text('a')\n"), FunctionalDescription("X", "y"), gateway)
    assert "C1" in [c.name for c in report.failed]


def test_missing_click_handler_fails_event_coverage(gateway):
    report = reflect(component("Button('a')"), FunctionalDescription("Button", "b", events=["click"]), gateway)
    assert [c.name for c in report.failed] == ["C3"]
    assert checks_by_name(report)["C3"].detail == "missing handlers for: click"


def test_unknown_event_is_an_advisory_not_a_failure(gateway):
    report = reflect(component("Text('a')"), FunctionalDescription("X", "y", events=["hover"]), gateway)
    assert report.verdict == "pass" and "hover" in report.advisories[0]


@settings(max_examples=80, deadline=None)
@given(st.text(alphabet="(){}[]'\"/*\n .aTextColumn0", max_size=60), st.integers(0, 3), st.integers(0, 6))
def test_checks_are_pure(code, children, total):
    desc = FunctionalDescription("X", "y", child_summary=[("A", children)] if children else [], events=["click"])
    first = run_checks(component(code, total), desc)
    assert run_checks(component(code, total), desc) == first


# -- loop --------------------------------------------------------------------

def test_pass_on_first_iteration_costs_two_calls(gateway):
    (unit,) = units_for('<TextView android:text="hi"/>')
    comp, report, learned = reflect_loop(unit, query_mapping(unit, SEED), gateway)
    assert report.verdict == "pass" and report.iteration == 1 and comp.attempts == 1
    assert gateway.calls == 2 and dict(gateway.calls_by_role) == {"generate": 1, "reflect": 1}
    assert learned is None  # mapped, nothing to learn


@pytest.mark.parametrize("max_iters", [1, 2, 3, 5])
def test_persistent_failure_stops_at_the_cap(max_iters):
    units = units_for("<LinearLayout><TextView/><TextView/></LinearLayout>", max_lines=5)
    (parent,) = [u for u in units if u.path == ()]
    # always drops the slots, so C2 can never pass
    gateway = Gateway(TemplateBackend({"generate": lambda req: "Column() {\n}"}))
    comp, report, learned = reflect_loop(parent, query_mapping(parent, SEED), gateway, max_iters)
    assert report.verdict == "fail" and [c.name for c in report.failed] == ["C2"]
    assert comp.attempts == max_iters and report.iteration == 1  # earliest of equally bad attempts
    assert gateway.calls == 2 * max_iters
    assert learned is None


def test_feedback_reaches_the_next_attempt():
    seen = []

    def generate(req):
        seen.append(list(req.payload["feedback"]))
        return "Column() {\n}"

    units = units_for("<LinearLayout><TextView/><TextView/></LinearLayout>", max_lines=5)
    (parent,) = [u for u in units if u.path == ()]
    reflect_loop(parent, query_mapping(parent, SEED), Gateway(TemplateBackend({"generate": generate})), 2)
    assert seen == [[], ["C2: expected 2 slots, found 0"]]


def test_badge_view_learns_on_second_iteration(tmp_path):
    attempts = []

    def flaky(req):
        attempts.append(1)
        return "Badge({ count: 1 }) {" if len(attempts) == 1 else render_generate(req)

    (unit,) = units_for('<com.example.BadgeView android:text="3" android:textColor="#FF0000"/>')
    knowledge = query_mapping(unit, SEED)
    assert not knowledge.resolved and knowledge.doc_hits[0][0].component_name == "Badge"
    gateway = Gateway(TemplateBackend({"generate": flaky}))
    comp, report, learned = reflect_loop(unit, knowledge, gateway)
    assert comp.mode == "inferred" and report.verdict == "pass" and report.iteration == 2 == comp.attempts
    assert gateway.calls == 4
    assert learned is not None and learned.provenance == "learned"
    assert learned.source_tag == "com.example.BadgeView"
    assert learned.target_component == root_component(comp.arkui_code) == "Badge"
    assert learned.target_example == comp.arkui_code


def test_bare_fallback_is_not_learned(gateway):
    (unit,) = units_for("<com.example.Nothing/>")
    comp, report, learned = reflect_loop(unit, query_mapping(unit, KnowledgeBase()), gateway)
    assert comp.mode == "inferred" and report.verdict == "pass" and learned is None


def test_zero_iterations_is_rejected(gateway):
    (unit,) = units_for("<TextView/>")
    with pytest.raises(ValueError):
        reflect_loop(unit, query_mapping(unit, SEED), gateway, 0)


def test_reports_dump_as_json_lines(tmp_path, gateway):
    reports = [reflect_loop(u, query_mapping(u, SEED), gateway)[1]
               for u in units_for("<LinearLayout><TextView/><Button/></LinearLayout>", 5)]
    dump_reports(reports, tmp_path / "r.jsonl")
    lines = (tmp_path / "r.jsonl").read_text().splitlines()
    assert [json.loads(line)["unit_id"] for line in lines] == [r.unit_id for r in reports]


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 4), st.booleans())
def test_fuzzed_units_terminate_within_budget(seed, max_iters, sabotage):
    rng = random.Random(seed)
    overrides = {"generate": lambda req: rng.choice(["", "Column() {", "Text('x')", render_generate(req)])} \
        if sabotage else {}
    for unit in units_for(random_layout(rng, 30), 10):
        gateway = Gateway(TemplateBackend(overrides))
        kb = SEED if rng.random() < 0.7 else KnowledgeBase()
        comp, report, learned = reflect_loop(unit, query_mapping(unit, kb), gateway, max_iters)
        assert gateway.calls <= 2 * max_iters and 1 <= comp.attempts <= max_iters
        assert report.iteration <= max_iters
        assert (report.verdict == "pass") == (not report.failed)
        if learned is not None:
            assert comp.mode == "inferred" and report.verdict == "pass"

import random
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from gen import random_layout
from uitrans.android_parser import PageRecord, ResourceIndex, parse_layout
from uitrans.android_parser.resources import index_values_xml
from uitrans.assembler.checker import unit_outline
from uitrans.generator import (
    SLOT_RE, TODO_MARK, attribute_total, emit_unit, generate_payload, map_resource_ref, root_component,
    strip_fences, translate_unit,
)
from uitrans.knowledge_base import KnowledgeBase, load_seed, query_mapping
from uitrans.llm_gateway import Gateway, TemplateBackend
from uitrans.task_planner import decompose, template_description

VALUES = Path(__file__).parent / "fixtures/values/values.xml"
SEED = load_seed()


@pytest.fixture(scope="module")
def resources():
    index = ResourceIndex()
    index_values_xml(VALUES.read_bytes(), index, VALUES.name)
    return index


def units_for(xml_or_tree, max_lines=40):
    root = parse_layout(xml_or_tree, "main") if isinstance(xml_or_tree, str) else xml_or_tree
    units = decompose(PageRecord("com.ex.A", xml_layouts=[("main", root)]), max_lines)
    for u in units:
        u.description = template_description(u)
    return units


def generate(unit, kb=SEED, resources=None):
    return translate_unit(unit, query_mapping(unit, kb), Gateway(TemplateBackend()), resources)


# -- golden ------------------------------------------------------------------

def test_text_view_golden(gateway):
    (unit,) = units_for('<TextView android:text="@string/hi" android:textSize="16sp"/>')
    comp = translate_unit(unit, query_mapping(unit, SEED), gateway)
    assert comp.arkui_code == "Text($r('app.string.hi'))\n  .fontSize(16)"
    assert comp.mode == "mapped" and comp.todo_count == 0
    assert comp.used_entry_ids and SEED.mappings[comp.used_entry_ids[0]].source_tag == "TextView"
    assert comp.component_name == f"TextView_{unit.unit_id[:6]}"


def test_zero_knowledge_fallback_keeps_every_attribute():
    (unit,) = units_for('<com.example.Weird android:foo="1" android:layout_width="match_parent"/>')
    comp = generate(unit, KnowledgeBase())
    assert comp.mode == "inferred"
    assert comp.arkui_code.startswith("Column() {")
    assert comp.arkui_code.count(TODO_MARK) == 2 == comp.attribute_total
    assert f"{TODO_MARK}android:foo" in comp.arkui_code


def test_container_with_two_children_gets_two_distinct_slots():
    units = units_for('<LinearLayout><include layout="@layout/a"/><include layout="@layout/b"/></LinearLayout>')
    (parent,) = [u for u in units if u.path == ()]
    assert len(parent.child_units) == 2
    slots = generate(parent).slots()
    assert slots == parent.child_units and len(set(slots)) == 2


def test_unit_components_are_valid_identifiers():
    for unit in units_for('<LinearLayout><com.ex.my-view/><include layout="@layout/x"/></LinearLayout>'):
        assert generate(unit).component_name.isidentifier()


# -- resource references -----------------------------------------------------

@pytest.mark.parametrize("raw,expected", [
    ("@string/hi", "$r('app.string.hi')"),
    ("@color/accent", "$r('app.color.accent')"),
    ("@dimen/pad", "8"),
    ("@dimen/line", "$r('app.float.line')"),
    ("16sp", "16"),
    ("12.5dp", "12.5"),
    ("#FF0000", "#FF0000"),
    ("hello", "hello"),
])
def test_map_resource_ref(raw, expected, resources):
    warnings = []
    assert map_resource_ref(raw, resources, warnings) == expected
    assert warnings == []


@pytest.mark.parametrize("raw", ["@string/nope", "@drawable/missing", "?attr/colorPrimary", "@android:color/white"])
def test_unknown_reference_passes_through_with_warning(raw, resources):
    warnings = []
    assert map_resource_ref(raw, resources, warnings) == raw
    assert len(warnings) == 1 and raw in warnings[0]


def test_resource_index_values_flow_into_the_code(resources):
    (unit,) = units_for('<TextView android:text="@string/hi" android:padding="@dimen/pad"/>')
    comp = generate(unit, resources=resources)
    assert "$r('app.string.hi')" in comp.arkui_code and ".padding(8)" in comp.arkui_code


# -- helpers -----------------------------------------------------------------

def test_strip_fences_and_root_component():
    assert strip_fences("prose\n```ts\nText('a')\n```\nmore") == "Text('a')"
    assert strip_fences("Text('a')") == "Text('a')"
    assert root_component("// note\n\nButton('x')\n  .width(3)") == "Button"
    assert root_component("// only a comment") is None


def test_remote_style_reply_is_unfenced():
    class Fenced:
        backend_id, deterministic = "fake", False

        def complete(self, req):
            from uitrans.llm_gateway import GenerationResponse
            return GenerationResponse("Here you go:\n```arkts\nText('x')\n```", "fake")

    (unit,) = units_for("<TextView/>")
    comp = translate_unit(unit, query_mapping(unit, SEED), Gateway(Fenced()))
    assert comp.arkui_code == "Text('x')"


# -- properties --------------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([8, 20, 40]), st.booleans())
def test_attribute_conservation_and_slot_bijection(seed, max_lines, empty_kb):
    kb = KnowledgeBase() if empty_kb else SEED
    for unit in units_for(random_layout(random.Random(seed), 60), max_lines):
        payload = generate_payload(unit, query_mapping(unit, kb))
        code, emitter = emit_unit(payload)
        total = attribute_total(unit)
        assert emitter.applied + len(emitter.todo_attrs) == total
        assert code.count(TODO_MARK) == len(emitter.todo_attrs)
        assert SLOT_RE.findall(code) == unit.child_units
        errors, _ = unit_outline(code)
        assert errors == []


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_template_mode_is_deterministic(seed):
    tree = random_layout(random.Random(seed), 40)
    first = [generate(u).arkui_code for u in units_for(tree)]
    again = [generate(u).arkui_code for u in units_for(tree)]
    assert first == again

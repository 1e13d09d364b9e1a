from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from builders import NS, write_android_project as write_project
from oracles import grep_counts
from uitrans.android_parser import (
    AndroidProject, InteractionKind, NodeKind, extract_interactions, parse_layout, parse_manifest,
    parse_project, serialize,
)
from uitrans.android_parser.java_scan import blank_comments_and_strings
from uitrans.errors import EmptyLayout, MalformedXml, ManifestNotFound, MissingPackage

FIXTURES = Path(__file__).parent / "fixtures"


# -- manifest ----------------------------------------------------------------

def test_relative_activity_name_is_prefixed_with_package():
    info = parse_manifest(f'<manifest {NS} package="com.ex"><application>'
                          '<activity android:name=".MainActivity"/></application></manifest>')
    assert [a.name for a in info.activities] == ["com.ex.MainActivity"]


def test_manifest_without_activities_warns_instead_of_failing():
    info = parse_manifest(f'<manifest {NS} package="com.ex"><application/></manifest>')
    assert info.activities == []
    assert len(info.warnings) == 1


def test_manifest_without_package_needs_namespace():
    text = f'<manifest {NS}><application><activity android:name=".A"/></application></manifest>'
    with pytest.raises(MissingPackage):
        parse_manifest(text)
    assert parse_manifest(text, namespace="org.x").activities[0].name == "org.x.A"


def test_malformed_manifest_reports_position():
    with pytest.raises(MalformedXml) as err:
        parse_manifest("<manifest>\n<application>\n</manifest>")
    assert err.value.line == 3


def test_grocery_manifest_has_13_activities_and_one_launcher(grocery_root):
    oracle = grep_counts(grocery_root)
    manifest = next(grocery_root.rglob("AndroidManifest.xml")).read_bytes()
    info = parse_manifest(manifest)
    assert len(info.activities) == oracle["activities"] == 13
    assert sum(a.is_launcher for a in info.activities) == oracle["launchers"] == 1


# -- layouts -----------------------------------------------------------------

def test_single_text_view_is_a_leaf_native_widget():
    node = parse_layout(f'<TextView {NS} android:text="@string/hi"/>', "one")
    assert node.children == [] and node.kind is NodeKind.NATIVE_WIDGET
    assert [k for k in node.attributes if not k.startswith("xmlns")] == ["android:text"]


def test_include_and_custom_kinds():
    inc = parse_layout('<include layout="@layout/toolbar"/>', "x")
    assert inc.kind is NodeKind.INCLUDE_REF and inc.attributes["layout"] == "@layout/toolbar"
    assert parse_layout("<com.example.BadgeView/>", "x").kind is NodeKind.CUSTOM


def test_source_spans_follow_the_input_lines():
    node = parse_layout(f'<LinearLayout {NS}>\n  <TextView\n    android:text="a"/>\n</LinearLayout>\n', "x")
    assert (node.source_span.start_line, node.source_span.end_line) == (1, 4)
    assert (node.children[0].source_span.start_line, node.children[0].source_span.end_line) == (2, 3)


def test_empty_and_broken_layouts():
    with pytest.raises(EmptyLayout):
        parse_layout("", "empty")
    with pytest.raises(MalformedXml) as err:
        parse_layout("<A>\n<B>\n</A>", "broken")
    assert err.value.line == 3


_names = st.sampled_from(["LinearLayout", "TextView", "Button", "com.ex.Custom", "include", "fragment"])
_attr_values = st.text(st.characters(blacklist_categories=("Cs", "Cc"), blacklist_characters="\x00"), max_size=12)
_attrs = st.dictionaries(st.sampled_from(["android:id", "android:text", "android:hint", "layout", "tools:x"]),
                         _attr_values, max_size=4)


@st.composite
def layout_xml(draw, depth=0):
    tag = draw(_names)
    attrs = draw(_attrs)
    children = draw(st.lists(layout_xml(depth + 1), max_size=3)) if depth < 3 else []
    from uitrans.android_parser import LayoutNode
    return LayoutNode(tag, attrs, children)


@settings(max_examples=150, deadline=None)
@given(layout_xml())
def test_serialize_then_parse_is_lossless(tree):
    again = parse_layout(serialize(tree), "t")
    assert again == tree
    assert serialize(again) == serialize(tree)


# -- Java scan ---------------------------------------------------------------

def test_direct_patterns():
    (fact,) = extract_interactions("setContentView(R.layout.activity_main);")
    assert (fact.kind, fact.subject_id) == (InteractionKind.CONTENT_VIEW, "activity_main")
    (fact,) = extract_interactions("startActivity(new Intent(this, DetailActivity.class));")
    assert (fact.kind, fact.subject_id) == (InteractionKind.NAVIGATION, "DetailActivity")


def test_hand_counted_java_fixture_yields_four_facts_in_order():
    text = (FIXTURES / "java/ProfileScreen.java").read_text()
    facts = extract_interactions(text)
    assert [(f.kind.value, f.subject_id) for f in facts] == [
        ("view_binding", "profile_name"),
        ("view_binding", "profile_email"),
        ("view_binding", "profile_avatar"),
        ("navigation", "SettingsActivity"),
    ]
    assert [f.variable for f in facts[:3]] == ["name", "email", "avatar"]


def test_listener_resolves_variable_and_links_navigation():
    code = """
        Button go = findViewById(R.id.go);
        go.setOnClickListener(v -> startActivity(new Intent(this, NextActivity.class)));
    """
    binding, listener, nav = extract_interactions(code)
    assert listener.subject_id == "go" and listener.event == "click"
    assert nav.trigger_view == "go"


def test_handler_method_links_navigation_to_method():
    code = "public void openNext(View v) { startActivity(new Intent(this, NextActivity.class)); }"
    (nav,) = extract_interactions(code)
    assert nav.trigger_method == "openNext"


def test_comments_and_strings_are_blanked_but_keep_length():
    text = 'a // x\n/* y\n z */ "s\\"t" b'
    blanked = blank_comments_and_strings(text)
    assert len(blanked) == len(text) and blanked.count("\n") == text.count("\n")
    assert "x" not in blanked and "y" not in blanked and "t" not in blanked


@settings(max_examples=300, deadline=None)
@given(st.binary(max_size=400))
def test_extract_interactions_is_total_and_details_are_verbatim(data):
    facts = extract_interactions(data)
    text = data.decode("utf-8", errors="replace")
    assert all(f.detail in text for f in facts)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.sampled_from([
    "findViewById(R.id.a)", "x = findViewById(R.id.b);", "b.setOnClickListener(", "new Intent(this, A.class)",
    "setContentView(R.layout.main);", "// c", "/* d */", '"e"', "(", ")", "{", "}", "\n", " ", ";",
]), max_size=30))
def test_token_soup_details_are_verbatim(parts):
    text = "".join(parts)
    assert all(f.detail in text for f in extract_interactions(text))


# -- projects ----------------------------------------------------------------

def test_empty_directory_has_no_manifest(tmp_path):
    with pytest.raises(ManifestNotFound):
        parse_project(tmp_path)


def test_mini_project_counts(mini_root):
    project = parse_project(mini_root)
    assert len(project.pages) == 2 and len(project.layouts) == 3
    main = project.pages["com.example.mini.MainActivity"]
    assert main.primary_layout == "activity_main"
    kinds = sorted((e.kind, e.target) for e in main.dependencies)
    assert ("include", "toolbar") in kinds
    assert ("navigation", "com.example.mini.DetailActivity") in kinds


def test_include_edge_and_unresolved_include(tmp_path):
    root = write_project(tmp_path, {"A": "setContentView(R.layout.a);"}, {
        "a": f'<LinearLayout {NS}><include layout="@layout/toolbar"/><include layout="@layout/missing"/></LinearLayout>',
        "toolbar": f"<TextView {NS}/>",
    })
    project = parse_project(root)
    page = project.pages["com.ex.A"]
    includes = [e for e in page.dependencies if e.kind == "include"]
    assert [(e.source, e.target) for e in includes] == [("com.ex.A", "toolbar")]
    assert [w.code for w in project.warnings] == ["UnresolvedInclude"]


def test_navigation_edge_to_manifest_activity(tmp_path):
    root = write_project(tmp_path, {
        "A": "setContentView(R.layout.a); startActivity(new Intent(this, B.class));",
        "B": "setContentView(R.layout.a);",
    }, {"a": f"<TextView {NS}/>"})
    page = parse_project(root).pages["com.ex.A"]
    assert [(e.target, e.kind) for e in page.dependencies if e.kind == "navigation"] == [("com.ex.B", "navigation")]


def test_orphan_layout_is_indexed_and_flagged(shop_root):
    project = parse_project(shop_root)
    assert "layout_promo_unused" in project.layouts
    assert project.orphan_layouts == ["layout_promo_unused"]


def test_fragment_becomes_subpage_via_inflate(shop_root):
    page = parse_project(shop_root).pages["com.example.shop.StoreInfoActivity"]
    (sub,) = page.subpages
    assert sub.activity_name == "com.example.shop.MapFragment"
    assert sub.primary_layout == "fragment_map"
    assert any(e.kind == "fragment" and e.target == "fragment_map" for e in page.dependencies)


@pytest.mark.parametrize("name", ["mini", "shop", "grocery"])
def test_counts_match_grep_oracle(name):
    root = FIXTURES / "projects" / name
    oracle = grep_counts(root)
    project = parse_project(root)
    assert len(project.manifest.activities) == oracle["activities"]
    assert len(project.layouts) == oracle["layouts"]
    assert sum(len(p.all_interactions()) for p in project.pages.values()) == oracle["facts"]


@pytest.mark.parametrize("name", ["mini", "shop", "grocery"])
def test_parse_twice_and_dump_round_trip(name, tmp_path):
    root = FIXTURES / "projects" / name
    first, second = parse_project(root), parse_project(root)
    assert first.to_dict() == second.to_dict()
    first.dump_pages(tmp_path / "p.json")
    loaded = AndroidProject.load_pages(tmp_path / "p.json")
    assert loaded.to_dict() == first.to_dict()


def test_kotlin_sources_are_counted_and_ignored(tmp_path):
    root = write_project(tmp_path, {"A": "setContentView(R.layout.a);"}, {"a": f"<TextView {NS}/>"})
    (root / "src/com/ex/B.kt").write_text("class B")
    project = parse_project(root)
    assert any(w.code == "IgnoredSources" and w.message.startswith("1 ") for w in project.warnings)

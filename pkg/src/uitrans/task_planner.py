"""Recursive decomposition of page layouts into translation units, and plan ordering."""

from __future__ import annotations

import hashlib
import heapq
import json
import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .android_parser import (
    AndroidProject,
    InteractionFact,
    InteractionKind,
    LayoutNode,
    NodeKind,
    PageRecord,
    SourceSpan,
    line_count,
    serialize,
)
from .errors import BackendError, CyclicInclude

log = logging.getLogger(__name__)

DEFAULT_MAX_UNIT_LINES = 40
STANDALONE_KINDS = (NodeKind.CUSTOM, NodeKind.INCLUDE_REF, NodeKind.FRAGMENT)

SALIENT_ATTRIBUTES = (
    "android:id", "android:text", "android:hint", "android:src", "android:contentDescription",
    "android:onClick", "android:orientation", "android:inputType", "android:checked",
    "android:entries", "android:max", "android:progress", "layout", "android:name",
)

_PURPOSE = {
    "TextView": "displays a text label",
    "Button": "a pressable button",
    "ImageView": "displays an image",
    "ImageButton": "a pressable image",
    "EditText": "accepts text input from the user",
    "CheckBox": "a checkable option",
    "Switch": "an on/off switch",
    "RadioButton": "one choice in a radio group",
    "ProgressBar": "shows progress",
    "SeekBar": "a draggable value slider",
    "RatingBar": "a star rating",
    "Spinner": "a drop-down selector",
    "ListView": "a scrolling list of items",
    "GridView": "a grid of items",
    "ScrollView": "a vertically scrolling area",
    "include": "reuses another layout file",
    "fragment": "hosts a fragment subpage",
}

EVENT_BY_ATTRIBUTE = {"android:onClick": "click"}


@dataclass
class FunctionalDescription:
    component_kind: str
    purpose: str
    child_summary: list[tuple[str, int]] = field(default_factory=list)
    salient_attributes: list[tuple[str, str]] = field(default_factory=list)
    events: list[str] = field(default_factory=list)

    @property
    def child_total(self) -> int:
        return sum(n for _, n in self.child_summary)

    def to_text(self) -> str:
        lines = [f"component: {self.component_kind}", f"purpose: {self.purpose}"]
        if self.child_summary:
            lines.append("children: " + ", ".join(f"{t} x{n}" for t, n in self.child_summary))
        if self.salient_attributes:
            lines.append("attributes: " + ", ".join(f"{k}={v}" for k, v in self.salient_attributes))
        if self.events:
            lines.append("events: " + ", ".join(self.events))
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {
            "component_kind": self.component_kind,
            "purpose": self.purpose,
            "child_summary": [list(x) for x in self.child_summary],
            "salient_attributes": [list(x) for x in self.salient_attributes],
            "events": list(self.events),
        }

    @classmethod
    def from_dict(cls, d: dict) -> FunctionalDescription:
        return cls(d["component_kind"], d["purpose"],
                   [tuple(x) for x in d.get("child_summary", [])],
                   [tuple(x) for x in d.get("salient_attributes", [])],
                   list(d.get("events", [])))


@dataclass(eq=False)
class TranslationUnit:
    unit_id: str
    page_id: str
    layout_name: str
    path: tuple[int, ...]
    root: LayoutNode          # detached copy of the nodes this unit owns
    source_node: LayoutNode   # the full original subtree
    depth: int
    rule: str                 # R1 | R2 | R3
    parent_unit: str | None = None
    child_units: list[str] = field(default_factory=list)
    depends_on: list[str] = field(default_factory=list)  # included-layout root units
    include_layout: str | None = None                    # include/fragment target layout
    description: FunctionalDescription | None = None
    related_interactions: list[InteractionFact] = field(default_factory=list)

    @property
    def tag(self) -> str:
        return self.root.tag

    @property
    def kind(self) -> NodeKind:
        return self.root.kind

    @property
    def span(self) -> SourceSpan | None:
        return self.root.source_span

    @property
    def is_container(self) -> bool:
        return bool(self.child_units)

    def sort_key(self) -> tuple:
        span = self.span
        if span is None:
            return ("", 0, 0, self.path)
        return (span.file, span.start_line, span.end_line, self.path)

    def owned_nodes(self) -> list[LayoutNode]:
        return list(self.root.walk())

    def to_dict(self) -> dict:
        return {
            "unit_id": self.unit_id,
            "page_id": self.page_id,
            "layout": self.layout_name,
            "path": list(self.path),
            "span": self.span.to_dict() if self.span else None,
            "kind": self.kind.value,
            "tag": self.tag,
            "rule": self.rule,
            "depth": self.depth,
            "parent_unit": self.parent_unit,
            "child_units": list(self.child_units),
            "depends_on": list(self.depends_on),
            "include_layout": self.include_layout,
            "description": self.description.to_dict() if self.description else None,
        }


def make_unit_id(page_id: str, layout_name: str, span: SourceSpan | None, path: tuple[int, ...]) -> str:
    span_key = f"{span.file}:{span.start_line}-{span.end_line}" if span else ""
    key = f"{page_id}|{layout_name}|{span_key}|{'.'.join(map(str, path))}"
    return hashlib.sha1(key.encode("utf-8")).hexdigest()[:12]


def decompose_layout(root: LayoutNode, page_id: str, layout_name: str,
                     max_unit_lines: int = DEFAULT_MAX_UNIT_LINES) -> list[TranslationUnit]:
    """Split one layout tree into units, parents before children.

    R1: custom, include and fragment nodes always get a unit of their own.
    R2: a subtree that fits in ``max_unit_lines`` and holds no R1 node is one unit.
    R3: anything else becomes a container unit; its children are split in turn.
    """
    if max_unit_lines < 1:
        raise ValueError("max_unit_lines must be >= 1")
    units: list[TranslationUnit] = []

    def split(node: LayoutNode, path: tuple[int, ...], parent: str | None, depth: int) -> str:
        uid = make_unit_id(page_id, layout_name, node.source_span, path)
        if node.kind in STANDALONE_KINDS:
            rule, whole = "R1", not node.children
        elif (not any(n.kind in STANDALONE_KINDS for n in node.walk())
              and line_count(node) <= max_unit_lines):
            rule, whole = "R2", True
        else:
            rule, whole = "R3", not node.children
        unit = TranslationUnit(uid, page_id, layout_name, path,
                               node.copy() if whole else node.shell(), node, depth, rule, parent)
        units.append(unit)
        if not whole:
            for i, child in enumerate(node.children):
                unit.child_units.append(split(child, path + (i,), uid, depth + 1))
        return uid

    split(root, (), None, 0)
    return units


def decompose(page: PageRecord, max_unit_lines: int = DEFAULT_MAX_UNIT_LINES) -> list[TranslationUnit]:
    """Decompose every layout of a page; include/fragment units depend on the target layout's root unit."""
    units: list[TranslationUnit] = []
    roots: dict[str, str] = {}
    for name, node in page.xml_layouts:
        layout_units = decompose_layout(node, page.page_id, name, max_unit_lines)
        roots[name] = layout_units[0].unit_id
        units.extend(layout_units)
    # fragment targets may come from Java inflate() calls, so prefer the resolved edges
    targets = {(e.origin, e.span): e.target for e in page.dependencies
               if e.kind in ("include", "fragment") and e.span is not None}
    for unit in units:
        if unit.kind not in (NodeKind.INCLUDE_REF, NodeKind.FRAGMENT):
            continue
        target = targets.get((unit.layout_name, unit.span)) or include_target(unit.root)
        if target in roots:
            unit.include_layout = target
            unit.depends_on.append(roots[target])
    return units


def include_target(node: LayoutNode) -> str | None:
    """Layout name referenced by an include or fragment node."""
    if node.kind is NodeKind.INCLUDE_REF:
        ref = node.attributes.get("layout", "")
    elif node.kind is NodeKind.FRAGMENT:
        ref = node.attributes.get("tools:layout", "")
    else:
        return None
    return ref.split("/", 1)[1] if ref.startswith("@layout/") else None


# -- descriptions ------------------------------------------------------------

def related_interactions(unit: TranslationUnit, page: PageRecord) -> list[InteractionFact]:
    ids = {n.view_id for n in unit.owned_nodes() if n.view_id}
    methods = {n.attributes["android:onClick"] for n in unit.owned_nodes() if "android:onClick" in n.attributes}
    related = []
    for fact in page.all_interactions():
        if fact.kind in (InteractionKind.VIEW_BINDING, InteractionKind.LISTENER) and fact.subject_id in ids:
            related.append(fact)
        elif fact.kind is InteractionKind.NAVIGATION and (
                fact.trigger_view in ids or (fact.trigger_view is None and fact.trigger_method in methods)):
            related.append(fact)
    return related


def derivable_events(unit: TranslationUnit) -> list[str]:
    events: list[str] = []
    for node in unit.owned_nodes():
        for attr, event in EVENT_BY_ATTRIBUTE.items():
            if attr in node.attributes and event not in events:
                events.append(event)
    for fact in unit.related_interactions:
        if fact.kind is InteractionKind.LISTENER and fact.event and fact.event not in events:
            events.append(fact.event)
    return events


def child_summary(node: LayoutNode) -> list[tuple[str, int]]:
    counts = Counter(c.tag for c in node.children)
    order = list(dict.fromkeys(c.tag for c in node.children))
    return [(tag, counts[tag]) for tag in order]


def template_description(unit: TranslationUnit) -> FunctionalDescription:
    node = unit.source_node
    summary = child_summary(node)
    short = node.tag.rsplit(".", 1)[-1]
    if node.kind is NodeKind.CUSTOM:
        purpose = f"custom view {short}"
    else:
        purpose = _PURPOSE.get(node.tag, "")
    if not purpose:
        orientation = node.attributes.get("android:orientation", "")
        purpose = f"arranges its children {orientation}".strip() if node.children else f"{short} widget"
    if summary:
        purpose += " holding " + ", ".join(f"{n} {t}" for t, n in summary)
    salient = [(k, v) for k, v in node.attributes.items() if k in SALIENT_ATTRIBUTES]
    return FunctionalDescription(node.tag, purpose, summary, salient, derivable_events(unit))


def describe_unit(unit: TranslationUnit, page: PageRecord, gateway=None) -> FunctionalDescription:
    """Describe a unit: template mode by default, LLM mode when the gateway is non-deterministic.

    Backend output is never trusted for child counts or events; both are
    recomputed or filtered locally.
    """
    unit.related_interactions = related_interactions(unit, page)
    local = template_description(unit)
    if gateway is None or gateway.deterministic:
        return local
    from .llm_gateway import build_request

    payload = {
        "unit_xml": serialize(unit.root),
        "breakdown_context": f"page {page.page_id}, layout {unit.layout_name}, rule {unit.rule}",
        "events": local.events,
    }
    try:
        response = gateway.complete(build_request("describe", payload))
        data = json.loads(_strip_fences(response.text))
    except BackendError as exc:
        log.warning("describe fell back to template mode for %s: %s", unit.unit_id, exc)
        return local
    except (ValueError, TypeError):
        log.warning("describe response for %s is not JSON; using template description", unit.unit_id)
        return local
    if not isinstance(data, dict):
        return local
    claimed = data.get("child_summary")
    if claimed is not None and [tuple(x) for x in claimed] != local.child_summary:
        log.warning("backend child_summary for %s disagrees with the layout; recomputed", unit.unit_id)
    events = [e for e in data.get("events", []) if e in local.events] or local.events
    return FunctionalDescription(
        component_kind=unit.tag,
        purpose=str(data.get("purpose") or local.purpose),
        child_summary=local.child_summary,
        salient_attributes=local.salient_attributes,
        events=events,
    )


def _strip_fences(text: str) -> str:
    text = text.strip()
    if text.startswith("```"):
        text = text.split("\n", 1)[1] if "\n" in text else ""
        text = text.rsplit("```", 1)[0]
    return text


# -- planning ----------------------------------------------------------------

@dataclass
class TranslationPlan:
    units: list[TranslationUnit]
    page_units: dict[str, list[TranslationUnit]]

    def __len__(self) -> int:
        return len(self.units)

    def by_id(self) -> dict[str, TranslationUnit]:
        return {u.unit_id: u for u in self.units}

    def to_json(self) -> str:
        return json.dumps([u.to_dict() for u in self.units], indent=2, ensure_ascii=False) + "\n"

    def dump(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")


def check_include_cycles(page: PageRecord) -> None:
    graph: dict[str, list[str]] = {}
    for edge in page.dependencies:
        if edge.kind in ("include", "fragment") and edge.origin:
            graph.setdefault(edge.origin, []).append(edge.target)
    state: dict[str, int] = {}
    stack: list[str] = []

    def visit(n: str) -> None:
        state[n] = 1
        stack.append(n)
        for m in graph.get(n, []):
            if state.get(m) == 1:
                raise CyclicInclude(stack[stack.index(m):] + [m])
            if m not in state:
                visit(m)
        stack.pop()
        state[n] = 2

    for n in sorted(graph):
        if n not in state:
            visit(n)


def order_units(units: list[TranslationUnit]) -> list[TranslationUnit]:
    """Topological order: children before parents, included layouts before includers."""
    by_id = {u.unit_id: u for u in units}
    # edge a -> b means a must precede b
    succ: dict[str, list[str]] = {u.unit_id: [] for u in units}
    indeg = {u.unit_id: 0 for u in units}
    for u in units:
        for pre in u.child_units + u.depends_on:
            if pre in by_id:
                succ[pre].append(u.unit_id)
                indeg[u.unit_id] += 1
    heap = [(by_id[uid].sort_key(), uid) for uid, d in indeg.items() if d == 0]
    heapq.heapify(heap)
    ordered = []
    while heap:
        _, uid = heapq.heappop(heap)
        ordered.append(by_id[uid])
        for nxt in succ[uid]:
            indeg[nxt] -= 1
            if indeg[nxt] == 0:
                heapq.heappush(heap, (by_id[nxt].sort_key(), nxt))
    if len(ordered) != len(units):
        stuck = sorted({by_id[uid].layout_name for uid, d in indeg.items() if d > 0})
        raise CyclicInclude(stuck + stuck[:1])
    return ordered


def plan(project: AndroidProject, max_unit_lines: int = DEFAULT_MAX_UNIT_LINES, gateway=None) -> TranslationPlan:
    page_units: dict[str, list[TranslationUnit]] = {}
    ordered: list[TranslationUnit] = []
    for page in project.pages.values():
        if not page.xml_layouts:
            page_units[page.page_id] = []
            continue
        check_include_cycles(page)
        units = decompose(page, max_unit_lines)
        for unit in units:
            unit.description = describe_unit(unit, page, gateway)
        units = order_units(units)
        page_units[page.page_id] = units
        ordered.extend(units)
    return TranslationPlan(ordered, page_units)


def reassemble(units: list[TranslationUnit], root_id: str) -> LayoutNode:
    """Rebuild a layout tree from its unit tree (inverse of decompose_layout)."""
    by_id = {u.unit_id: u for u in units}
    unit = by_id[root_id]
    node = unit.root.copy()
    if unit.child_units:
        node.children = [reassemble(units, c) for c in unit.child_units]
    return node

"""ArkUI code generation for a single translation unit.

Template mode walks the unit's XML and applies the attribute map of the
best mapping entry. Remote mode hands the rendered prompt to the backend and
takes its reply verbatim. Either way child units are left as slot
placeholders for the assembler.
"""

from __future__ import annotations

import hashlib
import logging
import re
from dataclasses import dataclass, field

from .android_parser import InteractionFact, InteractionKind, LayoutNode, NodeKind, ResourceIndex, serialize
from .android_parser.resources import DIMENSION, HEX_COLOR
from .knowledge_base import AttributeRule, DocEntry, DomainKnowledge, MappingEntry
from .llm_gateway import GenerationRequest, build_request, register_renderer
from .naming import component_name, layout_struct_name
from .task_planner import TranslationUnit, template_description

log = logging.getLogger(__name__)

SLOT = "/*__SLOT:{}__*/"
NAV = "/*__NAV:{}__*/"
SLOT_RE = re.compile(r"/\*__SLOT:([\w-]+)__\*/")
NAV_RE = re.compile(r"/\*__NAV:([\w.$]+)__\*/")
TODO_MARK = "// TODO(unmapped): "
IGNORED_MARK = "// ignored: "
IGNORED_PREFIXES = ("xmlns:", "tools:")
INDENT = "  "

CONTAINER_TARGETS = frozenset({
    "Column", "Row", "Stack", "Flex", "RelativeContainer", "Scroll", "List", "ListItem",
    "Grid", "GridItem", "Swiper", "Tabs", "TabContent", "Navigation", "Badge", "Refresh",
})

# event name -> (handler opener, closer); bodies go between
EVENT_HANDLERS = {
    "click": (".onClick(() => {", "})"),
    "item_click": (".onClick(() => {", "})"),
    "long_click": (".gesture(LongPressGesture().onAction(() => {", "}))"),
    "checked_change": (".onChange((value: boolean) => {", "})"),
    "touch": (".onTouch((event: TouchEvent) => {", "})"),
    "focus_change": (".onFocus(() => {", "})"),
}
EVENT_PATTERNS = {
    "click": re.compile(r"\.onClick\("),
    "item_click": re.compile(r"\.onClick\("),
    "long_click": re.compile(r"\.gesture\(\s*LongPressGesture"),
    "checked_change": re.compile(r"\.onChange\("),
    "touch": re.compile(r"\.onTouch\("),
    "focus_change": re.compile(r"\.onFocus\("),
}

ENUMS: dict[str, dict[str, str]] = {
    "visibility": {"visible": "Visibility.Visible", "invisible": "Visibility.Hidden", "gone": "Visibility.None"},
    "font_weight": {"normal": "FontWeight.Normal", "bold": "FontWeight.Bold", "bold|italic": "FontWeight.Bold"},
    "text_align": {"center": "TextAlign.Center", "center_horizontal": "TextAlign.Center",
                   "start": "TextAlign.Start", "left": "TextAlign.Start",
                   "end": "TextAlign.End", "right": "TextAlign.End"},
    "image_fit": {"centerCrop": "ImageFit.Cover", "fitCenter": "ImageFit.Contain",
                  "centerInside": "ImageFit.Contain", "fitXY": "ImageFit.Fill", "center": "ImageFit.None",
                  "fitStart": "ImageFit.Contain", "fitEnd": "ImageFit.Contain"},
    "input_type": {"text": "InputType.Normal", "textPassword": "InputType.Password",
                   "numberPassword": "InputType.Password", "number": "InputType.Number",
                   "phone": "InputType.PhoneNumber", "textEmailAddress": "InputType.Email"},
    "ellipsize": {"end": "{ overflow: TextOverflow.Ellipsis }", "marquee": "{ overflow: TextOverflow.Marquee }"},
    "scrollbars": {"none": "BarState.Off", "vertical": "BarState.Auto", "horizontal": "BarState.Auto"},
}

_REF = re.compile(r"^@\+?([a-z]+)/([A-Za-z_][\w.]*)$")


@dataclass
class GeneratedComponent:
    unit_id: str
    arkui_code: str
    component_name: str
    used_entry_ids: list[str] = field(default_factory=list)
    mode: str = "mapped"            # mapped | inferred
    attempts: int = 1
    attribute_total: int = 0        # translatable attributes in the unit (excludes ignored ones)
    root_rules: list[AttributeRule] = field(default_factory=list)  # rules applied to the root node
    warnings: list[str] = field(default_factory=list)

    @property
    def todo_count(self) -> int:
        return self.arkui_code.count(TODO_MARK)

    def slots(self) -> list[str]:
        return SLOT_RE.findall(self.arkui_code)

    def to_dict(self) -> dict:
        return {"unit_id": self.unit_id, "component_name": self.component_name, "mode": self.mode,
                "attempts": self.attempts, "used_entry_ids": list(self.used_entry_ids),
                "attribute_total": self.attribute_total, "arkui_code": self.arkui_code}


# -- values ------------------------------------------------------------------

def _num(text: str) -> str:
    v = float(text)
    return str(int(v)) if v.is_integer() else repr(v)


def ts_string(text: str) -> str:
    escaped = text.replace("\\", "\\\\").replace("'", "\\'").replace("\n", "\\n")
    return f"'{escaped}'"


def map_resource_ref(raw: str, resources: ResourceIndex | None = None,
                     warnings: list[str] | None = None) -> str:
    """Translate an Android resource reference or literal to an ArkUI expression.

    With a ResourceIndex, references missing from it pass through unchanged
    with a warning; dp/sp dimensions resolve to their number.

    >>> map_resource_ref("@string/hi")
    "$r('app.string.hi')"
    >>> map_resource_ref("16sp")
    '16'
    """
    if raw.startswith(("@", "?")):
        m = _REF.match(raw)
        if m:
            kind, name = m.groups()
            if kind == "string" and (resources is None or name in resources.strings):
                return f"$r('app.string.{name}')"
            if kind == "color" and (resources is None or name in resources.colors):
                return f"$r('app.color.{name}')"
            if kind == "dimen":
                if resources is None:
                    return f"$r('app.float.{name}')"
                if name in resources.dimens:
                    d = DIMENSION.match(resources.dimens[name])
                    if d and d.group(2) in (None, "dp", "dip", "sp"):
                        return _num(d.group(1))
                    return f"$r('app.float.{name}')"
            if kind in ("drawable", "mipmap") and (resources is None or name in resources.drawables):
                return f"$r('app.media.{name}')"
        msg = f"unresolved resource reference {raw!r}; passed through"
        log.warning(msg)
        if warnings is not None:
            warnings.append(msg)
        return raw
    d = DIMENSION.match(raw)
    if d and d.group(2) in ("dp", "dip", "sp"):
        return _num(d.group(1))
    return raw


def _length(value: str, resources, warnings) -> str | None:
    out = map_resource_ref(value, resources, warnings)
    if out.startswith("$r("):
        return out
    d = DIMENSION.match(out)
    if d is None:
        return None
    if d.group(2) is None:
        return _num(d.group(1))
    if d.group(2) == "px":
        return ts_string(f"{_num(d.group(1))}px")
    return None


def _color(value: str, resources, warnings) -> str | None:
    if HEX_COLOR.match(value):
        digits = value[1:]
        if len(digits) in (3, 4):
            digits = "".join(c * 2 for c in digits)
        return ts_string("#" + digits.upper())
    out = map_resource_ref(value, resources, warnings)
    return out if out.startswith("$r(") else None


def _value_expr(transform: str, value: str, resources, warnings) -> str | None:
    if transform == "identity":
        return ts_string(value)
    if transform == "strip_unit":
        return _length(value, resources, warnings)
    if transform == "size":
        if value in ("match_parent", "fill_parent"):
            return ts_string("100%")
        return _length(value, resources, warnings)
    if transform == "color_hex":
        return _color(value, resources, warnings)
    if transform == "resource_ref":
        if not value.startswith(("@", "?")):
            return ts_string(value)
        out = map_resource_ref(value, resources, warnings)
        return out if out != value else None
    if transform == "number":
        try:
            return _num(value)
        except ValueError:
            return None
    if transform == "bool":
        return value if value in ("true", "false") else None
    if transform == "view_id":
        m = _REF.match(value)
        return ts_string(m.group(2)) if m and m.group(1) == "id" else None
    if transform == "enum:columns":
        return ts_string(" ".join(["1fr"] * int(value))) if value.isdigit() and int(value) > 0 else None
    if transform.startswith("enum:"):
        return ENUMS.get(transform[5:], {}).get(value)
    return None


# -- emission ------------------------------------------------------------------

@dataclass
class _NodeOut:
    """Accumulates one node's constructor args and chain calls in attribute order."""

    positional: str | None = None
    keyed: dict[str, str] = field(default_factory=dict)
    chain: list[list] = field(default_factory=list)   # ["call", method, expr] | ["edge", method, {side: expr}]
    events: dict[str, list[str]] = field(default_factory=dict)
    todos: list[str] = field(default_factory=list)
    ignored: list[str] = field(default_factory=list)
    applied: list[AttributeRule] = field(default_factory=list)

    def edge(self, method: str, side: str, expr: str) -> None:
        group = next((c for c in self.chain if c[0] == "edge" and c[1] == method), None)
        if group is None:
            group = ["edge", method, {}]
            self.chain.append(group)
        sides = group[2]
        if side == "all":
            sides["all"] = expr
        else:
            sides[side] = expr


_SIDES = ("top", "right", "bottom", "left")


def _format_edge(sides: dict[str, str]) -> str:
    if set(sides) == {"all"}:
        return sides["all"]
    base = sides.get("all")
    parts = [f"{s}: {sides.get(s, base)}" for s in _SIDES if s in sides or base is not None]
    return "{ " + ", ".join(parts) + " }"


@dataclass
class _Choice:
    target: str
    entry: MappingEntry | None
    rules: dict[str, AttributeRule]
    args: str | None = None     # literal constructor args (inferred from documentation)


def _first_call_args(example: str, name: str) -> tuple[str | None, bool]:
    """Constructor args of the first ``name(...)`` call in ``example`` and whether it has a body."""
    start = example.find(name + "(")
    if start < 0:
        return None, False
    i = start + len(name) + 1
    depth = 1
    while i < len(example) and depth:
        depth += {"(": 1, ")": -1}.get(example[i], 0)
        i += 1
    args = example[start + len(name) + 1:i - 1]
    rest = example[i:].lstrip(" ")
    return args, rest.startswith("{")


class _Emitter:
    def __init__(self, knowledge: DomainKnowledge, resources: ResourceIndex | None,
                 facts: list[InteractionFact], include_struct: str | None):
        self.knowledge = knowledge
        self.resources = resources
        self.facts = facts
        self.include_struct = include_struct
        self.warnings: list[str] = []
        self.used: list[str] = []
        self.root_rules: list[AttributeRule] = []
        # per-attribute accounting across the whole unit: applied + todo == translatable total
        self.applied = 0
        self.todo_attrs: list[str] = []

    # entry choice
    def choose(self, node: LayoutNode, is_root: bool, has_slots: bool) -> _Choice:
        if is_root:
            hits = [e for e, _ in self.knowledge.mapping_hits if e.source_tag == node.tag]
        else:
            hits = list(self.knowledge.nested.get(node.tag, []))
        entry = next((e for e in hits if e.matches(node.attributes)), hits[0] if hits else None)
        if entry is not None:
            if entry.entry_id not in self.used:
                self.used.append(entry.entry_id)
            target = entry.target_component
            if target == "CustomComponent":
                target = self.include_struct or "Column"
            return _Choice(target, entry, {r.android_attr: r for r in entry.attribute_map})
        if is_root and self.knowledge.doc_hits:
            doc: DocEntry = self.knowledge.doc_hits[0][0]
            args, has_body = _first_call_args(doc.usage_example, doc.component_name)
            target = doc.component_name
            if (node.children or has_slots) and not (has_body or target in CONTAINER_TARGETS):
                target, args = "Column", ""
            if args and ("$r(" in args or "this." in args):
                args = ""
            return _Choice(target, None, {r.android_attr: r for r in self.knowledge.lexicon}, args or "")
        if is_root and self.knowledge.lexicon:
            # no documentation either: a plain container still gets the common chain attributes
            return _Choice("Column", None, {r.android_attr: r for r in self.knowledge.lexicon}, "")
        return _Choice("Column", None, {})

    def node_lines(self, node: LayoutNode, indent: str, slots: list[str] | None, is_root: bool) -> list[str]:
        choice = self.choose(node, is_root, bool(slots))
        out = _NodeOut()
        for attr, value in node.attributes.items():
            rule = choice.rules.get(attr)
            if rule is None:
                (out.ignored if attr.startswith(IGNORED_PREFIXES) else out.todos).append(attr)
                continue
            if not self.apply(rule, value, out):
                out.todos.append(attr)
            else:
                out.applied.append(rule)
        if is_root:
            self.root_rules = out.applied
        self.applied += len(out.applied)
        self.todo_attrs += out.todos
        self.listener_events(node, out)
        if choice.entry is not None:
            for key, expr in choice.entry.default_args.items():
                if key == "@arg" and out.positional is None:
                    out.positional = expr
                elif key.startswith("@arg.") and key[5:] not in out.keyed:
                    out.keyed[key[5:]] = expr
                elif key.startswith(".") and not any(c[1] == key[1:] for c in out.chain):
                    out.chain.append(["call", key[1:], expr])

        if choice.args is not None and out.positional is None and not out.keyed:
            args = choice.args
        else:
            parts = [out.positional] if out.positional is not None else []
            if out.keyed:
                parts.append("{ " + ", ".join(f"{k}: {v}" for k, v in out.keyed.items()) + " }")
            args = ", ".join(parts)

        if choice.entry is None and not choice.rules:
            # no knowledge at all: wrapper that keeps every attribute visible
            lines = [f"{indent}Column() {{"]
            lines += [f"{indent}{INDENT}{TODO_MARK}{a}" for a in out.todos]
            lines += [f"{indent}{INDENT}{IGNORED_MARK}{a}" for a in out.ignored]
            lines += self.children_lines(node, indent + INDENT, slots)
            lines.append(f"{indent}}}")
            lines += self.chain_lines(out, indent)
            return lines

        has_body = bool(node.children or slots) or choice.target in CONTAINER_TARGETS \
            or node.kind is NodeKind.CONTAINER
        if has_body:
            lines = [f"{indent}{choice.target}({args}) {{"]
            lines += self.children_lines(node, indent + INDENT, slots)
            lines.append(f"{indent}}}")
            chain_indent = indent
        else:
            lines = [f"{indent}{choice.target}({args})"]
            chain_indent = indent + INDENT
        lines += self.chain_lines(out, chain_indent)
        lines += [f"{chain_indent}{TODO_MARK}{a}" for a in out.todos]
        lines += [f"{chain_indent}{IGNORED_MARK}{a}" for a in out.ignored]
        return lines

    def children_lines(self, node: LayoutNode, indent: str, slots: list[str] | None) -> list[str]:
        if slots:
            return [indent + SLOT.format(s) for s in slots]
        lines: list[str] = []
        for child in node.children:
            lines += self.node_lines(child, indent, None, False)
        return lines

    def apply(self, rule: AttributeRule, value: str, out: _NodeOut) -> bool:
        t = rule.transform
        if t == "consumed":
            return True
        if t.startswith("event:"):
            body = out.events.setdefault(t[6:], [])
            body.append(f"// handler: {value}")
            body += [NAV.format(f.subject_id) for f in self.facts
                     if f.kind is InteractionKind.NAVIGATION and f.trigger_view is None
                     and f.trigger_method == value]
            return True
        if t.startswith("edge:"):
            expr = _length(value, self.resources, self.warnings)
            if expr is None:
                return False
            out.edge(rule.arkui, t[5:], expr)
            return True
        if t == "background":
            if value.startswith(("@drawable/", "@mipmap/")):
                expr = map_resource_ref(value, self.resources, self.warnings)
                if not expr.startswith("$r("):
                    return False
                out.chain.append(["call", "backgroundImage", expr])
                return True
            expr = _color(value, self.resources, self.warnings)
            if expr is None:
                return False
            out.chain.append(["call", rule.arkui, expr])
            return True
        if t == "size" and value == "wrap_content":
            return True  # content-sized is the ArkUI default
        expr = _value_expr(t, value, self.resources, self.warnings)
        if expr is None:
            return False
        if rule.arkui == "@arg":
            out.positional = expr
        elif rule.arkui.startswith("@arg."):
            out.keyed[rule.arkui[5:]] = expr
        elif rule.arkui in ("padding", "margin") and t == "strip_unit":
            out.edge(rule.arkui, "all", expr)
        else:
            out.chain.append(["call", rule.arkui, expr])
        return True

    def listener_events(self, node: LayoutNode, out: _NodeOut) -> None:
        vid = node.view_id
        if not vid:
            return
        for fact in self.facts:
            if fact.kind is InteractionKind.LISTENER and fact.subject_id == vid and fact.event:
                body = out.events.setdefault(fact.event, [])
                body.append(f"// listener: {fact.variable or vid}")
        navs = [f for f in self.facts if f.kind is InteractionKind.NAVIGATION and f.trigger_view == vid]
        if navs:
            event = next((e for e in out.events if e in EVENT_HANDLERS), "click")
            body = out.events.setdefault(event, [])
            for f in navs:
                marker = NAV.format(f.subject_id)
                if marker not in body:
                    body.append(marker)

    def chain_lines(self, out: _NodeOut, indent: str) -> list[str]:
        lines = []
        for item in out.chain:
            if item[0] == "call":
                lines.append(f"{indent}.{item[1]}({item[2]})")
            else:
                lines.append(f"{indent}.{item[1]}({_format_edge(item[2])})")
        for event, body in out.events.items():
            handler = EVENT_HANDLERS.get(event)
            if handler is None:
                lines.append(f"{indent}// TODO(event): {event}")
                continue
            lines.append(indent + handler[0])
            lines += [indent + INDENT + b for b in body]
            lines.append(indent + handler[1])
        return lines


def _filter_resources(node: LayoutNode, resources: ResourceIndex | None) -> dict | None:
    if resources is None:
        return None
    used = {"strings": {}, "colors": {}, "dimens": {}, "drawables": {}}
    table = {"string": "strings", "color": "colors", "dimen": "dimens", "drawable": "drawables", "mipmap": "drawables"}
    for n in node.walk():
        for value in n.attributes.values():
            m = _REF.match(value)
            if m and m.group(1) in table:
                ns = table[m.group(1)]
                src = getattr(resources, ns)
                if m.group(2) in src:
                    used[ns][m.group(2)] = src[m.group(2)]
    return {ns: dict(sorted(v.items())) for ns, v in used.items()} | {"warnings": []}


def emit_unit(payload: dict) -> tuple[str, _Emitter]:
    """Template-mode code for a generate payload (pure function of the payload)."""
    root = LayoutNode.from_dict(payload["tree"])
    knowledge = DomainKnowledge.from_dict(payload["knowledge_data"])
    resources = ResourceIndex.from_dict(payload["resources"]) if payload.get("resources") is not None else None
    facts = [InteractionFact.from_dict(f) for f in payload.get("facts", [])]
    emitter = _Emitter(knowledge, resources, facts, payload.get("include_struct"))
    lines = emitter.node_lines(root, "", list(payload.get("slots", [])), True)
    return "\n".join(lines), emitter


@register_renderer("generate")
def render_generate(req: GenerationRequest) -> str:
    code, _ = emit_unit(req.payload)
    return code


def knowledge_items(knowledge: DomainKnowledge) -> list[tuple[str, str]]:
    items = []
    for entry, _ in knowledge.mapping_hits:
        rules = "\n".join(f"{r.android_attr} -> {r.arkui or '(consumed)'} [{r.transform}]"
                          for r in entry.attribute_map)
        text = (f"{entry.description}\nAndroid:\n{entry.source_example}\nArkUI:\n{entry.target_example}\n"
                f"attributes:\n{rules}")
        items.append((f"mapping {entry.entry_id}: {entry.source_tag} -> {entry.target_component}", text))
    for doc, _ in knowledge.doc_hits:
        attrs = "\n".join(f"{a[0]}: {a[1]} ({a[2]})" for a in doc.attributes)
        items.append((f"doc {doc.doc_id}: {doc.component_name}",
                      f"{doc.functional_description}\n{attrs}\nexample:\n{doc.usage_example}"))
    return items


def attribute_total(unit: TranslationUnit) -> int:
    return sum(1 for n in unit.root.walk() for a in n.attributes if not a.startswith(IGNORED_PREFIXES))


def generate_payload(unit: TranslationUnit, knowledge: DomainKnowledge,
                     resources: ResourceIndex | None = None, feedback: list[str] = ()) -> dict:
    description = unit.description or template_description(unit)
    return {
        "unit_id": unit.unit_id,
        "unit_xml": serialize(unit.root),
        "description": description.to_text(),
        "knowledge": [list(x) for x in knowledge_items(knowledge)],
        "slots": list(unit.child_units),
        "feedback": list(feedback),
        "tree": unit.root.to_dict(),
        "knowledge_data": knowledge.to_dict(),
        "resources": _filter_resources(unit.root, resources),
        "facts": [f.to_dict() for f in unit.related_interactions],
        "include_struct": layout_struct_name(unit.include_layout) if unit.include_layout else None,
    }


def strip_fences(text: str) -> str:
    m = re.search(r"```[\w-]*\n(.*?)```", text, re.S)
    return (m.group(1) if m else text).strip("\n")


def translate_unit(unit: TranslationUnit, knowledge: DomainKnowledge, gateway,
                   resources: ResourceIndex | None = None, feedback: list[str] = ()) -> GeneratedComponent:
    payload = generate_payload(unit, knowledge, resources, feedback)
    response = gateway.complete(build_request("generate", payload))
    code = strip_fences(response.text)
    if gateway.deterministic:
        _, emitter = emit_unit(payload)
        used, root_rules, warnings = emitter.used, emitter.root_rules, emitter.warnings
    else:
        used = [e.entry_id for e, _ in knowledge.mapping_hits]
        root_rules, warnings = [], []
    return GeneratedComponent(
        unit_id=unit.unit_id,
        arkui_code=code,
        component_name=component_name(unit.tag, unit.unit_id),
        used_entry_ids=used,
        mode="mapped" if knowledge.resolved else "inferred",
        attribute_total=attribute_total(unit),
        root_rules=root_rules,
        warnings=warnings,
    )


def root_component(code: str) -> str | None:
    """Name of the first component call in ``code``, skipping comments."""
    for line in code.splitlines():
        s = line.strip()
        if not s or s.startswith("//") or s.startswith("/*"):
            continue
        m = re.match(r"([A-Za-z_]\w*)\s*\(", s)
        return m.group(1) if m else None
    return None


def learned_entry(unit: TranslationUnit, component: GeneratedComponent) -> MappingEntry | None:
    target = root_component(component.arkui_code)
    if target is None:
        return None
    digest = hashlib.sha1(f"{unit.tag}|{target}".encode("utf-8")).hexdigest()[:8]
    description = unit.description or template_description(unit)
    return MappingEntry(
        entry_id=f"learned-{digest}",
        source_tag=unit.tag,
        target_component=target,
        description=description.purpose,
        source_example=serialize(unit.root),
        target_example=component.arkui_code,
        attribute_map=list(dict.fromkeys(component.root_rules)),
        provenance="learned",
    )

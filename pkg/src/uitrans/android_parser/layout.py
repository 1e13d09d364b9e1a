"""XML layout trees: parsing with source spans and canonical re-serialization."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterator
from xml.parsers import expat
from xml.sax.saxutils import escape

from ..errors import EmptyLayout, MalformedXml

CONTAINER_TAGS = frozenset({
    "LinearLayout", "RelativeLayout", "FrameLayout", "ConstraintLayout",
    "ScrollView", "HorizontalScrollView", "NestedScrollView", "TableLayout",
    "TableRow", "GridLayout", "AbsoluteLayout", "RadioGroup", "merge", "layout",
})

_ATTR_ESCAPES = {'"': "&quot;", "\n": "&#10;", "\r": "&#13;", "\t": "&#9;"}
INDENT = "    "


class NodeKind(str, enum.Enum):
    NATIVE_WIDGET = "native_widget"
    CONTAINER = "container"
    INCLUDE_REF = "include_ref"
    FRAGMENT = "fragment"
    CUSTOM = "custom"


def classify(tag: str) -> NodeKind:
    if tag == "include":
        return NodeKind.INCLUDE_REF
    if tag == "fragment" or tag.rsplit(".", 1)[-1] == "FragmentContainerView":
        return NodeKind.FRAGMENT
    if "." in tag:
        return NodeKind.CUSTOM
    if tag in CONTAINER_TAGS:
        return NodeKind.CONTAINER
    return NodeKind.NATIVE_WIDGET


@dataclass(frozen=True)
class SourceSpan:
    file: str
    start_line: int
    end_line: int

    def to_dict(self) -> dict:
        return {"file": self.file, "lines": [self.start_line, self.end_line]}

    @classmethod
    def from_dict(cls, d: dict) -> SourceSpan:
        return cls(d["file"], d["lines"][0], d["lines"][1])


@dataclass(eq=False)
class LayoutNode:
    tag: str
    attributes: dict[str, str] = field(default_factory=dict)
    children: list[LayoutNode] = field(default_factory=list)
    kind: NodeKind | None = None
    source_span: SourceSpan | None = None

    def __post_init__(self):
        if self.kind is None:
            self.kind = classify(self.tag)

    # Structural equality ignores source spans but respects attribute order.
    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LayoutNode):
            return NotImplemented
        return (
            self.tag == other.tag
            and self.kind == other.kind
            and list(self.attributes.items()) == list(other.attributes.items())
            and self.children == other.children
        )

    def __hash__(self):
        return id(self)

    @property
    def view_id(self) -> str | None:
        raw = self.attributes.get("android:id")
        if raw and "/" in raw:
            return raw.split("/", 1)[1]
        return raw or None

    def walk(self) -> Iterator[LayoutNode]:
        yield self
        for child in self.children:
            yield from child.walk()

    def walk_paths(self, prefix: tuple[int, ...] = ()) -> Iterator[tuple[tuple[int, ...], LayoutNode]]:
        yield prefix, self
        for i, child in enumerate(self.children):
            yield from child.walk_paths(prefix + (i,))

    def node_count(self) -> int:
        return sum(1 for _ in self.walk())

    def shell(self) -> LayoutNode:
        """Copy of this node without children."""
        return LayoutNode(self.tag, dict(self.attributes), [], self.kind, self.source_span)

    def copy(self) -> LayoutNode:
        return LayoutNode(self.tag, dict(self.attributes), [c.copy() for c in self.children],
                          self.kind, self.source_span)

    def to_dict(self) -> dict:
        return {
            "tag": self.tag,
            "kind": self.kind.value,
            "attributes": [[k, v] for k, v in self.attributes.items()],
            "span": self.source_span.to_dict() if self.source_span else None,
            "children": [c.to_dict() for c in self.children],
        }

    @classmethod
    def from_dict(cls, d: dict) -> LayoutNode:
        return cls(
            tag=d["tag"],
            attributes={k: v for k, v in d["attributes"]},
            children=[cls.from_dict(c) for c in d["children"]],
            kind=NodeKind(d["kind"]),
            source_span=SourceSpan.from_dict(d["span"]) if d.get("span") else None,
        )


def parse_layout(xml_text: str | bytes, layout_name: str, file: str | None = None) -> LayoutNode:
    """Parse layout XML into a LayoutNode tree.

    Attribute names are kept exactly as written (``android:text``), so no
    namespace processing happens and attribute order survives.
    """
    file = file or f"res/layout/{layout_name}.xml"
    if isinstance(xml_text, str):
        xml_text = xml_text.encode("utf-8")
    parser = expat.ParserCreate()
    parser.ordered_attributes = True
    stack: list[tuple[LayoutNode, int]] = []
    roots: list[LayoutNode] = []

    def start(name, attrs):
        node = LayoutNode(name, dict(zip(attrs[0::2], attrs[1::2])))
        if stack:
            stack[-1][0].children.append(node)
        else:
            roots.append(node)
        stack.append((node, parser.CurrentLineNumber))

    def end(name):
        node, start_line = stack.pop()
        node.source_span = SourceSpan(file, start_line, max(start_line, parser.CurrentLineNumber))

    parser.StartElementHandler = start
    parser.EndElementHandler = end
    try:
        parser.Parse(xml_text, True)
    except expat.ExpatError as exc:
        if exc.code == expat.errors.codes[expat.errors.XML_ERROR_NO_ELEMENTS]:
            raise EmptyLayout(f"{file}: layout {layout_name!r} has no root element") from None
        raise MalformedXml(expat.errors.messages[exc.code], file, exc.lineno, exc.offset) from None
    if not roots:
        raise EmptyLayout(f"{file}: layout {layout_name!r} has no root element")
    return roots[0]


def _quote(value: str) -> str:
    return '"' + escape(value, _ATTR_ESCAPES) + '"'


def serialize_lines(node: LayoutNode, depth: int = 0) -> list[str]:
    """Canonical form: first attribute on the tag line, each further attribute on its own line."""
    pad = INDENT * depth
    items = list(node.attributes.items())
    if items:
        k, v = items[0]
        lines = [f"{pad}<{node.tag} {k}={_quote(v)}"]
        lines += [f"{pad}{INDENT}{k}={_quote(v)}" for k, v in items[1:]]
    else:
        lines = [f"{pad}<{node.tag}"]
    if not node.children:
        lines[-1] += " />"
        return lines
    lines[-1] += ">"
    for child in node.children:
        lines.extend(serialize_lines(child, depth + 1))
    lines.append(f"{pad}</{node.tag}>")
    return lines


def serialize(node: LayoutNode, declaration: bool = False) -> str:
    lines = serialize_lines(node)
    if declaration:
        lines.insert(0, '<?xml version="1.0" encoding="utf-8"?>')
    return "\n".join(lines) + "\n"


def line_count(node: LayoutNode) -> int:
    return len(serialize_lines(node))

"""Lexical scan of Java sources for UI interaction facts.

The scan is regex based and never parses Java properly. Comments and string
literal bodies are blanked out (offsets preserved) before matching, so every
fact's ``detail`` can be sliced verbatim from the original text.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, asdict


class InteractionKind(str, enum.Enum):
    VIEW_BINDING = "view_binding"
    NAVIGATION = "navigation"
    CONTENT_VIEW = "content_view"
    LISTENER = "listener"


@dataclass
class InteractionFact:
    kind: InteractionKind
    subject_id: str
    detail: str
    offset: int = 0
    event: str | None = None           # listeners: snake_case event name
    variable: str | None = None        # bindings: assigned variable
    trigger_view: str | None = None    # navigation: view id of the enclosing listener
    trigger_method: str | None = None  # navigation: enclosing ``void m(View v)`` method

    def to_dict(self) -> dict:
        d = asdict(self)
        d["kind"] = self.kind.value
        return d

    @classmethod
    def from_dict(cls, d: dict) -> InteractionFact:
        d = dict(d)
        d["kind"] = InteractionKind(d["kind"])
        return cls(**d)


_RID = r"(?:android\s*\.\s*)?R\s*\.\s*id\s*\.\s*"
_FIND = rf"(?:<[^<>;]{{0,80}}>\s*)?\bfindViewById\s*(?:<[^<>;]{{0,80}}>)?\s*\(\s*{_RID}"

_PATTERNS = [
    (InteractionKind.CONTENT_VIEW,
     re.compile(r"\bsetContentView\s*\([^;]{0,300}?\bR\s*\.\s*layout\s*\.\s*(?P<id>\w+)")),
    (InteractionKind.VIEW_BINDING,
     re.compile(rf"(?:\b(?P<var>[A-Za-z_]\w*)\s*=\s*(?:\(\s*[\w.]+\s*\)\s*)?)?"
                rf"(?:\b[\w.]+\s*\.\s*)?{_FIND}(?P<id>\w+)\s*\)")),
    (InteractionKind.LISTENER,
     re.compile(rf"(?:(?:{_FIND}(?P<rid>\w+)\s*\)|\b(?P<var>[A-Za-z_]\w*))\s*\.\s*)?"
                r"\bsetOn(?P<event>[A-Z]\w*?)Listener\s*\(")),
    (InteractionKind.NAVIGATION,
     re.compile(r"(?:\bstartActivity(?:ForResult)?\s*\(\s*)?"
                r"\bnew\s+Intent\s*\([^;]{0,300}?,\s*(?P<id>[A-Za-z_][\w.]*)\s*\.\s*class\b")),
]

_HANDLER_METHOD = re.compile(
    r"\bvoid\s+(?P<name>[A-Za-z_]\w*)\s*\(\s*(?:final\s+)?(?:android\.view\.)?View\s+\w+\s*\)\s*\{")


def blank_comments_and_strings(text: str) -> str:
    """Replace comment text and string/char literal bodies with spaces.

    Newlines are kept so offsets and line numbers are unchanged.
    """
    out = list(text)
    i, n = 0, len(text)

    def blank(a: int, b: int) -> None:
        for k in range(a, b):
            if out[k] != "\n":
                out[k] = " "

    while i < n:
        c = text[i]
        if c == "/" and i + 1 < n and text[i + 1] == "/":
            j = text.find("\n", i)
            j = n if j < 0 else j
            blank(i, j)
            i = j
        elif c == "/" and i + 1 < n and text[i + 1] == "*":
            j = text.find("*/", i + 2)
            j = n if j < 0 else j + 2
            blank(i, j)
            i = j
        elif c in "\"'":
            j = i + 1
            while j < n and text[j] != c and text[j] != "\n":
                j += 2 if text[j] == "\\" else 1
            j = min(j, n)
            blank(i + 1, j)
            i = j + 1
        else:
            i += 1
    return "".join(out)


def _matching_close(text: str, open_at: int, opener: str, closer: str) -> int:
    depth = 0
    for k in range(open_at, len(text)):
        ch = text[k]
        if ch == opener:
            depth += 1
        elif ch == closer:
            depth -= 1
            if depth == 0:
                return k
    return len(text)


def event_name(listener_event: str) -> str:
    return re.sub(r"(?<!^)(?=[A-Z])", "_", listener_event).lower()


def extract_interactions(java_text: str | bytes) -> list[InteractionFact]:
    """Return interaction facts in order of appearance."""
    if isinstance(java_text, (bytes, bytearray)):
        java_text = bytes(java_text).decode("utf-8", errors="replace")
    scan = blank_comments_and_strings(java_text)

    found: list[tuple[int, int, InteractionFact]] = []
    for order, (kind, pattern) in enumerate(_PATTERNS):
        for m in pattern.finditer(scan):
            detail = java_text[m.start():m.end()]
            if kind is InteractionKind.LISTENER:
                subject = m.group("rid") or m.group("var") or "this"
                fact = InteractionFact(kind, subject, detail, m.start(), event=event_name(m.group("event")))
            elif kind is InteractionKind.VIEW_BINDING:
                fact = InteractionFact(kind, m.group("id"), detail, m.start(), variable=m.group("var"))
            elif kind is InteractionKind.NAVIGATION:
                fact = InteractionFact(kind, m.group("id").rsplit(".", 1)[-1], detail, m.start())
            else:
                fact = InteractionFact(kind, m.group("id"), detail, m.start())
            found.append((m.start(), order, fact))
    found.sort(key=lambda t: (t[0], t[1]))
    facts = [f for _, _, f in found]
    _link(scan, facts)
    return facts


def _link(scan: str, facts: list[InteractionFact]) -> None:
    """Resolve listener receivers to view ids and attach navigation to its trigger."""
    var_to_id: dict[str, str] = {}
    listener_ranges: list[tuple[int, int, str]] = []
    for fact in facts:
        if fact.kind is InteractionKind.VIEW_BINDING and fact.variable:
            var_to_id[fact.variable] = fact.subject_id
        elif fact.kind is InteractionKind.LISTENER:
            fact.subject_id = var_to_id.get(fact.subject_id, fact.subject_id)
            open_at = fact.offset + len(fact.detail) - 1
            listener_ranges.append((open_at, _matching_close(scan, open_at, "(", ")"), fact.subject_id))

    methods = []
    for m in _HANDLER_METHOD.finditer(scan):
        open_at = m.end() - 1
        methods.append((open_at, _matching_close(scan, open_at, "{", "}"), m.group("name")))

    for fact in facts:
        if fact.kind is not InteractionKind.NAVIGATION:
            continue
        enclosing = [r for r in listener_ranges if r[0] < fact.offset <= r[1]]
        if enclosing:
            fact.trigger_view = max(enclosing)[2]
        in_method = [r for r in methods if r[0] < fact.offset <= r[1]]
        if in_method:
            fact.trigger_method = max(in_method)[2]

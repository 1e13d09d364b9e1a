"""Well-formedness checker for the ArkUI subset the generator emits.

Three passes: a lexer that drops comments and string/template literals
(slot placeholders survive as tokens), a bracket-balance pass, and a
structural parse of imports, decorated structs, build() bodies and
component call chains. Every violation is reported with its line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

STRUCT_DECORATORS = frozenset({"Entry", "Component", "CustomDialog", "Preview", "Reusable", "ComponentV2"})
FUNCTION_DECORATORS = frozenset({"Builder", "Styles", "Extend", "AnimatableExtend"})
MODIFIERS = frozenset({"private", "public", "protected", "readonly", "static", "export", "default", "declare"})
UI_KEYWORDS = frozenset({"ForEach", "LazyForEach", "Repeat"})

_SLOT = re.compile(r"/\*__SLOT:([\w-]+)__\*/")
_IDENT = re.compile(r"[A-Za-z_$][\w$]*")
_NUMBER = re.compile(r"\d[\w.]*")
_OPEN = {"(": ")", "{": "}", "[": "]"}
_CLOSE = {v: k for k, v in _OPEN.items()}
_CONTINUE = frozenset({"=", ":", ",", "|", "&", ".", "=>", "?", "<", ">", "+", "-", "*", "/", "!"})


@dataclass(frozen=True)
class WellformednessError:
    line: int
    message: str

    def __str__(self) -> str:
        return f"line {self.line}: {self.message}"


@dataclass(frozen=True)
class Token:
    kind: str   # ident | number | string | punct | slot
    text: str
    line: int


@dataclass
class UiNode:
    name: str                 # component name, "SLOT", "if" or "ForEach"
    line: int
    children: list[UiNode] = field(default_factory=list)
    slot_id: str | None = None


@dataclass
class StructInfo:
    name: str
    line: int
    decorators: list[str]
    build: list[UiNode] | None = None


def tokenize(src: str) -> tuple[list[Token], list[WellformednessError]]:
    tokens: list[Token] = []
    errors: list[WellformednessError] = []
    i, line, n = 0, 1, len(src)
    while i < n:
        c = src[i]
        if c == "\n":
            line += 1
            i += 1
        elif c.isspace():
            i += 1
        elif src.startswith("//", i):
            j = src.find("\n", i)
            i = n if j < 0 else j
        elif src.startswith("/*", i):
            j = src.find("*/", i + 2)
            if j < 0:
                errors.append(WellformednessError(line, "unterminated block comment"))
                break
            m = _SLOT.match(src, i)
            if m and m.end() == j + 2:
                tokens.append(Token("slot", m.group(1), line))
            line += src.count("\n", i, j)
            i = j + 2
        elif c in "'\"":
            j, start = i + 1, line
            while j < n and src[j] != c and src[j] != "\n":
                j += 2 if src[j] == "\\" else 1
            if j >= n or src[j] != c:
                errors.append(WellformednessError(start, "unterminated string literal"))
                i = j
                continue
            tokens.append(Token("string", src[i:j + 1], start))
            i = j + 1
        elif c == "`":
            j, _ = _skip_template(src, i + 1)
            if j < 0:
                errors.append(WellformednessError(line, "unterminated template literal"))
                break
            tokens.append(Token("string", src[i:j], line))
            line += src.count("\n", i, j)
            i = j
        elif c.isdigit():
            m = _NUMBER.match(src, i)
            tokens.append(Token("number", m.group(), line))
            i = m.end()
        elif c.isalpha() or c in "_$":
            m = _IDENT.match(src, i)
            tokens.append(Token("ident", m.group(), line))
            i = m.end()
        else:
            if src.startswith("=>", i):
                tokens.append(Token("punct", "=>", line))
                i += 2
            else:
                tokens.append(Token("punct", c, line))
                i += 1
    return tokens, errors


def _skip_template(src: str, i: int) -> tuple[int, int]:
    """Index just past the closing backtick; ``${...}`` may nest further literals."""
    n = len(src)
    while i < n:
        c = src[i]
        if c == "\\":
            i += 2
        elif c == "`":
            return i + 1, 1
        elif src.startswith("${", i):
            depth, i = 1, i + 2
            while i < n and depth:
                if src[i] == "`":
                    i, _ = _skip_template(src, i + 1)
                    if i < 0:
                        return -1, 0
                    continue
                if src[i] in "'\"":
                    q, i = src[i], i + 1
                    while i < n and src[i] != q:
                        i += 2 if src[i] == "\\" else 1
                depth += {"{": 1, "}": -1}.get(src[i] if i < n else "", 0)
                i += 1
        else:
            i += 1
    return -1, 0


def check_balance(tokens: list[Token]) -> list[WellformednessError]:
    errors = []
    stack: list[Token] = []
    for tok in tokens:
        if tok.kind != "punct":
            continue
        if tok.text in _OPEN:
            stack.append(tok)
        elif tok.text in _CLOSE:
            if stack and stack[-1].text == _CLOSE[tok.text]:
                stack.pop()
            elif stack:
                opener = stack.pop()
                errors.append(WellformednessError(
                    tok.line, f"'{tok.text}' does not match '{opener.text}' opened on line {opener.line}"))
            else:
                errors.append(WellformednessError(tok.line, f"unmatched '{tok.text}'"))
    for tok in stack:
        errors.append(WellformednessError(tok.line, f"'{tok.text}' is never closed"))
    return errors


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.i = 0
        self.errors: list[WellformednessError] = []
        self.structs: list[StructInfo] = []

    # helpers
    def peek(self, k: int = 0) -> Token | None:
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else None

    def at(self, text: str, k: int = 0) -> bool:
        t = self.peek(k)
        return t is not None and t.kind in ("punct", "ident") and t.text == text

    def line(self) -> int:
        t = self.peek()
        return t.line if t else (self.toks[-1].line if self.toks else 1)

    def error(self, message: str, line: int | None = None) -> None:
        self.errors.append(WellformednessError(line if line is not None else self.line(), message))

    def skip_group(self) -> None:
        """Skip a balanced ( ), [ ] or { } group starting at the current token."""
        depth = 0
        while self.i < len(self.toks):
            t = self.toks[self.i]
            self.i += 1
            if t.kind == "punct" and t.text in _OPEN:
                depth += 1
            elif t.kind == "punct" and t.text in _CLOSE:
                depth -= 1
                if depth == 0:
                    return

    def skip_statement(self) -> None:
        """Skip to the end of a statement: ';' at depth 0 or a closed top-level block."""
        while self.i < len(self.toks):
            t = self.peek()
            if t.kind == "punct" and t.text == ";":
                self.i += 1
                return
            if t.kind == "punct" and t.text in _OPEN:
                is_block = t.text == "{"
                self.skip_group()
                if is_block and not (self.at(".") or self.at(",") or self.at(")")):
                    return
                continue
            if t.kind == "punct" and t.text in _CLOSE:
                return
            self.i += 1

    def skip_property(self) -> None:
        """Skip a property declaration; it ends at ';' or at a line break after a complete value."""
        prev = self.toks[self.i - 1]
        while self.i < len(self.toks):
            t = self.peek()
            if t.kind == "punct" and t.text == ";":
                self.i += 1
                return
            if t.kind == "punct" and t.text in _CLOSE:
                return
            if (t.line > prev.line and t.text not in _CONTINUE
                    and not (prev.kind == "punct" and prev.text in _CONTINUE)):
                return
            if t.kind == "punct" and t.text in _OPEN:
                self.skip_group()
                prev = self.toks[self.i - 1]
                continue
            prev = t
            self.i += 1

    # grammar
    def parse_file(self) -> None:
        while self.peek() is not None:
            t = self.peek()
            if t.kind == "ident" and t.text == "import":
                self.parse_import()
            elif t.kind == "punct" and t.text == "@" or t.kind == "ident" and t.text in ("struct", "export"):
                self.parse_declaration()
            elif t.kind == "punct" and t.text == ";":
                self.i += 1
            elif t.kind == "ident" and t.text in ("const", "let", "var", "function", "class",
                                                  "interface", "enum", "type", "declare"):
                self.skip_statement()
            else:
                self.error(f"unexpected {t.text!r} at top level")
                self.i += 1
                self.skip_statement()

    def parse_import(self) -> None:
        start = self.line()
        self.i += 1
        while self.peek() is not None:
            t = self.peek()
            self.i += 1
            if t.kind == "string":
                if self.at(";"):
                    self.i += 1
                return
            if t.kind == "punct" and t.text == ";":
                break
        self.error("import without a module string", start)

    def parse_decorators(self) -> list[tuple[str, int]]:
        decorators = []
        while self.at("@"):
            line = self.line()
            self.i += 1
            t = self.peek()
            if t is None or t.kind != "ident":
                self.error("decorator name expected", line)
                return decorators
            self.i += 1
            if self.at("("):
                self.skip_group()
            decorators.append((t.text, line))
        return decorators

    def parse_declaration(self) -> None:
        decorators = self.parse_decorators()
        while self.peek() is not None and self.peek().kind == "ident" and self.peek().text in MODIFIERS:
            self.i += 1
        t = self.peek()
        if t is not None and t.kind == "ident" and t.text == "struct":
            for name, line in decorators:
                if name not in STRUCT_DECORATORS:
                    self.error(f"@{name} cannot decorate a struct", line)
            self.parse_struct([d for d, _ in decorators])
            return
        if t is not None and t.kind == "ident" and t.text == "function":
            for name, line in decorators:
                if name not in FUNCTION_DECORATORS:
                    self.error(f"@{name} must precede a struct", line)
            self.i += 1
            self.expect_ident("function name")
            self.parse_params()
            self.parse_return_type()
            if self.at("{"):
                if any(d == "Builder" for d, _ in decorators):
                    self.parse_ui_block()
                else:
                    self.skip_group()
            else:
                self.error("function body expected")
            return
        for name, line in decorators:
            self.error(f"@{name} must be followed by a struct declaration", line)
        if t is not None:
            self.skip_statement()

    def expect_ident(self, what: str) -> Token | None:
        t = self.peek()
        if t is None or t.kind != "ident":
            self.error(f"{what} expected")
            return None
        self.i += 1
        return t

    def parse_params(self) -> None:
        if self.at("("):
            self.skip_group()
        else:
            self.error("'(' expected")

    def parse_return_type(self) -> None:
        if self.at(":"):
            self.i += 1
            while self.peek() is not None and not self.at("{") and not self.at(";"):
                if self.peek().text in _OPEN:
                    self.skip_group()
                else:
                    self.i += 1

    def parse_struct(self, decorators: list[str]) -> None:
        line = self.line()
        self.i += 1
        name_tok = self.expect_ident("struct name")
        info = StructInfo(name_tok.text if name_tok else "?", line, decorators)
        self.structs.append(info)
        if not self.at("{"):
            self.error("struct body expected")
            self.skip_statement()
            return
        self.i += 1
        builds = 0
        while self.peek() is not None and not self.at("}"):
            builds += self.parse_member(info)
        if self.at("}"):
            self.i += 1
        if builds != 1:
            self.error(f"struct {info.name} must have exactly one build() method, found {builds}", line)

    def parse_member(self, info: StructInfo) -> int:
        decorators = self.parse_decorators()
        while self.peek() is not None and self.peek().kind == "ident" and self.peek().text in MODIFIERS:
            self.i += 1
        t = self.peek()
        if t is None or t.kind != "ident":
            self.error(f"unexpected {t.text!r} in struct body" if t else "unexpected end of struct")
            self.i += 1
            self.skip_statement()
            return 0
        self.i += 1
        if self.at("("):
            self.parse_params()
            self.parse_return_type()
            if not self.at("{"):
                self.error(f"body expected for method {t.text}")
                self.skip_statement()
                return 0
            if t.text == "build":
                info.build = self.parse_ui_block()
                return 1
            if any(d == "Builder" for d, _ in decorators):
                self.parse_ui_block()
            else:
                self.skip_group()
            return 0
        if self.at(":") or self.at("=") or self.at("?") or self.at("!"):
            self.skip_property()
            return 0
        if self.at(";"):
            self.i += 1
            return 0
        self.error(f"unexpected {t.text!r} in struct body", t.line)
        self.skip_statement()
        return 0

    def parse_ui_block(self) -> list[UiNode]:
        """Parse ``{ ui_stmt* }``; the current token must be '{'."""
        self.i += 1
        nodes: list[UiNode] = []
        while self.peek() is not None and not self.at("}"):
            node = self.parse_ui_stmt()
            if node is not None:
                nodes.append(node)
        if self.at("}"):
            self.i += 1
        return nodes

    def parse_ui_stmt(self) -> UiNode | None:
        t = self.peek()
        if t.kind == "slot":
            self.i += 1
            return UiNode("SLOT", t.line, slot_id=t.text)
        if t.kind == "punct" and t.text == ";":
            self.i += 1
            return None
        if t.kind == "ident" and t.text == "if":
            return self.parse_if()
        if t.kind == "ident" and t.text == "this" and self.at(".", 1):
            self.i += 2
            name = self.expect_ident("builder name")
            if not self.at("("):
                self.error("builder call expected", t.line)
                self.skip_statement()
                return None
            self.skip_group()
            self.parse_chain()
            return UiNode(name.text if name else "?", t.line)
        if t.kind == "ident" and self.at("(", 1):
            self.i += 1
            self.skip_group()
            node = UiNode(t.text, t.line)
            if t.text in UI_KEYWORDS:
                return node
            if self.at("{"):
                node.children = self.parse_ui_block()
            self.parse_chain()
            return node
        self.error(f"expected a component call, found {t.text!r}", t.line)
        self.i += 1
        self.skip_statement()
        return None

    def parse_chain(self) -> None:
        while self.at("."):
            line = self.line()
            self.i += 1
            name = self.peek()
            if name is None or name.kind != "ident":
                self.error("attribute name expected after '.'", line)
                return
            self.i += 1
            if not self.at("("):
                self.error(f"attribute .{name.text} must be called with arguments", line)
                return
            self.skip_group()

    def parse_if(self) -> UiNode:
        t = self.peek()
        self.i += 1
        node = UiNode("if", t.line)
        if not self.at("("):
            self.error("'(' expected after if", t.line)
        else:
            self.skip_group()
        if self.at("{"):
            node.children = self.parse_ui_block()
        else:
            self.error("'{' expected after if condition", t.line)
        if self.at("else"):
            self.i += 1
            if self.at("if"):
                node.children.append(self.parse_if())
            elif self.at("{"):
                node.children.extend(self.parse_ui_block())
            else:
                self.error("'{' expected after else")
        return node


def parse(ets_source: str) -> tuple[list[WellformednessError], list[StructInfo]]:
    tokens, errors = tokenize(ets_source)
    if errors:
        return errors, []
    balance = check_balance(tokens)
    if balance:
        return balance, []
    parser = _Parser(tokens)
    parser.parse_file()
    return parser.errors, parser.structs


def check_wellformed(ets_source: str) -> list[WellformednessError]:
    """All subset-grammar violations in ``ets_source`` (empty when well formed)."""
    errors, _ = parse(ets_source)
    return sorted(errors, key=lambda e: e.line)


UNIT_WRAPPER = "@Component\nstruct UnitCheck {\n  build() {\n"


def wrap_unit(code: str) -> str:
    return UNIT_WRAPPER + code + "\n  }\n}\n"


def unit_outline(code: str) -> tuple[list[WellformednessError], list[UiNode]]:
    """Check a unit fragment inside a throwaway struct and return its top-level UI nodes.

    Error lines are reported relative to the fragment.
    """
    errors, structs = parse(wrap_unit(code))
    offset = UNIT_WRAPPER.count("\n")
    errors = [WellformednessError(max(1, e.line - offset), e.message) for e in errors]
    body = structs[0].build if structs and structs[0].build is not None else []
    return sorted(errors, key=lambda e: e.line), body

"""Identifier rules for emitted ArkUI structs and routes."""

from __future__ import annotations

import re

_WORD = re.compile(r"[A-Za-z0-9]+")
_IDENT = re.compile(r"^[A-Za-z_$][A-Za-z0-9_$]*$")


def pascal(text: str) -> str:
    """``item_row`` -> ``ItemRow``; camel humps inside words are kept."""
    out = "".join(w[:1].upper() + w[1:] for w in _WORD.findall(text))
    if not out or out[0].isdigit():
        out = "X" + out
    return out


def route_name(activity_name: str) -> str:
    """Activity simple name minus a trailing ``Activity`` (MainActivity -> Main)."""
    simple = activity_name.rsplit(".", 1)[-1]
    if simple.endswith("Activity") and len(simple) > len("Activity"):
        simple = simple[: -len("Activity")]
    return pascal(simple)


def layout_struct_name(layout_name: str) -> str:
    return pascal(layout_name) + "Layout"


def component_name(tag: str, unit_id: str) -> str:
    return f"{pascal(tag.rsplit('.', 1)[-1])}_{unit_id[:6]}"


def is_identifier(name: str) -> bool:
    return bool(_IDENT.match(name))


def disambiguate(name: str, taken: set[str]) -> str:
    """Deterministic suffixing: Name, Name2, Name3, ..."""
    if name not in taken:
        return name
    n = 2
    while f"{name}{n}" in taken:
        n += 1
    return f"{name}{n}"

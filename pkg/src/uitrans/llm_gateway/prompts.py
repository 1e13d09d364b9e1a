"""Prompt assembly for the five generation roles."""

from __future__ import annotations

from ..errors import PayloadIncomplete
from .types import GenerationRequest

PROMPT_CAP = 16_000

# required payload fields per role; list-valued knowledge fields are (label, text) pairs
REQUIRED = {
    "parse_assist": ("file_name", "source_text"),
    "describe": ("unit_xml", "breakdown_context"),
    "generate": ("unit_xml", "description", "knowledge"),
    "reflect": ("code", "description"),
    "assemble": ("page_name", "components"),
}

SYSTEM = {
    "parse_assist": (
        "You analyse Android Java source. Report view bindings, listeners and page navigation "
        "that a pattern scanner may have missed, as a JSON array of objects with keys "
        "kind, subject_id, detail."
    ),
    "describe": (
        "You describe one Android layout unit. Reply with a JSON object with keys "
        "purpose, child_summary, events."
    ),
    "generate": (
        "You translate one Android XML layout unit into HarmonyOS ArkUI code. Use the domain "
        "knowledge blocks. Keep every /*__SLOT:<id>__*/ placeholder exactly once, at the position "
        "of the corresponding child. Emit only the component expression, no struct wrapper. "
        "Write // TODO(unmapped): <attr> for any attribute you cannot translate."
    ),
    "reflect": (
        "You review generated ArkUI code against a functional description. List inconsistencies "
        "in one short paragraph, or reply OK."
    ),
    "assemble": (
        "You check that the ArkUI components of one page compose correctly. Reply OK or list problems."
    ),
}


def fenced(label: str, text: str) -> str:
    return f"[{label}]\n```\n{text}\n```"


def _knowledge(payload: dict, name: str) -> list[tuple[str, str]]:
    items = payload.get(name) or []
    return [(str(label), str(text)) for label, text in items]


def render_prompt(role: str, payload: dict) -> tuple[str, str]:
    """Return ``(system_text, user_text)`` for ``role``.

    Knowledge blocks are dropped last-first when the prompt exceeds the cap;
    the unit XML and generated code are never cut.
    """
    text, _ = _render(role, payload)
    return text


def _render(role: str, payload: dict) -> tuple[tuple[str, str], list[tuple[str, str]]]:
    if role not in REQUIRED:
        raise ValueError(f"unknown role {role!r}")
    for name in REQUIRED[role]:
        if name not in payload or payload[name] is None:
            raise PayloadIncomplete(role, name)
    cap = int(payload.get("prompt_cap", PROMPT_CAP))
    system = SYSTEM[role]
    fixed: list[str] = []
    knowledge: list[tuple[str, str]] = []
    tail: list[str] = []

    if role == "parse_assist":
        fixed.append(fenced(f"java {payload['file_name']}", payload["source_text"]))
        for kind, subject, detail in payload.get("known_facts", []):
            tail.append(f"already found: {kind} {subject} {detail}")
    elif role == "describe":
        fixed.append(fenced("unit xml", payload["unit_xml"]))
        fixed.append(fenced("breakdown context", payload["breakdown_context"]))
        if payload.get("events"):
            tail.append("events seen in Java: " + ", ".join(payload["events"]))
    elif role == "generate":
        fixed.append(fenced("unit xml", payload["unit_xml"]))
        fixed.append(fenced("functional description", payload["description"]))
        knowledge = _knowledge(payload, "knowledge")
        if payload.get("slots"):
            tail.append("child slots in order: " + " ".join(f"/*__SLOT:{s}__*/" for s in payload["slots"]))
        tail.append("requirements: reproduce the structure and behaviour in the description; "
                    "every event listed must have an ArkUI event handler.")
        for item in payload.get("feedback", []):
            tail.append(f"previous attempt failed: {item}")
    elif role == "reflect":
        fixed.append(fenced("generated code", payload["code"]))
        fixed.append(fenced("functional description", payload["description"]))
    else:
        fixed.append(f"page: {payload['page_name']}")
        for label, text in payload["components"]:
            fixed.append(fenced(label, text))

    def assemble(blocks: list[tuple[str, str]]) -> str:
        parts = fixed + [fenced(label, text) for label, text in blocks] + tail
        return "\n\n".join(parts)

    kept = list(knowledge)
    user = assemble(kept)
    while kept and len(system) + len(user) > cap:
        kept.pop()
        user = assemble(kept)
    return (system, user), kept


def build_request(role: str, payload: dict, max_output_tokens: int = 2048,
                  temperature: float | None = None) -> GenerationRequest:
    (system, user), kept = _render(role, payload)
    return GenerationRequest(role, system, user, tuple(kept), max_output_tokens, temperature, payload)

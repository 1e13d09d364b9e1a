from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace

ROLES = ("parse_assist", "describe", "generate", "reflect", "assemble")


@dataclass(frozen=True)
class GenerationRequest:
    role: str
    system_text: str
    user_text: str
    context_items: tuple[tuple[str, str], ...] = ()
    max_output_tokens: int = 2048
    temperature: float | None = None   # None: the gateway's default applies
    # structured inputs for deterministic renderers; never sent over the wire
    payload: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValueError(f"unknown role {self.role!r}")

    def with_temperature(self, t: float) -> GenerationRequest:
        return replace(self, temperature=t)

    def to_dict(self) -> dict:
        return {
            "role": self.role,
            "system_text": self.system_text,
            "user_text": self.user_text,
            "context_items": [list(c) for c in self.context_items],
            "max_output_tokens": self.max_output_tokens,
            "temperature": self.temperature,
            "payload": self.payload,
        }

    @classmethod
    def from_dict(cls, d: dict) -> GenerationRequest:
        return cls(d["role"], d["system_text"], d["user_text"],
                   tuple(tuple(c) for c in d.get("context_items", [])),
                   d.get("max_output_tokens", 2048), d.get("temperature"), d.get("payload") or {})

    def key(self) -> str:
        """Content hash used by record/replay."""
        blob = json.dumps(self.to_dict(), sort_keys=True, ensure_ascii=False, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class GenerationResponse:
    text: str
    backend_id: str
    latency_ms: float = 0.0
    tokens_in: int | None = None
    tokens_out: int | None = None

    def to_dict(self) -> dict:
        return {"text": self.text, "backend_id": self.backend_id, "latency_ms": self.latency_ms,
                "tokens_in": self.tokens_in, "tokens_out": self.tokens_out}

    @classmethod
    def from_dict(cls, d: dict) -> GenerationResponse:
        return cls(d["text"], d["backend_id"], d.get("latency_ms", 0.0), d.get("tokens_in"), d.get("tokens_out"))

from __future__ import annotations

import json
import logging
import threading
from collections import Counter

from ..android_parser import InteractionFact, InteractionKind, PageRecord
from ..errors import BackendError, ConfigError
from .backends import Backend, RecordingBackend, RemoteBackend, ReplayBackend, TemplateBackend, register_renderer
from .prompts import build_request
from .types import GenerationRequest, GenerationResponse

log = logging.getLogger(__name__)

DEFAULT_MAX_CONCURRENCY = 4
LIVE_TEMPERATURE = 0.2


class Gateway:
    """Single egress point for generation calls.

    Enforces a per-backend concurrency cap and counts every call, overall
    and per role, so tests can assert call budgets.
    """

    def __init__(self, backend: Backend, max_concurrency: int = DEFAULT_MAX_CONCURRENCY,
                 temperature: float | None = None):
        if max_concurrency < 1:
            raise ConfigError("max_concurrency must be >= 1")
        self.backend = backend
        self.max_concurrency = max_concurrency
        self.temperature = temperature if temperature is not None else (
            0.0 if backend.deterministic else LIVE_TEMPERATURE)
        self._limiter = threading.BoundedSemaphore(max_concurrency)
        self._lock = threading.Lock()
        self.calls = 0
        self.calls_by_role: Counter[str] = Counter()
        self.in_flight = 0
        self.peak_in_flight = 0

    @property
    def deterministic(self) -> bool:
        return self.backend.deterministic

    def complete(self, req: GenerationRequest) -> GenerationResponse:
        if not req.user_text.strip():
            raise ValueError("GenerationRequest.user_text must be non-empty")
        if req.temperature is None:
            req = req.with_temperature(self.temperature)
        with self._lock:
            self.calls += 1
            self.calls_by_role[req.role] += 1
        with self._limiter:
            with self._lock:
                self.in_flight += 1
                self.peak_in_flight = max(self.peak_in_flight, self.in_flight)
            try:
                return self.backend.complete(req)
            finally:
                with self._lock:
                    self.in_flight -= 1

    def request(self, role: str, payload: dict, max_output_tokens: int = 2048) -> GenerationResponse:
        return self.complete(build_request(role, payload, max_output_tokens))


def make_gateway(kind: str = "template", settings: dict | None = None, record: str | None = None,
                 replay: str | None = None, **backend_kwargs) -> Gateway:
    """Build a gateway from ``backend.*`` settings plus record/replay flags."""
    settings = settings or {}
    if record and replay:
        raise ConfigError("--record-llm and --replay-llm are mutually exclusive")
    if replay:
        backend: Backend = ReplayBackend(replay)
    elif kind == "template":
        backend = TemplateBackend()
    elif kind == "remote":
        backend = RemoteBackend.from_config(settings, **backend_kwargs)
    else:
        raise ConfigError(f"unknown backend kind {kind!r}")
    if record:
        backend = RecordingBackend(backend, record)
    return Gateway(backend, int(settings.get("max_concurrency", DEFAULT_MAX_CONCURRENCY)))


# -- defaults for the roles no other module renders --------------------------

@register_renderer("parse_assist")
def _render_parse_assist(req: GenerationRequest) -> str:
    return "[]"


@register_renderer("describe")
def _render_describe(req: GenerationRequest) -> str:
    return "{}"


@register_renderer("assemble")
def _render_assemble(req: GenerationRequest) -> str:
    return "OK"


def make_parse_assist(gateway: Gateway):
    """Callable for ``parse_project(assist=...)`` that asks the backend for missed facts."""

    def assist(page: PageRecord) -> list[InteractionFact]:
        if not page.java_code:
            return []
        payload = {
            "file_name": page.java_path or page.activity_name,
            "source_text": page.java_code,
            "known_facts": [[f.kind.value, f.subject_id, f.detail] for f in page.interactions],
        }
        try:
            text = gateway.request("parse_assist", payload).text
            items = json.loads(text)
        except BackendError as exc:
            log.warning("parse assist failed for %s: %s", page.activity_name, exc)
            return []
        except ValueError:
            log.warning("parse assist reply for %s is not JSON; ignored", page.activity_name)
            return []
        known = {(f.kind, f.subject_id) for f in page.interactions}
        extra = []
        for item in items if isinstance(items, list) else []:
            try:
                kind = InteractionKind(item["kind"])
                fact = InteractionFact(kind, str(item["subject_id"]), str(item.get("detail", "")), -1)
            except (KeyError, ValueError, TypeError):
                continue
            if (fact.kind, fact.subject_id) not in known:
                known.add((fact.kind, fact.subject_id))
                extra.append(fact)
        return extra

    return assist

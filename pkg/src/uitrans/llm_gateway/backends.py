from __future__ import annotations

import importlib
import json
import logging
import os
import time
from pathlib import Path
from typing import Callable, Protocol

import requests

from ..errors import BackendError, BackendUnavailable, ConfigError
from .types import GenerationRequest, GenerationResponse

log = logging.getLogger(__name__)

Renderer = Callable[[GenerationRequest], str]

_RENDERERS: dict[str, Renderer] = {}
# modules that register the default template renderers on import
_RENDERER_MODULES = ("uitrans.generator", "uitrans.reflector")


def register_renderer(role: str):
    def deco(fn: Renderer) -> Renderer:
        _RENDERERS[role] = fn
        return fn
    return deco


def default_renderers() -> dict[str, Renderer]:
    for name in _RENDERER_MODULES:
        importlib.import_module(name)
    return dict(_RENDERERS)


class Backend(Protocol):
    backend_id: str
    deterministic: bool

    def complete(self, req: GenerationRequest) -> GenerationResponse: ...


class TemplateBackend:
    """Deterministic backend: dispatches on ``req.role`` to a pure renderer."""

    backend_id = "template"
    deterministic = True

    def __init__(self, overrides: dict[str, Renderer] | None = None):
        self.renderers = default_renderers()
        self.renderers.update(overrides or {})

    def complete(self, req: GenerationRequest) -> GenerationResponse:
        renderer = self.renderers.get(req.role)
        if renderer is None:
            raise BackendError(f"template backend has no renderer for role {req.role!r}")
        return GenerationResponse(renderer(req), self.backend_id)


class RemoteBackend:
    """Chat-completions style HTTP JSON backend.

    Timeouts, connection errors and 5xx responses are retried with
    exponential backoff; after ``attempts`` tries BackendUnavailable is
    raised. Other non-2xx statuses raise BackendError at once.
    """

    backend_id = "remote"
    deterministic = False
    BODY_LIMIT = 500

    def __init__(self, endpoint: str, model: str, api_key: str | None = None,
                 timeout_s: float = 60.0, attempts: int = 3, backoff_s: float = 1.0,
                 transport: Callable | None = None, sleep: Callable[[float], None] = time.sleep,
                 clock: Callable[[], float] = time.monotonic):
        if not endpoint:
            raise ConfigError("remote backend needs an endpoint URL")
        if attempts < 1:
            raise ConfigError("attempts must be >= 1")
        self.endpoint = endpoint
        self.model = model
        self.api_key = api_key
        self.timeout_s = timeout_s
        self.attempts = attempts
        self.backoff_s = backoff_s
        self.transport = transport or requests.post
        self.sleep = sleep
        self.clock = clock
        self.network_calls = 0

    def body(self, req: GenerationRequest) -> dict:
        return {
            "model": self.model,
            "messages": [{"role": "system", "content": req.system_text},
                         {"role": "user", "content": req.user_text}],
            "temperature": req.temperature if req.temperature is not None else 0.2,
            "max_tokens": req.max_output_tokens,
        }

    def complete(self, req: GenerationRequest) -> GenerationResponse:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        body = self.body(req)
        last: str = ""
        status = None
        for attempt in range(self.attempts):
            if attempt:
                self.sleep(self.backoff_s * 2 ** (attempt - 1))
            start = self.clock()
            self.network_calls += 1
            try:
                resp = self.transport(self.endpoint, json=body, headers=headers, timeout=self.timeout_s)
            except (requests.Timeout, requests.ConnectionError, TimeoutError) as exc:
                last, status = f"{type(exc).__name__}: {exc}", None
                log.warning("remote attempt %d/%d failed: %s", attempt + 1, self.attempts, last)
                continue
            if resp.status_code >= 500:
                last, status = resp.text[:self.BODY_LIMIT], resp.status_code
                log.warning("remote attempt %d/%d got HTTP %d", attempt + 1, self.attempts, status)
                continue
            if not 200 <= resp.status_code < 300:
                raise BackendError(f"HTTP {resp.status_code}", resp.status_code, resp.text[:self.BODY_LIMIT])
            try:
                data = resp.json()
                text = data["choices"][0]["message"]["content"]
            except (ValueError, KeyError, IndexError, TypeError):
                raise BackendError("malformed completion response", resp.status_code,
                                   resp.text[:self.BODY_LIMIT]) from None
            usage = data.get("usage") or {}
            return GenerationResponse(text, self.backend_id, (self.clock() - start) * 1000.0,
                                      usage.get("prompt_tokens"), usage.get("completion_tokens"))
        raise BackendUnavailable(f"backend unavailable after {self.attempts} attempts: {last}", status, last)

    @classmethod
    def from_config(cls, cfg: dict, **kwargs) -> RemoteBackend:
        key_env = cfg.get("api_key_env", "UITRANS_API_KEY")
        return cls(endpoint=cfg.get("endpoint", ""), model=cfg.get("model", ""),
                   api_key=os.environ.get(key_env), timeout_s=float(cfg.get("timeout_s", 60.0)), **kwargs)


def _write_json(path: Path, data: dict) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n", encoding="utf-8")
    os.replace(tmp, path)


class RecordingBackend:
    """Pass-through that stores every request/response pair as ``<sha256>.json``."""

    def __init__(self, inner: Backend, directory: str | Path):
        self.inner = inner
        self.dir = Path(directory)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.backend_id = inner.backend_id
        self.deterministic = inner.deterministic
        _write_json(self.dir / "meta.json", {"backend_id": inner.backend_id,
                                             "deterministic": inner.deterministic})

    def complete(self, req: GenerationRequest) -> GenerationResponse:
        resp = self.inner.complete(req)
        _write_json(self.dir / f"{req.key()}.json", {"request": req.to_dict(), "response": resp.to_dict()})
        return resp


class ReplayBackend:
    """Serves recorded responses verbatim; never touches the network."""

    def __init__(self, directory: str | Path):
        self.dir = Path(directory)
        meta_path = self.dir / "meta.json"
        if not meta_path.is_file():
            raise ConfigError(f"{self.dir} is not a recording directory (no meta.json)")
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
        self.backend_id = meta["backend_id"]
        self.deterministic = bool(meta["deterministic"])
        self.network_calls = 0

    def complete(self, req: GenerationRequest) -> GenerationResponse:
        path = self.dir / f"{req.key()}.json"
        if not path.is_file():
            raise BackendError(f"no recorded response for {req.role} request {req.key()[:12]}")
        return GenerationResponse.from_dict(json.loads(path.read_text(encoding="utf-8"))["response"])

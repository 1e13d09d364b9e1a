"""Generation backends, prompt assembly and the call-counting gateway."""

from .backends import (
    Backend,
    RecordingBackend,
    RemoteBackend,
    ReplayBackend,
    TemplateBackend,
    default_renderers,
    register_renderer,
)
from .gateway import Gateway, make_gateway, make_parse_assist
from .prompts import PROMPT_CAP, build_request, fenced, render_prompt
from .types import ROLES, GenerationRequest, GenerationResponse

__all__ = [
    "Backend", "Gateway", "GenerationRequest", "GenerationResponse", "PROMPT_CAP", "ROLES",
    "RecordingBackend", "RemoteBackend", "ReplayBackend", "TemplateBackend", "build_request",
    "default_renderers", "fenced", "make_gateway", "make_parse_assist", "register_renderer",
    "render_prompt",
]

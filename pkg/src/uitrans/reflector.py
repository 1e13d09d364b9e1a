"""Verify generated components against their functional description and regenerate on failure."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

from .assembler.checker import UiNode, unit_outline
from .generator import EVENT_PATTERNS, GeneratedComponent, learned_entry, translate_unit
from .knowledge_base import DomainKnowledge, MappingEntry
from .llm_gateway import GenerationRequest, register_renderer
from .task_planner import FunctionalDescription, TranslationUnit, template_description

log = logging.getLogger(__name__)

DEFAULT_MAX_ITERS = 3
COVERAGE_TARGET = 0.8   # below this the report carries an advisory note
COVERAGE_FLOOR = 0.5    # below this C4 fails


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class ReflectionReport:
    unit_id: str
    verdict: str                      # pass | fail
    checks: list[CheckResult] = field(default_factory=list)
    iteration: int = 1
    advisories: list[str] = field(default_factory=list)
    critique: str = ""

    @property
    def failed(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "unit_id": self.unit_id,
            "verdict": self.verdict,
            "iteration": self.iteration,
            "checks": [[c.name, "pass" if c.passed else "fail", c.detail] for c in self.checks],
            "advisories": list(self.advisories),
            "critique": self.critique,
        }


def _child_positions(nodes: list[UiNode]) -> int:
    """Direct child positions of the unit's root component (slots plus inline children)."""
    roots = [n for n in nodes if n.name != "SLOT"] or nodes
    if not roots:
        return 0
    return len(roots[0].children)


def run_checks(component: GeneratedComponent, description: FunctionalDescription) -> tuple[list[CheckResult], list[str]]:
    """Deterministic checks C1-C4; returns (checks, advisories)."""
    code = component.arkui_code
    errors, outline = unit_outline(code)
    checks = [CheckResult("C1", not errors, "; ".join(map(str, errors)))]

    expected = description.child_total
    found = _child_positions(outline) if not errors else len(component.slots())
    checks.append(CheckResult("C2", expected == found, f"expected {expected} slots, found {found}"))

    advisories: list[str] = []
    missing = []
    for event in description.events:
        pattern = EVENT_PATTERNS.get(event)
        if pattern is None:
            advisories.append(f"event {event!r} has no ArkUI counterpart; not checked")
        elif not pattern.search(code):
            missing.append(event)
    checks.append(CheckResult("C3", not missing,
                              f"missing handlers for: {', '.join(missing)}" if missing else "all events handled"))

    total = component.attribute_total
    todo = min(component.todo_count, total)
    ratio = (total - todo) / total if total else 1.0
    checks.append(CheckResult("C4", ratio >= COVERAGE_FLOOR, f"attribute coverage {ratio:.2f} ({total - todo}/{total})"))
    if COVERAGE_FLOOR <= ratio < COVERAGE_TARGET:
        advisories.append(f"attribute coverage {ratio:.2f} below {COVERAGE_TARGET}")
    return checks, advisories


def reflect(component: GeneratedComponent, description: FunctionalDescription, gateway,
            iteration: int = 1) -> ReflectionReport:
    checks, advisories = run_checks(component, description)
    report = ReflectionReport(component.unit_id, "pass" if all(c.passed for c in checks) else "fail",
                              checks, iteration, advisories)
    payload = {
        "code": component.arkui_code,
        "description": description.to_text(),
        "failed_checks": [[c.name, c.detail] for c in report.failed],
    }
    report.critique = gateway.request("reflect", payload).text.strip()
    return report


@register_renderer("reflect")
def render_reflect(req: GenerationRequest) -> str:
    failed = req.payload.get("failed_checks", [])
    if not failed:
        return "OK"
    return "\n".join(f"{name}: {detail}" for name, detail in failed)


def reflect_loop(unit: TranslationUnit, knowledge: DomainKnowledge, gateway,
                 max_iters: int = DEFAULT_MAX_ITERS, resources=None
                 ) -> tuple[GeneratedComponent, ReflectionReport, MappingEntry | None]:
    """Generate, check, and regenerate with the failed-check details until pass or ``max_iters``.

    Each iteration makes one generate and one reflect call. On exhaustion the
    attempt with the fewest failed checks wins (earliest on ties).
    """
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    description = unit.description or template_description(unit)
    attempts: list[tuple[GeneratedComponent, ReflectionReport]] = []
    feedback: list[str] = []
    for i in range(1, max_iters + 1):
        component = translate_unit(unit, knowledge, gateway, resources, feedback)
        report = reflect(component, description, gateway, i)
        attempts.append((component, report))
        if report.verdict == "pass":
            break
        feedback = [f"{c.name}: {c.detail}" for c in report.failed]
        if report.critique and not gateway.deterministic:
            feedback.append(f"review: {report.critique}")
    component, report = min(attempts, key=lambda a: (len(a[1].failed), a[1].iteration))
    component.attempts = len(attempts)
    if report.verdict == "fail":
        log.warning("unit %s (%s) failed reflection after %d attempts: %s", unit.unit_id, unit.tag,
                    len(attempts), "; ".join(f"{c.name} {c.detail}" for c in report.failed))
    enrichment = None
    # only documentation-grounded inferences are worth learning; a bare fallback is not
    if component.mode == "inferred" and report.verdict == "pass" and knowledge.doc_hits:
        enrichment = learned_entry(unit, component)
    return component, report, enrichment


def dump_reports(reports: list[ReflectionReport], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in reports:
            fh.write(json.dumps(r.to_dict(), ensure_ascii=False) + "\n")

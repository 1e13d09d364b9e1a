"""End-to-end orchestration: parse, plan, translate with reflection, assemble, emit."""

from __future__ import annotations

import json
import logging
import os
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .android_parser import AndroidProject, parse_project
from .assembler import ArkUIPage, HarmonyProject, assemble_page, assemble_project, write_project
from .errors import ConfigError
from .generator import GeneratedComponent
from .knowledge_base import SEED_CORPUS_PATH, SEED_MAPPING_PATH, KnowledgeBase, enrich, load_stores, query_mapping
from .llm_gateway import Gateway, make_gateway, make_parse_assist
from .reflector import DEFAULT_MAX_ITERS, ReflectionReport, dump_reports, reflect_loop
from .task_planner import DEFAULT_MAX_UNIT_LINES, TranslationPlan, TranslationUnit, plan

log = logging.getLogger(__name__)

REPORT_NAME = "uitrans-report.json"
LEARNED_TABLE = "uitrans-kb/mapping_table.json"


@dataclass
class RunConfig:
    input_dir: Path | None = None
    out_dir: Path | None = None
    pages_json: Path | None = None          # parsed project from `parse --dump-pages`
    manifest: str | None = None
    backend: str = "template"
    backend_settings: dict = field(default_factory=dict)
    max_unit_lines: int = DEFAULT_MAX_UNIT_LINES
    max_reflection_iters: int = DEFAULT_MAX_ITERS
    kb_mapping: Path = SEED_MAPPING_PATH
    kb_corpus: Path = SEED_CORPUS_PATH
    kb_learned: Path | None = None          # enrichment target; default: inside the output tree
    jobs: int = field(default_factory=lambda: os.cpu_count() or 1)
    record_llm: str | None = None
    replay_llm: str | None = None
    force: bool = False
    llm_assist_parse: bool = False
    dump_pages: Path | None = None
    dump_plan: Path | None = None
    dump_units: Path | None = None
    dump_reflections: Path | None = None

    def validate(self) -> None:
        if self.pages_json is None:
            if self.input_dir is None or not Path(self.input_dir).is_dir():
                raise ConfigError(f"input directory {self.input_dir} does not exist")
        elif not Path(self.pages_json).is_file():
            raise ConfigError(f"pages file {self.pages_json} does not exist")
        if not 5 <= self.max_unit_lines <= 500:
            raise ConfigError("max_unit_lines must be within [5, 500]")
        if not 1 <= self.max_reflection_iters <= 10:
            raise ConfigError("max_reflection_iters must be within [1, 10]")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        if self.record_llm and self.replay_llm:
            raise ConfigError("--record-llm and --replay-llm are mutually exclusive")


@dataclass
class RunReport:
    timings: dict[str, float] = field(default_factory=dict)
    units: int = 0
    modes: dict[str, int] = field(default_factory=lambda: {"mapped": 0, "inferred": 0})
    reflection: dict[str, int] = field(default_factory=lambda: {"pass": 0, "fail": 0})
    warnings: list[str] = field(default_factory=list)
    enrichments: int = 0
    gateway_calls: int = 0
    routes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "timings_s": {k: round(v, 4) for k, v in self.timings.items()},
            "units": self.units,
            "modes": dict(self.modes),
            "reflection": dict(self.reflection),
            "enrichments": self.enrichments,
            "gateway_calls": self.gateway_calls,
            "routes": list(self.routes),
            "warnings": list(self.warnings),
        }


@dataclass
class RunResult:
    project: AndroidProject
    plan: TranslationPlan
    components: dict[str, GeneratedComponent]
    reflections: list[ReflectionReport]
    harmony: HarmonyProject
    report: RunReport
    kb: KnowledgeBase


class _Timer:
    def __init__(self, report: RunReport, stage: str):
        self.report, self.stage = report, stage

    def __enter__(self):
        self.start = time.perf_counter()

    def __exit__(self, *exc):
        self.report.timings[self.stage] = time.perf_counter() - self.start


def load_project(config: RunConfig, gateway: Gateway | None = None) -> AndroidProject:
    if config.pages_json is not None:
        return AndroidProject.load_pages(config.pages_json)
    assist = make_parse_assist(gateway) if config.llm_assist_parse and gateway is not None else None
    return parse_project(config.input_dir, config.manifest, assist=assist)


def translate_batch(units: list[TranslationUnit], kb: KnowledgeBase, gateway: Gateway, config: RunConfig,
                    resources, pool: ThreadPoolExecutor | None):
    def work(unit: TranslationUnit):
        knowledge = query_mapping(unit, kb)
        return reflect_loop(unit, knowledge, gateway, config.max_reflection_iters, resources)

    if pool is None:
        return [work(u) for u in units]
    return list(pool.map(work, units))


def run(config: RunConfig, gateway: Gateway | None = None) -> RunResult:
    """Translate a project in memory (nothing is written except dumps and the learned table)."""
    config.validate()
    report = RunReport()
    gateway = gateway or make_gateway(config.backend, config.backend_settings,
                                      record=config.record_llm, replay=config.replay_llm)
    with _Timer(report, "parse"):
        project = load_project(config, gateway)
    report.warnings += [str(w) for w in project.warnings]
    if config.dump_pages:
        project.dump_pages(config.dump_pages)

    with _Timer(report, "plan"):
        translation_plan = plan(project, config.max_unit_lines, gateway)
    if config.dump_plan:
        translation_plan.dump(config.dump_plan)

    kb = load_stores(config.kb_mapping, config.kb_corpus)
    components: dict[str, GeneratedComponent] = {}
    reflections: list[ReflectionReport] = []
    with _Timer(report, "translate"):
        pool = ThreadPoolExecutor(max_workers=config.jobs) if config.jobs > 1 else None
        try:
            # one batch per page; enrichment lands between batches so later pages can reuse it
            for page_id, units in translation_plan.page_units.items():
                results = translate_batch(units, kb, gateway, config, project.resources, pool)
                for unit, (component, reflection, learned) in zip(units, results):
                    components[unit.unit_id] = component
                    reflections.append(reflection)
                    report.modes[component.mode] += 1
                    report.reflection[reflection.verdict] += 1
                    if reflection.verdict == "fail":
                        report.warnings.append(
                            f"ReflectionFailed: unit {unit.unit_id} ({unit.tag}, page {page_id}): "
                            + "; ".join(f"{c.name} {c.detail}" for c in reflection.failed))
                    if learned is not None and enrich(learned, kb, config.kb_learned):
                        report.enrichments += 1
        finally:
            if pool is not None:
                pool.shutdown()
    report.units = len(components)

    if config.dump_units:
        Path(config.dump_units).mkdir(parents=True, exist_ok=True)
        for uid, comp in components.items():
            (Path(config.dump_units) / f"{uid}.ets.partial").write_text(comp.arkui_code + "\n", encoding="utf-8")
    if config.dump_reflections:
        dump_reports(reflections, config.dump_reflections)

    with _Timer(report, "assemble"):
        pages: list[ArkUIPage] = []
        for page_id, units in translation_plan.page_units.items():
            page = project.pages[page_id]
            pages.append(assemble_page([components[u.unit_id] for u in units], page, units, project.manifest))
        harmony = assemble_project(pages, project, project.resources)
    for p in pages:
        report.warnings += [f"{p.route_name}: {w}" for w in p.warnings]
    report.warnings += harmony.warnings
    report.routes = list(harmony.route_table)
    report.gateway_calls = gateway.calls
    return RunResult(project, translation_plan, components, reflections, harmony, report, kb)


def translate(config: RunConfig, gateway: Gateway | None = None) -> RunResult:
    """Full run that writes the HarmonyOS tree (plus report) to ``config.out_dir`` atomically."""
    if config.out_dir is None:
        raise ConfigError("--out is required")
    out = Path(config.out_dir)
    if out.exists() and (not out.is_dir() or any(out.iterdir())) and not config.force:
        raise ConfigError(f"{out} is not empty; pass --force to overwrite")
    with tempfile.TemporaryDirectory() as scratch:
        own_table = config.kb_learned is None
        if own_table:
            config.kb_learned = Path(scratch) / "mapping_table.json"
        try:
            result = run(config, gateway)
            extra: dict[str, str | bytes] = {}
            if own_table and config.kb_learned.exists():
                extra[LEARNED_TABLE] = config.kb_learned.read_bytes()
            with _Timer(result.report, "emit"):
                write_project(result.harmony, out, config.force, extra)
            # written last so it can carry the emit timing; same temp-then-rename as the tree
            tmp = out / (REPORT_NAME + ".tmp")
            tmp.write_text(json.dumps(result.report.to_dict(), indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
            os.replace(tmp, out / REPORT_NAME)
        finally:
            if own_table:
                config.kb_learned = None
    return result

"""Command-line entry point.

Exit codes: 0 success, 1 usage or configuration error, 2 fatal pipeline error.
"""

from __future__ import annotations

import argparse
import configparser
import json
import logging
import os
import sys
from pathlib import Path

from . import metrics
from .android_parser import parse_project
from .errors import ConfigError, ManifestNotFound, UITransError
from .knowledge_base import SEED_CORPUS_PATH, SEED_MAPPING_PATH, load_stores, retrieve
from .llm_gateway import make_gateway, make_parse_assist
from .pipeline import REPORT_NAME, RunConfig, load_project, translate
from .task_planner import DEFAULT_MAX_UNIT_LINES, plan

log = logging.getLogger("uitrans")

EXIT_OK, EXIT_CONFIG, EXIT_FATAL = 0, 1, 2
BACKEND_KEYS = ("kind", "endpoint", "model", "api_key_env", "timeout_s", "max_concurrency")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; 2 is reserved for pipeline failures here
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _globals() -> argparse.ArgumentParser:
    # SUPPRESS so a flag given before the subcommand is not reset by the subparser default
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    g.add_argument("--config", type=Path, default=argparse.SUPPRESS, help="INI file with [backend], [run] and [kb] sections")
    g.add_argument("--jobs", type=int, default=argparse.SUPPRESS, help="concurrent unit translations")
    g.add_argument("-v", "--verbose", action="count", default=argparse.SUPPRESS)
    g.add_argument("--record-llm", metavar="DIR", default=argparse.SUPPRESS)
    g.add_argument("--replay-llm", metavar="DIR", default=argparse.SUPPRESS)
    g.add_argument("--force", action="store_true", default=argparse.SUPPRESS)
    return p


def _run_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--manifest", help="AndroidManifest.xml path relative to the project root")
    p.add_argument("--backend", choices=("template", "remote"), help="generation backend (default: template)")
    p.add_argument("--max-unit-lines", type=int)
    p.add_argument("--llm-assist-parse", action="store_true", help="supplement the Java scan with a gateway call")


def build_parser() -> argparse.ArgumentParser:
    common = _globals()
    parser = _Parser(prog="uitrans", description="Translate Android XML UIs to HarmonyOS ArkUI.", parents=[common])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("translate", parents=[common], help="run the full pipeline")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", type=Path, help="Android project root")
    src.add_argument("--pages", type=Path, help="pages JSON written by `parse --dump-pages`")
    p.add_argument("--out", type=Path, required=True, help="HarmonyOS output directory")
    _run_options(p)
    p.add_argument("--max-reflection-iters", type=int)
    p.add_argument("--kb-mapping", type=Path)
    p.add_argument("--kb-corpus", type=Path)
    p.add_argument("--kb-learned", type=Path, help="persist learned mappings here instead of the output tree")
    p.add_argument("--dump-pages", type=Path)
    p.add_argument("--dump-plan", type=Path)
    p.add_argument("--dump-units", type=Path)
    p.add_argument("--dump-reflections", type=Path)

    p = sub.add_parser("parse", parents=[common], help="parse a project and dump its pages")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--manifest")
    p.add_argument("--llm-assist-parse", action="store_true")
    p.add_argument("--backend", choices=("template", "remote"))
    p.add_argument("--dump-pages", type=Path, help="output file (default: stdout)")

    p = sub.add_parser("plan", parents=[common], help="decompose pages into translation units")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", type=Path)
    src.add_argument("--pages", type=Path)
    _run_options(p)
    p.add_argument("--dump-plan", type=Path, help="output file (default: stdout)")

    p = sub.add_parser("evaluate", parents=[common], help="line-level success rates")
    p.add_argument("--generated", type=Path, required=True)
    p.add_argument("--reference", type=Path, required=True)
    p.add_argument("--map", type=Path, help="pairs JSON of (scope, id, generated_path, reference_path)")
    p.add_argument("--format", choices=("table", "json"), default="table")

    p = sub.add_parser("kb", parents=[common], help="knowledge base tools")
    kb_sub = p.add_subparsers(dest="kb_command", required=True, parser_class=_Parser)
    for name in ("validate", "query"):
        q = kb_sub.add_parser(name, parents=[common])
        q.add_argument("--mapping", type=Path)
        q.add_argument("--corpus", type=Path)
    q.add_argument("text")
    q.add_argument("--store", choices=("mapping", "docs"), default="mapping")
    q.add_argument("--tag", help="source tag (mapping) or component name (docs) for the exact-match bonus")
    q.add_argument("-k", type=int, default=3)
    return parser


# -- configuration -----------------------------------------------------------

def read_config(path: Path | None) -> configparser.ConfigParser:
    cfg = configparser.ConfigParser()
    if path is not None:
        if not path.is_file():
            raise ConfigError(f"config file {path} does not exist")
        try:
            cfg.read(path, encoding="utf-8")
        except configparser.Error as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    return cfg


def _cfg_int(cfg, section: str, key: str, default):
    try:
        return cfg.getint(section, key, fallback=default)
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key}: {exc}") from exc


def _pick(flag, cfg_value):
    return cfg_value if flag is None else flag


def backend_settings(args, cfg) -> dict:
    settings = dict(cfg["backend"]) if cfg.has_section("backend") else {}
    unknown = set(settings) - set(BACKEND_KEYS)
    if unknown:
        raise ConfigError(f"unknown [backend] keys: {', '.join(sorted(unknown))}")
    if getattr(args, "backend", None):
        settings["kind"] = args.backend
    settings.setdefault("kind", "template")
    return settings


def run_config(args, cfg) -> RunConfig:
    settings = backend_settings(args, cfg)
    jobs = getattr(args, "jobs", None) or _cfg_int(cfg, "run", "jobs", os.cpu_count() or 1)
    return RunConfig(
        input_dir=args.input,
        out_dir=getattr(args, "out", None),
        pages_json=args.pages,
        manifest=_pick(args.manifest, cfg.get("run", "manifest", fallback=None)),
        backend=settings.pop("kind"),
        backend_settings=settings,
        max_unit_lines=_pick(args.max_unit_lines, _cfg_int(cfg, "run", "max_unit_lines", DEFAULT_MAX_UNIT_LINES)),
        max_reflection_iters=_pick(getattr(args, "max_reflection_iters", None),
                                   _cfg_int(cfg, "run", "max_reflection_iters", 3)),
        kb_mapping=_pick(getattr(args, "kb_mapping", None), Path(cfg.get("kb", "mapping", fallback=SEED_MAPPING_PATH))),
        kb_corpus=_pick(getattr(args, "kb_corpus", None), Path(cfg.get("kb", "corpus", fallback=SEED_CORPUS_PATH))),
        kb_learned=_pick(getattr(args, "kb_learned", None),
                         Path(cfg["kb"]["learned"]) if cfg.has_option("kb", "learned") else None),
        jobs=jobs,
        record_llm=getattr(args, "record_llm", None),
        replay_llm=getattr(args, "replay_llm", None),
        force=getattr(args, "force", False),
        llm_assist_parse=args.llm_assist_parse,
        dump_pages=getattr(args, "dump_pages", None),
        dump_plan=getattr(args, "dump_plan", None),
        dump_units=getattr(args, "dump_units", None),
        dump_reflections=getattr(args, "dump_reflections", None),
    )


def _write_or_print(text: str, path: Path | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text, encoding="utf-8")


# -- subcommands -------------------------------------------------------------

def cmd_translate(args, cfg) -> int:
    config = run_config(args, cfg)
    config.validate()
    result = translate(config)
    r = result.report
    print(f"translated {r.units} units ({r.modes['mapped']} mapped, {r.modes['inferred']} inferred) "
          f"into {len(result.harmony.pages)} pages; reflection {r.reflection['pass']} pass / "
          f"{r.reflection['fail']} fail; {r.enrichments} learned mappings; {len(r.warnings)} warnings")
    print(f"report: {Path(config.out_dir) / REPORT_NAME}")
    return EXIT_OK


def cmd_parse(args, cfg) -> int:
    if not args.input.is_dir():
        raise ConfigError(f"input directory {args.input} does not exist")
    assist = None
    if args.llm_assist_parse:
        settings = backend_settings(args, cfg)
        gateway = make_gateway(settings.pop("kind"), settings, getattr(args, "record_llm", None),
                               getattr(args, "replay_llm", None))
        assist = make_parse_assist(gateway)
    manifest = args.manifest or cfg.get("run", "manifest", fallback=None)
    project = parse_project(args.input, manifest, assist=assist)
    for w in project.warnings:
        log.warning("%s", w)
    _write_or_print(json.dumps(project.to_dict(), indent=2, ensure_ascii=False) + "\n", args.dump_pages)
    return EXIT_OK


def cmd_plan(args, cfg) -> int:
    config = run_config(args, cfg)
    config.validate()
    gateway = make_gateway(config.backend, config.backend_settings, config.record_llm, config.replay_llm)
    project = load_project(config, gateway)
    _write_or_print(plan(project, config.max_unit_lines, gateway).to_json(), args.dump_plan)
    return EXIT_OK


def cmd_evaluate(args, cfg) -> int:
    for d in (args.generated, args.reference):
        if not d.is_dir():
            raise ConfigError(f"{d} is not a directory")
    if args.map is not None:
        records = metrics.load_pairs(args.map, args.generated, args.reference)
    else:
        records = metrics.evaluate_dirs(args.generated, args.reference)
    sys.stdout.write(metrics.emit_report(metrics.build_report(records), args.format))
    return EXIT_OK


def cmd_kb(args, cfg) -> int:
    mapping = args.mapping or Path(cfg.get("kb", "mapping", fallback=SEED_MAPPING_PATH))
    corpus = args.corpus or Path(cfg.get("kb", "corpus", fallback=SEED_CORPUS_PATH))
    for path in (mapping, corpus):
        if not Path(path).is_file():
            raise ConfigError(f"{path} does not exist")
    kb = load_stores(mapping, corpus)
    if args.kb_command == "validate":
        print(f"ok: {len(kb.mappings)} mapping entries, {len(kb.docs)} documents")
        return EXIT_OK
    if args.k < 1:
        raise ConfigError("-k must be >= 1")
    items = kb.mappings if args.store == "mapping" else kb.docs
    for hit in retrieve(args.text, kb, args.store, args.tag, k=args.k).hits:
        item = items[hit.id]
        target = item.target_component if args.store == "mapping" else item.component_name
        label = f"{item.source_tag} -> {target}" if args.store == "mapping" else target
        print(f"{hit.id}\t{hit.rerank_score:.4f}\t{hit.bm25_score:.4f}\t{label}")
    return EXIT_OK


COMMANDS = {"translate": cmd_translate, "parse": cmd_parse, "plan": cmd_plan,
            "evaluate": cmd_evaluate, "kb": cmd_kb}


def _defaults(args) -> None:
    for name, value in (("config", None), ("jobs", None), ("verbose", 0), ("record_llm", None),
                        ("replay_llm", None), ("force", False)):
        if not hasattr(args, name):
            setattr(args, name, value)
    for name in ("pages", "manifest", "max_unit_lines", "llm_assist_parse", "input"):
        if not hasattr(args, name):
            setattr(args, name, None)


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_CONFIG
    _defaults(args)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.jobs is not None and args.jobs < 1:
            raise ConfigError("--jobs must be >= 1")
        if args.record_llm and args.replay_llm:
            raise ConfigError("--record-llm and --replay-llm are mutually exclusive")
        cfg = read_config(args.config)
        return COMMANDS[args.command](args, cfg)
    except (ConfigError, ManifestNotFound) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except UITransError as exc:
        print(f"fatal: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FATAL
    except OSError as exc:
        print(f"fatal: {exc}", file=sys.stderr)
        return EXIT_FATAL


if __name__ == "__main__":
    sys.exit(main())

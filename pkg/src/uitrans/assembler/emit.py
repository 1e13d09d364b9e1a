from __future__ import annotations

import json
import logging
import os
import shutil
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from ..android_parser import AndroidProject, ManifestInfo, PageRecord, ResourceIndex
from ..android_parser.resources import DIMENSION, HEX_COLOR
from ..errors import ConfigError, MissingUnit, UITransError
from ..generator import INDENT, NAV_RE, SLOT, SLOT_RE, GeneratedComponent
from ..naming import disambiguate, layout_struct_name, route_name
from ..task_planner import TranslationUnit

log = logging.getLogger(__name__)

PAGES_DIR = "entry/src/main/ets/pages"
ELEMENT_DIR = "entry/src/main/resources/base/element"
MEDIA_DIR = "entry/src/main/resources/base/media"
PROFILE_DIR = "entry/src/main/resources/base/profile"
MEDIA_SUFFIXES = (".png", ".jpg", ".jpeg", ".webp", ".gif", ".bmp", ".svg")
ROUTER_IMPORT = "import router from '@ohos.router'"


@dataclass
class ArkUIPage:
    page_id: str
    struct_name: str
    ets_source: str
    route_name: str
    child_components: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


@dataclass
class HarmonyProject:
    pages: list[ArkUIPage]
    resource_files: dict[str, str | bytes]
    route_table: list[str]
    warnings: list[str] = field(default_factory=list)

    def files(self) -> dict[str, str | bytes]:
        out: dict[str, str | bytes] = {f"{PAGES_DIR}/{p.route_name}.ets": p.ets_source for p in self.pages}
        out.update(self.resource_files)
        return dict(sorted(out.items()))


def _indent(code: str, prefix: str) -> str:
    return "\n".join(prefix + line if line.strip() else "" for line in code.splitlines())


def struct_source(name: str, code: str, entry: bool = False) -> str:
    head = "@Entry\n@Component\n" if entry else "@Component\n"
    return f"{head}struct {name} {{\n  build() {{\n{_indent(code, INDENT * 2)}\n  }}\n}}\n"


def fill_slot(code: str, child_id: str, child_code: str, warnings: list[str]) -> str:
    marker = SLOT.format(child_id)
    lines = code.splitlines()
    for i, line in enumerate(lines):
        if marker not in line:
            continue
        indent = line[: len(line) - len(line.lstrip())]
        if line.strip() == marker:
            lines[i:i + 1] = _indent(child_code, indent).splitlines()
        else:
            first, *rest = child_code.splitlines() or [""]
            replacement = "\n".join([first] + [indent + r if r.strip() else "" for r in rest])
            lines[i] = line.replace(marker, replacement, 1)
        return "\n".join(lines)
    warnings.append(f"no slot for child unit {child_id}; appended to the end of its parent")
    close = next((i for i in range(len(lines) - 1, -1, -1) if lines[i].strip() == "}"), None)
    if close is None:
        return code + "\n" + child_code
    indent = lines[close][: len(lines[close]) - len(lines[close].lstrip())] + INDENT
    lines[close:close] = _indent(child_code, indent).splitlines()
    return "\n".join(lines)


def _layout_order(primary: str | None, units: list[TranslationUnit], warnings: list[str]) -> list[str]:
    """Layouts in definition order: included layouts before the layouts that use them."""
    edges: dict[str, list[str]] = {}
    layouts: list[str] = []
    for u in units:
        if u.layout_name not in layouts:
            layouts.append(u.layout_name)
        if u.include_layout:
            edges.setdefault(u.layout_name, []).append(u.include_layout)
    order: list[str] = []
    state: dict[str, int] = {}

    def visit(name: str) -> None:
        state[name] = 1
        for nxt in edges.get(name, []):
            if state.get(nxt) == 1:
                warnings.append(f"include cycle {name} -> {nxt} broken at the back-edge")
            elif nxt not in state:
                visit(nxt)
        state[name] = 2
        order.append(name)

    for name in ([primary] if primary in layouts else []) + layouts:
        if name not in state:
            visit(name)
    return order


def assemble_page(components: list[GeneratedComponent], page: PageRecord, units: list[TranslationUnit],
                  manifest: ManifestInfo | None = None) -> ArkUIPage:
    """Splice a page's unit code bottom-up into an @Entry struct plus helper structs."""
    comps = {c.unit_id: c for c in components}
    by_id = {u.unit_id: u for u in units}
    route = route_name(page.page_id)
    warnings: list[str] = []
    structs: list[str] = []
    child_components: list[str] = []
    layout_names = {u.layout_name for u in units}
    taken = {route} | {layout_struct_name(n) for n in layout_names}
    if len(taken) != len(layout_names) + 1:
        raise UITransError(f"page {page.page_id}: struct name collision between route and layout structs")

    def expand(uid: str) -> str:
        if uid not in comps or uid not in by_id:
            raise MissingUnit(uid)
        unit, code = by_id[uid], comps[uid].arkui_code
        for sid in SLOT_RE.findall(code):
            if sid not in unit.child_units:
                raise MissingUnit(sid)
        for cid in unit.child_units:
            child_code = expand(cid)
            if by_id[cid].source_node.node_count() > 1:
                base = comps[cid].component_name
                name = disambiguate(base, taken)
                if name != base:
                    warnings.append(f"DuplicateStructName: {base} renamed to {name}")
                taken.add(name)
                structs.append(struct_source(name, child_code))
                child_components.append(name)
                child_code = f"{name}()"
            code = fill_slot(code, cid, child_code, warnings)
        return code

    roots = {u.layout_name: u for u in units if u.path == ()}
    primary = page.primary_layout if page.primary_layout in roots else next(iter(roots), None)
    for name in _layout_order(primary, units, warnings):
        if name == primary:
            continue
        code = expand(roots[name].unit_id)
        struct = layout_struct_name(name)
        structs.append(struct_source(struct, code))
        child_components.append(struct)
    if primary is None:
        warnings.append(f"page {page.page_id} has no layout; emitted an empty page")
        body = "Column() {\n}"
    else:
        body = expand(roots[primary].unit_id)
    structs.append(struct_source(route, body, entry=True))
    source = "\n".join(structs)

    uses_router = False

    def nav(match) -> str:
        nonlocal uses_router
        act = manifest.find(match.group(1)) if manifest else None
        if act is None:
            warnings.append(f"navigation target {match.group(1)} is not a known page")
            return f"// TODO(navigation): {match.group(1)}"
        uses_router = True
        return f"router.pushUrl({{ url: 'pages/{route_name(act.name)}' }})"

    source = NAV_RE.sub(nav, source)
    if uses_router:
        source = ROUTER_IMPORT + "\n\n" + source
    if SLOT_RE.search(source):
        raise MissingUnit(SLOT_RE.search(source).group(1))
    for w in warnings:
        log.warning("%s: %s", page.page_id, w)
    return ArkUIPage(page.page_id, route, source, route, child_components, warnings)


# -- project -----------------------------------------------------------------

def route_order(project: AndroidProject, page_ids: list[str], warnings: list[str]) -> list[str]:
    """Launcher first, then depth-first along navigation edges; back-edges are dropped with a warning."""
    available = [a.name for a in project.manifest.activities if a.name in page_ids]
    available += [p for p in page_ids if p not in available]
    launcher = project.manifest.launcher
    start = [launcher.name] if launcher and launcher.name in available else []
    if not start and available:
        warnings.append(f"no launcher activity; {available[0]} placed first")
    order: list[str] = []
    state: dict[str, int] = {}

    def visit(pid: str) -> None:
        state[pid] = 1
        order.append(pid)
        page = project.pages.get(pid)
        for edge in page.dependencies if page else []:
            if edge.kind != "navigation" or edge.target not in available:
                continue
            if state.get(edge.target) == 1:
                warnings.append(f"navigation cycle {route_name(pid)} -> {route_name(edge.target)} "
                                "broken at the back-edge")
            elif edge.target not in state:
                visit(edge.target)
        state[pid] = 2

    for pid in start + available:
        if pid not in state:
            visit(pid)
    return order


def _json(data) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def _color_value(value: str) -> str:
    if HEX_COLOR.match(value) and len(value) in (4, 5):
        return "#" + "".join(c * 2 for c in value[1:]).upper()
    return value.upper() if HEX_COLOR.match(value) else value


def _float_value(value: str) -> str:
    d = DIMENSION.match(value)
    if not d:
        return value
    unit = {"dp": "vp", "dip": "vp", "sp": "fp", None: ""}.get(d.group(2), d.group(2))
    return d.group(1) + unit


def resource_files(resources: ResourceIndex, root: Path | None, warnings: list[str]) -> dict[str, str | bytes]:
    files: dict[str, str | bytes] = {
        f"{ELEMENT_DIR}/string.json": _json({"string": [{"name": k, "value": v} for k, v in resources.strings.items()]}),
        f"{ELEMENT_DIR}/color.json": _json({"color": [{"name": k, "value": _color_value(v)}
                                                      for k, v in resources.colors.items()]}),
        f"{ELEMENT_DIR}/float.json": _json({"float": [{"name": k, "value": _float_value(v)}
                                                      for k, v in resources.dimens.items()]}),
    }
    for key, rel in resources.drawables.items():
        suffix = Path(rel).suffix.lower()
        if suffix not in MEDIA_SUFFIXES:
            warnings.append(f"drawable {key} ({rel}) is not a bitmap; not copied")
            continue
        src = (root / rel) if root else Path(rel)
        if not src.is_file():
            warnings.append(f"drawable {key} missing at {rel}; not copied")
            continue
        files[f"{MEDIA_DIR}/{key}{suffix}"] = src.read_bytes()
    return files


def assemble_project(pages: list[ArkUIPage], project: AndroidProject,
                     resources: ResourceIndex | None = None) -> HarmonyProject:
    resources = resources or project.resources
    warnings: list[str] = []
    by_id = {p.page_id: p for p in pages}
    order = route_order(project, list(by_id), warnings)
    ordered = [by_id[pid] for pid in order]
    routes = [p.route_name for p in ordered]
    if len(set(routes)) != len(routes):
        raise UITransError(f"duplicate route names: {routes}")
    files = resource_files(resources, Path(project.root_path), warnings)
    files[f"{PROFILE_DIR}/main_pages.json"] = _json({"src": [f"pages/{r}" for r in routes]})
    files["entry/src/main/module.json5"] = _json({
        "module": {
            "name": "entry",
            "type": "entry",
            "description": f"translated from {project.manifest.package_name}",
            "deviceTypes": ["phone", "tablet"],
            "deliveryWithInstall": True,
            "pages": "$profile:main_pages",
        }
    })
    files["AppScope/app.json5"] = _json({
        "app": {
            "bundleName": project.manifest.package_name,
            "vendor": "translated",
            "versionCode": 1000000,
            "versionName": "1.0.0",
        }
    })
    for w in warnings:
        log.warning(w)
    return HarmonyProject(ordered, files, routes, warnings)


def write_project(harmony: HarmonyProject, out_dir: str | Path, force: bool = False,
                  extra: dict[str, str | bytes] | None = None) -> Path:
    """Write the tree to ``out_dir`` via a sibling staging directory and a rename.

    A non-empty ``out_dir`` is refused unless ``force`` is set.
    """
    out = Path(out_dir)
    if out.exists() and (not out.is_dir() or any(out.iterdir())) and not force:
        raise ConfigError(f"{out} is not empty; pass --force to overwrite")
    out.parent.mkdir(parents=True, exist_ok=True)
    staging = Path(tempfile.mkdtemp(prefix=f".{out.name}.", dir=out.parent))
    try:
        files = harmony.files()
        files.update(extra or {})
        for rel, content in sorted(files.items()):
            path = staging / rel
            path.parent.mkdir(parents=True, exist_ok=True)
            if isinstance(content, bytes):
                path.write_bytes(content)
            else:
                path.write_text(content, encoding="utf-8", newline="\n")
        if out.exists():
            backup = Path(tempfile.mkdtemp(prefix=f".{out.name}.old.", dir=out.parent))
            os.replace(out, backup / "tree")
            os.replace(staging, out)
            shutil.rmtree(backup, ignore_errors=True)
        else:
            os.replace(staging, out)
    except BaseException:
        shutil.rmtree(staging, ignore_errors=True)
        raise
    return out

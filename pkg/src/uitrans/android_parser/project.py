"""Android project model and the parse/resolve passes that build it."""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import ManifestNotFound
from .java_scan import InteractionFact, InteractionKind, extract_interactions
from .layout import LayoutNode, NodeKind, SourceSpan, parse_layout
from .manifest import ManifestInfo, parse_manifest
from .resources import ResourceIndex, index_resources

log = logging.getLogger(__name__)

MANIFEST_CANDIDATES = (
    "app/src/main/AndroidManifest.xml",
    "src/main/AndroidManifest.xml",
    "AndroidManifest.xml",
)
_RESOURCE_REF = re.compile(r"^@(?:\+)?(string|color|dimen|drawable|mipmap)/(\w+)$")
_INFLATE = re.compile(r"\binflate\s*\(\s*R\s*\.\s*layout\s*\.\s*(\w+)")
_SKIP_DIRS = {"build", ".gradle", ".git", ".idea"}


@dataclass
class DependencyEdge:
    source: str
    target: str
    kind: str  # content_view | include | fragment | navigation
    origin: str | None = None  # layout that holds the include/fragment node
    span: SourceSpan | None = None

    def to_dict(self) -> dict:
        return {"source": self.source, "target": self.target, "kind": self.kind,
                "origin": self.origin, "span": self.span.to_dict() if self.span else None}

    @classmethod
    def from_dict(cls, d: dict) -> DependencyEdge:
        span = SourceSpan.from_dict(d["span"]) if d.get("span") else None
        return cls(d["source"], d["target"], d["kind"], d.get("origin"), span)


@dataclass
class ProjectWarning:
    code: str
    message: str
    span: SourceSpan | None = None

    def to_dict(self) -> dict:
        return {"code": self.code, "message": self.message,
                "span": self.span.to_dict() if self.span else None}

    @classmethod
    def from_dict(cls, d: dict) -> ProjectWarning:
        span = SourceSpan.from_dict(d["span"]) if d.get("span") else None
        return cls(d["code"], d["message"], span)

    def __str__(self) -> str:
        return f"{self.code}: {self.message}"


@dataclass
class PageRecord:
    activity_name: str
    java_code: str = ""
    java_path: str | None = None
    xml_layouts: list[tuple[str, LayoutNode]] = field(default_factory=list)
    dependencies: list[DependencyEdge] = field(default_factory=list)
    resource_refs: list[str] = field(default_factory=list)
    interactions: list[InteractionFact] = field(default_factory=list)
    subpages: list[PageRecord] = field(default_factory=list)
    primary_layout: str | None = None

    @property
    def page_id(self) -> str:
        return self.activity_name

    @property
    def simple_name(self) -> str:
        return self.activity_name.rsplit(".", 1)[-1]

    def layout(self, name: str) -> LayoutNode | None:
        return next((node for n, node in self.xml_layouts if n == name), None)

    def all_interactions(self) -> list[InteractionFact]:
        facts = list(self.interactions)
        for sub in self.subpages:
            facts.extend(sub.all_interactions())
        return facts

    def to_dict(self) -> dict:
        return {
            "activity": self.activity_name,
            "java_path": self.java_path,
            "java_code": self.java_code,
            "primary_layout": self.primary_layout,
            "xml_layouts": [{"name": n, "tree": node.to_dict()} for n, node in self.xml_layouts],
            "dependencies": [e.to_dict() for e in self.dependencies],
            "resource_refs": list(self.resource_refs),
            "interactions": [f.to_dict() for f in self.interactions],
            "subpages": [s.to_dict() for s in self.subpages],
        }

    @classmethod
    def from_dict(cls, d: dict, layouts: dict[str, LayoutNode] | None = None) -> PageRecord:
        layouts = layouts or {}
        xml_layouts = [(x["name"], layouts.get(x["name"]) or LayoutNode.from_dict(x["tree"]))
                       for x in d["xml_layouts"]]
        return cls(
            activity_name=d["activity"],
            java_code=d["java_code"],
            java_path=d.get("java_path"),
            xml_layouts=xml_layouts,
            dependencies=[DependencyEdge.from_dict(e) for e in d["dependencies"]],
            resource_refs=list(d["resource_refs"]),
            interactions=[InteractionFact.from_dict(f) for f in d["interactions"]],
            subpages=[cls.from_dict(s, layouts) for s in d.get("subpages", [])],
            primary_layout=d.get("primary_layout"),
        )


@dataclass
class AndroidProject:
    root_path: str
    manifest: ManifestInfo
    pages: dict[str, PageRecord] = field(default_factory=dict)
    resources: ResourceIndex = field(default_factory=ResourceIndex)
    layouts: dict[str, LayoutNode] = field(default_factory=dict)
    orphan_layouts: list[str] = field(default_factory=list)
    java_sources: dict[str, tuple[str, str]] = field(default_factory=dict)  # fq class -> (path, code)
    warnings: list[ProjectWarning] = field(default_factory=list)

    def warn(self, code: str, message: str, span: SourceSpan | None = None) -> None:
        w = ProjectWarning(code, message, span)
        self.warnings.append(w)
        log.warning(str(w))

    def page_for_class(self, class_name: str) -> PageRecord | None:
        act = self.manifest.find(class_name)
        return self.pages.get(act.name) if act else None

    def to_dict(self) -> dict:
        return {
            "root_path": self.root_path,
            "manifest": self.manifest.to_dict(),
            "layouts": {name: node.to_dict() for name, node in self.layouts.items()},
            "orphan_layouts": list(self.orphan_layouts),
            "resources": self.resources.to_dict(),
            "pages": {pid: page.to_dict() for pid, page in self.pages.items()},
            "warnings": [w.to_dict() for w in self.warnings],
        }

    @classmethod
    def from_dict(cls, d: dict) -> AndroidProject:
        layouts = {name: LayoutNode.from_dict(t) for name, t in d["layouts"].items()}
        return cls(
            root_path=d["root_path"],
            manifest=ManifestInfo.from_dict(d["manifest"]),
            pages={pid: PageRecord.from_dict(p, layouts) for pid, p in d["pages"].items()},
            resources=ResourceIndex.from_dict(d["resources"]),
            layouts=layouts,
            orphan_layouts=list(d.get("orphan_layouts", [])),
            warnings=[ProjectWarning.from_dict(w) for w in d.get("warnings", [])],
        )

    def dump_pages(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n", encoding="utf-8")

    @classmethod
    def load_pages(cls, path: str | Path) -> AndroidProject:
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def locate_manifest(root: Path, manifest_path: str | None = None) -> Path:
    if manifest_path:
        p = root / manifest_path
        if p.is_file():
            return p
        raise ManifestNotFound(f"{p} does not exist")
    for rel in MANIFEST_CANDIDATES:
        if (root / rel).is_file():
            return root / rel
    found = sorted(p for p in root.rglob("AndroidManifest.xml")
                   if not _SKIP_DIRS.intersection(p.relative_to(root).parts))
    if found:
        return found[0]
    raise ManifestNotFound(f"no AndroidManifest.xml under {root}")


def _layout_ref(value: str | None) -> str | None:
    if value and value.startswith("@layout/"):
        return value.split("/", 1)[1]
    return None


def _resource_refs(nodes: list[LayoutNode]) -> list[str]:
    refs: list[str] = []
    for root in nodes:
        for node in root.walk():
            for value in node.attributes.values():
                m = _RESOURCE_REF.match(value.strip())
                if m:
                    key = f"{m.group(1)}/{m.group(2)}"
                    if key not in refs:
                        refs.append(key)
    return refs


def _find_java(sources: dict[str, tuple[str, str]], class_name: str) -> tuple[str, str] | None:
    if class_name in sources:
        return sources[class_name]
    simple = class_name.rsplit(".", 1)[-1]
    hits = [v for k, v in sources.items() if k.rsplit(".", 1)[-1] == simple]
    return hits[0] if len(hits) == 1 else None


def _fragment_layout(project: AndroidProject, node: LayoutNode) -> tuple[str | None, str | None]:
    """Return (class name, layout name) a fragment node refers to, when resolvable."""
    cls_name = node.attributes.get("android:name") or node.attributes.get("class")
    if cls_name:
        cls_name = cls_name if not cls_name.startswith(".") else project.manifest.package_name + cls_name
    layout = _layout_ref(node.attributes.get("tools:layout"))
    if layout is None and cls_name:
        src = _find_java(project.java_sources, cls_name)
        if src:
            m = _INFLATE.search(src[1])
            layout = m.group(1) if m else None
    return cls_name, layout


def resolve_dependencies(project: AndroidProject) -> AndroidProject:
    """Link includes, fragments and navigation facts into DependencyEdges.

    Rebuilds each page's layout list as: content-view layouts (first one is
    primary) followed by transitively included/fragment layouts.
    """
    referenced: set[str] = set()
    for page in project.pages.values():
        page.dependencies = []
        page.subpages = []
        content = [f.subject_id for f in page.interactions if f.kind is InteractionKind.CONTENT_VIEW]
        names: list[str] = []
        for name in content:
            if name in project.layouts:
                if name not in names:
                    names.append(name)
                    page.dependencies.append(DependencyEdge(page.page_id, name, "content_view"))
            else:
                project.warn("UnresolvedLayout", f"{page.page_id}: setContentView target {name!r} not found")
        page.primary_layout = names[0] if names else None

        queue = list(names)
        seen_subpages: set[str] = set()
        while queue:
            current = queue.pop(0)
            for node in project.layouts[current].walk():
                if node.kind is NodeKind.INCLUDE_REF:
                    target = _layout_ref(node.attributes.get("layout"))
                    if target in project.layouts:
                        page.dependencies.append(
                            DependencyEdge(page.page_id, target, "include", current, node.source_span))
                        if target not in names:
                            names.append(target)
                            queue.append(target)
                    else:
                        project.warn("UnresolvedInclude",
                                     f"{page.page_id}: include of {node.attributes.get('layout')!r} "
                                     f"in layout {current!r} does not resolve", node.source_span)
                elif node.kind is NodeKind.FRAGMENT:
                    cls_name, target = _fragment_layout(project, node)
                    if target in project.layouts:
                        page.dependencies.append(
                            DependencyEdge(page.page_id, target, "fragment", current, node.source_span))
                        if target not in names:
                            names.append(target)
                            queue.append(target)
                        sub_id = cls_name or f"{page.page_id}#{target}"
                        if sub_id not in seen_subpages:
                            seen_subpages.add(sub_id)
                            src = _find_java(project.java_sources, cls_name) if cls_name else None
                            code = src[1] if src else ""
                            page.subpages.append(PageRecord(
                                activity_name=sub_id, java_code=code, java_path=src[0] if src else None,
                                xml_layouts=[(target, project.layouts[target])],
                                interactions=extract_interactions(code), primary_layout=target,
                            ))
                    else:
                        project.warn("UnresolvedFragment",
                                     f"{page.page_id}: fragment {cls_name or node.tag!r} in layout "
                                     f"{current!r} has no resolvable layout", node.source_span)
        page.xml_layouts = [(n, project.layouts[n]) for n in names]
        referenced.update(names)

        for fact in page.all_interactions():
            if fact.kind is not InteractionKind.NAVIGATION:
                continue
            act = project.manifest.find(fact.subject_id)
            if act:
                page.dependencies.append(DependencyEdge(page.page_id, act.name, "navigation"))
            else:
                project.warn("UnresolvedNavigation",
                             f"{page.page_id}: navigation target {fact.subject_id!r} is not a manifest activity")
        page.resource_refs = _resource_refs([node for _, node in page.xml_layouts])

    project.orphan_layouts = sorted(set(project.layouts) - referenced)
    for name in project.orphan_layouts:
        project.warn("OrphanLayout", f"layout {name!r} is not referenced by any page")
    return project


def _index_java(src_roots: list[Path], project: AndroidProject, root: Path) -> None:
    kotlin = 0
    for src_root in src_roots:
        if not src_root.is_dir():
            continue
        for path in sorted(src_root.rglob("*")):
            if not path.is_file() or _SKIP_DIRS.intersection(path.relative_to(root).parts):
                continue
            if path.suffix == ".kt":
                kotlin += 1
                continue
            if path.suffix != ".java":
                continue
            code = path.read_text(encoding="utf-8", errors="replace")
            m = re.search(r"^\s*package\s+([\w.]+)\s*;", code, re.M)
            fq = f"{m.group(1)}.{path.stem}" if m else path.stem
            project.java_sources.setdefault(fq, (path.relative_to(root).as_posix(), code))
    if kotlin:
        project.warn("IgnoredSources", f"{kotlin} non-Java source file(s) ignored")


def parse_project(root: str | Path, manifest_path: str | None = None,
                  namespace: str | None = None, assist=None) -> AndroidProject:
    """Parse an Android project tree into an AndroidProject.

    ``assist`` is an optional callable ``(page) -> list[InteractionFact]``
    supplementing the lexical Java scan (see ``llm_gateway.make_parse_assist``).
    """
    root = Path(root)
    if not root.is_dir():
        raise ManifestNotFound(f"{root} is not a directory")
    manifest_file = locate_manifest(root, manifest_path)
    module = manifest_file.parent
    manifest = parse_manifest(manifest_file.read_bytes(), namespace, str(manifest_file.relative_to(root)))
    project = AndroidProject(root_path=str(root), manifest=manifest)
    for w in manifest.warnings:
        project.warnings.append(ProjectWarning("Manifest", w))

    res_dir = module / "res"
    if not res_dir.is_dir() and (root / "res").is_dir():
        res_dir = root / "res"
    layout_dir = res_dir / "layout"
    if layout_dir.is_dir():
        for path in sorted(layout_dir.glob("*.xml")):
            rel = path.relative_to(root).as_posix()
            project.layouts[path.stem] = parse_layout(path.read_bytes(), path.stem, rel)
    project.resources = index_resources(res_dir, root)

    _index_java([module / "java", module / "src", root / "src"] if module != root else [root / "src"], project, root)
    for act in manifest.activities:
        src = _find_java(project.java_sources, act.name)
        if src is None:
            project.warn("MissingJava", f"no Java source for activity {act.name}")
            page = PageRecord(act.name)
        else:
            path, code = src
            page = PageRecord(act.name, code, path,
                              interactions=extract_interactions(code))
        if assist is not None:
            page.interactions.extend(assist(page))
        project.pages[act.name] = page
    resolve_dependencies(project)
    for page in project.pages.values():
        if not page.xml_layouts:
            project.warn("NoLayout", f"activity {page.page_id} has no resolvable content view")
    return project

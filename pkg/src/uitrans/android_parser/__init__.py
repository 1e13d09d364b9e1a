"""Android project parsing: manifest, layouts, Java interaction facts, resources."""

from .java_scan import InteractionFact, InteractionKind, extract_interactions
from .layout import LayoutNode, NodeKind, SourceSpan, line_count, parse_layout, serialize
from .manifest import ActivityInfo, ManifestInfo, parse_manifest
from .project import (
    AndroidProject,
    DependencyEdge,
    PageRecord,
    ProjectWarning,
    parse_project,
    resolve_dependencies,
)
from .resources import ResourceIndex, index_resources

__all__ = [
    "ActivityInfo", "AndroidProject", "DependencyEdge", "InteractionFact", "InteractionKind",
    "LayoutNode", "ManifestInfo", "NodeKind", "PageRecord", "ProjectWarning", "ResourceIndex",
    "SourceSpan", "extract_interactions", "index_resources", "line_count", "parse_layout",
    "parse_manifest", "parse_project", "resolve_dependencies", "serialize",
]

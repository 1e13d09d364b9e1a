from __future__ import annotations

import logging
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

from ..errors import MalformedXml, MissingPackage

log = logging.getLogger(__name__)

ANDROID_NS = "{http://schemas.android.com/apk/res/android}"
ACTION_MAIN = "android.intent.action.MAIN"
CATEGORY_LAUNCHER = "android.intent.category.LAUNCHER"


@dataclass
class ActivityInfo:
    name: str
    is_launcher: bool = False

    @property
    def simple_name(self) -> str:
        return self.name.rsplit(".", 1)[-1]


@dataclass
class ManifestInfo:
    package_name: str
    activities: list[ActivityInfo] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def launcher(self) -> ActivityInfo | None:
        return next((a for a in self.activities if a.is_launcher), None)

    def find(self, class_name: str) -> ActivityInfo | None:
        """Look up an activity by fully-qualified or simple class name."""
        for act in self.activities:
            if act.name == class_name:
                return act
        matches = [a for a in self.activities if a.simple_name == class_name.rsplit(".", 1)[-1]]
        return matches[0] if len(matches) == 1 else None

    def to_dict(self) -> dict:
        return {
            "package_name": self.package_name,
            "activities": [{"name": a.name, "is_launcher": a.is_launcher} for a in self.activities],
            "warnings": list(self.warnings),
        }

    @classmethod
    def from_dict(cls, d: dict) -> ManifestInfo:
        return cls(d["package_name"], [ActivityInfo(**a) for a in d["activities"]], list(d.get("warnings", [])))


def qualify(name: str, package: str) -> str:
    if name.startswith("."):
        return package + name
    if "." not in name:
        return f"{package}.{name}"
    return name


def _is_launcher(activity: ET.Element) -> bool:
    for intent in activity.findall("intent-filter"):
        actions = {a.get(ANDROID_NS + "name") for a in intent.findall("action")}
        categories = {c.get(ANDROID_NS + "name") for c in intent.findall("category")}
        if ACTION_MAIN in actions and CATEGORY_LAUNCHER in categories:
            return True
    return False


def parse_manifest(manifest_text: str | bytes, namespace: str | None = None,
                   file: str = "AndroidManifest.xml") -> ManifestInfo:
    """Extract the package name and declared activities from a manifest.

    ``namespace`` is used when the manifest has no ``package`` attribute
    (newer projects declare it in the build file instead).
    """
    try:
        root = ET.fromstring(manifest_text)
    except ET.ParseError as exc:
        line, col = exc.position
        raise MalformedXml(str(exc), file, line, col) from None
    if root.tag != "manifest":
        raise MalformedXml(f"root element is <{root.tag}>, expected <manifest>", file, 1)
    package = root.get("package") or namespace
    if not package:
        raise MissingPackage(f"{file}: no package attribute and no namespace fallback")

    info = ManifestInfo(package)
    for elem in root.iter("activity"):
        raw = elem.get(ANDROID_NS + "name", "").strip()
        if not raw:
            info.warnings.append(f"{file}: <activity> without android:name skipped")
            continue
        is_launcher = _is_launcher(elem)
        if is_launcher and info.launcher is not None:
            info.warnings.append(f"{file}: extra launcher activity {raw} not flagged")
            is_launcher = False
        info.activities.append(ActivityInfo(qualify(raw, package), is_launcher))
    if not info.activities:
        info.warnings.append(f"{file}: manifest declares no activities")
    for w in info.warnings:
        log.warning(w)
    return info

from __future__ import annotations

import logging
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import MalformedXml

log = logging.getLogger(__name__)

HEX_COLOR = re.compile(r"^#(?:[0-9a-fA-F]{3}|[0-9a-fA-F]{4}|[0-9a-fA-F]{6}|[0-9a-fA-F]{8})$")
DIMENSION = re.compile(r"^(-?\d+(?:\.\d+)?)\s*(dp|dip|sp|px|pt|in|mm)?$")


@dataclass
class ResourceIndex:
    strings: dict[str, str] = field(default_factory=dict)
    colors: dict[str, str] = field(default_factory=dict)
    dimens: dict[str, str] = field(default_factory=dict)
    drawables: dict[str, str] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"strings": self.strings, "colors": self.colors, "dimens": self.dimens,
                "drawables": self.drawables, "warnings": self.warnings}

    @classmethod
    def from_dict(cls, d: dict) -> ResourceIndex:
        return cls(dict(d["strings"]), dict(d["colors"]), dict(d["dimens"]),
                   dict(d["drawables"]), list(d.get("warnings", [])))


def _add(ns: dict[str, str], key: str, value: str, kind: str, index: ResourceIndex, file: str) -> None:
    if key in ns:
        index.warnings.append(f"{file}: duplicate {kind} {key!r} ignored")
        return
    ns[key] = value


def index_values_xml(text: str | bytes, index: ResourceIndex, file: str) -> None:
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        line, col = exc.position
        raise MalformedXml(str(exc), file, line, col) from None
    pending_colors: list[tuple[str, str]] = []
    for elem in root:
        name = elem.get("name")
        if not name:
            continue
        value = "".join(elem.itertext()).strip()
        if elem.tag == "string":
            _add(index.strings, name, value, "string", index, file)
        elif elem.tag == "color":
            if HEX_COLOR.match(value):
                _add(index.colors, name, value, "color", index, file)
            else:
                pending_colors.append((name, value))
        elif elem.tag == "dimen":
            _add(index.dimens, name, value, "dimen", index, file)
    # colour aliases (@color/x) resolve against colours seen so far
    for name, value in pending_colors:
        target = value.split("/", 1)[1] if value.startswith("@color/") else None
        if target in index.colors:
            _add(index.colors, name, index.colors[target], "color", index, file)
        else:
            index.warnings.append(f"{file}: color {name!r} value {value!r} is not a hex color; skipped")


def index_resources(res_dir: Path, base: Path | None = None) -> ResourceIndex:
    """Index ``res/values`` (base set only) and drawables under ``res_dir``.

    Drawable paths are stored relative to ``base`` (default: parent of ``res_dir``).
    """
    base = base or res_dir.parent
    index = ResourceIndex()
    values = res_dir / "values"
    if values.is_dir():
        for path in sorted(values.glob("*.xml")):
            index_values_xml(path.read_bytes(), index, str(path))
    if res_dir.is_dir():
        # base drawable dir first, then qualified ones; first seen key wins
        dirs = sorted(d for d in res_dir.iterdir()
                      if d.is_dir() and d.name.split("-")[0] in ("drawable", "mipmap"))
        dirs.sort(key=lambda d: ("-" in d.name, d.name))
        for d in dirs:
            for f in sorted(d.iterdir()):
                if f.is_file():
                    key = f.name.split(".", 1)[0]
                    index.drawables.setdefault(key, f.relative_to(base).as_posix())
    for w in index.warnings:
        log.warning(w)
    return index

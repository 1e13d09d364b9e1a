"""Line-level success metrics over (generated, reference) code pairs."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

from .errors import EmptyRecordSet, EmptyReference

SCOPES = ("component", "page", "project")
FOOTER = ("zero-mod counts the records whose generated code needed no modification; "
          "it stands in for a successful build and compile, which is not run here.")


@dataclass(frozen=True)
class EvaluationRecord:
    scope: str
    id: str
    lines_modified: int
    total_lines: int

    def __post_init__(self):
        if self.scope not in SCOPES:
            raise ValueError(f"unknown scope {self.scope!r}")
        if self.total_lines < 1:
            raise ValueError("total_lines must be >= 1")
        if not 0 <= self.lines_modified <= self.total_lines:
            raise ValueError("lines_modified must be within [0, total_lines]")

    @property
    def zero_mod(self) -> bool:
        return self.lines_modified == 0

    def to_dict(self) -> dict:
        return {"scope": self.scope, "id": self.id, "lines_modified": self.lines_modified,
                "total_lines": self.total_lines, "zero_mod": self.zero_mod}


@dataclass(frozen=True)
class SuccessReport:
    comp_success: float
    page_success: float
    project_success: float
    zero_mod_components: int
    zero_mod_pages: int

    def to_dict(self) -> dict:
        return {"comp_success": self.comp_success, "page_success": self.page_success,
                "project_success": self.project_success, "zero_mod_components": self.zero_mod_components,
                "zero_mod_pages": self.zero_mod_pages}


def split_lines(text: str) -> list[str]:
    return [line.rstrip() for line in text.splitlines()]


def lcs_length(a: list[str], b: list[str]) -> int:
    """Length of the longest common subsequence (two-row dynamic programme)."""
    if len(a) < len(b):
        a, b = b, a
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, 1):
            cur.append(prev[j - 1] + 1 if x == y else max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def lines_modified(generated: str, reference: str) -> tuple[int, int]:
    """(modified, total): reference lines not matched by an LCS with the generated lines."""
    ref = split_lines(reference)
    if not ref:
        raise EmptyReference("reference has no lines")
    return len(ref) - lcs_length(split_lines(generated), ref), len(ref)


def _scoped(records: list[EvaluationRecord], scope: str) -> list[EvaluationRecord]:
    return [r for r in records if r.scope == scope]


def comp_success(records: list[EvaluationRecord], scope: str = "component") -> float:
    """Mean over records of 1 - modified/total."""
    chosen = _scoped(records, scope)
    if not chosen:
        raise EmptyRecordSet(f"no {scope} records")
    return sum(1 - r.lines_modified / r.total_lines for r in chosen) / len(chosen)


def page_success(records: list[EvaluationRecord]) -> float:
    return comp_success(records, "page")


def project_success(records: list[EvaluationRecord]) -> float:
    """1 - (sum modified) / (sum total): a ratio of sums, not a mean of ratios.

    Uses project-scope records when present, else page records, else component records.
    """
    for scope in ("project", "page", "component"):
        chosen = _scoped(records, scope)
        if chosen:
            return 1 - sum(r.lines_modified for r in chosen) / sum(r.total_lines for r in chosen)
    raise EmptyRecordSet("no records")


def build_report(records: list[EvaluationRecord]) -> SuccessReport:
    if not records:
        raise EmptyRecordSet("no records")
    comps, pages = _scoped(records, "component"), _scoped(records, "page")
    return SuccessReport(
        comp_success(records) if comps else float("nan"),
        page_success(records) if pages else float("nan"),
        project_success(records),
        sum(r.zero_mod for r in comps),
        sum(r.zero_mod for r in pages),
    )


def _pct(x: float) -> str:
    return "n/a" if x != x else f"{x * 100:.1f}%"


def format_row(report: SuccessReport) -> str:
    return (f"{_pct(report.comp_success)}({report.zero_mod_components})  "
            f"{_pct(report.page_success)}({report.zero_mod_pages})  "
            f"{_pct(report.project_success)}")


def emit_report(report: SuccessReport, fmt: str = "table") -> str:
    if fmt == "json":
        data = {k: (None if isinstance(v, float) and v != v else v) for k, v in report.to_dict().items()}
        return json.dumps(data | {"note": FOOTER}, indent=2) + "\n"
    if fmt != "table":
        raise ValueError(f"unknown report format {fmt!r}")
    header = "Comp. Success%  Page Success%  Project Success%"
    return f"{header}\n{format_row(report)}\n\n{FOOTER}\n"


def load_pairs(pairs_path: str | Path, generated_dir: str | Path, reference_dir: str | Path) -> list[EvaluationRecord]:
    """Evaluate every (scope, id, generated_path, reference_path) entry of a pairs file.

    Paths are relative to the generated and reference directories. A missing
    generated file counts as empty output.
    """
    items = json.loads(Path(pairs_path).read_text(encoding="utf-8"))
    records = []
    for item in items:
        if isinstance(item, dict):
            scope, rid, gen, ref = item["scope"], item["id"], item["generated_path"], item["reference_path"]
        else:
            scope, rid, gen, ref = item
        gen_path = Path(generated_dir) / gen
        generated = gen_path.read_text(encoding="utf-8") if gen_path.is_file() else ""
        reference = (Path(reference_dir) / ref).read_text(encoding="utf-8")
        modified, total = lines_modified(generated, reference)
        records.append(EvaluationRecord(scope, rid, modified, total))
    return records


_STRUCT = re.compile(r"^(?:export\s+)?struct\s+([A-Za-z_$][\w$]*)")


def split_structs(source: str) -> dict[str, str]:
    """Top-level struct blocks (with their decorators) keyed by struct name."""
    blocks: dict[str, str] = {}
    lines = source.splitlines()
    start = name = None
    for i, line in enumerate(lines):
        m = _STRUCT.match(line)
        if name is None and line.startswith("@"):
            start = i if start is None else start
        elif name is None and m:
            name, start = m.group(1), i if start is None else start
        elif name is not None and line.rstrip() == "}":
            blocks[name] = "\n".join(lines[start:i + 1])
            start = name = None
        elif name is None:
            start = None
    return blocks


def evaluate_dirs(generated_dir: str | Path, reference_dir: str | Path) -> list[EvaluationRecord]:
    """Default pairing when no pairs file is given.

    Every reference .ets file is a page record and every struct in it a
    component record, matched by relative path and struct name.
    """
    gen_root, ref_root = Path(generated_dir), Path(reference_dir)
    records = []
    for ref_path in sorted(ref_root.rglob("*.ets")):
        rel = ref_path.relative_to(ref_root).as_posix()
        reference = ref_path.read_text(encoding="utf-8")
        gen_path = gen_root / rel
        generated = gen_path.read_text(encoding="utf-8") if gen_path.is_file() else ""
        gen_structs = split_structs(generated)
        for name, block in split_structs(reference).items():
            modified, total = lines_modified(gen_structs.get(name, ""), block)
            records.append(EvaluationRecord("component", f"{rel}#{name}", modified, total))
        if split_lines(reference):
            modified, total = lines_modified(generated, reference)
            records.append(EvaluationRecord("page", rel, modified, total))
    return records

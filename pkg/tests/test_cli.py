import json
import subprocess
import sys
from pathlib import Path

import pytest

from uitrans import cli, pipeline
from uitrans.errors import MissingUnit
from uitrans.pipeline import LEARNED_TABLE, REPORT_NAME

PROJECTS = Path(__file__).parent / "fixtures/projects"
MINI = PROJECTS / "mini"


def tree(root: Path, skip=(REPORT_NAME,)) -> dict[str, bytes]:
    return {p.relative_to(root).as_posix(): p.read_bytes() for p in sorted(root.rglob("*"))
            if p.is_file() and p.relative_to(root).as_posix() not in skip}


def test_translate_fixture(tmp_path, capsys):
    code = cli.main(["translate", "--input", str(MINI), "--out", str(tmp_path / "out"), "--jobs", "1",
                     "--dump-plan", str(tmp_path / "plan.json")])
    assert code == cli.EXIT_OK
    report = json.loads((tmp_path / "out" / REPORT_NAME).read_text())
    plan = json.loads((tmp_path / "plan.json").read_text())
    assert report["units"] == len(plan) == sum(report["modes"].values())
    assert sum(report["reflection"].values()) == report["units"]
    assert set(report["timings_s"]) == {"parse", "plan", "translate", "assemble", "emit"}
    assert report["routes"] == ["Main", "Detail"]
    assert "translated 9 units" in capsys.readouterr().out


def test_learned_table_lands_in_the_output_tree(tmp_path):
    assert cli.main(["translate", "--input", str(MINI), "--out", str(tmp_path / "out")]) == 0
    report = json.loads((tmp_path / "out" / REPORT_NAME).read_text())
    learned = json.loads((tmp_path / "out" / LEARNED_TABLE).read_text())
    assert report["enrichments"] == sum(e["provenance"] == "learned" for e in learned["entries"]) == 1


def test_explicit_learned_table(tmp_path):
    target = tmp_path / "kb/learned.json"
    target.parent.mkdir()
    assert cli.main(["translate", "--input", str(MINI), "--out", str(tmp_path / "out"),
                     "--kb-learned", str(target)]) == 0
    assert target.is_file() and not (tmp_path / "out" / LEARNED_TABLE).exists()


@pytest.mark.parametrize("argv", [
    ["translate", "--input", "/nonexistent/project", "--out", "OUT"],
    ["translate", "--input", str(MINI), "--out", "OUT", "--max-unit-lines", "2"],
    ["translate", "--input", str(MINI), "--out", "OUT", "--max-reflection-iters", "11"],
    ["translate", "--input", str(MINI), "--out", "OUT", "--jobs", "0"],
    ["translate", "--input", str(MINI), "--out", "OUT", "--record-llm", "a", "--replay-llm", "b"],
    ["translate", "--input", str(MINI), "--out", "OUT", "--replay-llm", "/nonexistent/rec"],
    ["translate", "--input", str(MINI), "--out", "OUT", "--config", "/nonexistent.ini"],
    ["parse", "--input", "/nonexistent/project"],
    ["evaluate", "--generated", "/nonexistent/a", "--reference", "/nonexistent/b"],
])
def test_config_errors_exit_1(argv, tmp_path, capsys):
    argv = [str(tmp_path / "out") if a == "OUT" else a for a in argv]
    assert cli.main(argv) == cli.EXIT_CONFIG
    assert capsys.readouterr().err.startswith("error: ")
    assert not (tmp_path / "out").exists()


@pytest.mark.parametrize("argv", [[], ["translate"], ["frobnicate"], ["translate", "--input", "x"],
                                  ["translate", "--input", "x", "--pages", "y", "--out", "z"]])
def test_usage_errors_exit_1(argv, capsys):
    assert cli.main(argv) == cli.EXIT_CONFIG


def test_missing_manifest_exits_1(tmp_path):
    (tmp_path / "empty").mkdir()
    assert cli.main(["parse", "--input", str(tmp_path / "empty")]) == cli.EXIT_CONFIG


def test_fatal_assembly_error_leaves_no_output(tmp_path, monkeypatch, capsys):
    def broken(*args, **kwargs):
        raise MissingUnit("deadbeef0000")

    monkeypatch.setattr(pipeline, "assemble_page", broken)
    out = tmp_path / "out"
    assert cli.main(["translate", "--input", str(MINI), "--out", str(out)]) == cli.EXIT_FATAL
    assert "MissingUnit" in capsys.readouterr().err
    assert list(tmp_path.iterdir()) == []


def test_non_empty_output_needs_force(tmp_path):
    out = tmp_path / "out"
    out.mkdir()
    (out / "old.txt").write_text("x")
    assert cli.main(["translate", "--input", str(MINI), "--out", str(out)]) == cli.EXIT_CONFIG
    assert (out / "old.txt").exists()
    assert cli.main(["--force", "translate", "--input", str(MINI), "--out", str(out)]) == cli.EXIT_OK
    assert not (out / "old.txt").exists() and (out / REPORT_NAME).is_file()


def test_staged_runs_equal_the_end_to_end_run(tmp_path, capsys):
    assert cli.main(["translate", "--input", str(MINI), "--out", str(tmp_path / "full"),
                     "--dump-plan", str(tmp_path / "full-plan.json")]) == 0
    assert cli.main(["parse", "--input", str(MINI), "--dump-pages", str(tmp_path / "pages.json")]) == 0
    assert cli.main(["plan", "--pages", str(tmp_path / "pages.json"),
                     "--dump-plan", str(tmp_path / "plan.json")]) == 0
    assert (tmp_path / "plan.json").read_bytes() == (tmp_path / "full-plan.json").read_bytes()
    assert cli.main(["translate", "--pages", str(tmp_path / "pages.json"), "--out", str(tmp_path / "staged")]) == 0
    assert tree(tmp_path / "staged") == tree(tmp_path / "full")


def test_parse_and_plan_print_to_stdout(capsys):
    assert cli.main(["parse", "--input", str(MINI)]) == 0
    pages = json.loads(capsys.readouterr().out)
    assert len(pages["pages"]) == 2
    assert cli.main(["plan", "--input", str(MINI)]) == 0
    assert len(json.loads(capsys.readouterr().out)) == 9


def test_kb_validate_and_query(capsys):
    assert cli.main(["kb", "validate"]) == 0
    assert capsys.readouterr().out.startswith("ok: ")
    assert cli.main(["kb", "query", "TextView text label", "--tag", "TextView"]) == 0
    rows = [line.split("\t") for line in capsys.readouterr().out.splitlines()]
    assert 1 <= len(rows) <= 3 and rows[0][3] == "TextView -> Text"
    assert cli.main(["kb", "query", "badge count", "--store", "docs", "-k", "1"]) == 0
    (row,) = capsys.readouterr().out.splitlines()
    assert row.endswith("\tBadge")


def test_kb_validate_rejects_a_broken_table(tmp_path, capsys):
    (tmp_path / "bad.json").write_text('{"schema_version": 1, "entries": [{"entry_id": 1}]}')
    assert cli.main(["kb", "validate", "--mapping", str(tmp_path / "bad.json")]) == cli.EXIT_FATAL


def test_evaluate_identical_dirs(tmp_path, capsys):
    assert cli.main(["translate", "--input", str(MINI), "--out", str(tmp_path / "out")]) == 0
    capsys.readouterr()
    assert cli.main(["evaluate", "--generated", str(tmp_path / "out"), "--reference", str(tmp_path / "out")]) == 0
    row = capsys.readouterr().out.splitlines()[1]
    assert row.startswith("100.0%(") and row.endswith("100.0%")
    assert cli.main(["evaluate", "--generated", str(tmp_path / "out"), "--reference", str(tmp_path / "out"),
                     "--format", "json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["comp_success"] == data["page_success"] == data["project_success"] == 1.0


def test_config_file_and_flags(tmp_path, capsys):
    ini = tmp_path / "uitrans.ini"
    ini.write_text("[backend]\nkind = template\nmax_concurrency = 2\n[run]\nmax_unit_lines = 5\njobs = 2\n")
    assert cli.main(["--config", str(ini), "plan", "--input", str(MINI)]) == 0
    from_file = len(json.loads(capsys.readouterr().out))
    assert cli.main(["--config", str(ini), "plan", "--input", str(MINI), "--max-unit-lines", "40"]) == 0
    from_flag = len(json.loads(capsys.readouterr().out))
    assert from_flag == 9 < from_file


@pytest.mark.parametrize("text", ["[backend]\ncolour = blue\n", "[run]\njobs = many\n", "not an ini"])
def test_bad_config_file(tmp_path, text):
    ini = tmp_path / "bad.ini"
    ini.write_text(text)
    assert cli.main(["--config", str(ini), "plan", "--input", str(MINI)]) == cli.EXIT_CONFIG


def test_record_then_replay_via_flags(tmp_path):
    rec = tmp_path / "rec"
    assert cli.main(["translate", "--input", str(MINI), "--out", str(tmp_path / "a"), "--record-llm", str(rec)]) == 0
    assert cli.main(["translate", "--input", str(MINI), "--out", str(tmp_path / "b"), "--replay-llm", str(rec)]) == 0
    assert tree(tmp_path / "a") == tree(tmp_path / "b")


def test_console_script_runs():
    proc = subprocess.run([sys.executable, "-m", "uitrans.cli", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "translate" in proc.stdout

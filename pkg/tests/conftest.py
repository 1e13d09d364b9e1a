import sys
from pathlib import Path

import pytest

TESTS = Path(__file__).resolve().parent
sys.path.insert(0, str(TESTS))

from uitrans.knowledge_base import load_seed  # noqa: E402
from uitrans.llm_gateway import Gateway, TemplateBackend  # noqa: E402

FIXTURES = TESTS / "fixtures"
PROJECTS = FIXTURES / "projects"


@pytest.fixture
def mini_root() -> Path:
    return PROJECTS / "mini"


@pytest.fixture
def shop_root() -> Path:
    return PROJECTS / "shop"


@pytest.fixture
def grocery_root() -> Path:
    return PROJECTS / "grocery"


@pytest.fixture(scope="session")
def seed_kb():
    return load_seed()


@pytest.fixture
def gateway():
    return Gateway(TemplateBackend())


# -- acceptance summary ------------------------------------------------------
# tests marked @pytest.mark.acceptance(n, title) get one PASS/FAIL line in the terminal summary

_acceptance: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): numbered acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or not (rep.when == "call" or rep.failed):
        return
    number, title = marker.args
    entry = _acceptance.setdefault(number, {"title": title, "ok": True, "details": []})
    entry["ok"] = entry["ok"] and rep.passed
    entry["details"] += [str(v) for k, v in item.user_properties if k == "detail"]


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_acceptance):
        entry = _acceptance[number]
        detail = "; ".join(dict.fromkeys(entry["details"]))
        line = f"criterion {number}: {'PASS' if entry['ok'] else 'FAIL'}  {entry['title']}"
        terminalreporter.write_line(line + (f"  [{detail}]" if detail else ""))

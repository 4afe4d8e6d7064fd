from __future__ import annotations

import pathlib
import random

import pytest

from trapdiag.term import parse_file, typecheck

ROOT = pathlib.Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"

CROSSING = """\
ob x
gen f : x -> x x
gen g : x x -> x
term main = (f * g) ; (f * g)
"""

_acceptance: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): one acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or report.when not in ("setup", "call"):
        return
    number, title = marker.args
    if report.failed:
        _acceptance[number] = (title, "FAIL")
    elif report.when == "call":
        _acceptance.setdefault(number, (title, "PASS"))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_acceptance):
        title, verdict = _acceptance[number]
        terminalreporter.write_line(f"[{verdict}] {number}. {title}")


@pytest.fixture
def crossing():
    sig, terms = parse_file(CROSSING)
    return sig, typecheck(terms["main"], sig)


@pytest.fixture
def rng():
    return random.Random(20240607)

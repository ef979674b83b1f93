from __future__ import annotations

from pathlib import Path

import pytest

from surface_linker import _resources

MINICORPUS = _resources.data_path("minicorpus")
GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture
def minicorpus_dir() -> Path:
    return MINICORPUS


@pytest.fixture
def write_gazetteer(tmp_path):
    """Write gazetteer rows (tuples) to a file and return its path."""

    def _write(rows, name="gazetteer.txt"):
        lines = ["name | body | feature_type | blocklist"]
        for row in rows:
            row = tuple(row) + ("",) * (4 - len(row))
            lines.append(" | ".join(row))
        path = tmp_path / name
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return path

    return _write


# ---------------------------------------------------------------- acceptance summary

_acceptance: dict[str, list[bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(name): test backing one acceptance criterion")


def pytest_runtest_logreport(report):
    marker = getattr(report, "acceptance_name", None)
    if marker and (report.when == "call" or report.outcome != "passed"):
        _acceptance.setdefault(marker, []).append(report.outcome == "passed")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    m = item.get_closest_marker("acceptance")
    if m:
        outcome.get_result().acceptance_name = m.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, results in _acceptance.items():
        status = "PASS" if all(results) else "FAIL"
        terminalreporter.write_line(f"{status}  {name}")

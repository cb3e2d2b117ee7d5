from __future__ import annotations

import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", deadline=None, max_examples=500,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# criterion number -> (title, passed, note), filled by tests/test_acceptance.py
_ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


class CriterionRecorder:
    """Collects the named sub-checks of one acceptance criterion."""

    def __init__(self, number: int, title: str):
        self.number, self.title = number, title
        self.checks: list[tuple[str, bool]] = []
        self.notes: list[str] = []

    def check(self, label: str, passed: bool) -> None:
        self.checks.append((label, bool(passed)))

    def note(self, text: str) -> None:
        self.notes.append(text)

    @property
    def failed(self) -> list[str]:
        return [label for label, ok in self.checks if not ok]

    def finish(self) -> None:
        failed = self.failed
        note = "; ".join(self.notes + ([f"failed: {', '.join(failed)}"] if failed else []))
        _ACCEPTANCE[self.number] = (self.title, not failed and bool(self.checks), note)
        assert self.checks, "criterion recorded no checks"
        assert not failed, f"criterion {self.number} failed: {', '.join(failed)}"


@pytest.fixture
def criterion(request):
    marker = request.node.get_closest_marker("criterion")
    number, title = marker.args
    rec = CriterionRecorder(number, title)
    yield rec
    if number not in _ACCEPTANCE:  # the test raised before finishing
        _ACCEPTANCE[number] = (title, False, "; ".join(rec.notes + ["aborted with an exception"]))


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): an acceptance criterion")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_ACCEPTANCE):
        title, passed, note = _ACCEPTANCE[k]
        line = f"criterion {k:2d} {'PASS' if passed else 'FAIL'}  {title}"
        if note:
            line += f"  [{note}]"
        terminalreporter.write_line(line)

import time
from dataclasses import dataclass, field

import pytest

from epikit.scenarios import REGISTRY, SweepResult, default_config, run_scenario

_ACCEPTANCE: dict[int, tuple[str, str, str]] = {}


@dataclass
class Sweep:
    results: dict[str, SweepResult] = field(default_factory=dict)
    seconds: dict[str, float] = field(default_factory=dict)

    @property
    def total_seconds(self) -> float:
        return sum(self.seconds.values())

    def rows(self, scenario: str, quantity: str | None = None):
        return [r for r in self.results[scenario].rows if quantity is None or r.quantity == quantity]


@pytest.fixture(scope="session")
def sweep() -> Sweep:
    """Every registered scenario at its default config, run once per session and timed."""
    out = Sweep()
    for sid in REGISTRY:
        t0 = time.perf_counter()
        out.results[sid] = run_scenario(default_config(sid))
        out.seconds[sid] = time.perf_counter() - t0
    return out


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): one acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None or rep.when != "call":
        return
    number, title = mark.args
    detail = "; ".join(str(v) for k, v in item.user_properties if k == "detail")
    _ACCEPTANCE[number] = (title, "PASS" if rep.passed else "FAIL", detail)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, status, detail = _ACCEPTANCE[number]
        line = f"criterion {number} [{status}] {title}"
        terminalreporter.write_line(line + (f" :: {detail}" if detail else ""))

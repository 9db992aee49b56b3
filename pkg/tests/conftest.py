import numpy as np
import pytest

from eegapprox.signal_io import EegRecord, EpochSpec, synth_signal


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def tone_10hz():
    """Unit 10 Hz sine, 256 Hz, 8 s, no noise."""
    return synth_signal([(10.0, 1.0)], 8.0, 256.0, noise_rms=0.0, seed=0).data[0]


@pytest.fixture
def write_csv(tmp_path):
    def _write(text, name="sig.csv"):
        p = tmp_path / name
        p.write_text(text, encoding="utf-8")
        return p

    return _write


@pytest.fixture
def five_channel_record(rng):
    names = ("F7-T7", "F8-T8", "T7-FT9", "FT10-T8", "FP1-F3")
    return EegRecord(names, rng.standard_normal((5, 2048)), 256.0, np.array([0, 1]), EpochSpec(1024))


_criteria: dict[int, tuple[str, str]] = {}
_STATUS = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_runtest_logreport(report):
    marker = getattr(report, "criterion", None)
    if marker is None:
        return
    if report.when == "call" or report.outcome != "passed":
        prev = _criteria.get(marker[0])
        if prev is None or prev[1] == "PASS":
            _criteria[marker[0]] = (marker[1], _STATUS[report.outcome])


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    m = item.get_closest_marker("criterion")
    if m is not None:
        outcome.get_result().criterion = (int(m.args[0]), m.args[1])


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_criteria):
        title, status = _criteria[num]
        terminalreporter.write_line(f"[{status}] AC{num:>2} {title}")

import pytest

from adkit import _backend

BACKENDS = ["python"] + (["cython"] if _backend.FastDual is not None else [])
ACCEPTANCE_LINES = []


@pytest.fixture(params=BACKENDS)
def backend(request, monkeypatch):
    """Run a test once per available kernel backend."""
    if request.param == "python":
        monkeypatch.setattr(_backend, "FastDual", None)
        monkeypatch.setattr(_backend, "FastTape", None)
    return request.param


def rel_err(a, b):
    """``|a - b| / max(|a|, |b|)`` (0 when both are 0)."""
    m = max(abs(a), abs(b))
    return 0.0 if m == 0 else abs(a - b) / m


def max_rel(a, b, floor=0.0):
    """Largest componentwise ``|a_i - b_i| / max(floor, |a_i|, |b_i|)``."""
    worst = 0.0
    for x, y in zip(a, b, strict=True):
        m = max(floor, abs(x), abs(y))
        if m:
            worst = max(worst, abs(x - y) / m)
    return worst


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

import time

import pytest

from excess_charge.reference import load_reference

_ACCEPTANCE = {}


@pytest.fixture(scope="session")
def ref():
    return load_reference()


@pytest.fixture(scope="session")
def criterion_log():
    """Record ``(ok, detail)`` per acceptance criterion for the summary lines."""

    def record(number: int, part: str, ok: bool, detail: str):
        _ACCEPTANCE.setdefault(number, []).append((part, bool(ok), detail))

    return record


@pytest.fixture(scope="session")
def timer():
    def timed(fn, *args, **kw):
        t0 = time.perf_counter()
        out = fn(*args, **kw)
        return out, time.perf_counter() - t0

    return timed


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        parts = _ACCEPTANCE[number]
        status = "PASS" if all(ok for _, ok, _ in parts) else "FAIL"
        detail = "; ".join(f"{part}: {'ok' if ok else 'FAILED'} ({d})" for part, ok, d in parts)
        terminalreporter.write_line(f"{status} criterion {number}: {detail}")

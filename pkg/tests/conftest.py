import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("laxg2", deadline=None, max_examples=30,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("laxg2")

ACCEPTANCE = {}


@pytest.fixture
def criterion():
    """criterion(n, title, ok, detail) records the line printed in the acceptance summary."""
    def record(n, title, ok, detail=""):
        ACCEPTANCE[n] = (title, bool(ok), detail)
        return bool(ok)
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[n]
        tr.write_line(f"criterion {n:>2}  {'PASS' if ok else 'FAIL'}  {title}: {detail}")

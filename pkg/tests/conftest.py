import pathlib

import pytest

ROOT = pathlib.Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"

# Base used whenever a test needs path-independent bytes for the ODRL
# fixture (it contains one relative IRI).
FIG1_BASE = "https://example.com/cookie-request.odrl.ttl"


@pytest.fixture(scope="session")
def odrl_fixture_text() -> str:
    return (FIXTURES / "cookie-request.odrl.ttl").read_text()


@pytest.fixture(scope="session")
def dtou_fixture_text() -> str:
    return (FIXTURES / "cookie-policy.dtou.ttl").read_text()


def pytest_runtest_logreport(report):
    # Acceptance tests print one PASS/FAIL line each so the gate is
    # readable straight off the pytest output.
    if report.when != "call" or not report.nodeid.startswith("tests/test_acceptance.py"):
        return
    name = report.nodeid.split("::")[-1]
    verdict = "PASS" if report.passed else "FAIL"
    print(f"\n[ACCEPTANCE] {verdict} {name}")

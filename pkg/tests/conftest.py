from __future__ import annotations

from pathlib import Path

import pytest

from hazident.events import generate_events
from hazident.model import parse_config

AFAS_PATH = Path(__file__).resolve().parent.parent / "configs" / "afas.json"


@pytest.fixture(scope="session")
def afas_text() -> str:
    return AFAS_PATH.read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def afas_config(afas_text):
    return parse_config(afas_text)


@pytest.fixture(scope="session")
def afas_events(afas_config):
    # Generated once per session; the stream is immutable, so sharing is safe.
    return generate_events(afas_config)


def pytest_runtest_logreport(report):
    # One visible verdict line per acceptance criterion.
    if report.when != "call" or "test_acceptance.py" not in report.nodeid:
        return
    label = report.nodeid.split("::")[-1]
    outcome = "PASS" if report.passed else ("FAIL" if report.failed else "SKIP")
    print(f"\n[ACCEPTANCE {outcome}] {label}")

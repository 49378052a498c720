from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from slm.fixtures import DATA_DIR  # noqa: E402
from slm.parser import load_dictionary, load_model  # noqa: E402

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def data():
    return DATA_DIR


@pytest.fixture
def load():
    def _load(rel: str):
        path = DATA_DIR / rel
        return load_dictionary(path) if rel.endswith(".smd") else load_model(path)

    return _load


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")

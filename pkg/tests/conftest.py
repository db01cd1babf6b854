import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from mlrf import corpus  # noqa: E402
from mlrf.loop import build_transition_polyhedron  # noqa: E402


@pytest.fixture(scope="session")
def Q():
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = build_transition_polyhedron(corpus.load(name).loop)
        return cache[name]

    return get


# criterion number -> list of (ok, detail); filled by test_acceptance.py
ACCEPTANCE = {}


def record(number, ok, detail):
    ACCEPTANCE.setdefault(number, []).append((bool(ok), detail))
    print(f"criterion {number}: {'PASS' if ok else 'FAIL'} ({detail})")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[number]
        ok = all(p for p, _ in parts)
        detail = "; ".join(d for _, d in parts)
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}")

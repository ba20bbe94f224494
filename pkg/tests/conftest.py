import sys
from pathlib import Path

import pytest

from bstc.choice import load_choice

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "fixtures"
sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def cyclic_pairs():
    return load_choice(FIXTURES / "cyclic_pairs.json")


@pytest.fixture
def no_alpha_lift():
    return load_choice(FIXTURES / "no_alpha_lift.json")


ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])

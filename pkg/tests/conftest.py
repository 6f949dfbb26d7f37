import os
import sys
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, os.path.dirname(__file__))

from reprlogic.scenario import load_scenario  # noqa: E402

FIXTURES = Path(__file__).resolve().parent.parent / "src" / "reprlogic" / "fixtures"

settings.register_profile("default", deadline=None)
settings.load_profile("default")


def fixture_path(name: str) -> Path:
    return FIXTURES / f"{name}.scn"


@pytest.fixture
def scenario():
    def load(name: str):
        return load_scenario(fixture_path(name))

    return load

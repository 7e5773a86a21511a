import sys
from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(REPO_ROOT / "tests"))

from modsynth.catalog import load_catalog  # noqa: E402


@pytest.fixture(scope="session")
def repo_root() -> Path:
    return REPO_ROOT


@pytest.fixture(scope="session")
def tower_catalog():
    return load_catalog(REPO_ROOT / "catalogs" / "tower")


@pytest.fixture(scope="session")
def arm_catalog():
    return load_catalog(REPO_ROOT / "catalogs" / "arm28")


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return REPO_ROOT / "fixtures" / "requests"

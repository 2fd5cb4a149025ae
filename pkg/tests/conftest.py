from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parent.parent


@pytest.fixture(scope="session")
def iris_path() -> Path:
    return REPO_ROOT / "data" / "iris.csv"

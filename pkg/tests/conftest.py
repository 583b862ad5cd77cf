import os
import sys
from pathlib import Path

import pytest

SRC = Path(__file__).resolve().parents[1] / "src"
if str(SRC) not in sys.path:
    sys.path.insert(0, str(SRC))

from classpoly import cli  # noqa: E402



@pytest.fixture(scope="session")
def ctx(tmp_path_factory):
    """A CLI context whose cache lives for the whole session."""
    root = os.environ.get("CLASSPOLY_TEST_CACHE") or tmp_path_factory.mktemp("cache")
    return cli.Context(cli.Cache(root), jobs=1)

import sys
from pathlib import Path

import pytest

from cedille_kernel.modules import Workspace
from cedille_kernel.runner import corpus_root, load_manifest

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20_000))

ROOT = corpus_root()


@pytest.fixture(scope="session")
def root() -> Path:
    return ROOT


@pytest.fixture(scope="session")
def workspace() -> Workspace:
    """One workspace holding every corpus file that is expected to check."""
    ws = Workspace(search=[ROOT])
    files, _ = load_manifest(ROOT)
    for cf in files:
        if cf.expect == "accept":
            ws.load(ROOT / cf.path)
    return ws


@pytest.fixture(scope="session")
def module(workspace):
    def get(rel: str):
        return workspace.load(ROOT / rel)

    return get

"""
Shared fixtures for the golflab tests.
"""

import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))


@pytest.fixture(autouse=True)
def isolated_environment(tmp_path, monkeypatch):
    """Point every run store and data directory at a temporary location."""
    for name in ('GOLFLAB_SEED', 'GOLFLAB_THREADS', 'GOLFLAB_LOG_LEVEL'):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.setenv('GOLFLAB_DATA_DIR', str(tmp_path / 'data'))
    monkeypatch.setenv('GOLFLAB_DATABASE', str(tmp_path / 'data' / 'runs.db'))
    return tmp_path

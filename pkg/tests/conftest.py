"""Shared fixtures: the channalyse data set, loaded once per session."""

from __future__ import annotations

from pathlib import Path

import pytest

from constel.ingest import load_dataset

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "fixtures" / "channalyse"
FIXTURE_SCHEMA = FIXTURE_DIR / "channalyse.json"


@pytest.fixture(scope="session")
def channalyse():
    return load_dataset(FIXTURE_SCHEMA)


@pytest.fixture(scope="session")
def schema(channalyse):
    return channalyse[0]


@pytest.fixture(scope="session")
def store(channalyse):
    return channalyse[1]

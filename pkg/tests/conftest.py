import os
from pathlib import Path

import pytest

from mutopt import Language, SourceUnit, tokenize

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
DATA = Path(__file__).resolve().parent / "data"

RUN_SLOW = bool(os.environ.get("MUTOPT_RUN_SLOW"))

FULL_BITS_30 = "111111111111111111111111110110"
SCALED_BITS_20 = "11111111111111110110"


def encode_bits(bits: str) -> list[int]:
    """Input encoding used by the binary-conversion fixtures: length first,
    then the bits most significant first."""
    return [len(bits)] + [int(c) for c in bits]


def load_unit(name: str, language: Language = Language.MINI) -> SourceUnit:
    return tokenize((FIXTURES / name).read_bytes(), language)


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def b2tob10_unit() -> SourceUnit:
    return load_unit("b2tob10.mini")


@pytest.fixture
def max_search_unit() -> SourceUnit:
    return load_unit("max_search.mini")

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from gendebias import EmbeddingSpace, planted_fixture, unit_normalize


@pytest.fixture(scope="session")
def fixture_rotated():
    """Planted bilingual fixture whose source side lives in a rotated basis."""
    return planted_fixture(seed=0)


@pytest.fixture(scope="session")
def fixture_aligned():
    """Same construction with the rotation disabled, so both languages share
    the planted coordinate axes."""
    return planted_fixture(seed=0, rotate_source=False)


def small_space(n_words, dim, seed, prefix="w"):
    rng = np.random.default_rng(seed)
    words = [f"{prefix}{i:03d}" for i in range(n_words)]
    matrix = rng.standard_normal((n_words, dim))
    return unit_normalize(EmbeddingSpace(words, matrix))


@pytest.fixture()
def rng():
    return np.random.default_rng(12345)

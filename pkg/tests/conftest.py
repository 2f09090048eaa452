"""Pytest configuration and common fixtures for Tokenlaw tests."""

import tempfile
from pathlib import Path

import pytest

from tokenlaw.config import CORPORA_DIR
from tokenlaw.lexicon import load_bundled_spec
from tokenlaw.types import ComponentRecord

BUBBLE_SOURCE = (CORPORA_DIR / "bubble" / "bubble.c").read_text(encoding="latin-1")

MEASLES_PREFIX = "atggactcgc tatctgtcaa ccagatcttg taccccgaag ttcacctaga tagcccgata"

TWO_FUNCTIONS = """\
/* two functions and a global */
static int total = 0;

int f(int x)
{
    return x + 1;
}

void g(void)
{
    total = f(total);
}
"""


@pytest.fixture
def temp_dir():
    """Provide a temporary directory for tests."""
    with tempfile.TemporaryDirectory() as temp_dir:
        yield Path(temp_dir)


@pytest.fixture(scope="session")
def c_spec():
    """The bundled C specification."""
    return load_bundled_spec("C")


@pytest.fixture
def bubble_source():
    """Source of the bundled bubble-sort fixture."""
    return BUBBLE_SOURCE


@pytest.fixture
def two_functions_source():
    """C source with a global and two functions f and g."""
    return TWO_FUNCTIONS


@pytest.fixture
def measles_prefix():
    """First 60 bases of the measles virus genome, grouped in tens."""
    return MEASLES_PREFIX


@pytest.fixture
def sample_records():
    """A handful of component records of different sizes."""
    return [
        ComponentRecord.from_counts("bubble", "bubble.c", 94, 18, 8),
        ComponentRecord.from_counts("one", "one.c", 1, 1, 0),
        ComponentRecord.from_counts("mid", "mid.c", 40, 15, 9),
        ComponentRecord.from_counts("large", "large.c", 400, 25, 60),
    ]


# Pytest configuration
def pytest_configure(config):
    """Configure pytest with custom markers."""
    config.addinivalue_line(
        "markers", "slow: marks tests as slow (deselect with '-m \"not slow\"')"
    )
    config.addinivalue_line(
        "markers", "integration: marks tests as integration tests"
    )
    config.addinivalue_line(
        "markers", "unit: marks tests as unit tests"
    )


def pytest_collection_modifyitems(config, items):
    """Modify test collection to add markers based on test names."""
    for item in items:
        # Mark integration tests
        if "integration" in item.nodeid or "test_cli" in item.nodeid:
            item.add_marker(pytest.mark.integration)
        # Mark unit tests
        elif any(module in item.nodeid for module in ["test_lexicon", "test_metrics", "test_stats", "test_distfit", "test_emit"]):
            item.add_marker(pytest.mark.unit)

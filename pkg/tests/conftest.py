import os
import sys

import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from pqnet import polynomial


@pytest.fixture(autouse=True)
def fresh_registry():
    """Each test sees an empty variable registry, so display order is
    determined by the registrations the test itself performs."""
    polynomial.reset_registry()
    yield
    polynomial.reset_registry()


MODELS = os.path.join(os.path.dirname(__file__), "..", "models")


def model_path(name: str) -> str:
    return os.path.join(MODELS, name)

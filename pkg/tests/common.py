"""Define common test utilities."""
import os


def fixture_path(filename):
    """Return the absolute path of a fixture file."""
    return os.path.join(os.path.dirname(__file__), "fixtures", filename)


def load_fixture(filename):
    """Load a fixture."""
    with open(fixture_path(filename), encoding="utf-8") as fptr:
        return fptr.read()

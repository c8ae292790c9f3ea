"""Define the unidefect package."""
from .engine import Engine  # noqa

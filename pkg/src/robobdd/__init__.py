"""Behaviour-driven acceptance scenarios for robot pick-and-place."""

from importlib import resources

__version__ = "0.1.0"


def fixture_path(name: str = ""):
    """Path to the bundled example project (or a file inside it)."""
    root = resources.files("robobdd") / "fixtures"
    return root / name if name else root

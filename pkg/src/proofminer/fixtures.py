"""Bundled desk-scale libraries (regenerated by tools/make_fixtures.py)."""
from importlib.resources import files

from .terms import parse_library

NAMES = ("running_example", "assoc", "clusters", "interchange")


def fixture_path(name):
    if name not in NAMES:
        raise KeyError(f"no bundled library {name!r}; have {', '.join(NAMES)}")
    return str(files("proofminer") / "data" / f"{name}.json")


def load_fixture(name):
    with open(fixture_path(name), encoding="utf-8") as fh:
        return parse_library(fh.read())

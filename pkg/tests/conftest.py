import functools

import pytest

from proofminer.fixtures import load_fixture
from proofminer.recurrent import recurrent_cluster
from proofminer.terms import resolve_types


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running scale checks (deselect with -m 'not slow')")


@functools.lru_cache(maxsize=None)
def clustered(name, g, seed=0):
    """Recurrent clustering of a bundled library, computed once per session."""
    return recurrent_cluster(resolve_types(load_fixture(name)), g=g, seed=seed)


@pytest.fixture(scope="session")
def running():
    return resolve_types(load_fixture("running_example"))


@pytest.fixture(scope="session")
def lemma(running):
    return running.objects[-1].term


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)

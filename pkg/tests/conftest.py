from __future__ import annotations

import pytest

from masvscan.testing.corpus import fixtures, write_corpus


def pytest_configure(config):
    # androguard logs through loguru at DEBUG level; keep test output readable
    try:
        from loguru import logger

        logger.remove()
    except ImportError:
        pass


@pytest.fixture(scope="session")
def corpus_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("corpus")
    write_corpus(root)
    return root


@pytest.fixture(scope="session")
def corpus(corpus_dir):
    return {fx.name: (fx, corpus_dir / fx.filename) for fx in fixtures()}


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

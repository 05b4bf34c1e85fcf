from pathlib import Path

import pytest

from ironyinterp.corpus import load_pairs, load_parses
from ironyinterp.lexicons import load_lexicons
from ironyinterp.rq import default_rq_model

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def lexicons():
    return load_lexicons()


@pytest.fixture(scope="session")
def quoted_pairs():
    return load_pairs(FIXTURES / "quoted_pairs.tsv")


@pytest.fixture(scope="session")
def quoted_trees():
    return load_parses(FIXTURES / "quoted_parses.conllu")


@pytest.fixture(scope="session")
def rq_model(lexicons):
    return default_rq_model(lexicons)


@pytest.fixture
def acceptance(request):
    """Record one pass/fail line for an acceptance criterion; printed at the end of the run."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, [])

    def record(criterion, ok, detail):
        status = "SKIP" if ok is None else ("PASS" if ok else "FAIL")
        lines.append(f"[{status}] criterion {criterion}: {detail}")
        return ok

    return record


_ACCEPTANCE = pytest.StashKey[list]()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)

import os

import pytest

from spiral.catalog import paper_catalog
from spiral.deorbit import DeorbitSurrogate, build_surrogate

# Surrogate builds take ~10 s per debris. Set SPIRAL_SURROGATE_CACHE to a
# directory to reuse them across sessions.
_CACHE_DIR = os.environ.get("SPIRAL_SURROGATE_CACHE")


@pytest.fixture(scope="session")
def paper_debris():
    return {e.id: e.to_debris() for e in paper_catalog()}


class _SurrogateStore(dict):
    def __init__(self, debris):
        super().__init__()
        self.debris = debris
        self.build_seconds = {}

    def __missing__(self, key):
        import time

        path = os.path.join(_CACHE_DIR, f"surrogate_{key}.json") if _CACHE_DIR else None
        if path and os.path.exists(path):
            sur = DeorbitSurrogate.load(path)
        else:
            t0 = time.perf_counter()
            sur = build_surrogate(self.debris[key])
            self.build_seconds[key] = time.perf_counter() - t0
            if path:
                os.makedirs(_CACHE_DIR, exist_ok=True)
                sur.save(path)
        self[key] = sur
        return sur

    def subset(self, ids):
        return {k: self[k] for k in ids}


@pytest.fixture(scope="session")
def surrogates(paper_debris):
    """Lazily built paper-scenario surrogates keyed by debris id."""
    return _SurrogateStore(paper_debris)


# one line per acceptance criterion, echoed again in the terminal summary
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report():
    def emit(criterion, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}"
        print(line)
        ACCEPTANCE_LINES.append(line)
        return ok

    return emit


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

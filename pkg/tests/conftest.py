import pytest

from eulertube.scenarios import default_suite, run_scenario


@pytest.fixture(scope="session")
def suite_runs():
    """Two consecutive full-suite runs (for determinism and pipeline checks)."""
    runs = []
    for _ in range(2):
        runs.append({name: run_scenario(name) for name in default_suite()})
    return runs

import pytest

from steklov import Rectangle, build_spectrum, build_spectrum_by_count
from steklov.tables import TableWorkspace, reproduce_table


@pytest.fixture(scope="session")
def square():
    return Rectangle(1.0)


@pytest.fixture(scope="session")
def spec_pf5(square):
    """Per-family depth-5 spectrum on the square (41 modes)."""
    return build_spectrum(square, 5)


@pytest.fixture(scope="session")
def deep_square(square):
    """Global 41-mode spectrum on the square, for prefix truncations."""
    return build_spectrum_by_count(square, 41)


@pytest.fixture(scope="session")
def deeper_square(square):
    """120-mode reference spectrum for spectral-tail identities."""
    return build_spectrum_by_count(square, 120)


@pytest.fixture(scope="session")
def workspace():
    return TableWorkspace()


@pytest.fixture(scope="session")
def all_table_results(workspace):
    """Reproduce every published table once; shared by table and acceptance tests."""
    return {tid: reproduce_table(tid, workspace) for tid in range(1, 15)}

import pytest

from provost.core.store import Store
from provost.fixtures import build_fixture
from provost.workflows.engine import WorkflowEngine


@pytest.fixture(scope="session")
def pilot():
    """The demo dataset, shared. Read-only: tests that write build their own."""
    store = Store()
    build_fixture(store)
    return store


@pytest.fixture()
def store():
    return Store()


@pytest.fixture()
def pilot_engine():
    """A fresh engine over its own copy of the demo dataset."""
    store = Store()
    build_fixture(store)
    return WorkflowEngine(store)

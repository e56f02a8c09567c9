import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from scorer_service.service import create_app, ensure_base
from scorer_service.store import ModelStore


@pytest.fixture(scope="session")
def store_dir(tmp_path_factory) -> Path:
    """One model store per session; the base model is pretrained once."""
    root = tmp_path_factory.mktemp("model-store")
    ensure_base(ModelStore(root))
    return root


@pytest.fixture(scope="session")
def base_model(store_dir):
    store = ModelStore(store_dir)
    return store.load(ensure_base(store))


@pytest.fixture()
def app(store_dir):
    return create_app(store_dir)

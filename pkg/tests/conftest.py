import os

import numpy as np
import pytest
from hypothesis import settings


settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def rng():
    return np.random.default_rng(20240531)


@pytest.fixture(autouse=True)
def _sieve_cache(tmp_path_factory, monkeypatch):
    monkeypatch.setenv("GOWERSLAB_CACHE_DIR", str(tmp_path_factory.getbasetemp() / "sieve-cache"))

import os
import random
from typing import Iterator

import pytest

from eqbn.config import get_settings

# Keep a developer's shell overrides out of the hashed constants.
for _name in [k for k in os.environ if k.startswith("EQBN_")]:
    del os.environ[_name]


@pytest.fixture(autouse=True)
def fresh_settings() -> Iterator[None]:
    """Re-read settings for every test so monkeypatched env vars take effect."""
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def rng() -> random.Random:
    return random.Random("eqbn-tests")

import json
import pathlib

import pytest
from hypothesis import HealthCheck, settings

from hopfore.cli import params_from_config

CONFIG_DIR = pathlib.Path(__file__).resolve().parent.parent / "configs"

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def load(name: str):
    return params_from_config(json.loads((CONFIG_DIR / f"{name}.json").read_text()))


@pytest.fixture(scope="session")
def cfg():
    """Session parameters by config file stem, loaded once."""
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = load(name)
        return cache[name]
    return get

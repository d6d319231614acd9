import functools

import pytest
from hypothesis import HealthCheck, settings

from radarnet.diversity import DiversityPolicy
from radarnet.traffic import ScenarioConfig, run_scenario

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

DEFAULT_SEED = 0


@functools.lru_cache(maxsize=None)
def crossroad_run(kind, seed=DEFAULT_SEED, duration=1800.0):
    """Cached default-crossroad runs: ``baseline``, ``time`` or ``slope`` diversity."""
    diversity = {
        "baseline": DiversityPolicy.none(),
        "time": DiversityPolicy(period_spread=(0.9, 1.1), slope_sigma=0.0),
        "slope": DiversityPolicy(period_spread=(1.0, 1.0), slope_sigma=0.15),
    }[kind]
    cfg = ScenarioConfig(diversity=diversity, seed=seed, sim_duration=duration)
    return cfg, run_scenario(cfg)


@pytest.fixture(scope="session")
def baseline_run():
    return crossroad_run("baseline")

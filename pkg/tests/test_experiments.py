import numpy as np
import pytest

from radarnet.diversity import DiversityPolicy
from radarnet.experiments import (
    analyze_log,
    cloud_sources,
    clouds_from_log,
    default_v_max,
    pair_episodes,
    truth_trajectories,
)
from radarnet.traffic import ScenarioConfig, run_scenario


@pytest.fixture(scope="module")
def freeway():
    cfg = ScenarioConfig(scenario="freeway_bridge", sim_duration=300.0, seed=2,
                         diversity=DiversityPolicy(period_spread=(0.9, 1.1)))
    return cfg, run_scenario(cfg)


def test_pair_episodes_merge_both_directions(freeway):
    _, log = freeway
    ep = pair_episodes(log, 1.0)
    assert np.all(ep.victim <= ep.interferer)
    assert int(ep.n_events.sum()) == int(log.mask("Decision").sum())


def test_clouds_carry_one_interferer_each(freeway):
    cfg, log = freeway
    clouds = clouds_from_log(log, log.trajectories, cfg.n_array_elements)
    src = cloud_sources(log)
    assert len(clouds) == len(src) > 0
    assert [c.cloud_id for c in clouds] == list(range(len(clouds)))
    # the interferer sits inside the cloud built from its events, most of the time
    truth = {tr.vehicle_id: tr for tr in truth_trajectories(log.trajectories)}
    inside = [c.contains(truth[j].at(c.mid_time))[0] for c, j in zip(clouds, src)]
    assert np.mean(inside) > 0.5


def test_analysis_summary_shape(freeway):
    _, log = freeway
    out = analyze_log(log, mc_reps=200)
    assert out["n_events"] == len(log) and out["config_hash"] == log.config_hash
    assert out["stage_counts"]["Decision"] + out["stage_counts"]["IF"] == len(log)
    assert "summary" in out["intervals"]


def test_default_v_max():
    assert default_v_max(13.41) == pytest.approx(20.115)

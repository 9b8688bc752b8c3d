import itertools

import numpy as np
import pytest

from conftest import SCENARIOS, small_config
from swarmcov.channel import ChannelParams
from swarmcov.config import ConfigError, load_config
from swarmcov.engine import initial_positions, run, sweep, ue_rss_metric
from swarmcov.rng import GaussianStream


def test_same_seed_same_trace():
    cfg = small_config()
    a, b = run(cfg), run(cfg)
    assert a.same_as(b)
    assert [r.stage_ms for r in a.records] != [None] * len(a)


def test_different_seed_differs():
    a = run(small_config())
    b = run(small_config(seed=4))
    assert not a.same_as(b)


def test_one_step_duration():
    tr = run(small_config(duration_s=1.0))
    assert len(tr) == 1 and tr.records[0].time_s == 1.0


def test_step_count_floors():
    assert len(run(small_config(duration_s=3.5))) == 3


def test_initial_positions_distinct_and_near_origin():
    for n in (1, 3, 5, 8):
        pos = initial_positions(small_config(uav_count=n))
        assert len({tuple(p) for p in pos}) == n
        assert np.all(np.abs(pos) <= 1.5)


def test_single_robot_reaches_ue():
    cfg = load_config(SCENARIOS / "single.toml")
    ue = np.array(cfg.ue_positions[0])
    tr = run(cfg)
    dist = [np.linalg.norm(r.positions[0] - ue) for r in tr.records]
    assert dist[0] < 50.0
    first_inside = next(t for t, d in enumerate(dist) if d <= cfg.cell_size_m)
    assert all(b < a for a, b in zip(dist[:first_inside], dist[1:first_inside + 1]))
    assert tr.records[-1].ue_expected_rss_dbm[0] >= -35.0


def test_ue_metric_examples():
    quiet = ChannelParams(fading_var_dbm2=0.0)
    rng = GaussianStream.from_key(0, 1)
    assert ue_rss_metric([(10, 0), (100, 0)], [(0, 0)], quiet, rng)[0] == pytest.approx(-60.65, abs=1e-9)
    assert ue_rss_metric([(0.5, 0)], [(0, 0)], quiet, rng)[0] == pytest.approx(-30.65, abs=1e-9)
    with pytest.raises(ValueError):
        ue_rss_metric(np.zeros((0, 2)), [(0, 0)], quiet, rng)


def test_ue_metric_permutation_invariant():
    quiet = ChannelParams(fading_var_dbm2=0.0)
    robots = [(10, 0), (30, 40), (-20, 5)]
    ues = [(0, 0), (25, 25)]
    base = ue_rss_metric(robots, ues, quiet, GaussianStream.from_key(0, 1))
    for perm in itertools.permutations(robots):
        assert np.array_equal(ue_rss_metric(perm, ues, quiet, GaussianStream.from_key(0, 1)), base)


def test_disk_controller_uses_radius():
    tr = run(small_config(controller="disk", disk_radius_m=0.5, duration_s=2))
    assert np.all(tr.records[0].neighborhood_sizes == 0)


def test_warm_start_runs():
    tr = run(small_config(solver={"warm_start": True}))
    assert all(r.solver_converged for r in tr.records)


def test_moving_ues_reach_goals():
    cfg = small_config(duration_s=10, roi={"ue_positions": [[0, 0]], "ue_goals": [[5, 0]], "ue_speed": 1.0})
    tr = run(cfg)
    assert np.allclose(tr.records[4].ue_positions, [[5, 0]]) and np.allclose(tr.records[-1].ue_positions, [[5, 0]])


def test_sweep_single_trial_equals_run():
    cfg = small_config()
    (g,) = sweep(cfg, "k", [cfg.k], trials=1)
    tr = run(cfg)
    assert np.array_equal(g.payoff_mean, tr.mean_payoff)
    assert np.array_equal(g.rss_mean, tr.mean_ue_rss)
    assert np.all(g.payoff_stderr == 0)


def test_sweep_groups_and_determinism():
    cfg = small_config(duration_s=3)
    a = sweep(cfg, "controller", ["coco", "disk"], trials=2)
    b = sweep(cfg, "controller", ["coco", "disk"], trials=2)
    assert [g.value for g in a] == ["coco", "disk"]
    assert all(np.array_equal(x.trial_rss, y.trial_rss) for x, y in zip(a, b))


def test_sweep_rejects_bad_axis():
    with pytest.raises(ConfigError):
        sweep(small_config(), "alpha", [1], trials=1)


def test_uav_count_axis():
    groups = sweep(small_config(duration_s=2), "uav_count", [1, 2], trials=1)
    assert len(groups) == 2

"""Deterministic simulation loop and trial sweeps.

Per step: sample the inter-robot link graph, route, pick neighborhoods
(k-hop for ``coco``, fixed radius for ``disk``), rebuild the ROI grid from the
UEs, build and solve the stage game, execute each robot's most probable
action, move the UEs, then record metrics at the new positions.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from swarmcov.channel import ChannelParams, expected_rss, sample_rss
from swarmcov.config import ConfigError, ScenarioConfig
from swarmcov.dynamics import RobotState, build_action_set, step as dyn_step
from swarmcov.game import build_stage_game
from swarmcov.mfvi import optimize_stage, select_action
from swarmcov.netsim import build_link_graph, compute_routing_tables, disk_neighborhood, hop_stats, is_connected
from swarmcov.rng import JITTER, LINKS, UE_METRIC, GaussianStream, stream
from swarmcov.roi import UeTeam, advance_ues, build_grid, ellipsoid_from_ues


@dataclass
class StepRecord:
    step: int
    time_s: float
    positions: np.ndarray  # (n, 2) after executing the step
    velocities: np.ndarray
    ue_positions: np.ndarray  # (u, 2) after moving
    connected: bool
    ue_rss_dbm: np.ndarray  # best sampled RSS per UE
    ue_expected_rss_dbm: np.ndarray  # best expected RSS per UE
    payoffs: np.ndarray  # per robot, at the executed joint action
    actions: np.ndarray
    solver_sweeps: int
    solver_converged: bool
    solver_delta: float
    neighborhood_sizes: np.ndarray
    mean_hops: float  # finite hops only; nan without any route
    stage_ms: float  # wall clock for game build + solve; excluded from equality

    def same_as(self, other: "StepRecord") -> bool:
        for name in self.__dataclass_fields__:
            if name == "stage_ms":
                continue
            a, b = getattr(self, name), getattr(other, name)
            if isinstance(a, np.ndarray):
                if a.shape != b.shape or not np.array_equal(a, b, equal_nan=a.dtype.kind == "f"):
                    return False
            elif isinstance(a, float) and math.isnan(a):
                if not (isinstance(b, float) and math.isnan(b)):
                    return False
            elif a != b:
                return False
        return True


@dataclass
class SimTrace:
    config: ScenarioConfig
    initial_positions: np.ndarray
    initial_ue_positions: np.ndarray
    records: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    def same_as(self, other: "SimTrace") -> bool:
        return (len(self) == len(other)
                and np.array_equal(self.initial_positions, other.initial_positions)
                and all(a.same_as(b) for a, b in zip(self.records, other.records)))

    def series(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records])

    @property
    def mean_ue_rss(self) -> np.ndarray:
        return np.array([float(np.mean(r.ue_rss_dbm)) for r in self.records])

    @property
    def mean_payoff(self) -> np.ndarray:
        return np.array([float(np.mean(r.payoffs)) for r in self.records])


def initial_positions(cfg: ScenarioConfig) -> np.ndarray:
    """Robots start at the origin, spread over distinct points of a 1 m lattice."""
    if cfg.initial_positions is not None:
        return np.asarray(cfg.initial_positions, dtype=float).reshape(-1, 2)
    side = int(math.ceil(math.sqrt(cfg.uav_count))) + 1
    offs = np.arange(side) - (side - 1) / 2.0
    lattice = np.array([(x, y) for y in offs for x in offs])
    order = stream(cfg.seed, JITTER).permutation(len(lattice))
    return lattice[order[: cfg.uav_count]]


def ue_rss_metric(robot_positions, ue_positions, params: ChannelParams, rng: GaussianStream) -> np.ndarray:
    """Best sampled RSS per UE; draws run UE-major then robot index."""
    robots = np.asarray(robot_positions, dtype=float).reshape(-1, 2)
    ues = np.asarray(ue_positions, dtype=float).reshape(-1, 2)
    if len(robots) < 1:
        raise ValueError("need at least one robot")
    out = np.empty(len(ues))
    for u, ue in enumerate(ues):
        out[u] = max(sample_rss(r, ue, params, rng) for r in robots)
    return out


def _expected_best(robots: np.ndarray, ues: np.ndarray, params: ChannelParams) -> np.ndarray:
    return np.array([max(expected_rss(r, ue, params) for r in robots) for ue in ues])


def run(cfg: ScenarioConfig) -> SimTrace:
    actions = build_action_set(cfg.a_max, cfg.levels_per_axis)
    pos0 = initial_positions(cfg)
    states = [RobotState((float(p[0]), float(p[1]))) for p in pos0]
    ue_pos = np.asarray(cfg.ue_positions, dtype=float).reshape(-1, 2)
    goals = np.asarray(cfg.ue_goals, dtype=float).reshape(-1, 2) if cfg.ue_goals is not None else ue_pos.copy()
    team = UeTeam(ue_pos, goals, cfg.ue_speed)
    trace = SimTrace(cfg, pos0.copy(), ue_pos.copy())
    warm = None
    n = cfg.uav_count

    for t in range(cfg.step_count):
        positions = np.array([s.pos for s in states])
        graph = build_link_graph(positions, cfg.channel, GaussianStream.from_key(cfg.seed, LINKS, t))
        tables = compute_routing_tables(graph)
        if cfg.controller == "disk":
            neighborhoods = disk_neighborhood(positions, cfg.disk_radius_m)
        else:
            neighborhoods = None

        mean, cov = ellipsoid_from_ues(team.positions)
        grid = build_grid(mean, cov, cfg.cell_size_m, cfg.mahalanobis_cut)

        t0 = time.perf_counter()
        game = build_stage_game(states, tables, cfg.k, grid, cfg.channel, cfg.weights, actions, cfg.dt_s,
                                neighborhoods=neighborhoods)
        marg, report = optimize_stage(game, cfg.tol, cfg.max_sweeps, init=warm if cfg.warm_start else None,
                                      track_energy=False)
        stage_ms = (time.perf_counter() - t0) * 1e3
        warm = marg

        chosen = np.array([select_action(marg[i]) for i in range(n)])
        pay = np.array([_table_payoff(i, chosen, game) for i in range(n)])
        states = [dyn_step(s, actions[a], cfg.dt_s, cfg.v_max) for s, a in zip(states, chosen)]
        team = advance_ues(team, cfg.dt_s)

        new_pos = np.array([s.pos for s in states])
        ue_rss = ue_rss_metric(new_pos, team.positions, cfg.channel, GaussianStream.from_key(cfg.seed, UE_METRIC, t))
        mean_hops, _ = hop_stats(tables)
        trace.records.append(StepRecord(
            step=t,
            time_s=(t + 1) * cfg.dt_s,
            positions=new_pos,
            velocities=np.array([s.vel for s in states]),
            ue_positions=team.positions.copy(),
            connected=is_connected(graph),
            ue_rss_dbm=ue_rss,
            ue_expected_rss_dbm=_expected_best(new_pos, team.positions, cfg.channel),
            payoffs=pay,
            actions=chosen,
            solver_sweeps=report.iterations,
            solver_converged=report.converged,
            solver_delta=report.final_delta,
            neighborhood_sizes=np.array([len(nb) for nb in game.neighborhoods]),
            mean_hops=mean_hops,
            stage_ms=stage_ms,
        ))
    return trace


def _table_payoff(i: int, joint, game) -> float:
    value = game.alpha_a * game.coverage[i, joint[i]]
    for j in sorted(game.neighborhoods[i]):
        value += game.alpha_b * game.pair_table(i, j)[joint[i], joint[j]]
    return float(value)


# -- sweeps -------------------------------------------------------------------

SWEEP_AXES = ("k", "uav_count", "controller")


@dataclass
class SweepGroup:
    axis: str
    value: object
    trials: int
    time_s: np.ndarray
    payoff_mean: np.ndarray
    payoff_stderr: np.ndarray
    rss_mean: np.ndarray
    rss_stderr: np.ndarray
    trial_payoff: np.ndarray  # (trials, steps) per-trial mean payoff over robots
    trial_rss: np.ndarray  # (trials, steps) per-trial mean UE RSS
    all_connected: np.ndarray  # (trials,)


def trial_seed(base_seed: int, trial: int) -> int:
    """Seed for one trial; shared across axis values so comparisons are paired."""
    return int(stream(base_seed, 1_000, trial).integers(0, 2**31 - 1))


def _stderr(x: np.ndarray) -> np.ndarray:
    if x.shape[0] < 2:
        return np.zeros(x.shape[1:])
    return x.std(axis=0, ddof=1) / math.sqrt(x.shape[0])


def sweep(base: ScenarioConfig, axis: str, values: Iterable, trials: int = 20) -> list[SweepGroup]:
    if axis not in SWEEP_AXES:
        raise ConfigError(axis, f"sweep axis must be one of {SWEEP_AXES}")
    if trials < 1:
        raise ConfigError("trials", "must be >= 1")
    groups = []
    for value in values:
        changes = {axis: value}
        if axis == "uav_count" and base.initial_positions is not None:
            changes["initial_positions"] = None
        pay, rss, conn = [], [], []
        for trial in range(trials):
            seed = base.seed if trials == 1 else trial_seed(base.seed, trial)
            tr = run(base.replace(seed=seed, **changes))
            pay.append(tr.mean_payoff)
            rss.append(tr.mean_ue_rss)
            conn.append(bool(np.all(tr.series("connected"))))
        pay_a, rss_a = np.array(pay), np.array(rss)
        time_s = (np.arange(base.step_count) + 1) * base.dt_s
        groups.append(SweepGroup(axis, value, trials, time_s, pay_a.mean(axis=0), _stderr(pay_a),
                                 rss_a.mean(axis=0), _stderr(rss_a), pay_a, rss_a, np.array(conn)))
    return groups

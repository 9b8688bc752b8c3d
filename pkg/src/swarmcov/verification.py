"""Randomized property checks on small stage games.

Each instance is a physically generated game (random robot states, UEs,
sampled links, weights) small enough to enumerate every joint action. The
checks compare the solver-side tables against the state-based evaluation
route and against brute-force enumeration.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from swarmcov.channel import ChannelParams
from swarmcov.dynamics import ActionSet, RobotState, build_action_set
from swarmcov.game import GameWeights, StageGame, build_stage_game, cliques, joint_unnormalized_log_density, log_potential
from swarmcov.mfvi import MarginalSet, init_marginals, optimize_stage, update_marginal, variational_energy, verify_equilibrium
from swarmcov.netsim import build_link_graph, compute_routing_tables
from swarmcov.rng import INSTANCE, GaussianStream, stream
from swarmcov.roi import build_grid, ellipsoid_from_ues

FAULTS = ("psi_r_sign",)


def random_instance(seed: int, index: int, max_players: int = 4, max_actions: int = 4) -> StageGame:
    gen = stream(seed, INSTANCE, index)
    n = int(gen.integers(1, max_players + 1))
    m = int(gen.integers(2, max_actions + 1))
    grid_actions = build_action_set(3.0, 3).actions
    actions = ActionSet(grid_actions[np.sort(gen.choice(len(grid_actions), size=m, replace=False))])
    states = [RobotState(tuple(gen.uniform(-30, 30, 2)), tuple(gen.uniform(-2, 2, 2))) for _ in range(n)]
    ues = gen.uniform(-50, 50, (int(gen.integers(1, 6)), 2))
    params = ChannelParams()
    graph = build_link_graph([s.pos for s in states], params, GaussianStream(gen))
    routing = compute_routing_tables(graph)
    k = int(gen.integers(1, 3))
    weights = GameWeights(alpha_a=float(gen.uniform(0.1, 1.0)), alpha_b=float(gen.uniform(0.001, 0.5)))
    mean, cov = ellipsoid_from_ues(ues)
    grid = build_grid(mean, cov, 10.0, 3.0)
    return build_stage_game(states, routing, k, grid, params, weights, actions, 1.0)


def exp_family_error(game: StageGame) -> float:
    """Worst relative gap between the clique-potential product and the joint density."""
    worst = 0.0
    cl = cliques(game)
    for joint in itertools.product(range(game.n_actions), repeat=game.n_players):
        prod = 1.0
        for c in cl:
            prod *= np.exp(log_potential(c, joint, game))
        dens = np.exp(joint_unnormalized_log_density(joint, game))
        worst = max(worst, abs(prod - dens) / dens)
    return float(worst)


def max_energy_drop(game: StageGame, sweeps: int = 20) -> float:
    """Largest decrease of the variational energy over single-player updates."""
    marg = init_marginals(game)
    prev = variational_energy(marg, game)
    worst = 0.0
    for _ in range(sweeps):
        for i in game.players:
            q = update_marginal(i, marg, game)
            with np.errstate(divide="ignore"):
                marg.log_q[i] = np.log(q)
            cur = variational_energy(marg, game)
            worst = max(worst, prev - cur)
            prev = cur
    return float(worst)


@dataclass
class InstanceResult:
    index: int
    players: int
    actions: int
    converged_default: bool
    exp_family_rel_err: float
    energy_drop: float
    equilibrium_ok: bool
    identity_err: float
    ordering_violation: float

    def passed(self, rel_tol: float = 1e-9, drop_tol: float = 1e-8) -> bool:
        return (self.converged_default and self.exp_family_rel_err < rel_tol and self.energy_drop <= drop_tol
                and self.equilibrium_ok)


def check_instance(seed: int, index: int, epsilon: float = 1e-6, fault: str | None = None) -> InstanceResult:
    physical = random_instance(seed, index)
    if fault is not None and fault not in FAULTS:
        raise ValueError(f"unknown fault {fault!r}")
    # the solver sees the (possibly corrupted) tables; oracles recompute from states
    solver_game = physical.with_pairwise_sign_flipped() if fault == "psi_r_sign" else physical
    _, default_report = optimize_stage(solver_game, tol=1e-6, max_sweeps=100, track_energy=False)
    marg, report = optimize_stage(solver_game, tol=1e-12, max_sweeps=1000, track_energy=False)
    checks = verify_equilibrium(marg, physical, epsilon, converged=report.converged)
    return InstanceResult(
        index=index,
        players=physical.n_players,
        actions=physical.n_actions,
        converged_default=default_report.converged,
        exp_family_rel_err=exp_family_error(solver_game),
        energy_drop=max_energy_drop(solver_game),
        equilibrium_ok=all(c.passed for c in checks),
        identity_err=max(c.max_identity_error for c in checks),
        ordering_violation=max(c.max_ordering_violation for c in checks),
    )

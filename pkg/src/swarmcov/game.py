"""Per-timestep stage game and its Markov random field.

A player's payoff is ``alpha_a * psi_c(x_i) + alpha_b * sum_j psi_r(x_i, x_j)``
over its neighborhood. The MRF lives on the neighborhood graph completed into
cliques with auxiliary (zero-weight) edges; unary neighborhood-clique
potentials carry the coverage term and original edges carry the pairwise RSS.

Two evaluation routes exist on purpose. The solver reads the precomputed
``coverage`` and ``pairwise`` tables; :func:`coverage_psi_c`,
:func:`pairwise_psi_r`, :func:`payoff` and
:func:`joint_unnormalized_log_density` recompute from robot states and the
ROI grid whenever the game carries them, so the two can be checked against
each other.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Mapping, Optional, Sequence

import numpy as np

from swarmcov.channel import ChannelParams, expected_rss, rss_at_distance
from swarmcov.dynamics import ActionSet, RobotState, predict_position, predict_positions
from swarmcov.netsim import RoutingTables, k_hop_neighborhood
from swarmcov.roi import RoiGrid

ORIGINAL = "original"
AUXILIARY = "auxiliary"


@dataclass(frozen=True)
class GameWeights:
    alpha_a: float = 1.0
    alpha_b: float = 0.001


@dataclass(frozen=True, eq=False)
class StageGame:
    action_set: ActionSet
    neighborhoods: tuple  # tuple[frozenset[int], ...]
    edges: dict  # (i, j), i < j -> ORIGINAL | AUXILIARY
    alpha_a: float
    alpha_b: float
    coverage: np.ndarray  # (n, m): psi_c(i, x_i)
    pairwise: dict  # (i, j), i < j, original edges only -> (m, m) psi_r[x_i, x_j]
    dt: float = 1.0
    states: Optional[tuple] = None
    grid: Optional[RoiGrid] = None
    params: Optional[ChannelParams] = None
    fixed_field: Optional[np.ndarray] = None  # (n, cells), -inf without neighbors
    incident: tuple = field(init=False, repr=False)

    def __post_init__(self):
        n = len(self.neighborhoods)
        for i, nb in enumerate(self.neighborhoods):
            if i in nb:
                raise ValueError(f"player {i} lists itself as a neighbor")
            for j in nb:
                if i not in self.neighborhoods[j]:
                    raise ValueError(f"neighborhoods not symmetric at ({i}, {j})")
        if self.coverage.shape != (n, len(self.action_set)):
            raise ValueError("coverage table shape mismatch")
        incident: list[list[int]] = [[] for _ in range(n)]
        for (i, j), kind in sorted(self.edges.items()):
            if kind == ORIGINAL:
                incident[i].append(j)
                incident[j].append(i)
        object.__setattr__(self, "incident", tuple(tuple(sorted(x)) for x in incident))

    @property
    def n_players(self) -> int:
        return len(self.neighborhoods)

    @property
    def players(self) -> range:
        return range(self.n_players)

    @property
    def n_actions(self) -> int:
        return len(self.action_set)

    @property
    def has_physics(self) -> bool:
        return self.states is not None and self.grid is not None and self.params is not None

    def pair_table(self, i: int, j: int) -> np.ndarray:
        """psi_r table indexed ``[x_i, x_j]`` for an original edge."""
        if i < j:
            return self.pairwise[(i, j)]
        return self.pairwise[(j, i)].T

    def original_edges(self) -> list[tuple[int, int]]:
        return sorted(e for e, kind in self.edges.items() if kind == ORIGINAL)

    def auxiliary_edges(self) -> list[tuple[int, int]]:
        return sorted(e for e, kind in self.edges.items() if kind == AUXILIARY)

    def with_pairwise_sign_flipped(self) -> "StageGame":
        """Fault-injection hook: negate only the solver-side pairwise tables."""
        return replace(self, pairwise={e: -t for e, t in self.pairwise.items()})


def derive_edges(neighborhoods: Sequence) -> dict:
    """Original neighborhood edges plus auxiliary edges completing each neighborhood."""
    edges = {}
    for i, nb in enumerate(neighborhoods):
        for j in nb:
            edges[(min(i, j), max(i, j))] = ORIGINAL
    for nb in neighborhoods:
        for j, h in itertools.combinations(sorted(nb), 2):
            edges.setdefault((j, h), AUXILIARY)
    return edges


def from_tables(coverage, pairwise: Mapping, neighborhoods: Sequence, action_set: ActionSet | None = None,
                weights: GameWeights = GameWeights()) -> StageGame:
    """Stage game from explicit payoff tables (no robot physics attached)."""
    coverage = np.asarray(coverage, dtype=float)
    nbs = tuple(frozenset(nb) for nb in neighborhoods)
    edges = derive_edges(nbs)
    pw = {}
    for (i, j), table in pairwise.items():
        table = np.asarray(table, dtype=float)
        pw[(i, j) if i < j else (j, i)] = table if i < j else table.T
    missing = [e for e in edges if edges[e] == ORIGINAL and e not in pw]
    if missing:
        raise ValueError(f"pairwise table missing for edges {missing}")
    if action_set is None:
        action_set = ActionSet(np.zeros((coverage.shape[1], 2)))
    return StageGame(action_set, nbs, edges, float(weights.alpha_a), float(weights.alpha_b), coverage, pw)


def build_stage_game(states: Sequence[RobotState], routing: RoutingTables | None, k: int, grid: RoiGrid,
                     params: ChannelParams, weights: GameWeights, action_set: ActionSet, dt: float,
                     neighborhoods: Sequence | None = None) -> StageGame:
    """Assemble the stage game for the current timestep.

    Neighborhoods come from the routing tables (``k`` hops) unless given
    explicitly, which is how the disk baseline substitutes its own rule.
    """
    n = len(states)
    if neighborhoods is None:
        if routing is None or routing.node_count != n:
            raise ValueError("routing tables must cover the same nodes as states")
        neighborhoods = [k_hop_neighborhood(routing, i, k) for i in range(n)]
    nbs = tuple(frozenset(nb) for nb in neighborhoods)
    edges = derive_edges(nbs)

    current = np.array([s.pos for s in states])
    # rss from every robot's current position to every cell: (n, cells)
    cur_rss = rss_at_distance(np.linalg.norm(current[:, None, :] - grid.centers[None, :, :], axis=-1), params)
    cur_rss = np.atleast_2d(cur_rss)
    fixed = np.full((n, len(grid)), -np.inf)
    for i, nb in enumerate(nbs):
        for j in sorted(nb):
            fixed[i] = np.maximum(fixed[i], cur_rss[j])

    preds = [predict_positions(s, action_set, dt) for s in states]
    coverage = np.empty((n, len(action_set)))
    for i in range(n):
        d = np.linalg.norm(preds[i][:, None, :] - grid.centers[None, :, :], axis=-1)
        field_ = np.maximum(np.atleast_2d(rss_at_distance(d, params)), fixed[i][None, :])
        coverage[i] = field_ @ grid.probs

    pairwise = {}
    for (i, j), kind in sorted(edges.items()):
        if kind == ORIGINAL:
            d = np.linalg.norm(preds[i][:, None, :] - preds[j][None, :, :], axis=-1)
            pairwise[(i, j)] = np.atleast_2d(rss_at_distance(d, params))

    return StageGame(action_set, nbs, edges, float(weights.alpha_a), float(weights.alpha_b), coverage,
                     pairwise, float(dt), tuple(states), grid, params, fixed)


def _check_action(game: StageGame, x: int) -> None:
    if not 0 <= x < game.n_actions:
        raise ValueError(f"action index {x} outside action set of size {game.n_actions}")


def coverage_psi_c(i: int, x_i: int, game: StageGame, grid: RoiGrid | None = None) -> float:
    """Expected cooperative RSS field over the ROI when player ``i`` plays ``x_i``."""
    _check_action(game, x_i)
    grid = grid if grid is not None else game.grid
    if not game.has_physics or grid is None:
        return float(game.coverage[i, x_i])
    pos = predict_position(game.states[i], game.action_set[x_i], game.dt)
    own = np.atleast_1d(rss_at_distance(np.hypot(*(grid.centers - pos).T), game.params))
    return float(np.sum(np.maximum(own, game.fixed_field[i]) * grid.probs))


def pairwise_psi_r(i: int, x_i: int, j: int, x_j: int, game: StageGame) -> float:
    """Expected RSS between the predicted positions of ``i`` and ``j``."""
    if i == j:
        raise ValueError("pairwise term needs two distinct players")
    _check_action(game, x_i)
    _check_action(game, x_j)
    if not game.has_physics:
        return float(game.pair_table(i, j)[x_i, x_j])
    pi = predict_position(game.states[i], game.action_set[x_i], game.dt)
    pj = predict_position(game.states[j], game.action_set[x_j], game.dt)
    return expected_rss(pi, pj, game.params)


def payoff(i: int, joint_action: Mapping[int, int] | Sequence[int], game: StageGame) -> float:
    x_i = joint_action[i]
    value = game.alpha_a * coverage_psi_c(i, x_i, game)
    pair = sum(pairwise_psi_r(i, x_i, j, joint_action[j], game) for j in sorted(game.neighborhoods[i]))
    return float(value + game.alpha_b * pair)


def cliques(game: StageGame) -> list[tuple[int, ...]]:
    """Neighborhood cliques ``(i,)`` followed by every edge of the completed graph."""
    return [(i,) for i in game.players] + sorted(game.edges)


def log_potential(clique: tuple[int, ...], assignment, game: StageGame) -> float:
    if len(clique) == 1:
        (i,) = clique
        if not 0 <= i < game.n_players:
            raise ValueError(f"unknown clique {clique!r}")
        return float(game.alpha_a * game.coverage[i, assignment[i]])
    if len(clique) == 2:
        i, j = clique
        kind = game.edges.get((min(i, j), max(i, j)))
        if kind is None:
            raise ValueError(f"unknown clique {clique!r}")
        if kind == AUXILIARY:
            return 0.0
        return float(game.alpha_b * game.pair_table(i, j)[assignment[i], assignment[j]])
    raise ValueError(f"unknown clique {clique!r}")


def joint_unnormalized_log_density(joint_action, game: StageGame) -> float:
    cover = sum(coverage_psi_c(i, joint_action[i], game) for i in game.players)
    pair = sum(pairwise_psi_r(i, joint_action[i], j, joint_action[j], game) for i, j in game.original_edges())
    return float(game.alpha_a * cover + game.alpha_b * pair)

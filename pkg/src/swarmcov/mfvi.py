"""Coordinate-ascent mean-field inference for the stage game.

Each marginal update is a softmax of the player's conditional expected
log-potential, where the expectation over neighbor actions is weighted by
the neighbors' current marginals. Marginals are carried in log space so the
fixed-point identity can be checked even when probabilities underflow.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from swarmcov.game import StageGame, payoff
from swarmcov.rng import SAMPLING, stream

log = logging.getLogger(__name__)

ENUMERATION_LIMIT = 200_000


@dataclass
class MarginalSet:
    log_q: list  # list[np.ndarray], one log-probability vector per player

    @property
    def q(self) -> list[np.ndarray]:
        return [np.exp(lq) for lq in self.log_q]

    def __getitem__(self, i: int) -> np.ndarray:
        return np.exp(self.log_q[i])

    def __len__(self) -> int:
        return len(self.log_q)

    def copy(self) -> "MarginalSet":
        return MarginalSet([lq.copy() for lq in self.log_q])

    @classmethod
    def from_probs(cls, probs) -> "MarginalSet":
        out = []
        for p in probs:
            p = np.asarray(p, dtype=float)
            with np.errstate(divide="ignore"):
                out.append(np.log(p / p.sum()))
        return cls(out)


@dataclass
class SolveReport:
    iterations: int
    converged: bool
    final_delta: float
    energy_trace: list = field(default_factory=list)


def _log_softmax(logits: np.ndarray) -> np.ndarray:
    return logits - logsumexp(logits)


def init_marginals(game: StageGame) -> MarginalSet:
    return MarginalSet([_log_softmax(game.alpha_a * game.coverage[i]) for i in game.players])


def conditional_logits(i: int, marginals: MarginalSet, game: StageGame) -> np.ndarray:
    """Expected log-potential of each of ``i``'s actions given neighbor marginals."""
    logits = game.alpha_a * game.coverage[i]
    if game.alpha_b != 0.0:
        for j in game.incident[i]:
            logits = logits + game.alpha_b * (game.pair_table(i, j) @ np.exp(marginals.log_q[j]))
    return logits


def update_marginal(i: int, marginals: MarginalSet, game: StageGame) -> np.ndarray:
    """New probability vector for player ``i``; ``marginals`` is left untouched."""
    return np.exp(_log_softmax(conditional_logits(i, marginals, game)))


def _entropy(log_q: np.ndarray) -> float:
    q = np.exp(log_q)
    mask = q > 0
    return float(-np.sum(q[mask] * log_q[mask]))


def variational_energy(marginals: MarginalSet, game: StageGame) -> float:
    """Entropy of the product distribution plus expected clique log-potentials."""
    q = marginals.q
    total = sum(_entropy(lq) for lq in marginals.log_q)
    for i in game.players:
        total += game.alpha_a * float(q[i] @ game.coverage[i])
    for i, j in game.original_edges():
        total += game.alpha_b * float(q[i] @ game.pair_table(i, j) @ q[j])
    return float(total)


def optimize_stage(game: StageGame, tol: float = 1e-6, max_sweeps: int = 100, init: MarginalSet | None = None,
                   mode: str = "sequential", track_energy: bool = True) -> tuple[MarginalSet, SolveReport]:
    """Round-robin coordinate ascent until the largest marginal change is below ``tol``.

    ``mode="synchronous"`` updates every player from the previous sweep's
    marginals; the energy is then not guaranteed to be monotone.
    """
    if not tol > 0:
        raise ValueError("tol must be > 0")
    if mode not in ("sequential", "synchronous"):
        raise ValueError(f"unknown mode {mode!r}")
    marg = init.copy() if init is not None else init_marginals(game)
    trace = [variational_energy(marg, game)] if track_energy else []
    delta = float("inf")
    sweeps = 0
    while sweeps < max_sweeps:
        sweeps += 1
        delta = 0.0
        source = marg.copy() if mode == "synchronous" else marg
        for i in game.players:
            new_log = _log_softmax(conditional_logits(i, source, game))
            delta = max(delta, float(np.max(np.abs(np.exp(new_log) - np.exp(marg.log_q[i])))))
            marg.log_q[i] = new_log
        if track_energy:
            trace.append(variational_energy(marg, game))
        if delta < tol:
            break
    converged = delta < tol
    if not converged:
        log.debug("mean-field did not converge: delta=%g after %d sweeps", delta, sweeps)
    return marg, SolveReport(sweeps, converged, delta, trace)


def select_action(q_i) -> int:
    """Most probable action; ``np.argmax`` already breaks ties toward the lowest index."""
    return int(np.argmax(np.asarray(q_i)))


# -- equilibrium verification -------------------------------------------------


@dataclass
class PlayerCheck:
    player: int
    applicable: bool
    method: str  # "enumerated" | "sampled" | "n/a"
    expected_payoffs: np.ndarray | None = None
    max_identity_error: float = float("nan")
    max_ordering_violation: float = float("nan")
    identity_ok: bool = False
    ordering_ok: bool = False

    @property
    def passed(self) -> bool:
        return self.applicable and self.identity_ok and self.ordering_ok


def brute_force_expected_payoffs(i: int, marginals: MarginalSet, game: StageGame,
                                 limit: int = ENUMERATION_LIMIT, seed: int = 0,
                                 samples: int = 20_000) -> tuple[np.ndarray, str, np.ndarray]:
    """Expected payoff of each action of ``i`` against neighbors' product marginal.

    Enumerates every neighbor joint action through :func:`payoff` when there
    are at most ``limit`` of them; otherwise falls back to a fixed-seed Monte
    Carlo estimate. Returns ``(values, method, standard_errors)``.
    """
    nbrs = sorted(game.neighborhoods[i])
    m = game.n_actions
    probs = marginals.q
    joint = {j: 0 for j in game.players}
    values = np.zeros(m)
    stderr = np.zeros(m)
    count = m ** len(nbrs)
    if count <= limit:
        for combo in itertools.product(range(m), repeat=len(nbrs)):
            w = 1.0
            for j, xj in zip(nbrs, combo):
                w *= probs[j][xj]
                joint[j] = xj
            if w == 0.0:
                continue
            for xi in range(m):
                joint[i] = xi
                values[xi] += w * payoff(i, joint, game)
        return values, "enumerated", stderr
    gen = stream(seed, SAMPLING, i)
    draws = np.stack([gen.choice(m, size=samples, p=probs[j] / probs[j].sum()) for j in nbrs], axis=1)
    acc = np.zeros((samples, m))
    for s in range(samples):
        for j, xj in zip(nbrs, draws[s]):
            joint[j] = int(xj)
        for xi in range(m):
            joint[i] = xi
            acc[s, xi] = payoff(i, joint, game)
    return acc.mean(axis=0), "sampled", acc.std(axis=0, ddof=1) / np.sqrt(samples)


def verify_equilibrium(marginals: MarginalSet, game: StageGame, epsilon: float = 1e-6,
                       converged: bool = True) -> list[PlayerCheck]:
    """Check the fixed-point log-ratio identity and the correlated-equilibrium ordering.

    For every player and action pair the log-probability gap must equal the
    gap in brute-force expected payoffs, and a more probable action must not
    earn a lower expected payoff (both within ``epsilon``).
    """
    if not converged:
        return [PlayerCheck(i, False, "n/a") for i in game.players]
    reports = []
    for i in game.players:
        values, method, se = brute_force_expected_payoffs(i, marginals, game)
        tol = epsilon + (4.0 * float(np.max(se)) if method == "sampled" else 0.0)
        lq = marginals.log_q[i]
        # all pairs at once: [a, b] -> (ln q_a - ln q_b) - (E_a - E_b)
        with np.errstate(invalid="ignore"):
            gap_q = lq[:, None] - lq[None, :]
        gap_v = values[:, None] - values[None, :]
        finite = np.isfinite(gap_q)
        ident_err = float(np.max(np.abs(gap_q - gap_v)[finite])) if finite.any() else 0.0
        identity_ok = bool(finite.all()) and ident_err <= tol
        q = np.exp(lq)
        more_likely = q[:, None] >= q[None, :]
        violation = np.where(more_likely, gap_v * -1.0, -np.inf)
        worst = float(np.max(violation))
        reports.append(PlayerCheck(i, True, method, values, ident_err, worst, identity_ok, worst <= tol))
    return reports

"""Communication-aware coverage control for robot swarms.

Robots choose discretized accelerations each timestep by solving a graphical
stage game with mean-field variational inference over a Markov random field
built from the live hop-count routing tables.
"""

from swarmcov.channel import ChannelParams, expected_rss, link_up, sample_rss
from swarmcov.dynamics import ActionSet, RobotState, build_action_set, predict_position, step
from swarmcov.engine import ScenarioConfig, SimTrace, run, sweep
from swarmcov.game import StageGame, build_stage_game
from swarmcov.mfvi import MarginalSet, SolveReport, optimize_stage, verify_equilibrium

__version__ = "0.1.0"

__all__ = [
    "ActionSet",
    "ChannelParams",
    "MarginalSet",
    "RobotState",
    "ScenarioConfig",
    "SimTrace",
    "SolveReport",
    "StageGame",
    "build_action_set",
    "build_stage_game",
    "expected_rss",
    "link_up",
    "optimize_stage",
    "predict_position",
    "run",
    "sample_rss",
    "step",
    "sweep",
    "verify_equilibrium",
]

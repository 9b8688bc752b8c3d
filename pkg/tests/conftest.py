import numpy as np
import pytest

from swarmcov.channel import ChannelParams
from swarmcov.config import from_dict
from swarmcov.dynamics import ActionSet, RobotState
from swarmcov.game import GameWeights, build_stage_game
from swarmcov.roi import RoiGrid

SCENARIOS = __import__("pathlib").Path(__file__).resolve().parent.parent / "scenarios"


@pytest.fixture
def params():
    return ChannelParams()


@pytest.fixture
def quiet():
    """Channel with fading switched off."""
    return ChannelParams(fading_var_dbm2=0.0)


def one_cell_grid(center, p=1.0):
    c = np.atleast_2d(np.asarray(center, dtype=float))
    return RoiGrid(c[0], np.eye(2), 10.0, c, np.array([p]), 3.0)


def cells_grid(centers, probs):
    c = np.asarray(centers, dtype=float)
    return RoiGrid(c.mean(axis=0), np.eye(2), 10.0, c, np.asarray(probs, dtype=float), 3.0)


def hover_game(positions, neighborhoods, grid, params, weights=GameWeights(), actions=None):
    """Game with robots at rest; the default action set is just 'hover'."""
    states = [RobotState(tuple(map(float, p))) for p in positions]
    actions = actions if actions is not None else ActionSet(np.zeros((1, 2)))
    return build_stage_game(states, None, 1, grid, params, weights, actions, 1.0, neighborhoods=neighborhoods)


def small_config(**extra):
    doc = {"seed": 3, "uav_count": 3, "duration_s": 6, "roi": {"ue_positions": [[20, 0], [-10, 15], [0, -20]]}}
    doc.update(extra)
    return from_dict(doc)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line per acceptance criterion for the terminal summary."""

    def record(label: str, ok: bool, detail: str, seconds: float):
        ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {label:<38} {detail}  [{seconds:.1f}s]")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

"""Planar double integrator at fixed altitude with a discretized action set."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RobotState:
    position: tuple[float, float]
    velocity: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if not (np.all(np.isfinite(self.position)) and np.all(np.isfinite(self.velocity))):
            raise ValueError("robot state must be finite")

    @property
    def pos(self) -> np.ndarray:
        return np.asarray(self.position, dtype=float)

    @property
    def vel(self) -> np.ndarray:
        return np.asarray(self.velocity, dtype=float)


@dataclass(frozen=True)
class ActionSet:
    """Ordered acceleration vectors shared by every robot.

    ``actions`` has shape ``(m, 2)``. The grid constructor is
    :func:`build_action_set`; arbitrary lists are accepted for small test games.
    """

    actions: np.ndarray
    a_max: float = 0.0
    levels_per_axis: int = 0

    def __post_init__(self):
        arr = np.asarray(self.actions, dtype=float).reshape(-1, 2)
        arr.setflags(write=False)
        object.__setattr__(self, "actions", arr)
        if len(arr) == 0:
            raise ValueError("empty action set")

    def __len__(self) -> int:
        return len(self.actions)

    def __getitem__(self, idx) -> np.ndarray:
        return self.actions[idx]


def build_action_set(a_max: float, levels_per_axis: int) -> ActionSet:
    if not a_max > 0:
        raise ValueError("a_max must be > 0")
    if levels_per_axis < 1:
        raise ValueError("levels_per_axis must be >= 1")
    levels = np.zeros(1) if levels_per_axis == 1 else np.linspace(-a_max, a_max, levels_per_axis)
    # row-major, ascending: x outer, y inner
    grid = np.array([(ax, ay) for ax in levels for ay in levels], dtype=float)
    return ActionSet(grid, float(a_max), int(levels_per_axis))


def _clamp_velocity(v: np.ndarray, v_max: float) -> np.ndarray:
    speed = float(np.hypot(v[0], v[1]))
    if v_max is not None and speed > v_max:
        return v * (v_max / speed)
    return v


def step(state: RobotState, action, dt: float, v_max: float = 5.0) -> RobotState:
    """Advance one interval holding the acceleration constant (zero-order hold).

    The position update uses the unclamped velocity profile; only the
    outgoing velocity is norm-clamped to ``v_max``.
    """
    if not dt > 0:
        raise ValueError("dt must be > 0")
    a = np.asarray(action, dtype=float)
    p = state.pos + state.vel * dt + 0.5 * a * dt * dt
    v = _clamp_velocity(state.vel + a * dt, v_max)
    return RobotState((float(p[0]), float(p[1])), (float(v[0]), float(v[1])))


def predict_position(state: RobotState, action, dt: float, v_max: float = 5.0) -> np.ndarray:
    return step(state, action, dt, v_max).pos


def predict_positions(state: RobotState, actions: ActionSet, dt: float) -> np.ndarray:
    """Vectorized position prediction for every action, shape ``(m, 2)``.

    Equals ``predict_position`` row by row: the velocity clamp never touches
    the position component.
    """
    a = actions.actions
    return state.pos[None, :] + state.vel[None, :] * dt + 0.5 * a * dt * dt

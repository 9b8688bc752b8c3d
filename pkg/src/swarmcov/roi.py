"""UE team motion and the discretized concentration-ellipsoid ROI."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

COV_REGULARIZER_M2 = 1.0


@dataclass(frozen=True)
class UeTeam:
    positions: np.ndarray  # (u, 2)
    goals: np.ndarray  # (u, 2)
    speed: float = 0.0

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float).reshape(-1, 2)
        goals = np.asarray(self.goals, dtype=float).reshape(-1, 2)
        if pos.shape != goals.shape:
            raise ValueError("positions and goals must have the same length")
        if self.speed < 0:
            raise ValueError("speed must be >= 0")
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "goals", goals)


@dataclass(frozen=True)
class RoiGrid:
    mean: np.ndarray
    cov: np.ndarray
    cell_size: float
    centers: np.ndarray  # (c, 2), row-major: y outer, x inner
    probs: np.ndarray  # (c,)
    mahalanobis_cut: float

    def __len__(self) -> int:
        return len(self.probs)

    @property
    def cells(self) -> list[tuple[np.ndarray, float]]:
        return list(zip(self.centers, self.probs))


def ellipsoid_from_ues(positions, eps: float = COV_REGULARIZER_M2) -> tuple[np.ndarray, np.ndarray]:
    pts = np.asarray(positions, dtype=float).reshape(-1, 2)
    if len(pts) == 0:
        raise ValueError("need at least one UE")
    mean = pts.mean(axis=0)
    centered = pts - mean
    cov = centered.T @ centered / len(pts) + eps * np.eye(2)
    return mean, cov


def build_grid(mean, cov, cell_size: float, mahalanobis_cut: float = 3.0) -> RoiGrid:
    """Cells anchored at the mean, kept when their center lies inside the cut.

    The cell containing the mean is always kept, so the grid is never empty.
    """
    mean = np.asarray(mean, dtype=float)
    cov = np.asarray(cov, dtype=float)
    if not np.allclose(cov, cov.T) or np.any(np.linalg.eigvalsh(cov) <= 0):
        raise ValueError("cov must be symmetric positive-definite")
    if not cell_size > 0:
        raise ValueError("cell_size must be > 0")
    prec = np.linalg.inv(cov)
    nx = int(math.ceil(mahalanobis_cut * math.sqrt(cov[0, 0]) / cell_size))
    ny = int(math.ceil(mahalanobis_cut * math.sqrt(cov[1, 1]) / cell_size))
    iy, ix = np.meshgrid(np.arange(-ny, ny + 1), np.arange(-nx, nx + 1), indexing="ij")
    offsets = np.stack([ix.ravel(), iy.ravel()], axis=1) * cell_size
    m2 = np.einsum("ci,ij,cj->c", offsets, prec, offsets)
    keep = m2 <= mahalanobis_cut**2
    keep[(ix.ravel() == 0) & (iy.ravel() == 0)] = True
    offsets, m2 = offsets[keep], m2[keep]
    # unnormalized Gaussian density; the constant cancels in normalization
    w = np.exp(-0.5 * m2)
    probs = w / w.sum()
    return RoiGrid(mean, cov, float(cell_size), mean + offsets, probs, float(mahalanobis_cut))


def advance_ues(team: UeTeam, dt: float) -> UeTeam:
    if not dt > 0:
        raise ValueError("dt must be > 0")
    delta = team.goals - team.positions
    dist = np.linalg.norm(delta, axis=1)
    travel = np.minimum(team.speed * dt, dist)
    with np.errstate(invalid="ignore", divide="ignore"):
        unit = np.where(dist[:, None] > 0, delta / dist[:, None], 0.0)
    moved = team.positions + unit * travel[:, None]
    # land exactly on the goal instead of within rounding of it
    arrived = travel >= dist
    moved[arrived] = team.goals[arrived]
    return UeTeam(moved, team.goals, team.speed)

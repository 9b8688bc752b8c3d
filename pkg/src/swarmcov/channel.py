"""Log-distance path loss with Gaussian shadow fading (all values in dBm)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from swarmcov.rng import GaussianStream


@dataclass(frozen=True)
class ChannelParams:
    t0_dbm: float = 16.02
    l0_dbm: float = 46.67
    path_loss_exp: float = 3.0
    fading_var_dbm2: float = 32.0
    link_threshold_dbm: float = -90.0
    d_min_m: float = 1.0

    def __post_init__(self):
        if not self.path_loss_exp > 0:
            raise ValueError("path_loss_exp must be > 0")
        if not self.fading_var_dbm2 >= 0:
            raise ValueError("fading_var_dbm2 must be >= 0")
        if not self.d_min_m > 0:
            raise ValueError("d_min_m must be > 0")

    @property
    def fading_std_db(self) -> float:
        return math.sqrt(self.fading_var_dbm2)


def _distance(pos_a, pos_b) -> float:
    a = np.asarray(pos_a, dtype=float)
    b = np.asarray(pos_b, dtype=float)
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise ValueError(f"non-finite position: {pos_a!r}, {pos_b!r}")
    return float(math.hypot(*(a - b)))


def rss_at_distance(d, params: ChannelParams):
    """Mean RSS for a distance or an array of distances."""
    d = np.maximum(np.asarray(d, dtype=float), params.d_min_m)
    out = params.t0_dbm - (params.l0_dbm + 10.0 * params.path_loss_exp * np.log10(d))
    return float(out) if out.ndim == 0 else out


def expected_rss(pos_a, pos_b, params: ChannelParams) -> float:
    """Expected RSS between two positions; the fading term averages out."""
    return rss_at_distance(_distance(pos_a, pos_b), params)


def sample_rss(pos_a, pos_b, params: ChannelParams, rng: GaussianStream) -> float:
    """One faded RSS sample. Always consumes exactly one Gaussian draw."""
    mean = expected_rss(pos_a, pos_b, params)
    fade = params.fading_std_db * rng.gauss()
    return mean - fade


def link_up(rss: float, params: ChannelParams) -> bool:
    return rss >= params.link_threshold_dbm

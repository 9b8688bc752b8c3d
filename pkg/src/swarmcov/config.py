"""Scenario configuration: TOML files, JSON manifests and ``--key=value`` overrides.

Reference schema (TOML)::

    seed = 7                 # required
    uav_count = 3            # required
    duration_s = 40.0        # required
    dt_s = 1.0
    altitude_m = 10.0
    k = 3
    controller = "coco"      # coco | disk
    disk_radius_m = 60.0
    initial_positions = [[0, 0], [1, 0]]   # optional; default: seeded 1 m lattice at origin

    [weights]   alpha_a, alpha_b
    [channel]   t0_dbm, l0_dbm, path_loss_exp, fading_var_dbm2, link_threshold_dbm, d_min_m
    [dynamics]  a_max, levels_per_axis, v_max
    [roi]       ue_positions (required), ue_goals, ue_speed, cell_size_m, mahalanobis_cut
    [solver]    tol, max_sweeps, warm_start

Override keys use dots for sections: ``--channel.fading_var_dbm2=0``.
"""

from __future__ import annotations

import dataclasses
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from swarmcov.channel import ChannelParams
from swarmcov.game import GameWeights

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"config field '{key}': {message}")
        self.key = key


@dataclass(frozen=True)
class ScenarioConfig:
    seed: int
    uav_count: int
    duration_s: float
    ue_positions: tuple
    dt_s: float = 1.0
    altitude_m: float = 10.0
    k: int = 3
    controller: str = "coco"
    disk_radius_m: float = 60.0
    initial_positions: Optional[tuple] = None
    ue_goals: Optional[tuple] = None
    ue_speed: float = 0.0
    cell_size_m: float = 10.0
    mahalanobis_cut: float = 3.0
    a_max: float = 3.0
    levels_per_axis: int = 5
    v_max: float = 5.0
    tol: float = 1e-6
    max_sweeps: int = 100
    warm_start: bool = False
    weights: GameWeights = field(default_factory=GameWeights)
    channel: ChannelParams = field(default_factory=ChannelParams)

    def __post_init__(self):
        def need(cond, key, msg):
            if not cond:
                raise ConfigError(key, msg)

        need(self.dt_s > 0, "dt_s", "must be > 0")
        need(self.duration_s >= self.dt_s, "duration_s", "must be >= dt_s")
        need(self.uav_count >= 1, "uav_count", "must be >= 1")
        need(len(self.ue_positions) >= 1, "roi.ue_positions", "need at least one UE")
        need(self.k >= 1, "k", "must be >= 1")
        need(self.controller in ("coco", "disk"), "controller", "must be 'coco' or 'disk'")
        need(self.disk_radius_m > 0, "disk_radius_m", "must be > 0")
        need(self.ue_speed >= 0, "roi.ue_speed", "must be >= 0")
        need(self.cell_size_m > 0, "roi.cell_size_m", "must be > 0")
        need(self.mahalanobis_cut > 0, "roi.mahalanobis_cut", "must be > 0")
        need(self.a_max > 0, "dynamics.a_max", "must be > 0")
        need(self.levels_per_axis >= 1, "dynamics.levels_per_axis", "must be >= 1")
        need(self.v_max > 0, "dynamics.v_max", "must be > 0")
        need(self.tol > 0, "solver.tol", "must be > 0")
        need(self.max_sweeps >= 1, "solver.max_sweeps", "must be >= 1")
        if self.ue_goals is not None:
            need(len(self.ue_goals) == len(self.ue_positions), "roi.ue_goals", "length must match ue_positions")
        if self.initial_positions is not None:
            need(len(self.initial_positions) == self.uav_count, "initial_positions", "length must equal uav_count")

    @property
    def step_count(self) -> int:
        return int(self.duration_s / self.dt_s + 1e-9)

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        """Sectioned plain-data form; ``from_dict(to_dict(c)) == c``."""
        out: dict[str, Any] = {}
        for key in _TOP:
            out[key] = _plain(getattr(self, key))
        for section, keys in _SECTIONS.items():
            sub = {}
            for key, attr in keys.items():
                sub[key] = _plain(_get_attr(self, attr))
            out[section] = sub
        return out


def _plain(v):
    if isinstance(v, tuple):
        return [_plain(x) for x in v]
    return v


_TOP = ("seed", "uav_count", "duration_s", "dt_s", "altitude_m", "k", "controller", "disk_radius_m",
        "initial_positions")
_SECTIONS = {
    "weights": {"alpha_a": "weights.alpha_a", "alpha_b": "weights.alpha_b"},
    "channel": {f.name: f"channel.{f.name}" for f in dataclasses.fields(ChannelParams)},
    "dynamics": {"a_max": "a_max", "levels_per_axis": "levels_per_axis", "v_max": "v_max"},
    "roi": {"ue_positions": "ue_positions", "ue_goals": "ue_goals", "ue_speed": "ue_speed",
            "cell_size_m": "cell_size_m", "mahalanobis_cut": "mahalanobis_cut"},
    "solver": {"tol": "tol", "max_sweeps": "max_sweeps", "warm_start": "warm_start"},
}
_REQUIRED = ("seed", "uav_count", "duration_s", "roi.ue_positions")
_INT_KEYS = {"seed", "uav_count", "k", "dynamics.levels_per_axis", "solver.max_sweeps"}
_BOOL_KEYS = {"solver.warm_start"}
_STR_KEYS = {"controller"}


def _get_attr(cfg, dotted):
    obj = cfg
    for part in dotted.split("."):
        obj = getattr(obj, part)
    return obj


def _coerce(key: str, value):
    try:
        if value is None:
            return None
        if key in _BOOL_KEYS:
            if isinstance(value, str):
                if value.lower() not in ("true", "false"):
                    raise ValueError(value)
                return value.lower() == "true"
            return bool(value)
        if key in _STR_KEYS:
            return str(value)
        if key in _INT_KEYS:
            if isinstance(value, float) and not value.is_integer():
                raise ValueError(value)
            return int(value)
        if isinstance(value, (list, tuple)):
            return tuple(tuple(float(c) for c in row) for row in value)
        return float(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(key, f"bad value {value!r}") from exc


def known_keys() -> set[str]:
    keys = set(_TOP)
    for section, sub in _SECTIONS.items():
        keys.update(f"{section}.{k}" for k in sub)
    return keys


def flatten(doc: dict) -> dict:
    flat = {}
    for key, value in doc.items():
        if key in _SECTIONS:
            if not isinstance(value, dict):
                raise ConfigError(key, "expected a section")
            for sub, v in value.items():
                flat[f"{key}.{sub}"] = v
        else:
            flat[key] = value
    return flat


def from_dict(doc: dict, overrides: dict | None = None) -> ScenarioConfig:
    flat = flatten(doc)
    flat.update(overrides or {})
    unknown = sorted(set(flat) - known_keys())
    if unknown:
        raise ConfigError(unknown[0], "unknown key")
    for key in _REQUIRED:
        if flat.get(key) is None:
            raise ConfigError(key, "missing required field")
    values = {k: _coerce(k, v) for k, v in flat.items()}
    top = {k: values[k] for k in _TOP if k in values}
    kwargs: dict[str, Any] = dict(top)
    weights = {}
    channel = {}
    for section, sub in _SECTIONS.items():
        for key, attr in sub.items():
            dotted = f"{section}.{key}"
            if dotted not in values:
                continue
            if attr.startswith("weights."):
                weights[key] = values[dotted]
            elif attr.startswith("channel."):
                channel[key] = values[dotted]
            else:
                kwargs[attr] = values[dotted]
    try:
        kwargs["weights"] = GameWeights(**weights)
        kwargs["channel"] = ChannelParams(**channel)
    except ValueError as exc:
        raise ConfigError("channel", str(exc)) from exc
    return ScenarioConfig(**kwargs)


def parse_override(text: str) -> tuple[str, Any]:
    """``key=value`` where value is read as JSON when possible, else as a string."""
    if "=" not in text:
        raise ConfigError(text, "override must look like key=value")
    key, raw = text.split("=", 1)
    key = key.strip().lstrip("-")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key, value


def load_document(path: str | Path) -> dict:
    """Read a TOML scenario file, or the ``config`` block of a JSON run manifest."""
    path = Path(path)
    if path.suffix == ".json":
        doc = json.loads(path.read_text())
        return doc["config"] if "config" in doc else doc
    with path.open("rb") as fh:
        return tomllib.load(fh)


def load_config(path: str | Path, overrides: dict | None = None) -> ScenarioConfig:
    return from_dict(load_document(path), overrides)

"""Command-line front end: ``swarmcov run | verify | sweep``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import platform
import sys
from pathlib import Path

import numpy as np

from swarmcov import __version__
from swarmcov.config import ConfigError, ScenarioConfig, load_config, parse_override
from swarmcov.engine import SWEEP_AXES, SimTrace, run, sweep
from swarmcov.verification import FAULTS, check_instance

log = logging.getLogger("swarmcov")

METRIC_COLUMNS = ("step", "time_s", "mean_ue_rss_dbm", "min_ue_rss_dbm", "mean_payoff", "connected",
                  "solver_sweeps", "stage_ms")


def _num(x: float) -> str:
    return repr(float(x))


def metrics_csv(trace: SimTrace, timing: bool = False) -> str:
    """Per-step metrics. ``stage_ms`` stays blank unless ``timing`` is set,
    which keeps the file byte-reproducible by default."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(METRIC_COLUMNS)
    for r in trace.records:
        w.writerow([r.step, _num(r.time_s), _num(np.mean(r.ue_rss_dbm)), _num(np.min(r.ue_rss_dbm)),
                    _num(np.mean(r.payoffs)), int(r.connected), r.solver_sweeps,
                    f"{r.stage_ms:.3f}" if timing else ""])
    return buf.getvalue()


def trajectories_doc(trace: SimTrace) -> dict:
    cfg = trace.config
    return {
        "dt_s": cfg.dt_s,
        "altitude_m": cfg.altitude_m,
        "initial": {"uavs": trace.initial_positions.tolist(), "ues": trace.initial_ue_positions.tolist()},
        "steps": [{"step": r.step, "time_s": r.time_s, "uavs": r.positions.tolist(), "ues": r.ue_positions.tolist()}
                  for r in trace.records],
    }


def manifest_doc(cfg: ScenarioConfig, timing: bool) -> dict:
    return {
        "config": cfg.to_dict(),
        "seed": cfg.seed,
        "timing": timing,
        "files": ["metrics.csv", "trajectories.json", "manifest.json"],
        "versions": {"swarmcov": __version__, "python": platform.python_version(), "numpy": np.__version__},
    }


def _split_overrides(extra: list[str]) -> dict:
    overrides = {}
    for item in extra:
        if not item.startswith("--"):
            raise ConfigError(item, "unexpected argument")
        key, value = parse_override(item)
        overrides[key] = value
    return overrides


def _load(args, extra) -> ScenarioConfig:
    overrides = _split_overrides(extra)
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    return load_config(args.config, overrides)


def cmd_run(args, extra) -> int:
    cfg = _load(args, extra)
    trace = run(cfg)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "metrics.csv").write_text(metrics_csv(trace, args.timing))
    (out / "trajectories.json").write_text(json.dumps(trajectories_doc(trace)) + "\n")
    (out / "manifest.json").write_text(json.dumps(manifest_doc(cfg, args.timing), indent=2) + "\n")
    final = trace.mean_ue_rss[-5:].mean()
    print(f"{len(trace)} steps, final mean UE RSS {final:.2f} dBm, "
          f"connected {int(trace.series('connected').sum())}/{len(trace)} -> {out}")
    return 0


def cmd_verify(args, extra) -> int:
    if extra:
        raise ConfigError(extra[0], "verify takes no overrides")
    failed = []
    if args.instances > 0:
        print(f"{'inst':>4} {'n':>2} {'m':>2} {'conv':>5} {'expfam_rel':>11} {'energy_drop':>11} "
              f"{'identity':>10} {'ordering':>10} result")
    for idx in range(args.instances):
        res = check_instance(args.seed, idx, args.epsilon, fault=args.inject_fault)
        ok = res.passed()
        print(f"{idx:>4} {res.players:>2} {res.actions:>2} {str(res.converged_default):>5} "
              f"{res.exp_family_rel_err:>11.2e} {res.energy_drop:>11.2e} {res.identity_err:>10.2e} "
              f"{res.ordering_violation:>10.2e} {'PASS' if ok else 'FAIL'}")
        if not ok:
            failed.append(idx)
    if failed:
        print(f"FAILED {len(failed)}/{args.instances} instances (seed {args.seed}, indices {failed})")
        return 1
    print(f"all {args.instances} instances passed (seed {args.seed})")
    return 0


def parse_axis(spec: str) -> tuple[str, list]:
    if "=" not in spec:
        raise ConfigError(spec, "axis must look like name=v1,v2")
    name, raw = spec.split("=", 1)
    name = name.strip()
    if name not in SWEEP_AXES:
        raise ConfigError(name, f"sweep axis must be one of {SWEEP_AXES}")
    parts = [p.strip() for p in raw.split(",") if p.strip()]
    if not parts:
        raise ConfigError(name, "no axis values")
    if name == "controller":
        bad = [p for p in parts if p not in ("coco", "disk")]
        if bad:
            raise ConfigError(name, f"unknown controller {bad[0]!r}")
        return name, parts
    try:
        values = [int(p) for p in parts]
    except ValueError as exc:
        raise ConfigError(name, f"axis values must be integers: {raw!r}") from exc
    if any(v < 1 for v in values):
        raise ConfigError(name, "axis values must be >= 1")
    return name, values


def sweep_csv(groups) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["axis", "value", "trials", "step", "time_s", "mean_payoff", "payoff_stderr", "mean_ue_rss_dbm",
                "ue_rss_stderr"])
    for g in groups:
        for t in range(len(g.time_s)):
            w.writerow([g.axis, g.value, g.trials, t, _num(g.time_s[t]), _num(g.payoff_mean[t]),
                        _num(g.payoff_stderr[t]), _num(g.rss_mean[t]), _num(g.rss_stderr[t])])
    return buf.getvalue()


def cmd_sweep(args, extra) -> int:
    axis, values = parse_axis(args.axis)
    cfg = _load(args, extra)
    groups = sweep(cfg, axis, values, args.trials)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "sweep.csv").write_text(sweep_csv(groups))
    for g in groups:
        print(f"{axis}={g.value}: final payoff {g.payoff_mean[-1]:.3f} +- {g.payoff_stderr[-1]:.3f}, "
              f"final UE RSS {g.rss_mean[-1]:.2f} +- {g.rss_stderr[-1]:.2f} dBm")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="swarmcov", description=__doc__, allow_abbrev=False)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="simulate one scenario; extra --key=value pairs override config fields")
    r.add_argument("--config", required=True)
    r.add_argument("--out-dir", default="out")
    r.add_argument("--seed", type=int)
    r.add_argument("--timing", action="store_true", help="fill the stage_ms column (wall clock)")
    r.set_defaults(func=cmd_run)

    v = sub.add_parser("verify", help="equilibrium and MRF property checks on random small games")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--instances", type=int, default=100)
    v.add_argument("--epsilon", type=float, default=1e-6)
    v.add_argument("--inject-fault", choices=FAULTS, help=argparse.SUPPRESS)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("sweep", help="repeat a scenario over an axis (k, uav_count or controller)")
    s.add_argument("--config", required=True)
    s.add_argument("--axis", required=True, help="e.g. k=1,2,3 or controller=coco,disk")
    s.add_argument("--trials", type=int, default=20)
    s.add_argument("--out-dir", default="out")
    s.add_argument("--seed", type=int)
    s.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args, extra)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Run configuration: ``key = value`` text files with validation and stage planning."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields

from .errors import ConfigError, ModelError
from .models import build_models

AUTO = "auto"
MODES = ("rh", "shifted")
COMMANDS = ("aux", "admissible", "calibrate-large", "calibrate-small", "dissipation-scan", "fronttrack",
            "weight-trace", "reference", "shift", "cone-experiment", "nonclassical-demo", "verify-all")


@dataclass
class RunConfig:
    flux: str = "cubic"
    entropy: str = "quadratic"
    bound: float = 2.0
    b_lo: float = 0.5
    b_hi: float = 1.5
    u_L: float = 1.0
    u_R: float = 0.5
    eps: float = 0.1
    C0: object = 2.0
    C1: object = 0.5
    h: float = 0.05
    mode: str = "rh"
    T: float = 0.5
    R: float = 3.0
    v: float = 40.0
    cone_T: float = 0.05
    dx: object = None
    cfl: float = 0.9
    delta: float = 0.1
    samples: int = 1000
    pi_points: int = 200
    right_points: int = 801
    far_left_points: int = 300
    rng_seed: int = 0
    output_dir: str = "out"

    @property
    def grid_dx(self):
        return self.h / 4.0 if self.dx is None else self.dx

    def models(self):
        return build_models(self.flux, self.entropy, self.bound)

    def echo(self):
        return asdict(self)


_FLOATS = {"bound", "b_lo", "b_hi", "u_L", "u_R", "eps", "h", "T", "R", "v", "cone_T", "cfl", "delta"}
_AUTO_FLOATS = {"C0", "C1"}
_OPTIONAL_FLOATS = {"dx"}
_INTS = {"samples", "pi_points", "right_points", "far_left_points", "rng_seed"}
_POSITIVE = ("bound", "eps", "h", "T", "R", "v", "cone_T", "cfl", "delta")
_POSITIVE_INTS = ("samples", "pi_points", "right_points", "far_left_points")


def _number(raw):
    value = float(raw)
    if not math.isfinite(value):
        raise ValueError(raw)
    return value


def parse_config(text):
    """Parse and validate configuration text.

    Every problem is collected as ``"line N: message"`` (or without a line
    for cross-field checks) and raised together in one ``ConfigError``.
    """
    known = {f.name for f in fields(RunConfig)}
    values, lines, problems = {}, {}, []
    for n, raw_line in enumerate(text.splitlines(), 1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            problems.append(f"line {n}: expected 'key = value'")
            continue
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in known:
            problems.append(f"line {n}: unknown key '{key}'")
            continue
        if key in values:
            problems.append(f"line {n}: duplicate key '{key}' (first set on line {lines[key]})")
            continue
        try:
            if key in _INTS:
                value = int(raw)
            elif key in _FLOATS:
                value = _number(raw)
            elif key in _AUTO_FLOATS:
                value = AUTO if raw.lower() == AUTO else _number(raw)
            elif key in _OPTIONAL_FLOATS:
                value = None if raw.lower() in ("none", "") else _number(raw)
            else:
                value = raw
        except ValueError:
            problems.append(f"line {n}: malformed number for '{key}': {raw!r}")
            continue
        values[key] = value
        lines[key] = n
    cfg = RunConfig(**values)

    def at(key):
        return f"line {lines[key]}: " if key in lines else ""

    for key in _POSITIVE:
        if getattr(cfg, key) <= 0:
            problems.append(f"{at(key)}{key} must be positive")
    for key in _POSITIVE_INTS:
        if getattr(cfg, key) <= 0:
            problems.append(f"{at(key)}{key} must be positive")
    if cfg.dx is not None and cfg.dx <= 0:
        problems.append(f"{at('dx')}dx must be positive")
    if cfg.cfl > 1:
        problems.append(f"{at('cfl')}cfl must be at most 1")
    if not 0 < cfg.b_lo < cfg.b_hi:
        problems.append(f"{at('b_hi')}need 0 < b_lo < b_hi")
    if cfg.b_hi > cfg.bound:
        problems.append(f"{at('b_hi')}b_hi must not exceed bound")
    for key in ("u_L", "u_R"):
        if abs(getattr(cfg, key)) > cfg.bound:
            problems.append(f"{at(key)}{key} must lie in [-bound, bound]")
    if cfg.C0 != AUTO and cfg.C0 <= 0:
        problems.append(f"{at('C0')}C0 must be positive")
    if cfg.C1 != AUTO and not 0 < cfg.C1 < 1:
        problems.append(f"{at('C1')}C1 must lie in (0, 1)")
    if cfg.C0 != AUTO and cfg.C1 != AUTO and cfg.eps > 0:
        if cfg.C0 * cfg.eps > 0.5:
            problems.append(f"{at('C0')}C0 * eps must be at most 1/2")
        elif cfg.C1 > (1 - cfg.C0 * cfg.eps) ** 2:
            problems.append(f"{at('C1')}C1 must be at most (1 - C0 eps)^2")
    if cfg.mode not in MODES:
        problems.append(f"{at('mode')}mode must be one of {', '.join(MODES)}")
    if cfg.R <= cfg.v * cfg.cone_T:
        problems.append(f"{at('cone_T') or at('v') or at('R')}cone is empty: need R > v cone_T")
    try:
        cfg.models()
    except (ModelError, ValueError) as exc:
        problems.append(f"{at('flux') or at('entropy')}{exc}")
    if problems:
        raise ConfigError(problems)
    return cfg


def plan(cfg, command):
    """Ordered stages for ``command``; ``auto`` constants add their calibration first."""
    if command not in COMMANDS:
        raise ConfigError([f"unknown command '{command}'"])
    stages = []
    if cfg.C0 == AUTO:
        stages.append("calibrate-small")
    if cfg.C1 == AUTO:
        stages.append("calibrate-large")
    if command not in stages:
        stages.append(command)
    return stages

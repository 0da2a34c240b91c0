"""Flat ``key = value`` run configuration and initial-condition specs."""

from __future__ import annotations

from dataclasses import dataclass, field, fields

import numpy as np

from .model import Bistable, Grid, ModelParams, Monostable, ParameterError
from .stepper import StepperConfig

CASES = ("bistable", "monostable", "limit", "chemorepulsion-check", "epsilon-sweep",
         "steady-state", "picard-check")
FORMATS = ("csv", "json")
IC_SMOOTHING_TAU = 1e-3


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None, key: str | None = None):
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)
        self.line = line
        self.key = key


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(",") if v.strip())


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


@dataclass
class RunConfig:
    case: str
    delta: float
    epsilon: float
    r: float
    n: int
    dt: float
    t_final: float
    ic: str
    a: float | None = None
    theta: float = 1.0
    cfl_safety: float = 0.5
    limiter: bool = False
    sample_every: int = 100
    snapshot_times: tuple[float, ...] = ()
    output_dir: str = "output"
    format: str = "csv"
    seed: int = 0
    epsilon_list: tuple[float, ...] = (0.1, 0.05, 0.025, 0.0125)
    picard_t: float = 0.005
    picard_m: int = 8
    picard_tol: float = 1e-10
    picard_max_iter: int = 50
    workers: int = 0
    _lines: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def grid(self) -> Grid:
        return Grid(self.n)

    @property
    def params(self) -> ModelParams:
        law = Bistable(self.a) if self.case == "bistable" else Monostable()
        return ModelParams(self.delta, self.epsilon, self.r, law)

    @property
    def stepper(self) -> StepperConfig:
        return StepperConfig(self.dt, self.theta, self.cfl_safety, self.limiter)

    def initial_condition(self) -> np.ndarray:
        return make_ic(self.ic, self.grid, seed=self.seed)


_CONVERTERS = {
    "case": str, "ic": str, "output_dir": str, "format": str,
    "delta": float, "epsilon": float, "r": float, "a": float, "dt": float, "t_final": float,
    "theta": float, "cfl_safety": float, "picard_t": float, "picard_tol": float,
    "n": int, "sample_every": int, "seed": int, "picard_m": int, "picard_max_iter": int,
    "workers": int, "limiter": _bool,
    "snapshot_times": _floats, "epsilon_list": _floats,
}
REQUIRED = ("case", "delta", "epsilon", "r", "n", "dt", "t_final", "ic")
KEYS = tuple(f.name for f in fields(RunConfig) if not f.name.startswith("_"))


def parse_pairs(text: str) -> tuple[dict, dict]:
    values, lines = {}, {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        apply_pair(values, key, value, lineno)
        lines[key] = lineno
    return values, lines


def apply_pair(values: dict, key: str, value: str, lineno: int | None = None) -> None:
    if key not in _CONVERTERS:
        raise ConfigError(f"unknown key {key!r}", lineno, key)
    try:
        values[key] = _CONVERTERS[key](value)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {exc}", lineno, key) from None


def build_config(values: dict, lines: dict | None = None) -> RunConfig:
    lines = lines or {}
    for key in REQUIRED:
        if key not in values:
            raise ConfigError(f"missing required key {key!r}", key=key)
    cfg = RunConfig(**values, _lines=dict(lines))
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig) -> None:
    def fail(key, msg):
        raise ConfigError(msg, cfg._lines.get(key), key)

    if cfg.case not in CASES:
        fail("case", f"case must be one of {', '.join(CASES)}; got {cfg.case!r}")
    if cfg.format not in FORMATS:
        fail("format", f"format must be csv or json; got {cfg.format!r}")
    if cfg.case == "bistable" and cfg.a is None:
        fail("case", "a required for bistable")
    if cfg.case != "bistable" and cfg.a is not None:
        fail("a", "a only applies to the bistable case")
    if cfg.case == "chemorepulsion-check" and cfg.r != 0:
        fail("r", "chemorepulsion-check requires r = 0")
    if not cfg.t_final > 0:
        fail("t_final", f"t_final must be positive, got {cfg.t_final}")
    if cfg.sample_every < 1:
        fail("sample_every", "sample_every must be >= 1")
    if cfg.workers < 0:
        fail("workers", "workers must be >= 0")
    if cfg.case == "epsilon-sweep":
        e = cfg.epsilon_list
        if not e or any(v <= 0 for v in e) or any(b >= a for a, b in zip(e, e[1:])):
            fail("epsilon_list", "epsilon_list must be positive and strictly decreasing")
    for key, build in (("params", lambda: cfg.params), ("stepper", lambda: cfg.stepper),
                       ("n", lambda: cfg.grid)):
        try:
            build()
        except ParameterError as exc:
            name = str(exc).split()[0]
            fail(name if name in KEYS else key, str(exc))
    try:
        parse_ic(cfg.ic)
    except ValueError as exc:
        fail("ic", str(exc))


def parse_config(text: str, overrides: list[str] | tuple = ()) -> RunConfig:
    """Parse config text, then apply ``key=value`` overrides in order."""
    values, lines = parse_pairs(text)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override must be key=value, got {item!r}")
        key, value = (s.strip() for s in item.split("=", 1))
        apply_pair(values, key, value)
        lines.pop(key, None)
    return build_config(values, lines)


def parse_ic(spec: str) -> tuple[str, tuple[float, ...]]:
    kind, _, args = spec.partition(":")
    kind = kind.strip()
    try:
        nums = _floats(args)
    except ValueError:
        raise ValueError(f"bad numbers in ic spec {spec!r}") from None
    arity = {"constant": 1, "cosine": 3, "random": 2}
    if kind not in arity:
        raise ValueError(f"ic must be constant:<c>, cosine:<mean>,<amp>,<mode> or random:<mean>,<amp>; got {spec!r}")
    if len(nums) != arity[kind]:
        raise ValueError(f"ic {kind} takes {arity[kind]} numbers, got {len(nums)}")
    return kind, nums


def make_ic(spec: str, grid: Grid, seed: int = 0) -> np.ndarray:
    """Evaluate an initial-condition spec on the grid.

    cosine:<mean>,<amp>,<mode> is mean + amp*cos(mode*pi*x). random draws
    uniform noise in [mean-amp, mean+amp], smooths it with the heat semigroup
    (unit diffusivity, tau=1e-3) and clips round-off negatives.
    """
    kind, nums = parse_ic(spec)
    x = grid.x
    if kind == "constant":
        return np.full(grid.n, nums[0])
    if kind == "cosine":
        mean, amp, mode = nums
        return mean + amp * np.cos(mode * np.pi * x)
    from .mild import heat_semigroup_apply

    mean, amp = nums
    rng = np.random.default_rng(seed)
    noise = rng.uniform(-1.0, 1.0, grid.n)
    u = heat_semigroup_apply(mean + amp * noise, IC_SMOOTHING_TAU, 1.0)
    return np.maximum(u, 0.0)

"""Flat key = value experiment configs.

The grammar is deliberately tiny: one `key = value` per line, `#` comments,
blank lines ignored. Values are numbers (with `pi` arithmetic allowed, e.g.
`theta = pi/3`), `inf`, comma lists, or bare strings. Every key is checked
against a whitelist and duplicates are rejected, both with line numbers, so
a typo fails loudly instead of silently running the default.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

EXPERIMENTS = (
    "spin-trace",
    "density-profile",
    "regime-sweep",
    "feasibility",
    "kernel-table",
    "path-oracle",
)

# key -> kind; kind controls parsing and the ExperimentConfig slot
_KEYS = {
    "experiment": "choice",
    "theta": "number",
    "delta_x": "number",
    "mass": "number",
    "eta_up": "complex",
    "eta_down": "complex",
    "time.max": "number",
    "time.count": "int",
    "time.list": "number_list",
    "time.at": "number",
    "steps.count": "int",
    "output.dir": "string",
    "output.format": "string",
    "sweep.delta_x": "number_list",
    "sweep.theta": "number_list",
    "phys.wavelength": "number",
    "phys.atom_mass": "number",
    "phys.trap_frequency": "number",
    "phys.larmor_half": "number",
    "phys.v_so": "number",
    "thresholds.zeno_max": "number",
    "thresholds.ergodic_min": "number",
    "thresholds.ergodic_tan": "number",
    "kernel.x_min": "number",
    "kernel.x_max": "number",
    "kernel.n": "int",
}

_PI_EXPR = re.compile(r"^[0-9pi+\-*/(). ]+$")


class ConfigError(ValueError):
    """Config rejected; message carries the offending line number."""


@dataclass
class ExperimentConfig:
    """Resolved experiment description, defaults filled in."""

    experiment: str = "spin-trace"
    theta: float = math.pi / 3.0
    delta_x: float = 10.0
    mass: float = math.inf
    eta_up: complex = 1.0 + 0j
    eta_down: complex = 0j
    time_max: float = 60.0
    time_count: int = 1201
    time_list: tuple = ()
    time_at: float = 20.0
    steps_count: int = 200
    output_dir: str = "out"
    output_format: str = "csv"
    sweep_delta_x: tuple = ()
    sweep_theta: tuple = ()
    phys: dict = field(default_factory=dict)
    thresholds: dict = field(default_factory=dict)
    kernel_x_min: float = -25.0
    kernel_x_max: float = 25.0
    kernel_n: int = 1001

    def times(self):
        if self.time_list:
            return list(self.time_list)
        step = self.time_max / (self.time_count - 1)
        return [i * step for i in range(self.time_count)]


_SLOT = {key: key.replace(".", "_") for key in _KEYS}
_SLOT.update({
    "phys.wavelength": ("phys", "wavelength"),
    "phys.atom_mass": ("phys", "atom_mass"),
    "phys.trap_frequency": ("phys", "trap_frequency"),
    "phys.larmor_half": ("phys", "larmor_half"),
    "phys.v_so": ("phys", "v_so"),
    "thresholds.zeno_max": ("thresholds", "zeno_max"),
    "thresholds.ergodic_min": ("thresholds", "ergodic_min"),
    "thresholds.ergodic_tan": ("thresholds", "ergodic_tan"),
})


def _parse_number(text, lineno):
    text = text.strip()
    low = text.lower()
    if low in ("inf", "+inf", "infinity"):
        return math.inf
    try:
        return float(text)
    except ValueError:
        pass
    if _PI_EXPR.match(text) and "pi" in text:
        try:
            value = eval(text, {"__builtins__": {}}, {"pi": math.pi})  # noqa: S307
        except Exception:
            raise ConfigError(f"line {lineno}: cannot parse number {text!r}") from None
        if isinstance(value, (int, float)):
            return float(value)
    raise ConfigError(f"line {lineno}: cannot parse number {text!r}")


def _parse_value(key, text, lineno):
    kind = _KEYS[key]
    if kind == "number":
        return _parse_number(text, lineno)
    if kind == "int":
        value = _parse_number(text, lineno)
        if value != int(value):
            raise ConfigError(f"line {lineno}: {key} must be an integer, got {text!r}")
        return int(value)
    if kind == "number_list":
        items = [p for p in text.split(",") if p.strip()]
        if not items:
            raise ConfigError(f"line {lineno}: {key} needs at least one value")
        return tuple(_parse_number(p, lineno) for p in items)
    if kind == "complex":
        try:
            return complex(text.strip().replace(" ", ""))
        except ValueError:
            raise ConfigError(f"line {lineno}: cannot parse complex {text!r}") from None
    if kind == "choice":
        name = text.strip()
        if name not in EXPERIMENTS:
            raise ConfigError(
                f"line {lineno}: unknown experiment {name!r} "
                f"(choose from {', '.join(EXPERIMENTS)})")
        return name
    return text.strip()


def parse_config_text(text, overrides=()):
    """Parse config text plus `--set key=value` overrides into a config.

    Overrides are applied after the file and may repeat keys; within the file
    a repeated key is an error.
    """
    assignments = {}
    seen_lines = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, _, value_text = line.partition("=")
        key = key.strip()
        if key not in _KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in seen_lines:
            raise ConfigError(
                f"line {lineno}: duplicate key {key!r} (first set on line {seen_lines[key]})")
        seen_lines[key] = lineno
        assignments[key] = _parse_value(key, value_text, lineno)

    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r}: expected key=value")
        key, _, value_text = item.partition("=")
        key = key.strip()
        if key not in _KEYS:
            raise ConfigError(f"override: unknown key {key!r}")
        assignments[key] = _parse_value(key, value_text, 0)

    config = ExperimentConfig()
    for key, value in assignments.items():
        slot = _SLOT[key]
        if isinstance(slot, tuple):
            getattr(config, slot[0])[slot[1]] = value
        else:
            setattr(config, slot, value)
    _validate(config)
    return config


def load_config(path, overrides=()):
    with open(path, encoding="utf-8") as fh:
        return parse_config_text(fh.read(), overrides)


def _validate(config):
    if config.delta_x <= 0:
        raise ConfigError("delta_x must be positive")
    if not 0.0 <= config.theta <= math.pi:
        raise ConfigError("theta must lie in [0, pi]")
    if config.mass <= 0:
        raise ConfigError("mass must be positive")
    if config.time_count < 2:
        raise ConfigError("time.count must be at least 2")
    if config.time_max <= 0:
        raise ConfigError("time.max must be positive")
    if config.time_at < 0:
        raise ConfigError("time.at must be nonnegative")
    if config.steps_count < 1:
        raise ConfigError("steps.count must be at least 1")
    if config.output_format not in ("csv", "json"):
        raise ConfigError("output.format must be csv or json")
    if config.kernel_n < 2:
        raise ConfigError("kernel.n must be at least 2")
    if config.kernel_x_min >= config.kernel_x_max:
        raise ConfigError("kernel.x_min must be below kernel.x_max")
    norm = abs(config.eta_up) ** 2 + abs(config.eta_down) ** 2
    if abs(norm - 1.0) > 1e-9:
        raise ConfigError("eta_up/eta_down must be normalized")
    if config.experiment in ("density-profile", "kernel-table", "path-oracle") \
            and config.time_at <= 0:
        raise ConfigError(f"{config.experiment} needs time.at > 0")
    if config.experiment == "regime-sweep":
        if not config.sweep_delta_x or not config.sweep_theta:
            raise ConfigError("regime-sweep needs nonempty sweep.delta_x and sweep.theta")
    if config.experiment == "feasibility":
        required = ("wavelength", "atom_mass", "trap_frequency", "larmor_half", "v_so")
        missing = [k for k in required if k not in config.phys]
        if missing:
            raise ConfigError(f"feasibility needs phys.{', phys.'.join(missing)}")

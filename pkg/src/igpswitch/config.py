"""Run configuration: sectioned ``key = value`` files plus command-line overrides.

Example::

    [params]
    c = 0.5
    a13 = 1.5

    [sweep]
    param = c
    start = 0
    stop = 1
    step = 0.05

Unset keys take their defaults (the reference parameter set).  Unknown
sections or keys are errors, reported with the offending line.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path

from .integrate import SolverOptions
from .model import REFERENCE_PARAMS, PARAM_NAMES, DomainError, ModelParams, as_state


class ConfigError(ValueError):
    pass


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.replace(",", " ").split())


SCHEMA: dict[str, dict] = {
    "params": {name: float for name in PARAM_NAMES},
    "initial": {"x": float, "y": float, "z": float},
    "solver": {
        "rel_tol": float, "abs_tol": float, "max_step": float,
        "initial_step": float, "max_steps": int, "sample_dt": float,
    },
    "simulate": {"t_end": float},
    "sweep": {
        "param": str, "start": float, "stop": float, "step": float, "values": _floats,
        "transient": float, "sample": float, "lle_time": float, "lle_threshold": float,
        "refine": _bool, "max_iter": int, "transition": str,
    },
    "lyapunov": {"total_time": float, "transient_fraction": float, "renorm_tau": float},
}

DEFAULTS = {
    "simulate": {"t_end": 500.0},
    "sweep": {
        "param": "c", "start": 0.0, "stop": 1.0, "step": 0.05, "values": None,
        "transient": 2000.0, "sample": 1000.0, "lle_time": None, "lle_threshold": 0.01,
        "refine": True, "max_iter": 12, "transition": "stability",
    },
    "lyapunov": {"total_time": 5000.0, "transient_fraction": 0.2, "renorm_tau": 1.0},
}


@dataclass
class RunConfig:
    params: ModelParams = REFERENCE_PARAMS
    initial: tuple[float, float, float] = (1.0, 1.0, 1.0)
    solver: SolverOptions = field(default_factory=SolverOptions)
    simulate: dict = field(default_factory=lambda: dict(DEFAULTS["simulate"]))
    sweep: dict = field(default_factory=lambda: dict(DEFAULTS["sweep"]))
    lyapunov: dict = field(default_factory=lambda: dict(DEFAULTS["lyapunov"]))

    def sweep_grid(self) -> tuple[float, ...]:
        s = self.sweep
        if s["values"]:
            return tuple(s["values"])
        if not s["step"] > 0 or s["stop"] < s["start"]:
            raise ConfigError("sweep needs step > 0 and stop >= start")
        n = int(math.floor((s["stop"] - s["start"]) / s["step"] + 1e-9)) + 1
        return tuple(round(s["start"] + k * s["step"], 12) for k in range(n))

    def to_text(self) -> str:
        """Render every effective option in the config-file format."""
        lines = ["[params]"]
        lines += [f"{k} = {v!r}" for k, v in self.params.as_dict().items()]
        lines += ["", "[initial]"]
        lines += [f"{k} = {v!r}" for k, v in zip("xyz", self.initial)]
        lines += ["", "[solver]"]
        lines += [f"{k} = {v!r}" for k, v in dataclasses.asdict(self.solver).items()]
        for section in ("simulate", "sweep", "lyapunov"):
            lines += ["", f"[{section}]"]
            for k, v in getattr(self, section).items():
                if v is None:
                    continue
                if isinstance(v, tuple):
                    v = " ".join(repr(x) for x in v)
                elif isinstance(v, (float, int)) and not isinstance(v, bool):
                    v = repr(v)
                lines.append(f"{k} = {v}")
        return "\n".join(lines) + "\n"


def _parse_lines(text: str, origin: str):
    """Yield (section, key, value, where) from config text."""
    section = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        where = f"{origin}:{lineno}"
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in SCHEMA:
                raise ConfigError(f"{where}: unknown section [{section}]")
            continue
        if "=" not in line:
            raise ConfigError(f"{where}: expected 'key = value', got {raw.strip()!r}")
        if section is None:
            raise ConfigError(f"{where}: key outside of any [section]")
        key, value = (part.strip() for part in line.split("=", 1))
        yield section, key, value, where


def _resolve_override(item: str):
    if "=" not in item:
        raise ConfigError(f"--set {item!r}: expected key=value")
    key, value = (part.strip() for part in item.split("=", 1))
    if "." in key:
        section, key = key.split(".", 1)
    else:
        owners = [s for s, keys in SCHEMA.items() if key in keys]
        if len(owners) != 1:
            raise ConfigError(f"--set {item!r}: use section.key to name this option")
        section = owners[0]
    if section not in SCHEMA:
        raise ConfigError(f"--set {item!r}: unknown section {section!r}")
    return section, key, value, f"--set {item}"


def load_config(path: str | Path | None = None, overrides=()) -> RunConfig:
    entries = []
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        entries.extend(_parse_lines(text, str(path)))
    entries.extend(_resolve_override(item) for item in overrides)

    values: dict[str, dict] = {s: {} for s in SCHEMA}
    for section, key, raw, where in entries:
        conv = SCHEMA[section].get(key)
        if conv is None:
            raise ConfigError(f"{where}: unknown key {key!r} in [{section}]")
        try:
            values[section][key] = conv(raw)
        except ValueError as exc:
            raise ConfigError(f"{where}: bad value for {section}.{key}: {exc}") from None

    cfg = RunConfig()
    try:
        cfg.params = REFERENCE_PARAMS.replace(**values["params"])
        init = dict(zip("xyz", cfg.initial)) | values["initial"]
        cfg.initial = tuple(as_state((init["x"], init["y"], init["z"])))
        cfg.solver = SolverOptions(**values["solver"])
    except (DomainError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    cfg.simulate.update(values["simulate"])
    cfg.sweep.update(values["sweep"])
    cfg.lyapunov.update(values["lyapunov"])

    if not cfg.simulate["t_end"] > 0:
        raise ConfigError("simulate.t_end must be > 0")
    if cfg.sweep["param"] not in PARAM_NAMES:
        raise ConfigError(f"sweep.param must be one of {', '.join(PARAM_NAMES)}")
    if cfg.sweep["transition"] not in ("stability", "chaos"):
        raise ConfigError("sweep.transition must be 'stability' or 'chaos'")
    if not cfg.lyapunov["total_time"] > 0:
        raise ConfigError("lyapunov.total_time must be > 0")
    return cfg

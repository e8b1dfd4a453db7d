"""Flat ``section.key = value`` run configurations.

Example::

    preset = fig3
    control.kappa3 = 20
    init.beta1 = pi/6
    sweep.axis = kappa3
    sweep.start = 1
    sweep.stop = 15
    sweep.count = 8
    output.path = out/fig5

Lines starting with ``#`` are comments. Numbers may be written as simple
arithmetic over literals and ``pi`` (``pi/5``, ``2*pi/3``). A ``preset`` line,
if present, must come first and seeds every other value.
"""

from __future__ import annotations

import ast
import math
import operator
from dataclasses import dataclass, fields, replace

import numpy as np

from .propagator import IntegratorSettings
from .scenario import FIGURES, InitialStateParams, ScenarioControl, ScenarioParams, preset

SWEEP_AXES = ("beta1", "beta2", "beta3", "kappa3")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    start: float
    stop: float
    count: int
    axis2: str | None = None
    start2: float = 0.0
    stop2: float = 0.0
    count2: int = 1

    def __post_init__(self):
        for ax in (self.axis, self.axis2):
            if ax is not None and ax not in SWEEP_AXES:
                raise ConfigError(f"sweep axis must be one of {SWEEP_AXES}, got {ax!r}")
        if self.count < 1 or self.count2 < 1:
            raise ConfigError("sweep counts must be at least 1")
        if self.axis2 is not None and self.axis2 == self.axis:
            raise ConfigError("sweep.axis2 must differ from sweep.axis")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)

    def values2(self) -> np.ndarray:
        return np.linspace(self.start2, self.stop2, self.count2)

    def points(self) -> list[tuple[float, ...]]:
        """Sweep points in row order: outer axis first, inner axis fastest."""
        if self.axis2 is None:
            return [(float(v),) for v in self.values()]
        return [(float(a), float(b)) for a in self.values() for b in self.values2()]


@dataclass(frozen=True)
class OutputSpec:
    path: str = "out"
    precision: int = 9
    trajectories: bool = False

    def __post_init__(self):
        if not 6 <= self.precision <= 17:
            raise ConfigError(f"output.precision must lie in [6, 17], got {self.precision}")


@dataclass(frozen=True)
class RunConfig:
    scenario: ScenarioParams = ScenarioParams()
    control: ScenarioControl = ScenarioControl()
    init: InitialStateParams = InitialStateParams()
    integrate: IntegratorSettings = IntegratorSettings()
    sweep: SweepSpec | None = None
    output: OutputSpec = OutputSpec()
    preset: str | None = None

    def with_axis(self, axis: str, value: float) -> "RunConfig":
        if axis == "kappa3":
            return replace(self, control=replace(self.control, kappa3=value))
        return replace(self, init=replace(self.init, **{axis: value}))


_GRID = dict(start=0.2, stop=1.3, count=11, start2=0.2, stop2=1.3, count2=11)
_PRESET_SWEEPS = {
    "fig2": SweepSpec(axis="beta1", axis2="beta2", **_GRID),
    "fig3": SweepSpec(axis="beta1", axis2="beta2", **_GRID),
    "fig4": SweepSpec(axis="beta1", axis2="beta2", **{**_GRID, "start": 0.0}),
    "fig5": SweepSpec(axis="kappa3", start=1.0, stop=15.0, count=8),
    "fig6": None,
}


def preset_config(name: str) -> RunConfig:
    try:
        scenario, control, init, integrate = preset(name)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return RunConfig(
        scenario=scenario,
        control=control,
        init=init,
        integrate=integrate,
        sweep=_PRESET_SWEEPS[name],
        output=OutputSpec(path=f"out/{name}"),
        preset=name,
    )


_SECTIONS = {
    "scenario": ScenarioParams,
    "control": ScenarioControl,
    "init": InitialStateParams,
    "integrate": IntegratorSettings,
    "sweep": SweepSpec,
    "output": OutputSpec,
}
_BOOL_KEYS = {"use_h3_variant", "include_h3", "renormalize", "trajectories"}
_INT_KEYS = {"record_stride", "count", "count2", "precision"}
_STR_KEYS = {"target", "axis", "axis2", "path"}

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}


def _eval_number(text: str) -> float:
    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.UAdd, ast.USub)):
            v = ev(node.operand)
            return v if isinstance(node.op, ast.UAdd) else -v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        raise ValueError
    try:
        return ev(ast.parse(text, mode="eval"))
    except (SyntaxError, ValueError, ZeroDivisionError):
        raise ConfigError(f"not a number: {text!r}") from None


def _convert(key: str, raw: str):
    if key in _STR_KEYS:
        return None if key == "axis2" and raw.lower() in ("", "none") else raw
    if key in _BOOL_KEYS:
        low = raw.lower()
        if low in ("true", "yes", "1"):
            return True
        if low in ("false", "no", "0"):
            return False
        raise ConfigError(f"not a boolean: {raw!r}")
    if key in _INT_KEYS:
        v = _eval_number(raw)
        if v != int(v):
            raise ConfigError(f"{key} must be an integer, got {raw!r}")
        return int(v)
    return _eval_number(raw)


def parse_lines(text: str) -> list[tuple[int, str, str]]:
    out = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {stripped!r}")
        key, value = (s.strip() for s in stripped.split("=", 1))
        out.append((lineno, key, value))
    return out


def apply_overrides(cfg: RunConfig, items: list[tuple[str, str]]) -> RunConfig:
    """Apply ``(dotted key, raw value)`` pairs on top of ``cfg``."""
    updates: dict[str, dict] = {}
    for key, raw in items:
        if key == "preset":
            raise ConfigError("'preset' may only appear as the first entry")
        section, _, name = key.partition(".")
        if section not in _SECTIONS or name not in {f.name for f in fields(_SECTIONS[section])}:
            raise ConfigError(f"unknown key {key!r}")
        updates.setdefault(section, {})[name] = _convert(name, raw)
    kwargs = {}
    try:
        for section, vals in updates.items():
            current = getattr(cfg, section)
            if current is None:
                if section == "sweep" and not {"axis", "start", "stop", "count"} <= vals.keys():
                    raise ConfigError("a new sweep needs sweep.axis, sweep.start, sweep.stop and sweep.count")
                kwargs[section] = _SECTIONS[section](**vals)
            else:
                kwargs[section] = replace(current, **vals)
        return replace(cfg, **kwargs)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def parse_config(text: str, base: RunConfig | None = None) -> RunConfig:
    entries = parse_lines(text)
    cfg = base if base is not None else RunConfig()
    if entries and entries[0][1] == "preset":
        cfg = preset_config(entries[0][2])
        entries = entries[1:]
    return apply_overrides(cfg, [(k, v) for _, k, v in entries])


def load_config(path: str, base: RunConfig | None = None) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc.strerror}") from None
    return parse_config(text, base)


def _format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if v is None:
        return "none"
    return str(v)


def format_config(cfg: RunConfig) -> str:
    """Render every value explicitly; ``parse_config`` of the result reproduces ``cfg``.

    A leading ``preset`` line records provenance; every value that follows
    is explicit, so the text does not depend on the preset tables.
    """
    lines = []
    if cfg.preset is not None:
        lines.append(f"preset = {cfg.preset}")
    for section in _SECTIONS:
        obj = getattr(cfg, section)
        if obj is None:
            continue
        for f in fields(obj):
            lines.append(f"{section}.{f.name} = {_format_value(getattr(obj, f.name))}")
    return "\n".join(lines) + "\n"


def describe_presets() -> list[str]:
    out = []
    for name in FIGURES:
        cfg = preset_config(name)
        s, c, i = cfg.scenario, cfg.control, cfg.init
        controls = "H1,H2" if not s.include_h3 else ("H1,H2,h3" if s.use_h3_variant else "H1,H2,H3")
        sweep = cfg.sweep
        if sweep is None:
            sweep_txt = "none"
        elif sweep.axis2 is None:
            sweep_txt = f"{sweep.axis}[{sweep.start:g}..{sweep.stop:g}]x{sweep.count}"
        else:
            sweep_txt = (
                f"{sweep.axis}[{sweep.start:g}..{sweep.stop:g}]x{sweep.count} * "
                f"{sweep.axis2}[{sweep.start2:g}..{sweep.stop2:g}]x{sweep.count2}"
            )
        out.append(
            f"{name}: target={c.target} controls={controls} omega={s.omega:g} phi={s.phi:.6g} "
            f"kappa2={c.kappa2:g} kappa3={c.kappa3:g} beta=({i.beta1:.6g},{i.beta2:.6g},{i.beta3:.6g}) "
            f"t_final={cfg.integrate.t_final:g} sweep={sweep_txt}"
        )
    return out

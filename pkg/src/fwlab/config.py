"""Strict YAML scenario configuration.

A config names a scenario and may override any of its sections::

    scenario: plane_wave
    particle: {m: 1.0, g: 2.0, hbar: 1.0}
    basis: {kind: line_grid, N: 16, box_length: 251.32741228718345}
    fields: {kind: plane_wave, E0: [0.1, 0.0, 0.0], n: [0.0, 0.0, 1.0]}
    time: {t_end: 10.0, steps: 200}
    output: {directory: out, formats: [csv, json]}

Omitted sections and keys fall back to the scenario defaults. Unknown keys,
non-finite numbers and ``steps < 2`` are errors. ``dump`` writes the fully
resolved config in a canonical form, so ``dump(load(dump(c))) == dump(c)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields as dc_fields, replace
from typing import Any, Callable

import numpy as np
import yaml

from .basis import KINDS, BasisSpec
from .fields import PlaneWave, UniformStatic, UniformVectorPotential
from .numeric import DEFAULT_POLICY, FWLabError, NumericPolicy
from .scenarios import SCENARIOS, InitialState, RotationWaveform, Scenario, build

__all__ = ["ConfigError", "OutputSpec", "ScenarioConfig", "load", "loads", "dump", "to_dict", "from_dict"]

FORMATS = ("csv", "json")
TOP_LEVEL = ("scenario", "particle", "basis", "fields", "state", "time", "study", "output",
             "numeric_policy")


class ConfigError(FWLabError, ValueError):
    """The config file is malformed or violates the schema."""


@dataclass(frozen=True)
class OutputSpec:
    directory: str = "."
    formats: tuple[str, ...] = FORMATS


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: Scenario
    output: OutputSpec = OutputSpec()
    policy: NumericPolicy = DEFAULT_POLICY

    @property
    def name(self) -> str:
        return self.scenario.name


# value converters -----------------------------------------------------------


def _number(where: str, v) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {v!r}")
    x = float(v)
    if not math.isfinite(x):
        raise ConfigError(f"{where}: value must be finite, got {v!r}")
    return x


def _integer(where: str, v) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"{where}: expected an integer, got {v!r}")
    return int(v)


def _text(where: str, v) -> str:
    if not isinstance(v, str):
        raise ConfigError(f"{where}: expected a string, got {v!r}")
    return v


def _vector(n: int) -> Callable[[str, Any], tuple]:
    def conv(where: str, v):
        if not isinstance(v, (list, tuple)) or len(v) != n:
            raise ConfigError(f"{where}: expected a list of {n} numbers, got {v!r}")
        return tuple(_number(f"{where}[{i}]", x) for i, x in enumerate(v))

    return conv


def _number_list(where: str, v) -> tuple:
    if not isinstance(v, (list, tuple)):
        raise ConfigError(f"{where}: expected a list of numbers")
    return tuple(_number(f"{where}[{i}]", x) for i, x in enumerate(v))


def _formats(where: str, v) -> tuple:
    if not isinstance(v, (list, tuple)) or not v:
        raise ConfigError(f"{where}: expected a non-empty list drawn from {FORMATS}")
    out = []
    for x in v:
        if x not in FORMATS:
            raise ConfigError(f"{where}: unknown format {x!r}; expected a subset of {FORMATS}")
        if x not in out:
            out.append(x)
    return tuple(f for f in FORMATS if f in out)


_PARTICLE = {"m": _number, "e": _number, "g": _number, "d_hat": _number, "hbar": _number}
_BASIS = {
    "kind": _text, "N": _integer, "box_length": _number, "transverse_momentum": _vector(2),
    "momentum": _vector(3), "m_max": _integer, "radial_momentum": _number, "axial_momentum": _number,
}
_FIELD_KINDS = {
    "uniform_static": (UniformStatic, {"E0": _vector(3), "B0": _vector(3), "phi": _number}),
    "uniform_vector_potential": (
        UniformVectorPotential,
        {"amplitude": _vector(3), "frequency": _number, "phase": _number, "offset": _vector(3)},
    ),
    "plane_wave": (PlaneWave, {"E0": _vector(3), "n": _vector(3), "omega": _number}),
    "rotation": (RotationWaveform, {"omega0": _number, "nu": _number, "depth": _number}),
}
_STATE = {"spin": _vector(3), "k0": _integer, "width": _number}
_TIME = {"t_end": _number, "steps": _integer}
_STUDY = {"hbars": _number_list, "sample_time": _number}
_OUTPUT = {"directory": _text, "formats": _formats}
_POLICY = {f.name: _number for f in dc_fields(NumericPolicy)}


def _section(name: str, data, schema: dict) -> dict:
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"{name}: expected a mapping, got {type(data).__name__}")
    unknown = sorted(set(map(str, data)) - set(schema))
    if unknown:
        raise ConfigError(f"{name}: unknown keys {unknown}; allowed {sorted(schema)}")
    return {k: schema[k](f"{name}.{k}", v) for k, v in data.items()}


def _build(where: str, factory, **kwargs):
    try:
        return factory(**kwargs)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from None


# parsing ----------------------------------------------------------------------


def from_dict(data) -> ScenarioConfig:
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping at top level")
    unknown = sorted(set(map(str, data)) - set(TOP_LEVEL))
    if unknown:
        raise ConfigError(f"unknown top-level keys {unknown}; allowed {list(TOP_LEVEL)}")
    if "scenario" not in data:
        raise ConfigError("missing required key 'scenario'")
    name = _text("scenario", data["scenario"])
    if name not in SCENARIOS:
        raise ConfigError(f"scenario: unknown {name!r}; expected one of {sorted(SCENARIOS)}")
    base = build(name)

    particle = _build("particle", lambda **kw: replace(base.particle, **kw),
                      **_section("particle", data.get("particle"), _PARTICLE))

    b = _section("basis", data.get("basis"), _BASIS)
    if "kind" in b and b["kind"] not in KINDS:
        raise ConfigError(f"basis.kind: unknown {b['kind']!r}; expected one of {list(KINDS)}")
    if b.get("kind", base.basis.kind) == base.basis.kind:
        basis = _build("basis", lambda **kw: replace(base.basis, **kw), hbar=particle.hbar, **b)
    else:
        basis = _build("basis", BasisSpec, hbar=particle.hbar, **b)

    default_field = base.rotation if base.rotation is not None else base.fields
    f = data.get("fields")
    if f is not None and not isinstance(f, dict):
        raise ConfigError("fields: expected a mapping")
    f = dict(f or {})
    kind = _text("fields.kind", f.pop("kind", default_field.kind))
    if kind not in _FIELD_KINDS:
        raise ConfigError(f"fields.kind: unknown {kind!r}; expected one of {sorted(_FIELD_KINDS)}")
    if (kind == "rotation") != (name == "rotating_frame"):
        raise ConfigError(f"fields.kind {kind!r} does not fit scenario {name!r}")
    cls, schema = _FIELD_KINDS[kind]
    fv = _section(f"fields[{kind}]", f, schema)
    if kind == "plane_wave" and "omega" not in fv and basis.is_grid:
        fv["omega"] = 2.0 * np.pi / basis.box_length
    if kind == default_field.kind:
        field_cfg = _build("fields", lambda **kw: replace(default_field, **kw), **fv)
    else:
        field_cfg = _build("fields", cls, **fv)

    state = _build("state", lambda **kw: replace(base.state, **kw),
                   **_section("state", data.get("state"), _STATE))
    tm = _section("time", data.get("time"), _TIME)
    t_end, steps = tm.get("t_end", base.t_end), tm.get("steps", base.steps)
    if steps < 2:
        raise ConfigError(f"time.steps must be >= 2, got {steps}")
    if not t_end > 0:
        raise ConfigError(f"time.t_end must be positive, got {t_end}")
    st = _section("study", data.get("study"), _STUDY)
    hbars = st.get("hbars", base.hbars)
    if name == "hbar_scaling":
        h = np.asarray(hbars, dtype=float)
        if h.size < 3 or np.any(h <= 0):
            raise ConfigError("study.hbars: need at least three positive values")
        r = h[1:] / h[:-1]
        if np.max(np.abs(r - r[0])) > 1e-12 * abs(r[0]):
            raise ConfigError("study.hbars: values must form a geometric progression")

    kw = dict(fields=field_cfg) if kind != "rotation" else dict(rotation=field_cfg)
    scenario = _build(
        "scenario", Scenario, name=name, particle=particle, basis=basis, state=state,
        t_end=t_end, steps=steps, sample_time=st.get("sample_time", base.sample_time),
        hbars=tuple(hbars), **kw,
    )
    if kind == "plane_wave":
        try:
            basis.check_commensurate(field_cfg.omega)
        except ValueError as exc:
            raise ConfigError(f"fields.omega: {exc}") from None
        if basis.kind != "line_grid":
            raise ConfigError("plane_wave fields need a line_grid basis")

    out = _section("output", data.get("output"), _OUTPUT)
    output = OutputSpec(**out)
    pol = _section("numeric_policy", data.get("numeric_policy"), _POLICY)
    for k, v in pol.items():
        if not v > 0:
            raise ConfigError(f"numeric_policy.{k} must be positive")
    return ScenarioConfig(scenario, output, DEFAULT_POLICY.with_overrides(pol))


def loads(text: str) -> ScenarioConfig:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"YAML syntax error: {exc}") from None
    return from_dict(data)


def load(path) -> ScenarioConfig:
    """Parse a config file. ``OSError`` propagates unchanged."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return loads(text)


# serialization ----------------------------------------------------------------


def _plain(v):
    if isinstance(v, (tuple, list, np.ndarray)):
        return [_plain(x) for x in v]
    if isinstance(v, (np.floating, float)):
        return float(v)
    if isinstance(v, (np.integer, int)) and not isinstance(v, bool):
        return int(v)
    return v


def _record(obj, keys) -> dict:
    return {k: _plain(getattr(obj, k)) for k in keys}


def to_dict(cfg: ScenarioConfig) -> dict:
    sc = cfg.scenario
    fc = sc.rotation if sc.rotation is not None else sc.fields
    _, schema = _FIELD_KINDS[fc.kind]
    return {
        "scenario": sc.name,
        "particle": _record(sc.particle, _PARTICLE),
        "basis": _record(sc.basis, _BASIS),
        "fields": {"kind": fc.kind, **_record(fc, schema)},
        "state": _record(sc.state, _STATE),
        "time": {"t_end": float(sc.t_end), "steps": int(sc.steps)},
        "study": {"hbars": _plain(sc.hbars), "sample_time": float(sc.sample_time)},
        "output": {"directory": cfg.output.directory, "formats": list(cfg.output.formats)},
        "numeric_policy": _record(cfg.policy, _POLICY),
    }


def dump(cfg: ScenarioConfig) -> str:
    return yaml.safe_dump(to_dict(cfg), sort_keys=False, default_flow_style=None, width=1000)

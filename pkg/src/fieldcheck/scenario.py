"""Scenario files: a versioned JSON document describing one verification run."""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

from .asymptotics import DEFAULT_THRESHOLDS, RayLadder
from .minkowski import NullDirection, Orientation
from .quadrature import DEFAULT_AZIMUTHAL, DEFAULT_POLAR, DEFAULT_RADIAL, SphereRule, VolumeRule
from .solver import SphericalGauge
from .sources import (
    OMEGA_A_WARNING,
    CurrentSource,
    ScalarSource,
    SourceWarning,
    hertzian_dipole,
    oscillating_monopole,
    static_charge,
    static_monopole,
)

SCHEMA = "fieldcheck/1"


class ConfigError(ValueError):
    def __init__(self, message, key=None, line=None):
        where = []
        if key:
            where.append(f"key '{key}'")
        if line is not None:
            where.append(f"line {line}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.key = key
        self.line = line


# constructor, theory, required keys, optional keys with defaults
_SOURCES = {
    "static_monopole": (static_monopole, "scalar", ("Q", "a"), {}),
    "oscillating_monopole": (oscillating_monopole, "scalar", ("q0", "omega", "a"), {}),
    "static_charge": (static_charge, "maxwell", ("e", "a"), {}),
    "hertzian_dipole": (hertzian_dipole, "maxwell", ("p0", "omega", "a"), {"axis": (0.0, 0.0, 1.0)}),
}
_POSITIVE = {"a", "omega"}


def _get(block: dict, key: str, path: str, default=..., kind=None):
    if not isinstance(block, dict):
        raise ConfigError("expected an object", path)
    if key not in block:
        if default is ...:
            raise ConfigError("missing required key", f"{path}.{key}" if path else key)
        return default
    value = block[key]
    full = f"{path}.{key}" if path else key
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            raise ConfigError(f"expected a finite number, got {value!r}", full)
        return float(value)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"expected an integer, got {value!r}", full)
        return value
    if kind is list and not isinstance(value, list):
        raise ConfigError(f"expected a list, got {value!r}", full)
    return value


def _vector3(value, path):
    if not isinstance(value, list) or len(value) != 3:
        raise ConfigError("expected a list of three numbers", path)
    try:
        vec = tuple(float(c) for c in value)
    except (TypeError, ValueError):
        raise ConfigError("expected a list of three numbers", path) from None
    if math.sqrt(sum(c * c for c in vec)) == 0.0:
        raise ConfigError("direction must be non-zero", path)
    return vec


def build_source(spec: dict, path: str = "source"):
    kind = _get(spec, "kind", path)
    if kind not in _SOURCES:
        raise ConfigError(f"unknown source kind {kind!r}; choose from {sorted(_SOURCES)}", f"{path}.kind")
    ctor, theory, required, optional = _SOURCES[kind]
    kwargs = {}
    for key in required:
        value = _get(spec, key, path, kind=float)
        if key in _POSITIVE and not value > 0:
            raise ConfigError(f"must be positive, got {value}", f"{path}.{key}")
        kwargs[key] = value
    for key, default in optional.items():
        kwargs[key] = _vector3(spec[key], f"{path}.{key}") if key in spec else default
    if "center" in spec:
        kwargs["center"] = tuple(float(c) for c in _get(spec, "center", path, kind=list))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SourceWarning)
        return ctor(**kwargs), theory


@dataclass
class LadderSpec:
    directions: list
    orientation: Orientation
    r0: float | None
    growth: float
    rungs: int
    u0: float

    def ladders(self, source) -> list[RayLadder]:
        out = []
        for n in self.directions:
            d = NullDirection.towards(n, self.orientation)
            if self.r0 is None:
                lad = RayLadder.default_for(source, d, self.u0)
                lad = RayLadder.geometric(d, lad.radii[0], self.growth, self.rungs, self.u0)
            else:
                lad = RayLadder.geometric(d, self.r0, self.growth, self.rungs, self.u0)
            out.append(lad)
        return out


@dataclass
class Scenario:
    name: str
    theory: str
    source: object
    orientation: Orientation
    ladder: LadderSpec
    rule: VolumeRule
    sphere: SphereRule
    flux: dict | None = None
    charge: dict | None = None
    gauge: SphericalGauge | None = None
    sample: dict | None = None
    convergence: dict = field(default_factory=dict)
    thresholds: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)
    flags: dict = field(default_factory=dict)


def _parse_ladder(block, orientation):
    path = "ladder"
    dirs = _get(block, "directions", path, [[0.0, 0.0, 1.0]], kind=list)
    if not dirs:
        raise ConfigError("at least one direction required", "ladder.directions")
    directions = [_vector3(d, f"ladder.directions[{i}]") for i, d in enumerate(dirs)]
    try:
        lad_orient = Orientation.parse(_get(block, "orientation", path, orientation.value))
    except ValueError:
        raise ConfigError("orientation must be 'retarded' or 'advanced'", "ladder.orientation") from None
    r0 = _get(block, "r0", path, None)
    if r0 is not None:
        r0 = _get(block, "r0", path, kind=float)
        if not r0 > 0:
            raise ConfigError("must be positive", "ladder.r0")
    growth = _get(block, "growth", path, math.sqrt(2.0), kind=float)
    if not growth > 1:
        raise ConfigError("must exceed 1", "ladder.growth")
    rungs = _get(block, "rungs", path, 12, kind=int)
    if rungs < 4:
        raise ConfigError("at least 4 rungs required", "ladder.rungs")
    u0 = _get(block, "u0", path, 0.0, kind=float)
    return LadderSpec(directions, lad_orient, r0, growth, rungs, u0)


def _parse_orders(block, path, names_defaults):
    out = {}
    for name, default in names_defaults:
        value = _get(block, name, path, default, kind=int)
        if value < 2:
            raise ConfigError("quadrature order must be at least 2", f"{path}.{name}")
        out[name] = value
    return out


def parse_scenario(doc: dict, name: str = "scenario") -> Scenario:
    if not isinstance(doc, dict):
        raise ConfigError("scenario must be a JSON object")
    schema = _get(doc, "schema", "", SCHEMA)
    if schema != SCHEMA:
        raise ConfigError(f"unsupported schema {schema!r}, expected {SCHEMA!r}", "schema")
    theory = _get(doc, "theory", "")
    if theory not in ("scalar", "maxwell"):
        raise ConfigError("theory must be 'scalar' or 'maxwell'", "theory")
    try:
        orientation = Orientation.parse(_get(doc, "orientation", "", "retarded"))
    except ValueError:
        raise ConfigError("orientation must be 'retarded' or 'advanced'", "orientation") from None

    raw_source = _get(doc, "source", "")
    specs = raw_source if isinstance(raw_source, list) else [raw_source]
    if not specs:
        raise ConfigError("at least one source required", "source")
    source = None
    for i, spec in enumerate(specs):
        path = f"source[{i}]" if isinstance(raw_source, list) else "source"
        part, part_theory = build_source(spec, path)
        if part_theory != theory:
            raise ConfigError(f"source kind {spec['kind']!r} belongs to the {part_theory} theory", f"{path}.kind")
        source = part if source is None else source + part
    expected = ScalarSource if theory == "scalar" else CurrentSource
    assert isinstance(source, expected)

    quad = _parse_orders(
        _get(doc, "quadrature", "", {}), "quadrature",
        [("radial", DEFAULT_RADIAL), ("polar", DEFAULT_POLAR), ("azimuthal", DEFAULT_AZIMUTHAL)],
    )
    sph = _parse_orders(_get(doc, "sphere", "", {}), "sphere", [("polar", 16), ("azimuthal", 32)])

    gauge = None
    if "gauge" in doc:
        if theory != "maxwell":
            raise ConfigError("gauge transformations apply to the maxwell theory only", "gauge")
        g = doc["gauge"]
        gauge = SphericalGauge(
            _get(g, "amplitude", "gauge", kind=float),
            _get(g, "omega", "gauge", source.max_omega or 1.0, kind=float),
            tuple(_get(g, "center", "gauge", [0.0, 0.0, 0.0], kind=list)),
        )

    thresholds = {}
    for key, value in _get(doc, "thresholds", "", {}).items():
        if key not in DEFAULT_THRESHOLDS:
            raise ConfigError(f"unknown threshold group; choose from {sorted(DEFAULT_THRESHOLDS)}", f"thresholds.{key}")
        if not (isinstance(value, list) and len(value) == 2):
            raise ConfigError("expected [target, slack]", f"thresholds.{key}")
        thresholds[key] = (float(value[0]), float(value[1]))

    omega_a = source.max_omega * source.radius
    flags = {"omega_a": omega_a, "omega_a_warning": omega_a >= OMEGA_A_WARNING}

    return Scenario(
        name=str(_get(doc, "name", "", name)),
        theory=theory,
        source=source,
        orientation=orientation,
        ladder=_parse_ladder(_get(doc, "ladder", "", {}), orientation),
        rule=VolumeRule(**quad),
        sphere=SphereRule(1.0, **sph),
        flux=_get(doc, "flux", "", None),
        charge=_get(doc, "charge", "", None),
        gauge=gauge,
        sample=_get(doc, "sample", "", None),
        convergence=_get(doc, "convergence", "", {}),
        thresholds=thresholds,
        output=_get(doc, "output", "", {}),
        flags=flags,
    )


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read scenario file: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON: {exc.msg} at column {exc.colno}", line=exc.lineno) from None
    return parse_scenario(doc, name=path.stem)

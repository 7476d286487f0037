"""JSON run configuration: parsing, validation and serialization.

All physical quantities carry their SI unit in the key name.
"""
from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, field

from .constants import CUTOFF_PRESETS
from .continuum import ModeIntegralSpec
from .errors import ConfigError
from .fock_oracle import MAX_LEVELS, OracleParams
from .geometry import InterferometerGeometry, ScenarioConfig, overstreet_preset

__all__ = ["RunConfig", "OracleConfig", "parse_config", "load_config", "config_to_dict", "apply_override",
           "PRESETS"]

GEOMETRY_KEYS = {
    "r_u_m": "r_u",
    "r_d_m": "r_d",
    "r_s_m": "r_s",
    "atom_mass_kg": "atom_mass",
    "source_mass_kg": "source_mass",
    "interaction_time_s": "interaction_time",
}
SPEC_KEYS = {
    "k_max_per_m": "k_max",
    "k_min_per_m": "k_min",
    "density_of_states": "density_of_states",
    "rel_tol": "rel_tol",
    "time_factor": "time_factor",
    "quantization_volume_m3": "quantization_volume",
    "polarization_factor": "polarization_factor",
    "split_point": "split_point",
}
SCENARIO_KEYS = {"kind": "kind", "loop_closure_time_s": "loop_closure_time"}
ORACLE_PARAM_KEYS = ("omega", "g_u", "g_d", "g_s", "phase_u", "phase_d", "phase_s", "rest_energy")
TOP_KEYS = {"geometry", "mode_spec", "scenario", "sweep", "output", "cutoff_preset", "oracle", "preset"}
OUTPUTS = ("json", "csv")
MAX_SWEEP_DIMS = 2
PRESETS = {"overstreet": overstreet_preset}


@dataclass(frozen=True)
class OracleConfig:
    params: OracleParams = OracleParams(omega=1.0, g_u=0.1, g_d=0.1, g_s=0.2, phase_u=0.3, phase_d=-0.4)
    omega_t: float = 1.0
    truncation: int | None = None

    def __post_init__(self):
        if not (self.omega_t >= 0 and math.isfinite(self.omega_t)):
            raise ConfigError("oracle omega_t must be finite and >= 0")
        if self.truncation is not None and not (1 <= self.truncation <= MAX_LEVELS):
            raise ConfigError(f"oracle truncation must lie in [1, {MAX_LEVELS}]")

    @property
    def t(self):
        return self.omega_t / self.params.omega


@dataclass
class RunConfig:
    geometry: InterferometerGeometry
    mode_spec: ModeIntegralSpec = field(default_factory=ModeIntegralSpec)
    scenario: ScenarioConfig | None = None
    sweep: dict | None = None
    output: str = "json"
    cutoff_preset: str = "codata"
    oracle: OracleConfig = field(default_factory=OracleConfig)
    preset: str | None = None

    def effective_spec(self, constants=None) -> ModeIntegralSpec:
        """Mode spec with k_max filled in from the cutoff preset when not given explicitly."""
        if self.mode_spec.k_max is not None:
            return self.mode_spec
        from .constants import CODATA2018, cutoff_wavenumber

        return self.mode_spec.with_(k_max=cutoff_wavenumber(self.cutoff_preset, constants or CODATA2018))


def _check_keys(section, allowed, where):
    if not isinstance(section, dict):
        raise ConfigError(f"{where} must be a JSON object")
    unknown = sorted(set(section) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(unknown)}")


def _number(value, where):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(f"{where} must be a finite number, got {value!r}")
    return float(value)


def _vector(value, where):
    if not (isinstance(value, list) and len(value) == 3):
        raise ConfigError(f"{where} must be a list of three numbers")
    return tuple(_number(v, where) for v in value)


def _parse_geometry(section):
    _check_keys(section, GEOMETRY_KEYS, "geometry")
    missing = sorted(set(GEOMETRY_KEYS) - set(section))
    if missing:
        raise ConfigError(f"geometry is missing key(s): {', '.join(missing)}")
    kw = {}
    for key, attr in GEOMETRY_KEYS.items():
        kw[attr] = _vector(section[key], f"geometry.{key}") if key.startswith("r_") else _number(section[key], f"geometry.{key}")
    return InterferometerGeometry(**kw)


def _parse_spec(section):
    _check_keys(section, SPEC_KEYS, "mode_spec")
    kw = {}
    for key, attr in SPEC_KEYS.items():
        if key not in section:
            continue
        value = section[key]
        if key in ("density_of_states", "time_factor"):
            if not isinstance(value, str):
                raise ConfigError(f"mode_spec.{key} must be a string")
            kw[attr] = value
        elif key == "k_max_per_m" and value is None:
            kw[attr] = None
        else:
            kw[attr] = _number(value, f"mode_spec.{key}")
    return ModeIntegralSpec(**kw)


def _parse_scenario(section):
    _check_keys(section, SCENARIO_KEYS, "scenario")
    return ScenarioConfig(
        kind=section.get("kind", "full-interaction"),
        loop_closure_time=_number(section.get("loop_closure_time_s", 0.0), "scenario.loop_closure_time_s"),
    )


def _parse_oracle(section):
    _check_keys(section, set(ORACLE_PARAM_KEYS) | {"omega_t", "truncation"}, "oracle")
    defaults = OracleConfig()
    params = {k: _number(section[k], f"oracle.{k}") for k in ORACLE_PARAM_KEYS if k in section}
    truncation = section.get("truncation")
    if truncation is not None and (isinstance(truncation, bool) or not isinstance(truncation, int)):
        raise ConfigError("oracle.truncation must be an integer")
    base = dict(defaults.params.__dict__)
    base.update(params)
    return OracleConfig(
        params=OracleParams(**base),
        omega_t=_number(section.get("omega_t", defaults.omega_t), "oracle.omega_t"),
        truncation=truncation,
    )


def _sweep_target(path):
    parts = path.split(".")
    if len(parts) not in (2, 3) or parts[0] not in ("geometry", "mode_spec"):
        raise ConfigError(f"sweep key {path!r} must look like geometry.<key>, geometry.<vector>.<i> or mode_spec.<key>")
    keys = GEOMETRY_KEYS if parts[0] == "geometry" else SPEC_KEYS
    if parts[1] not in keys:
        raise ConfigError(f"sweep key {path!r} names an unknown field")
    is_vector = parts[1].startswith("r_")
    if is_vector != (len(parts) == 3):
        raise ConfigError(f"sweep key {path!r}: vector fields need a component index, scalars must not have one")
    if is_vector and parts[2] not in ("0", "1", "2"):
        raise ConfigError(f"sweep key {path!r}: component index must be 0, 1 or 2")
    if parts[1] in ("density_of_states", "time_factor"):
        raise ConfigError(f"sweep key {path!r} is not a numeric field")
    return parts


def _parse_sweep(section):
    if not isinstance(section, dict) or not section:
        raise ConfigError("sweep must be a non-empty object of key -> list of values")
    if len(section) > MAX_SWEEP_DIMS:
        raise ConfigError(f"at most {MAX_SWEEP_DIMS} swept dimensions are supported")
    out = {}
    for path, values in section.items():
        _sweep_target(path)
        if not isinstance(values, list) or not values:
            raise ConfigError(f"sweep values for {path!r} must be a non-empty list")
        out[path] = [_number(v, f"sweep.{path}") for v in values]
    return out


def apply_override(doc: dict, path: str, value: float) -> dict:
    """Copy of a config document with one swept field replaced."""
    parts = _sweep_target(path)
    doc = copy.deepcopy(doc)
    section = doc.setdefault(parts[0], {})
    if len(parts) == 3:
        vec = list(section[parts[1]])
        vec[int(parts[2])] = value
        section[parts[1]] = vec
    else:
        section[parts[1]] = value
    return doc


def parse_config(doc: dict, preset: str | None = None) -> RunConfig:
    _check_keys(doc, TOP_KEYS, "config")
    preset = preset or doc.get("preset")
    if "geometry" in doc:
        geometry = _parse_geometry(doc["geometry"])
    elif preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; expected one of {sorted(PRESETS)}")
        geometry = PRESETS[preset]()
    else:
        raise ConfigError("config needs a geometry section or a preset")
    output = doc.get("output", "json")
    if output not in OUTPUTS:
        raise ConfigError(f"output must be one of {OUTPUTS}")
    cutoff = doc.get("cutoff_preset", "codata")
    if cutoff not in CUTOFF_PRESETS:
        raise ConfigError(f"cutoff_preset must be one of {CUTOFF_PRESETS}")
    return RunConfig(
        geometry=geometry,
        mode_spec=_parse_spec(doc.get("mode_spec", {})),
        scenario=_parse_scenario(doc["scenario"]) if "scenario" in doc else None,
        sweep=_parse_sweep(doc["sweep"]) if "sweep" in doc else None,
        output=output,
        cutoff_preset=cutoff,
        oracle=_parse_oracle(doc["oracle"]) if "oracle" in doc else OracleConfig(),
        preset=preset,
    )


def load_config(path, preset=None) -> RunConfig:
    return parse_config(load_document(path), preset)


def load_document(path) -> dict:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path!r}: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a JSON object")
    return doc


def config_to_dict(cfg: RunConfig) -> dict:
    g, s = cfg.geometry, cfg.mode_spec
    doc = {
        "geometry": {
            "r_u_m": [float(v) for v in g.r_u],
            "r_d_m": [float(v) for v in g.r_d],
            "r_s_m": [float(v) for v in g.r_s],
            "atom_mass_kg": g.atom_mass,
            "source_mass_kg": g.source_mass,
            "interaction_time_s": g.interaction_time,
        },
        "mode_spec": {key: getattr(s, attr) for key, attr in SPEC_KEYS.items()},
        "output": cfg.output,
        "cutoff_preset": cfg.cutoff_preset,
        "oracle": {
            **{k: getattr(cfg.oracle.params, k) for k in ORACLE_PARAM_KEYS},
            "omega_t": cfg.oracle.omega_t,
            "truncation": cfg.oracle.truncation,
        },
    }
    if cfg.scenario is not None:
        doc["scenario"] = {"kind": cfg.scenario.kind.value, "loop_closure_time_s": cfg.scenario.loop_closure_time}
    if cfg.sweep is not None:
        doc["sweep"] = {k: list(v) for k, v in cfg.sweep.items()}
    if cfg.preset is not None:
        doc["preset"] = cfg.preset
    return doc

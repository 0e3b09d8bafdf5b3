"""Run configuration: a flat TOML document in engineering units.

Every key carries its unit as a suffix (``_fF``, ``_nH``, ``_GHz``, ...).
Omitted keys take the reference design values; unknown keys are rejected.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Optional, Tuple

import tomli
import tomli_w

from purcell_notch.errors import ConfigFileNotFound, ConfigParseError, ConfigValueError, UnknownConfigKey

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class RunConfig:
    # circuit
    c_sigma_fF: float = 65.0
    qubit_freq_GHz: float = 5.0
    l_j_nH: Optional[float] = None
    anharmonicity_MHz: float = -297.0
    c_r_fF: float = 500.0
    l_r_nH: float = 1.2
    z_env_ohm: float = 50.0
    cf_prime_fF: float = 345.0
    cq_prime_fF: float = 12.0
    ckappa_prime_fF: float = 15.4
    # design targets
    g_target_MHz: float = 150.0
    kappa_over_2chi_target: float = 1.0
    t1_thresholds_ms: Tuple[float, ...] = (1.0, 10.0)
    cf_min_fF: float = 0.05
    # sweeps
    sweep_start_GHz: float = 4.0
    sweep_stop_GHz: float = 6.5
    sweep_points: int = 2001
    cf_sweep_fF: Tuple[float, ...] = (0.0, 0.25, 0.5, 1.0, 2.0)
    cq_sweep_fF: Tuple[float, ...] = (5.0, 8.0, 11.1, 14.0, 17.0, 20.0)
    # readout
    kappa_MHz: float = 5.0
    chi_MHz: float = 2.5
    efficiency: float = 1.0
    nbar_grid: Tuple[float, ...] = tuple(0.5 * k for k in range(1, 61))
    tm_grid_us: Tuple[float, ...] = tuple(round(0.01 * k, 10) for k in range(1, 201))
    mc_points: Tuple[Tuple[float, float], ...] = ((1.0, 0.3), (1.0, 0.55), (1.0, 1.09), (5.0, 0.2), (25.0, 0.022))
    mc_n_traj: int = 100_000
    mc_samples: int = 50
    # run
    seed: int = 0
    convention: str = "paper"
    output_dir: str = "out"

    # ---- derived SI values
    @property
    def omega_ge(self):
        if self.l_j_nH is not None:
            return 1.0 / math.sqrt(self.l_j_nH * 1e-9 * self.c_sigma_fF * 1e-15)
        return TWO_PI * self.qubit_freq_GHz * 1e9

    @property
    def rate_convention(self):
        return "cyclic" if self.convention == "paper" else "angular"


_POSITIVE = {
    "c_sigma_fF", "qubit_freq_GHz", "l_j_nH", "c_r_fF", "l_r_nH", "z_env_ohm", "cf_prime_fF",
    "cq_prime_fF", "ckappa_prime_fF", "g_target_MHz", "kappa_over_2chi_target", "sweep_start_GHz",
    "sweep_stop_GHz", "sweep_points", "kappa_MHz", "chi_MHz", "efficiency", "mc_n_traj", "mc_samples",
}
_INT_FIELDS = {"sweep_points", "mc_n_traj", "mc_samples", "seed"}
_FIELDS = {f.name: f for f in fields(RunConfig)}


def _num(name, value):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigValueError(f"{name}: expected a number, got {value!r}", field=name)
    if not math.isfinite(value):
        raise ConfigValueError(f"{name}: must be finite", field=name)
    return value


def _coerce(name, value):
    if name in _INT_FIELDS:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigValueError(f"{name}: expected an integer, got {value!r}", field=name)
        if name != "seed" and value <= 0 or name == "seed" and value < 0:
            raise ConfigValueError(f"{name}: must be positive", field=name)
        return value
    if name in ("convention", "output_dir"):
        if not isinstance(value, str):
            raise ConfigValueError(f"{name}: expected a string", field=name)
        if name == "convention" and value not in ("paper", "angular"):
            raise ConfigValueError(f"{name}: must be 'paper' or 'angular', got {value!r}", field=name)
        return value
    if name == "mc_points":
        if not isinstance(value, (list, tuple)) or not value:
            raise ConfigValueError(f"{name}: expected a list of [nbar, t_m_us] pairs", field=name)
        pts = []
        for p in value:
            if not isinstance(p, (list, tuple)) or len(p) != 2:
                raise ConfigValueError(f"{name}: each entry must be [nbar, t_m_us]", field=name)
            nb, tm = (float(_num(name, x)) for x in p)
            if nb < 0 or tm <= 0:
                raise ConfigValueError(f"{name}: need nbar >= 0 and t_m_us > 0", field=name)
            pts.append((nb, tm))
        return tuple(pts)
    if name.endswith(("_ms", "_fF", "_grid", "_us")) and isinstance(_FIELDS[name].default, tuple):
        if not isinstance(value, (list, tuple)) or not value:
            raise ConfigValueError(f"{name}: expected a non-empty list", field=name)
        vals = tuple(float(_num(name, x)) for x in value)
        if any(v < 0 for v in vals):
            raise ConfigValueError(f"{name}: values must be non-negative", field=name)
        if name in ("nbar_grid", "tm_grid_us") and any(b <= a for a, b in zip(vals, vals[1:])):
            raise ConfigValueError(f"{name}: must be strictly increasing", field=name)
        if name == "t1_thresholds_ms" and any(v <= 0 for v in vals):
            raise ConfigValueError(f"{name}: thresholds must be positive", field=name)
        return vals
    v = float(_num(name, value))
    if name in _POSITIVE and v <= 0:
        raise ConfigValueError(f"{name}: must be positive, got {value!r}", field=name)
    if name == "anharmonicity_MHz" and v >= 0:
        raise ConfigValueError(f"{name}: transmon anharmonicity must be negative", field=name)
    if name == "cf_min_fF" and v < 0:
        raise ConfigValueError(f"{name}: must be non-negative", field=name)
    if name == "efficiency" and v > 1:
        raise ConfigValueError(f"{name}: must lie in (0, 1]", field=name)
    return v


def from_mapping(doc: dict) -> RunConfig:
    unknown = sorted(set(doc) - set(_FIELDS))
    if unknown:
        raise UnknownConfigKey(f"unknown configuration key(s): {', '.join(unknown)}", field=unknown[0])
    values = {k: _coerce(k, v) for k, v in doc.items()}
    cfg = RunConfig(**values)
    if cfg.sweep_stop_GHz <= cfg.sweep_start_GHz:
        raise ConfigValueError("sweep_stop_GHz must exceed sweep_start_GHz", field="sweep_stop_GHz")
    if cfg.l_j_nH is not None:
        implied = cfg.omega_ge / TWO_PI / 1e9
        if "qubit_freq_GHz" not in doc:
            cfg = replace(cfg, qubit_freq_GHz=implied)
        elif abs(implied - cfg.qubit_freq_GHz) > 1e-9 * cfg.qubit_freq_GHz:
            raise ConfigValueError("l_j_nH and qubit_freq_GHz disagree; give only one", field="l_j_nH")
    return cfg


def parse_config(path) -> RunConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigFileNotFound(f"configuration file not found: {path}")
    try:
        doc = tomli.loads(path.read_text())
    except (tomli.TOMLDecodeError, UnicodeDecodeError) as exc:
        raise ConfigParseError(f"{path}: {exc}") from exc
    return from_mapping(doc)


def to_mapping(cfg: RunConfig) -> dict:
    doc = {}
    for k, v in asdict(cfg).items():
        if v is None:
            continue
        if k == "mc_points":
            v = [list(p) for p in v]
        elif isinstance(v, tuple):
            v = list(v)
        doc[k] = v
    return doc


def serialize(cfg: RunConfig) -> str:
    return tomli_w.dumps(to_mapping(cfg))


def loads(text: str) -> RunConfig:
    try:
        doc = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ConfigParseError(str(exc)) from exc
    return from_mapping(doc)


def with_overrides(cfg: RunConfig, **kw) -> RunConfig:
    kw = {k: v for k, v in kw.items() if v is not None}
    return from_mapping({**to_mapping(cfg), **kw}) if kw else cfg


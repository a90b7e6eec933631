"""Experiment configuration: one TOML file drives every subcommand.

SI configs are converted to the internal natural-unit system (eps0 = mu0 =
c = 1) once, at load time; the scales used are recorded so outputs can be
converted back at the CLI boundary.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .diffraction import SlitGeometry, SourceSpectrum
from .medium import ConstantScalar, Drude, Lorentz, MediumModel, RadialBumpProfile, Separable, Vacuum
from .numerics import QuadratureSpec

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "UnitScales",
    "config_sha256",
    "load_config",
]

SPEED_OF_LIGHT_SI = 2.99792458e8
HBAR_SI = 1.054571817e-34


class ConfigError(ValueError):
    """Configuration file is invalid; the message names the offending field."""


@dataclass(frozen=True)
class UnitScales:
    """Multipliers converting internal natural-unit values to config units."""

    system: str = "natural"
    length: float = 1.0
    angular_frequency: float = 1.0
    action: float = 1.0

    def as_dict(self) -> dict:
        return {
            "system": self.system,
            "length": self.length,
            "angular_frequency": self.angular_frequency,
            "action": self.action,
        }


@dataclass(frozen=True)
class SweepSettings:
    alphas: tuple
    betas: tuple
    omega_c: float
    x_c: np.ndarray
    kind: str
    lam: object  # "resonant" | "zero" | complex


@dataclass(frozen=True)
class SearchSettings:
    omega_min: float
    omega_max: float
    n_scan: int
    tolerance: float
    x_samples: int
    kind: str


@dataclass(frozen=True)
class SamplingSettings:
    n_events: int
    action_quantum: object  # "auto" | float
    seed: int
    bins: int
    chunk_size: int
    kind: str


@dataclass(frozen=True)
class GridSettings:
    omega_points: int
    omega_span_sigmas: float


@dataclass(frozen=True)
class ExperimentConfig:
    path: Path
    sha256: str
    scales: UnitScales
    medium: MediumModel
    geometry: SlitGeometry
    spectrum: SourceSpectrum
    amplitude: float
    grids: GridSettings
    quadrature: QuadratureSpec
    sweep: SweepSettings
    search: SearchSettings
    sampling: SamplingSettings
    conservation_functionals: tuple
    verify_tolerance: float | None
    output_dir: Path


def config_sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


class _Section:
    """Typed accessor over one TOML table with field-qualified errors."""

    def __init__(self, name: str, table: dict):
        self.name = name
        self.table = table or {}

    def get(self, key, kind, default=None, required=False):
        if key not in self.table:
            if required:
                raise ConfigError(f"{self.name}.{key}: required field is missing")
            return default
        value = self.table[key]
        if kind is float and isinstance(value, int) and not isinstance(value, bool):
            value = float(value)
        if kind is int and isinstance(value, bool):
            raise ConfigError(f"{self.name}.{key}: expected an integer")
        if not isinstance(value, kind):
            raise ConfigError(
                f"{self.name}.{key}: expected {kind.__name__}, got {type(value).__name__}")
        return value

    def positive(self, key, kind=float, default=None, required=False):
        value = self.get(key, kind, default=default, required=required)
        if value is not None and not (value > 0 and math.isfinite(value)):
            raise ConfigError(f"{self.name}.{key}: must be positive, got {value}")
        return value

    def nonnegative(self, key, kind=float, default=None, required=False):
        value = self.get(key, kind, default=default, required=required)
        if value is not None and not (value >= 0 and math.isfinite(value)):
            raise ConfigError(f"{self.name}.{key}: must be >= 0, got {value}")
        return value


def _positive_list(section: _Section, key: str) -> tuple:
    raw = section.get(key, list, default=[])
    out = []
    for i, v in enumerate(raw):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"{section.name}.{key}[{i}]: expected a number")
        v = float(v)
        if not (v > 0 and math.isfinite(v)):
            raise ConfigError(f"{section.name}.{key}[{i}]: must be positive, got {v}")
        out.append(v)
    return tuple(out)


def _vector3(section: _Section, key: str, default) -> np.ndarray:
    raw = section.get(key, list, default=None)
    if raw is None:
        return np.asarray(default, dtype=float)
    if len(raw) != 3 or any(isinstance(v, bool) or not isinstance(v, (int, float))
                            for v in raw):
        raise ConfigError(f"{section.name}.{key}: expected a list of 3 numbers")
    return np.asarray([float(v) for v in raw], dtype=float)


def _build_response(name: str, table: dict):
    section = _Section(name, table)
    kind = section.get("kind", str, default="vacuum")
    try:
        if kind == "vacuum":
            return Vacuum()
        if kind == "constant":
            return ConstantScalar(value=section.positive("value", required=True))
        if kind == "drude":
            return Drude(omega_p=section.positive("omega_p", required=True),
                         gamma=section.nonnegative("gamma", default=0.0))
        if kind == "lorentz":
            return Lorentz(omega0=section.positive("omega0", required=True),
                           delta_eps=section.get("delta_eps", float, required=True),
                           gamma=section.nonnegative("gamma", default=0.0))
        if kind == "separable":
            profile = RadialBumpProfile(
                center=_vector3(section, "profile_center", (0.0, 0.0, 0.0)),
                radius=section.positive("profile_radius", required=True),
                height=section.get("profile_height", float, default=1.0))
            base = _build_response(f"{name}.base", section.get("base", dict, default={}))
            return Separable(profile=profile, base=base)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"{name}: {exc}") from exc
    raise ConfigError(f"{name}.kind: unknown medium kind {kind!r}")


def _unit_scales(section: _Section, spectrum_table: dict) -> UnitScales:
    system = section.get("system", str, default="natural")
    if system == "natural":
        return UnitScales()
    if system != "si":
        raise ConfigError(f"units.system: expected 'natural' or 'si', got {system!r}")
    omega0 = _Section("spectrum", spectrum_table).positive("omega_center", required=True)
    tau = 1.0 / omega0
    return UnitScales(system="si", length=SPEED_OF_LIGHT_SI * tau,
                      angular_frequency=omega0, action=HBAR_SI)


def load_config(path) -> ExperimentConfig:
    """Parse and validate a TOML experiment file into natural-unit settings."""
    path = Path(path)
    try:
        raw = tomllib.loads(path.read_text())
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc

    scales = _unit_scales(_Section("units", raw.get("units", {})),
                          raw.get("spectrum", {}))
    inv_len = 1.0 / scales.length
    inv_omega = 1.0 / scales.angular_frequency

    geom = _Section("geometry", raw.get("geometry", {}))
    try:
        geometry = SlitGeometry(
            slit_separation=geom.positive("slit_separation", required=True) * inv_len,
            slit_width=geom.positive("slit_width", required=True) * inv_len,
            screen_distance=geom.positive("screen_distance", required=True) * inv_len,
            screen_halfwidth=geom.positive("screen_halfwidth", required=True) * inv_len,
            screen_points=geom.positive("screen_points", int, default=1025))
    except ValueError as exc:
        raise ConfigError(f"geometry: {exc}") from exc

    spec = _Section("spectrum", raw.get("spectrum", {}))
    try:
        spectrum = SourceSpectrum(
            omega_center=spec.positive("omega_center", required=True) * inv_omega,
            omega_width=spec.positive("omega_width", required=True) * inv_omega)
    except ValueError as exc:
        raise ConfigError(f"spectrum: {exc}") from exc
    amplitude = spec.positive("amplitude", default=1.0)

    grids = _Section("grids", raw.get("grids", {}))
    grid_settings = GridSettings(
        omega_points=grids.positive("omega_points", int, default=129),
        omega_span_sigmas=grids.positive("omega_span_sigmas", default=5.0))
    if grid_settings.omega_points < 2:
        raise ConfigError("grids.omega_points: need at least 2 points")

    quad = _Section("quadrature", raw.get("quadrature", {}))
    try:
        quadrature = QuadratureSpec(
            rel_tol=quad.positive("rel_tol", default=1e-10),
            abs_tol=quad.positive("abs_tol", default=1e-14),
            max_panels=quad.positive("max_panels", int, default=1_000_000))
    except ValueError as exc:
        raise ConfigError(f"quadrature: {exc}") from exc

    medium = MediumModel(
        epsilon=_build_response("medium", raw.get("medium", {})),
        mu=_build_response("medium.mu", raw.get("medium", {}).get("mu", {})))

    sweep = _Section("sweep", raw.get("sweep", {}))
    lam_raw = sweep.table.get("lambda", "resonant")
    if isinstance(lam_raw, str):
        if lam_raw not in ("resonant", "zero"):
            raise ConfigError(
                f"sweep.lambda: expected 'resonant', 'zero', or [re, im], got {lam_raw!r}")
        lam = lam_raw
    elif isinstance(lam_raw, list) and len(lam_raw) == 2:
        lam = complex(float(lam_raw[0]), float(lam_raw[1]))
    else:
        raise ConfigError("sweep.lambda: expected 'resonant', 'zero', or [re, im]")
    sweep_kind = sweep.get("kind", str, default="electric")
    if sweep_kind not in ("electric", "magnetic"):
        raise ConfigError(f"sweep.kind: expected 'electric' or 'magnetic', got {sweep_kind!r}")
    alpha_scale = scales.length ** 2  # config units 1/m^2 -> dimensionless exponent
    beta_scale = scales.angular_frequency ** 2  # config units s^2
    sweep_settings = SweepSettings(
        alphas=tuple(a * alpha_scale for a in _positive_list(sweep, "alphas")),
        betas=tuple(b * beta_scale for b in _positive_list(sweep, "betas")),
        omega_c=sweep.positive("omega_c", default=spectrum.omega_center
                               * scales.angular_frequency) * inv_omega,
        x_c=_vector3(sweep, "x_c", (0.0, 0.0, 0.0)) * inv_len,
        kind=sweep_kind,
        lam=lam)

    search = _Section("search", raw.get("search", {}))
    search_kind = search.get("kind", str, default="electric")
    if search_kind not in ("electric", "magnetic"):
        raise ConfigError(f"search.kind: expected 'electric' or 'magnetic', got {search_kind!r}")
    search_settings = SearchSettings(
        omega_min=search.positive("omega_min", default=0.5
                                  * spectrum.omega_center * scales.angular_frequency) * inv_omega,
        omega_max=search.positive("omega_max", default=1.5
                                  * spectrum.omega_center * scales.angular_frequency) * inv_omega,
        n_scan=search.positive("n_scan", int, default=2048),
        tolerance=search.positive("tolerance", default=1e-8),
        x_samples=search.positive("x_samples", int, default=5),
        kind=search_kind)
    if not search_settings.omega_min < search_settings.omega_max:
        raise ConfigError("search.omega_min must be below search.omega_max")

    sampling = _Section("sampling", raw.get("sampling", {}))
    quantum_raw = sampling.table.get("action_quantum", "auto")
    if isinstance(quantum_raw, str):
        if quantum_raw != "auto":
            raise ConfigError(
                f"sampling.action_quantum: expected 'auto' or a positive number, "
                f"got {quantum_raw!r}")
        quantum = "auto"
    elif isinstance(quantum_raw, bool) or not isinstance(quantum_raw, (int, float)):
        raise ConfigError("sampling.action_quantum: expected 'auto' or a positive number")
    else:
        quantum = float(quantum_raw) / scales.action
        if not (quantum > 0 and math.isfinite(quantum)):
            raise ConfigError(
                f"sampling.action_quantum: must be positive, got {quantum_raw}")
    sampling_kind = sampling.get("kind", str, default="electric")
    if sampling_kind not in ("electric", "magnetic"):
        raise ConfigError(
            f"sampling.kind: expected 'electric' or 'magnetic', got {sampling_kind!r}")
    sampling_settings = SamplingSettings(
        n_events=sampling.nonnegative("n_events", int, default=100_000),
        action_quantum=quantum,
        seed=sampling.nonnegative("seed", int, default=42),
        bins=sampling.positive("bins", int, default=64),
        chunk_size=sampling.positive("chunk_size", int, default=8192),
        kind=sampling_kind)
    if sampling_settings.n_events == 0 and quantum == "auto":
        raise ConfigError(
            "sampling.n_events: 0 (budget mode) requires an explicit "
            "sampling.action_quantum")

    cons = _Section("conservation", raw.get("conservation", {}))
    functionals = tuple(cons.get(
        "functionals", list,
        default=["one", "x", "x_squared", "central_fringe", "omega", "x_omega"]))
    known = {"one", "x", "x_squared", "central_fringe", "omega", "x_omega"}
    for i, f_name in enumerate(functionals):
        if f_name not in known:
            raise ConfigError(
                f"conservation.functionals[{i}]: unknown functional {f_name!r}; "
                f"choose from {sorted(known)}")

    verify = _Section("verify", raw.get("verify", {}))
    verify_tolerance = verify.get("tolerance", float, default=None)
    if verify_tolerance is not None and not (verify_tolerance > 0):
        raise ConfigError(
            f"verify.tolerance: must be positive, got {verify_tolerance}")

    out = _Section("output", raw.get("output", {}))
    output_dir = Path(out.get("directory", str, default="out"))

    return ExperimentConfig(
        path=path,
        sha256=config_sha256(path),
        scales=scales,
        medium=medium,
        geometry=geometry,
        spectrum=spectrum,
        amplitude=amplitude,
        grids=grid_settings,
        quadrature=quadrature,
        sweep=sweep_settings,
        search=search_settings,
        sampling=sampling_settings,
        conservation_functionals=functionals,
        verify_tolerance=verify_tolerance,
        output_dir=output_dir,
    )

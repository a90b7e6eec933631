import copy
import math

import pytest

from essmodes.collapse import born_density
from essmodes.diffraction import SlitGeometry, SourceSpectrum, synthesize_field, total_action

WAVELENGTH = 2.0 * math.pi  # omega_center = 1 in natural units

# Fast variant of the shipped default config, for CLI round trips.
BASE_CONFIG = {
    "units": {"system": "natural"},
    "medium": {"kind": "drude", "omega_p": 1.0, "gamma": 0.0},
    "geometry": {
        "slit_separation": 30 * WAVELENGTH,
        "slit_width": 5 * WAVELENGTH,
        "screen_distance": 1000 * WAVELENGTH,
        "screen_halfwidth": 1000.0,
        "screen_points": 257,
    },
    "spectrum": {"omega_center": 1.0, "omega_width": 0.02, "amplitude": 1.0},
    "grids": {"omega_points": 65, "omega_span_sigmas": 5.0},
    "sweep": {
        "alphas": [1.0],
        "betas": [1e2, 1e4],
        "omega_c": 1.0,
        "x_c": [0.0, 0.0, 1000 * WAVELENGTH],
        "kind": "electric",
        "lambda": "resonant",
    },
    "search": {"omega_min": 0.5, "omega_max": 1.5, "n_scan": 1024,
               "tolerance": 1e-8, "x_samples": 3},
    "sampling": {"n_events": 20000, "action_quantum": "auto", "seed": 42,
                 "bins": 32, "chunk_size": 4096, "kind": "electric"},
    "conservation": {"functionals": ["one", "x", "x_squared", "central_fringe",
                                     "omega", "x_omega"]},
    "output": {"directory": "out"},
}


def _toml_value(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, str):
        return f'"{v}"'
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_toml_value(item) for item in v) + "]"
    return repr(v)


def dump_toml(tables: dict) -> str:
    lines = []
    for section, table in tables.items():
        lines.append(f"[{section}]")
        for key, value in table.items():
            lines.append(f"{key} = {_toml_value(value)}")
        lines.append("")
    return "\n".join(lines)


def write_config(tmp_path, overrides=None, name="config.toml"):
    """Write BASE_CONFIG with {section: {key: value}} overrides applied.

    A value of None deletes the key; an override section replaces keys only.
    """
    tables = copy.deepcopy(BASE_CONFIG)
    for section, entries in (overrides or {}).items():
        table = tables.setdefault(section, {})
        for key, value in entries.items():
            if value is None:
                table.pop(key, None)
            else:
                table[key] = value
    path = tmp_path / name
    path.write_text(dump_toml(tables))
    return path


@pytest.fixture(scope="session")
def default_geometry():
    return SlitGeometry(
        slit_separation=30 * WAVELENGTH,
        slit_width=5 * WAVELENGTH,
        screen_distance=1000 * WAVELENGTH,
        screen_halfwidth=1000.0,
        screen_points=1025,
    )


@pytest.fixture(scope="session")
def default_spectrum():
    return SourceSpectrum(omega_center=1.0, omega_width=0.02)


@pytest.fixture(scope="session")
def default_field(default_geometry, default_spectrum):
    return synthesize_field(default_geometry, default_spectrum)


@pytest.fixture(scope="session")
def default_density(default_field):
    n = 100_000
    total = total_action(default_field)
    return born_density(default_field, n, total / n)

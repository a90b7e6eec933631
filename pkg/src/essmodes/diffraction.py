"""Far-field two-slit scalar amplitude on a detector screen.

The screen is one-dimensional; the synthesized table holds the complex
amplitude over screen coordinate and angular frequency.  Downstream sampling
consumes only the squared amplitude, so the simple analytic fringe model is
all that is needed here.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .numerics import Grid1D, trapezoid_weights

__all__ = [
    "NormalStateField",
    "SlitGeometry",
    "SourceSpectrum",
    "field_from_files",
    "field_to_files",
    "first_null_position",
    "synthesize_field",
    "total_action",
]


@dataclass(frozen=True)
class SlitGeometry:
    """Two-slit layout and screen description (lengths in current units)."""

    slit_separation: float
    slit_width: float
    screen_distance: float
    screen_halfwidth: float
    screen_points: int = 1025

    def __post_init__(self):
        if not (0 < self.slit_width < self.slit_separation):
            raise ValueError(
                f"need 0 < slit_width < slit_separation, got "
                f"({self.slit_width}, {self.slit_separation})")
        if not (self.screen_distance > 0 and self.screen_halfwidth > 0):
            raise ValueError("screen distance and halfwidth must be positive")
        if self.screen_points < 16:
            raise ValueError(f"screen resolution must be >= 16, got {self.screen_points}")
        if self.screen_halfwidth / self.screen_distance > 0.2:
            warnings.warn(
                "screen extends beyond 0.2 of the screen distance; the "
                "paraxial fringe model degrades there", stacklevel=2)

    def screen_grid(self) -> Grid1D:
        return Grid1D.uniform(-self.screen_halfwidth, self.screen_halfwidth,
                              self.screen_points)


@dataclass(frozen=True)
class SourceSpectrum:
    """Gaussian source band: the squared amplitude has standard deviation
    omega_width around omega_center."""

    omega_center: float
    omega_width: float
    shape: str = "gaussian"

    def __post_init__(self):
        if self.shape != "gaussian":
            raise ValueError(f"unsupported spectrum shape {self.shape!r}")
        if not (self.omega_center > 0 and math.isfinite(self.omega_center)):
            raise ValueError(f"omega_center must be positive, got {self.omega_center}")
        if not (self.omega_width > 0 and math.isfinite(self.omega_width)):
            raise ValueError(f"omega_width must be positive, got {self.omega_width}")
        if self.omega_center - 5.0 * self.omega_width <= 0:
            raise ValueError(
                "spectrum must be effectively positive-frequency: "
                "omega_center - 5 omega_width must exceed 0")

    def default_grid(self, n: int = 129, span_sigmas: float = 5.0) -> Grid1D:
        w = span_sigmas * self.omega_width
        return Grid1D.uniform(self.omega_center - w, self.omega_center + w, n)


@dataclass(frozen=True)
class NormalStateField:
    """Complex amplitude table over (screen coordinate, angular frequency)."""

    x: np.ndarray
    omega: np.ndarray
    amplitude: np.ndarray
    geometry: SlitGeometry
    spectrum: SourceSpectrum
    amplitude_scale: float = 1.0
    light_speed: float = 1.0

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        omega = np.asarray(self.omega, dtype=float)
        amp = np.asarray(self.amplitude, dtype=complex)
        for name, nodes in (("x", x), ("omega", omega)):
            if nodes.ndim != 1 or nodes.size < 2 or not np.all(np.diff(nodes) > 0):
                raise ValueError(f"{name} grid must be strictly increasing with >= 2 nodes")
        if amp.shape != (x.size, omega.size):
            raise ValueError(
                f"amplitude shape {amp.shape} does not match grids "
                f"({x.size}, {omega.size})")
        if not np.all(np.isfinite(amp.view(float))):
            raise ValueError("amplitude must be finite")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "amplitude", amp)

    def intensity(self) -> np.ndarray:
        return np.abs(self.amplitude) ** 2


def _sinc(u: np.ndarray) -> np.ndarray:
    # np.sinc uses the normalized convention sin(pi u)/(pi u).
    return np.sinc(u / math.pi)


def synthesize_field(geometry: SlitGeometry, spectrum: SourceSpectrum,
                     x_grid: Grid1D | None = None,
                     omega_grid: Grid1D | None = None,
                     amplitude: float = 1.0,
                     light_speed: float = 1.0) -> NormalStateField:
    """Far-field fringe amplitude A S(omega) cos(...) sinc(...) on the grids.

    S is the Gaussian spectral envelope exp(-(omega - omega_center)^2 /
    (4 omega_width^2)), so the squared amplitude carries a Gaussian of
    standard deviation omega_width.
    """
    if x_grid is None:
        x_grid = geometry.screen_grid()
    if omega_grid is None:
        omega_grid = spectrum.default_grid()
    x = x_grid.nodes[:, None]
    omega = omega_grid.nodes[None, :]
    envelope = np.exp(-((omega - spectrum.omega_center) ** 2)
                      / (4.0 * spectrum.omega_width ** 2))
    arg_scale = omega * x / (2.0 * light_speed * geometry.screen_distance)
    table = (amplitude * envelope
             * np.cos(geometry.slit_separation * arg_scale)
             * _sinc(geometry.slit_width * arg_scale))
    return NormalStateField(
        x=x_grid.nodes, omega=omega_grid.nodes, amplitude=table.astype(complex),
        geometry=geometry, spectrum=spectrum, amplitude_scale=amplitude,
        light_speed=light_speed)


def total_action(f: NormalStateField, eps0: float = 1.0) -> float:
    """eps0 times the grid integral of the squared amplitude.

    Uses the trapezoid rule on both axes, i.e. the exact integral of the
    bilinear interpolant -- the same measure the collapse sampler draws from.
    """
    wx = trapezoid_weights(f.x)
    ww = trapezoid_weights(f.omega)
    return float(eps0 * wx @ f.intensity() @ ww)


def first_null_position(geometry: SlitGeometry, omega: float,
                        light_speed: float = 1.0, order: int = 0) -> float:
    """Screen coordinate of the (order-th) interference null at one frequency."""
    return ((2 * order + 1) * math.pi * light_speed * geometry.screen_distance
            / (omega * geometry.slit_separation))


def field_to_files(f: NormalStateField, json_path, csv_path,
                   meta: dict | None = None) -> None:
    """Persist a field as a JSON header plus a CSV amplitude table.

    CSV columns are x, omega, re, im with shortest round-trip float
    formatting, one row per (x, omega) pair in row-major order.  Extra
    metadata (e.g. config hash and seed) goes into the JSON header.
    """
    header = {
        "geometry": {
            "slit_separation": f.geometry.slit_separation,
            "slit_width": f.geometry.slit_width,
            "screen_distance": f.geometry.screen_distance,
            "screen_halfwidth": f.geometry.screen_halfwidth,
            "screen_points": f.geometry.screen_points,
        },
        "spectrum": {
            "omega_center": f.spectrum.omega_center,
            "omega_width": f.spectrum.omega_width,
            "shape": f.spectrum.shape,
        },
        "amplitude_scale": f.amplitude_scale,
        "light_speed": f.light_speed,
        "x": [repr(v) for v in f.x.tolist()],
        "omega": [repr(v) for v in f.omega.tolist()],
    }
    if meta:
        header.update(meta)
    with open(json_path, "w") as fh:
        json.dump(header, fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(csv_path, "w") as fh:
        fh.write("x,omega,re,im\n")
        omegas = f.omega.tolist()
        re_tab = f.amplitude.real.tolist()
        im_tab = f.amplitude.imag.tolist()
        for i, xv in enumerate(f.x.tolist()):
            for j, wv in enumerate(omegas):
                fh.write(f"{xv!r},{wv!r},{re_tab[i][j]!r},{im_tab[i][j]!r}\n")


def field_from_files(json_path, csv_path) -> NormalStateField:
    """Inverse of field_to_files; round-trips every float exactly."""
    with open(json_path) as fh:
        header = json.load(fh)
    geometry = SlitGeometry(**header["geometry"])
    spectrum = SourceSpectrum(**header["spectrum"])
    x = np.array([float(v) for v in header["x"]])
    omega = np.array([float(v) for v in header["omega"]])
    table = np.zeros((x.size, omega.size), dtype=complex)
    with open(csv_path) as fh:
        names = fh.readline().strip().split(",")
        if names != ["x", "omega", "re", "im"]:
            raise ValueError(f"unexpected amplitude CSV columns {names}")
        for idx, line in enumerate(fh):
            xv, wv, re, im = line.rstrip("\n").split(",")
            i, j = divmod(idx, omega.size)
            if float(xv) != x[i] or float(wv) != omega[j]:
                raise ValueError(f"amplitude CSV row {idx} out of order")
            table[i, j] = complex(float(re), float(im))
    if idx + 1 != x.size * omega.size:
        raise ValueError("amplitude CSV row count does not match grids")
    return NormalStateField(
        x=x, omega=omega, amplitude=table, geometry=geometry, spectrum=spectrum,
        amplitude_scale=header["amplitude_scale"], light_speed=header["light_speed"])

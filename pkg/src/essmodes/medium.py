"""Permittivity/permeability models and the resonance-locus finder.

A medium pairs an electric response with a magnetic one (unity by default).
Responses are evaluated in the frequency domain; the resonance finder
locates real frequencies where |omega * response| drops below a tolerance,
sampling the spatial locus as a finite point set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

__all__ = [
    "ConstantScalar",
    "Drude",
    "Lorentz",
    "MediumModel",
    "MediumSingularError",
    "RadialBumpProfile",
    "ResonancePoint",
    "Separable",
    "Vacuum",
    "eval_eps_hat",
    "eval_mu_hat",
    "find_essential_resonance",
    "omega_times_response",
    "swap_eps_mu",
]


class MediumSingularError(ValueError):
    """Response evaluated at a pole of the dispersion model."""


@dataclass(frozen=True)
class Vacuum:
    """Unit relative response."""


@dataclass(frozen=True)
class ConstantScalar:
    """Non-dispersive relative response."""

    value: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.value) and self.value > 0):
            raise ValueError(f"constant response must be positive, got {self.value}")


@dataclass(frozen=True)
class Drude:
    """Free-carrier dispersion: 1 - omega_p^2 / (omega^2 + i gamma omega)."""

    omega_p: float
    gamma: float = 0.0

    def __post_init__(self):
        if not (self.omega_p >= 0 and math.isfinite(self.omega_p)):
            raise ValueError(f"plasma frequency must be >= 0, got {self.omega_p}")
        if not (self.gamma >= 0 and math.isfinite(self.gamma)):
            raise ValueError(f"collision rate must be >= 0, got {self.gamma}")


@dataclass(frozen=True)
class Lorentz:
    """Bound-resonance dispersion:
    1 + delta_eps omega0^2 / (omega0^2 - omega^2 - i gamma omega)."""

    omega0: float
    delta_eps: float
    gamma: float = 0.0

    def __post_init__(self):
        if not (self.omega0 >= 0 and math.isfinite(self.omega0)):
            raise ValueError(f"resonance frequency must be >= 0, got {self.omega0}")
        if not math.isfinite(self.delta_eps):
            raise ValueError("oscillator strength must be finite")
        if not (self.gamma >= 0 and math.isfinite(self.gamma)):
            raise ValueError(f"damping rate must be >= 0, got {self.gamma}")


@dataclass(frozen=True)
class RadialBumpProfile:
    """Smooth compactly supported radial profile exp(1 - 1/(1 - rho^2)).

    rho = |x - center| / radius; the profile is height at the center and
    identically zero outside the support radius.
    """

    center: np.ndarray = field(default_factory=lambda: np.zeros(3))
    radius: float = 1.0
    height: float = 1.0

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float)
        if c.shape != (3,) or not np.all(np.isfinite(c)):
            raise ValueError("profile center must be a finite 3-vector")
        object.__setattr__(self, "center", c)
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise ValueError(f"support radius must be positive, got {self.radius}")
        if not math.isfinite(self.height):
            raise ValueError("profile height must be finite")

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        u = x - self.center
        rho2 = np.sum(u * u, axis=-1) / (self.radius * self.radius)
        out = np.zeros_like(rho2)
        inside = rho2 < 1.0
        out[inside] = self.height * np.exp(1.0 - 1.0 / (1.0 - rho2[inside]))
        return out


@dataclass(frozen=True)
class Separable:
    """Spatial modulation of a base susceptibility: 1 + s(x) (base(omega) - 1)."""

    profile: RadialBumpProfile
    base: object

    def __post_init__(self):
        if isinstance(self.base, Separable):
            raise ValueError("separable responses cannot nest")


_UNIFORM_KINDS = (Vacuum, ConstantScalar, Drude, Lorentz)


def _eval_uniform(r, omega):
    """Frequency response of a spatially uniform variant (complex array)."""
    omega = np.asarray(omega, dtype=float)
    if isinstance(r, Vacuum):
        return np.ones(omega.shape, dtype=complex)
    if isinstance(r, ConstantScalar):
        return np.full(omega.shape, complex(r.value))
    if isinstance(r, Drude):
        if np.any(omega == 0.0):
            raise MediumSingularError(
                "Drude response has a pole at omega = 0"
                + ("" if r.gamma else " (gamma = 0)"))
        return 1.0 - r.omega_p ** 2 / (omega * omega + 1j * r.gamma * omega)
    if isinstance(r, Lorentz):
        denom = r.omega0 ** 2 - omega * omega - 1j * r.gamma * omega
        if np.any(denom == 0.0):
            raise MediumSingularError("Lorentz response evaluated at its pole")
        return 1.0 + r.delta_eps * r.omega0 ** 2 / denom
    raise TypeError(f"unsupported response variant {type(r).__name__}")


def _eval_response(r, x, omega):
    if isinstance(r, _UNIFORM_KINDS):
        return _eval_uniform(r, omega)
    if isinstance(r, Separable):
        chi = _eval_uniform(r.base, omega) - 1.0
        return 1.0 + r.profile(x) * chi
    raise TypeError(f"unsupported response variant {type(r).__name__}")


def is_uniform(r) -> bool:
    return isinstance(r, _UNIFORM_KINDS)


@dataclass(frozen=True)
class MediumModel:
    """Electric and magnetic relative responses of the medium."""

    epsilon: object = field(default_factory=Vacuum)
    mu: object = field(default_factory=Vacuum)


def eval_eps_hat(m: MediumModel, x, omega):
    """Complex relative permittivity at (x, omega)."""
    return _eval_response(m.epsilon, x, omega)


def eval_mu_hat(m: MediumModel, x, omega):
    """Complex relative permeability at (x, omega)."""
    return _eval_response(m.mu, x, omega)


def swap_eps_mu(m: MediumModel) -> MediumModel:
    return MediumModel(epsilon=m.mu, mu=m.epsilon)


def omega_times_response(r, x, omega):
    """Stable product omega * response(x, omega).

    For the Drude variant the product omega - omega_p^2/(omega + i gamma) is
    regular at omega = 0 once gamma > 0, unlike the response itself.
    """
    omega = np.asarray(omega, dtype=float)
    if isinstance(r, Drude):
        denom = omega + 1j * r.gamma
        if np.any(denom == 0.0):
            raise MediumSingularError("Drude response has a pole at omega = 0 (gamma = 0)")
        return omega - r.omega_p ** 2 / denom
    if isinstance(r, Separable):
        chi = omega_times_response(r.base, x, omega) - omega
        return omega + r.profile(x) * chi
    return omega * _eval_response(r, x, omega)


@dataclass(frozen=True)
class ResonancePoint:
    """One sampled point of the resonance locus with its achieved residual."""

    x_c: np.ndarray
    omega_c: float
    residual: float

    def __post_init__(self):
        x = np.asarray(self.x_c, dtype=float)
        if x.shape != (3,):
            raise ValueError("x_c must be a 3-vector")
        object.__setattr__(self, "x_c", x)
        if self.residual < 0:
            raise ValueError("residual magnitude cannot be negative")


def _refine_candidates(product_fn, omegas, scan):
    """Frequencies of refined local minima of |product_fn| on the scan grid."""
    found = []
    vals = np.abs(scan)
    vals = np.where(np.isfinite(vals), vals, np.inf)
    finite_imag = scan.imag[np.isfinite(scan.imag)]
    finite_real = scan.real[np.isfinite(scan.real)]
    # Sign-change refinement on the real part where the response is real:
    # this pins simple zeros to machine precision.
    real_axis = (finite_imag.size and np.max(np.abs(finite_imag))
                 <= 1e-13 * max(np.max(np.abs(finite_real)), 1.0))
    if real_axis:
        s = np.sign(scan.real)
        flips = np.nonzero(s[:-1] * s[1:] < 0)[0]
        for i in flips:
            try:
                root = brentq(lambda w: product_fn(np.asarray([w])).real[0],
                              omegas[i], omegas[i + 1], xtol=1e-300, rtol=8.9e-16)
            except (MediumSingularError, ValueError):
                continue  # bracket touches a pole; the true root has its own
            found.append(float(root))
        found.extend(float(omegas[i]) for i in np.nonzero(s == 0)[0])
    # Interior local minima of the magnitude (lossy media, no sign change).
    interior = np.nonzero((vals[1:-1] <= vals[:-2]) & (vals[1:-1] <= vals[2:]))[0] + 1
    for i in interior:
        lo, hi = omegas[i - 1], omegas[i + 1]
        try:
            res = minimize_scalar(
                lambda w: float(np.abs(product_fn(np.asarray([w]))[0])),
                bounds=(lo, hi), method="bounded",
                options={"xatol": 1e-14 * max(abs(hi), 1.0)})
        except MediumSingularError:
            continue
        found.append(float(res.x))
    return found


def find_essential_resonance(m: MediumModel, x_points, omega_range,
                             tolerance: float = 1e-8, n_scan: int = 2048,
                             kind: str = "electric") -> list[ResonancePoint]:
    """Sample the locus where |omega * response| falls below the tolerance.

    x_points is the spatial sampling of the search region (for spatially
    uniform media every point carries the same frequency roots, giving the
    representative locus sampling).  omega_range is a (lo, hi) interval of
    positive frequencies scanned with n_scan points before refinement.
    Returns an empty list when no candidate beats the tolerance.
    """
    if kind not in ("electric", "magnetic"):
        raise ValueError(f"kind must be 'electric' or 'magnetic', got {kind!r}")
    response = m.epsilon if kind == "electric" else m.mu
    lo, hi = float(omega_range[0]), float(omega_range[1])
    if not (0.0 < lo < hi):
        raise ValueError(f"omega_range must satisfy 0 < lo < hi, got ({lo}, {hi})")
    if n_scan < 8:
        raise ValueError("n_scan must be at least 8")
    x_points = np.atleast_2d(np.asarray(x_points, dtype=float))
    if x_points.shape[-1] != 3:
        raise ValueError("x_points must have shape (n, 3)")

    omegas = np.linspace(lo, hi, n_scan)
    spacing = omegas[1] - omegas[0]
    points: list[ResonancePoint] = []

    def locate(x):
        def product(w):
            return np.asarray(omega_times_response(response, x, w))

        with np.errstate(divide="ignore", invalid="ignore"):
            try:
                scan = product(omegas)
            except MediumSingularError:
                # A scan node sits exactly on a dispersion pole; evaluate
                # pointwise and mark the pole as unbounded.
                scan = np.empty(omegas.size, dtype=complex)
                for k, w in enumerate(omegas):
                    try:
                        scan[k] = product(np.asarray([w]))[0]
                    except MediumSingularError:
                        scan[k] = complex(np.inf, 0.0)
        roots = []
        for w in _refine_candidates(product, omegas, scan):
            if w <= 0.0:
                continue
            residual = float(np.abs(product(np.asarray([w]))[0]))
            if not (residual <= tolerance):
                continue
            if any(abs(w - prev) < 0.5 * spacing for prev, _ in roots):
                continue
            roots.append((w, residual))
        return roots

    if is_uniform(response):
        shared = locate(x_points[0])
        for w, residual in shared:
            for x in x_points:
                points.append(ResonancePoint(x_c=x.copy(), omega_c=w, residual=residual))
    else:
        for x in x_points:
            for w, residual in locate(x):
                points.append(ResonancePoint(x_c=x.copy(), omega_c=w, residual=residual))
    return points

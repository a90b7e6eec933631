"""Singular localized mode family and its verification helpers.

The spatial factor is a normalized vector Gaussian whose squared magnitude
approximates a 3D delta at its center as the concentration parameter grows;
the temporal factor plays the same role in the angular-frequency domain.
Their product is the localized mode the rest of the package consumes.

Note that the family has no limit in the square-integrable sense: as the
concentration grows all mass collapses toward a point while the norm stays
one, so no subsequence converges to a function.  Only squared-magnitude
integrals (norms, sift values, residual weights) have limits, and those are
what this module verifies numerically.

All functions are pure; parameter records are frozen dataclasses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .numerics import Grid1D, QuadratureSpec, integrate_1d

__all__ = [
    "EssentialModeParams",
    "MODE_TRANSFORM_PHASE",
    "SpatialModeParams",
    "TemporalModeParams",
    "curl_psi_residual",
    "curl_scale",
    "eval_phi",
    "eval_phi_hat",
    "eval_psi",
    "fourier_consistency",
    "fourier_transform_on_grid",
    "norm_sq_phi",
    "norm_sq_phi_hat",
    "norm_sq_psi",
    "sift_phi_hat",
    "sift_psi",
]

# Half-width of radial/spectral integration windows in units of the Gaussian
# scale; the omitted tail is below exp(-144), i.e. lost in double precision.
_WINDOW = 12.0


@dataclass(frozen=True)
class SpatialModeParams:
    """Concentration parameter (1/m^2) and 3D center of the spatial factor."""

    alpha: float
    center: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise ValueError(f"alpha must be positive and finite, got {self.alpha}")
        c = np.asarray(self.center, dtype=float)
        if c.shape != (3,) or not np.all(np.isfinite(c)):
            raise ValueError("center must be a finite 3-vector")
        object.__setattr__(self, "center", c)


@dataclass(frozen=True)
class TemporalModeParams:
    """Concentration parameter (s^2) and center angular frequency (rad/s)."""

    beta: float
    omega_center: float = 0.0

    def __post_init__(self):
        if not (self.beta > 0 and math.isfinite(self.beta)):
            raise ValueError(f"beta must be positive and finite, got {self.beta}")
        if not math.isfinite(self.omega_center):
            raise ValueError("omega_center must be finite")


@dataclass(frozen=True)
class EssentialModeParams:
    """Electric or magnetic localized mode: spatial times temporal factor."""

    kind: str
    spatial: SpatialModeParams
    temporal: TemporalModeParams

    def __post_init__(self):
        if self.kind not in ("electric", "magnetic"):
            raise ValueError(f"kind must be 'electric' or 'magnetic', got {self.kind!r}")


def eval_psi(p: SpatialModeParams, x) -> np.ndarray:
    """Vector spatial factor at points x of shape (..., 3); units m^(-3/2).

    Equals (2/3)^(1/2) pi^(-3/4) alpha^(5/4) (x - center)
    exp(-alpha |x - center|^2 / 2).
    """
    x = np.asarray(x, dtype=float)
    u = x - p.center
    r2 = np.sum(u * u, axis=-1, keepdims=True)
    amp = math.sqrt(2.0 / 3.0) * math.pi ** (-0.75) * p.alpha ** 1.25
    return amp * u * np.exp(-0.5 * p.alpha * r2)


def eval_phi(p: TemporalModeParams, t):
    """Complex temporal factor at times t; units s^(-1/2).

    Equals i sqrt(2) pi^(-1/4) beta^(-3/4) t
    exp(-t^2/(2 beta) - i omega_center t).
    """
    t = np.asarray(t, dtype=float)
    amp = 1j * math.sqrt(2.0) * math.pi ** (-0.25) * p.beta ** (-0.75)
    return amp * t * np.exp(-t * t / (2.0 * p.beta) - 1j * p.omega_center * t)


def eval_phi_hat(p: TemporalModeParams, omega):
    """Real spectral factor at angular frequencies omega; units s^(1/2).

    Equals sqrt(2) pi^(-1/4) beta^(3/4) (omega - omega_center)
    exp(-beta (omega - omega_center)^2 / 2).
    """
    omega = np.asarray(omega, dtype=float)
    u = omega - p.omega_center
    amp = math.sqrt(2.0) * math.pi ** (-0.25) * p.beta ** 0.75
    return amp * u * np.exp(-0.5 * p.beta * u * u)


def _psi_sq_radial_weight(alpha: float, r):
    """|psi|^2 as a function of radius (excluding the 4 pi r^2 measure)."""
    amp = (2.0 / 3.0) * math.pi ** (-1.5) * alpha ** 2.5
    return amp * r * r * np.exp(-alpha * r * r)


def norm_sq_psi(p: SpatialModeParams, spec: QuadratureSpec = QuadratureSpec()) -> float:
    """Numerical integral of |psi|^2 over R^3; equals 1 for every alpha."""
    r_max = _WINDOW / math.sqrt(p.alpha)
    value, _ = integrate_1d(
        lambda r: 4.0 * math.pi * r * r * _psi_sq_radial_weight(p.alpha, r),
        0.0, r_max, spec)
    return float(value)


def sift_psi(f, p: SpatialModeParams, spec: QuadratureSpec = QuadratureSpec(),
             radial: bool = False, gh_order: int = 48) -> float:
    """Integral of f(x) |psi(x)|^2 over R^3; tends to f(center) as alpha grows.

    f must accept arrays of shape (..., 3).  With radial=True, f is assumed to
    depend only on |x - center| and the integral reduces to one adaptive
    radial quadrature; otherwise a tensor Gauss-Hermite rule of order
    gh_order per axis covers the concentration region (node span is roughly
    the documented truncation box).
    """
    if radial:
        center = p.center

        def integrand(r):
            pts = np.zeros(r.shape + (3,))
            pts[..., 0] = r
            return (4.0 * math.pi * r * r * np.asarray(f(center + pts))
                    * _psi_sq_radial_weight(p.alpha, r))

        r_max = _WINDOW / math.sqrt(p.alpha)
        value, _ = integrate_1d(integrand, 0.0, r_max, spec)
        return float(value)

    nodes, weights = _hermgauss(gh_order)
    scale = 1.0 / math.sqrt(p.alpha)
    vx, vy, vz = np.meshgrid(nodes, nodes, nodes, indexing="ij")
    pts = np.stack([vx, vy, vz], axis=-1) * scale + p.center
    w3 = weights[:, None, None] * weights[None, :, None] * weights[None, None, :]
    v2 = vx * vx + vy * vy + vz * vz
    vals = np.asarray(f(pts))
    total = np.sum(w3 * v2 * vals)
    return float((2.0 / 3.0) * math.pi ** (-1.5) * total)


@lru_cache(maxsize=8)
def _hermgauss(order: int):
    return np.polynomial.hermite.hermgauss(order)


def _phi_hat_sq(p: TemporalModeParams, omega):
    h = eval_phi_hat(p, omega)
    return h * h


def norm_sq_phi(p: TemporalModeParams, spec: QuadratureSpec = QuadratureSpec()) -> float:
    """Numerical integral of |phi|^2 over time; equals 1 for every beta."""
    t_max = _WINDOW * math.sqrt(p.beta)
    value, _ = integrate_1d(lambda t: np.abs(eval_phi(p, t)) ** 2, -t_max, t_max, spec)
    return float(value)


def norm_sq_phi_hat(p: TemporalModeParams, spec: QuadratureSpec = QuadratureSpec()) -> float:
    """Numerical integral of phi_hat^2 over frequency; equals 1 for every beta."""
    w = _WINDOW / math.sqrt(p.beta)
    value, _ = integrate_1d(lambda omega: _phi_hat_sq(p, omega),
                            p.omega_center - w, p.omega_center + w, spec)
    return float(value)


def sift_phi_hat(g, p: TemporalModeParams,
                 spec: QuadratureSpec = QuadratureSpec()) -> float:
    """Integral of g(omega) phi_hat^2; tends to g(omega_center) as beta grows."""
    w = _WINDOW / math.sqrt(p.beta)
    value, _ = integrate_1d(lambda omega: np.asarray(g(omega)) * _phi_hat_sq(p, omega),
                            p.omega_center - w, p.omega_center + w, spec)
    return float(value)


# Global phase relating the e^{+i omega t} unitary transform of the temporal
# factor to the spectral factor.  Both odd-Gaussian factors contribute a
# factor i (one from the mode prefactor, one from the first-moment integral),
# so the transform equals minus the spectral factor; squared quantities are
# unaffected.  The opposite kernel sign instead mirrors the center frequency.
MODE_TRANSFORM_PHASE = -1.0


def fourier_transform_on_grid(p: TemporalModeParams, grid: Grid1D):
    """Discrete approximation of (2 pi)^(-1/2) int phi(t) e^{+i omega t} dt.

    Returns (omega, values) on the FFT frequency grid in ascending order.
    """
    dt = grid.spacing
    t = grid.nodes
    n = grid.n
    phi = eval_phi(p, t)
    omegas = 2.0 * math.pi * np.fft.fftfreq(n, d=dt)
    spectrum = (2.0 * math.pi) ** -0.5 * dt * n * np.fft.ifft(phi)
    spectrum *= np.exp(1j * omegas * t[0])
    order = np.argsort(omegas)
    return omegas[order], spectrum[order]


def fourier_consistency(p: TemporalModeParams, grid: Grid1D) -> float:
    """Max pointwise deviation between the grid transform and the spectral factor.

    The comparison target carries MODE_TRANSFORM_PHASE.  Raises ValueError if
    the grid is too short to contain the temporal envelope or too coarse to
    resolve the oscillation.
    """
    sigma_t = math.sqrt(p.beta)
    if grid.span < 12.0 * sigma_t:
        raise ValueError(
            f"grid span {grid.span:.3g} is below 12 envelope standard "
            f"deviations ({12.0 * sigma_t:.3g})")
    dt = grid.spacing
    nyquist = math.pi / dt
    needed = abs(p.omega_center) + 12.0 / math.sqrt(p.beta)
    if nyquist < needed:
        raise ValueError(
            f"grid too coarse: Nyquist frequency {nyquist:.3g} below the "
            f"spectral extent {needed:.3g}")
    omegas, transform = fourier_transform_on_grid(p, grid)
    target = MODE_TRANSFORM_PHASE * eval_phi_hat(p, omegas)
    return float(np.max(np.abs(transform - target)))


def curl_psi_residual(p: SpatialModeParams, probes, h: float) -> float:
    """Max central-difference curl magnitude of psi over the probe points.

    The field is an exact gradient, so the analytic curl vanishes; the
    returned value is pure discretization error, O(h^2).
    """
    if not (h > 0 and math.isfinite(h)):
        raise ValueError(f"step must be positive and finite, got {h}")
    probes = np.atleast_2d(np.asarray(probes, dtype=float))
    if probes.shape[-1] != 3:
        raise ValueError("probes must have shape (n, 3)")
    # deriv[a, n, c] = d psi_c / d x_a at probe n.
    deriv = np.empty((3, probes.shape[0], 3))
    for axis in range(3):
        offset = np.zeros(3)
        offset[axis] = h
        deriv[axis] = (eval_psi(p, probes + offset) - eval_psi(p, probes - offset)) / (2.0 * h)
    curl = np.stack([
        deriv[1, :, 2] - deriv[2, :, 1],
        deriv[2, :, 0] - deriv[0, :, 2],
        deriv[0, :, 1] - deriv[1, :, 0],
    ], axis=-1)
    return float(np.max(np.linalg.norm(curl, axis=-1)))


def curl_scale(p: SpatialModeParams) -> float:
    """Magnitude scale of the discretization term behind curl residuals.

    psi is the gradient of a scalar Gaussian, so the leading central
    difference error involves its fourth derivatives: amplitude alpha^(5/4)
    times one power of alpha from the two surviving derivative factors.
    """
    return math.sqrt(2.0 / 3.0) * math.pi ** (-0.75) * p.alpha ** 1.25 * p.alpha

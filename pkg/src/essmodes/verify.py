"""Self-check suite over the mode family and the quadrature kernels.

Each check reduces to a scalar defect that must stay below its tolerance;
the CLI renders the results and the acceptance tests reuse them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .modes import (SpatialModeParams, TemporalModeParams, curl_psi_residual,
                    curl_scale, eval_phi_hat, eval_psi, fourier_consistency,
                    norm_sq_phi, norm_sq_phi_hat, norm_sq_psi, sift_phi_hat,
                    sift_psi)
from .numerics import (Grid1D, QuadratureSpec, chi_square_p_value,
                       gaussian_moment, integrate_1d, integrate_radial_3d)

__all__ = ["CheckResult", "run_verification_suite"]

_CONCENTRATIONS = tuple(10.0 ** k for k in range(-2, 7))
_SLOPE_RANGE = tuple(10.0 ** k for k in range(2, 7))
_FOURIER_CASES = ((1.0, 0.0), (4.0, 3.0), (0.25, 2.0), (9.0, 1.5), (2.0, 5.0))


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    tolerance: float
    passed: bool


def _check(name: str, value: float, tolerance: float) -> CheckResult:
    return CheckResult(name=name, value=float(value), tolerance=float(tolerance),
                       passed=bool(value <= tolerance))


def _loglog_slope(xs, ys) -> float:
    lx = np.log10(np.asarray(xs))
    ly = np.log10(np.asarray(ys))
    return float(np.polyfit(lx, ly, 1)[0])


def run_verification_suite(quadrature: QuadratureSpec = QuadratureSpec(),
                           tolerance: float | None = None) -> list[CheckResult]:
    """Run every invariant check; an explicit tolerance overrides them all."""
    results: list[CheckResult] = []

    def tol(default: float) -> float:
        return default if tolerance is None else tolerance

    # Quadrature against Gaussian-moment closed forms.
    value, _ = integrate_1d(lambda t: np.exp(-t * t), -math.inf, math.inf, quadrature)
    results.append(_check("quadrature_gaussian_integral",
                          abs(value - math.sqrt(math.pi)), tol(1e-10)))
    moment_defect = 0.0
    for n, a in ((0, 1.0), (2, 1.0), (2, 3.0), (4, 2.0), (6, 0.5)):
        got, _ = integrate_1d(lambda t: t ** n * np.exp(-a * t * t),
                              -math.inf, math.inf, quadrature)
        moment_defect = max(moment_defect,
                            abs(got - gaussian_moment(n, a)) / gaussian_moment(n, a))
    results.append(_check("quadrature_moment_agreement", moment_defect, tol(1e-10)))
    radial = integrate_radial_3d(lambda r: np.exp(-r * r), quadrature, r_max=12.0)
    results.append(_check("quadrature_radial_gaussian",
                          abs(radial - math.pi ** 1.5), tol(1e-8)))

    # Unit norms across nine decades of concentration.
    psi_defect = max(abs(norm_sq_psi(SpatialModeParams(alpha=a), quadrature) - 1.0)
                     for a in _CONCENTRATIONS)
    results.append(_check("spatial_norm_unit", psi_defect, tol(1e-8)))
    phi_defect = max(abs(norm_sq_phi_hat(TemporalModeParams(beta=b), quadrature) - 1.0)
                     for b in _CONCENTRATIONS)
    results.append(_check("spectral_norm_unit", phi_defect, tol(1e-8)))

    # Gaussian sifting against the exact family values.
    gauss3 = lambda x: np.exp(-np.sum(np.asarray(x) ** 2, axis=-1))
    sift_defect = 0.0
    for a in (1.0, 999.0, 1e4):
        got = sift_psi(gauss3, SpatialModeParams(alpha=a), quadrature, radial=True)
        sift_defect = max(sift_defect, abs(got - (a / (a + 1.0)) ** 2.5))
    results.append(_check("spatial_sift_oracle", sift_defect, tol(1e-8)))
    sift_defect = 0.0
    for b in (1.0, 999.0, 1e4):
        got = sift_phi_hat(lambda w: np.exp(-w * w), TemporalModeParams(beta=b),
                           quadrature)
        sift_defect = max(sift_defect, abs(got - (b / (b + 1.0)) ** 1.5))
    results.append(_check("spectral_sift_oracle", sift_defect, tol(1e-8)))

    # Sifting error decays like one over the concentration parameter.
    errors = [1.0 - sift_psi(gauss3, SpatialModeParams(alpha=a), quadrature, radial=True)
              for a in _SLOPE_RANGE]
    results.append(_check("spatial_sift_slope",
                          abs(_loglog_slope(_SLOPE_RANGE, errors) + 1.0), tol(0.05)))
    errors = [1.0 - sift_phi_hat(lambda w: np.exp(-w * w),
                                 TemporalModeParams(beta=b), quadrature)
              for b in _SLOPE_RANGE]
    results.append(_check("spectral_sift_slope",
                          abs(_loglog_slope(_SLOPE_RANGE, errors) + 1.0), tol(0.05)))

    # Grid Fourier transform matches the spectral factor pointwise.
    duality_defect = 0.0
    for beta, omega_c in _FOURIER_CASES:
        half = 15.0 * math.sqrt(beta)
        grid = Grid1D.uniform(-half, half, 4096)
        duality_defect = max(duality_defect, fourier_consistency(
            TemporalModeParams(beta=beta, omega_center=omega_c), grid))
    results.append(_check("fourier_duality", duality_defect, tol(1e-6)))
    parseval_defect = 0.0
    for beta, omega_c in _FOURIER_CASES[:2]:
        p = TemporalModeParams(beta=beta, omega_center=omega_c)
        parseval_defect = max(parseval_defect,
                              abs(norm_sq_phi(p, quadrature) - 1.0),
                              abs(norm_sq_phi_hat(p, quadrature) - 1.0))
    results.append(_check("parseval_unit_norms", parseval_defect, tol(1e-8)))

    # Central-difference curl stays within the discretization bound and
    # shrinks at second order.
    probes = np.array([[0.3, 0.1, -0.2], [1.0, 0.0, 0.0],
                       [0.5, 0.5, 0.5], [0.0, -0.7, 0.2]])
    bound_ratio = 0.0
    order_defect = 0.0
    for alpha in (0.01, 1.0, 100.0, 1e4):
        p = SpatialModeParams(alpha=alpha)
        scale = 1.0 / math.sqrt(alpha)
        h = 1e-3 * scale
        res_h = curl_psi_residual(p, probes * scale, h)
        res_half = curl_psi_residual(p, probes * scale, 0.5 * h)
        bound_ratio = max(bound_ratio, res_h / (h * h * curl_scale(p)))
        order = math.log2(res_h / res_half)
        order_defect = max(order_defect, 2.0 - order)
    results.append(_check("curl_free_bound", bound_ratio, tol(10.0)))
    results.append(_check("curl_free_order", order_defect, tol(0.1)))

    # Upper-tail chi-square probability decreases with the statistic.
    stats = np.linspace(0.0, 40.0, 100)
    pvals = [chi_square_p_value(float(s), 5) for s in stats]
    worst_rise = max(b - a for a, b in zip(pvals[:-1], pvals[1:]))
    results.append(_check("chi_square_monotone", max(worst_rise, 0.0), tol(1e-12)))

    # Oddness of the spectral factor and rotation invariance of the spatial one.
    p_t = TemporalModeParams(beta=2.0, omega_center=1.5)
    odd_defect = float(np.max(np.abs(
        eval_phi_hat(p_t, p_t.omega_center + np.linspace(0.1, 3, 7))
        + eval_phi_hat(p_t, p_t.omega_center - np.linspace(0.1, 3, 7)))))
    results.append(_check("spectral_antisymmetry", odd_defect, tol(1e-12)))
    p_s = SpatialModeParams(alpha=2.0)
    mags = [np.linalg.norm(eval_psi(p_s, np.asarray(v)))
            for v in ([1.0, 0, 0], [0, 1.0, 0], [0, 0, 1.0])]
    results.append(_check("spatial_rotation_invariance",
                          max(mags) - min(mags), tol(1e-12)))

    return results

"""Detection-event sampling from the squared field amplitude and its audits.

The sampling measure is the bilinear interpolant of the squared amplitude
table, normalized to unit mass.  Every expectation computed here (density
normalization, conservation left-hand sides, histogram expectations) uses
that same measure, so the statistical audits are unbiased by construction.

This module consumes only the amplitude table of a field object (duck-typed:
.x, .omega, .intensity()); it performs no field evolution of any kind.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .numerics import chi_square_p_value, trapezoid_weights

__all__ = [
    "BornDensity",
    "ChiSquareReport",
    "ConservationReport",
    "DetectionEvent",
    "IntervalIndicator",
    "born_density",
    "chi_square_from_counts",
    "conservation_check",
    "expected_bin_counts",
    "factorization_defect",
    "l1_marginal_error",
    "pattern_report",
    "sample_events",
    "suggested_mode_count",
]

_MIN_EXPECTED = 5.0
# Gauss-Legendre nodes/weights on [0, 1]; exact through cubic factors per
# axis, enough for polynomial test functionals against a bilinear density.
_GL_NODES = np.array([0.5 - math.sqrt(15.0) / 10.0, 0.5, 0.5 + math.sqrt(15.0) / 10.0])
_GL_WEIGHTS = np.array([5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0])


def _total_action(x, omega, intensity, eps0):
    return float(eps0 * trapezoid_weights(x) @ intensity @ trapezoid_weights(omega))


def suggested_mode_count(normal_field, action_quantum: float, eps0: float = 1.0) -> int:
    """Mode budget: total field action divided by the per-mode quantum."""
    if not (action_quantum > 0 and math.isfinite(action_quantum)):
        raise ValueError(f"action quantum must be positive, got {action_quantum}")
    total = _total_action(normal_field.x, normal_field.omega,
                          normal_field.intensity(), eps0)
    return int(round(total / action_quantum))


@dataclass(frozen=True)
class BornDensity:
    """Normalized squared-amplitude density with cached sampling tables."""

    x: np.ndarray
    omega: np.ndarray
    density: np.ndarray
    normalization: float  # total field action that scaled the table
    n_modes: int
    action_quantum: float
    budget_consistent: bool
    cell_cum: np.ndarray = field(repr=False, default=None)

    def marginal_x(self) -> np.ndarray:
        """Piecewise-linear screen marginal at the grid nodes."""
        return self.density @ trapezoid_weights(self.omega)

    def marginal_omega(self) -> np.ndarray:
        return trapezoid_weights(self.x) @ self.density

    def marginal_x_mass(self, lo: float, hi: float) -> float:
        """Exact marginal mass of the screen interval [lo, hi]."""
        return _piecewise_linear_mass(self.x, self.marginal_x(), lo, hi)

    def marginal_omega_mass(self, lo: float, hi: float) -> float:
        return _piecewise_linear_mass(self.omega, self.marginal_omega(), lo, hi)


def _cell_masses(x, omega, density):
    corners = (density[:-1, :-1] + density[1:, :-1]
               + density[:-1, 1:] + density[1:, 1:])
    area = np.diff(x)[:, None] * np.diff(omega)[None, :]
    return 0.25 * corners * area


def born_density(normal_field, n_modes: int, action_quantum: float,
                 eps0: float = 1.0) -> BornDensity:
    """Normalize the squared amplitude into the detection density.

    The table is scaled to integrate to one under the bilinear measure; the
    scaling factor (the total field action) is recorded, and the budget flag
    is cleared when it differs from n_modes * action_quantum by more than 1%.
    """
    if n_modes < 1:
        raise ValueError(f"mode count must be >= 1, got {n_modes}")
    if not (action_quantum > 0 and math.isfinite(action_quantum)):
        raise ValueError(f"action quantum must be positive, got {action_quantum}")
    x = np.asarray(normal_field.x, dtype=float)
    omega = np.asarray(normal_field.omega, dtype=float)
    intensity = np.asarray(normal_field.intensity(), dtype=float)
    if np.all(intensity == 0.0):
        raise ValueError("field is identically zero; no density exists")
    total = _total_action(x, omega, intensity, eps0)
    density = eps0 * intensity / total
    cum = np.cumsum(_cell_masses(x, omega, density).ravel())
    cum /= cum[-1]
    budget = abs(total / (n_modes * action_quantum) - 1.0) <= 0.01
    return BornDensity(
        x=x, omega=omega, density=density, normalization=total,
        n_modes=n_modes, action_quantum=action_quantum,
        budget_consistent=budget, cell_cum=cum)


@dataclass(frozen=True)
class DetectionEvent:
    """One collapsed mode: screen coordinate, angular frequency, kind, action."""

    x_c: float
    omega_c: float
    kind: str
    action: float


def _inverse_linear(a, b, t):
    """Draw from the density (1-s) a + s b on [0, 1] given uniforms t."""
    total = a + b
    disc = np.sqrt(a * a + (b - a) * total * t)
    denom = a + disc
    s = np.where(denom > 0.0, total * t / np.where(denom > 0.0, denom, 1.0), t)
    return np.clip(s, 0.0, 1.0)


def _sample_chunk(d: BornDensity, count: int, seed: int, chunk_index: int):
    rng = np.random.default_rng(np.random.SeedSequence([seed, chunk_index]))
    u_cell = rng.random(count)
    u_xi = rng.random(count)
    u_eta = rng.random(count)

    n_omega_cells = d.omega.size - 1
    idx = np.searchsorted(d.cell_cum, u_cell, side="left")
    idx = np.clip(idx, 0, d.cell_cum.size - 1)
    i, j = np.divmod(idx, n_omega_cells)

    q00 = d.density[i, j]
    q10 = d.density[i + 1, j]
    q01 = d.density[i, j + 1]
    q11 = d.density[i + 1, j + 1]

    xi = _inverse_linear(q00 + q01, q10 + q11, u_xi)
    c = (1.0 - xi) * q00 + xi * q10
    dd = (1.0 - xi) * q01 + xi * q11
    eta = _inverse_linear(c, dd, u_eta)

    xs = d.x[i] + xi * (d.x[i + 1] - d.x[i])
    ws = d.omega[j] + eta * (d.omega[j + 1] - d.omega[j])
    return xs, ws


def sample_events(d: BornDensity, n: int, seed: int, kind: str = "electric",
                  workers: int = 1, chunk_size: int = 8192) -> list[DetectionEvent]:
    """Draw n events from the density; deterministic given (seed, chunk_size).

    Work is split into fixed-size chunks, each with its own substream derived
    from (seed, chunk index), and results are concatenated in chunk order, so
    the event list does not depend on the worker count.
    """
    if n < 0:
        raise ValueError(f"event count must be >= 0, got {n}")
    if kind not in ("electric", "magnetic"):
        raise ValueError(f"kind must be 'electric' or 'magnetic', got {kind!r}")
    if seed < 0:
        raise ValueError(f"seed must be >= 0, got {seed}")
    if chunk_size < 1:
        raise ValueError(f"chunk_size must be >= 1, got {chunk_size}")
    if n == 0:
        return []
    counts = [chunk_size] * (n // chunk_size)
    if n % chunk_size:
        counts.append(n % chunk_size)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(
                lambda k: _sample_chunk(d, counts[k], seed, k), range(len(counts))))
    else:
        parts = [_sample_chunk(d, counts[k], seed, k) for k in range(len(counts))]
    xs = np.concatenate([p[0] for p in parts])
    ws = np.concatenate([p[1] for p in parts])
    return [DetectionEvent(x_c=float(a), omega_c=float(b), kind=kind,
                           action=d.action_quantum)
            for a, b in zip(xs, ws)]


def _piecewise_linear_mass(nodes, values, lo: float, hi: float) -> float:
    """Exact integral of the piecewise-linear interpolant over [lo, hi]."""
    lo = max(lo, float(nodes[0]))
    hi = min(hi, float(nodes[-1]))
    if hi <= lo:
        return 0.0
    cum = np.concatenate([[0.0], np.cumsum(
        0.5 * (values[:-1] + values[1:]) * np.diff(nodes))])

    def cum_at(e):
        i = int(np.clip(np.searchsorted(nodes, e, side="right") - 1, 0, nodes.size - 2))
        h = nodes[i + 1] - nodes[i]
        t = e - nodes[i]
        slope = (values[i + 1] - values[i]) / h
        return float(cum[i] + values[i] * t + 0.5 * slope * t * t)

    return cum_at(hi) - cum_at(lo)


def _mean_under_bilinear(x, omega, density, u) -> float:
    """Integral of u against the bilinear interpolant of the density table."""
    q00 = density[:-1, :-1]
    q10 = density[1:, :-1]
    q01 = density[:-1, 1:]
    q11 = density[1:, 1:]
    dx = np.diff(x)[:, None]
    dw = np.diff(omega)[None, :]
    area = dx * dw
    x_lo = x[:-1][:, None]
    w_lo = omega[:-1][None, :]
    acc = 0.0
    for gi, wi in zip(_GL_NODES, _GL_WEIGHTS):
        xq = x_lo + gi * dx
        for gj, wj in zip(_GL_NODES, _GL_WEIGHTS):
            wq = w_lo + gj * dw
            blend = ((1 - gi) * (1 - gj) * q00 + gi * (1 - gj) * q10
                     + (1 - gi) * gj * q01 + gi * gj * q11)
            acc += wi * wj * float(np.sum(u(xq, wq) * blend * area))
    return acc


def factorization_defect(d: BornDensity) -> float:
    """Half the L1 distance between the joint density and its marginal product.

    Diagnostic only: the two-slit table does not factor exactly in (x, omega).
    """
    product = np.outer(d.marginal_x(), d.marginal_omega())
    gap = np.abs(d.density - product)
    return float(0.5 * trapezoid_weights(d.x) @ gap @ trapezoid_weights(d.omega))


@dataclass(frozen=True)
class IntervalIndicator:
    """Indicator test functional of an interval on one axis ('x' or 'omega')."""

    lo: float
    hi: float
    axis: str = "x"

    def __post_init__(self):
        if self.axis not in ("x", "omega"):
            raise ValueError(f"axis must be 'x' or 'omega', got {self.axis!r}")
        if not self.lo < self.hi:
            raise ValueError(f"need lo < hi, got ({self.lo}, {self.hi})")

    def __call__(self, x, omega):
        v = x if self.axis == "x" else omega
        return ((v >= self.lo) & (v <= self.hi)).astype(float)


@dataclass(frozen=True)
class ConservationReport:
    """Field-side vs event-side weighted action with its sampling z-score."""

    name: str
    lhs: float
    rhs: float
    se: float
    z: float
    n_events: int


def conservation_check(events, normal_field, u, action_quantum: float,
                       eps0: float = 1.0, name: str = "u") -> ConservationReport:
    """Compare eps0 iint u |E|^2 with the event sum C sum u(x_i, omega_i).

    u is a vectorized callable u(x, omega), an IntervalIndicator (evaluated
    exactly against the sampling measure), or None for the unit functional.
    The standard error comes from the sample variance of u over the events.
    """
    if not events:
        raise ValueError("need at least one event")
    x = np.asarray(normal_field.x, dtype=float)
    omega = np.asarray(normal_field.omega, dtype=float)
    intensity = np.asarray(normal_field.intensity(), dtype=float)
    total = _total_action(x, omega, intensity, eps0)
    density = eps0 * intensity / total

    ex = np.array([e.x_c for e in events])
    ew = np.array([e.omega_c for e in events])
    n = ex.size

    if u is None:
        mean_u = 1.0
        u_vals = np.ones(n)
        lhs = total
    else:
        if isinstance(u, IntervalIndicator):
            nodes, values = ((x, density @ trapezoid_weights(omega))
                             if u.axis == "x"
                             else (omega, trapezoid_weights(x) @ density))
            mean_u = _piecewise_linear_mass(nodes, values, u.lo, u.hi)
        else:
            mean_u = _mean_under_bilinear(x, omega, density, u)
        u_vals = np.asarray(u(ex, ew), dtype=float)
        lhs = total * mean_u

    if u is None:
        rhs = action_quantum * n  # exact product, no float summation
    else:
        rhs = action_quantum * float(np.sum(u_vals))
    std = float(np.std(u_vals, ddof=1)) if n > 1 else 0.0
    se = action_quantum * math.sqrt(n) * std
    if se > 0.0:
        z = (lhs - rhs) / se
    else:
        # Zero-variance functional: the comparison is deterministic.  Allow a
        # few ulp of slack for the action-quantum rounding in C = total / N.
        slack = 8.0 * math.ulp(max(abs(lhs), abs(rhs), 1.0))
        z = 0.0 if abs(lhs - rhs) <= slack else math.copysign(math.inf, lhs - rhs)
    return ConservationReport(name=name, lhs=lhs, rhs=rhs, se=se, z=z, n_events=n)


@dataclass(frozen=True)
class ChiSquareReport:
    """Goodness of fit of the observed screen histogram to the expected one."""

    bin_edges: np.ndarray
    observed: np.ndarray
    expected: np.ndarray
    statistic: float
    dof: int
    p_value: float


def expected_bin_counts(d: BornDensity, edges: np.ndarray) -> np.ndarray:
    """Expected event counts per screen bin under the sampling measure."""
    marginal = d.marginal_x()
    masses = np.array([
        _piecewise_linear_mass(d.x, marginal, lo, hi)
        for lo, hi in zip(edges[:-1], edges[1:])])
    return d.n_modes * masses


def chi_square_from_counts(observed, expected,
                           min_expected: float = _MIN_EXPECTED) -> ChiSquareReport:
    """Pearson chi-square after merging adjacent low-expectation bins."""
    observed = np.asarray(observed, dtype=float)
    expected = np.asarray(expected, dtype=float)
    if observed.shape != expected.shape:
        raise ValueError("observed and expected must have matching shapes")
    merged_o, merged_e = [], []
    acc_o = acc_e = 0.0
    for o, e in zip(observed, expected):
        acc_o += o
        acc_e += e
        if acc_e >= min_expected:
            merged_o.append(acc_o)
            merged_e.append(acc_e)
            acc_o = acc_e = 0.0
    if acc_e > 0.0 or acc_o > 0.0:
        if merged_e:
            merged_o[-1] += acc_o
            merged_e[-1] += acc_e
        else:
            merged_o.append(acc_o)
            merged_e.append(acc_e)
    if len(merged_e) < 5:
        raise ValueError(
            f"only {len(merged_e)} usable bins after merging; need at least 5")
    obs = np.array(merged_o)
    exp = np.array(merged_e)
    statistic = float(np.sum((obs - exp) ** 2 / exp))
    dof = len(exp) - 1
    return ChiSquareReport(
        bin_edges=np.array([]), observed=obs, expected=exp,
        statistic=statistic, dof=dof,
        p_value=chi_square_p_value(statistic, dof))


def pattern_report(events, d: BornDensity, bins=64) -> ChiSquareReport:
    """Chi-square of the observed screen marginal against the expected one."""
    if isinstance(bins, (int, np.integer)):
        edges = np.linspace(d.x[0], d.x[-1], int(bins) + 1)
    else:
        edges = np.asarray(bins, dtype=float)
    xs = np.array([e.x_c for e in events])
    observed, _ = np.histogram(xs, bins=edges)
    expected = expected_bin_counts(d, edges) * (len(events) / d.n_modes)
    report = chi_square_from_counts(observed, expected)
    return ChiSquareReport(
        bin_edges=edges, observed=report.observed, expected=report.expected,
        statistic=report.statistic, dof=report.dof, p_value=report.p_value)


def l1_marginal_error(events, d: BornDensity, bins=64) -> float:
    """L1 distance between empirical and expected screen histograms, per event."""
    if isinstance(bins, (int, np.integer)):
        edges = np.linspace(d.x[0], d.x[-1], int(bins) + 1)
    else:
        edges = np.asarray(bins, dtype=float)
    xs = np.array([e.x_c for e in events])
    observed, _ = np.histogram(xs, bins=edges)
    expected = expected_bin_counts(d, edges) * (len(events) / d.n_modes)
    return float(np.sum(np.abs(observed - expected)) / len(events))

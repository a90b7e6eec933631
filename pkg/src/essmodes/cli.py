"""Experiment runner: verify, residual, resonance, simulate, conserve.

One TOML config drives every subcommand.  Outputs embed the config hash and
seed and contain no timestamps, so re-running any command with unchanged
inputs reproduces byte-identical files.  Exit codes: 0 success, 1 check
failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .collapse import (IntervalIndicator, born_density, conservation_check,
                       factorization_defect, l1_marginal_error, pattern_report,
                       sample_events, suggested_mode_count)
from .config import ConfigError, ExperimentConfig, load_config
from .diffraction import (NormalStateField, field_to_files, first_null_position,
                          synthesize_field, total_action)
from .medium import find_essential_resonance
from .modes import EssentialModeParams, SpatialModeParams, TemporalModeParams
from .verify import run_verification_suite
from .weyl import ResidualQuery, convergence_sweep, resonant_lambda

__all__ = ["main"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="essmodes",
        description="Localized-mode spectral checks and two-slit collapse sampling.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="experiment TOML file")
        p.add_argument("--out", default=None, help="output directory override")
        p.add_argument("--seed", type=int, default=None, help="seed override")
        return p

    add("verify", "run the invariant self-check suite")
    add("residual", "sweep the spectral residual over (alpha, beta)")
    add("resonance", "locate resonance frequencies over the screen region")
    sim = add("simulate", "sample detection events and audit the statistics")
    sim.add_argument("--workers", type=int, default=1,
                     help="sampling worker threads (output-invariant)")
    sim.add_argument("--dump-field", action="store_true",
                     help="also write the field table (JSON header + CSV)")
    con = add("conserve", "re-check conservation laws against an events file")
    con.add_argument("--events", required=True, help="events CSV from simulate")
    return parser


def _prepare(args) -> ExperimentConfig:
    cfg = load_config(args.config)
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigError("--seed must be >= 0")
        cfg = replace(cfg, sampling=replace(cfg.sampling, seed=args.seed))
    if args.out is not None:
        cfg = replace(cfg, output_dir=Path(args.out))
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    return cfg


def _meta_line(cfg: ExperimentConfig) -> str:
    return f"# config_sha256={cfg.sha256} seed={cfg.sampling.seed}\n"


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _base_payload(cfg: ExperimentConfig) -> dict:
    return {"config_sha256": cfg.sha256, "seed": cfg.sampling.seed,
            "version": __version__, "units": cfg.scales.as_dict()}


def _build_field(cfg: ExperimentConfig) -> NormalStateField:
    omega_grid = cfg.spectrum.default_grid(cfg.grids.omega_points,
                                           cfg.grids.omega_span_sigmas)
    return synthesize_field(cfg.geometry, cfg.spectrum,
                            x_grid=cfg.geometry.screen_grid(),
                            omega_grid=omega_grid, amplitude=cfg.amplitude)


def _resolve_budget(cfg: ExperimentConfig, field: NormalStateField):
    """Number of modes and the per-mode action quantum, natural units."""
    total = total_action(field)
    quantum = cfg.sampling.action_quantum
    if quantum == "auto":
        n = cfg.sampling.n_events
        if n < 1:
            raise ConfigError("sampling.n_events: must be >= 1 with action_quantum='auto'")
        return n, total / n, total
    n = cfg.sampling.n_events or suggested_mode_count(field, quantum)
    return n, quantum, total


def _functionals(cfg: ExperimentConfig):
    x1 = first_null_position(cfg.geometry, cfg.spectrum.omega_center)
    table = {
        "one": None,
        "x": lambda x, w: x,
        "x_squared": lambda x, w: x * x,
        "omega": lambda x, w: w,
        "x_omega": lambda x, w: x * w,
        "central_fringe": IntervalIndicator(-x1, x1, axis="x"),
    }
    return [(name, table[name]) for name in cfg.conservation_functionals]


def _cmd_verify(cfg: ExperimentConfig) -> int:
    results = run_verification_suite(cfg.quadrature, cfg.verify_tolerance)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} {r.name}: value={r.value:.3e} tolerance={r.tolerance:.3e}")
    payload = _base_payload(cfg)
    payload["checks"] = [
        {"name": r.name, "value": r.value, "tolerance": r.tolerance,
         "passed": r.passed} for r in results]
    failures = [r for r in results if not r.passed]
    payload["failed"] = len(failures)
    _write_json(cfg.output_dir / "verify_report.json", payload)
    print(f"{len(results) - len(failures)}/{len(results)} checks passed "
          f"-> {cfg.output_dir / 'verify_report.json'}")
    return 1 if failures else 0


def _cmd_residual(cfg: ExperimentConfig) -> int:
    sweep = cfg.sweep
    if not sweep.alphas or not sweep.betas:
        raise ConfigError("sweep.alphas and sweep.betas must be non-empty")
    if sweep.lam == "resonant":
        lam = resonant_lambda(cfg.medium, sweep.x_c, sweep.omega_c, sweep.kind)
    elif sweep.lam == "zero":
        lam = 0j
    else:
        lam = complex(sweep.lam)
    mode = EssentialModeParams(
        kind=sweep.kind,
        spatial=SpatialModeParams(alpha=sweep.alphas[0], center=sweep.x_c),
        temporal=TemporalModeParams(beta=sweep.betas[0], omega_center=sweep.omega_c))
    query = ResidualQuery(mode=mode, lam=lam, medium=cfg.medium,
                          quadrature=cfg.quadrature)
    records = convergence_sweep(query, sweep.alphas, sweep.betas)

    s = cfg.scales
    alpha_out = 1.0 / (s.length * s.length)
    beta_out = 1.0 / (s.angular_frequency * s.angular_frequency)
    res_out = s.angular_frequency * s.angular_frequency
    path = cfg.output_dir / "residual_sweep.csv"
    with open(path, "w") as fh:
        fh.write(_meta_line(cfg))
        fh.write("alpha,beta,residual_sq,target,error\n")
        for r in records:
            fh.write(f"{r.alpha * alpha_out!r},{r.beta * beta_out!r},"
                     f"{r.residual_sq * res_out!r},{r.target * res_out!r},"
                     f"{r.error * res_out!r}\n")
    print(f"{len(records)} sweep points -> {path}")
    return 0


def _cmd_resonance(cfg: ExperimentConfig) -> int:
    search = cfg.search
    geometry = cfg.geometry
    screen_x = np.linspace(-geometry.screen_halfwidth, geometry.screen_halfwidth,
                           search.x_samples)
    points = np.column_stack([screen_x, np.zeros_like(screen_x),
                              np.full_like(screen_x, geometry.screen_distance)])
    found = find_essential_resonance(
        cfg.medium, points, (search.omega_min, search.omega_max),
        tolerance=search.tolerance, n_scan=search.n_scan, kind=search.kind)
    s = cfg.scales
    payload = _base_payload(cfg)
    payload["points"] = [
        {"x_c": [v * s.length for v in p.x_c.tolist()],
         "omega_c": p.omega_c * s.angular_frequency,
         "residual": p.residual * s.angular_frequency}
        for p in found]
    path = cfg.output_dir / "resonance_points.json"
    _write_json(path, payload)
    print(f"{len(found)} resonance points -> {path}")
    return 0


def _write_events_csv(path: Path, cfg: ExperimentConfig, events) -> None:
    s = cfg.scales
    with open(path, "w") as fh:
        fh.write(_meta_line(cfg))
        fh.write("event_index,x_c,omega_c,kind,action\n")
        for i, e in enumerate(events):
            fh.write(f"{i},{e.x_c * s.length!r},"
                     f"{e.omega_c * s.angular_frequency!r},{e.kind},"
                     f"{e.action * s.action!r}\n")


def _read_events_csv(path: Path, cfg: ExperimentConfig):
    from .collapse import DetectionEvent

    s = cfg.scales
    events = []
    with open(path) as fh:
        header = None
        for line in fh:
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            if header is None:
                header = line.split(",")
                if header != ["event_index", "x_c", "omega_c", "kind", "action"]:
                    raise ConfigError(f"{path}: unexpected events CSV columns {header}")
                continue
            _, x_c, omega_c, kind, action = line.split(",")
            events.append(DetectionEvent(
                x_c=float(x_c) / s.length,
                omega_c=float(omega_c) / s.angular_frequency,
                kind=kind,
                action=float(action) / s.action))
    if not events:
        raise ConfigError(f"{path}: no events found")
    return events


def _conservation_payload(cfg: ExperimentConfig, field, events, quantum) -> list[dict]:
    s = cfg.scales
    blocks = []
    for name, u in _functionals(cfg):
        report = conservation_check(events, field, u, quantum, name=name)
        # lhs/rhs carry action units times the functional's own units; only
        # the pure-action part is rescaled for reporting.
        blocks.append({"name": name, "lhs": report.lhs * s.action,
                       "rhs": report.rhs * s.action, "se": report.se * s.action,
                       "z": report.z, "n_events": report.n_events})
    return blocks


def _cmd_simulate(cfg: ExperimentConfig, workers: int, dump_field: bool) -> int:
    field = _build_field(cfg)
    n_modes, quantum, total = _resolve_budget(cfg, field)
    density = born_density(field, n_modes, quantum)
    events = sample_events(density, n_modes, cfg.sampling.seed,
                           kind=cfg.sampling.kind, workers=workers,
                           chunk_size=cfg.sampling.chunk_size)
    chi = pattern_report(events, density, cfg.sampling.bins)
    s = cfg.scales

    events_path = cfg.output_dir / "events.csv"
    _write_events_csv(events_path, cfg, events)

    hist_path = cfg.output_dir / "histogram.csv"
    edges = chi.bin_edges
    xs = np.array([e.x_c for e in events])
    observed, _ = np.histogram(xs, bins=edges)
    from .collapse import expected_bin_counts
    expected = expected_bin_counts(density, edges)
    with open(hist_path, "w") as fh:
        fh.write(_meta_line(cfg))
        fh.write("bin_left,bin_right,observed,expected\n")
        for lo, hi, o, e in zip(edges[:-1].tolist(), edges[1:].tolist(),
                                observed, expected.tolist()):
            fh.write(f"{lo * s.length!r},{hi * s.length!r},{int(o)},{e!r}\n")

    report = _base_payload(cfg)
    report["budget"] = {
        "total_action": total * s.action,
        "action_quantum": quantum * s.action,
        "n_events": n_modes,
        "suggested_n": suggested_mode_count(field, quantum),
        "budget_consistent": density.budget_consistent,
    }
    report["chi_square"] = {
        "statistic": chi.statistic, "dof": chi.dof, "p_value": chi.p_value,
        "bins_used": int(chi.observed.size),
    }
    report["conservation"] = _conservation_payload(cfg, field, events, quantum)
    report["factorization_defect"] = factorization_defect(density)
    report["l1_marginal_error"] = l1_marginal_error(events, density,
                                                    cfg.sampling.bins)
    report_path = cfg.output_dir / "report.json"
    _write_json(report_path, report)

    artifacts = {"events": events_path.name, "histogram": hist_path.name,
                 "report": report_path.name}
    if dump_field:
        field_to_files(field, cfg.output_dir / "field.json",
                       cfg.output_dir / "field.csv",
                       meta={"config_sha256": cfg.sha256,
                             "seed": cfg.sampling.seed})
        artifacts["field_header"] = "field.json"
        artifacts["field_table"] = "field.csv"
    manifest = _base_payload(cfg)
    manifest["artifacts"] = artifacts
    manifest["sampling"] = {"n_events": n_modes, "bins": cfg.sampling.bins,
                            "chunk_size": cfg.sampling.chunk_size,
                            "kind": cfg.sampling.kind}
    _write_json(cfg.output_dir / "manifest.json", manifest)

    print(f"{n_modes} events -> {events_path}")
    print(f"chi-square p-value {chi.p_value:.4f} over {chi.observed.size} bins")
    for block in report["conservation"]:
        print(f"conservation {block['name']}: z={block['z']:.3f}")
    return 0


def _cmd_conserve(cfg: ExperimentConfig, events_path: str) -> int:
    path = Path(events_path)
    if not path.exists():
        raise ConfigError(f"events file not found: {path}")
    field = _build_field(cfg)
    _, quantum, total = _resolve_budget(cfg, field)
    events = _read_events_csv(path, cfg)
    payload = _base_payload(cfg)
    payload["events_file"] = path.name
    payload["n_events"] = len(events)
    payload["total_action"] = total * cfg.scales.action
    payload["conservation"] = _conservation_payload(cfg, field, events, quantum)
    out_path = cfg.output_dir / "conserve_report.json"
    _write_json(out_path, payload)
    for block in payload["conservation"]:
        print(f"conservation {block['name']}: lhs={block['lhs']:.6e} "
              f"rhs={block['rhs']:.6e} z={block['z']:.3f}")
    print(f"-> {out_path}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _prepare(args)
        if args.command == "verify":
            return _cmd_verify(cfg)
        if args.command == "residual":
            return _cmd_residual(cfg)
        if args.command == "resonance":
            return _cmd_resonance(cfg)
        if args.command == "simulate":
            if args.workers < 1:
                raise ConfigError("--workers must be >= 1")
            return _cmd_simulate(cfg, args.workers, args.dump_field)
        if args.command == "conserve":
            return _cmd_conserve(cfg, args.events)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

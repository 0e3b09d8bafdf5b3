"""Command-line front end.

    purcell-notch t1-spectrum   --config run.toml --out out/
    purcell-notch coupling-sweep
    purcell-notch snr-map
    purcell-notch fidelity-map
    purcell-notch design
    purcell-notch mc-validate   --seed 7

Exit codes: 0 success, 2-13 per error class (see ``purcell_notch.errors``).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from purcell_notch import config as config_mod
from purcell_notch import cqed, designer, readout
from purcell_notch.errors import PurcellNotchError
from purcell_notch.netcore import CouplingSet

log = logging.getLogger("purcell_notch")

TWO_PI = 2.0 * math.pi
FF, NH = 1e-15, 1e-9

# values the default design is expected to reproduce (target column of the report)
REFERENCE_DESIGN = {
    "total_qubit_capacitance": 65.0,
    "qubit_inductance": 15.6,
    "qubit_frequency": 5.0,
    "resonator_capacitance": 500.0,
    "resonator_inductance": 1.2,
    "readout_frequency": 6.5,
    "anharmonicity": -297.0,
    "environmental_impedance": 50.0,
    "filter_capacitance_delta": 0.50,
    "filter_capacitance_y": 345.0,
    "filter_bandwidth_1ms": 138.0,
    "filter_bandwidth_10ms": 43.0,
    "qubit_coupling_capacitance_delta": 11.1,
    "qubit_coupling_capacitance_y": 12.0,
    "qubit_resonator_coupling": 150.0,
    "resonator_coupling_capacitance_delta": 14.3,
    "resonator_coupling_capacitance_y": 15.4,
    "photon_decay_rate": 5.0,
    "dispersive_shift": 2.5,
    "critical_photon_number": 25.0,
}


def fmt(x) -> str:
    """Fixed 9-significant-digit rendering used for every numeric CSV field."""
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return f"{x:.9g}"


def write_csv(path: Path, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        if len(row) != len(header):
            raise AssertionError("row width does not match header")
        w.writerow([fmt(v) if isinstance(v, (int, float, np.floating, np.integer)) else v for v in row])
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(buf.getvalue())
    return path


# --------------------------------------------------------------------------
# building model objects from a RunConfig


def qubit_from(cfg):
    return cqed.TransmonParams.from_frequency(cfg.c_sigma_fF * FF, cfg.omega_ge, TWO_PI * cfg.anharmonicity_MHz * 1e6)


def resonator_from(cfg):
    return cqed.ResonatorParams(cfg.l_r_nH * NH, cfg.c_r_fF * FF)


def coupling_from(cfg):
    return CouplingSet.from_y(cfg.cf_prime_fF * FF, cfg.cq_prime_fF * FF, cfg.ckappa_prime_fF * FF, cfg.z_env_ohm)


def targets_from(cfg):
    return designer.DesignTargets(
        omega_ge_target=cfg.omega_ge,
        g_target=TWO_PI * cfg.g_target_MHz * 1e6,
        kappa_over_2chi_target=cfg.kappa_over_2chi_target,
        t1_thresholds=tuple(t * 1e-3 for t in cfg.t1_thresholds_ms),
        cf_min=cfg.cf_min_fF * FF,
    )


def sweep_omegas(cfg):
    return np.linspace(TWO_PI * cfg.sweep_start_GHz * 1e9, TWO_PI * cfg.sweep_stop_GHz * 1e9, cfg.sweep_points)


def _label(v):
    return f"{v:g}"


# --------------------------------------------------------------------------
# commands


def cmd_t1_spectrum(cfg, out: Path):
    q, res, d = qubit_from(cfg), resonator_from(cfg), coupling_from(cfg).delta
    omegas = sweep_omegas(cfg)
    cfs = cfg.cf_sweep_fF
    curves = designer.t1_curves(q, res, d.cq, d.ckappa, [v * FF for v in cfs], omegas, cfg.z_env_ohm)
    header = ["omega_ge_GHz"] + [f"T1_s_CF_{_label(v)}fF" for v in cfs]
    rows = [[w / TWO_PI / 1e9] + [curves[v * FF][i] for v in cfs] for i, w in enumerate(omegas)]
    return [write_csv(out / "t1_spectrum.csv", header, rows)]


def cmd_coupling_sweep(cfg, out: Path):
    q, res, d = qubit_from(cfg), resonator_from(cfg), coupling_from(cfg).delta
    omegas = sweep_omegas(cfg)
    omegas = omegas[omegas < res.omega_r]
    by_cf = designer.g_curves(q, res, d.cq, d.ckappa, [v * FF for v in cfg.cf_sweep_fF], omegas, cfg.z_env_ohm)
    by_cq = designer.g_curves_cq(q, res, d.cf, d.ckappa, [v * FF for v in cfg.cq_sweep_fF], omegas, cfg.z_env_ohm)
    header = (
        ["omega_ge_GHz"]
        + [f"g_MHz_CF_{_label(v)}fF" for v in cfg.cf_sweep_fF]
        + [f"g_MHz_Cq_{_label(v)}fF" for v in cfg.cq_sweep_fF]
    )
    rows = []
    for i, w in enumerate(omegas):
        row = [w / TWO_PI / 1e9]
        row += [by_cf[v * FF][i] / TWO_PI / 1e6 for v in cfg.cf_sweep_fF]
        row += [by_cq[v * FF][i] / TWO_PI / 1e6 for v in cfg.cq_sweep_fF]
        rows.append(row)
    return [write_csv(out / "coupling_sweep.csv", header, rows)]


def cmd_snr_map(cfg, out: Path):
    q, res, d = qubit_from(cfg), resonator_from(cfg), coupling_from(cfg).delta
    grid = designer.ratio_grid(
        q, res, d.ckappa, [v * FF for v in cfg.cf_sweep_fF], [v * FF for v in cfg.cq_sweep_fF], cfg.z_env_ohm
    )
    rows = [
        [cf, cq, grid[i, j]] for i, cf in enumerate(cfg.cf_sweep_fF) for j, cq in enumerate(cfg.cq_sweep_fF)
    ]
    return [write_csv(out / "snr_map.csv", ["C_F_fF", "C_q_fF", "kappa_over_2chi"], rows)]


def _measurement_base(cfg, nbar=1.0, t_m=1e-6):
    return readout.MeasurementConfig.from_photons(
        kappa=TWO_PI * cfg.kappa_MHz * 1e6,
        chi=TWO_PI * cfg.chi_MHz * 1e6,
        nbar=nbar,
        t_m=t_m,
        efficiency=cfg.efficiency,
        rate_convention=cfg.rate_convention,
    )


def _n_crit(cfg):
    q, res = qubit_from(cfg), resonator_from(cfg)
    return cqed.critical_photon_number(TWO_PI * cfg.g_target_MHz * 1e6, q.omega_ge - res.omega_r)


def cmd_fidelity_map(cfg, out: Path):
    fmap = readout.fidelity_map(
        _measurement_base(cfg), cfg.nbar_grid, [t * 1e-6 for t in cfg.tm_grid_us], n_crit=_n_crit(cfg)
    )
    rows = [
        [nb, tm, fmap.fidelity[i, j]] for i, nb in enumerate(cfg.nbar_grid) for j, tm in enumerate(cfg.tm_grid_us)
    ]
    main = write_csv(out / "fidelity_map.csv", ["nbar", "t_m_us", "F"], rows)
    side_rows = [
        [level, nb, fmap.contours[level][i] * 1e6]
        for level in readout.CONTOUR_LEVELS
        for i, nb in enumerate(cfg.nbar_grid)
    ]
    side_rows += [["n_crit", fmap.n_crit, ""]]
    side = write_csv(out / "fidelity_map_contours.csv", ["level", "nbar", "t_m_us"], side_rows)
    return [main, side]


def design_document(report: designer.DesignReport, cfg) -> dict:
    rows = []
    for name, symbol, value, unit in report.table():
        target = REFERENCE_DESIGN.get(name)
        residual = None if target in (None, 0) else (value - target) / abs(target)
        rows.append({"name": name, "symbol": symbol, "value": float(fmt(value)), "target": target,
                     "relative_residual": None if residual is None else float(fmt(residual)), "unit": unit})
    return {
        "rows": rows,
        "convergence": {
            "iterations": report.iterations,
            "g_residual": float(fmt(report.g_residual)),
            "kappa_over_2chi_residual": float(fmt(report.ratio_residual)),
        },
        "config": config_mod.to_mapping(cfg),
    }


def cmd_design(cfg, out: Path):
    report = designer.design_report(qubit_from(cfg), resonator_from(cfg), targets_from(cfg), cfg.z_env_ohm,
                                    include_datasets=False)
    doc = design_document(report, cfg)
    path = out / "design.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    csv_path = write_csv(
        out / "design.csv",
        ["name", "symbol", "value", "target", "relative_residual", "unit"],
        [[r["name"], r["symbol"], r["value"], "" if r["target"] is None else r["target"],
          "" if r["relative_residual"] is None else r["relative_residual"], r["unit"]] for r in doc["rows"]],
    )
    return [path, csv_path]


def cmd_mc_validate(cfg, out: Path):
    rows = []
    failures = 0
    for k, (nbar, tm_us) in enumerate(cfg.mc_points):
        m = _measurement_base(cfg, nbar=nbar, t_m=tm_us * 1e-6)
        r = readout.monte_carlo_fidelity(m, cfg.mc_n_traj, dt=m.t_m / cfg.mc_samples, seed=cfg.seed + k)
        ok = r.deviation_sigmas <= 3.0
        failures += not ok
        rows.append([nbar, tm_us, r.analytic_F, r.empirical_F, r.stderr, r.deviation_sigmas, r.analytic_R,
                     r.empirical_R, "pass" if ok else "fail"])
    header = ["nbar", "t_m_us", "analytic_F", "empirical_F", "stderr", "sigmas", "analytic_R", "empirical_R", "status"]
    path = write_csv(out / "mc_validate.csv", header, rows)
    if failures:
        log.warning("%d of %d Monte Carlo points deviate by more than 3 sigma", failures, len(rows))
    return [path]


COMMANDS = {
    "t1-spectrum": cmd_t1_spectrum,
    "coupling-sweep": cmd_coupling_sweep,
    "snr-map": cmd_snr_map,
    "fidelity-map": cmd_fidelity_map,
    "design": cmd_design,
    "mc-validate": cmd_mc_validate,
}


def build_parser():
    p = argparse.ArgumentParser(prog="purcell-notch", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", type=Path, help="TOML run configuration (defaults: reference design)")
    p.add_argument("--out", type=Path, help="output directory (overrides output_dir)")
    p.add_argument("--seed", type=int, help="random seed (overrides seed)")
    p.add_argument("--convention", choices=("paper", "angular"), help="rate convention for readout times")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = config_mod.parse_config(args.config) if args.config else config_mod.RunConfig()
        cfg = config_mod.with_overrides(cfg, seed=args.seed, convention=args.convention)
        out = args.out if args.out is not None else Path(cfg.output_dir)
        for path in COMMANDS[args.command](cfg, out):
            log.info("wrote %s", path)
    except PurcellNotchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()

"""Capacitor synthesis for the combined readout/filter circuit.

The notch capacitor has a closed form. The two coupling capacitors are found
by damped alternating one-dimensional Newton steps: C'_q is moved to hit the
target coupling g, C'_kappa to hit the target kappa/(2 chi). Each update works
on the logarithm of the capacitance so iterates stay positive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy import optimize

from purcell_notch import cqed
from purcell_notch.errors import ConvergenceError, DomainError, InfeasibleError, SearchError
from purcell_notch.netcore import CouplingSet

TWO_PI = 2.0 * math.pi
FF = 1e-15

DEFAULT_CF_SWEEP = (0.0, 0.25 * FF, 0.5 * FF, 1.0 * FF, 2.0 * FF)


@dataclass(frozen=True)
class DesignTargets:
    omega_ge_target: float
    g_target: float
    kappa_over_2chi_target: float = 1.0
    t1_thresholds: Sequence[float] = (1e-3, 10e-3)
    cf_min: float = 0.05 * FF

    def check(self, res: cqed.ResonatorParams):
        detuning = abs(self.omega_ge_target - res.omega_r)
        if not self.g_target > 0:
            raise InfeasibleError("target coupling must be positive")
        if not self.g_target < detuning / 5:
            raise InfeasibleError(
                f"g target {self.g_target / TWO_PI / 1e6:.1f} MHz violates the dispersive guard "
                f"|omega_ge - omega_R|/5 = {detuning / 5 / TWO_PI / 1e6:.1f} MHz"
            )
        if not self.kappa_over_2chi_target > 0:
            raise InfeasibleError("kappa/2chi target must be positive")


def solve_filter_cap(res: cqed.ResonatorParams, omega_f_target: float) -> float:
    """Filter capacitance C'_F that puts the notch at ``omega_f_target``."""
    if not 0 < omega_f_target < res.omega_r:
        raise InfeasibleError("the notch must lie strictly below the bare resonator frequency")
    return 1.0 / (res.l_r * omega_f_target**2) - res.c_r


def _ratio(q, res, c):
    g = cqed.g_exact(q, res, c)
    chi = cqed.transmon_chi(g, q.omega_ge - res.omega_r, q.delta_anh)
    kappa = cqed.kappa_exact(q, res, c)
    return g, kappa, chi, kappa / (2.0 * abs(chi))


def _initial_guess(q, res, targets, z_env):
    cq = 2.0 * targets.g_target / math.sqrt(q.omega_ge * res.omega_r / (q.c_sigma * res.c_r))
    chi = cqed.transmon_chi(targets.g_target, q.omega_ge - res.omega_r, q.delta_anh)
    kappa = 2.0 * abs(chi) * targets.kappa_over_2chi_target
    ck = math.sqrt(kappa / (q.omega_ge**2 * res.omega_r * res.z_r * z_env))
    return cq, ck


@dataclass
class SolveResult:
    coupling: CouplingSet
    iterations: int
    g_residual: float
    ratio_residual: float
    history: List[tuple] = field(default_factory=list)


def solve_couplings(
    q: cqed.TransmonParams,
    res: cqed.ResonatorParams,
    targets: DesignTargets,
    z_env: float = 50.0,
    damping: float = 0.5,
    tol: float = 1e-4,
    max_iter: int = 200,
) -> SolveResult:
    targets.check(res)
    q = q.tuned_to(targets.omega_ge_target)
    cf_p = solve_filter_cap(res, targets.omega_ge_target)
    cq_p, ck_p = _initial_guess(q, res, targets, z_env)
    cq_p, ck_p = cq_p * (1 + (cq_p + ck_p) / cf_p), ck_p * (1 + (cq_p + ck_p) / cf_p)

    def coupling(cq, ck):
        return CouplingSet.from_y(cf_p, cq, ck, z_env)

    def g_res(log_cq, ck):
        return cqed.g_exact(q, res, coupling(math.exp(log_cq), ck)) / targets.g_target - 1.0

    def k_res(cq, log_ck):
        return _ratio(q, res, coupling(cq, math.exp(log_ck)))[3] / targets.kappa_over_2chi_target - 1.0

    def newton_step(fun, x, r, h=1e-4):
        slope = (fun(x + h) - fun(x - h)) / (2 * h)
        if slope == 0 or not math.isfinite(slope):
            raise ConvergenceError("vanishing sensitivity in coupling solve")
        # cap each log-step so one poor slope cannot throw the iterate away
        return x - damping * max(-1.0, min(1.0, r / slope))

    history = []
    rg = rk = math.inf
    for it in range(1, max_iter + 1):
        try:
            rg = g_res(math.log(cq_p), ck_p)
            cq_p = math.exp(newton_step(lambda x: g_res(x, ck_p), math.log(cq_p), rg))
            rk = k_res(cq_p, math.log(ck_p))
            ck_p = math.exp(newton_step(lambda x: k_res(cq_p, x), math.log(ck_p), rk))
            rg = g_res(math.log(cq_p), ck_p)
            rk = k_res(cq_p, math.log(ck_p))
        except (SearchError, DomainError) as exc:
            raise ConvergenceError(f"coupling solve failed at iteration {it}: {exc}", it, (rg, rk)) from exc
        history.append((cq_p, ck_p, rg, rk))
        if abs(rg) < tol and abs(rk) < tol:
            c = coupling(cq_p, ck_p)
            if c.delta.cf < targets.cf_min:
                raise InfeasibleError(
                    f"design needs C_F = {c.delta.cf / FF:.3g} fF, below the {targets.cf_min / FF:.3g} fF floor"
                )
            return SolveResult(c, it, rg, rk, history)
    raise ConvergenceError(f"no convergence in {max_iter} iterations", max_iter, (rg, rk))


def filter_bandwidth(q, res, c: CouplingSet, t1_threshold: float, window: float = TWO_PI * 1e9) -> float:
    """Full width of the band around the notch where exact T1 exceeds the threshold."""
    wf = cqed.notch_frequency(res, c.require_y().cf)
    if not cqed.t1_exact(q, res, c, wf) > t1_threshold:
        raise SearchError("T1 at the notch does not exceed the threshold")

    def excess(w):
        t1 = cqed.t1_exact(q, res, c, w)
        return math.log(t1 / t1_threshold) if math.isfinite(t1) else 50.0

    def crossing(direction):
        step = TWO_PI * 1e5
        inner = wf
        while step <= window:
            w = wf + direction * step
            if excess(w) < 0:
                lo, hi = sorted((inner, w))
                return optimize.brentq(excess, lo, hi, xtol=1e-6 * TWO_PI, rtol=1e-14)
            inner = w
            step *= 2.0
        w = wf + direction * window
        if excess(w) < 0:
            lo, hi = sorted((inner, w))
            return optimize.brentq(excess, lo, hi, xtol=1e-6 * TWO_PI, rtol=1e-14)
        raise SearchError(f"T1 never drops below {t1_threshold} s within the search window")

    return crossing(+1) - crossing(-1)


# --------------------------------------------------------------------------
# report


@dataclass
class DesignReport:
    qubit: cqed.TransmonParams
    resonator: cqed.ResonatorParams
    coupling: CouplingSet
    targets: DesignTargets
    omega_f: float
    g: float
    kappa: float
    chi: float
    n_crit: float
    bandwidths: Dict[float, float]
    iterations: int
    g_residual: float
    ratio_residual: float
    datasets: Dict[str, dict] = field(default_factory=dict)

    @property
    def kappa_over_2chi(self):
        return self.kappa / (2.0 * abs(self.chi))

    def table(self):
        """Rows (name, symbol, value, unit) mirroring the parameter summary."""
        y, d = self.coupling.y, self.coupling.delta
        rows = [
            ("total_qubit_capacitance", "C_Sigma", self.qubit.c_sigma / FF, "fF"),
            ("qubit_inductance", "L_J", self.qubit.l_j / 1e-9, "nH"),
            ("qubit_frequency", "omega_ge/2pi", self.qubit.omega_ge / TWO_PI / 1e9, "GHz"),
            ("resonator_capacitance", "C_R", self.resonator.c_r / FF, "fF"),
            ("resonator_inductance", "L_R", self.resonator.l_r / 1e-9, "nH"),
            ("readout_frequency", "omega_R/2pi", self.resonator.omega_r / TWO_PI / 1e9, "GHz"),
            ("anharmonicity", "delta/2pi", self.qubit.delta_anh / TWO_PI / 1e6, "MHz"),
            ("environmental_impedance", "Z_env", self.coupling.z_env, "Ohm"),
            ("filter_capacitance_delta", "C_F", d.cf / FF, "fF"),
            ("filter_capacitance_y", "C'_F", y.cf / FF, "fF"),
        ]
        for thr, bw in sorted(self.bandwidths.items()):
            rows.append((f"filter_bandwidth_{thr * 1e3:g}ms", f"dw_F({thr * 1e3:g} ms)/2pi", bw / TWO_PI / 1e6, "MHz"))
        rows += [
            ("qubit_coupling_capacitance_delta", "C_q", d.cq / FF, "fF"),
            ("qubit_coupling_capacitance_y", "C'_q", y.cq / FF, "fF"),
            ("qubit_resonator_coupling", "g/2pi", self.g / TWO_PI / 1e6, "MHz"),
            ("resonator_coupling_capacitance_delta", "C_kappa", d.ckappa / FF, "fF"),
            ("resonator_coupling_capacitance_y", "C'_kappa", y.ckappa / FF, "fF"),
            ("photon_decay_rate", "kappa/2pi", self.kappa / TWO_PI / 1e6, "MHz"),
            ("dispersive_shift", "chi/2pi", abs(self.chi) / TWO_PI / 1e6, "MHz"),
            ("critical_photon_number", "n_crit", self.n_crit, ""),
            ("notch_frequency", "omega_F/2pi", self.omega_f / TWO_PI / 1e9, "GHz"),
            ("kappa_over_2chi", "kappa/2chi", self.kappa_over_2chi, ""),
        ]
        return rows


def t1_curves(q, res, c_q, c_kappa, cf_values, omegas, z_env=50.0):
    """Exact T1 spectra for a list of delta-topology filter capacitances."""
    out = {}
    for cf in cf_values:
        c = CouplingSet.from_delta(cf, c_q, c_kappa, z_env)
        out[cf] = cqed.t1_spectrum(q, res, c, omegas, topology="delta")
    return out


def g_curves(q, res, c_q, c_kappa, cf_values, omegas, z_env=50.0):
    """g versus qubit frequency for several C_F; L_J is retuned at each point."""
    out = {}
    for cf in cf_values:
        c = CouplingSet.from_delta(cf, c_q, c_kappa, z_env)
        out[cf] = np.array([cqed.g_exact(q.tuned_to(w), res, c) for w in omegas])
    return out


def g_curves_cq(q, res, c_f, c_kappa, cq_values, omegas, z_env=50.0):
    out = {}
    for cq in cq_values:
        c = CouplingSet.from_delta(c_f, cq, c_kappa, z_env)
        out[cq] = np.array([cqed.g_exact(q.tuned_to(w), res, c) for w in omegas])
    return out


def ratio_grid(q, res, c_kappa, cf_values, cq_values, z_env=50.0):
    """kappa/2chi at the qubit frequency of ``q`` over (C_F, C_q)."""
    grid = np.empty((len(cf_values), len(cq_values)))
    for i, cf in enumerate(cf_values):
        for j, cq in enumerate(cq_values):
            c = CouplingSet.from_delta(cf, cq, c_kappa, z_env)
            grid[i, j] = _ratio(q, res, c)[3]
    return grid


def design_report(
    q: cqed.TransmonParams,
    res: cqed.ResonatorParams,
    targets: DesignTargets,
    z_env: float = 50.0,
    cf_sweep: Sequence[float] = DEFAULT_CF_SWEEP,
    cq_sweep: Optional[Sequence[float]] = None,
    omegas: Optional[np.ndarray] = None,
    include_datasets: bool = True,
) -> DesignReport:
    solved = solve_couplings(q, res, targets, z_env)
    q = q.tuned_to(targets.omega_ge_target)
    c = solved.coupling
    g, kappa, chi, _ = _ratio(q, res, c)
    bandwidths = {thr: filter_bandwidth(q, res, c, thr) for thr in targets.t1_thresholds}
    report = DesignReport(
        qubit=q,
        resonator=res,
        coupling=c,
        targets=targets,
        omega_f=cqed.notch_frequency(res, c.y.cf),
        g=g,
        kappa=kappa,
        chi=chi,
        n_crit=cqed.critical_photon_number(g, q.omega_ge - res.omega_r),
        bandwidths=bandwidths,
        iterations=solved.iterations,
        g_residual=solved.g_residual,
        ratio_residual=solved.ratio_residual,
    )
    if include_datasets:
        d = c.delta
        if omegas is None:
            omegas = np.linspace(TWO_PI * 4.0e9, TWO_PI * 6.5e9, 2001)
        if cq_sweep is None:
            cq_sweep = tuple(d.cq * s for s in (0.5, 0.75, 1.0, 1.25, 1.5))
        g_omegas = omegas[(omegas > 0) & (omegas < res.omega_r)]
        report.datasets = {
            "t1_spectrum": {"omega": omegas, "curves": t1_curves(q, res, d.cq, d.ckappa, cf_sweep, omegas, z_env)},
            "coupling_sweep": {
                "omega": g_omegas,
                "by_cf": g_curves(q, res, d.cq, d.ckappa, cf_sweep, g_omegas, z_env),
                "by_cq": g_curves_cq(q, res, d.cf, d.ckappa, cq_sweep, g_omegas, z_env),
            },
            "snr_map": {
                "cf": tuple(cf_sweep),
                "cq": tuple(cq_sweep),
                "ratio": ratio_grid(q, res, d.ckappa, cf_sweep, cq_sweep, z_env),
            },
        }
    return report

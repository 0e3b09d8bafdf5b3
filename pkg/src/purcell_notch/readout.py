"""Steady-state dispersive measurement model and its Monte Carlo check.

Rates (``kappa``, ``chi``, ``drive_amp``) are stored as angular values in
rad/s. ``rate_convention`` decides what enters the rate-times-time products:

* ``"cyclic"``: the cyclic value ``kappa/2pi`` (in 1/s) is used. This is the
  convention behind the quoted measurement times (e.g. 1.09 us for 99 % at one
  photon with kappa/2pi = 5 MHz).
* ``"angular"``: the angular value is used directly; every t_m-dependent
  output then differs by exactly a factor 2pi.

Dimensionless ratios such as the photon number are unaffected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy import special

from purcell_notch.errors import DomainError

TWO_PI = 2.0 * math.pi
CONVENTIONS = ("cyclic", "angular")
CONTOUR_LEVELS = (0.95, 0.99, 0.999)


def rate_scale(convention: str) -> float:
    if convention == "cyclic":
        return 1.0 / TWO_PI
    if convention == "angular":
        return 1.0
    raise DomainError(f"unknown rate convention {convention!r}")


@dataclass(frozen=True)
class MeasurementConfig:
    """Parameters of one steady-state dispersive measurement.

    ``amp_added_noise`` is the amplifier's added noise A normalized by the
    gain; efficiency is 1/(1+2A). A = 0 models an ideal (noiseless) chain.
    ``quadrature_angle=None`` selects the quadrature holding all the pointer
    separation.
    """

    kappa: float
    chi: float
    drive_amp: float
    t_m: float
    amp_gain: float = 1.0
    amp_added_noise: float = 0.0
    quadrature_angle: Optional[float] = None
    rate_convention: str = "cyclic"

    def __post_init__(self):
        if not self.kappa > 0:
            raise DomainError("kappa must be positive")
        if not self.t_m > 0:
            raise DomainError("measurement time must be positive")
        if not self.amp_gain > 0:
            raise DomainError("amplifier gain must be positive")
        if not self.amp_added_noise >= 0:
            raise DomainError("added noise must be non-negative")
        if self.drive_amp < 0:
            raise DomainError("drive amplitude must be non-negative")
        rate_scale(self.rate_convention)

    @property
    def efficiency(self):
        return 1.0 / (1.0 + 2.0 * self.amp_added_noise)

    @classmethod
    def from_photons(cls, kappa, chi, nbar, t_m, efficiency=1.0, **kwargs):
        """Build a config whose drive gives ``nbar`` photons at efficiency ``efficiency``."""
        if not 0 < efficiency <= 1:
            raise DomainError("efficiency must lie in (0, 1]")
        if nbar < 0:
            raise DomainError("photon number must be non-negative")
        drive = math.sqrt(nbar * (kappa**2 / 4 + chi**2) / 2.0)
        added = (1.0 / efficiency - 1.0) / 2.0
        return cls(kappa=kappa, chi=chi, drive_amp=drive, t_m=t_m, amp_added_noise=added, **kwargs)

    def with_photons(self, nbar):
        drive = math.sqrt(nbar * (self.kappa**2 / 4 + self.chi**2) / 2.0)
        return replace(self, drive_amp=drive)


def mean_photons(cfg: MeasurementConfig) -> float:
    return 2.0 * cfg.drive_amp**2 / (cfg.kappa**2 / 4 + cfg.chi**2)


def drive_for_photons(nbar, kappa, chi):
    return math.sqrt(nbar * (kappa**2 / 4 + chi**2) / 2.0)


def pointer_states(cfg: MeasurementConfig):
    """Steady-state resonator amplitudes (alpha_0, alpha_1) for a drive centred
    between the two qubit-state-dependent resonator frequencies."""
    a0 = -1j * cfg.drive_amp / (cfg.kappa / 2 + 1j * cfg.chi)
    a1 = -1j * cfg.drive_amp / (cfg.kappa / 2 - 1j * cfg.chi)
    return a0, a1


def pointer_separation_norm(cfg: MeasurementConfig, integrated: bool = False, form: str = "nbar") -> float:
    """Squared pointer separation |beta|^2 in steady state.

    ``form="nbar"`` evaluates 2 chi^2 nbar / (kappa^2/4 + chi^2);
    ``form="drive"`` evaluates 4 chi^2 E^2 / (kappa^2/4 + chi^2)^2. They are
    algebraically identical. ``integrated=True`` multiplies by t_m using the
    configured rate convention's time unit (i.e. returns ||beta||_2^2).
    """
    k2 = cfg.kappa**2 / 4 + cfg.chi**2
    if form == "nbar":
        value = 2.0 * cfg.chi**2 * mean_photons(cfg) / k2
    elif form == "drive":
        value = 4.0 * cfg.chi**2 * cfg.drive_amp**2 / k2**2
    else:
        raise DomainError(f"unknown form {form!r}")
    if integrated:
        value *= cfg.t_m
    return value


def fisher_separation(cfg: MeasurementConfig) -> float:
    """R = 8 kappa t_m chi^2 nbar / ((1+2A)(kappa^2/4 + chi^2))."""
    k = cfg.kappa * rate_scale(cfg.rate_convention)
    info = cfg.chi**2 / (cfg.kappa**2 / 4 + cfg.chi**2)
    return 8.0 * k * cfg.t_m * info * mean_photons(cfg) / (1.0 + 2.0 * cfg.amp_added_noise)


def fisher_separation_matched(kappa, t_m, eta, nbar, convention="cyclic"):
    """R at kappa = 2 chi: 4 kappa t_m eta nbar."""
    return 4.0 * kappa * rate_scale(convention) * t_m * eta * nbar


def assignment_fidelity(R):
    """F = (1 + erf(sqrt(R/8)))/2. Accepts scalars or arrays."""
    r = np.asarray(R, dtype=float)
    if np.any(r < 0):
        raise DomainError("Fisher separation must be non-negative")
    f = 0.5 * (1.0 + special.erf(np.sqrt(r / 8.0)))
    return float(f) if np.ndim(f) == 0 else f


def matched_fidelity(kappa, t_m, eta, nbar, convention="cyclic"):
    """Assignment fidelity at kappa = 2 chi."""
    return assignment_fidelity(fisher_separation_matched(kappa, t_m, eta, nbar, convention))


def required_measurement_time(f_target, nbar, kappa, eta=1.0, convention="cyclic"):
    """Measurement time reaching ``f_target`` at kappa = 2 chi."""
    if not 0.5 < f_target < 1.0:
        raise DomainError(f"target fidelity must lie in (0.5, 1), got {f_target!r}")
    if not (nbar > 0 and kappa > 0 and eta > 0):
        raise DomainError("nbar, kappa and eta must be positive")
    x = special.erfinv(2.0 * f_target - 1.0)
    return float(2.0 * x**2 / (kappa * rate_scale(convention) * eta * nbar))


# --------------------------------------------------------------------------
# trajectories


def quadrature_noise_density(cfg: MeasurementConfig) -> float:
    """Variance of the recorded quadrature per unit bandwidth, G(1+2A)/4."""
    return cfg.amp_gain * (1.0 + 2.0 * cfg.amp_added_noise) / 4.0


def class_means(cfg: MeasurementConfig):
    """Mean recorded quadrature for the two preparations.

    Centred on the pointer midpoint, so the means are +-sqrt(G kappa)|beta|/2
    on the optimal quadrature.
    """
    a0, a1 = pointer_states(cfg)
    beta = a0 - a1
    theta = np.angle(beta) if cfg.quadrature_angle is None else cfg.quadrature_angle
    centre = (a0 + a1) / 2
    amp = math.sqrt(cfg.amp_gain * cfg.kappa * rate_scale(cfg.rate_convention))
    rot = np.exp(-1j * theta)
    return amp * (rot * (a0 - centre)).real, amp * (rot * (a1 - centre)).real


def steady_state_means(cfg: MeasurementConfig, dt: float):
    n = n_samples(cfg.t_m, dt)
    m0, m1 = class_means(cfg)
    return np.full(n, m0), np.full(n, m1)


def lda_kernel(mean_traj_0, mean_traj_1, noise_var):
    """Optimal linear weights (<I0> - <I1>) / var for identical Gaussian class noise."""
    m0 = np.asarray(mean_traj_0, dtype=float)
    m1 = np.asarray(mean_traj_1, dtype=float)
    if m0.shape != m1.shape:
        raise DomainError("class-mean trajectories must share a time grid")
    var = np.asarray(noise_var, dtype=float)
    if np.any(var <= 0):
        raise DomainError("noise variance must be positive")
    return (m0 - m1) / var


def n_samples(t_m, dt):
    if not (dt > 0 and t_m > 0):
        raise DomainError("dt and t_m must be positive")
    # guard against t_m/dt landing a rounding error above an integer
    return int(math.ceil(t_m / dt - 1e-9))


@dataclass(frozen=True)
class TrajectoryBatch:
    records: np.ndarray
    labels: np.ndarray
    dt: float
    seed: int

    @property
    def n_traj(self):
        return self.records.shape[0]


_CHUNK = 8192


def simulate_trajectories(cfg: MeasurementConfig, n_traj: int, dt: float, seed: int) -> TrajectoryBatch:
    """Sampled quadrature records, half prepared in |0> and half in |1>.

    Each sample carries white noise of variance G(1+2A)/(4 dt), so integrated
    statistics do not depend on dt. Random streams are keyed by
    (seed, label, chunk) and are therefore reproducible bit for bit.
    """
    if n_traj < 2:
        raise DomainError("need at least two trajectories")
    n = n_samples(cfg.t_m, dt)
    sigma = math.sqrt(quadrature_noise_density(cfg) / dt)
    means = class_means(cfg)
    counts = (n_traj - n_traj // 2, n_traj // 2)
    blocks, labels = [], []
    for label, count in enumerate(counts):
        for chunk, start in enumerate(range(0, count, _CHUNK)):
            size = min(_CHUNK, count - start)
            rng = np.random.default_rng(np.random.SeedSequence([seed, label, chunk]))
            blocks.append(means[label] + sigma * rng.standard_normal((size, n)))
        labels.append(np.full(count, label, dtype=np.int8))
    return TrajectoryBatch(np.vstack(blocks), np.concatenate(labels), dt, seed)


@dataclass(frozen=True)
class MonteCarloResult:
    empirical_F: float
    empirical_R: float
    stderr: float
    analytic_F: float
    analytic_R: float
    n_traj: int

    @property
    def deviation_sigmas(self):
        return abs(self.empirical_F - self.analytic_F) / self.stderr if self.stderr > 0 else 0.0


def integrate_records(batch: TrajectoryBatch, kernel):
    return batch.records @ np.asarray(kernel, dtype=float) * batch.dt


def classify(scores, labels):
    """Midpoint-threshold classification; returns (fidelity, fisher separation)."""
    s0, s1 = scores[labels == 0], scores[labels == 1]
    mu0, mu1 = s0.mean(), s1.mean()
    var0 = s0.var(ddof=1)
    sep = (mu0 - mu1) ** 2 / var0 if var0 > 0 else 0.0
    threshold = 0.5 * (mu0 + mu1)
    if mu0 >= mu1:
        p0, p1 = np.mean(s0 > threshold), np.mean(s1 <= threshold)
    else:
        p0, p1 = np.mean(s0 < threshold), np.mean(s1 >= threshold)
    return 0.5 * (p0 + p1), sep


def monte_carlo_fidelity(cfg: MeasurementConfig, n_traj: int, dt: Optional[float] = None, seed: int = 0, kernel=None):
    """Empirical assignment fidelity from simulated trajectories.

    ``dt`` defaults to t_m/50. ``kernel`` overrides the LDA weights (used to
    check that no other linear filter beats them).
    """
    if dt is None:
        dt = cfg.t_m / 50
    if dt > cfg.t_m:
        raise DomainError("dt must not exceed the measurement time")
    batch = simulate_trajectories(cfg, n_traj, dt, seed)
    if kernel is None:
        m0, m1 = steady_state_means(cfg, dt)
        kernel = lda_kernel(m0, m1, quadrature_noise_density(cfg))
        if not np.any(kernel):
            # no signal: any nonzero kernel gives an uninformative score
            kernel = np.ones_like(kernel)
    scores = integrate_records(batch, kernel)
    f_emp, r_emp = classify(scores, batch.labels)
    r_an = fisher_separation(cfg)
    f_an = assignment_fidelity(r_an)
    stderr = math.sqrt(max(f_an * (1 - f_an), 1e-300) / n_traj)
    return MonteCarloResult(float(f_emp), float(r_emp), stderr, f_an, r_an, n_traj)


# --------------------------------------------------------------------------
# fidelity map


@dataclass(frozen=True)
class FidelityMap:
    nbar: np.ndarray
    t_m: np.ndarray
    fidelity: np.ndarray  # shape (len(nbar), len(t_m))
    contours: dict  # level -> t_m needed at each nbar
    n_crit: Optional[float]


def fidelity_map(cfg_base: MeasurementConfig, nbar_grid, tm_grid, n_crit=None) -> FidelityMap:
    """Assignment fidelity over a photon-number / measurement-time grid."""
    nbar = np.asarray(nbar_grid, dtype=float)
    tm = np.asarray(tm_grid, dtype=float)
    for name, grid in (("nbar", nbar), ("t_m", tm)):
        if grid.ndim != 1 or grid.size == 0 or np.any(grid < 0) or np.any(np.diff(grid) <= 0):
            raise DomainError(f"{name} grid must be non-negative and strictly increasing")
    k = cfg_base.kappa * rate_scale(cfg_base.rate_convention)
    info = cfg_base.chi**2 / (cfg_base.kappa**2 / 4 + cfg_base.chi**2)
    eta = cfg_base.efficiency
    R = 8.0 * k * eta * info * nbar[:, None] * tm[None, :]
    contours = {}
    for level in CONTOUR_LEVELS:
        x = special.erfinv(2.0 * level - 1.0)
        with np.errstate(divide="ignore"):
            contours[level] = np.where(nbar > 0, 8.0 * x**2 / (8.0 * k * eta * info * np.where(nbar > 0, nbar, 1)), np.inf)
    return FidelityMap(nbar, tm, assignment_fidelity(R), contours, n_crit)

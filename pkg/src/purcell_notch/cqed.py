"""Circuit-QED analysis of the combined readout resonator / notch filter.

All frequencies are angular (rad/s), capacitances in farads, inductances in
henries, impedances in ohms.

Node numbering used by the nodal (delta-topology) circuits::

    1  qubit island          L_J || C_Sigma to ground (when included)
    2  resonator             L_R || C_R to ground
    3  environment port      Z_env to ground

    C_q: 1-2     C_kappa: 2-3     C_F: 1-3
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np
from scipy import optimize

from purcell_notch import netcore
from purcell_notch.errors import DomainError, PassivityError, SearchError, SingularityError
from purcell_notch.netcore import (
    OPEN,
    Capacitor,
    CouplingSet,
    Inductor,
    NodalCircuit,
    Parallel,
    Resistor,
    Series,
    Short,
)

TWO_PI = 2.0 * math.pi

# Re[Y] below this is treated as zero dissipation
ADMITTANCE_FLOOR = 1e-25

QUBIT, RESONATOR, ENVIRONMENT = 1, 2, 3


@dataclass(frozen=True)
class TransmonParams:
    """Qubit treated as a linear L_J || C_Sigma oscillator with anharmonicity."""

    c_sigma: float
    l_j: float
    omega_ge: float
    delta_anh: float

    def __post_init__(self):
        if not (self.c_sigma > 0 and self.l_j > 0 and self.omega_ge > 0):
            raise DomainError("c_sigma, l_j and omega_ge must be positive")
        if not self.delta_anh < 0:
            raise DomainError(f"transmon anharmonicity must be negative, got {self.delta_anh!r}")
        expected = 1.0 / math.sqrt(self.l_j * self.c_sigma)
        if abs(expected - self.omega_ge) > 1e-9 * expected:
            raise DomainError("omega_ge is inconsistent with 1/sqrt(l_j*c_sigma)")

    @classmethod
    def from_frequency(cls, c_sigma, omega_ge, delta_anh):
        return cls(c_sigma, 1.0 / (omega_ge**2 * c_sigma), omega_ge, delta_anh)

    @classmethod
    def from_inductance(cls, c_sigma, l_j, delta_anh):
        return cls(c_sigma, l_j, 1.0 / math.sqrt(l_j * c_sigma), delta_anh)

    def tuned_to(self, omega_ge):
        """Same qubit retuned by changing L_J; C_Sigma stays fixed."""
        return replace(self, l_j=1.0 / (omega_ge**2 * self.c_sigma), omega_ge=omega_ge)


@dataclass(frozen=True)
class ResonatorParams:
    l_r: float
    c_r: float

    def __post_init__(self):
        if not (self.l_r > 0 and self.c_r > 0):
            raise DomainError("resonator L and C must be positive")

    @property
    def omega_r(self):
        return 1.0 / math.sqrt(self.l_r * self.c_r)

    @property
    def z_r(self):
        return math.sqrt(self.l_r / self.c_r)


class DispersiveShifts(NamedTuple):
    chi0: float
    chi1: float
    chi: float


@dataclass(frozen=True)
class DispersiveParams:
    g: float
    detuning: float
    chi0: float
    chi1: float
    chi: float
    kappa: float
    n_crit: float

    @property
    def dispersive_valid(self):
        return abs(self.g / self.detuning) < 1.0

    @property
    def kappa_over_2chi(self):
        return self.kappa / (2.0 * abs(self.chi))


# --------------------------------------------------------------------------
# notch subcircuit


def notch_frequency(res: ResonatorParams, cf_prime: float) -> float:
    if not cf_prime > 0:
        raise DomainError("filter capacitance must be positive")
    return 1.0 / math.sqrt(res.l_r * (res.c_r + cf_prime))


def z_sub(res: ResonatorParams, cf_prime: float, omega: float):
    """Impedance to ground of the filter capacitor in series with the LC resonator.

    Closed form; exactly ``0j`` at the notch and :data:`~netcore.OPEN` at the
    bare resonator frequency.
    """
    if not omega > 0:
        raise DomainError("omega must be positive")
    wr = res.omega_r
    wf = notch_frequency(res, cf_prime)
    den = omega * (wr**2 - wf**2) * (wr**2 - omega**2)
    if den == 0:
        return OPEN
    return complex(0.0, -(wr**3) * res.z_r * (wf**2 - omega**2) / den)


def z_sub_network(res: ResonatorParams, cf_prime: float):
    return Series(Capacitor(cf_prime), Parallel(Inductor(res.l_r), Capacitor(res.c_r)))


def qubit_port_network(res: ResonatorParams, c: CouplingSet, with_filter: bool = True):
    """Series/parallel tree of everything the qubit sees in the star topology.

    ``with_filter=False`` replaces the filter capacitor by a wire, giving the
    plain dispersive-readout circuit.
    """
    y = c.require_y()
    filt = Capacitor(y.cf) if with_filter else Short()
    sub = Series(filt, Parallel(Inductor(res.l_r), Capacitor(res.c_r)))
    load = Series(Capacitor(y.ckappa), Resistor(c.z_env))
    return Series(Capacitor(y.cq), Parallel(sub, load))


def qubit_admittance(q: TransmonParams, res: ResonatorParams, c: CouplingSet, omega: float) -> complex:
    """Admittance seen by the qubit in the star topology (qubit elements excluded)."""
    y = c.require_y()
    zs = z_sub(res, y.cf, omega)
    z_load = complex(c.z_env, -1.0 / (omega * y.ckappa))
    z_q = netcore.series_z(complex(0.0, -1.0 / (omega * y.cq)), netcore.parallel_z(zs, z_load))
    return netcore.to_admittance(z_q)


def delta_circuit(q: TransmonParams, res: ResonatorParams, c: CouplingSet, include_qubit: bool = False):
    """Nodal model of the delta topology. Zero-valued capacitors are omitted."""
    d = c.delta
    branches = [
        (RESONATOR, 0, Parallel(Inductor(res.l_r), Capacitor(res.c_r))),
        (ENVIRONMENT, 0, Resistor(c.z_env)),
    ]
    for a, b, value in ((QUBIT, RESONATOR, d.cq), (RESONATOR, ENVIRONMENT, d.ckappa), (QUBIT, ENVIRONMENT, d.cf)):
        if value > 0:
            branches.append((a, b, Capacitor(value)))
    if include_qubit:
        branches.append((QUBIT, 0, Parallel(Inductor(q.l_j), Capacitor(q.c_sigma))))
    return NodalCircuit(branches)


def qubit_admittance_delta(q: TransmonParams, res: ResonatorParams, c: CouplingSet, omega: float) -> complex:
    """Same quantity as :func:`qubit_admittance`, evaluated on the delta topology."""
    if not omega > 0:
        raise DomainError("omega must be positive")
    return delta_circuit(q, res, c).driving_point_admittance(QUBIT, 1j * omega)


def t1_purcell(q: TransmonParams, y_q: complex) -> float:
    """Lifetime C_Sigma / Re[Y_q]; ``inf`` when Re[Y_q] is below the floor."""
    re = y_q.real
    if re < -ADMITTANCE_FLOOR:
        raise PassivityError(f"negative dissipation Re[Y]={re!r} S from a passive network")
    if re < ADMITTANCE_FLOOR:
        return math.inf
    return q.c_sigma / re


def t1_exact(q, res, c, omega, topology="auto"):
    """Purcell T1 at ``omega`` from the full admittance.

    ``topology`` is ``"y"``, ``"delta"`` or ``"auto"`` (star form when it is
    defined, otherwise delta).
    """
    if topology == "auto":
        topology = "y" if c.y is not None else "delta"
    if topology == "y":
        y_q = qubit_admittance(q, res, c, omega)
    elif topology == "delta":
        y_q = qubit_admittance_delta(q, res, c, omega)
    else:
        raise DomainError(f"unknown topology {topology!r}")
    return t1_purcell(q, y_q)


def t1_spectrum(q, res, c, omegas, topology="auto"):
    return np.array([t1_exact(q, res, c, float(w), topology) for w in omegas])


# --------------------------------------------------------------------------
# coupling


def _renormalized(q, c, literal_labels):
    d = c.delta
    c_sigma_bar = q.c_sigma + d.cf
    if literal_labels:
        c_r_bar_extra, c_q_bar, c_k_bar = d.cq, d.ckappa, d.ckappa
    else:
        # grounding the environment node: C_kappa loads the resonator and C_q
        # is the off-diagonal term of the two-node capacitance matrix
        c_r_bar_extra, c_q_bar, c_k_bar = d.ckappa, d.cq, d.cq
    return c_sigma_bar, c_r_bar_extra, c_q_bar, c_k_bar


def g_exact(q: TransmonParams, res: ResonatorParams, c: CouplingSet, literal_labels: bool = False) -> float:
    """Exact qubit-resonator coupling of the two-mode capacitance network.

    By default the coupling capacitor is C_q and C_kappa renormalizes the
    resonator, which is the assignment consistent with the tabulated design
    (g/2pi = 150 MHz). ``literal_labels=True`` swaps the roles of C_q and
    C_kappa as in the closed form's printed labels.
    """
    c_sigma_bar, extra, c_q_bar, c_k_bar = _renormalized(q, c, literal_labels)
    c_r_bar = res.c_r + extra
    det = c_sigma_bar * c_r_bar + c_sigma_bar * c_k_bar + c_q_bar * c_r_bar
    c1 = det / (c_r_bar + c_q_bar)
    c2 = det / (c_sigma_bar + c_q_bar)
    z1 = math.sqrt(q.l_j / c1)
    z2 = math.sqrt(res.l_r / c2)
    return c_q_bar / (2.0 * math.sqrt(z1 * z2) * det)


def g_approx(q: TransmonParams, res: ResonatorParams, c: CouplingSet) -> float:
    """Weak-coupling estimate (C_q/2) sqrt(w_ge w_R / (C_Sigma C_R))."""
    return 0.5 * c.delta.cq * math.sqrt(q.omega_ge * res.omega_r / (q.c_sigma * res.c_r))


# --------------------------------------------------------------------------
# linewidth


def kappa_approx_simple(q: TransmonParams, res: ResonatorParams, c_kappa: float, z_env: float) -> float:
    return q.omega_ge**2 * res.omega_r * res.z_r * c_kappa**2 * z_env


def kappa_effective(res: ResonatorParams, c: CouplingSet) -> float:
    """Linewidth from the series-to-parallel equivalent load at the resonator."""
    y = c.require_y()
    w = res.omega_r
    inv = 1.0 / y.ckappa + 1.0 / y.cf
    r_eff = c.z_env + inv**2 / (w**2 * c.z_env)
    c_eff = inv / (w**2 * c.z_env**2 + inv**2)
    return w / r_eff * math.sqrt(res.l_r / (res.c_r + c_eff))


def _resonator_node_admittance(circuit, omega):
    return circuit.driving_point_admittance(RESONATOR, 1j * omega)


def loaded_resonator_frequency(q, res, c, window=(0.7, 1.0), points=2001):
    """Zero crossing of Im[Y] at the resonator node, searched just below omega_R."""
    circuit = delta_circuit(q, res, c, include_qubit=True)
    wr = res.omega_r
    # the bare resonance itself is a zero of the LC branch admittance, so
    # stop the grid a hair short of it
    grid = np.linspace(window[0] * wr, window[1] * wr * (1 - 1e-12), points)
    im = np.array([_resonator_node_admittance(circuit, w).imag for w in grid])
    crossings = np.nonzero((im[:-1] < 0) & (im[1:] >= 0))[0]
    if crossings.size == 0:
        raise SearchError("no resonator-admittance zero crossing below omega_R")
    k = crossings[-1]
    if im[k + 1] == 0:
        return float(grid[k + 1])
    return optimize.brentq(
        lambda w: _resonator_node_admittance(circuit, w).imag, grid[k], grid[k + 1], xtol=1e-6, rtol=1e-15
    )


def natural_frequency(q, res, c, s0=None):
    """Complex natural frequency of the loaded resonator mode (s = -kappa/2 + j w)."""
    circuit = delta_circuit(q, res, c, include_qubit=True)
    if s0 is None:
        w0 = loaded_resonator_frequency(q, res, c)
        k0 = kappa_approx_simple(q, res, c.delta.ckappa, c.z_env)
        s0 = complex(-k0 / 2, w0)
    scale = abs(s0)
    try:
        s = optimize.newton(
            lambda z: circuit.driving_point_admittance(RESONATOR, z * scale), s0 / scale, tol=1e-15, maxiter=200
        )
    except (RuntimeError, OverflowError) as exc:
        raise SearchError(f"natural-frequency search failed: {exc}") from exc
    s = complex(s) * scale
    if not (s.real <= 0 and abs(s.imag - s0.imag) < 0.05 * abs(s0.imag)):
        raise SearchError(f"natural-frequency search converged to an unrelated root {s!r}")
    return s


def _env_port_response(circuit_wo_load, z_env, omega):
    """Re[1/(Z_env + Z_in)]: power transfer into the network from a matched source."""
    y_in = circuit_wo_load.driving_point_admittance(ENVIRONMENT, 1j * omega)
    z_in = netcore.from_admittance(y_in)
    if z_in is OPEN:
        return 0.0
    return (1.0 / (z_env + z_in)).real


def _circuit_without_load(q, res, c):
    d = c.delta
    branches = [
        (RESONATOR, 0, Parallel(Inductor(res.l_r), Capacitor(res.c_r))),
        (QUBIT, 0, Parallel(Inductor(q.l_j), Capacitor(q.c_sigma))),
    ]
    for a, b, value in ((QUBIT, RESONATOR, d.cq), (RESONATOR, ENVIRONMENT, d.ckappa), (QUBIT, ENVIRONMENT, d.cf)):
        if value > 0:
            branches.append((a, b, Capacitor(value)))
    return NodalCircuit(branches)


def kappa_exact(q: TransmonParams, res: ResonatorParams, c: CouplingSet, method: str = "fwhm") -> float:
    """Loaded resonator linewidth of the full circuit.

    ``"fwhm"``: full width at half maximum of the power delivered from the
    environment port, ``Re[1/(Z_env + Z_in(w))]``, around the resonator mode.
    ``"pole"``: ``-2 Re(s)`` of the complex natural frequency.
    """
    if c.delta.ckappa <= 0:
        raise SearchError("resonator is not coupled to the environment")
    s = natural_frequency(q, res, c)
    if method == "pole":
        return -2.0 * s.real
    if method != "fwhm":
        raise DomainError(f"unknown kappa method {method!r}")

    circuit = _circuit_without_load(q, res, c)
    z_env = c.z_env

    def response(w):
        return _env_port_response(circuit, z_env, w)

    w_guess = s.imag
    half_guess = max(-s.real, 1e-9 * w_guess)
    peak = optimize.minimize_scalar(
        lambda w: -response(w),
        bracket=(w_guess - half_guess, w_guess, w_guess + half_guess),
        tol=1e-12,
    )
    w_peak = peak.x
    half = response(w_peak) / 2.0

    def edge(direction):
        step = half_guess
        for _ in range(60):
            w_far = w_peak + direction * step
            if response(w_far) < half:
                lo, hi = sorted((w_peak, w_far))
                return optimize.brentq(lambda w: response(w) - half, lo, hi, xtol=1e-9 * half_guess, rtol=1e-15)
            step *= 2.0
        raise SearchError("half-maximum point not found")

    return edge(+1) - edge(-1)


# --------------------------------------------------------------------------
# dispersive shifts


def chi_shifts(g: float, detuning: float, delta_anh: float) -> DispersiveShifts:
    if detuning == 0 or detuning + delta_anh == 0:
        raise SingularityError("qubit straddles a resonance (detuning = 0 or -anharmonicity)")
    chi0 = -(g**2) / detuning
    chi1 = g**2 * (delta_anh - detuning) / (detuning * (detuning + delta_anh))
    return DispersiveShifts(chi0, chi1, (chi1 - chi0) / 2.0)


def transmon_chi(g, detuning, delta_anh):
    """Closed form g^2 delta / (Delta (Delta + delta)); equal to (chi1 - chi0)/2."""
    if detuning == 0 or detuning + delta_anh == 0:
        raise SingularityError("qubit straddles a resonance")
    return g**2 * delta_anh / (detuning * (detuning + delta_anh))


def critical_photon_number(g, detuning):
    return detuning**2 / (4.0 * g**2)


def dispersive_params(q, res, c, g=None, kappa=None) -> DispersiveParams:
    """Bundle g, detuning, shifts, linewidth and n_crit for a circuit.

    ``g`` and ``kappa`` default to :func:`g_exact` and :func:`kappa_exact`.
    """
    if g is None:
        g = g_exact(q, res, c)
    if kappa is None:
        kappa = kappa_exact(q, res, c)
    detuning = q.omega_ge - res.omega_r
    shifts = chi_shifts(g, detuning, q.delta_anh)
    return DispersiveParams(
        g=g,
        detuning=detuning,
        chi0=shifts.chi0,
        chi1=shifts.chi1,
        chi=shifts.chi,
        kappa=kappa,
        n_crit=critical_photon_number(g, detuning),
    )


# --------------------------------------------------------------------------
# closed-form lifetime approximations and filter functions


def t1_cqed_approx(kappa: float, g: float, res: ResonatorParams, omega: float) -> float:
    wr = res.omega_r
    return wr * (wr**2 - omega**2) ** 2 / (4.0 * kappa * g**2 * omega**3)


def filter_function(res: ResonatorParams, omega_f: float, omega: float) -> float:
    wr = res.omega_r
    return wr**2 * (omega_f**2 - omega**2) / (omega**2 * (wr**2 - omega_f**2))


def cavity_filter_function(beta_ratio: float, res: ResonatorParams, omega: float) -> float:
    """beta w^2 / (w_R^2 - w^2) with beta = C_q / C_R; ``inf`` at w_R."""
    den = res.omega_r**2 - omega**2
    if den == 0:
        return math.inf
    return beta_ratio * omega**2 / den


def t1_cap(q: TransmonParams, c_kappa: float, z_env: float, omega: float) -> float:
    """Lifetime of a qubit tied to the load through a single capacitor."""
    if c_kappa == 0:
        return math.inf
    return q.c_sigma / (omega**2 * c_kappa**2 * z_env)


def t1_filter_approx(res: ResonatorParams, omega_f: float, kappa: float, g: float, omega: float) -> float:
    """Closed-form lifetime with the notch; ``inf`` at the notch frequency."""
    wr = res.omega_r
    den = 4.0 * kappa * g**2 * wr**3 * (omega_f**2 - omega**2) ** 2
    if den == 0:
        return math.inf
    return omega * (wr**2 - omega_f**2) ** 2 * (wr**2 - omega**2) ** 2 / den

"""Complex-impedance algebra for lumped one-port networks.

Networks are immutable trees of R/L/C leaves joined in series or parallel.
Evaluation happens at a complex frequency ``s`` (``s = j*omega`` on the real
frequency axis), which lets the same trees be used for steady-state sweeps and
for natural-frequency searches in the complex plane.

Open circuits are represented by the :data:`OPEN` sentinel rather than by an
infinity, so ``Parallel(z, Open())`` evaluates to exactly ``z``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Union

import numpy as np

from purcell_notch.errors import DomainError


class _OpenCircuit:
    """Infinite impedance / zero admittance."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "OPEN"

    def __reduce__(self):
        return (_OpenCircuit, ())


OPEN = _OpenCircuit()

# complex for finite values, OPEN otherwise
ComplexImpedance = Union[complex, _OpenCircuit]
ComplexAdmittance = complex


def is_open(z) -> bool:
    return z is OPEN


def to_admittance(z: ComplexImpedance) -> complex:
    if z is OPEN:
        return 0j
    if z == 0:
        raise DomainError("a short circuit has no finite admittance")
    return 1.0 / z


def from_admittance(y: complex) -> ComplexImpedance:
    if y == 0:
        return OPEN
    return 1.0 / y


def series_z(*zs: ComplexImpedance) -> ComplexImpedance:
    """Series combination of already-evaluated impedances."""
    total = 0j
    for z in zs:
        if z is OPEN:
            return OPEN
        total += z
    return total


def parallel_z(*zs: ComplexImpedance) -> ComplexImpedance:
    """Parallel combination of already-evaluated impedances."""
    y_total = 0j
    for z in zs:
        if z is OPEN:
            continue
        if z == 0:
            return 0j
        y_total += 1.0 / z
    return from_admittance(y_total)


# --------------------------------------------------------------------------
# network tree


@dataclass(frozen=True)
class _Element:
    value: float

    def __post_init__(self):
        v = self.value
        if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
            raise DomainError(f"{type(self).__name__} value must be positive and finite, got {v!r}")


@dataclass(frozen=True)
class Resistor(_Element):
    """Resistance in ohms."""


@dataclass(frozen=True)
class Capacitor(_Element):
    """Capacitance in farads."""


@dataclass(frozen=True)
class Inductor(_Element):
    """Inductance in henries."""


@dataclass(frozen=True)
class Short:
    pass


@dataclass(frozen=True)
class Open:
    pass


class _Combinator:
    __slots__ = ("children",)

    def __init__(self, *children):
        if len(children) == 1 and isinstance(children[0], (list, tuple)):
            children = tuple(children[0])
        if len(children) < 2:
            raise DomainError(f"{type(self).__name__} needs at least two children")
        for c in children:
            if not isinstance(c, NETWORK_TYPES):
                raise DomainError(f"not a network node: {c!r}")
        object.__setattr__(self, "children", tuple(children))

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    def __eq__(self, other):
        return type(self) is type(other) and self.children == other.children

    def __hash__(self):
        return hash((type(self).__name__, self.children))

    def __repr__(self):
        return f"{type(self).__name__}({', '.join(map(repr, self.children))})"


class Series(_Combinator):
    pass


class Parallel(_Combinator):
    pass


NETWORK_TYPES = (Resistor, Capacitor, Inductor, Short, Open, Series, Parallel)
OnePortNetwork = Union[Resistor, Capacitor, Inductor, Short, Open, Series, Parallel]


def _check_omega(omega):
    if not (math.isfinite(omega) and omega > 0):
        raise DomainError(f"angular frequency must be positive and finite, got {omega!r}")


def element_impedance(element, omega: float) -> complex:
    """Impedance of a single R, L or C leaf at angular frequency ``omega``."""
    _check_omega(omega)
    if not isinstance(element, (Resistor, Capacitor, Inductor)):
        raise DomainError(f"not an R/L/C element: {element!r}")
    return _leaf_impedance_s(element, 1j * omega)


def _leaf_impedance_s(element, s: complex) -> complex:
    if isinstance(element, Resistor):
        return complex(element.value)
    if isinstance(element, Capacitor):
        return 1.0 / (s * element.value)
    return s * element.value


def impedance_s(net: OnePortNetwork, s: complex) -> ComplexImpedance:
    """Evaluate ``net`` at complex frequency ``s`` (rad/s)."""
    if isinstance(net, (Resistor, Capacitor, Inductor)):
        return _leaf_impedance_s(net, s)
    if isinstance(net, Short):
        return 0j
    if isinstance(net, Open):
        return OPEN
    if isinstance(net, Series):
        total = 0j
        for child in net.children:
            z = impedance_s(child, s)
            if z is OPEN:
                return OPEN
            total += z
        return total
    if isinstance(net, Parallel):
        y_total = 0j
        for child in net.children:
            z = impedance_s(child, s)
            if z is OPEN:
                continue
            if z == 0:
                return 0j
            y_total += 1.0 / z
        return from_admittance(y_total)
    raise DomainError(f"not a network node: {net!r}")


def compose(net: OnePortNetwork, omega: float) -> ComplexImpedance:
    """Impedance of the network tree at real angular frequency ``omega``.

    Series branches add; parallel branches are combined through the sum of
    their admittances. Returns :data:`OPEN` for an open circuit.
    """
    _check_omega(omega)
    return impedance_s(net, 1j * omega)


# --------------------------------------------------------------------------
# Y-Delta capacitor transformation
#
# Star centre joins three outer nodes: qubit (cq'), environment (ckappa') and
# the resonator end of the filter capacitor (cF'). Each delta capacitor
# connects two outer nodes and is named after the branch it replaces in the
# circuit drawing: cF joins qubit-environment, cq qubit-resonator, ckappa
# resonator-environment.


class StarCapacitances(NamedTuple):
    cf: float
    cq: float
    ckappa: float


class DeltaCapacitances(NamedTuple):
    cf: float
    cq: float
    ckappa: float


def _check_positive_triple(values, what):
    for name, v in zip(("cf", "cq", "ckappa"), values):
        if not (math.isfinite(v) and v > 0):
            raise DomainError(f"{what} capacitance {name} must be positive, got {v!r}")


def y_to_delta(y) -> DeltaCapacitances:
    """Star (primed) capacitances to the equivalent delta (unprimed) set."""
    cfp, cqp, ckp = y
    _check_positive_triple((cfp, cqp, ckp), "star")
    total = cfp + cqp + ckp
    return DeltaCapacitances(cf=cqp * ckp / total, cq=cqp * cfp / total, ckappa=ckp * cfp / total)


def delta_to_y(delta) -> StarCapacitances:
    """Inverse of :func:`y_to_delta`."""
    cf, cq, ck = delta
    _check_positive_triple((cf, cq, ck), "delta")
    p = cf * cq + cq * ck + ck * cf
    return StarCapacitances(cf=p / cf, cq=p / ck, ckappa=p / cq)


@dataclass(frozen=True)
class CouplingSet:
    """The three coupling capacitors in both configurations plus the load.

    ``y`` is ``None`` when the delta set has a zero capacitor (no finite star
    equivalent exists, e.g. ``C_F = 0``).
    """

    y: Optional[StarCapacitances]
    delta: DeltaCapacitances
    z_env: float = 50.0

    def __post_init__(self):
        if not (math.isfinite(self.z_env) and self.z_env > 0):
            raise DomainError(f"z_env must be positive, got {self.z_env!r}")
        for v in self.delta:
            if not (math.isfinite(v) and v >= 0):
                raise DomainError(f"capacitances must be non-negative, got {self.delta!r}")
        if self.y is not None:
            expected = y_to_delta(self.y)
            for a, b in zip(expected, self.delta):
                if abs(a - b) > 1e-12 * max(abs(a), abs(b)):
                    raise DomainError("star and delta capacitances are not Y-Delta equivalent")

    @classmethod
    def from_y(cls, cf, cq, ckappa, z_env=50.0):
        y = StarCapacitances(float(cf), float(cq), float(ckappa))
        return cls(y=y, delta=y_to_delta(y), z_env=float(z_env))

    @classmethod
    def from_delta(cls, cf, cq, ckappa, z_env=50.0):
        d = DeltaCapacitances(float(cf), float(cq), float(ckappa))
        y = delta_to_y(d) if min(d) > 0 else None
        return cls(y=y, delta=d, z_env=float(z_env))

    def require_y(self) -> StarCapacitances:
        if self.y is None:
            raise DomainError("operation needs the star configuration, which is undefined for a zero delta capacitor")
        return self.y


# --------------------------------------------------------------------------
# nodal analysis for networks that are not series-parallel (bridges)


class NodalCircuit:
    """Two-terminal branches between numbered nodes; node 0 is ground.

    Used for topologies such as the delta-coupled qubit/resonator/load circuit,
    whose driving-point impedance cannot be written as a series-parallel tree.
    """

    def __init__(self, branches):
        self.branches = []
        nodes = set()
        for a, b, net in branches:
            if a == b:
                raise DomainError("branch endpoints must differ")
            if isinstance(net, Short):
                raise DomainError("merge shorted nodes before building a nodal circuit")
            self.branches.append((int(a), int(b), net))
            nodes.update((int(a), int(b)))
        nodes.discard(0)
        self.nodes = sorted(nodes)
        self._index = {n: i for i, n in enumerate(self.nodes)}

    def admittance_matrix(self, s: complex) -> np.ndarray:
        n = len(self.nodes)
        y = np.zeros((n, n), dtype=complex)
        for a, b, net in self.branches:
            yb = to_admittance(impedance_s(net, s))
            if yb == 0:
                continue
            ia, ib = self._index.get(a), self._index.get(b)
            if ia is not None:
                y[ia, ia] += yb
            if ib is not None:
                y[ib, ib] += yb
            if ia is not None and ib is not None:
                y[ia, ib] -= yb
                y[ib, ia] -= yb
        return y

    def driving_point_admittance(self, node: int, s: complex) -> complex:
        """Admittance seen between ``node`` and ground.

        Computed as the Schur complement of the nodal matrix with every other
        node eliminated, which avoids inverting the matrix when the driven
        node itself sits at a pole.
        """
        y = self.admittance_matrix(s)
        k = self._index[node]
        rest = [i for i in range(len(self.nodes)) if i != k]
        if not rest:
            return complex(y[k, k])
        a = y[np.ix_(rest, rest)]
        b = y[rest, k]
        return complex(y[k, k] - y[k, rest] @ np.linalg.solve(a, b))

    def determinant(self, s: complex) -> complex:
        return complex(np.linalg.det(self.admittance_matrix(s)))

import math
import pickle

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _helpers import FF, NH, TWO_PI, networks, networks_with_sentinels, omegas
from purcell_notch import netcore
from purcell_notch.errors import DomainError
from purcell_notch.netcore import (
    OPEN,
    Capacitor,
    CouplingSet,
    DeltaCapacitances,
    Inductor,
    NodalCircuit,
    Open,
    Parallel,
    Resistor,
    Series,
    Short,
    StarCapacitances,
    compose,
    delta_to_y,
    element_impedance,
    y_to_delta,
)

W65 = TWO_PI * 6.5e9


class TestElements:
    def test_capacitor_hand_value(self):
        z = element_impedance(Capacitor(500 * FF), W65)
        assert z.real == 0
        assert z.imag == pytest.approx(-1 / (W65 * 500 * FF), rel=1e-15)
        assert z.imag == pytest.approx(-48.97, abs=0.01)

    def test_inductor_hand_value(self):
        z = element_impedance(Inductor(1.2 * NH), W65)
        assert z.real == 0
        assert z.imag == pytest.approx(49.01, abs=0.01)

    @given(omegas)
    def test_resistor_is_frequency_independent(self, w):
        assert element_impedance(Resistor(50.0), w) == 50 + 0j

    @pytest.mark.parametrize("value", [0.0, -1.0, math.inf, math.nan])
    def test_bad_values_rejected(self, value):
        for cls in (Resistor, Capacitor, Inductor):
            with pytest.raises(DomainError):
                cls(value)

    @pytest.mark.parametrize("omega", [0.0, -1.0, math.inf])
    def test_bad_frequency_rejected(self, omega):
        with pytest.raises(DomainError):
            element_impedance(Capacitor(1e-12), omega)

    def test_not_an_element(self):
        with pytest.raises(DomainError):
            element_impedance(Series(Resistor(1), Resistor(2)), 1.0)


class TestCompose:
    def test_series_with_short(self):
        assert compose(Series(Resistor(50), Short()), 1e9) == 50

    def test_parallel_with_open_is_identity(self):
        net = Series(Resistor(10), Capacitor(1e-12))
        assert compose(Parallel(net, Open()), 1e9) == compose(net, 1e9)

    def test_parallel_with_short_is_short(self):
        assert compose(Parallel(Resistor(10), Short()), 1e9) == 0

    def test_series_with_open_is_open(self):
        assert compose(Series(Resistor(10), Open()), 1e9) is OPEN

    def test_parallel_lc_hand_value(self):
        w = TWO_PI * 5e9
        l, c = 1.2 * NH, 500 * FF
        z = compose(Parallel(Inductor(l), Capacitor(c)), w)
        expected = w * l / (1 - w**2 * l * c)
        assert z.real == pytest.approx(0, abs=1e-12)
        assert z.imag == pytest.approx(expected, rel=1e-12)
        assert z.imag == pytest.approx(92.44, abs=0.01)

    def test_parallel_lc_antiresonance_is_open(self):
        # choose values whose admittances cancel exactly in floating point
        net = Parallel(Inductor(1.0), Capacitor(1.0))
        assert compose(net, 1.0) is OPEN

    def test_combinators_need_two_children(self):
        with pytest.raises(DomainError):
            Series(Resistor(1))
        with pytest.raises(DomainError):
            Parallel()

    def test_combinators_are_immutable_and_hashable(self):
        a = Series(Resistor(1), Capacitor(1e-12))
        b = Series(Resistor(1), Capacitor(1e-12))
        assert a == b and hash(a) == hash(b)
        with pytest.raises(AttributeError):
            a.children = ()

    def test_open_sentinel_survives_pickle(self):
        assert pickle.loads(pickle.dumps(OPEN)) is OPEN

    @given(networks, omegas)
    @settings(max_examples=300)
    def test_passivity(self, net, w):
        z = compose(net, w)
        if z is not OPEN:
            assert z.real >= -1e-15 * max(1.0, abs(z))

    @given(networks_with_sentinels, omegas)
    def test_sentinels_never_crash(self, net, w):
        z = compose(net, w)
        assert z is OPEN or isinstance(z, complex)

    @given(st.lists(networks, min_size=2, max_size=4), omegas, st.randoms())
    def test_series_commutative(self, kids, w, rnd):
        shuffled = list(kids)
        rnd.shuffle(shuffled)
        a, b = compose(Series(*kids), w), compose(Series(*shuffled), w)
        if a is OPEN:
            assert b is OPEN
        else:
            assert abs(a - b) <= 1e-9 * max(1.0, abs(a))

    @given(st.lists(networks, min_size=2, max_size=4), omegas, st.randoms())
    def test_parallel_commutative(self, kids, w, rnd):
        shuffled = list(kids)
        rnd.shuffle(shuffled)
        a, b = compose(Parallel(*kids), w), compose(Parallel(*shuffled), w)
        if a is OPEN or b is OPEN:
            return
        assert abs(a - b) <= 1e-9 * max(1e-12, abs(a))

    @given(networks, networks, networks, omegas)
    def test_series_associative(self, x, y, z, w):
        a = compose(Series(Series(x, y), z), w)
        b = compose(Series(x, Series(y, z)), w)
        c = compose(Series(x, y, z), w)
        if a is OPEN:
            assert b is OPEN and c is OPEN
        else:
            assert abs(a - b) <= 1e-9 * max(1.0, abs(a))
            assert abs(a - c) <= 1e-9 * max(1.0, abs(a))

    @given(networks, networks, networks, omegas)
    def test_parallel_associative(self, x, y, z, w):
        a = compose(Parallel(Parallel(x, y), z), w)
        b = compose(Parallel(x, Parallel(y, z)), w)
        if a is OPEN or b is OPEN:
            return
        assert abs(a - b) <= 1e-9 * max(1e-12, abs(a))


class TestYDelta:
    def test_reference_values_forward(self):
        d = y_to_delta((345 * FF, 12.0 * FF, 15.4 * FF))
        assert d.cf / FF == pytest.approx(0.50, rel=0.01)
        assert d.cq / FF == pytest.approx(11.1, rel=0.01)
        assert d.ckappa / FF == pytest.approx(14.3, rel=0.01)

    def test_reference_values_backward(self):
        y = delta_to_y((0.50 * FF, 11.1 * FF, 14.3 * FF))
        assert y.cf / FF == pytest.approx(345, rel=0.01)
        assert y.cq / FF == pytest.approx(12.0, rel=0.01)
        assert y.ckappa / FF == pytest.approx(15.4, rel=0.01)

    def test_symmetric(self):
        assert y_to_delta((3.0, 3.0, 3.0)) == pytest.approx((1.0, 1.0, 1.0), rel=1e-15)
        assert delta_to_y((1.0, 1.0, 1.0)) == pytest.approx((3.0, 3.0, 3.0), rel=1e-15)

    def test_brute_force_round_trip(self):
        rng = np.random.default_rng(1)
        for x in 10 ** rng.uniform(-17, -12, size=(1000, 3)):
            assert delta_to_y(y_to_delta(x)) == pytest.approx(tuple(x), rel=1e-12)
            assert y_to_delta(delta_to_y(x)) == pytest.approx(tuple(x), rel=1e-12)

    @given(st.tuples(*[st.floats(0.01, 1000)] * 3), st.floats(1e-3, 1e3))
    def test_homogeneous_degree_one(self, x, s):
        a = y_to_delta(tuple(v * FF for v in x))
        b = y_to_delta(tuple(s * v * FF for v in x))
        assert tuple(b) == pytest.approx(tuple(s * v for v in a), rel=1e-12)

    @given(st.tuples(*[st.floats(0.01, 1000)] * 3))
    def test_round_trip_property(self, x):
        x = tuple(v * FF for v in x)
        assert tuple(delta_to_y(y_to_delta(x))) == pytest.approx(x, rel=1e-12)

    def test_capacitance_equivalence_from_nodes(self):
        # grounding one outer node of the star must give the same two-port
        # capacitances as the delta; check via nodal matrices with a centre node
        yc = StarCapacitances(345 * FF, 12 * FF, 15.4 * FF)
        d = y_to_delta(yc)
        # star: outer nodes 1=qubit, 2=resonator side, 3=env; centre 4
        star = NodalCircuit(
            [(1, 4, Capacitor(yc.cq)), (2, 4, Capacitor(yc.cf)), (3, 4, Capacitor(yc.ckappa)),
             (1, 0, Resistor(1e3)), (2, 0, Resistor(2e3)), (3, 0, Resistor(3e3))]
        )
        delta = NodalCircuit(
            [(1, 2, Capacitor(d.cq)), (2, 3, Capacitor(d.ckappa)), (1, 3, Capacitor(d.cf)),
             (1, 0, Resistor(1e3)), (2, 0, Resistor(2e3)), (3, 0, Resistor(3e3))]
        )
        for node in (1, 2, 3):
            a = star.driving_point_admittance(node, 1j * 1e10)
            b = delta.driving_point_admittance(node, 1j * 1e10)
            assert a == pytest.approx(b, rel=1e-10)

    @pytest.mark.parametrize("bad", [(0, 1, 1), (1, -1, 1), (1, 1, math.nan)])
    def test_non_positive_rejected(self, bad):
        with pytest.raises(DomainError):
            y_to_delta(bad)
        with pytest.raises(DomainError):
            delta_to_y(bad)


class TestCouplingSet:
    def test_from_y_populates_both(self):
        c = CouplingSet.from_y(345 * FF, 12 * FF, 15.4 * FF)
        assert c.delta == y_to_delta(c.y)

    def test_zero_delta_has_no_star(self):
        c = CouplingSet.from_delta(0.0, 11.1 * FF, 14.3 * FF)
        assert c.y is None
        with pytest.raises(DomainError):
            c.require_y()

    def test_inconsistent_sets_rejected(self):
        with pytest.raises(DomainError):
            CouplingSet(StarCapacitances(1.0, 1.0, 1.0), DeltaCapacitances(1.0, 1.0, 1.0))

    @pytest.mark.parametrize("z", [0.0, -50.0, math.inf])
    def test_bad_load(self, z):
        with pytest.raises(DomainError):
            CouplingSet.from_y(1.0, 1.0, 1.0, z)


class TestNodal:
    def test_matches_series_parallel_tree(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            r1, r2, r3 = 10 ** rng.uniform(0, 3, 3)
            c1 = 10 ** rng.uniform(-13, -11)
            s = 1j * 10 ** rng.uniform(8, 11)
            # node 1 -r1- node 2 ; node 2 -(r2||c1)- ground ; node 1 -r3- ground
            tree = Parallel(Resistor(r3), Series(Resistor(r1), Parallel(Resistor(r2), Capacitor(c1))))
            nodal = NodalCircuit([(1, 2, Resistor(r1)), (2, 0, Parallel(Resistor(r2), Capacitor(c1))),
                                  (1, 0, Resistor(r3))])
            y_tree = 1 / netcore.impedance_s(tree, s)
            assert nodal.driving_point_admittance(1, s) == pytest.approx(y_tree, rel=1e-12)

    def test_bridge_balanced(self):
        # a balanced Wheatstone bridge carries no current in the middle branch
        branches = [(1, 2, Resistor(100)), (1, 3, Resistor(200)), (2, 0, Resistor(100)),
                    (3, 0, Resistor(200)), (2, 3, Resistor(7))]
        y = NodalCircuit(branches).driving_point_admittance(1, 1j)
        assert y == pytest.approx(1 / 200 + 1 / 400, rel=1e-12)

    def test_self_loop_rejected(self):
        with pytest.raises(DomainError):
            NodalCircuit([(1, 1, Resistor(1))])
        with pytest.raises(DomainError):
            NodalCircuit([(1, 0, Short())])

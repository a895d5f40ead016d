import json
import math

import numpy as np
import pytest

from piezoqubit.circuit import (
    TWO_PI,
    Admittance,
    BVDCircuit,
    RLCBranch,
    bvd_admittance,
    circuit_from_json,
    circuit_to_json,
    series_rlc_admittance,
    sweep_admittance,
    sweep_from_csv,
    sweep_to_csv,
    sweep_to_json,
)
from piezoqubit.errors import DomainError, InvariantError, ParseError, SingularAdmittanceError


def _y_series(r, l, c, w):
    # direct complex arithmetic, independent of the library
    return 1.0 / (r + 1j * w * l + 1.0 / (1j * w * c))


class TestBranch:
    def test_rejects_nonpositive_elements(self):
        with pytest.raises(InvariantError):
            RLCBranch(0.0, 0.0, 1.0)
        with pytest.raises(InvariantError):
            RLCBranch(0.0, 1.0, -1.0)
        with pytest.raises(InvariantError):
            RLCBranch(-1.0, 1.0, 1.0)

    def test_from_mode_inverts(self):
        b = RLCBranch.from_mode(TWO_PI * 3.2e9, TWO_PI * 2.25e6, 1e-18)
        assert b.omega == pytest.approx(TWO_PI * 3.2e9, rel=1e-14)
        assert b.kappa == pytest.approx(TWO_PI * 2.25e6, rel=1e-14)

    def test_lossless_off_resonance_is_imaginary(self):
        y = series_rlc_admittance(RLCBranch(0.0, 1.0, 1.0), 0.999)
        assert y.conductance == 0.0
        assert y.susceptance != 0.0

    def test_series_resonance_unit(self):
        y = series_rlc_admittance(RLCBranch(1.0, 1.0, 1.0), 1.0)
        assert y.conductance == pytest.approx(1.0, rel=1e-14)
        assert y.susceptance == pytest.approx(0.0, abs=1e-14)

    def test_conductance_at_resonance_is_inverse_resistance(self):
        b = RLCBranch.from_mode(TWO_PI * 3.2e9, TWO_PI * 2.25e6, 2e-18)
        y = series_rlc_admittance(b, b.omega)
        assert y.conductance == pytest.approx(1.0 / b.resistance, rel=1e-9)

    def test_singular_lossless_resonance(self):
        with pytest.raises(SingularAdmittanceError):
            series_rlc_admittance(RLCBranch(0.0, 1.0, 1.0), 1.0)

    def test_nonpositive_omega(self):
        with pytest.raises(DomainError):
            series_rlc_admittance(RLCBranch(1.0, 1.0, 1.0), 0.0)


class TestCircuit:
    def test_canonical_order(self):
        hi = RLCBranch.from_mode(2.0, 0.1, 1.0)
        lo = RLCBranch.from_mode(1.0, 0.1, 1.0)
        assert BVDCircuit(1.0, (hi, lo)).branches == (lo, hi)

    def test_pure_capacitor(self):
        w = TWO_PI * 3e9
        y = bvd_admittance(BVDCircuit(100e-15), w)
        assert y.conductance == 0.0
        assert y.susceptance == pytest.approx(w * 100e-15, rel=1e-14)

    def test_additivity(self):
        b1 = RLCBranch(5.0, 1e-3, 1e-12)
        b2 = RLCBranch(7.0, 2e-3, 0.4e-12)
        w = 0.98 * b1.omega
        both = bvd_admittance(BVDCircuit(1e-15, (b1, b2)), w)
        expected = sum(_y_series(b.resistance, b.inductance, b.capacitance, w) for b in (b1, b2)).real
        assert both.conductance == pytest.approx(expected, rel=1e-12)

    def test_lorentzian_tail_bound(self):
        b = RLCBranch.from_mode(TWO_PI * 3.2e9, TWO_PI * 2.25e6, 1e-18)
        c = BVDCircuit(1e-13, (b,))
        g0 = bvd_admittance(c, b.omega).conductance
        for n in (20, 50, 200):
            d = n * b.kappa
            bound = g0 * b.kappa**2 / (4 * d**2)
            # below resonance the exact reactance exceeds 2 L d; above it, it falls short at O(d / w_m)
            assert bvd_admittance(c, b.omega - d).conductance <= bound
            assert bvd_admittance(c, b.omega + d).conductance <= bound * (1 + 2 * d / b.omega)

    def test_matches_direct_evaluation(self, circuit_a):
        w = np.linspace(TWO_PI * 3.10e9, TWO_PI * 3.20e9, 57)
        sweep = sweep_admittance(circuit_a, w)
        for a, wi in zip(sweep, w):
            y = 1j * wi * circuit_a.static_capacitance + sum(
                _y_series(b.resistance, b.inductance, b.capacitance, wi) for b in circuit_a.branches
            )
            assert a.conductance == pytest.approx(y.real, rel=1e-9)
            assert a.susceptance == pytest.approx(y.imag, rel=1e-9)


class TestSweep:
    def test_empty_grid(self, circuit_a):
        assert sweep_admittance(circuit_a, []) == []

    def test_single_point(self, circuit_a):
        w = TWO_PI * 3.15e9
        assert sweep_admittance(circuit_a, [w]) == [bvd_admittance(circuit_a, w)]

    def test_reversed_grid(self, circuit_a):
        with pytest.raises(DomainError):
            sweep_admittance(circuit_a, [2.0, 1.0])

    def test_eleven_maxima(self, circuit_a):
        lo = min(b.omega for b in circuit_a.branches) - TWO_PI * 10e6
        hi = max(b.omega for b in circuit_a.branches) + TWO_PI * 10e6
        g = np.array([a.conductance for a in sweep_admittance(circuit_a, np.linspace(lo, hi, 10001))])
        peaks = np.nonzero((g[1:-1] > g[:-2]) & (g[1:-1] > g[2:]))[0]
        assert peaks.size == 11

    def test_chunking_is_bit_identical(self, circuit_a):
        w = np.linspace(TWO_PI * 3.1e9, TWO_PI * 3.2e9, 101)
        whole = sweep_admittance(circuit_a, w)
        parts = sweep_admittance(circuit_a, w[:40]) + sweep_admittance(circuit_a, w[40:])
        assert whole == parts


class TestSerialization:
    def test_circuit_round_trip(self, circuit_a):
        assert circuit_from_json(circuit_to_json(circuit_a)) == circuit_a

    def test_circuit_bad_json(self):
        with pytest.raises(ParseError):
            circuit_from_json("{not json")
        with pytest.raises(ParseError):
            circuit_from_json(json.dumps({"branches": []}))

    def test_sweep_csv_round_trip(self, circuit_a):
        w = np.linspace(TWO_PI * 3.1e9, TWO_PI * 3.2e9, 11)
        sweep = sweep_admittance(circuit_a, w)
        back = sweep_from_csv(sweep_to_csv(sweep, ["note"]))
        for a, b in zip(sweep, back):
            assert b.conductance == a.conductance
            assert b.susceptance == a.susceptance
            assert b.freq_hz == pytest.approx(a.freq_hz, rel=1e-15)

    def test_sweep_csv_errors_name_line(self):
        with pytest.raises(ParseError, match="line 3"):
            sweep_from_csv("freq_hz,G_S,B_S\n1,2,3\n1,x,3\n")
        with pytest.raises(ParseError):
            sweep_from_csv("")

    def test_sweep_json(self):
        rows = json.loads(sweep_to_json([Admittance(TWO_PI, 1.0, 2.0)]))
        assert rows == [{"freq_hz": 1.0, "G_S": 1.0, "B_S": 2.0}]
        assert math.isclose(Admittance(TWO_PI, 1.0, 2.0).value.imag, 2.0)

import json
import math

import pytest

from piezoqubit.circuit import TWO_PI, Admittance, BVDCircuit, RLCBranch
from piezoqubit.errors import DomainError, UndefinedLifetimeError
from piezoqubit.fixtures import qubit_table
from piezoqubit.quantization import (
    CouplingMode,
    CouplingSet,
    QubitParams,
    charging_capacitance,
    coupling_for_k2,
    coupling_inductive_form,
    dequantize,
    flux_tuned_ej,
    k2_for_coupling,
    q_from_admittance,
    quantize_branch,
    quantize_circuit,
    synthesize_circuit,
    t1_from_admittance,
    t1_spectrum,
)

E = 1.602176634e-19
H = 6.62607015e-34


class TestTransmon:
    @pytest.mark.parametrize("sample,expected_mhz", [("A", 3233), ("B", 3388), ("C", 3344)])
    def test_table_rows(self, sample, expected_mhz):
        row = qubit_table()[sample]
        f = QubitParams(row["ec_hz"], row["ej_max_hz"]).omega / TWO_PI
        assert abs(f - expected_mhz * 1e6) <= 5e6

    def test_sample_a_value(self):
        f = QubitParams(68e6, 20.0e9).omega / TWO_PI
        assert f == pytest.approx(math.sqrt(8 * 68e6 * 20e9) - 68e6, rel=1e-14)
        assert abs(f - 3233e6) <= 3e6

    def test_frustrated_squid(self):
        with pytest.raises(DomainError):
            QubitParams(68e6, 20e9, flux=0.5).omega

    def test_nonpositive_energy(self):
        with pytest.raises(DomainError):
            QubitParams(0.0, 20e9).omega

    def test_warning_outside_transmon_regime(self):
        assert QubitParams(68e6, 20e9).warnings == ()
        assert QubitParams(1e9, 10e9).warnings

    def test_flux_tuned_ej(self):
        assert flux_tuned_ej(20e9, 0.0) == 20e9
        assert flux_tuned_ej(20e9, 0.5) == 0.0
        assert flux_tuned_ej(20e9, 1 / 3) == pytest.approx(10e9, rel=1e-12)

    def test_charging_capacitance(self):
        assert charging_capacitance(68e6) == pytest.approx(E**2 / (2 * H * 68e6), rel=1e-14)


class TestCoupling:
    def test_k2_for_sample_a_mode1(self):
        w = TWO_PI * 3.2e9
        k2 = k2_for_coupling(TWO_PI * 100e3, w, w)
        assert k2 == pytest.approx((2 * 100e3 / 3.2e9) ** 2, rel=1e-12)
        assert k2 == pytest.approx(3.91e-9, rel=1e-3)
        assert coupling_for_k2(k2, w, w) == pytest.approx(TWO_PI * 100e3, rel=1e-12)

    def test_quantize_dequantize(self):
        q = QubitParams(68e6, 20e9)
        mode = CouplingMode(TWO_PI * 3.2e9, TWO_PI * 100e3, TWO_PI * 2.25e6)
        b = dequantize(mode, q.omega, q.total_capacitance)
        back = quantize_branch(b, q)
        assert back.coupling == pytest.approx(mode.coupling, rel=1e-12)
        assert back.linewidth == pytest.approx(mode.linewidth, rel=1e-12)
        assert back.mode_frequency == pytest.approx(mode.mode_frequency, rel=1e-12)
        assert b.resistance == pytest.approx(mode.linewidth * b.inductance, rel=1e-12)

    def test_k2_consistency(self):
        q = QubitParams(68e6, 20e9)
        m = quantize_branch(RLCBranch.from_mode(TWO_PI * 3.2e9, 1e6, 1e-18), q)
        expected = (2 * m.coupling / math.sqrt(q.omega * m.mode_frequency)) ** 2
        assert m.em_coupling_coefficient == pytest.approx(expected, rel=1e-12)

    def test_inductive_form_matches_at_resonance(self):
        q = QubitParams(68e6, 20e9)
        b = RLCBranch.from_mode(q.omega, 1e6, 1e-18)
        g_cap = quantize_branch(b, q).coupling
        assert coupling_inductive_form(b, q) == pytest.approx(g_cap, rel=1e-12)

    def test_large_motional_capacitance_warns(self):
        q = QubitParams(68e6, 20e9)
        m = quantize_branch(RLCBranch.from_mode(q.omega, 1e6, 2 * q.total_capacitance), q)
        assert any("validity" in w for w in m.warnings)

    def test_circuit_round_trip(self):
        q = QubitParams(68e6, 20e9)
        cs = CouplingSet.from_hz([3.14e9, 3.15e9], [100e3, 50e3], [2e6, 1e6])
        back = quantize_circuit(synthesize_circuit(cs, q.omega, q.total_capacitance), q)
        for a, b in zip(cs.modes, back.modes):
            assert b.coupling == pytest.approx(a.coupling, rel=1e-10)

    def test_coupling_set_json(self):
        cs = CouplingSet.from_hz([3.14e9, 3.15e9], [100e3, 50e3], [2e6, 1e6])
        assert CouplingSet.from_json(cs.to_json()).arrays()[1].tolist() == cs.arrays()[1].tolist()
        assert json.loads(cs.to_json())


class TestLifetime:
    def test_arithmetic(self):
        y = Admittance(TWO_PI * 3e9, 1e-9, 1.0)
        assert t1_from_admittance(y, 100e-15) == pytest.approx(100e-6, rel=1e-12)

    def test_lossless(self):
        with pytest.raises(UndefinedLifetimeError):
            t1_from_admittance(Admittance(1.0, 1e-21, 1.0), 1e-13)
        with pytest.raises(UndefinedLifetimeError):
            t1_spectrum(BVDCircuit(1e-13), [1.0, 2.0])

    def test_minima_at_modes(self, circuit_a):
        import numpy as np

        for b in circuit_a.branches[:3]:
            w = np.linspace(b.omega - 0.2 * b.kappa, b.omega + 0.2 * b.kappa, 2001)
            t1 = t1_spectrum(circuit_a, w)
            assert abs(w[np.argmin(t1)] - b.omega) <= 0.05 * b.kappa

    def test_quality_factor(self):
        b = TWO_PI * 4.5e9 * 15e-15
        assert q_from_admittance(Admittance(TWO_PI * 4.5e9, b * 1.7e-7, b)) == pytest.approx(1 / 1.7e-7, rel=1e-12)
        assert q_from_admittance(Admittance(1.0, 2.0, 2.0)) == 1.0
        with pytest.raises(DomainError):
            q_from_admittance(Admittance(1.0, 0.0, 1.0))

    def test_quality_factor_loss_tangent_round_trip(self):
        tan_d, p = 1.7e-4, 1e-3
        b = 1.0
        q = q_from_admittance(Admittance(1.0, b * p * tan_d, b))
        assert q * p * tan_d == pytest.approx(1.0, rel=1e-12)

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from piezoqubit.circuit import TWO_PI, BVDCircuit, RLCBranch, sweep_admittance
from piezoqubit.dynamics import DensityMatrix3, DynamicsConfig, evolve
from piezoqubit.loss_budget import fit_power_law
from piezoqubit.quantization import QubitParams, dequantize, quantize_branch

pos = st.floats(min_value=1e-3, max_value=1e3)
mode_freq = st.floats(min_value=2.5e9, max_value=4e9)
coupling = st.floats(min_value=1e3, max_value=1e6)
linewidth = st.floats(min_value=1e4, max_value=1e7)


@st.composite
def circuits(draw):
    n = draw(st.integers(0, 6))
    branches = [
        RLCBranch.from_mode(TWO_PI * draw(mode_freq), TWO_PI * draw(linewidth), draw(st.floats(1e-19, 1e-15)))
        for _ in range(n)
    ]
    return BVDCircuit(draw(st.floats(1e-14, 1e-12)), tuple(branches))


@given(circuits(), st.lists(st.floats(1e9, 6e9), min_size=1, max_size=30, unique=True))
def test_passivity(circuit, freqs):
    for a in sweep_admittance(circuit, np.unique(TWO_PI * np.asarray(freqs))):
        assert a.conductance >= -1e-15


@given(circuits(), st.randoms())
def test_canonical_order_is_input_independent(circuit, rnd):
    shuffled = list(circuit.branches)
    rnd.shuffle(shuffled)
    assert BVDCircuit(circuit.static_capacitance, tuple(shuffled)) == circuit


@given(mode_freq, coupling, linewidth, st.floats(0.0, 0.45))
def test_quantize_round_trip(fm, g, k, flux):
    q = QubitParams(68e6, 20e9, flux=flux)
    from piezoqubit.quantization import CouplingMode

    mode = CouplingMode(TWO_PI * fm, TWO_PI * g, TWO_PI * k)
    back = quantize_branch(dequantize(mode, q.omega, q.total_capacitance), q)
    assert abs(back.coupling / mode.coupling - 1) < 1e-10
    assert abs(back.linewidth / mode.linewidth - 1) < 1e-10
    assert abs(back.mode_frequency / mode.mode_frequency - 1) < 1e-10


@settings(max_examples=40, deadline=None)
@given(
    st.floats(-5e6, 5e6), coupling, st.floats(0, 1e6), st.floats(0, 1e6), linewidth, st.sampled_from([1, 2, 3])
)
def test_trace_and_positivity(delta, g, g1, gphi, k, start):
    cfg = DynamicsConfig(TWO_PI * delta, TWO_PI * g, g1, gphi, TWO_PI * k, total_time=2e-6)
    tr = evolve(DensityMatrix3.basis(start), cfg, max_samples=201)
    trace = np.trace(tr.states, axis1=1, axis2=2).real
    assert np.max(np.abs(trace - 1)) < 1e-8
    assert np.linalg.eigvalsh(tr.states).min() >= -1e-8


@given(st.floats(-3, 3), st.floats(1e-12, 1e3))
def test_power_law_exact(exponent, prefactor):
    f = np.geomspace(1e9, 1e10, 5)
    fit = fit_power_law(f, prefactor * (f / 1e9) ** exponent)
    assert abs(fit.exponent - exponent) < 1e-9

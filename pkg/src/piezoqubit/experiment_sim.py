"""Synthetic p_e(f_q, V_bias) maps: a SAW mode comb plus Stark-tuned TLS defects.

Mechanical modes are fixed in frequency; each TLS follows the standard
tunnelling model ``f_TLS(V) = sqrt(D0^2 + (e0 + de/dV * V)^2)``. Both act
as Lorentzian relaxation channels. The excited-state population after a
delay ``tau0`` is ``exp(-Gamma_1 tau0)``, optionally with binomial shot
noise.

A TLS ``linewidth`` is its full width at half maximum in Hz, so the
Lorentzian half width in rad/s is ``pi * linewidth``.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .circuit import TWO_PI
from .dynamics import relaxation_rate
from .errors import DomainError, InvariantError
from .quantization import CouplingSet, QubitParams
from .streams import stream


@dataclass(frozen=True)
class TLSDefect:
    """Two-level defect; frequencies in Hz, ``bias_sensitivity`` in Hz/V."""

    tunneling_amplitude: float
    asymmetry_at_zero_bias: float
    bias_sensitivity: float
    qubit_coupling: float
    linewidth: float

    def __post_init__(self):
        if not self.tunneling_amplitude > 0:
            raise InvariantError("tunneling amplitude must be positive")
        if self.qubit_coupling < 0:
            raise InvariantError("TLS coupling must be non-negative")
        if not self.linewidth > 0:
            raise InvariantError("TLS linewidth must be positive")
        for v in (self.asymmetry_at_zero_bias, self.bias_sensitivity):
            if not math.isfinite(v):
                raise InvariantError("TLS parameters must be finite")

    def to_dict(self) -> dict:
        return {
            "tunneling_amplitude_hz": self.tunneling_amplitude,
            "asymmetry_hz": self.asymmetry_at_zero_bias,
            "bias_sensitivity_hz_per_v": self.bias_sensitivity,
            "coupling_hz": self.qubit_coupling,
            "linewidth_hz": self.linewidth,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TLSDefect":
        return cls(
            float(d["tunneling_amplitude_hz"]),
            float(d["asymmetry_hz"]),
            float(d["bias_sensitivity_hz_per_v"]),
            float(d["coupling_hz"]),
            float(d["linewidth_hz"]),
        )

    @classmethod
    def sweeping(cls, center_hz: float, excursion_hz: float, coupling_hz: float, linewidth_hz: float,
                 tunneling_hz: float | None = None, v_max: float = 1.0) -> "TLSDefect":
        """TLS at ``center_hz`` for V = 0 that moves by ``+excursion_hz`` at ``V = v_max``.

        The tunnelling amplitude defaults to a third of ``center_hz`` so the
        sweep is close to linear in V.
        """
        d0 = center_hz / 3.0 if tunneling_hz is None else tunneling_hz
        if not d0 < center_hz:
            raise DomainError("tunneling amplitude must be below the TLS frequency")
        e0 = math.sqrt(center_hz**2 - d0**2)
        e1 = math.sqrt((center_hz + excursion_hz) ** 2 - d0**2)
        return cls(d0, e0, (e1 - e0) / v_max, coupling_hz, linewidth_hz)


@dataclass(frozen=True)
class ExperimentPlan:
    """Measurement grid. ``shots=None`` gives the noise-free (n -> inf) map."""

    qubit_frequency_grid: np.ndarray
    bias_grid: np.ndarray
    delay: float = 3e-6
    shots: int | None = None

    def __post_init__(self):
        fq = np.atleast_1d(np.asarray(self.qubit_frequency_grid, dtype=float))
        vb = np.atleast_1d(np.asarray(self.bias_grid, dtype=float))
        if fq.size == 0 or vb.size == 0:
            raise DomainError("frequency and bias grids must be non-empty")
        if not np.all(fq > 0):
            raise DomainError("qubit frequencies must be positive")
        if not self.delay > 0:
            raise DomainError("delay must be positive")
        if self.shots is not None and int(self.shots) < 1:
            raise DomainError("shots must be a positive integer")
        object.__setattr__(self, "qubit_frequency_grid", fq)
        object.__setattr__(self, "bias_grid", vb)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.qubit_frequency_grid.size, self.bias_grid.size)

    def to_dict(self) -> dict:
        f, v = self.qubit_frequency_grid, self.bias_grid
        return {
            "n_fq": int(f.size),
            "fq_min_hz": float(f[0]),
            "fq_max_hz": float(f[-1]),
            "n_bias": int(v.size),
            "v_min": float(v.min()),
            "v_max": float(v.max()),
            "delay_s": self.delay,
            "shots": self.shots,
        }


def tls_frequency(defect: TLSDefect, v_bias):
    """TLS transition frequency in Hz at bias ``v_bias`` (scalar or array)."""
    eps = defect.asymmetry_at_zero_bias + defect.bias_sensitivity * np.asarray(v_bias, dtype=float)
    out = np.hypot(defect.tunneling_amplitude, eps)
    return float(out) if out.ndim == 0 else out


def _tls_arrays(tls):
    d0 = np.array([t.tunneling_amplitude for t in tls], dtype=float)
    e0 = np.array([t.asymmetry_at_zero_bias for t in tls], dtype=float)
    de = np.array([t.bias_sensitivity for t in tls], dtype=float)
    g = TWO_PI * np.array([t.qubit_coupling for t in tls], dtype=float)
    hw = math.pi * np.array([t.linewidth for t in tls], dtype=float)
    return d0, e0, de, g, hw


def _gamma1_grid(fq, vb, saw: CouplingSet, tls, qubit: QubitParams) -> np.ndarray:
    """Relaxation rate on the outer grid ``fq x vb`` (shape ``(n_fq, n_bias)``)."""
    wq = TWO_PI * np.asarray(fq, dtype=float)
    vb = np.asarray(vb, dtype=float)
    wm, g, k = saw.arrays()
    col = relaxation_rate(wq, wm, g, k, qubit.nominal_decay, qubit.gamma2)
    out = np.repeat(col[:, None], vb.size, axis=1)
    if tls:
        d0, e0, de, gt, hw = _tls_arrays(tls)
        wt = TWO_PI * np.hypot(d0[None, :], e0[None, :] + de[None, :] * vb[:, None])  # (n_bias, n_tls)
        for j in range(len(tls)):
            det = wq[:, None] - wt[None, :, j]
            out += 2.0 * gt[j] ** 2 * hw[j] / (hw[j] ** 2 + det * det)
    return out


def total_gamma1(fq, v_bias, saw: CouplingSet, tls, qubit: QubitParams):
    """Relaxation rate (1/s) at qubit frequency ``fq`` (Hz) and bias ``v_bias`` (V).

    Background ``Gamma_1^(0)`` plus the bias-independent mechanical sum plus
    the bias-dependent TLS sum. Scalars in, scalar out; arrays broadcast.
    """
    fq_a = np.asarray(fq, dtype=float)
    if not np.all(fq_a > 0):
        raise DomainError("qubit frequency must be positive")
    v_a = np.asarray(v_bias, dtype=float)
    fb, vb = np.broadcast_arrays(fq_a, v_a)
    wq = TWO_PI * fb
    wm, g, k = saw.arrays()
    out = relaxation_rate(wq, wm, g, k, qubit.nominal_decay, qubit.gamma2)
    for t in tls:
        wt = TWO_PI * tls_frequency(t, vb)
        gt = TWO_PI * t.qubit_coupling
        hw = math.pi * t.linewidth
        out = out + 2.0 * gt * gt * hw / (hw * hw + (wq - wt) ** 2)
    return float(out) if out.ndim == 0 else out


def pe_map(plan: ExperimentPlan, saw: CouplingSet, tls, qubit: QubitParams, noise_seed: int = 0) -> np.ndarray:
    """Excited-state population after ``plan.delay``, shape ``(n_fq, n_bias)``.

    With finite ``plan.shots`` every point is ``Binomial(n, p) / n``. Row
    ``i`` draws from the stream keyed ``(noise_seed, i)`` and point ``(i, j)``
    takes the ``j``-th draw, so the map is identical however rows are
    scheduled.
    """
    rate = _gamma1_grid(plan.qubit_frequency_grid, plan.bias_grid, saw, tls, qubit)
    p = np.exp(-rate * plan.delay)
    if plan.shots is None:
        return p
    n = int(plan.shots)
    out = np.empty_like(p)
    for i in range(p.shape[0]):
        out[i] = stream(noise_seed, i).binomial(n, p[i]) / n
    return out


def bias_average(pe) -> np.ndarray:
    """Mean over the bias axis of a ``(n_fq, n_bias)`` map."""
    m = np.asarray(pe, dtype=float)
    if m.ndim != 2 or m.shape[0] == 0 or m.shape[1] == 0:
        raise DomainError("map must be a non-empty 2-d grid")
    return m.mean(axis=1)


def saw_comb(center_hz: float, fsr_hz: float, n_modes: int, coupling_hz, linewidth_hz) -> CouplingSet:
    """Evenly spaced comb ``center + (k - (N+1)/2) * fsr`` for k = 1..N.

    ``coupling_hz`` and ``linewidth_hz`` are scalars or per-mode sequences.
    """
    if n_modes < 1:
        raise DomainError("a comb needs at least one mode")
    if not fsr_hz > 0:
        raise DomainError("FSR must be positive")
    k = np.arange(1, n_modes + 1)
    f = center_hz + (k - 0.5 * (n_modes + 1)) * fsr_hz
    g = np.broadcast_to(np.asarray(coupling_hz, dtype=float), f.shape)
    kap = np.broadcast_to(np.asarray(linewidth_hz, dtype=float), f.shape)
    return CouplingSet.from_hz(f, g, kap)


# ------------------------------------------------------------------ output


def map_to_csv(plan: ExperimentPlan, pe, comments=()) -> str:
    """Long-form CSV ``fq_hz,v_bias,pe``."""
    buf = io.StringIO()
    for line in comments:
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["fq_hz", "v_bias", "pe"])
    pe = np.asarray(pe, dtype=float)
    for i, f in enumerate(plan.qubit_frequency_grid):
        for j, v in enumerate(plan.bias_grid):
            w.writerow([repr(float(f)), repr(float(v)), repr(float(pe[i, j]))])
    return buf.getvalue()


def map_header(plan: ExperimentPlan, saw: CouplingSet, tls, qubit: QubitParams, seed: int) -> dict:
    return {
        "plan": plan.to_dict(),
        "seed": int(seed),
        "qubit": {"gamma1_0_per_s": qubit.nominal_decay, "gamma2q_per_s": qubit.gamma2},
        "saw": saw.to_dict(),
        "tls": [t.to_dict() for t in tls],
    }


def profile_to_csv(freqs_hz, profile, comments=()) -> str:
    """CSV ``fq_hz,pe_avg``."""
    buf = io.StringIO()
    for line in comments:
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["fq_hz", "pe_avg"])
    for f, p in zip(np.asarray(freqs_hz, float), np.asarray(profile, float)):
        w.writerow([repr(float(f)), repr(float(p))])
    return buf.getvalue()


# ------------------------------------------------------------------ scenario


@dataclass(frozen=True)
class Scenario:
    """A complete synthetic experiment: comb, TLS ensemble, qubit and plan."""

    saw: CouplingSet
    tls: tuple[TLSDefect, ...]
    qubit: QubitParams
    plan: ExperimentPlan
    notes: tuple[str, ...] = field(default_factory=tuple)

    def to_json(self) -> str:
        return json.dumps(
            {
                "saw": self.saw.to_dict(),
                "tls": [t.to_dict() for t in self.tls],
                "qubit": {
                    "ec_hz": self.qubit.charging_energy,
                    "ej_max_hz": self.qubit.max_josephson_energy,
                    "gamma1_0_per_s": self.qubit.nominal_decay,
                    "gamma_phi_per_s": self.qubit.pure_dephasing,
                },
                "plan": {
                    "fq_hz": [float(x) for x in self.plan.qubit_frequency_grid],
                    "v_bias": [float(x) for x in self.plan.bias_grid],
                    "delay_s": self.plan.delay,
                    "shots": self.plan.shots,
                },
            },
            indent=1,
        )

    @classmethod
    def from_json(cls, text: str) -> "Scenario":
        d = json.loads(text)
        q = d["qubit"]
        qubit = QubitParams(
            float(q["ec_hz"]),
            float(q["ej_max_hz"]),
            nominal_decay=float(q.get("gamma1_0_per_s", 0.0)),
            pure_dephasing=float(q.get("gamma_phi_per_s", 0.0)),
        )
        p = d["plan"]
        plan = ExperimentPlan(np.array(p["fq_hz"]), np.array(p["v_bias"]), float(p["delay_s"]), p.get("shots"))
        return cls(CouplingSet.from_dict(d["saw"]), tuple(TLSDefect.from_dict(t) for t in d["tls"]), qubit, plan)


def demo_scenario(n_tls: int = 5, linewidths_excursion: float = 20.0, shots: int | None = None) -> Scenario:
    """Eleven-mode comb with ``n_tls`` defects parked between modes.

    Each TLS (FWHM 100 kHz) sweeps ``+-linewidths_excursion`` linewidths over
    a 401-point bias grid on [-1, 1] V; its on-resonance rate equals the
    background rate. The comb uses a 6.45 MHz FSR around 3.15 GHz with
    100 kHz couplings and 2 MHz linewidths.
    """
    center, fsr, n_modes = 3.15e9, 6.447e6, 11
    saw = saw_comb(center, fsr, n_modes, 100e3, 2.0e6)
    gamma1_0, gamma2q = 2.5e5, 5.0e5
    qubit = QubitParams(68e6, 20e9, nominal_decay=gamma1_0, pure_dephasing=gamma2q - 0.5 * gamma1_0)
    lw = 100e3
    g_tls = math.sqrt(gamma1_0 * math.pi * lw / 2.0) / TWO_PI
    gaps = np.arange(n_modes - 1) - 0.5 * (n_modes - 2)  # mid-points between modes, in FSR
    picks = np.unique(np.round(np.linspace(0, n_modes - 2, n_tls)).astype(int))
    tls = [TLSDefect.sweeping(center + gaps[m] * fsr, linewidths_excursion * lw, g_tls, lw) for m in picks]
    tls.sort(key=lambda t: tls_frequency(t, 0.0))
    lo = center - (n_modes / 2 + 1) * fsr
    hi = center + (n_modes / 2 + 1) * fsr
    fq = np.arange(lo, hi, 10e3)
    plan = ExperimentPlan(fq, np.linspace(-1.0, 1.0, 401), 3e-6, shots)
    return Scenario(saw, tuple(tls), qubit, plan)

"""Map lumped circuits and port admittances onto circuit-QED parameters.

For a mode branch (R_m, L_m, C_m) shunting a qubit of capacitance C_q::

    w_m = 1/sqrt(L_m C_m)
    g_m = sqrt(w_q w_m)/2 * sqrt(C_m/C_q)      (capacitive form)
    kappa_m = R_m / L_m
    K^2 = C_m / C_q

The capacitive form of the coupling is used everywhere; the inductive form
sqrt(L_q/L_m) agrees with it on resonance and is exposed for diagnostics.
Regime warnings are returned as data on the result objects.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .circuit import TWO_PI, Admittance, BVDCircuit, RLCBranch, admittance_array
from .errors import DomainError, InvariantError, ParseError, UndefinedLifetimeError

PLANCK = 6.62607015e-34
E_CHARGE = 1.602176634e-19
FLUX_QUANTUM = PLANCK / (2.0 * E_CHARGE)

TRANSMON_RATIO_MIN = 20.0
G_MIN = 1e-20  # siemens; below this T1 = C/G is treated as undefined


def flux_tuned_ej(ej_max: float, flux: float) -> float:
    """Josephson energy of a symmetric SQUID, ``E_J,max |cos(pi Phi/Phi0)|``.

    Values below 1e-12 E_J,max (the fully frustrated point) are returned as 0.
    """
    if not ej_max > 0:
        raise DomainError(f"E_J,max must be positive, got {ej_max}")
    ej = ej_max * abs(math.cos(math.pi * flux))
    return 0.0 if ej < 1e-12 * ej_max else ej


def charging_capacitance(ec_hz: float) -> float:
    """Total capacitance ``e^2 / (2 h E_C)`` for a charging energy in Hz."""
    return E_CHARGE**2 / (2.0 * PLANCK * ec_hz)


@dataclass(frozen=True)
class QubitParams:
    """Flux-tunable transmon.

    Energies are ``E/h`` in Hz. ``shunt_capacitance`` defaults to the
    capacitance implied by ``charging_energy``; ``junction_capacitance`` is
    added on top of it (zero by default, i.e. ``C_q ~ C_idt``).
    """

    charging_energy: float
    max_josephson_energy: float
    flux: float = 0.0
    shunt_capacitance: float | None = None
    nominal_decay: float = 0.0
    pure_dephasing: float = 0.0
    junction_capacitance: float = 0.0

    def __post_init__(self):
        if self.nominal_decay < 0 or self.pure_dephasing < 0:
            raise InvariantError("decay and dephasing rates must be non-negative")
        if self.shunt_capacitance is not None and not self.shunt_capacitance > 0:
            raise InvariantError("shunt capacitance must be positive")
        if self.junction_capacitance < 0:
            raise InvariantError("junction capacitance must be non-negative")

    @property
    def josephson_energy(self) -> float:
        return flux_tuned_ej(self.max_josephson_energy, self.flux)

    @property
    def total_capacitance(self) -> float:
        cs = self.shunt_capacitance
        if cs is None:
            cs = charging_capacitance(self.charging_energy)
        return cs + self.junction_capacitance

    @property
    def omega(self) -> float:
        return transmon_frequency(self)

    @property
    def gamma2(self) -> float:
        """Qubit decoherence rate ``Gamma_phi + Gamma_1^(0)/2``."""
        return self.pure_dephasing + 0.5 * self.nominal_decay

    @property
    def linear_inductance(self) -> float:
        """Inductance resonating with ``C_q`` at the qubit frequency."""
        return 1.0 / (self.omega**2 * self.total_capacitance)

    @property
    def warnings(self) -> tuple[str, ...]:
        ej = self.josephson_energy
        if self.charging_energy > 0 and ej / self.charging_energy < TRANSMON_RATIO_MIN:
            return (f"E_J/E_C = {ej / self.charging_energy:.3g} < {TRANSMON_RATIO_MIN:g}: outside the transmon regime",)
        return ()

    def with_flux(self, flux: float) -> "QubitParams":
        return QubitParams(
            self.charging_energy,
            self.max_josephson_energy,
            flux,
            self.shunt_capacitance,
            self.nominal_decay,
            self.pure_dephasing,
            self.junction_capacitance,
        )


def transmon_frequency(params: QubitParams) -> float:
    """Qubit transition frequency in rad/s, ``2 pi (sqrt(8 E_C E_J) - E_C)``."""
    ec = params.charging_energy
    if not ec > 0:
        raise DomainError(f"charging energy must be positive, got {ec}")
    ej = params.josephson_energy
    if not ej > 0:
        raise DomainError(f"Josephson energy vanishes at flux {params.flux} (SQUID frustrated)")
    f = math.sqrt(8.0 * ec * ej) - ec
    if not f > 0:
        raise DomainError("transmon frequency is not positive")
    return TWO_PI * f


@dataclass(frozen=True)
class CouplingMode:
    """One mechanical mode as seen by the qubit (all rates in rad/s)."""

    mode_frequency: float
    coupling: float
    linewidth: float
    em_coupling_coefficient: float | None = None
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.mode_frequency > 0:
            raise InvariantError("mode frequency must be positive")
        if self.coupling < 0 or self.linewidth < 0:
            raise InvariantError("coupling and linewidth must be non-negative")
        if self.em_coupling_coefficient is not None and self.em_coupling_coefficient < 0:
            raise InvariantError("K^2 must be non-negative")


@dataclass(frozen=True)
class CouplingSet:
    """Quantized parameters of N mechanical modes, sorted by frequency.

    ``qubit_frequency`` (rad/s) is optional; when present, every stored K^2
    must equal ``(2 g / sqrt(w_q w_m))^2``.
    """

    modes: tuple[CouplingMode, ...] = field(default_factory=tuple)
    qubit_frequency: float | None = None

    def __post_init__(self):
        modes = tuple(sorted(self.modes, key=lambda m: m.mode_frequency))
        for a, b in zip(modes, modes[1:]):
            if not b.mode_frequency > a.mode_frequency:
                raise InvariantError("mode frequencies must be strictly increasing")
        if self.qubit_frequency is not None:
            for m in modes:
                if m.em_coupling_coefficient is None:
                    continue
                k2 = (2.0 * m.coupling) ** 2 / (self.qubit_frequency * m.mode_frequency)
                if not math.isclose(k2, m.em_coupling_coefficient, rel_tol=1e-12, abs_tol=0.0):
                    raise InvariantError(
                        f"K^2 = {m.em_coupling_coefficient:.6g} inconsistent with g (expected {k2:.6g})"
                    )
        object.__setattr__(self, "modes", modes)

    def __len__(self):
        return len(self.modes)

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(omega_m, g, kappa)`` as float arrays in rad/s."""
        w = np.array([m.mode_frequency for m in self.modes], dtype=float)
        g = np.array([m.coupling for m in self.modes], dtype=float)
        k = np.array([m.linewidth for m in self.modes], dtype=float)
        return w, g, k

    @classmethod
    def from_hz(cls, f_m_hz: Iterable[float], g_hz: Iterable[float], kappa_hz: Iterable[float]) -> "CouplingSet":
        modes = tuple(
            CouplingMode(TWO_PI * f, TWO_PI * g, TWO_PI * k) for f, g, k in zip(f_m_hz, g_hz, kappa_hz)
        )
        return cls(modes)

    def to_dict(self) -> dict:
        out = {
            "modes": [
                {
                    "f_m_hz": m.mode_frequency / TWO_PI,
                    "g_hz": m.coupling / TWO_PI,
                    "kappa_hz": m.linewidth / TWO_PI,
                    "K2": m.em_coupling_coefficient,
                }
                for m in self.modes
            ]
        }
        if self.qubit_frequency is not None:
            out["fq_hz"] = self.qubit_frequency / TWO_PI
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "CouplingSet":
        try:
            modes = tuple(
                CouplingMode(
                    TWO_PI * float(m["f_m_hz"]),
                    TWO_PI * float(m["g_hz"]),
                    TWO_PI * float(m["kappa_hz"]),
                    None if m.get("K2") is None else float(m["K2"]),
                )
                for m in data["modes"]
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"invalid coupling set: {exc!r}") from exc
        fq = data.get("fq_hz")
        return cls(modes, None if fq is None else TWO_PI * float(fq))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_json(cls, text: str) -> "CouplingSet":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno) from exc


def quantize_branch(branch: RLCBranch, qubit: QubitParams, omega_q: float | None = None) -> CouplingMode:
    """Coupling, linewidth and K^2 of one mode branch.

    ``omega_q`` overrides the transmon frequency derived from ``qubit``.
    """
    c_q = qubit.total_capacitance
    if not c_q > 0:
        raise DomainError("qubit capacitance must be positive")
    wq = qubit.omega if omega_q is None else omega_q
    if not wq > 0:
        raise DomainError("qubit frequency must be positive")
    wm = branch.omega
    k2 = branch.capacitance / c_q
    g = 0.5 * math.sqrt(wq * wm) * math.sqrt(k2)
    warnings = qubit.warnings
    if branch.capacitance >= c_q:
        warnings = warnings + (f"C_m >= C_q ({branch.capacitance:.3g} F): coupling formula outside its validity range",)
    return CouplingMode(wm, g, branch.kappa, k2, warnings)


def coupling_inductive_form(branch: RLCBranch, qubit: QubitParams, omega_q: float | None = None) -> float:
    """``sqrt(w_q w_m)/2 * sqrt(L_q/L_m)``; equals the capacitive form at w_q = w_m."""
    wq = qubit.omega if omega_q is None else omega_q
    lq = 1.0 / (wq * wq * qubit.total_capacitance)
    return 0.5 * math.sqrt(wq * branch.omega) * math.sqrt(lq / branch.inductance)


def dequantize(mode: CouplingMode, omega_q: float, c_q: float) -> RLCBranch:
    """Inverse of :func:`quantize_branch`: rebuild (R, L, C) from (w_m, g, kappa)."""
    if not (omega_q > 0 and c_q > 0):
        raise DomainError("need omega_q > 0 and c_q > 0")
    c_m = c_q * (2.0 * mode.coupling) ** 2 / (omega_q * mode.mode_frequency)
    if not c_m > 0:
        raise DomainError("zero coupling has no finite branch representation")
    return RLCBranch.from_mode(mode.mode_frequency, mode.linewidth, c_m)


def quantize_circuit(circuit: BVDCircuit, qubit: QubitParams, omega_q: float | None = None) -> CouplingSet:
    """Quantize every branch of a BVD circuit against the same qubit."""
    wq = qubit.omega if omega_q is None else omega_q
    return CouplingSet(tuple(quantize_branch(b, qubit, wq) for b in circuit.branches), wq)


def t1_from_admittance(y: Admittance, c_idt: float) -> float:
    """Black-box lifetime ``T1 = C_idt / Re Y``."""
    if not c_idt > 0:
        raise DomainError("C_idt must be positive")
    if not y.conductance > G_MIN:
        raise UndefinedLifetimeError(
            f"Re Y = {y.conductance:.3g} S at {y.freq_hz:.6g} Hz: lifetime undefined for a lossless point"
        )
    return c_idt / y.conductance


def t1_spectrum(circuit: BVDCircuit, omegas) -> np.ndarray:
    """``C_idt / Re Y(w)`` on an array of angular frequencies."""
    y = admittance_array(circuit, omegas)
    if np.any(y.real <= G_MIN):
        raise UndefinedLifetimeError("Re Y vanishes somewhere on the grid")
    return circuit.static_capacitance / y.real


def q_from_admittance(y: Admittance) -> float:
    """Quality factor ``Im Y / Re Y``."""
    if not y.conductance > 0:
        raise DomainError("Re Y must be positive")
    if not y.susceptance > 0:
        raise DomainError("Im Y must be positive")
    return y.susceptance / y.conductance


def synthesize_circuit(
    couplings: CouplingSet, omega_q: float, c_idt: float
) -> BVDCircuit:
    """BVD circuit whose branches quantize back to ``couplings`` (C_q = C_idt)."""
    return BVDCircuit(c_idt, tuple(dequantize(m, omega_q, c_idt) for m in couplings.modes))


def coupling_for_k2(k2: float, omega_q: float, omega_m: float) -> float:
    """g from an electromechanical coupling coefficient K^2."""
    return 0.5 * math.sqrt(omega_q * omega_m * k2)


def k2_for_coupling(g: float, omega_q: float, omega_m: float) -> float:
    return (2.0 * g) ** 2 / (omega_q * omega_m)


def branches_from_hz(f_m_hz: Sequence[float], kappa_hz: Sequence[float], c_m: Sequence[float]) -> list[RLCBranch]:
    return [RLCBranch.from_mode(TWO_PI * f, TWO_PI * k, c) for f, k, c in zip(f_m_hz, kappa_hz, c_m)]

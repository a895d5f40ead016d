"""Lumped-element admittance of multimode Butterworth-Van Dyke circuits.

A SAW resonator seen from the IDT port is a static capacitance ``C_idt`` in
parallel with one series RLC branch per mechanical mode::

    Y(w) = i w C_idt + sum_k 1 / (R_k + i w L_k + 1 / (i w C_k))

All arithmetic is in angular frequency (rad/s); file I/O is in Hz.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, InvariantError, ParseError, SingularAdmittanceError

TWO_PI = 2.0 * math.pi

# relative size of the net reactance below which a lossless branch is singular
_SINGULAR_RTOL = 4.0 * np.finfo(float).eps


@dataclass(frozen=True)
class RLCBranch:
    """Series RLC branch representing one mechanical mode."""

    resistance: float
    inductance: float
    capacitance: float

    def __post_init__(self):
        if not (self.inductance > 0 and math.isfinite(self.inductance)):
            raise InvariantError(f"inductance must be positive and finite, got {self.inductance}")
        if not (self.capacitance > 0 and math.isfinite(self.capacitance)):
            raise InvariantError(f"capacitance must be positive and finite, got {self.capacitance}")
        if not (self.resistance >= 0 and math.isfinite(self.resistance)):
            raise InvariantError(f"resistance must be non-negative, got {self.resistance}")
        if not (self.omega > 0 and math.isfinite(self.omega)):
            raise InvariantError("mode frequency 1/sqrt(LC) is not finite")

    @property
    def omega(self) -> float:
        """Series resonance 1/sqrt(LC) in rad/s."""
        return 1.0 / math.sqrt(self.inductance * self.capacitance)

    @property
    def kappa(self) -> float:
        """Energy decay rate R/L in 1/s."""
        return self.resistance / self.inductance

    @classmethod
    def from_mode(cls, omega: float, kappa: float, capacitance: float) -> "RLCBranch":
        """Build a branch from its resonance, linewidth and motional capacitance."""
        if omega <= 0 or capacitance <= 0 or kappa < 0:
            raise DomainError("need omega > 0, capacitance > 0 and kappa >= 0")
        inductance = 1.0 / (omega * omega * capacitance)
        return cls(kappa * inductance, inductance, capacitance)


def _canonical_key(branch: RLCBranch):
    # ties in frequency: larger motional capacitance first, then R and L so the order is total
    return (branch.omega, -branch.capacitance, branch.resistance, branch.inductance)


@dataclass(frozen=True)
class BVDCircuit:
    """Static capacitance in parallel with motional RLC branches.

    Branches are stored in canonical order (ascending mode frequency, ties
    broken by larger capacitance, then resistance and inductance)
    regardless of the input order.
    """

    static_capacitance: float
    branches: tuple[RLCBranch, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if not (self.static_capacitance > 0 and math.isfinite(self.static_capacitance)):
            raise InvariantError(f"static capacitance must be positive, got {self.static_capacitance}")
        ordered = tuple(sorted(self.branches, key=_canonical_key))
        object.__setattr__(self, "branches", ordered)

    @property
    def n_modes(self) -> int:
        return len(self.branches)

    def with_branches(self, branches: Iterable[RLCBranch]) -> "BVDCircuit":
        return BVDCircuit(self.static_capacitance, tuple(branches))

    def to_dict(self) -> dict:
        return {
            "c_idt_f": self.static_capacitance,
            "branches": [
                {"r_ohm": b.resistance, "l_h": b.inductance, "c_f": b.capacitance}
                for b in self.branches
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "BVDCircuit":
        try:
            branches = tuple(
                RLCBranch(float(b["r_ohm"]), float(b["l_h"]), float(b["c_f"]))
                for b in data.get("branches", [])
            )
            return cls(float(data["c_idt_f"]), branches)
        except (KeyError, TypeError) as exc:
            raise ParseError(f"invalid circuit description: {exc!r}") from exc


@dataclass(frozen=True)
class Admittance:
    """Complex admittance Y = G + iB at angular frequency ``frequency``."""

    frequency: float
    conductance: float
    susceptance: float

    @property
    def value(self) -> complex:
        return complex(self.conductance, self.susceptance)

    @property
    def freq_hz(self) -> float:
        return self.frequency / TWO_PI


def _check_omega(omega):
    if not (omega > 0 and math.isfinite(omega)):
        raise DomainError(f"angular frequency must be positive and finite, got {omega}")


def _branch_gb(resistance, inductance, capacitance, omega):
    """Conductance and susceptance of a series RLC branch (array-friendly)."""
    xl = omega * inductance
    xc = 1.0 / (omega * capacitance)
    x = xl - xc
    if resistance == 0.0:
        singular = np.abs(x) <= _SINGULAR_RTOL * np.maximum(xl, xc)
        if np.any(singular):
            where = np.atleast_1d(omega)[np.atleast_1d(singular)][0]
            raise SingularAdmittanceError(
                f"lossless branch evaluated at its resonance (omega = {where:.12g} rad/s)"
            )
    denom = resistance * resistance + x * x
    return resistance / denom, -x / denom


def series_rlc_admittance(branch: RLCBranch, omega: float) -> Admittance:
    """Admittance ``1/(R + i w L + 1/(i w C))`` of a single branch."""
    _check_omega(omega)
    g, b = _branch_gb(branch.resistance, branch.inductance, branch.capacitance, omega)
    return Admittance(omega, float(g), float(b))


def motional_admittance(circuit: BVDCircuit, omegas) -> np.ndarray:
    """Summed branch admittance (without ``C_idt``) on an array of frequencies."""
    w = np.asarray(omegas, dtype=float)
    g = np.zeros_like(w)
    b = np.zeros_like(w)
    for br in circuit.branches:
        gk, bk = _branch_gb(br.resistance, br.inductance, br.capacitance, w)
        g = g + gk
        b = b + bk
    return g + 1j * b


def admittance_array(circuit: BVDCircuit, omegas) -> np.ndarray:
    """Vectorised ``bvd_admittance``: complex Y at every entry of ``omegas``."""
    w = np.asarray(omegas, dtype=float)
    if w.size and not np.all((w > 0) & np.isfinite(w)):
        raise DomainError("angular frequencies must be positive and finite")
    y = motional_admittance(circuit, w)
    return y.real + 1j * (y.imag + w * circuit.static_capacitance)


def bvd_admittance(circuit: BVDCircuit, omega: float) -> Admittance:
    """Port admittance of the BVD network at one angular frequency."""
    _check_omega(omega)
    y = admittance_array(circuit, np.array([omega]))[0]
    return Admittance(omega, float(y.real), float(y.imag))


def sweep_admittance(circuit: BVDCircuit, grid: Sequence[float]) -> list[Admittance]:
    """Evaluate the circuit on a strictly increasing grid of angular frequencies.

    Every grid point is computed independently of the others, so any chunking
    or reordering of the grid gives bit-identical values.
    """
    w = np.asarray(grid, dtype=float)
    if w.size == 0:
        return []
    if w.ndim != 1:
        raise DomainError("grid must be one-dimensional")
    if not np.all((w > 0) & np.isfinite(w)):
        raise DomainError("grid frequencies must be positive and finite")
    if w.size > 1 and not np.all(np.diff(w) > 0):
        raise DomainError("grid must be strictly increasing")
    y = admittance_array(circuit, w)
    return [Admittance(float(wi), float(yi.real), float(yi.imag)) for wi, yi in zip(w, y)]


# ---------------------------------------------------------------- serialization

SWEEP_CSV_HEADER = ("freq_hz", "G_S", "B_S")


def sweep_to_rows(sweep: Sequence[Admittance]) -> list[dict]:
    return [{"freq_hz": a.freq_hz, "G_S": a.conductance, "B_S": a.susceptance} for a in sweep]


def sweep_to_csv(sweep: Sequence[Admittance], comments: Sequence[str] = ()) -> str:
    buf = io.StringIO()
    for line in comments:
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_CSV_HEADER)
    for a in sweep:
        writer.writerow([repr(a.freq_hz), repr(a.conductance), repr(a.susceptance)])
    return buf.getvalue()


def sweep_to_json(sweep: Sequence[Admittance]) -> str:
    return json.dumps(sweep_to_rows(sweep), indent=1)


def sweep_from_csv(text: str) -> list[Admittance]:
    lines = [(i + 1, ln) for i, ln in enumerate(text.splitlines()) if ln.strip() and not ln.startswith("#")]
    if not lines or tuple(c.strip() for c in lines[0][1].split(",")) != SWEEP_CSV_HEADER:
        raise ParseError("expected header freq_hz,G_S,B_S", lines[0][0] if lines else None)
    out = []
    for lineno, ln in lines[1:]:
        try:
            f, g, b = (float(x) for x in ln.split(","))
        except ValueError as exc:
            raise ParseError(f"bad row {ln!r}", lineno) from exc
        out.append(Admittance(TWO_PI * f, g, b))
    return out


def circuit_to_json(circuit: BVDCircuit) -> str:
    return json.dumps(circuit.to_dict(), indent=1)


def circuit_from_json(text: str) -> BVDCircuit:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno) from exc
    return BVDCircuit.from_dict(data)

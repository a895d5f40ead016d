"""Bundled sample tables and the synthetic-spectrum generator built on them."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .circuit import TWO_PI
from .dynamics import relaxation_rate
from .errors import DomainError, FixtureNotFoundError
from .quantization import CouplingSet, QubitParams
from .spectrum_fit import SpectrumData
from .streams import stream

SAMPLES = ("A", "B", "C")
QUBIT_TABLE = "qubits.csv"
COUPLING_TABLE = "couplings.csv"
LAYOUT_FILE = "reproduce.json"
MARGIN_FSR = 3.0


def data_path(name: str):
    return resources.files("piezoqubit") / "data" / name


def read_fixture(name: str) -> str:
    path = data_path(name)
    try:
        return path.read_text()
    except (FileNotFoundError, OSError) as exc:
        raise FixtureNotFoundError(f"bundled fixture not found: expected {path}") from exc


def _rows(name: str) -> list[dict]:
    text = read_fixture(name)
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


def _check_sample(sample: str) -> str:
    s = sample.upper()
    if s not in SAMPLES:
        raise DomainError(f"unknown sample {sample!r}; expected one of {', '.join(SAMPLES)}")
    return s


def qubit_table() -> dict[str, dict]:
    """Per-sample ``ec_hz``, ``ej_max_hz`` and reported ``fq_max_hz``."""
    out = {}
    for r in _rows(QUBIT_TABLE):
        out[r["sample"]] = {
            "ec_hz": float(r["ec_mhz"]) * 1e6,
            "ej_max_hz": float(r["ej_max_ghz"]) * 1e9,
            "fq_max_hz": float(r["fq_max_mhz"]) * 1e6,
        }
    return out


def coupling_table(sample: str) -> list[tuple[float, float]]:
    """``(g_hz, kappa_hz)`` per resonance in table order."""
    s = _check_sample(sample)
    rows = [r for r in _rows(COUPLING_TABLE) if r["sample"] == s]
    rows.sort(key=lambda r: int(r["k"]))
    return [(float(r["g_khz"]) * 1e3, float(r["kappa_mhz"]) * 1e6) for r in rows]


@dataclass(frozen=True)
class SampleLayout:
    """Assumed placement of a sample's mode comb and its qubit coherence."""

    center_hz: float
    fsr_hz: float
    t1_background_s: float
    t2_star_s: float
    step_hz: float
    noise: float = 0.05

    @property
    def gamma2q(self) -> float:
        return 1.0 / self.t2_star_s


def sample_layout(sample: str) -> SampleLayout:
    s = _check_sample(sample)
    cfg = json.loads(read_fixture(LAYOUT_FILE))
    return SampleLayout(noise=float(cfg.get("noise", 0.05)), **cfg["samples"][s])


def comb_frequencies(center_hz: float, fsr_hz: float, n: int) -> np.ndarray:
    """Mode k (1-based) at ``center + (k - (n+1)/2) * fsr``."""
    k = np.arange(1, n + 1)
    return center_hz + (k - 0.5 * (n + 1)) * fsr_hz


def sample_couplings(sample: str) -> CouplingSet:
    rows = coupling_table(sample)
    lay = sample_layout(sample)
    f = comb_frequencies(lay.center_hz, lay.fsr_hz, len(rows))
    return CouplingSet.from_hz(f, [g for g, _ in rows], [k for _, k in rows])


def sample_qubit(sample: str) -> QubitParams:
    """Qubit at its sweet spot with the layout's background T1 and T2*."""
    s = _check_sample(sample)
    t = qubit_table()[s]
    lay = sample_layout(s)
    g1 = 1.0 / lay.t1_background_s
    return QubitParams(
        t["ec_hz"], t["ej_max_hz"], nominal_decay=g1, pure_dephasing=lay.gamma2q - 0.5 * g1
    )


def synthetic_spectrum(sample: str, seed: int = 0, replicate: int = 0, noise: float | None = None) -> SpectrumData:
    """T1 spectrum of a sample's comb with multiplicative Gaussian noise on T1.

    The grid spans the comb plus three FSR on each side at the layout step.
    ``noise=0`` gives the exact model. Each point reports an uncertainty of
    ``noise * T1`` (measured value). The random stream is keyed by
    ``(seed, sample index, replicate)``.
    """
    s = _check_sample(sample)
    lay = sample_layout(s)
    cs = sample_couplings(s)
    qubit = sample_qubit(s)
    wm, g, k = cs.arrays()
    fm = wm / TWO_PI
    lo = fm[0] - MARGIN_FSR * lay.fsr_hz
    hi = fm[-1] + MARGIN_FSR * lay.fsr_hz
    n = int(round((hi - lo) / lay.step_hz)) + 1
    f = np.linspace(lo, hi, n)
    rate = relaxation_rate(TWO_PI * f, wm, g, k, qubit.nominal_decay, qubit.gamma2)
    t1 = 1.0 / rate
    sigma = lay.noise if noise is None else noise
    if sigma > 0:
        eps = stream(seed, SAMPLES.index(s), replicate).standard_normal(n)
        t1 = t1 * (1.0 + sigma * eps)
        return SpectrumData(f, t1, sigma * t1)
    return SpectrumData(f, t1)


# ------------------------------------------------------------------ round trip

MEDIAN_TOL = 0.05
WORST_TOL = 0.15


def match_modes(injected_hz, fitted_hz, max_distance: float) -> list[int | None]:
    """Index of the nearest fitted mode for each injected mode (``None`` if too far)."""
    fitted = np.asarray(fitted_hz, dtype=float)
    out = []
    for f in injected_hz:
        if fitted.size == 0:
            out.append(None)
            continue
        j = int(np.argmin(np.abs(fitted - f)))
        out.append(j if abs(fitted[j] - f) <= max_distance else None)
    return out


@dataclass(frozen=True)
class RecoveryReport:
    """Injected versus recovered mode parameters over noise replicates.

    ``g_errors`` and ``kappa_errors`` have shape ``(replicates, modes)`` and
    hold ``|recovered / injected - 1|`` (``inf`` for a missed mode).
    """

    sample: str
    seed: int
    injected: CouplingSet
    recovered: tuple  # SpectrumFitResult per replicate
    g_errors: np.ndarray
    kappa_errors: np.ndarray

    @property
    def n_modes(self) -> int:
        return len(self.injected)

    def _stat(self, fn):
        return {"g": float(fn(self.g_errors)), "kappa": float(fn(self.kappa_errors))}

    @property
    def median_error(self) -> dict:
        return self._stat(np.median)

    @property
    def worst_error(self) -> dict:
        return self._stat(np.max)

    @property
    def all_converged(self) -> bool:
        return all(r.converged for r in self.recovered)

    def criteria(self) -> dict[str, bool]:
        med, worst = self.median_error, self.worst_error
        return {
            "mode_count": all(len(r.modes) == self.n_modes for r in self.recovered),
            "median_within_5pct": med["g"] <= MEDIAN_TOL and med["kappa"] <= MEDIAN_TOL,
            "worst_within_15pct": worst["g"] <= WORST_TOL and worst["kappa"] <= WORST_TOL,
        }

    def table(self) -> list[dict]:
        """Per-mode rows: injected values, replicate-0 recovery, error statistics."""
        wm, g, k = self.injected.arrays()
        first = self.recovered[0]
        idx = match_modes(wm / TWO_PI, [m.f_m for m in first.modes], sample_layout(self.sample).fsr_hz / 2)
        rows = []
        for i in range(self.n_modes):
            m = first.modes[idx[i]] if idx[i] is not None else None
            rows.append(
                {
                    "k": i + 1,
                    "f_m_hz": float(wm[i] / TWO_PI),
                    "g_injected_hz": float(g[i] / TWO_PI),
                    "g_recovered_hz": None if m is None else m.g,
                    "g_stderr_hz": None if m is None else m.g_stderr,
                    "kappa_injected_hz": float(k[i] / TWO_PI),
                    "kappa_recovered_hz": None if m is None else m.kappa,
                    "kappa_stderr_hz": None if m is None else m.kappa_stderr,
                    "g_median_error": float(np.median(self.g_errors[:, i])),
                    "g_worst_error": float(np.max(self.g_errors[:, i])),
                    "kappa_median_error": float(np.median(self.kappa_errors[:, i])),
                    "kappa_worst_error": float(np.max(self.kappa_errors[:, i])),
                }
            )
        return rows


def recover_sample(sample: str, seed: int = 0, replicates: int = 20, **fit_options) -> RecoveryReport:
    """Synthesize, detect and fit ``replicates`` noisy spectra of one sample."""
    from .spectrum_fit import analyze_spectrum

    s = _check_sample(sample)
    if replicates < 1:
        raise DomainError("replicates must be at least 1")
    lay = sample_layout(s)
    cs = sample_couplings(s)
    wm, g, k = cs.arrays()
    results, eg, ek = [], [], []
    for r in range(replicates):
        data = synthetic_spectrum(s, seed, r)
        res = analyze_spectrum(data, lay.gamma2q, **fit_options)
        idx = match_modes(wm / TWO_PI, [m.f_m for m in res.modes], lay.fsr_hz / 2)
        eg.append([abs(res.modes[j].g / (gi / TWO_PI) - 1) if j is not None else math.inf for j, gi in zip(idx, g)])
        ek.append([abs(res.modes[j].kappa / (ki / TWO_PI) - 1) if j is not None else math.inf for j, ki in zip(idx, k)])
        results.append(res)
    return RecoveryReport(s, int(seed), cs, tuple(results), np.array(eg), np.array(ek))

"""Frequency scaling of interface-piezoelectric and TLS dielectric loss.

Both channels enter as participation times loss tangent::

    1/Q_piezo(f) = p * tan_d_piezo * (f / f_piezo)^x
    1/Q_TLS(f)   = 2 p * tan_d_TLS0 * (f / f_TLS)^beta

where ``p`` is the metal-substrate interface participation ratio and the
TLS participation is taken as twice that (similar loss tangents on each
interface).
"""
from __future__ import annotations

import configparser
import csv
import io
import json
import math
from dataclasses import asdict, dataclass, fields

import numpy as np

from .circuit import TWO_PI
from .errors import DegenerateModelError, DomainError, InsufficientDataError, InvariantError, NoCrossoverError, ParseError

TLS_MODEL_CAVEAT = "TLS loss-tangent frequency scaling f^beta is an empirical extrapolation, not expected to be accurate"


@dataclass(frozen=True)
class LossModel:
    piezo_tan_delta: float = 1.7e-4
    piezo_reference_frequency: float = 4.5e9
    piezo_exponent: float = 2.4
    epr: float = 1e-3
    tls_tan_delta0: float = 1e-3
    tls_reference_frequency: float = 6e9
    tls_exponent: float = 0.15

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not (math.isfinite(v) and v >= 0):
                raise InvariantError(f"{f.name} must be finite and non-negative")
        for name in ("piezo_tan_delta", "piezo_reference_frequency", "epr", "tls_tan_delta0", "tls_reference_frequency"):
            if not getattr(self, name) > 0:
                raise InvariantError(f"{name} must be positive")
        if not self.epr < 1:
            raise InvariantError("participation ratio must be below 1")

    @property
    def piezo_reference_q(self) -> float:
        """Q_piezo at the piezo reference frequency."""
        return 1.0 / (self.epr * self.piezo_tan_delta)

    @property
    def tls_participation(self) -> float:
        return 2.0 * self.epr

    @property
    def assumptions(self) -> tuple[str, ...]:
        return (TLS_MODEL_CAVEAT,) if self.tls_exponent != 0 else ()

    @classmethod
    def from_reference_q(cls, piezo_reference_q: float, epr: float, **kw) -> "LossModel":
        return cls(piezo_tan_delta=1.0 / (piezo_reference_q * epr), epr=epr, **kw)

    def replace(self, **kw) -> "LossModel":
        d = asdict(self)
        d.update(kw)
        return LossModel(**d)


CONFIG_KEYS = {
    "piezo_tan_delta": "piezo_tan_delta",
    "piezo_reference_frequency_hz": "piezo_reference_frequency",
    "piezo_exponent": "piezo_exponent",
    "epr": "epr",
    "tls_tan_delta0": "tls_tan_delta0",
    "tls_reference_frequency_hz": "tls_reference_frequency",
    "tls_exponent": "tls_exponent",
}


def load_config(text: str) -> LossModel:
    """Parse ``key = value`` lines (``#`` comments) into a :class:`LossModel`.

    Missing keys keep their defaults; unknown keys are an error.
    """
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    parser.optionxform = str
    try:
        parser.read_string("[model]\n" + text)
    except configparser.ParsingError as exc:
        lineno, text = exc.errors[0]
        raise ParseError(f"expected 'key = value', got {text.strip()!r}", lineno - 1) from exc
    except configparser.DuplicateOptionError as exc:
        raise ParseError(f"duplicate key {exc.option!r}", exc.lineno - 1) from exc
    except configparser.Error as exc:
        line = getattr(exc, "lineno", None)
        raise ParseError(str(exc).splitlines()[0], None if line is None else line - 1) from exc
    extra = [s for s in parser.sections() if s != "model"]
    if extra:
        raise ParseError(f"section headers are not allowed, found [{extra[0]}]")
    kw = {}
    for key, raw in parser["model"].items():
        if key not in CONFIG_KEYS:
            raise ParseError(f"unknown key {key!r}")
        try:
            kw[CONFIG_KEYS[key]] = float(raw)
        except ValueError as exc:
            raise ParseError(f"{key}: not a number: {raw!r}") from exc
    return LossModel(**kw)


def dump_config(model: LossModel) -> str:
    inv = {v: k for k, v in CONFIG_KEYS.items()}
    return "".join(f"{inv[f.name]} = {getattr(model, f.name)!r}\n" for f in fields(model))


def _freq(fq):
    f = np.asarray(fq, dtype=float)
    if not np.all(f > 0):
        raise DomainError("frequencies must be positive")
    return f


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def inverse_q_piezo(model: LossModel, fq):
    f = _freq(fq)
    return _out(model.epr * model.piezo_tan_delta * (f / model.piezo_reference_frequency) ** model.piezo_exponent)


def inverse_q_tls(model: LossModel, fq):
    f = _freq(fq)
    return _out(model.tls_participation * model.tls_tan_delta0 * (f / model.tls_reference_frequency) ** model.tls_exponent)


def q_piezo(model: LossModel, fq):
    """Piezoelectric quality factor at ``fq`` (Hz)."""
    return _out(1.0 / np.asarray(inverse_q_piezo(model, fq)))


def q_tls(model: LossModel, fq):
    """TLS quality factor at ``fq`` (Hz)."""
    return _out(1.0 / np.asarray(inverse_q_tls(model, fq)))


def q_total(model: LossModel, fq):
    return _out(1.0 / (np.asarray(inverse_q_piezo(model, fq)) + np.asarray(inverse_q_tls(model, fq))))


def gamma_piezo(model: LossModel, fq):
    """Piezoelectric decay rate ``2 pi f / Q_piezo`` in 1/s."""
    f = _freq(fq)
    return _out(TWO_PI * f * np.asarray(inverse_q_piezo(model, f)))


def crossover_frequency(model: LossModel) -> float:
    """Frequency (Hz) where ``Q_piezo = Q_TLS``.

    Raises
    ------
    DegenerateModelError
        The two curves coincide.
    NoCrossoverError
        ``piezo_exponent <= tls_exponent`` otherwise.
    """
    x, b = model.piezo_exponent, model.tls_exponent
    # ln(1/Q) = ln(c) + exponent * ln(f)
    cp = math.log(model.epr * model.piezo_tan_delta) - x * math.log(model.piezo_reference_frequency)
    ct = math.log(model.tls_participation * model.tls_tan_delta0) - b * math.log(model.tls_reference_frequency)
    if x == b and math.isclose(cp, ct, rel_tol=1e-12, abs_tol=1e-12):
        raise DegenerateModelError("piezo and TLS loss models coincide: every frequency is a crossover")
    if not x > b:
        raise NoCrossoverError(f"piezo exponent {x} must exceed TLS exponent {b}")
    return math.exp((ct - cp) / (x - b))


# ------------------------------------------------------------------ fitting


@dataclass(frozen=True)
class PowerLawFit:
    """``y = prefactor * (f / reference_frequency) ** exponent``."""

    exponent: float
    prefactor: float
    r_squared: float
    exponent_stderr: float | None
    reference_frequency: float = 1e9
    n_points: int = 0

    def __call__(self, f):
        return self.prefactor * (np.asarray(f, dtype=float) / self.reference_frequency) ** self.exponent


def fit_power_law(freqs, values, reference_frequency: float = 1e9) -> PowerLawFit:
    """Ordinary least squares of ``log y`` on ``log f``.

    Two points give the exact interpolant with ``r_squared = 1`` and no
    standard error.
    """
    f = np.asarray(freqs, dtype=float)
    y = np.asarray(values, dtype=float)
    if f.shape != y.shape or f.ndim != 1:
        raise DomainError("frequencies and values must be 1-d arrays of equal length")
    if f.size < 2:
        raise InsufficientDataError(f"need at least 2 points, got {f.size}")
    if not (np.all(f > 0) and np.all(y > 0)):
        raise DomainError("power-law fit requires positive frequencies and values")
    lx = np.log(f / reference_frequency)
    ly = np.log(y)
    xm, ym = lx.mean(), ly.mean()
    sxx = float(np.sum((lx - xm) ** 2))
    if not sxx > 0:
        raise DomainError("frequencies must not all be equal")
    slope = float(np.sum((lx - xm) * (ly - ym)) / sxx)
    intercept = ym - slope * xm
    resid = ly - (intercept + slope * lx)
    sst = float(np.sum((ly - ym) ** 2))
    sse = float(np.sum(resid**2))
    if f.size == 2:
        r2, se = 1.0, None
    else:
        r2 = 1.0 - sse / sst if sst > 0 else 1.0
        se = math.sqrt(sse / (f.size - 2) / sxx)
    return PowerLawFit(slope, math.exp(intercept), r2, se, reference_frequency, int(f.size))


def fit_loss_tangent(eprs, inverse_q) -> tuple[float, float]:
    """Straight-line fit ``1/Q = tan_d * p + c``; returns ``(tan_d, c)``."""
    p = np.asarray(eprs, dtype=float)
    iq = np.asarray(inverse_q, dtype=float)
    if p.size < 2 or p.shape != iq.shape:
        raise InsufficientDataError("need at least 2 (epr, 1/Q) pairs")
    slope, intercept = np.polyfit(p, iq, 1)
    return float(slope), float(intercept)


# ------------------------------------------------------------------ budget table


@dataclass(frozen=True)
class LossBudget:
    frequencies: np.ndarray
    q_piezo: np.ndarray
    q_tls: np.ndarray
    q_total: np.ndarray
    crossover: float | None
    assumptions: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "fq_hz": [float(x) for x in self.frequencies],
            "q_piezo": [float(x) for x in self.q_piezo],
            "q_tls": [float(x) for x in self.q_tls],
            "q_total": [float(x) for x in self.q_total],
            "crossover_hz": self.crossover,
            "assumptions": list(self.assumptions),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    def to_csv(self, comments=()) -> str:
        buf = io.StringIO()
        for line in comments:
            buf.write(f"# {line}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["fq_hz", "q_piezo", "q_tls", "q_total"])
        for row in zip(self.frequencies, self.q_piezo, self.q_tls, self.q_total):
            w.writerow([repr(float(v)) for v in row])
        return buf.getvalue()


def log_grid(fmin: float, fmax: float, npoints: int) -> np.ndarray:
    if not (fmin > 0 and fmax > fmin):
        raise DomainError(f"need 0 < fmin < fmax, got fmin={fmin}, fmax={fmax}")
    if npoints < 2:
        raise DomainError(f"need at least 2 points, got {npoints}")
    return np.geomspace(fmin, fmax, int(npoints))


def loss_budget(model: LossModel, fmin: float = 1e9, fmax: float = 30e9, npoints: int = 30) -> LossBudget:
    """Budget table on a log-spaced grid plus the crossover (``None`` if absent)."""
    f = log_grid(fmin, fmax, npoints)
    try:
        fc = crossover_frequency(model)
    except NoCrossoverError:
        fc = None
    return LossBudget(f, q_piezo(model, f), q_tls(model, f), q_total(model, f), fc, model.assumptions)

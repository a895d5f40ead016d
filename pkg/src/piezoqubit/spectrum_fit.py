"""Fit relaxation spectra T1(f_q) to a sum of Lorentzian Purcell channels.

The model, in rate space (``Gamma_1 = 1/T1``)::

    Gamma_1(w) = Gamma_1^(0) + sum_k 2 g_k^2 G_k / (G_k^2 + (w - w_k)^2)
    G_k = gamma2q + kappa_k / 2

``gamma2q`` (the qubit decoherence rate, 1/T2*) is a fixed input. The fit is
a Levenberg-Marquardt iteration on softplus-transformed ``Gamma_1^(0)``,
``g_k``, ``kappa_k`` (keeping them non-negative) and raw mode-frequency
offsets.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import find_peaks, peak_prominences, peak_widths, savgol_coeffs, savgol_filter

from .circuit import TWO_PI
from .errors import DomainError, InsufficientDataError, InvariantError, ParseError, RankDeficientError

# internal unit for angular frequencies and rates: 2 pi x 1 MHz
_UNIT = TWO_PI * 1e6

DEFAULT_MAX_ITER = 500
GRAD_TOL = 1e-8
LAMBDA0 = 1e-3
LAMBDA_MAX = 1e16
_FLAT_RTOL = 1e-9
_FLOOR_RTOL = 64 * np.finfo(float).eps
MERGE_FACTOR = 1.0
MIN_DETECT_POINTS = 20


def softplus(x):
    return np.logaddexp(0.0, x)


def softplus_inv(y):
    y = np.asarray(y, dtype=float)
    return y + np.log(-np.expm1(-y))


def _sigmoid(x):
    return 0.5 * (1.0 + np.tanh(0.5 * x))


@dataclass(frozen=True, eq=False)
class SpectrumData:
    """Measured or synthetic T1 versus qubit frequency (Hz, seconds)."""

    frequencies: np.ndarray
    t1: np.ndarray
    t1_uncertainty: np.ndarray | None = None
    t2_star: np.ndarray | None = None

    def __post_init__(self):
        f = np.asarray(self.frequencies, dtype=float)
        t1 = np.asarray(self.t1, dtype=float)
        if f.ndim != 1 or f.shape != t1.shape:
            raise InvariantError("frequencies and t1 must be 1-d arrays of equal length")
        if f.size > 1 and not np.all(np.diff(f) > 0):
            raise InvariantError("frequencies must be strictly increasing")
        if not np.all(t1 > 0):
            raise InvariantError("t1 must be positive")
        object.__setattr__(self, "frequencies", f)
        object.__setattr__(self, "t1", t1)
        for name in ("t1_uncertainty", "t2_star"):
            v = getattr(self, name)
            if v is not None:
                v = np.asarray(v, dtype=float)
                if v.shape != f.shape:
                    raise InvariantError(f"{name} must match frequencies in length")
                object.__setattr__(self, name, v)

    def __len__(self):
        return self.frequencies.size

    @property
    def rates(self) -> np.ndarray:
        return 1.0 / self.t1

    @property
    def rate_uncertainty(self) -> np.ndarray | None:
        if self.t1_uncertainty is None:
            return None
        return self.t1_uncertainty / self.t1**2

    def scaled(self, factor: float) -> "SpectrumData":
        """Copy with every T1 (and its uncertainty) multiplied by ``factor``."""
        err = None if self.t1_uncertainty is None else self.t1_uncertainty * factor
        return SpectrumData(self.frequencies, self.t1 * factor, err, self.t2_star)

    def to_csv(self, comments=()) -> str:
        buf = io.StringIO()
        for line in comments:
            buf.write(f"# {line}\n")
        w = csv.writer(buf, lineterminator="\n")
        has_err = self.t1_uncertainty is not None
        w.writerow(["fq_hz", "t1_s"] + (["t1_err_s"] if has_err else []))
        for i in range(len(self)):
            row = [repr(float(self.frequencies[i])), repr(float(self.t1[i]))]
            if has_err:
                row.append(repr(float(self.t1_uncertainty[i])))
            w.writerow(row)
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "SpectrumData":
        """Parse ``fq_hz,t1_s[,t1_err_s]``; ``#`` lines are comments."""
        rows = [(i + 1, ln.strip()) for i, ln in enumerate(text.splitlines())]
        rows = [(i, ln) for i, ln in rows if ln and not ln.startswith("#")]
        if not rows:
            raise ParseError("empty spectrum file", 1)
        hline, header = rows[0]
        cols = [c.strip() for c in header.split(",")]
        if cols not in (["fq_hz", "t1_s"], ["fq_hz", "t1_s", "t1_err_s"]):
            raise ParseError(f"expected header 'fq_hz,t1_s[,t1_err_s]', got {header!r}", hline)
        vals = []
        for lineno, ln in rows[1:]:
            parts = ln.split(",")
            if len(parts) != len(cols):
                raise ParseError(f"expected {len(cols)} fields, got {len(parts)}", lineno)
            try:
                nums = [float(p) for p in parts]
            except ValueError as exc:
                raise ParseError(f"non-numeric field in {ln!r}", lineno) from exc
            if not all(math.isfinite(x) for x in nums) or nums[1] <= 0:
                raise ParseError("values must be finite with t1 > 0", lineno)
            if vals and nums[0] <= vals[-1][0]:
                raise ParseError("frequencies must be strictly increasing", lineno)
            vals.append(nums)
        if not vals:
            raise ParseError("no data rows", hline)
        arr = np.array(vals)
        err = arr[:, 2] if arr.shape[1] == 3 else None
        return cls(arr[:, 0], arr[:, 1], err)


@dataclass(frozen=True)
class FittedMode:
    f_m: float
    g: float
    kappa: float
    g_stderr: float
    kappa_stderr: float
    f_m_stderr: float = 0.0


@dataclass(frozen=True)
class SpectrumFitResult:
    """Outcome of :func:`fit_spectrum`. Frequencies and rates in Hz (``x/2pi``)."""

    background_t1: float
    modes: tuple[FittedMode, ...]
    residual_norm: float
    converged: bool
    gamma2q: float = 0.0
    iterations: int = 0
    cost: float = 0.0
    background_t1_stderr: float = 0.0
    merged_seeds: tuple[float, ...] = field(default_factory=tuple)

    def __post_init__(self):
        f = [m.f_m for m in self.modes]
        if f != sorted(f):
            raise InvariantError("modes must be sorted by frequency")
        for m in self.modes:
            if m.g < 0 or m.kappa < 0 or m.g_stderr < 0 or m.kappa_stderr < 0:
                raise InvariantError("g, kappa and their standard errors must be non-negative")

    def rates(self, freqs_hz) -> np.ndarray:
        """Fitted relaxation rate (1/s) at qubit frequencies in Hz."""
        w = TWO_PI * np.asarray(freqs_hz, dtype=float)
        out = np.full(w.shape, 1.0 / self.background_t1)
        for m in self.modes:
            gg = TWO_PI * m.g
            G = self.gamma2q + 0.5 * TWO_PI * m.kappa
            d = w - TWO_PI * m.f_m
            out = out + 2.0 * gg * gg * G / (G * G + d * d)
        return out

    def to_dict(self) -> dict:
        return {
            "background_t1": self.background_t1,
            "background_t1_stderr": self.background_t1_stderr,
            "gamma2q": self.gamma2q,
            "modes": [
                {
                    "f_m": m.f_m,
                    "g": m.g,
                    "kappa": m.kappa,
                    "g_stderr": m.g_stderr,
                    "kappa_stderr": m.kappa_stderr,
                    "f_m_stderr": m.f_m_stderr,
                }
                for m in self.modes
            ],
            "residual_norm": self.residual_norm,
            "converged": self.converged,
            "iterations": self.iterations,
            "cost": self.cost,
            "merged_seeds": list(self.merged_seeds),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SpectrumFitResult":
        modes = tuple(
            FittedMode(m["f_m"], m["g"], m["kappa"], m["g_stderr"], m["kappa_stderr"], m.get("f_m_stderr", 0.0))
            for m in d["modes"]
        )
        return cls(
            d["background_t1"],
            modes,
            d["residual_norm"],
            d["converged"],
            d.get("gamma2q", 0.0),
            d.get("iterations", 0),
            d.get("cost", 0.0),
            d.get("background_t1_stderr", 0.0),
            tuple(d.get("merged_seeds", ())),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    def curve_csv(self, freqs_hz, comments=()) -> str:
        """Plot-ready samples ``fq_hz,gamma1_per_s,t1_s`` of the fitted model."""
        buf = io.StringIO()
        for line in comments:
            buf.write(f"# {line}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["fq_hz", "gamma1_per_s", "t1_s"])
        for f, r in zip(np.asarray(freqs_hz, float), self.rates(freqs_hz)):
            w.writerow([repr(float(f)), repr(float(r)), repr(float(1.0 / r))])
        return buf.getvalue()


# ------------------------------------------------------------------ detection


def noise_level(y) -> float:
    """Robust white-noise standard deviation from second differences."""
    d2 = np.diff(np.asarray(y, dtype=float), 2)
    if d2.size == 0:
        return 0.0
    return float(1.4826 * np.median(np.abs(d2 - np.median(d2))) / math.sqrt(6.0))


def detect_modes(
    data: SpectrumData, min_prominence: float = 0.1, smooth: int = 0, noise_sigmas: float = 0.0
) -> list[float]:
    """Seed frequencies (Hz): local maxima of 1/T1 with enough prominence.

    Parameters
    ----------
    data
        Spectrum with at least 20 points.
    min_prominence
        A peak qualifies when its prominence exceeds this fraction of the
        full range of the rate.
    smooth
        Window length (points, made odd) of a quadratic Savitzky-Golay
        filter applied before peak finding; 0 disables it.
    noise_sigmas
        Additionally require prominence above this many standard deviations
        of the (smoothed) noise, estimated from the data.

    Returns
    -------
    list of float
        Peak frequencies in increasing order.
    """
    if len(data) < MIN_DETECT_POINTS:
        raise InsufficientDataError(f"need at least {MIN_DETECT_POINTS} points, got {len(data)}")
    y = data.rates
    sigma = noise_level(y)
    if smooth and smooth > 2:
        win = min(int(smooth) | 1, (len(data) - 1) | 1 if len(data) % 2 else len(data) - 1)
        y = savgol_filter(y, win, 2, mode="interp")
        sigma *= float(np.linalg.norm(savgol_coeffs(win, 2)))
    span = float(y.max() - y.min())
    # ripple at rounding level is not a peak
    floor = _FLAT_RTOL * float(np.max(np.abs(y)))
    if not span > floor:
        return []
    threshold = max(min_prominence * span, noise_sigmas * sigma, floor)
    peaks, _ = find_peaks(y, prominence=threshold)
    return [float(data.frequencies[i]) for i in peaks]


def fsr_estimate(mode_frequencies) -> tuple[float, float]:
    """Free spectral range of a mode comb and its worst relative non-uniformity.

    Returns ``(fsr, max_deviation)`` where ``fsr`` is the median spacing and
    ``max_deviation = max |d_i - fsr| / fsr``.
    """
    f = np.sort(np.asarray(mode_frequencies, dtype=float))
    if f.size < 3:
        raise InsufficientDataError(f"need at least 3 modes, got {f.size}")
    d = np.diff(f)
    fsr = float(np.median(d))
    if not fsr > 0:
        raise DomainError("mode frequencies must be distinct")
    return fsr, float(np.max(np.abs(d - fsr)) / fsr)


def complete_comb(seeds, fsr: float | None = None, tolerance: float = 0.25) -> list[float]:
    """Insert seeds into comb gaps that span a whole number (>= 2) of FSRs.

    Modes hidden on the shoulder of a broad neighbour are not local maxima.
    When the surrounding modes form a near-uniform comb, a gap of ``n``
    spacings (within ``tolerance`` of an integer) receives ``n - 1`` evenly
    spaced seeds. ``fsr`` defaults to :func:`fsr_estimate` of the seeds.
    """
    f = sorted(float(x) for x in seeds)
    if len(f) < 3:
        return f
    if fsr is None:
        fsr = fsr_estimate(f)[0]
    out = [f[0]]
    for a, b in zip(f, f[1:]):
        ratio = (b - a) / fsr
        n = int(round(ratio))
        if n >= 2 and abs(ratio - n) <= tolerance:
            out.extend(a + (b - a) * j / n for j in range(1, n))
        out.append(b)
    return out


# ------------------------------------------------------------------ fitting


_GUESS_SMOOTH = 9
_SHOULDER_FRACTION = 0.25


def _climb(y, i, max_steps):
    """Move index ``i`` uphill by at most ``max_steps`` samples."""
    for _ in range(max_steps):
        if i > 0 and y[i - 1] > y[i] and (i == y.size - 1 or y[i - 1] >= y[i + 1]):
            i -= 1
        elif i < y.size - 1 and y[i + 1] > y[i]:
            i += 1
        else:
            break
    return i


def _initial_guess(w, y, seeds_w, gamma2q, smooth=_GUESS_SMOOTH):
    """Background, and per seed ``[w, g, kappa, half_width, height]``.

    Widths are measured at half prominence on a smoothed copy (quadratic
    Savitzky-Golay, ``smooth`` points), which keeps overlapping neighbours
    from inflating them. Seeds that are not local maxima (shoulders) take
    the median width of the others.
    """
    n = min(int(smooth) | 1, y.size - 1 if y.size % 2 == 0 else y.size)
    ys = savgol_filter(y, n, 2, mode="interp") if n > 2 else y
    base = float(np.percentile(ys, 2))
    step = float(np.median(np.diff(w))) if w.size > 1 else 1.0
    idx = np.array([_climb(ys, int(np.argmin(np.abs(w - ws))), n) for ws in seeds_w])
    ok = (idx > 0) & (idx < y.size - 1)
    ok[ok] = (ys[idx[ok]] > ys[idx[ok] - 1]) & (ys[idx[ok]] >= ys[idx[ok] + 1])
    if ok.any():
        # a bump on a neighbour's flank is a shoulder, not a resolved peak
        prom = peak_prominences(ys, idx[ok])[0]
        ok[ok] = prom >= _SHOULDER_FRACTION * (ys[idx[ok]] - base)
    widths = np.zeros(idx.size)
    if ok.any():
        widths[ok] = 0.5 * step * peak_widths(ys, idx[ok], rel_height=0.5)[0]
    fallback = float(np.median(widths[ok])) if ok.any() else 0.1 * (w[-1] - w[0] if w.size > 1 else 1.0)
    widths[~ok] = fallback
    widths = np.maximum(widths, max(step, gamma2q))
    modes = []
    for ws, i, hw in zip(seeds_w, idx, widths):
        kappa = max(2.0 * (hw - gamma2q), 0.2 * hw)
        G = gamma2q + 0.5 * kappa
        height = max(ys[i] - base, 1e-3 * max(base, 1e-12))
        g = math.sqrt(0.5 * height * G)
        modes.append([ws, g, kappa, hw, ys[i]])
    return base, modes


def _merge_seeds(modes, factor):
    """Drop seeds closer than ``factor`` x the smaller local half width; keep the taller."""
    kept, dropped = [], []
    for m in sorted(modes, key=lambda m: m[0]):
        if kept and m[0] - kept[-1][0] < factor * min(m[3], kept[-1][3]):
            if m[4] > kept[-1][4]:
                dropped.append(kept[-1][0])
                kept[-1] = m
            else:
                dropped.append(m[0])
            continue
        kept.append(m)
    return kept, dropped


class _Model:
    """Residuals and Jacobian in internal (scaled, softplus) coordinates."""

    def __init__(self, w, y, sigma, gamma2q, anchors):
        self.w = w
        self.y = y
        self.inv_sigma = 1.0 / sigma
        self.gamma2q = gamma2q
        self.anchors = anchors
        self.n_modes = anchors.size

    def unpack(self, theta):
        b = softplus(theta[0])
        p = theta[1:].reshape(self.n_modes, 3)
        wm = self.anchors + p[:, 0]
        g = softplus(p[:, 1])
        k = softplus(p[:, 2])
        return b, wm, g, k

    def residuals(self, theta):
        b, wm, g, k = self.unpack(theta)
        G = self.gamma2q + 0.5 * k
        d = self.w[:, None] - wm
        model = b + np.sum(2.0 * g * g * G / (G * G + d * d), axis=1)
        return (model - self.y) * self.inv_sigma

    def jacobian(self, theta):
        b, wm, g, k = self.unpack(theta)
        p = theta[1:].reshape(self.n_modes, 3)
        G = self.gamma2q + 0.5 * k
        d = self.w[:, None] - wm
        D = G * G + d * d
        dL_dg = 4.0 * g * G / D
        dL_dG = 2.0 * g * g * (d * d - G * G) / (D * D)
        dL_dw = 4.0 * g * g * G * d / (D * D)
        jac = np.empty((self.w.size, 1 + 3 * self.n_modes))
        jac[:, 0] = _sigmoid(theta[0])
        jac[:, 1::3] = dL_dw
        jac[:, 2::3] = dL_dg * _sigmoid(p[:, 1])
        jac[:, 3::3] = 0.5 * dL_dG * _sigmoid(p[:, 2])
        return jac * self.inv_sigma[:, None]


def _param_names(n):
    names = ["background_rate"]
    for i in range(n):
        names += [f"f_m[{i}]", f"g[{i}]", f"kappa[{i}]"]
    return names


def _check_rank(jac, names):
    norms = np.sqrt(np.sum(jac * jac, axis=0))
    top = norms.max() if norms.size else 0.0
    for n, name in zip(norms, names):
        if not n > 1e-12 * top or not np.isfinite(n):
            raise RankDeficientError(name)


def fit_spectrum(
    data: SpectrumData,
    seeds,
    gamma2q: float,
    *,
    weighted: bool = False,
    initial: SpectrumFitResult | None = None,
    max_iter: int = DEFAULT_MAX_ITER,
    merge_factor: float = MERGE_FACTOR,
    guess_smooth: int = _GUESS_SMOOTH,
) -> SpectrumFitResult:
    """Weighted nonlinear least squares of the Lorentzian-sum model.

    Parameters
    ----------
    data
        Spectrum to fit (rates ``1/T1`` are fitted).
    seeds
        Initial mode frequencies in Hz. Seeds closer than ``merge_factor``
        local half widths are merged before fitting.
    gamma2q
        Qubit decoherence rate in 1/s, held fixed.
    weighted
        Weight residuals by the propagated ``t1_uncertainty``; uniform
        weights otherwise (or when no uncertainties are present).
    initial
        Start from a previous result instead of ``seeds``.
    guess_smooth
        Smoothing window (points) used only to estimate starting widths.

    Returns
    -------
    SpectrumFitResult
        ``converged`` is true when the gradient norm falls below
        ``1e-8 (1 + cost)`` within ``max_iter`` iterations. Non-convergence
        is reported through the flag, never raised.
    """
    if gamma2q < 0:
        raise DomainError("gamma2q must be non-negative")
    w = TWO_PI * data.frequencies / _UNIT
    y = data.rates / _UNIT
    g2q = gamma2q / _UNIT
    if weighted and data.rate_uncertainty is not None:
        sigma = data.rate_uncertainty / _UNIT
        if not np.all(sigma > 0):
            raise DomainError("t1 uncertainties must be positive for weighted fits")
        absolute_sigma = True
    else:
        sigma = np.full_like(y, float(np.median(np.abs(y))) or 1.0)
        absolute_sigma = False

    dropped = []
    if initial is not None:
        b0 = 1.0 / initial.background_t1 / _UNIT
        anchors = np.array([TWO_PI * m.f_m / _UNIT for m in initial.modes])
        gs = np.array([TWO_PI * m.g / _UNIT for m in initial.modes])
        ks = np.array([TWO_PI * m.kappa / _UNIT for m in initial.modes])
    else:
        seeds = list(seeds)
        if not seeds:
            raise DomainError("at least one seed frequency is required")
        b0, modes = _initial_guess(w, y, np.array([TWO_PI * s / _UNIT for s in seeds]), g2q, guess_smooth)
        modes, dropped = _merge_seeds(modes, merge_factor)
        anchors = np.array([m[0] for m in modes])
        gs = np.array([m[1] for m in modes])
        ks = np.array([m[2] for m in modes])
    n = anchors.size
    theta = np.empty(1 + 3 * n)
    theta[0] = softplus_inv(max(b0, 1e-12))
    theta[1::3] = 0.0
    theta[2::3] = softplus_inv(np.maximum(gs, 1e-12))
    theta[3::3] = softplus_inv(np.maximum(ks, 1e-12))

    model = _Model(w, y, sigma, g2q, anchors)
    names = _param_names(n)
    r = model.residuals(theta)
    cost = 0.5 * float(r @ r)
    jac = model.jacobian(theta)
    _check_rank(jac, names)

    lam = LAMBDA0
    scale_diag = np.zeros(theta.size)
    converged = False
    it = 0
    while True:
        grad = jac.T @ r
        if np.linalg.norm(grad) < GRAD_TOL * (1.0 + abs(cost)):
            converged = True
            break
        if it >= max_iter or lam > LAMBDA_MAX:
            break
        it += 1
        jtj = jac.T @ jac
        # running-max scaling keeps every direction damped
        scale_diag = np.maximum(scale_diag, np.diag(jtj))
        diag = scale_diag
        while True:
            a = jtj + lam * np.diag(diag)
            try:
                step = -np.linalg.solve(a, grad)
            except np.linalg.LinAlgError:
                step = None
            if step is not None and np.all(np.isfinite(step)):
                trial = theta + step
                rt = model.residuals(trial)
                ct = 0.5 * float(rt @ rt)
                accept = np.isfinite(ct) and ct < cost
                jt = None
                if not accept and np.isfinite(ct) and ct <= cost * (1.0 + _FLOOR_RTOL):
                    # cost is flat to rounding: accept if the gradient shrinks
                    jt = model.jacobian(trial)
                    accept = np.linalg.norm(jt.T @ rt) < np.linalg.norm(grad)
                if accept:
                    theta, r, cost = trial, rt, ct
                    lam = max(lam / 10.0, 1e-15)
                    jac = model.jacobian(theta) if jt is None else jt
                    break
            lam *= 10.0
            if lam > LAMBDA_MAX:
                break

    b, wm, g, k = model.unpack(theta)
    dof = max(y.size - theta.size, 1)
    s2 = 1.0 if absolute_sigma else 2.0 * cost / dof
    cov = np.linalg.pinv(jac.T @ jac) * s2
    sd = np.sqrt(np.maximum(np.diag(cov), 0.0))
    sig = _sigmoid(theta)
    scale = _UNIT / TWO_PI
    fitted = []
    for i in range(n):
        fitted.append(
            FittedMode(
                f_m=float(wm[i] * scale),
                g=float(g[i] * scale),
                kappa=float(k[i] * scale),
                g_stderr=float(sd[2 + 3 * i] * sig[2 + 3 * i] * scale),
                kappa_stderr=float(sd[3 + 3 * i] * sig[3 + 3 * i] * scale),
                f_m_stderr=float(sd[1 + 3 * i] * scale),
            )
        )
    order = np.argsort([m.f_m for m in fitted])
    bg_rate = float(b * _UNIT)
    bg_rate_sd = float(sd[0] * sig[0] * _UNIT)
    return SpectrumFitResult(
        background_t1=1.0 / bg_rate,
        modes=tuple(fitted[i] for i in order),
        residual_norm=float(np.linalg.norm(r)),
        converged=converged,
        gamma2q=float(gamma2q),
        iterations=it,
        cost=cost,
        background_t1_stderr=bg_rate_sd / bg_rate**2,
        merged_seeds=tuple(dropped),
    )


def durbin_watson(residuals) -> float:
    e = np.asarray(residuals, dtype=float)
    return float(np.sum(np.diff(e) ** 2) / np.sum(e * e))


def fit_residuals(data: SpectrumData, result: SpectrumFitResult) -> np.ndarray:
    """Rate-space residuals ``model - data`` (1/s)."""
    return result.rates(data.frequencies) - data.rates


def analyze_spectrum(
    data: SpectrumData,
    gamma2q: float,
    *,
    min_prominence: float = 0.0,
    smooth: int = 61,
    noise_sigmas: float = 5.0,
    fill_comb: bool = True,
    min_significance: float = 5.0,
    weighted: bool = False,
) -> SpectrumFitResult:
    """Detect seeds, fill comb gaps, fit, then drop insignificant modes and refit.

    A mode is kept when ``g / g_stderr`` is at least ``min_significance``.
    With no qualifying peak the result holds only the background.
    """
    seeds = detect_modes(data, min_prominence, smooth=smooth, noise_sigmas=noise_sigmas)
    if fill_comb:
        seeds = complete_comb(seeds)
    if not seeds:
        return background_only(data)
    result = fit_spectrum(data, seeds, gamma2q, weighted=weighted, guess_smooth=max(smooth, _GUESS_SMOOTH))
    keep = [m for m in result.modes if m.g_stderr == 0 or m.g / m.g_stderr >= min_significance]
    if len(keep) == len(result.modes):
        return result
    if not keep:
        return background_only(data)
    pruned = SpectrumFitResult(result.background_t1, tuple(keep), 0.0, False, result.gamma2q)
    refit = fit_spectrum(data, (), gamma2q, weighted=weighted, initial=pruned)
    return SpectrumFitResult(
        refit.background_t1,
        refit.modes,
        refit.residual_norm,
        refit.converged,
        refit.gamma2q,
        result.iterations + refit.iterations,
        refit.cost,
        refit.background_t1_stderr,
        result.merged_seeds + tuple(m.f_m for m in result.modes if m not in keep),
    )


def background_only(data: SpectrumData) -> SpectrumFitResult:
    """Mode-free model: the background rate is the mean rate."""
    rate = float(np.mean(data.rates))
    resid = (data.rates - rate) / rate
    sd = float(np.std(data.rates, ddof=1) / math.sqrt(len(data))) if len(data) > 1 else 0.0
    return SpectrumFitResult(
        background_t1=1.0 / rate,
        modes=(),
        residual_norm=float(np.linalg.norm(resid)),
        converged=True,
        cost=0.5 * float(resid @ resid),
        background_t1_stderr=sd / rate**2,
    )

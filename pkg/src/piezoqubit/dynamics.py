"""Qubit-phonon dynamics in the single-excitation manifold.

Basis: ``|1> = |g,0>``, ``|2> = |e,0>``, ``|3> = |g,1>``. The master equation
is integrated in the interaction frame, where the only coherent terms are the
exchange coupling ``g`` and the detuning ``Delta = w_m - w_q``; dissipation
enters through the qubit decay ``Gamma_1^(0)``, pure dephasing ``Gamma_phi``
and the mode linewidth ``kappa``.

The analytic weak-coupling result (one Lorentzian per mode)::

    Gamma_1(w_q) = Gamma_1^(0) + sum_k 2 g_k^2 G_k / (G_k^2 + (w_q - w_k)^2)
    G_k = Gamma_phi + Gamma_1^(0)/2 + kappa_k/2

is provided by :func:`gamma1_spectrum` and is checked against the ODE.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import _core
from .circuit import TWO_PI
from .errors import DomainError, FitFailedError, InsufficientDataError, IntegrationDivergedError, InvariantError
from .quantization import CouplingSet, QubitParams

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-10
EIG_TOL = 1e-9
# looser bounds applied along a trajectory (rounding accumulates over steps)
TRAJ_TRACE_TOL = 1e-8
TRAJ_EIG_TOL = 1e-8

LOCAL_ERROR_TOL = 1e-10
DECAY_WINDOW = (0.05, 0.95)


@dataclass(frozen=True, eq=False)
class DensityMatrix3:
    """3x3 density matrix over ``|g,0>, |e,0>, |g,1>``."""

    entries: np.ndarray

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        if m.shape != (3, 3):
            raise InvariantError(f"expected a 3x3 matrix, got shape {m.shape}")
        if np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL:
            raise InvariantError("density matrix is not Hermitian")
        if abs(np.trace(m).real - 1.0) > TRACE_TOL:
            raise InvariantError(f"trace {np.trace(m).real!r} != 1")
        if np.linalg.eigvalsh(m).min() < -EIG_TOL:
            raise InvariantError("density matrix has a negative eigenvalue")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @classmethod
    def basis(cls, index: int) -> "DensityMatrix3":
        """Projector onto basis state ``|index>`` (1-based: g0, e0, g1)."""
        if index not in (1, 2, 3):
            raise DomainError("basis index must be 1, 2 or 3")
        m = np.zeros((3, 3), dtype=complex)
        m[index - 1, index - 1] = 1.0
        return cls(m)

    @property
    def populations(self) -> np.ndarray:
        return self.entries.diagonal().real.copy()

    def to_vector(self) -> np.ndarray:
        return _matrix_to_state(self.entries)


def _matrix_to_state(m: np.ndarray) -> np.ndarray:
    return np.array(
        [
            m[0, 0].real, m[1, 1].real, m[2, 2].real,
            m[0, 1].real, m[0, 1].imag,
            m[0, 2].real, m[0, 2].imag,
            m[1, 2].real, m[1, 2].imag,
        ]
    )


def _states_to_matrices(s: np.ndarray) -> np.ndarray:
    n = s.shape[0]
    m = np.zeros((n, 3, 3), dtype=complex)
    m[:, 0, 0] = s[:, 0]
    m[:, 1, 1] = s[:, 1]
    m[:, 2, 2] = s[:, 2]
    m[:, 0, 1] = s[:, 3] + 1j * s[:, 4]
    m[:, 0, 2] = s[:, 5] + 1j * s[:, 6]
    m[:, 1, 2] = s[:, 7] + 1j * s[:, 8]
    m[:, 1, 0] = m[:, 0, 1].conj()
    m[:, 2, 0] = m[:, 0, 2].conj()
    m[:, 2, 1] = m[:, 1, 2].conj()
    return m


@dataclass(frozen=True)
class DynamicsConfig:
    """Parameters of a single-mode integration (rates in 1/s or rad/s)."""

    detuning: float
    coupling: float
    nominal_decay: float = 0.0
    pure_dephasing: float = 0.0
    mode_linewidth: float = 0.0
    total_time: float = 1e-6
    time_step: float | None = None

    def __post_init__(self):
        rates = (self.coupling, self.nominal_decay, self.pure_dephasing, self.mode_linewidth)
        if any(r < 0 or not math.isfinite(r) for r in rates):
            raise InvariantError("coupling and dissipation rates must be finite and non-negative")
        if not math.isfinite(self.detuning):
            raise InvariantError("detuning must be finite")
        if not self.total_time > 0:
            raise InvariantError("total_time must be positive")
        if self.time_step is not None:
            if not self.time_step > 0:
                raise InvariantError("time_step must be positive")
            if self.total_time < self.time_step:
                raise InvariantError("total_time must be at least one time step")

    def default_step(self) -> float:
        """``min(1/(50 max rate), 1/(50 g), 1/(50 |Delta|))``, capped at total_time."""
        scales = [
            max(self.nominal_decay, self.pure_dephasing, self.mode_linewidth),
            self.coupling,
            abs(self.detuning),
        ]
        candidates = [1.0 / (50.0 * s) for s in scales if s > 0]
        return min(candidates + [self.total_time])

    @property
    def gamma2(self) -> float:
        return self.pure_dephasing + 0.5 * self.nominal_decay + 0.5 * self.mode_linewidth

    def predicted_rate(self) -> float:
        """Single-mode weak-coupling decay rate of the excited qubit."""
        g2 = self.gamma2
        return self.nominal_decay + 2.0 * self.coupling**2 * g2 / (g2 * g2 + self.detuning**2)


def lindblad_rhs(rho, cfg: DynamicsConfig) -> np.ndarray:
    """Interaction-frame ``d rho / dt`` written out as explicit 3x3 matrices.

    Conjugated elements ``rho_ij*`` are read as ``rho_ji``; the two agree on
    Hermitian input, and the latter keeps the map linear.
    """
    r = np.asarray(rho.entries if isinstance(rho, DensityMatrix3) else rho, dtype=complex)
    g, d = cfg.coupling, cfg.detuning
    coherent = np.array(
        [
            [0.0, g * r[0, 2], g * r[0, 1] - d * r[0, 2]],
            [-g * r[2, 0], -g * (r[2, 1] - r[1, 2]), -g * (r[2, 2] - r[1, 1]) - d * r[1, 2]],
            [-g * r[1, 0] + d * r[2, 0], -g * (r[1, 1] - r[2, 2]) + d * r[2, 1], -g * (r[1, 2] - r[2, 1])],
        ]
    )
    qubit_decay = np.array(
        [
            [-2.0 * r[1, 1], r[0, 1], 0.0],
            [r[1, 0], 2.0 * r[1, 1], r[1, 2]],
            [0.0, r[2, 1], 0.0],
        ]
    )
    dephasing = np.array(
        [
            [0.0, r[0, 1], 0.0],
            [r[1, 0], 0.0, r[1, 2]],
            [0.0, r[2, 1], 0.0],
        ]
    )
    mode_decay = np.array(
        [
            [-2.0 * r[2, 2], 0.0, r[0, 2]],
            [0.0, 0.0, r[1, 2]],
            [r[2, 0], r[2, 1], 2.0 * r[2, 2]],
        ]
    )
    return (
        -1j * coherent
        - 0.5 * cfg.nominal_decay * qubit_decay
        - cfg.pure_dephasing * dephasing
        - 0.5 * cfg.mode_linewidth * mode_decay
    )


def superoperator(cfg: DynamicsConfig) -> np.ndarray:
    """Real 9x9 generator acting on the packed state vector."""
    cols = []
    for j in range(9):
        e = np.zeros(9)
        e[j] = 1.0
        m = _states_to_matrices(e[None, :])[0]
        cols.append(_matrix_to_state(lindblad_rhs(m, cfg)))
    return np.array(cols).T


def _rk4_matrix(lmat: np.ndarray, h: float) -> np.ndarray:
    a = h * lmat
    eye = np.eye(lmat.shape[0])
    return eye + a @ (eye + a @ (eye + a @ (eye + a / 4.0) / 3.0) / 2.0)


def local_error_estimate(cfg: DynamicsConfig, h: float) -> float:
    """Step-doubling estimate of the RK4 local error (max-norm, unit-bounded state)."""
    lmat = superoperator(cfg)
    full = _rk4_matrix(lmat, h)
    half = _rk4_matrix(lmat, 0.5 * h)
    return float(np.abs(full - half @ half).sum(axis=1).max()) * 16.0 / 15.0


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled solution of the master equation."""

    times: np.ndarray
    states: np.ndarray  # (n, 3, 3) complex
    time_step: float
    n_steps: int
    backend: str = field(default=_core.BACKEND)

    def __len__(self):
        return len(self.times)

    def __getitem__(self, i) -> DensityMatrix3:
        return DensityMatrix3(self.states[i])

    @property
    def rho11(self) -> np.ndarray:
        return self.states[:, 0, 0].real

    @property
    def rho22(self) -> np.ndarray:
        return self.states[:, 1, 1].real

    @property
    def rho33(self) -> np.ndarray:
        return self.states[:, 2, 2].real

    def decay_rate(self, window=DECAY_WINDOW) -> "DecayFit":
        return effective_decay_rate(self.times, self.rho22, window)

    def to_csv(self, comments=()) -> str:
        buf = io.StringIO()
        for line in comments:
            buf.write(f"# {line}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t_s", "rho22", "rho33", "rho11"])
        for t, a, b, c in zip(self.times, self.rho22, self.rho33, self.rho11):
            w.writerow([repr(float(t)), repr(float(a)), repr(float(b)), repr(float(c))])
        return buf.getvalue()


def _check_physical(times, states):
    tr = states[:, 0, 0].real + states[:, 1, 1].real + states[:, 2, 2].real
    bad = np.nonzero(~(np.abs(tr - 1.0) < TRAJ_TRACE_TOL))[0]
    if bad.size:
        raise IntegrationDivergedError("trace drifted from 1", float(times[bad[0]]))
    eig = np.linalg.eigvalsh(states).min(axis=1)
    bad = np.nonzero(~(eig >= -TRAJ_EIG_TOL))[0]
    if bad.size:
        raise IntegrationDivergedError("density matrix lost positivity", float(times[bad[0]]))


def evolve(
    rho0: DensityMatrix3,
    cfg: DynamicsConfig,
    *,
    max_samples: int = 2001,
    stop_population: float | None = None,
    tol: float = LOCAL_ERROR_TOL,
) -> Trajectory:
    """Integrate the master equation with fixed-step classical RK4.

    The step starts at ``cfg.time_step`` (or :meth:`DynamicsConfig.default_step`)
    and is halved until the step-doubling local error estimate is below
    ``tol``; the model is linear and time-invariant, so one check bounds every
    step. At most ``max_samples`` evenly spaced states are kept. With
    ``stop_population`` set, integration ends at the first kept sample whose
    excited-state population falls below it.
    """
    if not isinstance(rho0, DensityMatrix3):
        rho0 = DensityMatrix3(np.asarray(rho0))
    if max_samples < 2:
        raise DomainError("max_samples must be at least 2")
    h = cfg.time_step if cfg.time_step is not None else cfg.default_step()
    h = min(h, cfg.total_time)
    for _ in range(60):
        if local_error_estimate(cfg, h) <= tol:
            break
        h *= 0.5
    else:
        raise IntegrationDivergedError("could not reach the local error tolerance", 0.0)
    nsteps = max(1, math.ceil(cfg.total_time / h * (1 - 1e-12)))
    stride = max(1, math.ceil(nsteps / (max_samples - 1)))
    nsteps = stride * math.ceil(nsteps / stride)
    h = cfg.total_time / nsteps
    stop = -1.0 if stop_population is None else float(stop_population)
    samples, taken = _core.rk4_propagate(
        rho0.to_vector(),
        cfg.coupling,
        cfg.detuning,
        cfg.nominal_decay,
        cfg.pure_dephasing,
        cfg.mode_linewidth,
        h,
        nsteps,
        stride,
        stop,
    )
    samples = np.asarray(samples)
    times = np.arange(samples.shape[0]) * (stride * h)
    states = _states_to_matrices(samples)
    _check_physical(times, states)
    return Trajectory(times, states, h, int(taken), _core.BACKEND)


@dataclass(frozen=True)
class DecayFit:
    rate: float
    residual: float
    n_points: int


def effective_decay_rate(times, population, window=DECAY_WINDOW) -> DecayFit:
    """Exponential decay rate from a log-linear least-squares fit.

    Only samples with ``window[0] <= p/p(0) <= window[1]`` enter the fit.
    ``residual`` is the RMS deviation of ``log p`` from the fitted line.
    """
    t = np.asarray(times, dtype=float)
    p = np.asarray(population, dtype=float)
    if t.shape != p.shape or t.ndim != 1:
        raise DomainError("times and population must be 1-d arrays of equal length")
    if t.size < 10:
        raise InsufficientDataError(f"need at least 10 samples, got {t.size}")
    p0 = p[0]
    if not p0 > 0:
        raise FitFailedError("initial population must be positive")
    rel = p / p0
    lo, hi = window
    mask = (rel >= lo) & (rel <= hi)
    if mask.sum() < 3:
        raise FitFailedError("trace does not decay through the fit window")
    tt, y = t[mask], np.log(rel[mask])
    a = np.vstack([tt, np.ones_like(tt)]).T
    (slope, intercept), *_ = np.linalg.lstsq(a, y, rcond=None)
    if not slope < 0:
        raise FitFailedError("population is not decaying")
    resid = y - (slope * tt + intercept)
    return DecayFit(float(-slope), float(np.sqrt(np.mean(resid**2))), int(mask.sum()))


def relaxation_rate(omega_q, omega_m, coupling, linewidth, gamma1_0=0.0, gamma2q=0.0) -> np.ndarray:
    """Vectorised weak-coupling relaxation rate on a grid of qubit frequencies.

    ``omega_m``, ``coupling`` and ``linewidth`` are per-mode arrays; the
    result has the shape of ``omega_q``.
    """
    wq = np.asarray(omega_q, dtype=float)
    wm = np.atleast_1d(np.asarray(omega_m, dtype=float))
    g = np.atleast_1d(np.asarray(coupling, dtype=float))
    k = np.atleast_1d(np.asarray(linewidth, dtype=float))
    out = np.full(wq.shape, float(gamma1_0))
    if wm.size == 0:
        return out
    g2 = gamma2q + 0.5 * k
    det = wq[..., None] - wm
    out = out + np.sum(2.0 * g * g * g2 / (g2 * g2 + det * det), axis=-1)
    return out


def gamma1_spectrum(couplings: CouplingSet, qubit: QubitParams, grid) -> np.ndarray:
    """Relaxation rate (1/s) at each qubit angular frequency in ``grid``."""
    w = np.asarray(grid, dtype=float)
    if w.size and not np.all(w > 0):
        raise DomainError("grid frequencies must be positive")
    wm, g, k = couplings.arrays()
    return relaxation_rate(w, wm, g, k, qubit.nominal_decay, qubit.gamma2)


def spectrum_to_csv(grid, gamma1, comments=()) -> str:
    """CSV ``fq_hz,gamma1_per_s,t1_s`` for a spectrum on angular grid ``grid``."""
    buf = io.StringIO()
    for line in comments:
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["fq_hz", "gamma1_per_s", "t1_s"])
    for wq, r in zip(np.asarray(grid, float), np.asarray(gamma1, float)):
        t1 = 1.0 / r if r > 0 else math.inf
        w.writerow([repr(float(wq / TWO_PI)), repr(float(r)), repr(float(t1))])
    return buf.getvalue()

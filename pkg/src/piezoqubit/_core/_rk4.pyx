# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled fixed-step RK4 for the single-excitation qubit-mode master equation.

State layout (length-9 float64 vector, Hermiticity built in)::

    [p1, p2, p3, re12, im12, re13, im13, re23, im23]

Must stay numerically identical (up to rounding) to ``fallback.py``.
"""
import numpy as np


cdef inline void _rhs(const double* s, double* d, double g, double delta,
                      double g1, double gphi, double kappa) noexcept nogil:
    cdef double p2 = s[1]
    cdef double p3 = s[2]
    cdef double r12 = s[3]
    cdef double i12 = s[4]
    cdef double r13 = s[5]
    cdef double i13 = s[6]
    cdef double r23 = s[7]
    cdef double i23 = s[8]
    cdef double c12 = 0.5 * g1 + gphi
    cdef double c23 = 0.5 * g1 + gphi + 0.5 * kappa
    cdef double c13 = 0.5 * kappa
    d[0] = g1 * p2 + kappa * p3
    d[1] = 2.0 * g * i23 - g1 * p2
    d[2] = -2.0 * g * i23 - kappa * p3
    # d rho12 = -i g rho13 - c12 rho12
    d[3] = g * i13 - c12 * r12
    d[4] = -g * r13 - c12 * i12
    # d rho13 = -i (g rho12 - delta rho13) - c13 rho13
    d[5] = g * i12 - delta * i13 - c13 * r13
    d[6] = -g * r12 + delta * r13 - c13 * i13
    # d rho23 = i g (p3 - p2) + i delta rho23 - c23 rho23
    d[7] = -delta * i23 - c23 * r23
    d[8] = g * (p3 - p2) + delta * r23 - c23 * i23


def rk4_propagate(double[::1] state0, double g, double delta, double gamma1,
                  double gammaphi, double kappa, double h, long nsteps,
                  long stride, double stop_below=-1.0):
    """Integrate ``nsteps`` RK4 steps of size ``h``, keeping every ``stride``-th state.

    Returns ``(samples, n_taken)``: samples has shape ``(m, 9)`` with the
    initial state first; integration stops after the first recorded sample
    whose excited-state population ``p2`` is below ``stop_below``.
    """
    cdef long nsamp = nsteps // stride + 1
    out_arr = np.empty((nsamp, 9), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double s[9]
    cdef double k1[9]
    cdef double k2[9]
    cdef double k3[9]
    cdef double k4[9]
    cdef double tmp[9]
    cdef double hh = 0.5 * h
    cdef double h6 = h / 6.0
    cdef long i, j, step
    cdef long rec = 1
    for j in range(9):
        s[j] = state0[j]
        out[0, j] = s[j]
    with nogil:
        for step in range(1, nsteps + 1):
            _rhs(s, k1, g, delta, gamma1, gammaphi, kappa)
            for j in range(9):
                tmp[j] = s[j] + hh * k1[j]
            _rhs(tmp, k2, g, delta, gamma1, gammaphi, kappa)
            for j in range(9):
                tmp[j] = s[j] + hh * k2[j]
            _rhs(tmp, k3, g, delta, gamma1, gammaphi, kappa)
            for j in range(9):
                tmp[j] = s[j] + h * k3[j]
            _rhs(tmp, k4, g, delta, gamma1, gammaphi, kappa)
            for j in range(9):
                s[j] = s[j] + h6 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])
            if step % stride == 0:
                for j in range(9):
                    out[rec, j] = s[j]
                rec += 1
                if s[1] < stop_below:
                    break
    return out_arr[:rec], (rec - 1) * stride

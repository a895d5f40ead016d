"""Pure-Python twin of ``_rk4.pyx``; same state layout, same arithmetic order."""
import numpy as np


def _rhs(s, g, delta, g1, gphi, kappa):
    p1, p2, p3, r12, i12, r13, i13, r23, i23 = s
    c12 = 0.5 * g1 + gphi
    c23 = 0.5 * g1 + gphi + 0.5 * kappa
    c13 = 0.5 * kappa
    return (
        g1 * p2 + kappa * p3,
        2.0 * g * i23 - g1 * p2,
        -2.0 * g * i23 - kappa * p3,
        g * i13 - c12 * r12,
        -g * r13 - c12 * i12,
        g * i12 - delta * i13 - c13 * r13,
        -g * r12 + delta * r13 - c13 * i13,
        -delta * i23 - c23 * r23,
        g * (p3 - p2) + delta * r23 - c23 * i23,
    )


def rk4_propagate(state0, g, delta, gamma1, gammaphi, kappa, h, nsteps, stride, stop_below=-1.0):
    s = [float(x) for x in state0]
    nsamp = nsteps // stride + 1
    out = np.empty((nsamp, 9), dtype=np.float64)
    out[0] = s
    hh = 0.5 * h
    h6 = h / 6.0
    rec = 1
    for step in range(1, nsteps + 1):
        k1 = _rhs(s, g, delta, gamma1, gammaphi, kappa)
        k2 = _rhs([a + hh * b for a, b in zip(s, k1)], g, delta, gamma1, gammaphi, kappa)
        k3 = _rhs([a + hh * b for a, b in zip(s, k2)], g, delta, gamma1, gammaphi, kappa)
        k4 = _rhs([a + h * b for a, b in zip(s, k3)], g, delta, gamma1, gammaphi, kappa)
        s = [a + h6 * (b + 2.0 * c + 2.0 * d + e) for a, b, c, d, e in zip(s, k1, k2, k3, k4)]
        if step % stride == 0:
            out[rec] = s
            rec += 1
            if s[1] < stop_below:
                break
    return out[:rec], (rec - 1) * stride

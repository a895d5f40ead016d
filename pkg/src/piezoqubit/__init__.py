"""Modelling toolkit for piezoelectric loss in superconducting qubits.

Submodules
----------
circuit         Butterworth-Van Dyke admittance of an IDT-coupled qubit.
quantization    Map BVD branches to qubit-mode couplings and back.
dynamics        Three-level master equation and closed-form decay rates.
spectrum_fit    Detect and fit resonances in T1(f_q) spectra.
experiment_sim  Synthetic excited-state maps with bias-swept TLS defects.
loss_budget     Piezoelectric versus TLS loss scaling with frequency.
cli             ``piezoqubit`` command-line entry point.
"""

__version__ = "0.1.0"

__all__ = ["__version__"]

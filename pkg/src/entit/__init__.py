"""Entanglement-induced transparency: Gaussian, Fock and qubit simulations."""

from . import fock, gaussian, protocols, qubits

__all__ = ["fock", "gaussian", "protocols", "qubits"]
__version__ = "0.1.0"

"""Qubit coupled to an f-deformed (Poschl-Teller) nonlinear oscillator."""

__version__ = "0.1.0"

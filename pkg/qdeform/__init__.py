"""
Numerical toolkit for f-deformed and q-deformed oscillator algebras.

This package realizes deformed boson/fermion algebras as truncated matrices,
integrates the classical deformed oscillator, diagonalizes the deformed
Hubbard model, samples deformed white noise and builds charge-deformed
relativistic field operators.
"""

__version__ = "0.1.0"

"""Resonance algebras of commensurable harmonic oscillators.

Exact lattice combinatorics of the resonance equation, the polynomial
Poisson structures it generates, their Fock-space operator realizations,
operator averaging to normal form, near-bottom spectral asymptotics with a
brute-force eigensolver oracle, and resonance precession dynamics.
"""

__version__ = "0.1.0"

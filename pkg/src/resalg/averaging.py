"""Operator averaging to second-order normal form.

Conjugating the oscillator plus a perturbation by a near-identity unitary
moves the perturbation into the commutant order by order.  The generator of
the conjugation solves a homological equation whose right-hand side is the
off-resonant part of the perturbation; on the resonance set the small
denominators would vanish, which is exactly why that part stays.  Everything
here is symbolic and exact; Fock matrices only enter through the residual
scaling check of the conjugation identity.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .lattice import FrequencySystem, MinimalBasis, expand_in_minimal
from .numbers import Exact, HPoly, I, ZERO
from .poisson import GenPoly
from .wick import CONTRACTION_WEIGHT, WickPolynomial, cl_mul, cl_project


def _rational_freqs(freqs):
    if isinstance(freqs, FrequencySystem):
        units = set(freqs.units())
        if len(units) != 1:
            raise ValueError(
                "small denominators across incommensurable units are not "
                "representable exactly; pass rational frequencies per component"
            )
        return tuple(freqs.values())
    return tuple(Fraction(w) for w in freqs)


def _freq_shift(freqs, key) -> Fraction:
    kp, km = key
    return sum(w * (b - a) for w, a, b in zip(freqs, kp, km))


def solve_homological(freqs, H1: WickPolynomial):
    """Split the perturbation into conjugation generator and resonant part.

    Returns ``(f0, H1bar)``: the resonant monomials pass through unchanged,
    the others are divided by ``i w hbar (freq shift)`` where ``w`` is the
    convention's contraction weight, so that
    ``i [H0, f0] = H1 - H1bar`` holds identically in the Wick algebra.
    """
    w = CONTRACTION_WEIGHT[H1.convention]
    omega = _rational_freqs(freqs)
    f0 = WickPolynomial.zero(H1.M, H1.convention)
    h1bar = WickPolynomial.zero(H1.M, H1.convention)
    for key, coef in H1.terms.items():
        shift = _freq_shift(omega, key)
        if shift == 0:
            h1bar.terms[key] = coef
        else:
            scalar = Exact(0, 0, Fraction(-1, 1) / (w * shift), 0)  # 1/(i w shift)
            f0.terms[key] = coef * HPoly.hbar(-1, scalar)
    return f0, h1bar


def homological_residual(freqs, H1, f0, h1bar) -> WickPolynomial:
    """i [H0, f0] - (H1 - H1bar); identically zero for a correct solution."""
    omega = _rational_freqs(freqs)
    H0 = WickPolynomial.oscillator(omega, H1.convention)
    comm = H0 * f0 - f0 * H0
    return comm.scale(HPoly.const(I)) - (H1 - h1bar)


def classical_solve_homological(freqs, F: dict):
    """Classical analog on symbol dictionaries; same split, no Planck unit."""
    omega = _rational_freqs(freqs)
    f0 = {}
    fbar = {}
    for key, coef in F.items():
        shift = _freq_shift(omega, key)
        if shift == 0:
            fbar[key] = coef
        else:
            f0[key] = coef * Exact(0, 0, Fraction(-1, 1) / shift, 0)
    return f0, fbar


@dataclass
class NormalForm:
    """Second-order normal form data of an averaged perturbation."""

    freqs: tuple
    h1bar: WickPolynomial
    h2bar: WickPolynomial
    f0: WickPolynomial
    f1: WickPolynomial

    def generator_form(self, basis: MinimalBasis, hbar: Fraction, order: int = 1) -> GenPoly:
        """Express an averaged order over the resonance-algebra generators.

        Works with classical symbols: each resonant monomial factors exactly
        over the minimal elements and primitives, so the returned polynomial
        realizes to the same phase-space function.  Coefficients are
        evaluated at the given rational Planck value.
        """
        poly = {1: self.h1bar, 2: self.h2bar}[order]
        return wick_resonant_to_genpoly(poly, basis, hbar)


def average_to_order2(freqs, H1: WickPolynomial) -> NormalForm:
    """First and second averaged orders with their conjugation generators.

    The second-order right-hand side is ``(i/2) [f0, H1 + H1bar]``; its
    resonant part is the second averaged order and its off-resonant part
    feeds the second homological equation.
    """
    omega = _rational_freqs(freqs)
    f0, h1bar = solve_homological(omega, H1)
    bracket = f0 * (H1 + h1bar) - (H1 + h1bar) * f0
    H2 = bracket.scale(HPoly.const(Exact(0, 0, Fraction(1, 2), 0)))  # i/2
    f1, h2bar = solve_homological(omega, H2)
    return NormalForm(omega, h1bar, h2bar, f0, f1)


def wick_resonant_to_genpoly(poly: WickPolynomial, basis: MinimalBasis, hbar: Fraction) -> GenPoly:
    """Factor a resonant Wick polynomial over the algebra generators.

    Uses the canonical minimal expansion of each monomial's exponent pair;
    valid as an identity of classical symbols (the Planck-ordering
    corrections inside a monomial are already part of its coefficient).
    """
    M = poly.M
    out = GenPoly.zero(M)
    for key, coef in poly.coefficients_at(Fraction(hbar)).items():
        mu, m = expand_in_minimal(key, basis)
        out = out + GenPoly.monomial(M, m, tuple(sorted(mu.items())), coef)
    return out


# ---------------------------------------------------------------------------
# conjugation identity scaling check
# ---------------------------------------------------------------------------

def conjugation_residual(freqs, H1: WickPolynomial, eps: float, cutoff: int, hbar: float) -> float:
    """Safe-block residual of the order-2 conjugation identity at one eps.

    Builds the truncated near-identity conjugation from the two generators
    and measures the worst matrix element of
    ``(H0 + eps H1) U - U (H0 + eps H1bar + eps^2 H2bar)`` on blocks whose
    images stay below the cutoff; the decay is cubic in eps.
    """
    from .fock import FockBasis, FockOperator, oscillator_matrix, wick_matrix
    from .lattice import PrimeSystem

    omega = _rational_freqs(freqs)
    ints = [int(w) for w in omega]
    if tuple(ints) != tuple(omega):
        raise ValueError("integer frequencies required for the Fock check")
    nf = average_to_order2(omega, H1)
    basis = FockBasis(PrimeSystem(tuple(ints)), cutoff)

    H0m = oscillator_matrix(basis, hbar, H1.convention)
    H1m = wick_matrix(H1, basis, hbar)
    h1b = wick_matrix(nf.h1bar, basis, hbar)
    h2b = wick_matrix(nf.h2bar, basis, hbar)
    f0m = wick_matrix(nf.f0, basis, hbar)
    f1m = wick_matrix(nf.f1, basis, hbar)

    eye = FockOperator(basis, hbar, H1.convention, np.eye(basis.dim, dtype=complex), 0)
    U = eye - (1j * eps) * f0m - (eps**2) * ((1j) * f1m + 0.5 * (f0m * f0m))
    lhs = (H0m + eps * H1m) * U
    rhs = U * (H0m + eps * h1b + (eps**2) * h2b)
    resid = lhs - rhs
    idx = resid.safe_indices()
    if idx.size == 0:
        raise ValueError("cutoff too small: no safe block")
    scale = max(1.0, float(np.abs(H0m.matrix).max()))
    return float(np.abs(resid.matrix[np.ix_(idx, idx)]).max()) / scale


def conjugation_slope(freqs, H1, eps_values, cutoff: int, hbar: float) -> float:
    """Log-log slope of the conjugation residual against eps."""
    residuals = [conjugation_residual(freqs, H1, e, cutoff, hbar) for e in eps_values]
    x = np.log(np.asarray(eps_values, dtype=float))
    y = np.log(np.asarray(residuals, dtype=float))
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


# ---------------------------------------------------------------------------
# classical quartic averages over the isotropic resonance
# ---------------------------------------------------------------------------

_INV_SQRT2 = Exact(0, Fraction(1, 2))


def q_monomial_symbol(exps, M: int) -> dict:
    """Classical symbol of a coordinate monomial, q_l = (z_l + zbar_l)/sqrt2."""
    out = {((0,) * M, (0,) * M): Exact(1)}
    for l, e in enumerate(exps):
        lin = {}
        kp = tuple(1 if j == l else 0 for j in range(M))
        lin[(kp, (0,) * M)] = _INV_SQRT2
        lin[((0,) * M, kp)] = _INV_SQRT2
        for _ in range(int(e)):
            out = cl_mul(out, lin)
    return out


def classical_symbol_of_q_polynomial(qpoly: dict, M: int) -> dict:
    out = {}
    for exps, coef in qpoly.items():
        mono = q_monomial_symbol(exps, M)
        for key, c in mono.items():
            s = out.get(key, ZERO) + c * Exact.of(coef)
            if s.is_zero():
                out.pop(key, None)
            else:
                out[key] = s
    return out


def resonant_symbol_to_genpoly(F: dict, basis: MinimalBasis) -> GenPoly:
    out = GenPoly.zero(basis.n.length)
    for key, coef in F.items():
        mu, m = expand_in_minimal(key, basis)
        out = out + GenPoly.monomial(basis.n.length, m, tuple(sorted(mu.items())), coef)
    return out


def classical_average_q_polynomial(qpoly: dict, n) -> GenPoly:
    """Project a coordinate polynomial onto the resonance algebra of ``n``.

    Returns the averaged observable as a generator polynomial; exact.
    """
    from .lattice import PrimeSystem, enumerate_minimal_elements

    prime = n if isinstance(n, PrimeSystem) else PrimeSystem(tuple(n))
    M = prime.length
    sym = classical_symbol_of_q_polynomial(qpoly, M)
    res = cl_project(sym, tuple(Fraction(x) for x in prime.n))
    basis = enumerate_minimal_elements(prime)
    return resonant_symbol_to_genpoly(res, basis)


def classical_average_quartic(fourth_derivatives: dict) -> dict:
    """Average of a quartic potential over the isotropic two-mode resonance.

    ``fourth_derivatives`` maps exponent pairs (4,0), (3,1), (2,2), (1,3),
    (0,4) to the fourth partial derivatives of the potential at the origin.
    Returns the exact coefficient dictionary of the averaged Hamiltonian
    over the configuration chart, with keys among ``X^2, Y^2, Z^2, XY, XZ,
    YZ`` (the momentum coordinate provably never appears).
    """
    from fractions import Fraction as Fr
    from math import factorial

    from .lattice import PrimeSystem
    from .poisson import TwoFreqChart, build_classical_algebra

    qpoly = {}
    for exps, val in fourth_derivatives.items():
        a, b = exps
        if a + b != 4:
            raise ValueError(f"{exps} is not a quartic exponent pair")
        qpoly[exps] = Fr(val) / (factorial(a) * factorial(b))

    structure = build_classical_algebra(PrimeSystem((1, 1)))
    gen = classical_average_q_polynomial(qpoly, (1, 1))
    chart = TwoFreqChart(structure, scale=1)
    xyzw = chart.to_xyzw(gen)
    names = {(2, 0, 0, 0): "X^2", (0, 2, 0, 0): "Y^2", (0, 0, 2, 0): "Z^2",
             (1, 1, 0, 0): "XY", (1, 0, 1, 0): "XZ", (0, 1, 1, 0): "YZ"}
    out = {}
    for key, coef in xyzw.items():
        if key[3] != 0:
            raise ArithmeticError(f"momentum coordinate appeared: {key}")
        if coef.is_zero():
            continue
        if key not in names:
            raise ArithmeticError(f"unexpected monomial {key} in quartic average")
        out[names[key]] = coef
    return out


def time_average_oracle(qpoly: dict, q, p, samples: int = 256) -> float:
    """Rotate-and-mean average of a coordinate polynomial (isotropic flow).

    Exact for trigonometric polynomials once the grid resolves the degree,
    which a few hundred points vastly oversatisfy for quartics.
    """
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    ts = np.linspace(0.0, 2 * np.pi, samples, endpoint=False)
    total = 0.0
    for t in ts:
        qt = q * np.cos(t) + p * np.sin(t)
        val = 0.0
        for exps, coef in qpoly.items():
            val += float(Fraction(coef)) * np.prod(qt ** np.asarray(exps))
        total += val
    return total / samples

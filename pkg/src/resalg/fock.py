"""Truncated multi-mode Fock spaces and operator matrices on them.

The basis is graded by the weighted quantum number ``n . m``; operators
built from resonant monomials are exactly block diagonal in that grading,
which is what makes the finite truncation useful: per-block statements are
exact, and only level-shifting expressions need the safe-region bookkeeping.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import sqrt

import numpy as np

from .lattice import PrimeSystem
from .numbers import Exact, HPoly
from .wick import CONTRACTION_WEIGHT, ConventionError, WickPolynomial


@dataclass(frozen=True)
class FockBasis:
    """States ``|m>`` with ``n . m <= cutoff``, graded by level.

    ``weights`` is the prime system; ``cutoff`` caps the weighted total
    quanta.  ``states`` lists occupation tuples, ``levels`` maps each level
    to the (contiguous) state indices of its block.
    """

    weights: PrimeSystem
    cutoff: int
    states: tuple = field(init=False)
    index: dict = field(init=False, repr=False, compare=False)
    levels: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = self.weights.n
        M = len(n)
        found = []
        for m in itertools.product(*(range(self.cutoff // n[l] + 1) for l in range(M))):
            lvl = sum(a * b for a, b in zip(n, m))
            if lvl <= self.cutoff:
                found.append((lvl, m))
        found.sort()
        states = tuple(m for _, m in found)
        index = {m: i for i, m in enumerate(states)}
        levels: dict = {}
        for i, (lvl, m) in enumerate(found):
            levels.setdefault(lvl, []).append(i)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "index", index)
        object.__setattr__(self, "levels", {k: tuple(v) for k, v in levels.items()})

    @property
    def M(self) -> int:
        return self.weights.length

    @property
    def dim(self) -> int:
        return len(self.states)

    def level_of(self, state) -> int:
        return sum(a * b for a, b in zip(self.weights.n, state))

    def block(self, level: int):
        return self.levels.get(level, ())

    def block_dim(self, level: int) -> int:
        return len(self.block(level))


@dataclass
class FockOperator:
    """Dense matrix over a :class:`FockBasis` with its ladder convention."""

    basis: FockBasis
    hbar: float
    convention: str
    matrix: np.ndarray
    rise: int = 0  # worst-case weighted quanta created by any factor sequence

    def __post_init__(self):
        if self.convention not in CONTRACTION_WEIGHT:
            raise ConventionError(f"unknown convention {self.convention!r}")

    def _compat(self, other: "FockOperator"):
        if self.basis is not other.basis and self.basis != other.basis:
            raise ValueError("operators live on different bases")
        if self.convention != other.convention:
            raise ConventionError(
                f"cannot combine {self.convention!r} with {other.convention!r}"
            )
        if self.hbar != other.hbar:
            raise ValueError("Planck parameters differ")
        return other

    def __add__(self, other):
        o = self._compat(other)
        return FockOperator(
            self.basis, self.hbar, self.convention, self.matrix + o.matrix,
            max(self.rise, o.rise),
        )

    def __sub__(self, other):
        o = self._compat(other)
        return FockOperator(
            self.basis, self.hbar, self.convention, self.matrix - o.matrix,
            max(self.rise, o.rise),
        )

    def __mul__(self, other):
        if isinstance(other, FockOperator):
            o = self._compat(other)
            return FockOperator(
                self.basis, self.hbar, self.convention, self.matrix @ o.matrix,
                self.rise + o.rise,
            )
        return FockOperator(
            self.basis, self.hbar, self.convention, self.matrix * other, self.rise
        )

    __rmul__ = __mul__

    def commutator(self, other) -> "FockOperator":
        o = self._compat(other)
        return FockOperator(
            self.basis, self.hbar, self.convention,
            self.matrix @ o.matrix - o.matrix @ self.matrix,
            self.rise + o.rise,
        )

    def dagger(self) -> "FockOperator":
        return FockOperator(
            self.basis, self.hbar, self.convention,
            self.matrix.conj().T, self.rise,
        )

    def safe_levels(self):
        """Levels whose blocks no factor sequence can push past the cutoff."""
        return [lvl for lvl in self.basis.levels if lvl + self.rise <= self.basis.cutoff]

    def safe_indices(self):
        idx = []
        for lvl in self.safe_levels():
            idx.extend(self.basis.block(lvl))
        return np.array(sorted(idx), dtype=int)

    def block_matrix(self, level: int) -> np.ndarray:
        idx = np.array(self.basis.block(level), dtype=int)
        return self.matrix[np.ix_(idx, idx)]


def build_operator(k, basis: FockBasis, hbar: float, convention: str = "sqrt2") -> FockOperator:
    """Matrix of the normal-ordered monomial ``(k_plus, k_minus)``.

    Ladder action per mode: annihilator maps ``|m>`` to
    ``sqrt(w hbar m) |m-1>`` with ``w`` the convention's contraction weight.
    Raises if the cutoff retains no matrix element at all.
    """
    kp, km = tuple(k[0]), tuple(k[1])
    if any(v < 0 for v in kp + km):
        raise ValueError("pair exponents must be nonnegative")
    w = CONTRACTION_WEIGHT[convention] * hbar
    total_order = sum(kp) + sum(km)
    mat = np.zeros((basis.dim, basis.dim), dtype=complex)
    nonzero = False
    for i, m in enumerate(basis.states):
        # integer radicand, one square root: adjoint pairs come out bit-equal
        radicand = 1
        ok = True
        inter = list(m)
        for l, a in enumerate(kp):
            for _ in range(a):
                if inter[l] == 0:
                    ok = False
                    break
                radicand *= inter[l]
                inter[l] -= 1
            if not ok:
                break
        if not ok:
            continue
        for l, b in enumerate(km):
            for _ in range(b):
                inter[l] += 1
                radicand *= inter[l]
        target = tuple(inter)
        j = basis.index.get(target)
        if j is None:
            continue  # truncated away; accounted for by the safe region
        mat[j, i] = sqrt(w**total_order * radicand)
        nonzero = True
    if not nonzero and (any(kp) or any(km)):
        raise ValueError(f"cutoff {basis.cutoff} retains no element of {k}")
    return FockOperator(basis, hbar, convention, mat, _monomial_rise(k, basis))


def _monomial_rise(k, basis: FockBasis) -> int:
    # exact weighted level shift of the monomial, clipped at zero
    kp, km = k
    shift = sum((b - a) * n for a, b, n in zip(kp, km, basis.weights.n))
    return max(0, shift)


def wick_matrix(poly: WickPolynomial, basis: FockBasis, hbar: float) -> FockOperator:
    """Evaluate a Wick polynomial's coefficients at ``hbar`` and sum matrices."""
    if poly.M != basis.M:
        raise ValueError("mode count mismatch")
    mat = np.zeros((basis.dim, basis.dim), dtype=complex)
    rise = 0
    for key, coef in poly.terms.items():
        rise = max(rise, _monomial_rise(key, basis))
        try:
            op = build_operator(key, basis, hbar, poly.convention)
        except ValueError:
            continue  # fully truncated monomial; rise still recorded
        mat += complex(coef(hbar)) * op.matrix
    return FockOperator(basis, hbar, poly.convention, mat, rise)


def oscillator_matrix(basis: FockBasis, hbar: float, convention: str = "sqrt2") -> FockOperator:
    """Diagonal weighted number operator (no zero-point shift)."""
    w = CONTRACTION_WEIGHT[convention] * hbar
    diag = np.array(
        [w * sum(a * b for a, b in zip(basis.weights.n, m)) for m in basis.states]
    )
    return FockOperator(basis, hbar, convention, np.diag(diag.astype(complex)), 0)


# ---------------------------------------------------------------------------
# two-frequency quantum structure
# ---------------------------------------------------------------------------

@dataclass
class QuantumStructureReport:
    """Symbolic relations of a two-frequency algebra plus Fock residuals."""

    n: PrimeSystem
    rho: dict            # (a, b) exponent of the two actions -> HPoly
    f: dict              # commutator polynomial, same encoding
    residuals: dict      # relation name -> worst residual over safe blocks
    casimir_zero: float  # worst |C1| block entry

    def max_residual(self) -> float:
        return max(list(self.residuals.values()) + [self.casimir_zero])


def _poly2_mul(p1: dict, p2: dict) -> dict:
    out = {}
    for (a1, b1), c1 in p1.items():
        for (a2, b2), c2 in p2.items():
            key = (a1 + a2, b1 + b2)
            s = out.get(key)
            v = c1 * c2
            s = v if s is None else s + v
            if s.is_zero():
                out.pop(key, None)
            else:
                out[key] = s
    return out


def _poly2_shift(p: dict, da: HPoly, db: HPoly) -> dict:
    """Substitute A1 -> A1 + da, A2 -> A2 + db (binomial expansion)."""
    from math import comb

    out = {}
    for (a, b), c in p.items():
        for i in range(a + 1):
            for j in range(b + 1):
                key = (i, j)
                coef = c * HPoly.const(comb(a, i)) * (da ** (a - i)) * (db ** (b - j)) * HPoly.const(comb(b, j))
                s = out.get(key)
                s = coef if s is None else s + coef
                if s.is_zero():
                    out.pop(key, None)
                else:
                    out[key] = s
    return out


def rho_polynomial(n1: int, n2: int) -> dict:
    """Product A1 (A1-h)...(A1-(n2-1)h) (A2+h)...(A2+n1 h)."""
    rho = {(0, 0): HPoly.const(1)}
    for i in range(n2):
        factor = {(1, 0): HPoly.const(1), (0, 0): HPoly.hbar(1, -i)}
        rho = _poly2_mul(rho, factor)
    for i in range(1, n1 + 1):
        factor = {(0, 1): HPoly.const(1), (0, 0): HPoly.hbar(1, i)}
        rho = _poly2_mul(rho, factor)
    return {k: v for k, v in rho.items() if not v.is_zero()}


def commutator_polynomial(n1: int, n2: int) -> dict:
    """rho shifted by (+n2 h, -n1 h) minus rho; degree n1+n2-1."""
    rho = rho_polynomial(n1, n2)
    shifted = _poly2_shift(rho, HPoly.hbar(1, n2), HPoly.hbar(1, -n1))
    out = dict(shifted)
    for k, v in rho.items():
        s = out.get(k)
        s = -v if s is None else s - v
        if s.is_zero():
            out.pop(k, None)
        else:
            out[k] = s
    return out


def _eval_poly2_diag(p: dict, a1_diag, a2_diag, hbar: float):
    out = np.zeros_like(a1_diag, dtype=complex)
    for (a, b), c in p.items():
        out += complex(c(hbar)) * a1_diag**a * a2_diag**b
    return out


def quantum_structure_2freq(n1: int, n2: int, hbar: float, cutoff: int | None = None) -> QuantumStructureReport:
    """Build the symbolic two-frequency relations and verify them on Fock.

    The four generators are the two number operators and the resonance pair
    built from the minimal lattice element; the ladder commutator closes on
    a polynomial of degree ``n1 + n2 - 1`` in the actions, and the quadratic
    Casimir vanishes identically in this realization.  All residuals are
    computed on blocks safe under the operators involved.
    """
    n = PrimeSystem((n1, n2))
    if cutoff is None:
        cutoff = 4 * (n1 + n2) + 6
    basis = FockBasis(n, cutoff)
    rho = rho_polynomial(n1, n2)
    f = commutator_polynomial(n1, n2)

    a_pair = ((n2, 0), (0, n1))  # annihilate n2 quanta of mode 1, create n1 of mode 2
    A_alpha = build_operator(a_pair, basis, hbar)
    A_star = A_alpha.dagger()
    N1 = build_operator(((1, 0), (1, 0)), basis, hbar)
    N2 = build_operator(((0, 1), (0, 1)), basis, hbar)

    m1 = np.array([m[0] for m in basis.states], dtype=float)
    m2 = np.array([m[1] for m in basis.states], dtype=float)
    a1_diag = hbar * m1
    a2_diag = hbar * m2

    residuals = {}

    def safe_norm(op_expr: FockOperator, target: np.ndarray) -> float:
        idx = op_expr.safe_indices()
        diff = op_expr.matrix[np.ix_(idx, idx)] - target[np.ix_(idx, idx)]
        scale = max(1.0, np.abs(op_expr.matrix).max())
        return float(np.abs(diff).max() / scale)

    residuals["[A,N1]=h n2 A"] = safe_norm(
        A_alpha.commutator(N1), hbar * n2 * A_alpha.matrix
    )
    residuals["[A,N2]=-h n1 A"] = safe_norm(
        A_alpha.commutator(N2), -hbar * n1 * A_alpha.matrix
    )
    residuals["[N1,N2]=0"] = safe_norm(
        N1.commutator(N2), np.zeros((basis.dim, basis.dim))
    )
    f_diag = _eval_poly2_diag(f, a1_diag, a2_diag, hbar)
    residuals["[A,A*]=f(N1,N2)"] = safe_norm(
        A_alpha.commutator(A_star), np.diag(f_diag)
    )
    c0 = n1 * N1.matrix + n2 * N2.matrix
    for name, G in (("C0 central vs A", A_alpha), ("C0 central vs N1", N1)):
        expr = FockOperator(
            basis, hbar, "sqrt2", c0 @ G.matrix - G.matrix @ c0, G.rise
        )
        residuals[name] = safe_norm(expr, np.zeros((basis.dim, basis.dim)))

    rho_diag = _eval_poly2_diag(rho, a1_diag, a2_diag, hbar)
    c1_expr = FockOperator(
        basis, hbar, "sqrt2",
        A_star.matrix @ A_alpha.matrix - np.diag(rho_diag),
        A_alpha.rise + A_star.rise,
    )
    idx = c1_expr.safe_indices()
    casimir_zero = float(np.abs(c1_expr.matrix[np.ix_(idx, idx)]).max())

    return QuantumStructureReport(n, rho, f, residuals, casimir_zero)


# ---------------------------------------------------------------------------
# the 1:2 generator quadruple
# ---------------------------------------------------------------------------

def resonance12_wick(convention: str = "part1"):
    """The four self-adjoint generator polynomials of the 1:2 algebra.

    A1, A2 are action combinations; A3, A4 the real and imaginary parts of
    the cubic ladder monomial, with the normalization that makes the block
    Casimir equal level/3 times the Planck parameter.  The defining
    coefficients belong to the wide-ladder convention; expressing the same
    operators in "sqrt2" symbols rescales each monomial by sqrt2 per degree.
    """
    deg_scale = {"part1": Exact(1), "sqrt2": Exact(0, 1)}[convention]

    def mono(kp, km, coef):
        d = sum(kp) + sum(km)
        return WickPolynomial.monomial(kp, km, Exact.of(coef) * deg_scale**d, convention)

    A1 = mono((1, 0), (1, 0), Fraction(1, 4))
    A2 = mono((1, 0), (1, 0), Fraction(1, 12)) + mono((0, 1), (0, 1), Fraction(-1, 3))
    up = mono((2, 0), (0, 1), Fraction(1, 8))
    dn = mono((0, 1), (2, 0), Fraction(1, 8))
    A3 = up + dn
    A4 = (up - dn).scale(Exact(0, 0, -1, 0))
    return A1, A2, A3, A4


def resonance12_generators(basis: FockBasis, hbar_prime: float):
    """Matrices of the four 1:2 generators on a (1,2)-weighted basis."""
    if basis.weights.n != (1, 2):
        raise ValueError("basis must be weighted (1, 2)")
    return tuple(
        wick_matrix(p, basis, hbar_prime) for p in resonance12_wick("part1")
    )


def relations12_residual(A1, A2, A3, A4, hbar_prime: float) -> float:
    """Worst residual of the five linear relations and the cubic one."""
    h = hbar_prime
    checks = [
        A1.commutator(A2).matrix,
        A1.commutator(A3).matrix - (-1j * h) * A4.matrix,
        A1.commutator(A4).matrix - (1j * h) * A3.matrix,
        A2.commutator(A3).matrix - (-1j * h) * A4.matrix,
        A2.commutator(A4).matrix - (1j * h) * A3.matrix,
        A3.commutator(A4).matrix
        - (-3j * h)
        * (A1.matrix @ A2.matrix - (h / 4) * A1.matrix + (h / 4) * A2.matrix),
    ]
    scale = max(1.0, max(np.abs(m.matrix).max() for m in (A1, A2, A3, A4)) ** 2)
    return max(float(np.abs(c).max()) / scale for c in checks)


def casimirs12(A1, A2, A3, A4, hbar_prime: float):
    """The linear and cubic Casimir matrices of the 1:2 algebra."""
    h = hbar_prime
    C1 = A1.matrix - A2.matrix
    C2 = (
        3 * A1.matrix @ A1.matrix @ A2.matrix
        - A1.matrix @ A1.matrix @ A1.matrix
        + A3.matrix @ A3.matrix
        + A4.matrix @ A4.matrix
        - (3 * h / 2) * A1.matrix @ A1.matrix
        + (3 * h / 2) * A1.matrix @ A2.matrix
        + (3 * h**2 / 4) * A2.matrix
        + (h**2 / 4) * A1.matrix
    )
    return C1, C2

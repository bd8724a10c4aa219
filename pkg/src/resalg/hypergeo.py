"""Irreducible representation of the 1:2 algebra and its coherent structure.

The level-n block of the algebra acts irreducibly on a space of polynomials
in one conjugated variable of dimension ``floor(n/2) + 1``.  The inner
product is carried by a radial density solving a dual confluent equation;
its reproducing kernel is a terminating hypergeometric polynomial.  This
module builds the representation matrices, the kernel and density with
their moments, the vacuum and coherent vectors in the Fock block, the
intertwining transform, and the two integral identities that pin down the
quantized symplectic data of the leaf.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial, pi, sqrt

import numpy as np
from scipy import integrate, special

from .fock import FockBasis, resonance12_generators


def parity_constant(n: int) -> int:
    """1 for even level, 3 for odd."""
    return 1 if n % 2 == 0 else 3


def half_index(n: int) -> int:
    return n // 2


@dataclass(frozen=True)
class ModelSpace:
    """Monomial-basis data of the dimension floor(n/2)+1 polynomial space."""

    n: int
    hbar_prime: float

    @property
    def p(self) -> int:
        return half_index(self.n)

    @property
    def eps(self) -> int:
        return parity_constant(self.n)

    @property
    def dim(self) -> int:
        return self.p + 1


def odd_double_factorial(m: int) -> int:
    """Product of odd numbers from 1 up to m (1 for m <= 0)."""
    out = 1
    k = 1
    while k <= m:
        out *= k
        k += 2
    return out


def kernel_coefficients(n: int):
    """Exact coefficients c_j of the terminating kernel sum.

    ``K(s) = sum_j c_j (s/hbar')^j`` with
    ``c_j = p! / (j! (2j-2+eps)!! (p-j)!)``.
    """
    p = half_index(n)
    eps = parity_constant(n)
    return [
        Fraction(factorial(p), factorial(j) * odd_double_factorial(2 * j - 2 + eps) * factorial(p - j))
        for j in range(p + 1)
    ]


def irreducible_rep(n: int, hbar_prime: float):
    """Matrices of the four generators on the monomial basis.

    Columns are images of the monomials: the action on the j-th monomial is

    * A1: ((eps-1)/4 + j) h'
    * A2: ((eps-1)/12 - 2p/3 + j) h'
    * A3: (h'^2/2) j (2j-2+eps) on ``j-1``  +  (h'/2)(p-j) on ``j+1``
    * A4: -i (h'^2/2) j (2j-2+eps) on ``j-1``  +  i (h'/2)(p-j) on ``j+1``

    The representation is Hermitian with respect to the moment-weighted
    inner product, not the Euclidean one, so A3, A4 are not symmetric
    matrices; their spectra are nevertheless real.
    """
    h = hbar_prime
    p = half_index(n)
    eps = parity_constant(n)
    d = p + 1
    A1 = np.zeros((d, d), dtype=complex)
    A2 = np.zeros((d, d), dtype=complex)
    A3 = np.zeros((d, d), dtype=complex)
    A4 = np.zeros((d, d), dtype=complex)
    for j in range(d):
        A1[j, j] = ((eps - 1) / 4 + j) * h
        A2[j, j] = ((eps - 1) / 12 - 2 * p / 3 + j) * h
        down = (h**2 / 2) * j * (2 * j - 2 + eps)
        up = (h / 2) * (p - j)
        if j - 1 >= 0:
            A3[j - 1, j] += down
            A4[j - 1, j] += -1j * down
        if j + 1 <= p:
            A3[j + 1, j] += up
            A4[j + 1, j] += 1j * up
    return A1, A2, A3, A4


def irreducible_rep_exact(n: int, hbar_prime):
    """Representation matrices over exact scalars, for rational parameters.

    Same action as :func:`irreducible_rep` with every entry an
    :class:`~resalg.numbers.Exact`; algebra relations then hold with literal
    zero residual.  Matrices are nested lists, column-action convention.
    """
    from fractions import Fraction

    from .numbers import Exact, I as IMAG

    h = Exact.of(Fraction(hbar_prime))
    p = half_index(n)
    eps = parity_constant(n)
    d = p + 1
    zero = Exact(0)
    A1 = [[zero] * d for _ in range(d)]
    A2 = [[zero] * d for _ in range(d)]
    A3 = [[zero] * d for _ in range(d)]
    A4 = [[zero] * d for _ in range(d)]
    quarter = Exact(Fraction(1, 4))
    for j in range(d):
        A1[j][j] = (Exact(eps - 1) * quarter + Exact(j)) * h
        A2[j][j] = (Exact(Fraction(eps - 1, 12)) + Exact(Fraction(-2 * p, 3))
                    + Exact(j)) * h
        down = h * h * Exact(Fraction(j * (2 * j - 2 + eps), 2))
        up = h * Exact(Fraction(p - j, 2))
        if j - 1 >= 0:
            A3[j - 1][j] = down
            A4[j - 1][j] = -IMAG * down
        if j + 1 <= p:
            A3[j + 1][j] = up
            A4[j + 1][j] = IMAG * up
    return A1, A2, A3, A4


def vacuum_scalars(n: int, hbar_prime: float):
    """Action eigenvalues on the constant polynomial (the vacuum's)."""
    p = half_index(n)
    eps = parity_constant(n)
    a1 = (eps - 1) / 4 * hbar_prime
    a2 = ((eps - 1) / 12 - 2 * p / 3) * hbar_prime
    return a1, a2


@dataclass
class HypergeometricKernel:
    """Kernel polynomial, dual density, and radial moments for one level."""

    n: int
    hbar_prime: float
    coefficients: list          # exact Fractions c_j
    norm_const: float           # density normalization prefactor
    moments: np.ndarray         # mu_j = pi * integral s^j L(s) ds, j = 0..p

    @property
    def p(self) -> int:
        return half_index(self.n)

    @property
    def eps(self) -> int:
        return parity_constant(self.n)

    def K(self, s):
        """Kernel value; exact coefficient sum, vectorized in ``s``."""
        s = np.asarray(s, dtype=float)
        out = np.zeros_like(s)
        for j, c in enumerate(self.coefficients):
            out = out + float(c) * (s / self.hbar_prime) ** j
        return out

    def L(self, s):
        """Dual density: the solution of the dual equation integrable at
        infinity, normalized so its integral equals hbar'."""
        s = np.asarray(s, dtype=float)
        x = s / (2 * self.hbar_prime)
        return self.norm_const * special.hyperu(self.p + 2, 2 - self.eps / 2, x)

    def L_with_derivatives(self, s):
        """(L, L', L'') from the contiguous derivative identities."""
        s = np.asarray(s, dtype=float)
        h2 = 2 * self.hbar_prime
        a, b = self.p + 2, 2 - self.eps / 2
        x = s / h2
        L0 = special.hyperu(a, b, x)
        L1 = -a * special.hyperu(a + 1, b + 1, x) / h2
        L2 = a * (a + 1) * special.hyperu(a + 2, b + 2, x) / h2**2
        c = self.norm_const
        return c * L0, c * L1, c * L2

    def ode_residual_K(self, s):
        """Residual of the kernel's confluent equation (analytic derivatives)."""
        h = self.hbar_prime
        c = [float(x) for x in self.coefficients]
        K = sum(cj * (s / h) ** j for j, cj in enumerate(c))
        K1 = sum(j * cj * s ** (j - 1) / h**j for j, cj in enumerate(c) if j >= 1)
        K2 = sum(
            j * (j - 1) * cj * s ** (j - 2) / h**j for j, cj in enumerate(c) if j >= 2
        )
        return 2 * h * s * K2 + (s + self.eps * h) * K1 - self.p * K

    def moment_exact(self, j: int) -> float:
        """Closed-form moment ``pi hbar'^{j+1} / c_j`` (cross-check value)."""
        return pi * self.hbar_prime ** (j + 1) / float(self.coefficients[j])


def radial_quad(f, split: float, quad_tol: float = 1e-11) -> float:
    """Integrate f over (0, inf); sqrt substitution tames an s^{-1/2} end.

    On (0, split) integrates ``2 t f(t^2)``, which is smooth even when f has
    the inverse-square-root branch of the density at the origin; the tail
    uses the plain infinite-interval rule.
    """
    head, e1 = integrate.quad(
        lambda t: 2 * t * f(t * t), 0, np.sqrt(split), limit=300, epsabs=0, epsrel=quad_tol
    )
    tail, e2 = integrate.quad(f, split, np.inf, limit=300, epsabs=0, epsrel=quad_tol)
    total = head + tail
    if not np.isfinite(total) or (e1 + e2) > 1e-7 * max(abs(total), 1e-300):
        raise ArithmeticError(f"radial quadrature failed: {total} (err {e1 + e2})")
    return total


def kernel_and_moments(n: int, hbar_prime: float, quad_tol: float = 1e-11) -> HypergeometricKernel:
    """Build the kernel and the dual density; moments by radial quadrature.

    The density is the Tricomi solution of the dual equation (the unique
    one integrable at infinity, up to scale), normalized by quadrature so
    that its integral equals hbar'.  Moments ``mu_j = pi int s^j L ds`` are
    produced for ``j <= floor(n/2)``.
    """
    p = half_index(n)
    eps = parity_constant(n)
    h = hbar_prime
    coeffs = kernel_coefficients(n)

    def raw_L(s):
        return special.hyperu(p + 2, 2 - eps / 2, s / (2 * h))

    total = radial_quad(raw_L, split=2 * h, quad_tol=quad_tol)
    if total <= 0:
        raise ArithmeticError(f"density normalization quadrature failed: {total}")
    norm = h / total

    moments = np.empty(p + 1)
    for j in range(p + 1):
        val = radial_quad(lambda s, j=j: s**j * raw_L(s), split=2 * h, quad_tol=quad_tol)
        moments[j] = pi * norm * val
    return HypergeometricKernel(n, hbar_prime, coeffs, norm, moments)


# ---------------------------------------------------------------------------
# vacuum, coherent states, intertwiner
# ---------------------------------------------------------------------------

@dataclass
class CoherentFamily:
    """Level-n vacuum and kernel-weighted coherent vectors in a Fock block.

    ``ladder`` holds the orthonormal chain ``e_j`` spanned by powers of the
    raising combination on the vacuum; the coherent vector at ``z`` is
    ``sum_j sqrt(c_j / h'^j) z^j e_j`` so that its squared norm equals the
    kernel at ``|z|^2`` identically.
    """

    n: int
    hbar_prime: float
    block_index: np.ndarray
    vacuum: np.ndarray          # coordinates in the block
    ladder: np.ndarray          # (p+1, d) rows e_j
    ladder_norms: np.ndarray    # |B+^j vacuum| before normalization

    @property
    def p(self) -> int:
        return half_index(self.n)

    def coherent(self, z: complex) -> np.ndarray:
        coeffs = kernel_coefficients(self.n)
        h = self.hbar_prime
        vec = np.zeros(self.ladder.shape[1], dtype=complex)
        for j in range(self.p + 1):
            vec += sqrt(float(coeffs[j]) / h**j) * z**j * self.ladder[j]
        return vec


def vacuum_and_coherent(n: int, basis: FockBasis, hbar_prime: float) -> CoherentFamily:
    """Vacuum of the level-n block and the coherent-state evaluator.

    The vacuum is the unit kernel vector of the lowering combination inside
    the block (its uniqueness is asserted; failure would contradict
    irreducibility), with the first nonzero coordinate made positive real.
    """
    A1, A2, A3, A4 = resonance12_generators(basis, hbar_prime)
    idx = np.array(basis.block(n), dtype=int)
    if idx.size != half_index(n) + 1:
        raise ValueError(f"level {n} block missing or truncated at cutoff {basis.cutoff}")
    B = (A3.matrix + 1j * A4.matrix)[np.ix_(idx, idx)]
    Bdag = (A3.matrix - 1j * A4.matrix)[np.ix_(idx, idx)]

    u, s, vh = np.linalg.svd(B)
    tol = max(B.shape) * np.finfo(float).eps * (s[0] if s.size and s[0] > 0 else 1.0)
    null_dim = int(np.sum(s <= max(tol, 1e-13)))
    if B.shape[0] == 1:
        null_dim = 1
        vac = np.array([1.0 + 0j])
    else:
        if null_dim != 1:
            raise ArithmeticError(f"lowering operator kernel has dimension {null_dim}")
        vac = vh[-1].conj()
    k = np.argmax(np.abs(vac) > 1e-12)
    vac = vac * (np.abs(vac[k]) / vac[k])
    vac = vac / np.linalg.norm(vac)

    p = half_index(n)
    ladder = np.zeros((p + 1, idx.size), dtype=complex)
    norms = np.zeros(p + 1)
    v = vac.copy()
    ladder[0] = v
    norms[0] = 1.0
    cur = vac.copy()
    for j in range(1, p + 1):
        cur = Bdag @ cur
        norms[j] = np.linalg.norm(cur)
        ladder[j] = cur / norms[j]
    return CoherentFamily(n, hbar_prime, idx, vac, ladder, norms)


def coherent_transform(n: int, basis: FockBasis, hbar_prime: float):
    """Intertwiner from the monomial model space into the level-n block.

    Primary construction: the joint solution of the four intertwining
    equations (a one-dimensional solution space, found by SVD of the
    stacked Sylvester system), normalized to send the constant polynomial
    to the vacuum.  Returns ``(T, family)`` with T of shape (block, p+1).
    """
    A_ops = resonance12_generators(basis, hbar_prime)
    reps = irreducible_rep(n, hbar_prime)
    idx = np.array(basis.block(n), dtype=int)
    d = idx.size
    p = half_index(n)
    if d != p + 1:
        raise ValueError("block dimension mismatch")

    rows = []
    eye_d = np.eye(d)
    eye_m = np.eye(p + 1)
    opscale = 0.0
    for A, Achk in zip(A_ops, reps):
        Ablk = A.matrix[np.ix_(idx, idx)]
        opscale = max(opscale, np.abs(Ablk).max(), np.abs(Achk).max())
        rows.append(np.kron(eye_m, Ablk) - np.kron(Achk.T, eye_d))
    system = np.vstack(rows)
    u, s, vh = np.linalg.svd(system)
    tol = 1e-8 * max(opscale, 1e-30)
    null_dim = int(np.sum(s < tol))
    if null_dim != 1:
        raise ArithmeticError(f"intertwiner space has dimension {null_dim}")
    tvec = vh[-1].conj()
    T = tvec.reshape(p + 1, d).T  # vec with column-major convention

    family = vacuum_and_coherent(n, basis, hbar_prime)
    # first column is proportional to the vacuum; divide the factor out
    lam = family.vacuum.conj() @ T[:, 0]
    if abs(lam) < 1e-13 * max(1.0, np.abs(T).max()):
        raise ArithmeticError("intertwiner does not hit the vacuum direction")
    T = T / lam
    return T, family


def intertwining_residual(T, n, basis, hbar_prime) -> float:
    A_ops = resonance12_generators(basis, hbar_prime)
    reps = irreducible_rep(n, hbar_prime)
    idx = np.array(basis.block(n), dtype=int)
    worst = 0.0
    for A, Achk in zip(A_ops, reps):
        Ablk = A.matrix[np.ix_(idx, idx)]
        r = np.abs(Ablk @ T - T @ Achk).max()
        scale = max(1.0, np.abs(Ablk).max())
        worst = max(worst, r / scale)
    return worst


def integral_transform_matrix(n: int, basis: FockBasis, hbar_prime: float,
                              kernel: HypergeometricKernel | None = None):
    """Cross-check route: the transform assembled from coherent integrals.

    Pairing the j-th monomial against the coherent family turns the radial
    integral into the j-th quadrature moment, so the columns are the ladder
    chain weighted by ``sqrt(c_j/h'^j)/pi`` times the moment; with exact
    moments this reproduces the intertwiner exactly.
    """
    if kernel is None:
        kernel = kernel_and_moments(n, hbar_prime)
    family = vacuum_and_coherent(n, basis, hbar_prime)
    coeffs = kernel_coefficients(n)
    p = half_index(n)
    h = hbar_prime
    cols = []
    for j in range(p + 1):
        weight = sqrt(float(coeffs[j]) / h**j) * kernel.moments[j] / pi
        cols.append(weight * family.ladder[j])
    return np.array(cols).T, family


# ---------------------------------------------------------------------------
# quantized-leaf integral identities
# ---------------------------------------------------------------------------

def kahler_identities(n: int, hbar_prime: float, kernel: HypergeometricKernel | None = None):
    """The two radial integrals expected to equal (floor(n/2), floor(n/2)+1).

    First: the integral of the curvature density of ``log K`` over the
    plane, i.e. ``int_0^inf (s (log K)')' ds``.  Second: the kernel-weighted
    density mass ``(1/h') int K L ds``.  Both via adaptive quadrature.
    """
    if kernel is None:
        kernel = kernel_and_moments(n, hbar_prime)
    h = hbar_prime
    c = [float(x) for x in kernel.coefficients]
    p = kernel.p

    def dlogK_density(s):
        K = sum(cj * (s / h) ** j for j, cj in enumerate(c))
        K1 = sum(j * cj * s ** (j - 1) / h**j for j, cj in enumerate(c) if j >= 1)
        K2 = sum(j * (j - 1) * cj * s ** (j - 2) / h**j for j, cj in enumerate(c) if j >= 2)
        u1 = K1 / K
        u2 = K2 / K - (K1 / K) ** 2
        return u1 + s * u2  # (s u')' with u = log K

    if p == 0:
        first = 0.0
    else:
        first, err = integrate.quad(dlogK_density, 0, np.inf, limit=400, epsrel=1e-11, epsabs=1e-13)
        if err > 1e-7:
            raise ArithmeticError("curvature quadrature failed")

    def KL(s):
        return float(kernel.K(s)) * float(kernel.L(s))

    second = radial_quad(KL, split=2 * h, quad_tol=1e-11)
    return first, second / h

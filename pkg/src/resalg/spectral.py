"""Near-bottom spectral asymptotics of the anisotropic well.

The target Hamiltonian is ``-(h^2/2) Lap + x^2/2 + 2 y^2 + x^2 y + g x^4``
with ``g >= 1/8`` (the completed square keeps the potential confining).  Its
low spectrum organizes into clusters of size ``floor(n/2)+1`` around the
unperturbed levels ``h (n + 3/2)``, split at order ``h^{3/2}`` by the
eigenvalues of the level-n model operator.  This module provides

* a brute-force Galerkin oracle in the product oscillator eigenbasis of the
  quadratic part, with a mandatory convergence check;
* the model-operator spectrum on the polynomial space (plain non-symmetric
  diagonalization, reality and mirror symmetry asserted, with a
  moment-weighted Hermitian route as cross-check);
* the two-term eigenvalue composition and cluster labeling;
* the quantized-area ladder on the classical leaf and its comparison with
  the model spectrum;
* long-time per-block evolution generated by the cubic generator.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import pi, sqrt

import numpy as np
from scipy import integrate, linalg, optimize

from .fock import FockBasis, resonance12_generators
from .hypergeo import half_index, irreducible_rep, kernel_and_moments

@dataclass(frozen=True)
class SchrodingerProblem:
    """Parameters of the anisotropic quartic well."""

    gamma: float = 0.125
    hbar: float = 0.1
    smax: int = 44          # weighted grade cutoff of the Galerkin basis
    cubic_on: bool = True
    quartic_on: bool = True

    def __post_init__(self):
        if self.quartic_on and self.gamma < 0.125:
            raise ValueError("gamma below 1/8 loses confinement")
        if self.hbar <= 0:
            raise ValueError("hbar must be positive")


@dataclass
class SpectralRow:
    method: str
    n: int | None
    k: int | None
    hbar: float
    value: float
    meta: dict = field(default_factory=dict)


@dataclass
class SpectralTable:
    rows: list

    def values(self, method=None):
        return [r.value for r in self.rows if method is None or r.method == method]

    def by_label(self):
        return {(r.n, r.k): r for r in self.rows if r.n is not None}

    def sorted(self):
        return SpectralTable(sorted(self.rows, key=lambda r: r.value))


# ---------------------------------------------------------------------------
# Galerkin oracle
# ---------------------------------------------------------------------------

def _grade_basis(smax: int):
    states = []
    for l in range(smax // 2 + 1):
        for m in range(smax - 2 * l + 1):
            states.append((m, l))
    states.sort(key=lambda ml: (ml[0] + 2 * ml[1], ml[0]))
    return states


def _x_band(count: int, hbar: float, omega: float) -> np.ndarray:
    """Position matrix on the first ``count`` oscillator states of one mode."""
    x = np.zeros((count, count))
    c = sqrt(hbar / (2 * omega))
    for m in range(count - 1):
        x[m, m + 1] = x[m + 1, m] = c * sqrt(m + 1)
    return x


def assemble_hamiltonian(problem: SchrodingerProblem) -> tuple:
    """Dense Galerkin matrix and its graded basis."""
    S = problem.smax
    h = problem.hbar
    states = _grade_basis(S)
    index = {ml: i for i, ml in enumerate(states)}
    dim = len(states)

    # 1D position powers on an extended range so every retained element is exact
    mmax = S + 5
    x1 = _x_band(mmax, h, 1.0)
    x2 = x1 @ x1
    x4 = x2 @ x2
    lmax = S // 2 + 4
    y1 = _x_band(lmax, h, 2.0)

    H = np.zeros((dim, dim))
    for i, (m, l) in enumerate(states):
        H[i, i] = h * (m + 0.5) + 2 * h * (l + 0.5)
    if problem.cubic_on:
        for i, (m, l) in enumerate(states):
            for dm in (-2, 0, 2):
                for dl in (-1, 1):
                    j = index.get((m + dm, l + dl))
                    if j is not None:
                        H[j, i] += x2[m + dm, m] * y1[l + dl, l]
    if problem.quartic_on:
        for i, (m, l) in enumerate(states):
            for dm in (-4, -2, 0, 2, 4):
                j = index.get((m + dm, l))
                if j is not None:
                    H[j, i] += problem.gamma * x4[m + dm, m]
    return H, states


def schrodinger_eigen(problem: SchrodingerProblem, count: int = 24,
                      check_convergence: bool = True) -> SpectralTable:
    """Lowest eigenvalues of the well, labeled by dominant cluster.

    The grade cutoff is validated by re-solving with ``smax + 8`` and
    requiring the retained eigenvalues to move by less than ``1e-8 hbar``;
    failing that, the cutoff is doubled once before erroring out.

    Labels: the cluster index is the grade of the dominant unperturbed
    block in the eigenvector; within a cluster states are ranked by energy.
    """
    lam, vec, states = _solve(problem, count)
    if check_convergence:
        problem2 = SchrodingerProblem(problem.gamma, problem.hbar, problem.smax + 8,
                                      problem.cubic_on, problem.quartic_on)
        lam2, _, _ = _solve(problem2, count)
        shift = np.abs(lam - lam2).max()
        if shift > 1e-8 * problem.hbar:
            problem3 = SchrodingerProblem(problem.gamma, problem.hbar, 2 * problem.smax,
                                          problem.cubic_on, problem.quartic_on)
            lam3, vec, states = _solve(problem3, count)
            lam4, _, _ = _solve(
                SchrodingerProblem(problem.gamma, problem.hbar, 2 * problem.smax + 8,
                                   problem.cubic_on, problem.quartic_on), count)
            if np.abs(lam3 - lam4).max() > 1e-8 * problem.hbar:
                raise ArithmeticError(
                    f"oracle not converged: shifts {shift:.2e} then "
                    f"{np.abs(lam3 - lam4).max():.2e}"
                )
            lam = lam3
            problem = problem3

    grades = np.array([m + 2 * l for m, l in states])
    rows = []
    for i in range(count):
        v = vec[:, i]
        weights = np.bincount(grades, weights=np.abs(v) ** 2)
        n_dom = int(np.argmax(weights))
        rows.append(SpectralRow("oracle", n_dom, None, problem.hbar, float(lam[i]),
                                {"overlap": float(weights[n_dom])}))
    # rank within clusters by energy
    by_n: dict = {}
    for r in rows:
        by_n.setdefault(r.n, []).append(r)
    for n, group in by_n.items():
        for k, r in enumerate(sorted(group, key=lambda r: r.value)):
            r.k = k
    return SpectralTable(rows)


def _solve(problem, count):
    H, states = assemble_hamiltonian(problem)
    lam, vec = linalg.eigh(H, subset_by_index=(0, min(count, len(states)) - 1))
    return lam[:count], vec[:, :count], states


def oracle_eigenvectors(problem: SchrodingerProblem, count: int = 24):
    """Eigenpairs plus the graded basis, for overlap diagnostics."""
    lam, vec, states = _solve(problem, count)
    return lam, vec, states


# ---------------------------------------------------------------------------
# model operator
# ---------------------------------------------------------------------------

def model_operator_matrix(n: int, hbar_prime: float) -> np.ndarray:
    """The cubic generator over sqrt2 on the monomial basis of level n."""
    A3 = irreducible_rep(n, hbar_prime)[2]
    return A3 / sqrt(2.0)


def model_operator_spectrum(n: int, hbar_prime: float, tol: float = 1e-10):
    """Eigenvalues (ascending) and eigenvectors of the model operator.

    Plain non-symmetric diagonalization; reality and mirror symmetry of the
    spectrum are asserted rather than imposed.  A complex eigenvalue above
    tolerance signals a convention bug upstream, hence the hard error.
    """
    M = model_operator_matrix(n, hbar_prime)
    w, v = np.linalg.eig(M)
    scale = max(1.0, np.abs(M).max())
    if np.abs(w.imag).max() > tol * scale:
        raise ArithmeticError(f"model spectrum not real: max imag {np.abs(w.imag).max()}")
    order = np.argsort(w.real)
    w = w.real[order]
    v = v[:, order]
    sym = np.abs(w + w[::-1]).max()
    if sym > 1e-8 * max(scale, 1.0):
        raise ArithmeticError(f"model spectrum not mirror symmetric: {sym}")
    return w, v


def model_spectrum_gram_route(n: int, hbar_prime: float):
    """Hermitian cross-check: conjugate by the root of the moment Gram."""
    kern = kernel_and_moments(n, hbar_prime)
    g = np.sqrt(kern.moments / pi)
    M = model_operator_matrix(n, hbar_prime)
    Mh = np.diag(g) @ M @ np.diag(1.0 / g)
    herm_defect = np.abs(Mh - Mh.conj().T).max()
    return np.sort(linalg.eigvalsh((Mh + Mh.conj().T) / 2)), herm_defect


def model_table(n_max: int, hbar_prime: float = 1.0) -> SpectralTable:
    rows = []
    for n in range(n_max + 1):
        w, _ = model_operator_spectrum(n, hbar_prime)
        for k, nu in enumerate(w):
            rows.append(SpectralRow("model", n, k, hbar_prime, float(nu)))
    return SpectralTable(rows)


def near_bottom_asymptotics(n: int, k: int, hbar: float) -> float:
    """Two-term cluster eigenvalue: ``h (n + 3/2) + h^{3/2} nu_{n,k}``.

    The model eigenvalues enter at unit semiclassical parameter; ``k``
    indexes them in ascending order within the level.
    """
    w, _ = model_operator_spectrum(n, 1.0)
    if not 0 <= k < w.size:
        raise IndexError(f"k={k} outside cluster of size {w.size}")
    return hbar * (n + 1.5) + hbar**1.5 * float(w[k])


def asymptotic_table(n_max: int, hbar: float) -> SpectralTable:
    rows = []
    for n in range(n_max + 1):
        w, _ = model_operator_spectrum(n, 1.0)
        for k, nu in enumerate(w):
            rows.append(
                SpectralRow("asymptotic", n, k, hbar,
                            hbar * (n + 1.5) + hbar**1.5 * float(nu))
            )
    return SpectralTable(rows)


def cluster_comparison(problem: SchrodingerProblem, n_max: int) -> list:
    """Oracle-vs-asymptotics residual rows for clusters up to ``n_max``.

    Returns one dict per labeled state with the raw residual and the
    residual rescaled by ``hbar^2`` (the expected remainder order).
    """
    need = sum(half_index(n) + 1 for n in range(n_max + 3))
    oracle = schrodinger_eigen(problem, count=need)
    out = []
    for r in oracle.rows:
        if r.n is None or r.n > n_max:
            continue
        w, _ = model_operator_spectrum(r.n, 1.0)
        if r.k >= w.size:
            continue
        pred = problem.hbar * (r.n + 1.5) + problem.hbar**1.5 * float(w[r.k])
        resid = abs(r.value - pred)
        out.append({
            "n": r.n, "k": r.k, "hbar": problem.hbar,
            "oracle": r.value, "asymptotic": pred,
            "residual": resid, "residual_over_h2": resid / problem.hbar**2,
            "nu_extracted": (r.value - problem.hbar * (r.n + 1.5)) / problem.hbar**1.5,
            "nu_model": float(w[r.k]),
        })
    return out


# ---------------------------------------------------------------------------
# quantized-area ladder on the classical leaf
# ---------------------------------------------------------------------------

@dataclass
class LeafGeometry:
    """Classical leaf of the 1:2 algebra at the block Casimir values.

    The linear Casimir is ``n h'/3`` and the cubic one vanishes, so on the
    leaf the radial coordinate of the cubic generator pair satisfies
    ``r^2 = a^2 (3 c1 - 2 a)`` over the first action ``a``.
    """

    n: int
    hbar_prime: float

    @property
    def c1(self) -> float:
        return self.n * self.hbar_prime / 3

    @property
    def a_max(self) -> float:
        return 1.5 * self.c1

    def radius(self, a):
        a = np.asarray(a, dtype=float)
        return a * np.sqrt(np.maximum(3 * self.c1 - 2 * a, 0.0))

    @property
    def r_max(self) -> float:
        return float(self.c1**1.5)

    @property
    def total_area(self) -> float:
        return 2 * pi * self.a_max

    def area_above(self, nu: float) -> float:
        """Area of the region where the real cubic coordinate exceeds nu."""
        if nu <= -self.r_max:
            return self.total_area
        if nu >= self.r_max:
            return 0.0
        if nu < 0:
            return self.total_area - self.area_above(-nu)

        def width(a):
            r = self.radius(a)
            out = np.zeros_like(r)
            mask = r > nu
            out[mask] = 2 * np.arccos(np.clip(nu / r[mask], -1.0, 1.0))
            return out

        # integrable sqrt edges where the radius crosses nu
        roots = _radius_crossings(self.c1, nu)
        pts = sorted(set([0.0, self.a_max] + roots))
        total = 0.0
        for lo, hi in zip(pts[:-1], pts[1:]):
            if hi - lo < 1e-15:
                continue
            val, err = integrate.quad(
                lambda a: float(width(np.array([a]))[0]), lo, hi,
                limit=200, epsabs=1e-13, epsrel=1e-11,
            )
            total += val
        return total


def _radius_crossings(c1: float, nu: float) -> list:
    # roots of a^2 (3 c1 - 2 a) = nu^2 inside (0, 1.5 c1)
    coeffs = [-2.0, 3.0 * c1, 0.0, -nu * nu]
    roots = np.roots(coeffs)
    out = []
    for r in roots:
        if abs(r.imag) < 1e-12 and 1e-12 < r.real < 1.5 * c1 - 1e-12:
            out.append(float(r.real))
    return out


def ebk_quantization(n: int, hbar_prime: float) -> list:
    """Half-integer area ladder of the cubic generator on the leaf.

    Returns the admissible quantized values, scaled by the model operator's
    sqrt2 normalization, in descending order (index 0 encloses the least
    area around the maximum).  Levels whose area target exceeds the total
    leaf area are skipped.
    """
    leaf = LeafGeometry(n, hbar_prime)
    out = []
    k = 0
    while True:
        target = 2 * pi * hbar_prime * (k + 0.5)
        if target >= leaf.total_area:
            break
        lo, hi = -leaf.r_max, leaf.r_max
        f = lambda nu: leaf.area_above(nu) - target
        nu = optimize.brentq(f, lo + 1e-14, hi - 1e-14, xtol=1e-13, rtol=1e-12)
        out.append(nu / sqrt(2.0))
        k += 1
    return out


def ebk_vs_model(n: int, hbar_prime: float | None = None) -> dict:
    """Compare the area ladder with the model spectrum at matched parameter.

    The default parameter is 1/n (the regime where the level index is of
    order one over the semiclassical parameter).  Ladders are compared top
    down; the deviation is reported relative to the model spread.
    """
    if hbar_prime is None:
        hbar_prime = 1.0 / n
    ladder = ebk_quantization(n, hbar_prime)
    w, _ = model_operator_spectrum(n, hbar_prime)
    model_desc = list(w[::-1])
    spread = model_desc[0] - model_desc[-1] if len(model_desc) > 1 else 1.0
    count = min(len(ladder), len(model_desc))
    devs = [abs(ladder[i] - model_desc[i]) for i in range(count)]
    return {
        "n": n,
        "hbar_prime": hbar_prime,
        "ebk": ladder,
        "model": model_desc,
        "max_rel_dev": max(devs) / spread if devs else float("nan"),
        "paired": count,
    }


# ---------------------------------------------------------------------------
# long-time evolution
# ---------------------------------------------------------------------------

@dataclass
class BlockEvolution:
    """Unitary per-block propagation generated by the cubic generator."""

    basis: FockBasis
    hbar_prime: float
    microzone: bool = False
    _eig: dict = field(default_factory=dict, repr=False)

    def _block_eig(self, n: int):
        if n not in self._eig:
            A3 = resonance12_generators(self.basis, self.hbar_prime)[2]
            idx = np.array(self.basis.block(n), dtype=int)
            blk = A3.matrix[np.ix_(idx, idx)]
            w, v = np.linalg.eigh((blk + blk.conj().T) / 2)
            self._eig[n] = (w, v)
        return self._eig[n]

    def propagate(self, n: int, coeffs: np.ndarray, tau: float) -> np.ndarray:
        """Coefficients of the level-n block at reduced time tau."""
        w, v = self._block_eig(n)
        rate = 1.0 / sqrt(2.0)
        if self.microzone:
            rate /= self.hbar_prime
        phases = np.exp(-1j * rate * w * tau)
        return v @ (phases * (v.conj().T @ coeffs))

    def eigenphases(self, n: int) -> np.ndarray:
        w, _ = self._block_eig(n)
        return w / sqrt(2.0) / (self.hbar_prime if self.microzone else 1.0)


def long_time_evolution(initial: dict, basis: FockBasis, hbar_prime: float,
                        taus, microzone: bool = False) -> dict:
    """Propagate per-level coefficient vectors over a reduced-time grid.

    ``initial`` maps level indices to coefficient vectors in block
    coordinates.  Returns ``{level: array of shape (len(taus), dim)}``;
    norms are conserved exactly up to roundoff (Hermitian generator).
    """
    evo = BlockEvolution(basis, hbar_prime, microzone)
    out = {}
    for n, c0 in initial.items():
        c0 = np.asarray(c0, dtype=complex)
        traj = np.empty((len(taus), c0.size), dtype=complex)
        for i, tau in enumerate(taus):
            traj[i] = evo.propagate(n, c0, float(tau))
        out[n] = traj
    return out

"""Classical and quantum precession of the resonance integrals of motion.

On a leaf of the resonance algebra the averaged perturbation drives a
generalized-top flow of the generators.  This module integrates that flow
with Casimir monitoring, solves the reduced two-coordinate systems of the
isotropic and 1:2 cases (closed form via the affine flow in the slow time,
physical time recovered by quadrature), propagates block operators in the
Heisenberg picture, and classifies the unstable / magnetic variants by
exact arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, isqrt, sqrt

import numpy as np
from scipy import integrate, linalg, optimize

from .poisson import GenPoly, PoissonStructure, lat_id, prim_id


# ---------------------------------------------------------------------------
# generic leaf flow
# ---------------------------------------------------------------------------

@dataclass
class PrecessionSystem:
    """A Hamiltonian over a resonance algebra with an on-leaf start point."""

    structure: PoissonStructure
    hamiltonian: GenPoly
    initial: dict                  # generator id -> complex value
    constraint_tol: float = 1e-10

    def __post_init__(self):
        scale = max(1.0, max(abs(v) for v in self.initial.values()))
        for r in self.structure.constraint_residuals(self.initial):
            if r > self.constraint_tol * scale**3:
                raise ValueError(f"initial point violates constraints: {r}")


@dataclass
class Trajectory:
    times: np.ndarray
    values: dict                   # generator id -> complex array
    casimir_drift: float
    energy_drift: float

    def value_at(self, gid, i):
        return self.values[gid][i]


def integrate_precession(system: PrecessionSystem, t_max: float,
                         samples: int = 400, rtol: float = 1e-12,
                         atol: float = 1e-13, drift_tol: float = 1e-8) -> Trajectory:
    """Integrate the generator flow, refusing runs that drift.

    The vector field is assembled symbolically once (one bracket per
    evolved generator) and evaluated along the way; an adaptive high-order
    explicit scheme does the stepping.  Casimir and energy drift beyond
    ``drift_tol`` (relative) raises.
    """
    s = system.structure
    f = system.hamiltonian
    prim_ids = [prim_id(l) for l in range(s.M)]
    half = [g for g in s.basis.gammas if g > tuple(-x for x in g)]
    lat_ids = [lat_id(g) for g in half]

    fields = {}
    for gid in prim_ids + lat_ids:
        fields[gid] = s.poisson_bracket(f, GenPoly.generator(s.M, gid), reduce=False)

    def unpack(y):
        values = {}
        for i, gid in enumerate(prim_ids):
            values[gid] = y[i] + 0j
        base = len(prim_ids)
        for i, gid in enumerate(lat_ids):
            v = y[base + 2 * i] + 1j * y[base + 2 * i + 1]
            values[gid] = v
            g = gid[1]
            values[lat_id(tuple(-x for x in g))] = np.conj(v)
        return values

    def rhs(t, y):
        values = unpack(y)
        out = np.empty_like(y)
        for i, gid in enumerate(prim_ids):
            out[i] = fields[gid].evaluate(values).real
        base = len(prim_ids)
        for i, gid in enumerate(lat_ids):
            dv = fields[gid].evaluate(values)
            out[base + 2 * i] = dv.real
            out[base + 2 * i + 1] = dv.imag
        return out

    y0 = np.empty(len(prim_ids) + 2 * len(lat_ids))
    for i, gid in enumerate(prim_ids):
        y0[i] = system.initial[gid].real
    for i, gid in enumerate(lat_ids):
        y0[len(prim_ids) + 2 * i] = system.initial[gid].real
        y0[len(prim_ids) + 2 * i + 1] = system.initial[gid].imag

    ts = np.linspace(0.0, t_max, samples)
    sol = integrate.solve_ivp(rhs, (0.0, t_max), y0, t_eval=ts, method="DOP853",
                              rtol=rtol, atol=atol)
    if not sol.success:
        raise ArithmeticError(f"integration failed: {sol.message}")

    values = {gid: np.empty(samples, dtype=complex) for gid in
              prim_ids + lat_ids + [lat_id(tuple(-x for x in g)) for g in half]}
    energies = np.empty(samples)
    casimirs = np.empty((samples, len(s.casimirs)))
    for i in range(samples):
        vals = unpack(sol.y[:, i])
        for gid, v in vals.items():
            values[gid][i] = v
        energies[i] = f.evaluate(vals).real
        for j, c in enumerate(s.casimirs):
            casimirs[i, j] = c.evaluate(vals).real

    scale = max(1.0, np.abs(sol.y).max())
    cas_drift = float(np.abs(casimirs - casimirs[0]).max()) / scale**3
    en_scale = max(1.0, np.abs(energies).max())
    en_drift = float(np.abs(energies - energies[0]).max()) / en_scale
    if cas_drift > drift_tol or en_drift > drift_tol:
        raise ArithmeticError(
            f"conservation drift exceeded: casimir {cas_drift:.2e}, energy {en_drift:.2e}"
        )
    return Trajectory(ts, values, cas_drift, en_drift)


def leaf_point(structure: PoissonStructure, c0_value: float, a1: float, phase: float) -> dict:
    """On-leaf generator values of a two-frequency algebra.

    Fixes the weighted action sum and puts the lattice value on the circle
    of radius prescribed by the vanishing quadratic Casimir.
    """
    n = structure.n.n
    if structure.M != 2:
        raise ValueError("two-frequency leaves only")
    a2 = (c0_value - n[0] * a1) / n[1]
    if a1 < 0 or a2 < 0:
        raise ValueError("actions must stay nonnegative")
    r = sqrt(a1 ** n[1] * a2 ** n[0])
    alpha = max(structure.basis.gammas)
    return {
        prim_id(0): a1 + 0j,
        prim_id(1): a2 + 0j,
        lat_id(alpha): r * np.exp(1j * phase),
        lat_id(tuple(-x for x in alpha)): r * np.exp(-1j * phase),
    }


def find_equilibria(structure: PoissonStructure, f: GenPoly, c0_value: float,
                    grid: int = 60):
    """Locate the extrema of the Hamiltonian on a compact leaf.

    Coarse grid over (action, phase) followed by local refinement; the leaf
    is compact so both extrema exist.  Returns (min point, max point) as
    generator-value dicts.
    """
    n = structure.n.n
    a_hi = c0_value / n[0]

    def val(params):
        a1, phase = params
        a1 = min(max(a1, 1e-12), a_hi - 1e-12)
        return f.evaluate(leaf_point(structure, c0_value, a1, phase)).real

    best_min, best_max = None, None
    for a1 in np.linspace(a_hi / grid, a_hi * (1 - 1.0 / grid), grid):
        for phase in np.linspace(0, 2 * np.pi, grid, endpoint=False):
            v = val((a1, phase))
            if best_min is None or v < best_min[0]:
                best_min = (v, a1, phase)
            if best_max is None or v > best_max[0]:
                best_max = (v, a1, phase)

    out = []
    for sign, (v, a1, phase) in ((1, best_min), (-1, best_max)):
        res = optimize.minimize(
            lambda p: sign * val(p), x0=[a1, phase],
            bounds=[(1e-10, a_hi - 1e-10), (None, None)], method="L-BFGS-B",
        )
        out.append(leaf_point(structure, c0_value, res.x[0], res.x[1]))
    return tuple(out)


# ---------------------------------------------------------------------------
# reduced systems
# ---------------------------------------------------------------------------

@dataclass
class QuadraticHamiltonian:
    """f = alpha X^2 + beta Y^2 + gamma Z^2 + (gamma/2) XY + delta XZ + rho YZ."""

    alpha: float = 0.0
    beta: float = 0.0
    gamma: float = 0.0
    delta: float = 0.0
    rho: float = 0.0

    def xyz_value(self, X, Y, Z):
        return (self.alpha * X**2 + self.beta * Y**2 + self.gamma * Z**2
                + 0.5 * self.gamma * X * Y + self.delta * X * Z + self.rho * Y * Z)


def _reduced_coeffs_11(f: QuadraticHamiltonian, c0: float):
    """Affine slow-time flow matrix of the isotropic reduced system.

    With X=(c0+a)/2, Y=(c0-a)/2, Z=b/2, the Hamiltonian is quadratic in
    (a,b); the slow-time equations are da/dtau = f_b, db/dtau = -f_a.
    """
    al, be, ga, de, ro = f.alpha, f.beta, f.gamma, f.delta, f.rho
    # f(a,b) = 1/2 [a b] Q [a b]^T + L.[a b] + const
    Qaa = (al + be) / 2 - ga / 4
    Qbb = ga / 2
    Qab = (de - ro) / 4
    La = c0 * (al - be) / 2
    Lb = c0 * (de + ro) / 4
    A = np.array([[Qab, Qbb], [-Qaa, -Qab]])
    c = np.array([Lb, -La])
    return A, c


@dataclass
class ReducedSolution:
    """Closed-form reduced trajectory with physical-time quadrature."""

    A: np.ndarray
    c: np.ndarray
    initial: np.ndarray            # (a0, b0)
    c0: float
    w_sign: int                    # sign of the momentum coordinate at start
    turning_flagged: bool = field(default=False)

    def ab(self, tau):
        """(a, b) at slow time(s) tau via the augmented matrix exponential."""
        taus = np.atleast_1d(np.asarray(tau, dtype=float))
        M = np.zeros((3, 3))
        M[:2, :2] = self.A
        M[:2, 2] = self.c
        out = np.empty((taus.size, 2))
        v0 = np.array([self.initial[0], self.initial[1], 1.0])
        for i, t in enumerate(taus):
            out[i] = (linalg.expm(M * t) @ v0)[:2]
        return out if np.ndim(tau) else out[0]

    def radicand(self, tau):
        ab = self.ab(tau)
        a, b = (ab[..., 0], ab[..., 1]) if np.ndim(tau) else (ab[0], ab[1])
        return self.c0**2 - a**2 - b**2

    def t_of_tau(self, tau: float, n_gauss: int = 120) -> float:
        """Physical time by the half-inverse-root quadrature.

        The momentum magnitude is half the root of ``c0^2 - a^2 - b^2``;
        vanishing momentum along the path is an integrable turning point,
        handled by a square-root substitution on each side and flagged.
        """
        sign = -self.w_sign  # dtau/dt = -4 W
        if sign == 0:
            raise ValueError("momentum coordinate vanishes at the start")
        roots = self._turning_points(tau)
        if roots:
            self.turning_flagged = True
        pts = [0.0] + roots + [tau]
        total = 0.0
        for lo, hi in zip(pts[:-1], pts[1:]):
            total += self._segment_time(lo, hi, n_gauss)
        return sign * total / 2.0

    def _turning_points(self, tau: float):
        grid = np.linspace(0.0, tau, 257)
        vals = self.radicand(grid)
        roots = []
        for i in range(len(grid) - 1):
            if vals[i] * vals[i + 1] < 0:
                roots.append(float(optimize.brentq(
                    lambda s: self.radicand(s), grid[i], grid[i + 1], xtol=1e-14)))
        return roots

    def _segment_time(self, lo: float, hi: float, n_gauss: int) -> float:
        # map tau = lo + (hi-lo) sin^2(theta): absorbs sqrt edges at both ends
        nodes, weights = np.polynomial.legendre.leggauss(n_gauss)
        theta = (nodes + 1) * (np.pi / 4)
        w = weights * (np.pi / 4)
        taus = lo + (hi - lo) * np.sin(theta) ** 2
        jac = (hi - lo) * 2 * np.sin(theta) * np.cos(theta)
        rad = np.maximum(self.radicand(taus), 0.0)
        good = rad > 0
        return float(np.sum(w[good] * jac[good] / np.sqrt(rad[good])))


def reduced_11_solve(f: QuadraticHamiltonian, initial, c0: float) -> ReducedSolution:
    """Closed-form solution of the isotropic reduced precession system.

    ``initial`` is (a0, b0, W0) or just (a0, b0); the on-realization
    relation ``a^2 + b^2 + 4 W^2 = c0^2`` fixes the momentum magnitude, so
    only its sign is taken from a supplied W0 (defaulting to the negative
    branch), and a supplied magnitude off the sphere by more than 1e-6
    relative is rejected.
    """
    if len(initial) == 2:
        a0, b0 = initial
        w0 = -1.0
    else:
        a0, b0, w0 = initial
    rad = c0**2 - a0**2 - b0**2
    if rad < 0:
        raise ValueError("initial point outside the momentum disk")
    w_exact = sqrt(rad) / 2
    if len(initial) == 3 and abs(abs(w0) - w_exact) > 1e-6 * max(1.0, c0):
        raise ValueError(
            f"initial momentum {w0} is off the reduced sphere (|W| = {w_exact})")
    A, c = _reduced_coeffs_11(f, c0)
    return ReducedSolution(A, c, np.array([a0, b0], dtype=float), c0,
                           int(np.sign(w0)) if w0 != 0 else 0)


def reduced_11_rhs(f: QuadraticHamiltonian, c0: float):
    """The physical-time vector field of (a, b, W) for direct integration."""
    A, c = _reduced_coeffs_11(f, c0)

    def rhs(t, y):
        a, b, w = y
        fb = A[0, 0] * a + A[0, 1] * b + c[0]     # f_b
        fa = -(A[1, 0] * a + A[1, 1] * b + c[1])  # f_a
        return [-4 * w * fb, 4 * w * fa, a * fb - b * fa]

    return rhs


@dataclass
class TwelveState:
    """(a, b, W) chart of the 1:2 reduced system at fixed Casimirs."""

    c0: float
    c1: float

    def xy(self, a):
        X = (self.c0 + a) / 2.0
        Y = (self.c0 - a) / 4.0
        return X, Y

    def w_squared(self, a, b):
        X, Y = self.xy(a)
        return 0.5 * X**2 * Y - b**2 - self.c1


def reduced_12_system(f_xyz, initial, c0: float, t_max: float, samples: int = 400,
                      rtol: float = 1e-12, atol: float = 1e-13):
    """Integrate the 1:2 reduced system with conserved-quantity monitoring.

    ``f_xyz(X, Y, Z)`` is any smooth Hamiltonian expression; the state is
    (a, b, W) with a = X - 2Y, b = Z.  Returns times, trajectory array, and
    the (casimir, energy) drift pair.
    """
    a0, b0, w0 = initial
    chart = TwelveState(c0, 0.0)
    eps = 1e-7

    def partials(a, b):
        X, Y = chart.xy(a)
        # chain rule through X(a), Y(a): dX/da = 1/2, dY/da = -1/4
        fX = (f_xyz(X + eps, Y, b) - f_xyz(X - eps, Y, b)) / (2 * eps)
        fY = (f_xyz(X, Y + eps, b) - f_xyz(X, Y - eps, b)) / (2 * eps)
        fZ = (f_xyz(X, Y, b + eps) - f_xyz(X, Y, b - eps)) / (2 * eps)
        fa = 0.5 * fX - 0.25 * fY
        return fa, fZ, X, Y

    def rhs(t, y):
        a, b, w = y
        fa, fb, X, Y = partials(a, b)
        dw = -4 * b * fa + (0.25 * X**2 - X * Y) * fb
        return [-4 * w * fb, 4 * w * fa, dw]

    ts = np.linspace(0.0, t_max, samples)
    sol = integrate.solve_ivp(rhs, (0.0, t_max), [a0, b0, w0], t_eval=ts,
                              method="DOP853", rtol=rtol, atol=atol)
    if not sol.success:
        raise ArithmeticError(sol.message)
    a, b, w = sol.y
    X, Y = chart.xy(a)
    cas = 0.5 * X**2 * Y - b**2 - w**2
    en = f_xyz(X, Y, b)
    scale = max(1.0, float(np.abs(sol.y).max()))
    cas_drift = float(np.abs(cas - cas[0]).max()) / scale**3
    en_drift = float(np.abs(en - en[0]).max()) / max(1.0, float(np.abs(en).max()))
    return ts, sol.y, (cas_drift, en_drift)


# ---------------------------------------------------------------------------
# Heisenberg block evolution
# ---------------------------------------------------------------------------

def heisenberg_evolution(ops: dict, f_matrix: np.ndarray, hbar_prime: float, ts):
    """Conjugate block operators by the flow of a block Hamiltonian.

    ``ops`` maps names to square matrices on one level block; the generator
    of motion is ``exp(i t F / h')``.  Returns ``{name: [matrix per t]}``;
    spectra are preserved exactly (unitary conjugation).
    """
    w, v = np.linalg.eigh((f_matrix + f_matrix.conj().T) / 2)
    out = {name: [] for name in ops}
    for t in ts:
        phases = np.exp(1j * w * t / hbar_prime)
        U = (v * phases) @ v.conj().T
        for name, m in ops.items():
            out[name].append(U @ m @ U.conj().T)
    return out


# ---------------------------------------------------------------------------
# special systems
# ---------------------------------------------------------------------------

@dataclass
class AlgebraDescriptor:
    kind: str
    data: dict


def classify_inverted(n1: int, n2: int) -> AlgebraDescriptor:
    """Hyperbolic variant: same table with the imaginary unit stripped.

    For the isotropic case the real combinations close onto the
    noncompact real form: the cyclic triple carries one flipped sign and
    the quadratic Casimir the (+,-,+) signature.
    """
    data = {
        "generators": {
            "A1": "(q1^2 - p1^2)/2", "A2": "(q2^2 - p2^2)/2",
            "A+": "((q+p)/sqrt2)^pos ((q-p)/sqrt2)^neg over the minimal vector",
        },
        "pair_bracket": f"(n2^2 A2 - n1^2 A1) A1^{n2 - 1} A2^{n1 - 1}",
        "i_factor": False,
    }
    if (n1, n2) == (1, 1):
        data["basis_relations"] = {
            ("b1", "b2"): "+b3", ("b2", "b3"): "+b1", ("b3", "b1"): "-b2",
        }
        data["casimir_signature"] = (1, -1, 1)
        return AlgebraDescriptor("su(1,1)", data)
    return AlgebraDescriptor(f"hyperbolic {n1}:{n2}", data)


def _rational_sqrt(fr: Fraction):
    num, den = fr.numerator, fr.denominator
    rn, rd = isqrt(num), isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return None


def classify_magneto(ratio_squared) -> AlgebraDescriptor:
    """Resonance data of the isotropic dot in a perpendicular field.

    Input is the exact square of (half Larmor frequency / dot frequency).
    Degeneracy requires that square to equal ``s^2/(k^2 - s^2)``; then the
    rotating-frame frequencies are ``(k+s, k-s)``, reduced to the coprime
    pair whose degree ``l + m - 1`` bounds the nonlinear bracket component.
    """
    q = Fraction(ratio_squared)
    if q < 0:
        raise ValueError("the frequency-ratio square cannot be negative")
    # q = s^2/(k^2-s^2)  =>  (s/k)^2 = q/(1+q)
    frac = q / (1 + q)
    root = _rational_sqrt(frac)
    if root is None:
        return AlgebraDescriptor("non-resonant", {"ratio_squared": q})
    s, k = root.numerator, root.denominator
    lp, mp = k + s, k - s
    g = gcd(lp, mp)
    l, m = lp // g, mp // g
    return AlgebraDescriptor("magneto", {
        "ratio_squared": q, "s": s, "k": k, "l": l, "m": m,
        "degree": l + m - 1,
    })


def classify_anisotropic(w1_squared, w2_squared) -> AlgebraDescriptor:
    """Effective flow frequencies of the anisotropic well in a unit field.

    ``w_pm^2 = (w1^2 + w2^2 + 2 +- sqrt((w1^2-w2^2)^2 + 8(w1^2+w2^2)))/2``;
    resonance is detected exactly when the data stays rational.
    """
    a = Fraction(w1_squared)
    b = Fraction(w2_squared)
    disc = (a - b) ** 2 + 8 * (a + b)
    root = _rational_sqrt(disc)
    data = {"w1_squared": a, "w2_squared": b, "discriminant": disc}
    if root is None:
        data["w_plus"] = sqrt(float((a + b + 2) / 2) + sqrt(float(disc)) / 2)
        data["w_minus"] = sqrt(float((a + b + 2) / 2) - sqrt(float(disc)) / 2)
        return AlgebraDescriptor("anisotropic (irrational splitting)", data)
    wp2 = (a + b + 2 + root) / 2
    wm2 = (a + b + 2 - root) / 2
    data["w_plus_squared"] = wp2
    data["w_minus_squared"] = wm2
    if wm2 == 0:
        return AlgebraDescriptor("anisotropic degenerate (zero mode)", data)
    r = _rational_sqrt(wp2 / wm2)
    if r is not None:
        data["l"], data["m"] = r.numerator, r.denominator
        return AlgebraDescriptor("anisotropic resonant", data)
    return AlgebraDescriptor("anisotropic non-resonant", data)


def classify_special_systems(kind: str, **params) -> AlgebraDescriptor:
    if kind == "inverted":
        return classify_inverted(params.get("n1", 1), params.get("n2", 1))
    if kind == "magneto":
        return classify_magneto(params["ratio_squared"])
    if kind == "anisotropic":
        return classify_anisotropic(params["w1_squared"], params["w2_squared"])
    raise ValueError(f"unknown special system {kind!r}")

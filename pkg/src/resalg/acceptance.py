"""The acceptance gate: nine numbered criteria, each a pass/fail check.

Each criterion pins its tolerances at the documented defaults and returns a
result record with the measured quantities, so a failure is diagnosable
from the emitted report alone.  The full profile widens a few sweeps; the
fast profile already runs every criterion at its contractual parameters.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import sqrt

import numpy as np

from . import averaging, fock, hypergeo, lattice, poisson, precession, spectral
from .config import Tolerances


@dataclass
class CriterionResult:
    name: str
    passed: bool
    details: dict = field(default_factory=dict)
    runtime: float = 0.0

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"{self.name}: {mark}  ({self.runtime:.2f}s)"


def _timed(fn):
    def wrapper(tol: Tolerances, profile: str) -> CriterionResult:
        t0 = time.perf_counter()
        result = fn(tol, profile)
        result.runtime = time.perf_counter() - t0
        return result

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


@_timed
def criterion_a1(tol: Tolerances, profile: str) -> CriterionResult:
    """Algebra relations and Casimir block values on levels up to 12."""
    hp = 1.0
    basis = fock.FockBasis(lattice.PrimeSystem((1, 2)), 13)
    ops = fock.resonance12_generators(basis, hp)
    rel_fock = fock.relations12_residual(*ops, hp)
    C1, C2 = fock.casimirs12(*ops, hp)
    cas_err = 0.0
    for n in range(13):
        idx = np.array(basis.block(n), dtype=int)
        scale = max(1.0, (n * hp) ** 3)
        cas_err = max(
            cas_err,
            float(np.abs(C1[np.ix_(idx, idx)] - (n * hp / 3) * np.eye(idx.size)).max()),
            float(np.abs(C2[np.ix_(idx, idx)]).max()) / scale,
        )
    rel_rep = 0.0
    cas_rep = 0.0
    for n in range(13):
        A1, A2, A3, A4 = hypergeo.irreducible_rep(n, hp)
        checks = [
            A1 @ A2 - A2 @ A1,
            A1 @ A3 - A3 @ A1 + 1j * hp * A4,
            A1 @ A4 - A4 @ A1 - 1j * hp * A3,
            A2 @ A3 - A3 @ A2 + 1j * hp * A4,
            A2 @ A4 - A4 @ A2 - 1j * hp * A3,
            A3 @ A4 - A4 @ A3 + 3j * hp * (A1 @ A2 - hp / 4 * A1 + hp / 4 * A2),
        ]
        scale = max(1.0, float(max(np.abs(m).max() for m in (A1, A2, A3, A4))) ** 2)
        rel_rep = max(rel_rep, max(float(np.abs(c).max()) for c in checks) / scale)
        d = A1.shape[0]
        cas_rep = max(
            cas_rep,
            float(np.abs(A1 - A2 - (n * hp / 3) * np.eye(d)).max()),
            float(np.abs(
                3 * A1 @ A1 @ A2 - A1 @ A1 @ A1 + A3 @ A3 + A4 @ A4
                - 1.5 * hp * A1 @ A1 + 1.5 * hp * A1 @ A2
                + 0.75 * hp**2 * A2 + 0.25 * hp**2 * A1
            ).max()) / max(1.0, (n * hp) ** 3),
        )
    worst = max(rel_fock, cas_err, rel_rep, cas_rep)
    return CriterionResult(
        "A1", worst < tol.relations,
        {"fock_relations": rel_fock, "fock_casimirs": cas_err,
         "rep_relations": rel_rep, "rep_casimirs": cas_rep,
         "tolerance": tol.relations},
    )


@_timed
def criterion_a2(tol: Tolerances, profile: str) -> CriterionResult:
    """Model-spectrum anchor and full tables against independent routes."""
    w, _ = spectral.model_operator_spectrum(2, 1.0)
    anchor = abs(w[1] - 1 / (2 * sqrt(2.0)))
    anchor = max(anchor, abs(w[0] + 1 / (2 * sqrt(2.0))))
    basis = fock.FockBasis(lattice.PrimeSystem((1, 2)), 13)
    A3 = fock.resonance12_generators(basis, 1.0)[2]
    table_err = 0.0
    for n in range(13):
        wn, _ = spectral.model_operator_spectrum(n, 1.0)
        idx = np.array(basis.block(n), dtype=int)
        blk = A3.matrix[np.ix_(idx, idx)] / sqrt(2.0)
        dense = np.sort(np.linalg.eigvalsh((blk + blk.conj().T) / 2))
        table_err = max(table_err, float(np.abs(np.sort(wn) - dense).max()))
        gram, _ = spectral.model_spectrum_gram_route(n, 1.0)
        table_err = max(table_err, float(np.abs(np.sort(wn) - gram).max()))
    return CriterionResult(
        "A2", anchor < tol.anchor and table_err < tol.model_match,
        {"anchor_error": anchor, "table_error": table_err,
         "anchor_tolerance": tol.anchor, "table_tolerance": tol.model_match},
    )


@_timed
def criterion_a3(tol: Tolerances, profile: str) -> CriterionResult:
    """Two-term cluster asymptotics under the Planck sweep."""
    hbars = [0.2, 0.1, 0.05]
    if profile == "full":
        hbars.append(0.025)
    worst = {}
    nu_err = {}
    for hbar in hbars:
        prob = spectral.SchrodingerProblem(gamma=0.125, hbar=hbar, smax=44)
        rows = spectral.cluster_comparison(prob, 4)
        worst[hbar] = max(r["residual_over_h2"] for r in rows)
        nu_err[hbar] = max(abs(r["nu_extracted"] - r["nu_model"]) for r in rows)
    growth = worst[0.05] / worst[0.2]
    ratios = [nu_err[a] / nu_err[b] for a, b in zip(hbars[:-1], hbars[1:])]
    # the extracted coefficients converge at the square-root rate: each
    # halving of the parameter shrinks the error by sqrt2, within factor 2
    sqrt_ok = all(0.5 < r / sqrt(2.0) < 2 for r in ratios)
    passed = growth <= tol.growth_factor
    return CriterionResult(
        "A3", passed,
        {"residual_over_h2": worst, "nu_extraction_error": nu_err,
         "growth_0.05_vs_0.2": growth, "allowed_growth": tol.growth_factor,
         "nu_error_ratios": ratios, "sqrt_rate_within_factor2": sqrt_ok},
    )


@_timed
def criterion_a4(tol: Tolerances, profile: str) -> CriterionResult:
    """Jacobi residuals on the constraint surface; weighted-sum centrality."""
    samples = 1000 if profile != "full" else 2000
    systems = [(1, 1), (1, 2), (2, 3), (1, 2, 3)]
    residuals = {}
    central = True
    for n in systems:
        s = poisson.build_classical_algebra(lattice.PrimeSystem(n))
        residuals[str(n)] = poisson.verify_jacobi(s, samples, seed=42)
        c0 = s.casimirs[0]
        for gid in s.generator_ids():
            if not s.poisson_bracket(c0, poisson.GenPoly.generator(s.M, gid)).is_zero():
                central = False
    worst = max(residuals.values())
    return CriterionResult(
        "A4", worst < tol.jacobi and central,
        {"max_residuals": residuals, "c0_symbolically_central": central,
         "tolerance": tol.jacobi, "samples_per_system": samples},
    )


def _oracle_minimal_clean(n, bound):
    """Deliberately independent enumeration: raw box scan, raw minimality."""
    M = len(n)
    sols = []
    for alpha in itertools.product(range(-bound, bound + 1), repeat=M):
        if any(alpha) and sum(a * b for a, b in zip(n, alpha)) == 0:
            sols.append(alpha)
    minimal = []
    for alpha in sols:
        plus = tuple(max(a, 0) for a in alpha)
        minus = tuple(max(-a, 0) for a in alpha)
        decomposable = False
        for sp in itertools.product(*(range(p + 1) for p in plus)):
            if decomposable:
                break
            for sm in itertools.product(*(range(m + 1) for m in minus)):
                if not (any(sp) or any(sm)):
                    continue
                if (sp, sm) == (plus, minus):
                    continue
                rest_p = tuple(a - b for a, b in zip(plus, sp))
                rest_m = tuple(a - b for a, b in zip(minus, sm))
                if not (any(rest_p) or any(rest_m)):
                    continue
                if sum(nl * (a - b) for nl, a, b in zip(n, sp, sm)) == 0:
                    decomposable = True
                    break
        if not decomposable:
            minimal.append(alpha)
    return set(minimal)


@_timed
def criterion_a5(tol: Tolerances, profile: str) -> CriterionResult:
    """Minimal-element enumeration versus a raw box-scan oracle."""
    count = 0
    mismatches = []
    for m in range(1, 4):
        for n in itertools.product(range(1, 9), repeat=m):
            if sum(n) > 8:
                continue
            try:
                prime = lattice.PrimeSystem(n)
            except lattice.ResonanceError:
                continue
            count += 1
            ours = set(lattice.enumerate_minimal_elements(prime).gammas)
            oracle = _oracle_minimal_clean(n, sum(n) + 2)
            if ours != oracle:
                mismatches.append({"n": n, "ours": sorted(ours),
                                   "oracle": sorted(oracle)})
    basis12 = lattice.enumerate_minimal_elements(lattice.PrimeSystem((1, 2)))
    example_ok = set(basis12.gammas) == {(2, -1), (-2, 1)}
    return CriterionResult(
        "A5", not mismatches and example_ok,
        {"systems_checked": count, "mismatches": mismatches,
         "resonance_12_basis": sorted(basis12.gammas)},
    )


@_timed
def criterion_a6(tol: Tolerances, profile: str) -> CriterionResult:
    """Averaging: exact homological solve, cubic residual scaling, quartic table."""
    from .wick import wick_from_q_polynomial

    H1 = wick_from_q_polynomial({(2, 1): 1}, 2)
    f0, h1bar = averaging.solve_homological((1, 2), H1)
    resid_zero = averaging.homological_residual((1, 2), H1, f0, h1bar).is_zero()

    slope = averaging.conjugation_slope((1, 2), H1, [1e-1, 1e-2, 1e-3],
                                        cutoff=16, hbar=1.0)
    slope_ok = abs(slope - 3.0) <= tol.slope_dev

    from .numbers import Exact

    table = averaging.classical_average_quartic({(4, 0): 24})
    table_ok = table == {"X^2": Exact(Fraction(3, 2))}
    cross = averaging.classical_average_quartic({(2, 2): 4})
    table_ok = table_ok and cross == {"XY": Exact(Fraction(1, 2)), "Z^2": Exact(1)}

    rng = np.random.default_rng(7)
    s = poisson.build_classical_algebra(lattice.PrimeSystem((1, 1)))
    quad_err = 0.0
    for qpoly in [{(4, 0): 1}, {(2, 2): 1}, {(3, 1): 1}, {(1, 3): 1}]:
        gen = averaging.classical_average_q_polynomial(qpoly, (1, 1))
        for _ in range(4):
            q = rng.normal(size=2)
            p = rng.normal(size=2)
            z = (q + 1j * p) / sqrt(2.0)
            sym = gen.evaluate(s.realize(z)).real
            num = averaging.time_average_oracle(qpoly, q, p)
            quad_err = max(quad_err, abs(sym - num) / max(1.0, abs(num)))
    return CriterionResult(
        "A6", resid_zero and slope_ok and table_ok and quad_err < tol.quartic_oracle,
        {"homological_residual_zero": resid_zero, "slope": slope,
         "quartic_table_exact": table_ok, "time_quadrature_error": quad_err},
    )


@_timed
def criterion_a7(tol: Tolerances, profile: str) -> CriterionResult:
    """Coherent structure: kernel norms, intertwining, leaf integrals."""
    basis = fock.FockBasis(lattice.PrimeSystem((1, 2)), 22)
    rng = np.random.default_rng(11)
    kernel_err = 0.0
    intertwine_err = 0.0
    for n in range(11):
        fam = hypergeo.vacuum_and_coherent(n, basis, 1.0)
        kern = hypergeo.kernel_and_moments(n, 1.0)
        for _ in range(50):
            z = rng.normal() * 0.8 + 1j * rng.normal() * 0.8
            v = fam.coherent(z)
            lhs = float((v.conj() @ v).real)
            rhs = float(kern.K(abs(z) ** 2))
            kernel_err = max(kernel_err, abs(lhs - rhs) / max(1.0, rhs))
        T, _ = hypergeo.coherent_transform(n, basis, 1.0)
        intertwine_err = max(
            intertwine_err, hypergeo.intertwining_residual(T, n, basis, 1.0))
    kahler_err = 0.0
    for n in range(9):
        a, b = hypergeo.kahler_identities(n, 1.0)
        kahler_err = max(kahler_err, abs(a - hypergeo.half_index(n)),
                         abs(b - (hypergeo.half_index(n) + 1)))
    passed = (kernel_err < tol.kernel and intertwine_err < tol.intertwine
              and kahler_err < tol.kahler)
    return CriterionResult(
        "A7", passed,
        {"kernel_error": kernel_err, "intertwine_error": intertwine_err,
         "kahler_error": kahler_err},
    )


@_timed
def criterion_a8(tol: Tolerances, profile: str) -> CriterionResult:
    """Precession conservation, reduced closed form, magneto degree table."""
    from .poisson import GenPoly, lat_id, prim_id

    drifts = {}
    for n in [(1, 1), (1, 2)]:
        s = poisson.build_classical_algebra(lattice.PrimeSystem(n))
        alpha = max(s.basis.gammas)
        f = (GenPoly.generator(2, lat_id(alpha), Fraction(1, 2))
             + GenPoly.generator(2, lat_id(tuple(-x for x in alpha)), Fraction(1, 2))
             + GenPoly.generator(2, prim_id(0)) * GenPoly.generator(2, prim_id(1), Fraction(1, 5)))
        init = precession.leaf_point(s, 2.0, 0.7, 0.4)
        traj = precession.integrate_precession(
            precession.PrecessionSystem(s, f, init), 100.0, samples=120)
        drifts[str(n)] = max(traj.casimir_drift, traj.energy_drift)

    f11 = precession.QuadraticHamiltonian(alpha=0.3, beta=0.25, gamma=0.4,
                                          delta=0.05, rho=-0.04)
    c0 = 2.0
    a0, b0 = 0.5, -0.2
    w0 = -sqrt(c0**2 - a0**2 - b0**2) / 2
    sol = precession.reduced_11_solve(f11, (a0, b0, w0), c0)
    from scipy.integrate import solve_ivp

    rhs = precession.reduced_11_rhs(f11, c0)
    num = solve_ivp(rhs, (0, 50), [a0, b0, w0], rtol=1e-13, atol=1e-15,
                    dense_output=True)
    eig = np.abs(np.linalg.eigvals(sol.A).imag).max()
    closed_err = 0.0
    for tau in np.linspace(0.1, 2 * np.pi / eig, 9):
        t = sol.t_of_tau(tau)
        a_cf, b_cf = sol.ab(tau)
        a_n, b_n, _ = num.sol(t)
        closed_err = max(closed_err, abs(a_cf - a_n), abs(b_cf - b_n))

    magneto_expect = {Fraction(1, 8): 2, Fraction(1, 3): 3, Fraction(1, 24): 4,
                      Fraction(9, 16): 4, Fraction(4, 5): 5}
    magneto_ok = all(
        precession.classify_magneto(r).data.get("degree") == d
        for r, d in magneto_expect.items()
    )
    worst_drift = max(drifts.values())
    passed = (worst_drift <= tol.drift and closed_err <= tol.closed_form
              and magneto_ok)
    return CriterionResult(
        "A8", passed,
        {"drifts": drifts, "closed_form_error": closed_err,
         "magneto_table_ok": magneto_ok},
    )


@_timed
def criterion_a9(tol: Tolerances, profile: str) -> CriterionResult:
    """Quantized-area ladder versus model spectrum at growing level."""
    ns = [20, 40] if profile != "full" else [20, 40, 80]
    devs = {n: spectral.ebk_vs_model(n)["max_rel_dev"] for n in ns}
    decreasing = all(devs[a] > devs[b] for a, b in zip(ns[:-1], ns[1:]))
    passed = decreasing and devs[40] < tol.ebk_rel
    return CriterionResult(
        "A9", passed,
        {"max_rel_dev": {str(k): v for k, v in devs.items()},
         "decreasing": decreasing, "tolerance_at_40": tol.ebk_rel},
    )


CRITERIA = {
    "A1": criterion_a1,
    "A2": criterion_a2,
    "A3": criterion_a3,
    "A4": criterion_a4,
    "A5": criterion_a5,
    "A6": criterion_a6,
    "A7": criterion_a7,
    "A8": criterion_a8,
    "A9": criterion_a9,
}


def run_acceptance(profile: str = "fast", names=None,
                   tolerances: Tolerances | None = None, verbose: bool = True):
    """Run the (selected) criteria, printing one line per criterion."""
    tol = tolerances or Tolerances()
    selected = names or list(CRITERIA)
    results = []
    for name in selected:
        result = CRITERIA[name](tol, profile)
        results.append(result)
        if verbose:
            print(result.line())
    return results

"""Polynomial Poisson algebras generated by a resonance.

For a prime frequency system ``n`` the commutant of the oscillator is
generated by one primitive action per mode together with one complex
generator per minimal clean solution of ``n . alpha = 0``.  This module
builds the finite bracket table of that algebra, the constraint relations
that cut out the phase-space realization, and the Casimir polynomials; it
evaluates everything numerically on phase space and derives the triple
brackets over configuration space for the two-frequency charts.

Generator ids are ``("P", l)`` for the l-th primitive action and
``("L", gamma)`` for the lattice generator attached to the clean vector
``gamma``.  Conjugation fixes primitives and maps gamma to -gamma.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .lattice import (
    MinimalBasis,
    PrimeSystem,
    anomaly,
    enumerate_minimal_elements,
    expand_in_minimal,
    lattice_bracket,
    pair_add,
    pair_of,
)
from .numbers import Exact, I, INV_SQRT2, ONE, ZERO


def prim_id(l: int):
    return ("P", int(l))


def lat_id(gamma):
    return ("L", tuple(int(g) for g in gamma))


def conj_id(gid):
    kind, payload = gid
    if kind == "P":
        return gid
    return ("L", tuple(-g for g in payload))


# ---------------------------------------------------------------------------
# polynomials in the generators
# ---------------------------------------------------------------------------

class GenPoly:
    """Finitely supported polynomial in the resonance generators.

    Monomial keys are ``(prim_exps, lat_part)`` where ``prim_exps`` is an
    integer tuple of length M and ``lat_part`` a sorted tuple of
    ``(gamma, exponent)`` pairs.  Coefficients are :class:`~resalg.numbers.Exact`.
    """

    __slots__ = ("M", "terms")

    def __init__(self, M: int, terms=None):
        self.M = M
        self.terms = {}
        if terms:
            for mono, coef in terms.items():
                coef = Exact.of(coef)
                if not coef.is_zero():
                    self.terms[mono] = coef

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(M: int) -> "GenPoly":
        return GenPoly(M)

    @staticmethod
    def constant(M: int, c) -> "GenPoly":
        return GenPoly(M, {((0,) * M, ()): Exact.of(c)})

    @staticmethod
    def generator(M: int, gid, coef=1) -> "GenPoly":
        kind, payload = gid
        if kind == "P":
            prim = tuple(1 if j == payload else 0 for j in range(M))
            return GenPoly(M, {(prim, ()): Exact.of(coef)})
        return GenPoly(M, {((0,) * M, ((payload, 1),)): Exact.of(coef)})

    @staticmethod
    def monomial(M: int, prims, lats, coef=1) -> "GenPoly":
        lats = tuple(sorted((tuple(g), int(e)) for g, e in lats if e))
        return GenPoly(M, {(tuple(prims), lats): Exact.of(coef)})

    # -- ring operations ----------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, GenPoly):
            return other
        return GenPoly.constant(self.M, other)

    def __add__(self, other):
        o = self._coerce(other)
        out = dict(self.terms)
        for mono, c in o.terms.items():
            s = out.get(mono, ZERO) + c
            if s.is_zero():
                out.pop(mono, None)
            else:
                out[mono] = s
        r = GenPoly(self.M)
        r.terms = out
        return r

    __radd__ = __add__

    def __neg__(self):
        r = GenPoly(self.M)
        r.terms = {m: -c for m, c in self.terms.items()}
        return r

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        out = {}
        for (p1, l1), c1 in self.terms.items():
            for (p2, l2), c2 in o.terms.items():
                prims = tuple(a + b for a, b in zip(p1, p2))
                ld = {}
                for g, e in l1 + l2:
                    ld[g] = ld.get(g, 0) + e
                lats = tuple(sorted(ld.items()))
                key = (prims, lats)
                s = out.get(key, ZERO) + c1 * c2
                if s.is_zero():
                    out.pop(key, None)
                else:
                    out[key] = s
        r = GenPoly(self.M)
        r.terms = out
        return r

    __rmul__ = __mul__

    def scale(self, c) -> "GenPoly":
        c = Exact.of(c)
        r = GenPoly(self.M)
        if not c.is_zero():
            r.terms = {m: cf * c for m, cf in self.terms.items()}
        return r

    # -- structure maps -----------------------------------------------------

    def conjugate(self) -> "GenPoly":
        """Real structure: conjugate coefficients, gamma -> -gamma."""
        out = {}
        for (prims, lats), c in self.terms.items():
            new_lats = tuple(sorted((tuple(-x for x in g), e) for g, e in lats))
            out[(prims, new_lats)] = c.conjugate()
        r = GenPoly(self.M)
        r.terms = out
        return r

    def diff(self, gid) -> "GenPoly":
        """Formal partial derivative with respect to one generator."""
        kind, payload = gid
        out = {}
        for (prims, lats), c in self.terms.items():
            if kind == "P":
                e = prims[payload]
                if e == 0:
                    continue
                new_prims = tuple(
                    v - 1 if j == payload else v for j, v in enumerate(prims)
                )
                key = (new_prims, lats)
                out[key] = out.get(key, ZERO) + c * e
            else:
                ld = dict(lats)
                e = ld.get(payload, 0)
                if e == 0:
                    continue
                if e == 1:
                    ld.pop(payload)
                else:
                    ld[payload] = e - 1
                key = (prims, tuple(sorted(ld.items())))
                out[key] = out.get(key, ZERO) + c * e
        r = GenPoly(self.M)
        r.terms = {k: v for k, v in out.items() if not v.is_zero()}
        return r

    def generators_present(self):
        seen = set()
        for (prims, lats), _ in self.terms.items():
            for j, e in enumerate(prims):
                if e:
                    seen.add(prim_id(j))
            for g, _e in lats:
                seen.add(lat_id(g))
        return seen

    # -- evaluation ---------------------------------------------------------

    def evaluate(self, values: dict) -> complex:
        total = 0j
        for (prims, lats), c in self.terms.items():
            v = complex(c)
            for j, e in enumerate(prims):
                if e:
                    v *= values[prim_id(j)] ** e
            for g, e in lats:
                v *= values[lat_id(g)] ** e
            total += v
        return total

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        o = self._coerce(other)
        return self.terms == o.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        if not self.terms:
            return "GenPoly(0)"
        bits = []
        for (prims, lats), c in sorted(self.terms.items()):
            facs = [f"P{j}^{e}" for j, e in enumerate(prims) if e]
            facs += [f"A{list(g)}^{e}" for g, e in lats]
            bits.append(f"({c!r})" + ("*" + "*".join(facs) if facs else ""))
        return "GenPoly[" + " + ".join(bits) + "]"


# ---------------------------------------------------------------------------
# the structure itself
# ---------------------------------------------------------------------------

@dataclass
class PoissonStructure:
    """Bracket table, constraints and Casimirs of one resonance algebra."""

    n: PrimeSystem
    basis: MinimalBasis
    bracket_table: dict
    constraints: list
    casimirs: list

    @property
    def M(self) -> int:
        return self.n.length

    def generator_ids(self):
        return [prim_id(l) for l in range(self.M)] + [
            lat_id(g) for g in self.basis.gammas
        ]

    def bracket_gen(self, gid1, gid2) -> GenPoly:
        if (gid1, gid2) in self.bracket_table:
            return self.bracket_table[(gid1, gid2)]
        if (gid2, gid1) in self.bracket_table:
            return -self.bracket_table[(gid2, gid1)]
        return GenPoly.zero(self.M)

    # -- brackets of polynomials --------------------------------------------

    def poisson_bracket(self, F: GenPoly, G: GenPoly, reduce: bool = True) -> GenPoly:
        """Bilinear Leibniz extension of the generator bracket table."""
        out = GenPoly.zero(self.M)
        gens_F = F.generators_present()
        gens_G = G.generators_present()
        for g1 in gens_F:
            dF = F.diff(g1)
            if dF.is_zero():
                continue
            for g2 in gens_G:
                br = self.bracket_gen(g1, g2)
                if br.is_zero():
                    continue
                dG = G.diff(g2)
                if dG.is_zero():
                    continue
                out = out + dF * dG * br
        return self.reduce(out) if reduce else out

    # -- canonical form -----------------------------------------------------

    def _pair_rewrite(self, ga, gb):
        """Monomial for A_ga * A_gb given by the constraint relation."""
        a_pair = pair_of(ga)
        b_pair = pair_of(gb)
        mu, m = expand_in_minimal(pair_add(a_pair, b_pair), self.basis)
        return mu, m

    def reduce(self, poly: GenPoly) -> GenPoly:
        """Rewrite lattice-generator pairs through the constraint relations.

        Applied wherever it strictly decreases the total pair weight of the
        lattice part, or keeps it equal while producing a lexicographically
        smaller factor multiset; this terminates and gives a canonical-ish
        form (no confluence claim; equality checks fall back to sampling).
        """
        out = GenPoly.zero(poly.M)
        for (prims, lats), coef in poly.terms.items():
            out = out + self._reduce_monomial(prims, lats, coef)
        return out

    def _lat_weight(self, multiset):
        return sum(sum(abs(x) for x in g) for g in multiset)

    def _reduce_monomial(self, prims, lats, coef) -> GenPoly:
        prims = list(prims)
        multiset = []
        for g, e in lats:
            multiset.extend([g] * e)
        multiset.sort()
        changed = True
        while changed and len(multiset) >= 2:
            changed = False
            for i, j in itertools.combinations(range(len(multiset)), 2):
                ga, gb = multiset[i], multiset[j]
                mu, m = self._pair_rewrite(ga, gb)
                new_part = []
                for g, e in mu.items():
                    new_part.extend([g] * e)
                candidate = [g for k, g in enumerate(multiset) if k not in (i, j)]
                candidate.extend(new_part)
                candidate.sort()
                old_w = self._lat_weight(multiset)
                new_w = self._lat_weight(candidate)
                if new_w < old_w or (new_w == old_w and candidate < multiset):
                    multiset = candidate
                    prims = [p + add for p, add in zip(prims, m)]
                    changed = True
                    break
        ld = {}
        for g in multiset:
            ld[g] = ld.get(g, 0) + 1
        return GenPoly.monomial(len(prims), tuple(prims), tuple(sorted(ld.items())), coef)

    # -- numerics -----------------------------------------------------------

    def realize(self, z) -> dict:
        """Generator values at a phase point ``z in C^M``."""
        z = np.asarray(z, dtype=complex)
        values = {}
        for l in range(self.M):
            values[prim_id(l)] = (z[l] * np.conj(z[l])).real + 0j
        for g in self.basis.gammas:
            gp, gm = pair_of(g)
            v = 1 + 0j
            for l in range(self.M):
                v *= z[l] ** gp[l] * np.conj(z[l]) ** gm[l]
            values[lat_id(g)] = v
        return values

    def constraint_residuals(self, values: dict):
        return [abs(c.evaluate(values)) for c in self.constraints]

    def casimir_values(self, values: dict):
        return [c.evaluate(values) for c in self.casimirs]


def build_classical_algebra(n: PrimeSystem) -> PoissonStructure:
    """Assemble the bracket table, constraints and Casimirs for ``n``.

    The lattice-lattice brackets carry the anomaly monomial in the primitive
    generators and the minimal expansion of the clean sum; primitive
    generators commute and weight the lattice generators by their exponents.
    The weighted action sum is recorded as a Casimir always; for two modes
    the quadratic constraint Casimir is added as well.
    """
    basis = enumerate_minimal_elements(n)
    M = n.length
    table = {}
    ids_p = [prim_id(l) for l in range(M)]
    ids_l = [lat_id(g) for g in basis.gammas]

    for a, b in itertools.combinations(range(M), 2):
        table[(ids_p[a], ids_p[b])] = GenPoly.zero(M)

    for g in basis.gammas:
        for j in range(M):
            # {A_gamma, P_j} = i * gamma_j * A_gamma
            table[(lat_id(g), prim_id(j))] = GenPoly.generator(
                M, lat_id(g), I * g[j]
            )

    for gi, gj in itertools.combinations_with_replacement(basis.gammas, 2):
        if lat_id(gi) == lat_id(gj):
            # antisymmetry: zero on the diagonal
            continue
        br = lattice_bracket(gi, gj)
        if not any(br):
            table[(lat_id(gi), lat_id(gj))] = GenPoly.zero(M)
            continue
        an = anomaly(gi, gj)
        sum_vec = tuple(a + b for a, b in zip(gi, gj))
        mu, m_clean = expand_in_minimal(pair_of(sum_vec), basis)
        prim_total = tuple(a + b for a, b in zip(an, m_clean))
        poly = GenPoly.zero(M)
        lats = tuple(sorted((g, e) for g, e in mu.items()))
        for l in range(M):
            if br[l] == 0:
                continue
            prims = tuple(
                p - 1 if j == l else p for j, p in enumerate(prim_total)
            )
            assert prims[l] >= 0
            poly = poly + GenPoly.monomial(M, prims, lats, I * br[l])
        table[(lat_id(gi), lat_id(gj))] = poly

    # constraints: A_a A_b - primitive^anomaly * expansion monomial
    constraints = []
    for gi, gj in itertools.combinations_with_replacement(basis.gammas, 2):
        an = anomaly(gi, gj)
        sum_vec = tuple(a + b for a, b in zip(gi, gj))
        mu, m_clean = expand_in_minimal(pair_of(sum_vec), basis)
        prim_total = tuple(a + b for a, b in zip(an, m_clean))
        lhs = GenPoly.generator(M, lat_id(gi)) * GenPoly.generator(M, lat_id(gj))
        rhs = GenPoly.monomial(
            M, prim_total, tuple(sorted(mu.items())), 1
        )
        c = lhs - rhs
        if not c.is_zero():
            constraints.append(c)

    # Casimirs: weighted action sum always; the quadratic one for two modes
    casimirs = []
    c0 = GenPoly.zero(M)
    for l in range(M):
        c0 = c0 + GenPoly.generator(M, prim_id(l), n.n[l])
    casimirs.append(c0)
    if M == 2 and basis.gammas:
        alpha = max(basis.gammas)  # (n2, -n1)
        c1 = GenPoly.generator(M, lat_id(alpha)) * GenPoly.generator(
            M, lat_id(tuple(-x for x in alpha))
        ) - GenPoly.monomial(M, (n.n[1], n.n[0]), (), 1)
        casimirs.append(c1)

    return PoissonStructure(n, basis, table, constraints, casimirs)


# ---------------------------------------------------------------------------
# verification helpers
# ---------------------------------------------------------------------------

def realize_on_phase_space(structure: PoissonStructure, z, check_tol=1e-12):
    """Generator values at ``z``; asserts the constraints hold there."""
    values = structure.realize(z)
    scale = max(1.0, max(abs(v) for v in values.values()) ** 2)
    for r in structure.constraint_residuals(values):
        if r > check_tol * scale:
            raise AssertionError(f"constraint residual {r} at z={z}")
    return values


def canonical_phase_bracket(structure: PoissonStructure, gid1, gid2, z) -> complex:
    """Bracket of realized generator monomials, by analytic differentiation.

    Independent evaluation route: the realized generators are monomials in
    ``(z, zbar)`` and the bracket used throughout equals
    ``sum_l i (dF/dz_l dG/dzbar_l - dF/dzbar_l dG/dz_l)``.
    """
    z = np.asarray(z, dtype=complex)
    M = structure.M

    def exponents(gid):
        kind, payload = gid
        if kind == "P":
            e = [0] * M
            e[payload] = 1
            return tuple(e), tuple(e)
        return pair_of(payload)

    (ap, am), (bp, bm) = exponents(gid1), exponents(gid2)

    def mono(z, plus, minus):
        v = 1 + 0j
        for l in range(M):
            v *= z[l] ** plus[l] * np.conj(z[l]) ** minus[l]
        return v

    total = 0j
    for l in range(M):
        # d/dz_l and d/dzbar_l of the two monomials, exponents shifted down
        dF_z = ap[l] * mono(z, tuple(p - (1 if i == l else 0) for i, p in enumerate(ap)), am) if ap[l] else 0j
        dF_zb = am[l] * mono(z, ap, tuple(p - (1 if i == l else 0) for i, p in enumerate(am))) if am[l] else 0j
        dG_z = bp[l] * mono(z, tuple(p - (1 if i == l else 0) for i, p in enumerate(bp)), bm) if bp[l] else 0j
        dG_zb = bm[l] * mono(z, bp, tuple(p - (1 if i == l else 0) for i, p in enumerate(bm))) if bm[l] else 0j
        total += 1j * (dF_z * dG_zb - dF_zb * dG_z)
    return total


def jacobi_residual_polynomials(structure: PoissonStructure):
    """Cyclic double-bracket polynomial for every generator triple."""
    ids = structure.generator_ids()
    polys = []
    for u, v, w in itertools.combinations(ids, 3):
        res = GenPoly.zero(structure.M)
        for a, b, c in ((u, v, w), (v, w, u), (w, u, v)):
            inner = structure.bracket_gen(a, b)
            res = res + structure.poisson_bracket(
                inner, GenPoly.generator(structure.M, c), reduce=False
            )
        polys.append(((u, v, w), res))
    return polys


def verify_jacobi(structure: PoissonStructure, sample_count: int, seed: int = 0,
                  on_surface: bool = True, scale_rel: bool = True) -> float:
    """Max cyclic Jacobi residual of the bracket table at random points.

    Points are generated on the constraint surface through the phase-space
    realization (or as free generator values when ``on_surface`` is False).
    The residual is normalized by the cubed point scale when ``scale_rel``.
    The triple residual polynomials are assembled once and then evaluated,
    so large sample counts stay cheap.
    """
    rng = np.random.default_rng(seed)
    ids = structure.generator_ids()
    polys = [p for _, p in jacobi_residual_polynomials(structure) if not p.is_zero()]
    worst = 0.0
    for _ in range(sample_count):
        if on_surface:
            z = rng.normal(size=structure.M) + 1j * rng.normal(size=structure.M)
            values = structure.realize(z)
        else:
            values = {}
            for gid in ids:
                if gid[0] == "P":
                    values[gid] = rng.normal() + 0j
            half = [g for g in structure.basis.gammas if g > tuple(-x for x in g)]
            for g in half:
                v = rng.normal() + 1j * rng.normal()
                values[lat_id(g)] = v
                values[lat_id(tuple(-x for x in g))] = np.conj(v)
        norm = max(1.0, max(abs(v) for v in values.values()))
        for poly in polys:
            r = abs(poly.evaluate(values)) / (norm ** 3 if scale_rel else 1.0)
            worst = max(worst, r)
    return worst


# ---------------------------------------------------------------------------
# two-frequency configuration charts and triple brackets
# ---------------------------------------------------------------------------

class TwoFreqChart:
    """Real chart (X, Y, Z, W) of a two-frequency resonance algebra.

    X, Y are the primitive actions; Z and W are ``scale`` times the real and
    imaginary parts of the lattice generator.  ``scale = 1`` matches the 1:1
    configuration-average chart and ``scale = 1/sqrt2`` the 1:2 one, where
    Z is the average of the cubic coordinate monomial.
    """

    NAMES = ("X", "Y", "Z", "W")

    def __init__(self, structure: PoissonStructure, scale=None):
        if structure.M != 2 or len(structure.basis.gammas) != 2:
            raise ValueError("chart requires a two-frequency resonance algebra")
        self.structure = structure
        self.alpha = max(structure.basis.gammas)
        n = structure.n.n
        if scale is None:
            scale = ONE if n == (1, 1) else INV_SQRT2
        self.scale = Exact.of(scale)

    def l0_polys(self) -> dict:
        M = 2
        s = self.scale
        a, ma = self.alpha, tuple(-x for x in self.alpha)
        half = Exact(Fraction(1, 2))
        return {
            "X": GenPoly.generator(M, prim_id(0)),
            "Y": GenPoly.generator(M, prim_id(1)),
            "Z": GenPoly.generator(M, lat_id(a), s * half)
                 + GenPoly.generator(M, lat_id(ma), s * half),
        }

    def w_poly(self) -> GenPoly:
        s = self.scale
        a, ma = self.alpha, tuple(-x for x in self.alpha)
        half_over_i = Exact(0, 0, Fraction(-1, 2), 0)  # 1/(2i)
        return GenPoly.generator(2, lat_id(a), s * half_over_i) + GenPoly.generator(
            2, lat_id(ma), -(s * half_over_i)
        )

    def to_xyzw(self, poly: GenPoly) -> dict:
        """Express a generator polynomial as a polynomial in X, Y, Z, W.

        Lattice generators are split into real and imaginary parts; even
        powers of the imaginary part are eliminated through the constraint,
        so the result has W-degree at most one in each monomial.  Keys are
        exponent tuples over (X, Y, Z, W), values are ``Exact``.
        """
        n = self.structure.n.n
        s = self.scale
        a = self.alpha
        out = {}

        def add(key, coef):
            cur = out.get(key, ZERO) + coef
            if cur.is_zero():
                out.pop(key, None)
            else:
                out[key] = cur

        inv_s = s.inverse()
        for (prims, lats), coef in poly.terms.items():
            # expand lattice factors in u = (A+Abar)/2, v = (A-Abar)/(2i)
            e_plus = 0
            e_minus = 0
            for g, e in lats:
                if g == a:
                    e_plus = e
                else:
                    e_minus = e
            # A^p Abar^m = (u+iv)^p (u-iv)^m ; collect u^j v^k
            uv = {(0, 0): coef}
            for _ in range(e_plus):
                uv = _uv_mul(uv, {(1, 0): ONE, (0, 1): I})
            for _ in range(e_minus):
                uv = _uv_mul(uv, {(1, 0): ONE, (0, 1): -I})
            # reduce v^2 -> X^n2 Y^n1 - u^2, as enforced by the constraint
            reduced = {}
            for (ju, jv), c in uv.items():
                px, py = prims
                terms = [((ju, jv % 2, px, py), c)]
                for _ in range(jv // 2):
                    nxt = []
                    for (u_, v_, x_, y_), cc in terms:
                        nxt.append(((u_, v_, x_ + n[1], y_ + n[0]), cc))
                        nxt.append(((u_ + 2, v_, x_, y_), -cc))
                    terms = nxt
                for (u_, v_, x_, y_), cc in terms:
                    key = (u_, v_, x_, y_)
                    reduced[key] = reduced.get(key, ZERO) + cc
            # substitute u = Z/s, v = W/s
            for (u_, v_, x_, y_), cc in reduced.items():
                factor = cc
                for _ in range(u_ + v_):
                    factor = factor * inv_s
                add((x_, y_, u_, v_), factor)
        return out


def _uv_mul(d1, d2):
    out = {}
    for (a1, b1), c1 in d1.items():
        for (a2, b2), c2 in d2.items():
            key = (a1 + a2, b1 + b2)
            cur = out.get(key, ZERO) + c1 * c2
            if cur.is_zero():
                out.pop(key, None)
            else:
                out[key] = cur
    return out


class ClosureError(ValueError):
    """The proposed splitting is not closed under the bracket."""


def triple_bracket(structure: PoissonStructure, scale=None) -> dict:
    """Triple brackets over configuration space for a two-frequency algebra.

    Checks the closure condition bracket(L0, L1) inside the L0 polynomial
    algebra (diagnosing the offending pair on failure), then returns the
    table of double brackets of all ordered pairs from (X, Y, Z) against all
    of (X, Y, Z), as polynomials over (X, Y, Z) exponent keys.
    """
    chart = TwoFreqChart(structure, scale)
    l0 = chart.l0_polys()
    w = chart.w_poly()

    for name, poly in l0.items():
        br = structure.poisson_bracket(poly, w, reduce=False)
        expressed = chart.to_xyzw(br)
        bad = {k: v for k, v in expressed.items() if k[3] != 0}
        if bad:
            raise ClosureError(f"bracket of {name} with W leaves the L0 algebra: {bad}")

    table = {}
    names = ("X", "Y", "Z")
    for f, g in itertools.product(names, repeat=2):
        inner = structure.poisson_bracket(l0[f], l0[g], reduce=False)
        for e in names:
            outer = structure.poisson_bracket(inner, l0[e], reduce=False)
            expressed = chart.to_xyzw(outer)
            bad = {k: v for k, v in expressed.items() if k[3] != 0}
            if bad:
                raise ClosureError(
                    f"triple bracket {{{{{f},{g}}},{e}}} leaves the L0 algebra"
                )
            table[(f, g, e)] = {k[:3]: v for k, v in expressed.items()}
    return table

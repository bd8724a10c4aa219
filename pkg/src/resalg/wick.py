"""Normal-ordered (Wick) polynomial algebra in ladder symbols.

A monomial is ``(k_plus, k_minus)``: annihilators to the power ``k_plus`` on
the right, creators to ``k_minus`` on the left.  Coefficients are Laurent
polynomials in the Planck parameter (:class:`~resalg.numbers.HPoly`), so all
products, commutators and homological solutions stay exact.

Two ladder conventions coexist and must never be mixed:

* ``"sqrt2"``  -- annihilator (q + h d/dq)/sqrt2, commutator h;
* ``"part1"``  -- annihilator q + h d/dq, commutator 2h.

The convention only changes the contraction weight per mode; every operator
carries its tag and mixing tags raises.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb, factorial

from .numbers import Exact, HPoly, I, ZERO

CONTRACTION_WEIGHT = {"sqrt2": 1, "part1": 2}


class ConventionError(TypeError):
    """Operands carry different ladder conventions."""


class WickPolynomial:
    """Finitely supported normal-ordered polynomial in M ladder pairs."""

    __slots__ = ("M", "convention", "terms")

    def __init__(self, M: int, convention: str = "sqrt2", terms=None):
        if convention not in CONTRACTION_WEIGHT:
            raise ConventionError(f"unknown convention {convention!r}")
        self.M = M
        self.convention = convention
        self.terms = {}
        if terms:
            for key, coef in terms.items():
                coef = coef if isinstance(coef, HPoly) else HPoly.const(coef)
                if not coef.is_zero():
                    kp, km = key
                    self.terms[(tuple(kp), tuple(km))] = coef

    # -- constructors --------------------------------------------------------

    @staticmethod
    def zero(M, convention="sqrt2"):
        return WickPolynomial(M, convention)

    @staticmethod
    def monomial(kp, km, coef=1, convention="sqrt2"):
        kp, km = tuple(kp), tuple(km)
        return WickPolynomial(len(kp), convention, {(kp, km): coef})

    @staticmethod
    def annihilator(l, M, convention="sqrt2"):
        kp = tuple(1 if j == l else 0 for j in range(M))
        return WickPolynomial.monomial(kp, (0,) * M, 1, convention)

    @staticmethod
    def creator(l, M, convention="sqrt2"):
        km = tuple(1 if j == l else 0 for j in range(M))
        return WickPolynomial.monomial((0,) * M, km, 1, convention)

    @staticmethod
    def number_op(l, M, convention="sqrt2"):
        e = tuple(1 if j == l else 0 for j in range(M))
        return WickPolynomial.monomial(e, e, 1, convention)

    @staticmethod
    def oscillator(freqs, convention="sqrt2"):
        """Weighted sum of number operators for rational frequencies."""
        M = len(freqs)
        out = WickPolynomial.zero(M, convention)
        for l, w in enumerate(freqs):
            out = out + WickPolynomial.number_op(l, M, convention).scale(Fraction(w))
        return out

    @staticmethod
    def position(l, M, convention="sqrt2"):
        """The coordinate symbol of mode l in the given convention."""
        c = {"sqrt2": Exact(0, Fraction(1, 2)), "part1": Exact(Fraction(1, 2))}[
            WickPolynomial._chk(convention)
        ]
        # sqrt2: q = (z + z*)/sqrt2 ; part1: q = (eta + eta*)/2
        return (
            WickPolynomial.annihilator(l, M, convention)
            + WickPolynomial.creator(l, M, convention)
        ).scale(c)

    @staticmethod
    def momentum(l, M, convention="sqrt2"):
        c = {"sqrt2": Exact(0, 0, 0, Fraction(-1, 2)), "part1": Exact(0, 0, Fraction(-1, 2))}[
            WickPolynomial._chk(convention)
        ]
        # sqrt2: p = -i (z - z*)/sqrt2 ; part1: p = -i (eta - eta*)/2
        return (
            WickPolynomial.annihilator(l, M, convention)
            - WickPolynomial.creator(l, M, convention)
        ).scale(c)

    @staticmethod
    def _chk(convention):
        if convention not in CONTRACTION_WEIGHT:
            raise ConventionError(f"unknown convention {convention!r}")
        return convention

    # -- ring ops --------------------------------------------------------------

    def _compat(self, other):
        if not isinstance(other, WickPolynomial):
            raise TypeError("expected a WickPolynomial")
        if other.M != self.M:
            raise ValueError("mode counts differ")
        if other.convention != self.convention:
            raise ConventionError(
                f"cannot combine {self.convention!r} with {other.convention!r}"
            )
        return other

    def __add__(self, other):
        o = self._compat(other)
        out = dict(self.terms)
        for key, c in o.terms.items():
            s = out.get(key)
            s = c if s is None else s + c
            if s.is_zero():
                out.pop(key, None)
            else:
                out[key] = s
        r = WickPolynomial(self.M, self.convention)
        r.terms = out
        return r

    def __neg__(self):
        r = WickPolynomial(self.M, self.convention)
        r.terms = {k: -c for k, c in self.terms.items()}
        return r

    def __sub__(self, other):
        return self + (-self._compat(other))

    def scale(self, c) -> "WickPolynomial":
        c = c if isinstance(c, HPoly) else HPoly.const(c)
        r = WickPolynomial(self.M, self.convention)
        if not c.is_zero():
            r.terms = {k: cf * c for k, cf in self.terms.items()}
        return r

    def __mul__(self, other):
        """Associative product, re-normal-ordered by mode-wise contractions."""
        o = self._compat(other)
        w = CONTRACTION_WEIGHT[self.convention]
        out = {}
        for (kp, km), c1 in self.terms.items():
            for (rp, rm), c2 in o.terms.items():
                base = c1 * c2
                # reorder z^{kp} z*^{rm}: sum over contraction multi-indices
                caps = [min(a, b) for a, b in zip(kp, rm)]
                for j in _multirange(caps):
                    fac = 1
                    for a, b, jj in zip(kp, rm, j):
                        fac *= factorial(jj) * comb(a, jj) * comb(b, jj) * (w ** jj)
                    coef = base * HPoly.hbar(sum(j), fac)
                    key = (
                        tuple(a + b - jj for a, b, jj in zip(kp, rp, j)),
                        tuple(a + b - jj for a, b, jj in zip(km, rm, j)),
                    )
                    s = out.get(key)
                    s = coef if s is None else s + coef
                    if s.is_zero():
                        out.pop(key, None)
                    else:
                        out[key] = s
        r = WickPolynomial(self.M, self.convention)
        r.terms = out
        return r

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        out = WickPolynomial.monomial((0,) * self.M, (0,) * self.M, 1, self.convention)
        for _ in range(n):
            out = out * self
        return out

    def commutator(self, other) -> "WickPolynomial":
        return self * other - self._compat(other) * self

    def dagger(self) -> "WickPolynomial":
        """Adjoint: swap creation/annihilation exponents, conjugate scalars."""
        r = WickPolynomial(self.M, self.convention)
        r.terms = {(km, kp): c.conjugate() for (kp, km), c in self.terms.items()}
        return r

    # -- structure -------------------------------------------------------------

    def project(self, freqs) -> "WickPolynomial":
        """Keep the monomials commuting with the oscillator of ``freqs``.

        ``freqs`` may be a tuple of rationals or a
        :class:`~resalg.lattice.FrequencySystem`; the resonance test is exact.
        """
        r = WickPolynomial(self.M, self.convention)
        r.terms = {
            k: c for k, c in self.terms.items() if _freq_dot(freqs, k) == _zero_dot(freqs)
        }
        return r

    def degree(self) -> int:
        return max((sum(kp) + sum(km) for kp, km in self.terms), default=0)

    def symbol(self) -> dict:
        """Classical symbol: monomial dict with the h^0 coefficient part.

        Raises if any coefficient still carries a negative power of h.
        """
        out = {}
        for key, c in self.terms.items():
            if any(p < 0 for p in c.terms):
                raise ValueError("Laurent coefficient has no classical limit")
            v = c.coefficient(0)
            if not v.is_zero():
                out[key] = v
        return out

    def coefficients_at(self, hbar: Fraction) -> dict:
        """Evaluate all coefficients exactly at a rational Planck value."""
        hbar = Fraction(hbar)
        out = {}
        for key, c in self.terms.items():
            total = ZERO
            for p, e in c.terms.items():
                total = total + e * Exact.of(hbar**p)
            if not total.is_zero():
                out[key] = total
        return out

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, WickPolynomial):
            return NotImplemented
        return (
            self.M == other.M
            and self.convention == other.convention
            and self.terms == other.terms
        )

    def __repr__(self):
        if not self.terms:
            return "Wick(0)"
        bits = []
        for (kp, km), c in sorted(self.terms.items()):
            bits.append(f"c*{km}|{kp} with c={c!r}")
        return "Wick[" + "; ".join(bits) + "]"


def _multirange(caps):
    if not caps:
        yield ()
        return
    head, *rest = caps
    for j in range(head + 1):
        for tail in _multirange(rest):
            yield (j,) + tail


def _freq_dot(freqs, key):
    kp, km = key
    from .lattice import FrequencySystem

    if isinstance(freqs, FrequencySystem):
        acc = {}
        for (v, u), a, b in zip(freqs.entries, kp, km):
            acc[u] = acc.get(u, Fraction(0)) + v * (a - b)
        return tuple(sorted((u, v) for u, v in acc.items() if v != 0))
    return sum(Fraction(w) * (a - b) for w, a, b in zip(freqs, kp, km))


def _zero_dot(freqs):
    from .lattice import FrequencySystem

    if isinstance(freqs, FrequencySystem):
        return ()
    return Fraction(0)


def wick_from_q_polynomial(qpoly: dict, M: int, convention: str = "sqrt2") -> WickPolynomial:
    """Quantize a polynomial in the coordinates, normal ordering the result.

    ``qpoly`` maps exponent tuples over (q_1 .. q_M) to scalars.  Coordinates
    commute, so the plain product of position polynomials is well defined.
    """
    out = WickPolynomial.zero(M, convention)
    for exps, coef in qpoly.items():
        term = WickPolynomial.monomial((0,) * M, (0,) * M, 1, convention)
        for l, e in enumerate(exps):
            for _ in range(int(e)):
                term = term * WickPolynomial.position(l, M, convention)
        out = out + term.scale(Exact.of(coef))
    return out


# ---------------------------------------------------------------------------
# classical (commutative) symbol algebra, used by the averaging oracles
# ---------------------------------------------------------------------------

def cl_mul(F: dict, G: dict) -> dict:
    out = {}
    for (kp, km), c1 in F.items():
        for (rp, rm), c2 in G.items():
            key = (
                tuple(a + b for a, b in zip(kp, rp)),
                tuple(a + b for a, b in zip(km, rm)),
            )
            s = out.get(key, ZERO) + c1 * c2
            if s.is_zero():
                out.pop(key, None)
            else:
                out[key] = s
    return out


def cl_bracket(F: dict, G: dict) -> dict:
    """Canonical bracket of classical symbols: i sum_l [k,r]_l g_{k+r-I_l}."""
    out = {}
    for (kp, km), c1 in F.items():
        for (rp, rm), c2 in G.items():
            for l in range(len(kp)):
                br = kp[l] * rm[l] - km[l] * rp[l]
                if br == 0:
                    continue
                key = (
                    tuple(a + b - (1 if j == l else 0) for j, (a, b) in enumerate(zip(kp, rp))),
                    tuple(a + b - (1 if j == l else 0) for j, (a, b) in enumerate(zip(km, rm))),
                )
                s = out.get(key, ZERO) + c1 * c2 * I * br
                if s.is_zero():
                    out.pop(key, None)
                else:
                    out[key] = s
    return out


def cl_project(F: dict, freqs) -> dict:
    return {k: c for k, c in F.items() if _freq_dot(freqs, k) == _zero_dot(freqs)}


def cl_evaluate(F: dict, z) -> complex:
    import numpy as np

    z = np.asarray(z, dtype=complex)
    total = 0j
    for (kp, km), c in F.items():
        v = complex(c)
        for l, (a, b) in enumerate(zip(kp, km)):
            v *= z[l] ** a * np.conj(z[l]) ** b
        total += v
    return total

"""Integer combinatorics of oscillator resonances.

A frequency system is a list of nonzero rationals, each tagged by a symbolic
unit; distinct units are incommensurable by fiat.  The module decomposes such
a system into commensurable components, enumerates the minimal solutions of
the resonance equation ``n . alpha = 0`` over a finite box, and provides the
lattice bracket / anomaly operations that drive every Poisson structure built
downstream.

Solutions of the resonance equation are handled in two equivalent encodings:

* *pair form* ``(k_plus, k_minus)`` with nonnegative integer tuples, the
  exponents of annihilation and creation symbols;
* *clean form* ``alpha in Z^M`` for solutions with componentwise
  ``k_plus * k_minus = 0`` (positive and negative parts recover the pair).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Sequence


class ResonanceError(ValueError):
    """Structurally invalid input for a lattice operation."""


# ---------------------------------------------------------------------------
# frequency systems and their decomposition
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FrequencySystem:
    """Nonzero rational frequencies times incommensurable symbolic units.

    Parameters
    ----------
    entries : tuple of (Fraction, str)
        Frequency values with their unit tag.  Two entries with the same
        tag are commensurable; entries with distinct tags never are.
    """

    entries: tuple

    def __post_init__(self):
        norm = tuple((Fraction(v), str(u)) for v, u in self.entries)
        for v, _ in norm:
            if v == 0:
                raise ResonanceError("zero frequency is not allowed")
        object.__setattr__(self, "entries", norm)

    @property
    def length(self) -> int:
        return len(self.entries)

    def values(self):
        return tuple(v for v, _ in self.entries)

    def units(self):
        return tuple(u for _, u in self.entries)


@dataclass(frozen=True)
class PrimeSystem:
    """Coprime positive integer frequencies (one commensurable component)."""

    n: tuple

    def __post_init__(self):
        n = tuple(int(v) for v in self.n)
        if not n:
            raise ResonanceError("empty prime system")
        if any(v < 1 for v in n):
            raise ResonanceError(f"prime system must be positive: {n}")
        g = 0
        for v in n:
            g = gcd(g, v)
        if g != 1:
            raise ResonanceError(f"entries of {n} are not coprime")
        object.__setattr__(self, "n", n)

    @property
    def length(self) -> int:
        return len(self.n)

    @property
    def total(self) -> int:
        return sum(self.n)

    def dot(self, alpha: Sequence[int]) -> int:
        return sum(nl * al for nl, al in zip(self.n, alpha))


@dataclass(frozen=True)
class FrequencyComponent:
    """One commensurable component: characteristic * prime system on indices."""

    characteristic: Fraction
    unit: str
    n: tuple            # coprime integers, first entry positive
    indices: tuple      # positions inside the parent system

    def as_prime_system(self) -> PrimeSystem:
        if any(v < 0 for v in self.n):
            raise ResonanceError(
                f"component {self.n} mixes signs; fold signs into the "
                "lattice before building an algebra"
            )
        return PrimeSystem(self.n)


def decompose_frequency_system(fs: FrequencySystem) -> list:
    """Split a frequency system into its commensurable components.

    Entries sharing a unit tag have rational ratios, hence land in one
    component; the component is written ``characteristic * n`` with ``n``
    integer, coprime, and sign-normalized so its first entry is positive.
    The union of the returned index sets is everything, disjointly, and the
    system is resonant iff some component has length > 1.

    Returns
    -------
    list of FrequencyComponent
        Ordered by first appearance of the unit tag.
    """
    groups: dict = {}
    for idx, (val, unit) in enumerate(fs.entries):
        groups.setdefault(unit, []).append((idx, val))

    comps = []
    for unit, members in groups.items():
        idxs = tuple(i for i, _ in members)
        vals = [v for _, v in members]
        # characteristic = content of the rational tuple: gcd of numerators
        # over lcm of denominators, signed so the first integer is positive
        num_gcd = 0
        den_lcm = 1
        for v in vals:
            num_gcd = gcd(num_gcd, abs(v.numerator))
            den_lcm = den_lcm * v.denominator // gcd(den_lcm, v.denominator)
        char = Fraction(num_gcd, den_lcm)
        ints = [v / char for v in vals]
        assert all(x.denominator == 1 for x in ints)
        n = [int(x) for x in ints]
        if n[0] < 0:
            n = [-v for v in n]
            char = -char
        comps.append(FrequencyComponent(char, unit, tuple(n), idxs))
    return comps


def is_resonant(fs: FrequencySystem) -> bool:
    return any(len(c.indices) > 1 for c in decompose_frequency_system(fs))


# ---------------------------------------------------------------------------
# pair form / clean form conversions
# ---------------------------------------------------------------------------

def positive_part(alpha: Sequence[int]) -> tuple:
    return tuple(max(a, 0) for a in alpha)


def negative_part(alpha: Sequence[int]) -> tuple:
    return tuple(max(-a, 0) for a in alpha)


def pair_of(alpha: Sequence[int]) -> tuple:
    """Clean vector -> pair form (positive parts, negative parts)."""
    return positive_part(alpha), negative_part(alpha)


def vector_of(pair) -> tuple:
    kp, km = pair
    return tuple(p - m for p, m in zip(kp, km))


def is_clean(pair) -> bool:
    kp, km = pair
    return all(p * m == 0 for p, m in zip(kp, km))


def pair_add(k, r) -> tuple:
    return (
        tuple(a + b for a, b in zip(k[0], r[0])),
        tuple(a + b for a, b in zip(k[1], r[1])),
    )


def primitive_pair(l: int, m: int) -> tuple:
    e = tuple(1 if j == l else 0 for j in range(m))
    return (e, e)


# ---------------------------------------------------------------------------
# lattice bracket and anomaly
# ---------------------------------------------------------------------------

def lattice_bracket(alpha: Sequence[int], beta: Sequence[int]) -> tuple:
    """Componentwise ``alpha_+ beta_- - alpha_- beta_+`` on Z^M.

    Antisymmetric; additivity holds only up to the :func:`anomaly` term.
    """
    ap, am = pair_of(alpha)
    bp, bm = pair_of(beta)
    return tuple(p * q - m * r for p, q, m, r in zip(ap, bm, am, bp))


def pair_bracket(k, r) -> tuple:
    """Bracket in pair form, ``k_+ r_- - k_- r_+`` componentwise."""
    return tuple(a * d - b * c for a, b, c, d in zip(k[0], k[1], r[0], r[1]))


def anomaly(alpha: Sequence[int], beta: Sequence[int]) -> tuple:
    """min(alpha_+ + beta_+, alpha_- + beta_-), the additivity defect.

    Equals the primitive content of the pair sum of two clean vectors:
    ``alpha_+ + beta_+ - (alpha+beta)_+`` componentwise.
    """
    ap, am = pair_of(alpha)
    bp, bm = pair_of(beta)
    return tuple(min(p + q, m + s) for p, q, m, s in zip(ap, bp, am, bm))


# ---------------------------------------------------------------------------
# minimal elements
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MinimalBasis:
    """Minimal solutions of ``n . alpha = 0``: clean set plus primitives.

    ``gammas`` is closed under negation and contains no element that is a
    pair-form sum of two nonzero solutions.  ``primitives`` are the diagonal
    pair elements, one per mode, stored as unit vectors for bookkeeping.
    """

    n: PrimeSystem
    gammas: tuple
    primitives: tuple = field(init=False)

    def __post_init__(self):
        m = self.n.length
        prim = tuple(tuple(1 if j == l else 0 for j in range(m)) for l in range(m))
        object.__setattr__(self, "primitives", prim)
        object.__setattr__(self, "gammas", tuple(sorted(self.gammas)))

    @property
    def box_bound(self) -> int:
        return self.n.total

    def __iter__(self):
        return iter(self.gammas)

    def __len__(self):
        return len(self.gammas)


def _sign_compatible_subvectors(alpha):
    """Nonzero proper subvectors beta with matching signs, |beta| <= |alpha|."""
    ranges = []
    for a in alpha:
        if a >= 0:
            ranges.append(range(0, a + 1))
        else:
            ranges.append(range(a, 1))
    for beta in itertools.product(*ranges):
        if any(beta) and beta != alpha:
            yield beta


def is_minimal_clean(n: PrimeSystem, alpha: Sequence[int]) -> bool:
    """True iff the clean solution is not a pair-form sum of two nonzero ones.

    For a clean element every pair-form decomposition is sign compatible, so
    the check reduces to sub-vectors with matching signs.
    """
    alpha = tuple(alpha)
    if n.dot(alpha) != 0 or not any(alpha):
        return False
    for beta in _sign_compatible_subvectors(alpha):
        if n.dot(beta) == 0:
            return False
    return True


def enumerate_minimal_elements(n: PrimeSystem) -> MinimalBasis:
    """Exhaust the box ``|alpha_l| <= sum(n)`` for minimal clean solutions.

    The bound is the proven cap on components of minimal elements, so the
    search is complete.  Minimality is the pair-form condition (not a sum of
    two nonzero solutions); the result is closed under negation.
    """
    m = n.length
    bound = n.total
    found = []
    for alpha in itertools.product(range(-bound, bound + 1), repeat=m):
        if not any(alpha):
            continue
        if n.dot(alpha) != 0:
            continue
        if is_minimal_clean(n, alpha):
            found.append(alpha)
    basis = MinimalBasis(n, tuple(found))
    assert len(basis.gammas) <= 2 * m * bound
    return basis


def brute_force_solutions(n: PrimeSystem, bound: int | None = None):
    """All pair-form solutions of the resonance equation in the given box.

    Test oracle: enumerates every ``(k_plus, k_minus)`` with entries up to
    ``bound`` (default: sum(n)) satisfying ``n.k_plus == n.k_minus``,
    excluding zero.
    """
    if bound is None:
        bound = n.total
    m = n.length
    by_weight: dict = {}
    for k in itertools.product(range(bound + 1), repeat=m):
        by_weight.setdefault(n.dot(k), []).append(k)
    for w, plus_list in by_weight.items():
        minus_list = by_weight.get(w, [])
        for kp in plus_list:
            for km in minus_list:
                if any(kp) or any(km):
                    yield (kp, km)


def brute_force_minimal(n: PrimeSystem):
    """Oracle minimal set: box enumeration with literal sum-of-two filtering."""
    sols = set(brute_force_solutions(n))
    minimal = []
    for k in sols:
        kp, km = k
        decomposable = False
        for sp in itertools.product(*(range(a + 1) for a in kp)):
            if decomposable:
                break
            for sm in itertools.product(*(range(a + 1) for a in km)):
                first = (sp, sm)
                if not (any(sp) or any(sm)) or first == k:
                    continue
                rest = (
                    tuple(a - b for a, b in zip(kp, sp)),
                    tuple(a - b for a, b in zip(km, sm)),
                )
                if not (any(rest[0]) or any(rest[1])):
                    continue
                if n.dot(sp) == n.dot(sm):
                    decomposable = True
                    break
        if not decomposable:
            minimal.append(k)
    return set(minimal)


# ---------------------------------------------------------------------------
# expansion in minimal elements
# ---------------------------------------------------------------------------

def expand_in_minimal(k, basis: MinimalBasis):
    """Write a pair-form solution over the minimal set.

    Solves ``k = sum_gamma mu_gamma * gamma_pair + m * primitive_pairs`` with
    nonnegative integers, returning ``(mu, m)`` where ``mu`` maps clean
    minimal vectors to coefficients and ``m`` is the primitive exponent
    tuple.  Among all solutions the lexicographically smallest coefficient
    vector over the sorted ``gammas`` ordering is returned, which makes the
    expansion canonical; existence is guaranteed for genuine solutions.

    Raises
    ------
    ResonanceError
        If ``k`` does not solve the resonance equation or (impossibly, for
        valid input) no expansion exists inside the search bounds.
    """
    kp, km = tuple(k[0]), tuple(k[1])
    n = basis.n
    if any(v < 0 for v in kp + km):
        raise ResonanceError("pair form must be nonnegative")
    if n.dot(kp) != n.dot(km):
        raise ResonanceError(f"{k} does not solve the resonance equation")

    gammas = basis.gammas

    def search(idx, rem_plus, rem_minus):
        # remaining pair budget after the gammas chosen so far; whatever is
        # left at the end must be a common primitive exponent
        if idx == len(gammas):
            if rem_plus == rem_minus:
                return {}, rem_plus
            return None
        gamma = gammas[idx]
        gp = positive_part(gamma)
        gm = negative_part(gamma)
        caps = [r // g for r, g in zip(rem_plus, gp) if g > 0]
        caps += [r // g for r, g in zip(rem_minus, gm) if g > 0]
        cap = min(caps) if caps else 0
        for mu in range(cap + 1):
            got = search(
                idx + 1,
                tuple(r - mu * g for r, g in zip(rem_plus, gp)),
                tuple(r - mu * g for r, g in zip(rem_minus, gm)),
            )
            if got is not None:
                mu_map, m = got
                if mu:
                    mu_map = dict(mu_map)
                    mu_map[gamma] = mu
                return mu_map, m
        return None

    got = search(0, kp, km)
    if got is None:
        raise ResonanceError(f"no expansion of {k} over the minimal set")
    mu_map, m = got
    return mu_map, m


def clean_expansion(alpha_sum: Sequence[int], basis: MinimalBasis):
    """Expansion of a clean vector: ``expand_in_minimal`` of its pair form."""
    return expand_in_minimal(pair_of(alpha_sum), basis)

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from resalg.lattice import FrequencySystem
from resalg.numbers import Exact, HPoly
from resalg.wick import (
    ConventionError,
    WickPolynomial,
    cl_bracket,
    cl_mul,
    cl_project,
    wick_from_q_polynomial,
)


def test_defining_commutator():
    z = WickPolynomial.annihilator(0, 1)
    zs = WickPolynomial.creator(0, 1)
    comm = z * zs - zs * z
    assert comm == WickPolynomial.monomial((0,), (0,), HPoly.hbar(1), "sqrt2")


def test_defining_commutator_wide_convention():
    e = WickPolynomial.annihilator(0, 1, "part1")
    es = WickPolynomial.creator(0, 1, "part1")
    comm = e * es - es * e
    assert comm == WickPolynomial.monomial((0,), (0,), HPoly.hbar(1, 2), "part1")


def test_convention_mixing_is_hard_error():
    a = WickPolynomial.annihilator(0, 1, "sqrt2")
    b = WickPolynomial.annihilator(0, 1, "part1")
    with pytest.raises(ConventionError):
        a * b
    with pytest.raises(ConventionError):
        a + b


def test_oscillator_commutator_grades_monomials():
    # [H0, g_k] = hbar * (freq shift) * g_k, zero exactly on resonance
    H0 = WickPolynomial.oscillator((1, 2))
    for kp, km in [((2, 0), (0, 1)), ((1, 0), (0, 0)), ((0, 2), (4, 0)), ((1, 1), (1, 1))]:
        g = WickPolynomial.monomial(kp, km)
        comm = H0 * g - g * H0
        shift = (km[0] - kp[0]) * 1 + (km[1] - kp[1]) * 2
        assert comm == g.scale(HPoly.hbar(1, shift))


def test_product_associative_random():
    rng = np.random.default_rng(0)

    def rand_poly():
        p = WickPolynomial.zero(2)
        for _ in range(3):
            kp = tuple(int(x) for x in rng.integers(0, 3, size=2))
            km = tuple(int(x) for x in rng.integers(0, 3, size=2))
            p = p + WickPolynomial.monomial(kp, km, int(rng.integers(-3, 4)))
        return p

    for _ in range(8):
        a, b, c = rand_poly(), rand_poly(), rand_poly()
        assert (a * b) * c == a * (b * c)


def test_dagger_reverses_products():
    a = WickPolynomial.monomial((2, 0), (0, 1), Exact(0, 0, 1, 0))
    b = WickPolynomial.monomial((1, 1), (0, 0), 3)
    assert (a * b).dagger() == b.dagger() * a.dagger()
    assert a.dagger().dagger() == a


def test_classical_limit_of_commutator_is_bracket():
    rng = np.random.default_rng(4)
    for _ in range(10):
        kp = tuple(int(x) for x in rng.integers(0, 4, size=2))
        km = tuple(int(x) for x in rng.integers(0, 4, size=2))
        rp = tuple(int(x) for x in rng.integers(0, 4, size=2))
        rm = tuple(int(x) for x in rng.integers(0, 4, size=2))
        P = WickPolynomial.monomial(kp, km)
        Q = WickPolynomial.monomial(rp, rm)
        comm = P * Q - Q * P
        # divide by -i hbar: shift down one power, multiply by 1/(-i) = i
        shifted = {}
        for key, c in comm.terms.items():
            moved = HPoly()
            moved.terms = {pw - 1: cf * Exact(0, 0, 1, 0) for pw, cf in c.terms.items()}
            shifted[key] = moved
        classical_part = {
            key: c.coefficient(0) for key, c in shifted.items() if not c.coefficient(0).is_zero()
        }
        expected = cl_bracket({(kp, km): Exact(1)}, {(rp, rm): Exact(1)})
        assert classical_part == expected


def test_projection_idempotent_and_linear():
    rng = np.random.default_rng(9)
    for _ in range(5):
        p = WickPolynomial.zero(2)
        for _ in range(6):
            kp = tuple(int(x) for x in rng.integers(0, 4, size=2))
            km = tuple(int(x) for x in rng.integers(0, 4, size=2))
            p = p + WickPolynomial.monomial(kp, km, int(rng.integers(-5, 6)))
        bar = p.project((1, 2))
        assert bar.project((1, 2)) == bar
        # every surviving monomial really is resonant
        for kp, km in bar.terms:
            assert (kp[0] - km[0]) + 2 * (kp[1] - km[1]) == 0


def test_projection_with_unit_tagged_frequencies():
    fs = FrequencySystem(((1, "a"), (2, "a"), (1, "b")))
    p = WickPolynomial.monomial((2, 0, 0), (0, 1, 0), 1, "sqrt2")  # resonant in a-block
    q = WickPolynomial.monomial((1, 0, 0), (0, 0, 1), 1, "sqrt2")  # crosses units
    assert (p + q).project(fs) == p


def test_classical_anomaly_identity():
    # projection of a product minus product of projections equals the
    # cross-term sum over off-resonant pairs landing on the resonance set
    rng = np.random.default_rng(13)
    freqs = (Fraction(1), Fraction(2))

    def rand_sym():
        d = {}
        for _ in range(5):
            kp = tuple(int(x) for x in rng.integers(0, 3, size=2))
            km = tuple(int(x) for x in rng.integers(0, 3, size=2))
            d[(kp, km)] = Exact(int(rng.integers(-3, 4)), 0, int(rng.integers(-3, 4)), 0)
        return d

    def shift(key):
        kp, km = key
        return (kp[0] - km[0]) + 2 * (kp[1] - km[1])

    for _ in range(10):
        F, G = rand_sym(), rand_sym()
        lhs_terms = cl_project(cl_mul(F, G), freqs)
        proj_prod = cl_mul(cl_project(F, freqs), cl_project(G, freqs))
        cross = {}
        for kf, cf in F.items():
            for kg, cg in G.items():
                if shift(kf) != 0 and shift(kg) != 0:
                    key = (
                        tuple(a + b for a, b in zip(kf[0], kg[0])),
                        tuple(a + b for a, b in zip(kf[1], kg[1])),
                    )
                    if shift(key) == 0:
                        from resalg.numbers import ZERO

                        s = cross.get(key, ZERO) + cf * cg
                        if s.is_zero():
                            cross.pop(key, None)
                        else:
                            cross[key] = s
        total = dict(proj_prod)
        from resalg.numbers import ZERO

        for k, v in cross.items():
            s = total.get(k, ZERO) + v
            if s.is_zero():
                total.pop(k, None)
            else:
                total[k] = s
        assert lhs_terms == total


@given(st.integers(min_value=0, max_value=3), st.integers(min_value=0, max_value=3))
@settings(max_examples=30, deadline=None)
def test_single_mode_reordering_weights(a, b):
    # z^a z*^b re-normal-ordered has the hypergeometric contraction weights
    from math import comb, factorial

    z = WickPolynomial.annihilator(0, 1)
    zs = WickPolynomial.creator(0, 1)
    lhs = (z**a) * (zs**b)
    for (kp, km), coef in lhs.terms.items():
        j = a - kp[0]
        expected = factorial(j) * comb(a, j) * comb(b, j)
        assert coef == HPoly.hbar(j, expected)


def test_q_polynomial_quantization_is_symmetric():
    # coordinate monomials are real: the quantization is self-adjoint
    p = wick_from_q_polynomial({(2, 1): 1, (0, 3): Fraction(1, 2)}, 2)
    assert p.dagger() == p

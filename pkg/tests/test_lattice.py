import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from resalg.lattice import (
    FrequencySystem,
    PrimeSystem,
    ResonanceError,
    anomaly,
    brute_force_minimal,
    clean_expansion,
    decompose_frequency_system,
    enumerate_minimal_elements,
    expand_in_minimal,
    is_resonant,
    lattice_bracket,
    pair_of,
    vector_of,
)


def test_decompose_single_component():
    fs = FrequencySystem(((3, "a"), (6, "a")))
    comps = decompose_frequency_system(fs)
    assert len(comps) == 1
    c = comps[0]
    assert c.characteristic == 3 and c.unit == "a"
    assert c.n == (1, 2)
    assert c.indices == (0, 1)
    assert is_resonant(fs)


def test_decompose_tag_separation():
    fs = FrequencySystem(((1, "a"), (2, "a"), (1, "b")))
    comps = decompose_frequency_system(fs)
    assert len(comps) == 2
    by_unit = {c.unit: c for c in comps}
    assert by_unit["a"].n == (1, 2) and by_unit["a"].indices == (0, 1)
    assert by_unit["b"].n == (1,) and by_unit["b"].indices == (2,)
    assert is_resonant(fs)


def test_decompose_rational_component():
    # content of {2/3, 1, 5} is 1/3, so n = (2, 3, 15)
    fs = FrequencySystem(((Fraction(2, 3), "a"), (1, "a"), (5, "a")))
    (c,) = decompose_frequency_system(fs)
    assert c.characteristic == Fraction(1, 3)
    assert c.n == (2, 3, 15)
    # re-multiplication reproduces the input exactly
    assert tuple(c.characteristic * v for v in c.n) == fs.values()


def test_decompose_rejects_zero():
    with pytest.raises(ResonanceError):
        FrequencySystem(((0, "a"), (1, "a")))


def test_nonresonant_irrational_pair():
    fs = FrequencySystem(((1, "a"), (1, "b")))
    assert not is_resonant(fs)


def test_prime_system_validation():
    with pytest.raises(ResonanceError):
        PrimeSystem((2, 4))
    with pytest.raises(ResonanceError):
        PrimeSystem((0, 1))
    assert PrimeSystem((1, 2)).total == 3


# --- minimal elements -------------------------------------------------------

def test_minimal_12():
    basis = enumerate_minimal_elements(PrimeSystem((1, 2)))
    assert set(basis.gammas) == {(2, -1), (-2, 1)}
    assert basis.primitives == ((1, 0), (0, 1))


def test_minimal_11():
    basis = enumerate_minimal_elements(PrimeSystem((1, 1)))
    assert set(basis.gammas) == {(1, -1), (-1, 1)}


def test_two_mode_basis_is_always_the_single_pair():
    # for any coprime pair the minimal set is exactly the plus/minus of
    # (second frequency, minus first frequency)
    for n1 in range(1, 8):
        for n2 in range(1, 8):
            from math import gcd

            if gcd(n1, n2) != 1 or n1 + n2 > 12:
                continue
            basis = enumerate_minimal_elements(PrimeSystem((n1, n2)))
            assert set(basis.gammas) == {(n2, -n1), (-n2, n1)}


def test_minimal_111():
    basis = enumerate_minimal_elements(PrimeSystem((1, 1, 1)))
    expect = set()
    for v in [(1, -1, 0), (1, 0, -1), (0, 1, -1)]:
        expect.add(v)
        expect.add(tuple(-x for x in v))
    assert set(basis.gammas) == expect


def _prime_systems(max_len, max_total):
    for m in range(1, max_len + 1):
        for n in itertools.product(range(1, max_total + 1), repeat=m):
            if sum(n) > max_total:
                continue
            try:
                yield PrimeSystem(n)
            except ResonanceError:
                continue


@pytest.mark.parametrize("n", list(_prime_systems(2, 7)), ids=str)
def test_minimal_matches_bruteforce_m2(n):
    basis = enumerate_minimal_elements(n)
    oracle = brute_force_minimal(n)
    oracle_clean = {vector_of(k) for k in oracle if any(vector_of(k))}
    assert set(basis.gammas) == oracle_clean
    # the remaining minimal elements are exactly the diagonal primitives
    prims = {k for k in oracle if not any(vector_of(k))}
    expected = set()
    for l in range(n.length):
        e = tuple(1 if j == l else 0 for j in range(n.length))
        expected.add((e, e))
    assert prims == expected


def test_minimal_invariants_small_systems():
    for n in _prime_systems(3, 6):
        basis = enumerate_minimal_elements(n)
        for g in basis.gammas:
            assert n.dot(g) == 0
            gp, gm = pair_of(g)
            assert all(p * m == 0 for p, m in zip(gp, gm))
            assert tuple(-x for x in g) in set(basis.gammas)
            assert all(abs(x) <= n.total for x in g)
        assert len(basis.gammas) <= 2 * n.length * n.total


# --- lattice bracket --------------------------------------------------------

def test_bracket_antisymmetry_on_self():
    assert lattice_bracket((2, -1), (2, -1)) == (0, 0)


def test_bracket_example_12():
    a, b = (2, -1), (-2, 1)
    assert lattice_bracket(a, b) == (4, -1)
    # the conjugate-pair bracket equals alpha_+^2 - alpha_-^2
    ap, am = pair_of(a)
    assert tuple(p * p - m * m for p, m in zip(ap, am)) == (4, -1)


def test_bracket_against_primitive_reproduces_coefficient():
    # against a primitive pair the bracket reads off one component of alpha
    from resalg.lattice import pair_bracket, primitive_pair

    for alpha in [(2, -1), (-2, 1), (3, -2)]:
        for j in range(2):
            b = pair_bracket(pair_of(alpha), primitive_pair(j, 2))
            assert b == tuple(alpha[j] if i == j else 0 for i in range(2))


small_vec = st.tuples(*([st.integers(min_value=-6, max_value=6)] * 3))


@given(small_vec, small_vec, small_vec)
@settings(max_examples=300, deadline=None)
def test_jacobi_like_identity(a, b, c):
    # cyclic sum of [x,y]*z vanishes identically, componentwise product
    total = [0, 0, 0]
    for x, y, z in ((a, b, c), (b, c, a), (c, a, b)):
        br = lattice_bracket(x, y)
        for i in range(3):
            total[i] += br[i] * z[i]
    assert total == [0, 0, 0]


@given(small_vec, small_vec, small_vec)
@settings(max_examples=300, deadline=None)
def test_anomaly_identity(a, b, c):
    ab = tuple(x + y for x, y in zip(a, b))
    lhs = lattice_bracket(ab, c)
    rhs = tuple(
        x + y + an * z
        for x, y, an, z in zip(
            lattice_bracket(a, c), lattice_bracket(b, c), anomaly(a, b), c
        )
    )
    assert lhs == rhs


@given(small_vec, small_vec, small_vec)
@settings(max_examples=300, deadline=None)
def test_anomaly_cocycle(a, b, c):
    ab = tuple(x + y for x, y in zip(a, b))
    bc = tuple(x + y for x, y in zip(b, c))
    lhs = tuple(x + y for x, y in zip(anomaly(a, b), anomaly(ab, c)))
    rhs = tuple(x + y for x, y in zip(anomaly(a, bc), anomaly(b, c)))
    assert lhs == rhs


@given(small_vec, small_vec)
@settings(max_examples=200, deadline=None)
def test_anomaly_is_primitive_content(a, b):
    ab = tuple(x + y for x, y in zip(a, b))
    ap, _ = pair_of(a)
    bp, _ = pair_of(b)
    abp, _ = pair_of(ab)
    assert anomaly(a, b) == tuple(p + q - r for p, q, r in zip(ap, bp, abp))


# --- expansion --------------------------------------------------------------

def test_expand_unit_on_minimal():
    basis = enumerate_minimal_elements(PrimeSystem((1, 2)))
    alpha = (2, -1)
    mu, m = expand_in_minimal(pair_of(alpha), basis)
    assert mu == {alpha: 1}
    assert m == (0, 0)


def test_expand_double():
    basis = enumerate_minimal_elements(PrimeSystem((1, 2)))
    mu, m = clean_expansion((4, -2), basis)
    assert mu == {(2, -1): 2}
    assert m == (0, 0)


def test_expand_conjugate_pair_anomaly():
    # pair sum of alpha and -alpha is purely primitive for the 1:1 system
    basis = enumerate_minimal_elements(PrimeSystem((1, 1)))
    alpha = (1, -1)
    from resalg.lattice import pair_add

    k = pair_add(pair_of(alpha), pair_of((-1, 1)))
    mu, m = expand_in_minimal(k, basis)
    assert mu == {}
    assert m == (1, 1)
    assert m == anomaly(alpha, (-1, 1))


def test_expand_reconstructs_exactly():
    for n in [PrimeSystem((1, 2)), PrimeSystem((2, 3)), PrimeSystem((1, 2, 3))]:
        basis = enumerate_minimal_elements(n)
        for k in itertools.islice(brute_force_solutions_sample(n), 60):
            mu, m = expand_in_minimal(k, basis)
            recon_p = list(m)
            recon_m = list(m)
            for gamma, cnt in mu.items():
                gp, gm = pair_of(gamma)
                recon_p = [a + cnt * b for a, b in zip(recon_p, gp)]
                recon_m = [a + cnt * b for a, b in zip(recon_m, gm)]
            assert (tuple(recon_p), tuple(recon_m)) == k


def brute_force_solutions_sample(n):
    from resalg.lattice import brute_force_solutions

    return brute_force_solutions(n, bound=4)


def test_expand_rejects_nonsolution():
    basis = enumerate_minimal_elements(PrimeSystem((1, 2)))
    with pytest.raises(ResonanceError):
        expand_in_minimal(((1, 0), (0, 0)), basis)


@given(st.data())
@settings(max_examples=60, deadline=None)
def test_expand_fuzz_reconstruction(data):
    # build a random nonnegative combination of minimal elements and
    # primitives, then demand an exact (possibly different) re-expansion
    from resalg.lattice import pair_add, primitive_pair

    n = data.draw(st.sampled_from([(1, 2), (2, 3), (1, 1, 1), (1, 2, 3)]))
    prime = PrimeSystem(n)
    basis = enumerate_minimal_elements(prime)
    m = prime.length
    k = ((0,) * m, (0,) * m)
    for gamma in basis.gammas:
        cnt = data.draw(st.integers(min_value=0, max_value=2))
        for _ in range(cnt):
            k = pair_add(k, pair_of(gamma))
    for l in range(m):
        cnt = data.draw(st.integers(min_value=0, max_value=2))
        for _ in range(cnt):
            k = pair_add(k, primitive_pair(l, m))
    mu, prim = expand_in_minimal(k, basis)
    recon_p, recon_m = list(prim), list(prim)
    for gamma, cnt in mu.items():
        gp, gm = pair_of(gamma)
        recon_p = [a + cnt * b for a, b in zip(recon_p, gp)]
        recon_m = [a + cnt * b for a, b in zip(recon_m, gm)]
    assert (tuple(recon_p), tuple(recon_m)) == k

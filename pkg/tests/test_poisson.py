import itertools
from fractions import Fraction

import numpy as np
import pytest

from resalg.lattice import PrimeSystem
from resalg.numbers import Exact, I, ONE
from resalg.poisson import (
    GenPoly,
    TwoFreqChart,
    build_classical_algebra,
    canonical_phase_bracket,
    lat_id,
    prim_id,
    realize_on_phase_space,
    triple_bracket,
    verify_jacobi,
)


def gp(M, gid, c=1):
    return GenPoly.generator(M, gid, c)


def test_bracket_table_12_matches_closed_form():
    # {A_alpha, conj} = i (n2^2 A2 - n1^2 A1) A1^{n2-1} A2^{n1-1} for 1:2
    s = build_classical_algebra(PrimeSystem((1, 2)))
    a = (2, -1)
    br = s.bracket_gen(lat_id(a), lat_id((-2, 1)))
    expected = GenPoly.monomial(2, (1, 1), (), I * 4) + GenPoly.monomial(
        2, (2, 0), (), -I
    )
    assert br == expected


def test_bracket_table_lattice_primitive():
    s = build_classical_algebra(PrimeSystem((1, 2)))
    a = (2, -1)
    assert s.bracket_gen(lat_id(a), prim_id(0)) == gp(2, lat_id(a), I * 2)
    assert s.bracket_gen(lat_id(a), prim_id(1)) == gp(2, lat_id(a), -I)
    assert s.bracket_gen(prim_id(0), prim_id(1)).is_zero()


def test_su2_change_of_basis_11():
    # half-sum / half-difference combinations satisfy the spin bracket table
    s = build_classical_algebra(PrimeSystem((1, 1)))
    a, ma = (1, -1), (-1, 1)
    half = Exact(Fraction(1, 2))
    over2i = Exact(0, 0, Fraction(-1, 2), 0)
    b1 = gp(2, lat_id(a), half) + gp(2, lat_id(ma), half)
    b2 = gp(2, lat_id(a), over2i) + gp(2, lat_id(ma), -over2i)
    b3 = gp(2, prim_id(0), half) + gp(2, prim_id(1), -half)
    assert s.poisson_bracket(b1, b2) == b3
    assert s.poisson_bracket(b2, b3) == b1
    assert s.poisson_bracket(b3, b1) == b2


def test_diagonal_bracket_two_routes_12():
    # conjugate-pair bracket: direct table entry vs the generic clean-form
    # expression with the primitive monomial written out by hand
    s = build_classical_algebra(PrimeSystem((1, 2)))
    a = (2, -1)
    br = s.bracket_gen(lat_id(a), lat_id((-2, 1)))
    by_hand = GenPoly.monomial(2, (1, 1), (), I * 4) - GenPoly.monomial(2, (2, 0), (), I)
    assert br == by_hand


def test_constraints_and_casimirs_12():
    s = build_classical_algebra(PrimeSystem((1, 2)))
    # constraint: A_alpha A_-alpha = A1^2 A2
    texts = [c for c in s.constraints if not c.is_zero()]
    assert texts, "expected at least the conjugate-pair constraint"
    c0, c1 = s.casimirs
    assert c0 == gp(2, prim_id(0), 1) + gp(2, prim_id(1), 2)
    expected_c1 = gp(2, lat_id((2, -1))) * gp(2, lat_id((-2, 1))) - GenPoly.monomial(
        2, (2, 1), (), 1
    )
    assert c1 == expected_c1


def test_casimir_centrality_symbolic():
    for n in [(1, 1), (1, 2), (2, 3), (1, 2, 3)]:
        s = build_classical_algebra(PrimeSystem(n))
        c0 = s.casimirs[0]
        for gid in s.generator_ids():
            assert s.poisson_bracket(c0, GenPoly.generator(s.M, gid)).is_zero()
        if s.M == 2:
            c1 = s.casimirs[1]
            for gid in s.generator_ids():
                br = s.poisson_bracket(c1, GenPoly.generator(s.M, gid), reduce=False)
                assert br.is_zero()


def test_casimir_centrality_random_polynomials():
    rng = np.random.default_rng(7)
    s = build_classical_algebra(PrimeSystem((1, 2)))
    c0 = s.casimirs[0]
    ids = s.generator_ids()
    for _ in range(5):
        f = GenPoly.zero(2)
        for _ in range(4):
            gid1, gid2 = rng.choice(len(ids), size=2)
            coef = Exact(int(rng.integers(-3, 4)), 0, int(rng.integers(-3, 4)), 0)
            f = f + gp(2, ids[gid1]) * gp(2, ids[gid2], coef)
        assert s.poisson_bracket(f, c0).is_zero()


def test_realize_zero_point():
    s = build_classical_algebra(PrimeSystem((1, 2)))
    values = realize_on_phase_space(s, np.zeros(2, dtype=complex))
    assert all(abs(v) == 0 for v in values.values())


def test_realize_unit_point_12():
    s = build_classical_algebra(PrimeSystem((1, 2)))
    values = realize_on_phase_space(s, np.array([1.0, 1.0], dtype=complex))
    assert values[prim_id(0)] == pytest.approx(1)
    assert values[prim_id(1)] == pytest.approx(1)
    assert values[lat_id((2, -1))] == pytest.approx(1)
    # conjugate-pair constraint holds exactly here
    assert abs(values[lat_id((2, -1))] * values[lat_id((-2, 1))] - 1) < 1e-15


def test_c0_equals_weighted_action():
    rng = np.random.default_rng(3)
    for n in [(1, 2), (2, 3), (1, 1, 1)]:
        s = build_classical_algebra(PrimeSystem(n))
        z = rng.normal(size=s.M) + 1j * rng.normal(size=s.M)
        values = s.realize(z)
        h0 = sum(nl * abs(zl) ** 2 for nl, zl in zip(n, z))
        assert s.casimirs[0].evaluate(values) == pytest.approx(h0, rel=1e-12)


def test_constraints_vanish_on_surface_random():
    rng = np.random.default_rng(11)
    for n in [(1, 2), (2, 3), (1, 2, 3), (1, 1, 2)]:
        s = build_classical_algebra(PrimeSystem(n))
        for _ in range(10):
            z = rng.normal(size=s.M) + 1j * rng.normal(size=s.M)
            realize_on_phase_space(s, z, check_tol=1e-10)


def test_structure_bracket_matches_phase_space_bracket():
    rng = np.random.default_rng(5)
    for n in [(1, 1), (1, 2), (2, 3), (1, 2, 3)]:
        s = build_classical_algebra(PrimeSystem(n))
        ids = s.generator_ids()
        for _ in range(6):
            z = rng.normal(size=s.M) + 1j * rng.normal(size=s.M)
            values = s.realize(z)
            scale = max(1.0, max(abs(v) for v in values.values()))
            for g1, g2 in itertools.combinations(ids, 2):
                lhs = s.bracket_gen(g1, g2).evaluate(values)
                rhs = canonical_phase_bracket(s, g1, g2, z)
                assert abs(lhs - rhs) <= 1e-10 * scale ** 3


def test_verify_jacobi_on_surface():
    for n in [(1, 2), (1, 1), (2, 3), (1, 4), (3, 4), (1, 1, 2)]:
        s = build_classical_algebra(PrimeSystem(n))
        assert verify_jacobi(s, 100, seed=42) < 1e-10


def test_verify_jacobi_off_surface_m2():
    # two-generator lattice: the polynomial identity holds on the whole space
    for n in [(1, 1), (1, 2), (2, 3)]:
        s = build_classical_algebra(PrimeSystem(n))
        assert verify_jacobi(s, 50, seed=1, on_surface=False) < 1e-10


def test_verify_jacobi_on_surface_m3():
    s = build_classical_algebra(PrimeSystem((1, 2, 3)))
    assert verify_jacobi(s, 40, seed=2) < 1e-10


def test_jacobi_off_surface_m3_is_not_assumed():
    # three-mode tables are only claimed on the constraint surface; off it
    # the identity genuinely fails for mixed weights (documented finding,
    # not a requirement), while equal weights stay a Lie algebra globally
    s = build_classical_algebra(PrimeSystem((1, 2, 3)))
    assert verify_jacobi(s, 30, seed=3, on_surface=False) > 1e-3
    s_lie = build_classical_algebra(PrimeSystem((1, 1, 1)))
    assert verify_jacobi(s_lie, 30, seed=3, on_surface=False) < 1e-12


# --- charts and triple brackets ----------------------------------------------

def test_chart_brackets_11():
    s = build_classical_algebra(PrimeSystem((1, 1)))
    chart = TwoFreqChart(s)
    l0 = chart.l0_polys()
    w = chart.w_poly()
    bz = s.poisson_bracket(l0["X"], l0["Z"], reduce=False)
    assert bz == w
    bw = s.poisson_bracket(l0["Z"], w, reduce=False)
    # {Z, W} = (X - Y)/2
    half = Exact(Fraction(1, 2))
    assert bw == gp(2, prim_id(0), half) + gp(2, prim_id(1), -half)


def test_chart_brackets_12():
    s = build_classical_algebra(PrimeSystem((1, 2)))
    chart = TwoFreqChart(s)
    l0 = chart.l0_polys()
    w = chart.w_poly()
    assert s.poisson_bracket(l0["X"], l0["Z"], reduce=False) == w.scale(2)
    assert s.poisson_bracket(l0["Y"], l0["Z"], reduce=False) == w.scale(-1)
    # {Z, W} = X^2/4 - XY
    bw = s.poisson_bracket(l0["Z"], w, reduce=False)
    expected = GenPoly.monomial(2, (2, 0), (), Fraction(1, 4)) - GenPoly.monomial(
        2, (1, 1), (), 1
    )
    assert chart.to_xyzw(bw) == chart.to_xyzw(expected)


def test_triple_brackets_11():
    s = build_classical_algebra(PrimeSystem((1, 1)))
    t = triple_bracket(s)
    # {{X,Z},Z} = (Y - X)/2
    half = Exact(Fraction(1, 2))
    assert t[("X", "Z", "Z")] == {(0, 1, 0): half, (1, 0, 0): -half}
    assert t[("X", "Z", "X")] == {(0, 0, 1): ONE}
    assert t[("X", "Z", "Y")] == {(0, 0, 1): -ONE}
    assert t[("Y", "Z", "X")] == {(0, 0, 1): -ONE}
    assert t[("Y", "Z", "Y")] == {(0, 0, 1): ONE}
    assert t[("Y", "Z", "Z")] == {(1, 0, 0): half, (0, 1, 0): -half}
    # {X,Y} = 0 so every double bracket over it vanishes
    for e in ("X", "Y", "Z"):
        assert t[("X", "Y", e)] == {}


def test_triple_brackets_12():
    s = build_classical_algebra(PrimeSystem((1, 2)))
    t = triple_bracket(s)
    assert t[("X", "Z", "X")] == {(0, 0, 1): Exact(4)}
    assert t[("X", "Z", "Y")] == {(0, 0, 1): Exact(-2)}
    assert t[("Y", "Z", "X")] == {(0, 0, 1): Exact(-2)}
    assert t[("Y", "Z", "Y")] == {(0, 0, 1): ONE}
    # {{X,Z},Z} = 2XY - X^2/2 ; {{Y,Z},Z} = X^2/4 - XY
    assert t[("X", "Z", "Z")] == {(1, 1, 0): Exact(2), (2, 0, 0): Exact(Fraction(-1, 2))}
    assert t[("Y", "Z", "Z")] == {(2, 0, 0): Exact(Fraction(1, 4)), (1, 1, 0): -ONE}


def test_closure_diagnostic():
    # swapping the roles of Z and W breaks closure: {Z', W'} with W' = Z
    s = build_classical_algebra(PrimeSystem((1, 2)))

    class BadChart(TwoFreqChart):
        def l0_polys(self):
            polys = super().l0_polys()
            polys["Z"] = self.w_poly()  # momentum coordinate inside L0
            return polys

        def w_poly(self_inner):
            return TwoFreqChart(s).l0_polys()["Z"]

    chart = BadChart(s)
    l0 = chart.l0_polys()
    w = chart.w_poly()
    br = s.poisson_bracket(l0["X"], w, reduce=False)
    expressed = TwoFreqChart(s).to_xyzw(br)
    assert any(k[3] != 0 for k in expressed)


def test_reduce_conjugate_pair():
    s = build_classical_algebra(PrimeSystem((1, 2)))
    prod = gp(2, lat_id((2, -1))) * gp(2, lat_id((-2, 1)))
    red = s.reduce(prod)
    assert red == GenPoly.monomial(2, (2, 1), (), 1)


def test_reduce_idempotent():
    rng = np.random.default_rng(37)
    for n in [(1, 2), (1, 1, 1), (1, 2, 3)]:
        s = build_classical_algebra(PrimeSystem(n))
        ids = s.generator_ids()
        for _ in range(4):
            f = GenPoly.zero(s.M)
            for _ in range(3):
                i1, i2 = rng.choice(len(ids), size=2)
                f = f + gp(s.M, ids[i1]) * gp(s.M, ids[i2], int(rng.integers(-2, 3)))
            once = s.reduce(f)
            assert s.reduce(once) == once


def test_reduce_preserves_value_on_surface():
    rng = np.random.default_rng(19)
    for n in [(1, 2), (2, 3), (1, 1, 1), (1, 2, 3)]:
        s = build_classical_algebra(PrimeSystem(n))
        ids = s.generator_ids()
        for _ in range(5):
            f = GenPoly.zero(s.M)
            for _ in range(3):
                i1, i2 = rng.choice(len(ids), size=2)
                f = f + gp(s.M, ids[i1]) * gp(s.M, ids[i2], int(rng.integers(-3, 4)))
            red = s.reduce(f)
            z = rng.normal(size=s.M) + 1j * rng.normal(size=s.M)
            values = s.realize(z)
            assert abs(f.evaluate(values) - red.evaluate(values)) < 1e-9 * (
                1 + abs(f.evaluate(values))
            )


def test_real_structure_of_brackets():
    # conjugation flips lattice vectors and conjugates coefficients, and it
    # commutes with the bracket
    rng = np.random.default_rng(29)
    s = build_classical_algebra(PrimeSystem((1, 2)))
    ids = s.generator_ids()

    def random_poly():
        f = GenPoly.zero(2)
        for _ in range(3):
            i1, i2 = rng.choice(len(ids), size=2)
            coef = Exact(int(rng.integers(-2, 3)), 0, int(rng.integers(-2, 3)), 0)
            f = f + gp(2, ids[i1]) * gp(2, ids[i2], coef)
        return f

    for _ in range(5):
        f, g = random_poly(), random_poly()
        lhs = s.poisson_bracket(f, g, reduce=False).conjugate()
        rhs = s.poisson_bracket(f.conjugate(), g.conjugate(), reduce=False)
        assert lhs == rhs
        assert f.conjugate().conjugate() == f


def test_bracket_antisymmetry_and_leibniz_symbolic():
    rng = np.random.default_rng(23)
    s = build_classical_algebra(PrimeSystem((1, 2)))
    ids = s.generator_ids()

    def random_poly():
        f = GenPoly.zero(2)
        for _ in range(3):
            i1, i2 = rng.choice(len(ids), size=2)
            f = f + gp(2, ids[i1]) * gp(2, ids[i2], int(rng.integers(-2, 3)))
        return f

    for _ in range(4):
        f, g, h = random_poly(), random_poly(), random_poly()
        assert s.poisson_bracket(f, g, reduce=False) == -s.poisson_bracket(
            g, f, reduce=False
        )
        lhs = s.poisson_bracket(f, g * h, reduce=False)
        rhs = s.poisson_bracket(f, g, reduce=False) * h + g * s.poisson_bracket(
            f, h, reduce=False
        )
        assert lhs == rhs

import numpy as np
import pytest

from resalg.fock import FockBasis, resonance12_generators
from resalg.hypergeo import coherent_transform, half_index
from resalg.lattice import PrimeSystem
from resalg.spectral import (
    BlockEvolution,
    LeafGeometry,
    SchrodingerProblem,
    asymptotic_table,
    cluster_comparison,
    ebk_quantization,
    ebk_vs_model,
    long_time_evolution,
    model_operator_spectrum,
    model_spectrum_gram_route,
    model_table,
    near_bottom_asymptotics,
    oracle_eigenvectors,
    schrodinger_eigen,
)

SQ2 = np.sqrt(2.0)


# --- model operator ------------------------------------------------------------

def test_model_anchor_values():
    w, _ = model_operator_spectrum(0, 1.0)
    assert w == pytest.approx([0.0], abs=1e-14)
    w, _ = model_operator_spectrum(1, 1.0)
    assert w == pytest.approx([0.0], abs=1e-14)
    w, _ = model_operator_spectrum(2, 1.0)
    assert w == pytest.approx([-1 / (2 * SQ2), 1 / (2 * SQ2)], abs=1e-12)


def test_model_frozen_levels_four_five():
    # 3x3 blocks diagonalized by hand: characteristic polynomials
    # -x^3 + 2x and -x^3 + 4x over sqrt2
    w, _ = model_operator_spectrum(4, 1.0)
    assert w == pytest.approx([-1.0, 0.0, 1.0], abs=1e-12)
    w, _ = model_operator_spectrum(5, 1.0)
    assert w == pytest.approx([-SQ2, 0.0, SQ2], abs=1e-12)


def test_model_spectrum_scales_as_three_halves_power():
    for n in [3, 6]:
        w1, _ = model_operator_spectrum(n, 1.0)
        wh, _ = model_operator_spectrum(n, 0.25)
        assert np.abs(wh - 0.25**1.5 * w1).max() < 1e-12


def test_model_vs_gram_oracle():
    for n in range(13):
        w, _ = model_operator_spectrum(n, 1.0)
        wg, defect = model_spectrum_gram_route(n, 1.0)
        assert np.abs(w - wg).max() < 1e-8
        assert defect < 1e-8


def test_model_mirror_symmetry_and_counts():
    tbl = model_table(9)
    for n in range(10):
        vals = [r.value for r in tbl.rows if r.n == n]
        assert len(vals) == half_index(n) + 1
        assert np.abs(np.sort(vals) + np.sort(vals)[::-1]).max() < 1e-12


# --- oracle ---------------------------------------------------------------------

def test_harmonic_limit_exact_degeneracies():
    prob = SchrodingerProblem(hbar=0.1, smax=30, cubic_on=False, quartic_on=False)
    tbl = schrodinger_eigen(prob, count=16, check_convergence=False)
    lam = np.array(sorted(r.value for r in tbl.rows)) / 0.1
    expect = []
    for n in range(8):
        expect += [n + 1.5] * (half_index(n) + 1)
    assert np.abs(lam - expect[:16]).max() < 1e-11
    # cluster sizes from labels
    for n in range(5):
        assert sum(1 for r in tbl.rows if r.n == n) == half_index(n) + 1


def test_oracle_convergence_guard():
    prob = SchrodingerProblem(gamma=0.125, hbar=0.1, smax=40)
    t1 = schrodinger_eigen(prob, count=10)
    t2 = schrodinger_eigen(
        SchrodingerProblem(gamma=0.125, hbar=0.1, smax=52), count=10,
        check_convergence=False)
    assert np.abs(np.array(t1.sorted().values()) - np.array(t2.sorted().values())).max() < 1e-9


def test_confinement_guard():
    with pytest.raises(ValueError):
        SchrodingerProblem(gamma=0.1)


def test_ground_state_near_three_halves():
    prob = SchrodingerProblem(gamma=0.125, hbar=0.1, smax=40)
    tbl = schrodinger_eigen(prob, count=1)
    lam0 = tbl.rows[0].value
    assert abs(lam0 - 1.5 * 0.1) < 0.01  # remainder of quadratic order


def test_two_term_asymptotics_accuracy():
    prob = SchrodingerProblem(gamma=0.125, hbar=0.05, smax=44)
    rows = cluster_comparison(prob, 4)
    assert len(rows) == 9
    for r in rows:
        assert r["residual"] <= 1.0 * prob.hbar**2  # conservative envelope


def test_residual_constant_does_not_grow():
    worst = {}
    for hbar in (0.2, 0.05):
        prob = SchrodingerProblem(gamma=0.125, hbar=hbar, smax=44)
        rows = cluster_comparison(prob, 4)
        worst[hbar] = max(r["residual_over_h2"] for r in rows)
    assert worst[0.05] <= 3.0 * worst[0.2]


def test_extracted_nu_converges_like_sqrt_h():
    errs = {}
    for hbar in (0.2, 0.1, 0.05):
        prob = SchrodingerProblem(gamma=0.125, hbar=hbar, smax=44)
        rows = cluster_comparison(prob, 4)
        errs[hbar] = max(abs(r["nu_extracted"] - r["nu_model"]) for r in rows)
    r1 = errs[0.2] / errs[0.1]
    r2 = errs[0.1] / errs[0.05]
    for r in (r1, r2):
        assert SQ2 / 2 < r < SQ2 * 2


def test_eigenvector_block_alignment():
    # oracle eigenvectors projected to their dominant block align with the
    # transformed model eigenfunctions
    hbar = 0.05
    prob = SchrodingerProblem(gamma=0.125, hbar=hbar, smax=44)
    lam, vec, states = oracle_eigenvectors(prob, count=9)
    grades = np.array([m + 2 * l for m, l in states])
    basis = FockBasis(PrimeSystem((1, 2)), 12)
    for i in range(9):
        v = vec[:, i]
        weights = np.bincount(grades, weights=np.abs(v) ** 2)
        n = int(np.argmax(weights))
        # order block coordinates as in the graded Fock basis
        block_states = [basis.states[j] for j in basis.block(n)]
        proj = np.array([
            v[[s for s, ml in enumerate(states) if ml == bs][0]] for bs in block_states
        ])
        proj = proj / np.linalg.norm(proj)
        T, _ = coherent_transform(n, basis, 1.0)
        w, pv = model_operator_spectrum(n, 1.0)
        # match by energy rank inside the cluster
        k = sum(1 for j in range(9)
                if j != i and abs(lam[j] - hbar * (n + 1.5)) < 0.5 * hbar
                and lam[j] < lam[i])
        target = T @ pv[:, k]
        target = target / np.linalg.norm(target)
        overlap = abs(np.vdot(target, proj))
        assert overlap > 1 - 2.0 * np.sqrt(hbar)
        assert overlap > 0.9


def test_near_bottom_asymptotics_values():
    assert near_bottom_asymptotics(0, 0, 0.04) == pytest.approx(0.06)
    lam = near_bottom_asymptotics(2, 1, 0.04)
    assert lam == pytest.approx(3.5 * 0.04 + 0.04**1.5 / (2 * SQ2), rel=1e-12)
    with pytest.raises(IndexError):
        near_bottom_asymptotics(2, 5, 0.1)


def test_asymptotic_table_cluster_sizes():
    tbl = asymptotic_table(6, 0.1)
    for n in range(7):
        assert sum(1 for r in tbl.rows if r.n == n) == half_index(n) + 1


# --- quantized-area ladder -------------------------------------------------------

def test_leaf_area_totals():
    leaf = LeafGeometry(20, 1 / 20)
    assert leaf.total_area == pytest.approx(2 * np.pi * 1.5 * leaf.c1)
    assert leaf.area_above(-leaf.r_max - 1) == pytest.approx(leaf.total_area)
    assert leaf.area_above(leaf.r_max + 1) == 0.0
    # monotone decreasing in nu
    nus = np.linspace(-leaf.r_max * 0.95, leaf.r_max * 0.95, 9)
    areas = [leaf.area_above(v) for v in nus]
    assert all(a > b for a, b in zip(areas, areas[1:]))


def test_leaf_level_count_matches_half_index():
    for n in (20, 40):
        leaf = LeafGeometry(n, 1.0 / n)
        count = leaf.total_area / (2 * np.pi * (1.0 / n))
        assert count == pytest.approx(n / 2, rel=1e-12)
        ladder = ebk_quantization(n, 1.0 / n)
        assert len(ladder) == int(np.floor(n / 2 - 0.5)) + 1


def test_ebk_ladder_symmetric():
    ladder = np.array(ebk_quantization(20, 0.05))
    assert np.abs(ladder + ladder[::-1]).max() < 1e-8 * max(abs(ladder[0]), 1e-12)


def test_ebk_converges_to_model():
    d20 = ebk_vs_model(20)["max_rel_dev"]
    d40 = ebk_vs_model(40)["max_rel_dev"]
    assert d40 < d20
    assert d40 < 0.05


def test_ebk_scale_invariance():
    out1 = ebk_vs_model(16, 1.0 / 16)
    out2 = ebk_vs_model(16, 2.0 / 16)
    assert out1["max_rel_dev"] == pytest.approx(out2["max_rel_dev"], rel=1e-6)


# --- evolution --------------------------------------------------------------------

@pytest.fixture(scope="module")
def evo_basis():
    return FockBasis(PrimeSystem((1, 2)), 10)


def test_evolution_identity_at_zero(evo_basis):
    rng = np.random.default_rng(0)
    init = {n: rng.normal(size=half_index(n) + 1) + 1j * rng.normal(size=half_index(n) + 1)
            for n in range(6)}
    out = long_time_evolution(init, evo_basis, 1.0, [0.0])
    for n, traj in out.items():
        assert np.abs(traj[0] - init[n]).max() < 1e-14


def test_evolution_norm_conserved(evo_basis):
    rng = np.random.default_rng(1)
    taus = np.linspace(0, 100, 23)
    init = {n: rng.normal(size=half_index(n) + 1) + 1j * rng.normal(size=half_index(n) + 1)
            for n in range(8)}
    out = long_time_evolution(init, evo_basis, 1.0, taus)
    for n, traj in out.items():
        norms = np.linalg.norm(traj, axis=1)
        assert np.abs(norms - norms[0]).max() < 1e-12 * max(1.0, norms[0])


def test_evolution_eigenphases_match_model(evo_basis):
    evo = BlockEvolution(evo_basis, 1.0)
    for n in range(8):
        w, _ = model_operator_spectrum(n, 1.0)
        assert np.abs(np.sort(evo.eigenphases(n)) - w).max() < 1e-10


def test_evolution_microzone_rate(evo_basis):
    hp = 0.5
    evo_nano = BlockEvolution(evo_basis, hp, microzone=False)
    evo_micro = BlockEvolution(evo_basis, hp, microzone=True)
    assert np.abs(np.sort(evo_micro.eigenphases(4)) * hp
                  - np.sort(evo_nano.eigenphases(4))).max() < 1e-12


def test_evolution_eigenstate_phase(evo_basis):
    # an eigenvector of the block generator picks up a pure phase
    A3 = resonance12_generators(evo_basis, 1.0)[2]
    n = 6
    idx = np.array(evo_basis.block(n), dtype=int)
    blk = A3.matrix[np.ix_(idx, idx)]
    w, v = np.linalg.eigh((blk + blk.conj().T) / 2)
    tau = 3.7
    out = long_time_evolution({n: v[:, 0]}, evo_basis, 1.0, [tau])
    expect = np.exp(-1j * w[0] / SQ2 * tau) * v[:, 0]
    assert np.abs(out[n][0] - expect).max() < 1e-12

"""Tests for the three application experiments."""

import numpy as np
import pytest

from vqse.ansatz import BlockKind, LayeredAnsatz, prepare_eigenvector
from vqse.experiments import (
    FactorizationNotFound,
    LoopConfig,
    NoiseSpec,
    SpinChainSpec,
    eigenvector_preparation_gates,
    locate_factorization,
    pca_experiment,
    random_low_rank_state,
    run_circuit,
    w_preparation_gates,
    w_state,
    w_state_mitigation_run,
    w_state_mitigation_runs,
    xy_ground_reduced,
    xy_hamiltonian,
    xy_spectroscopy_sweep,
    xy_sweep_point,
)
from vqse.qmath import exact_eigs, fidelity_pure, purity
FAST_LOOP = LoopConfig(layers=2, kind=BlockKind.RY_CZ, n_max=40, s=10)


class TestRandomLowRankState:
    def test_no_ancillas_gives_pure_state(self):
        rho = random_low_rank_state(3, 0, seed=4)
        assert purity(rho) == pytest.approx(1.0)

    def test_rank_sixteen(self):
        rho = random_low_rank_state(4, 4, seed=0)
        w = exact_eigs(rho)[0]
        assert np.count_nonzero(w > 1e-12) == 16
        assert w.sum() == pytest.approx(1.0)

    def test_rank_bounded_by_ancilla_dimension(self):
        rho = random_low_rank_state(6, 2, seed=1)
        w = exact_eigs(rho)[0]
        assert np.count_nonzero(w > 1e-12) <= 4

    def test_real_and_deterministic(self):
        a = random_low_rank_state(4, 4, seed=7)
        b = random_low_rank_state(4, 4, seed=7)
        assert np.array_equal(a.data, b.data)
        assert np.abs(a.data.imag).max() < 1e-12

    def test_dimension_cap(self):
        with pytest.raises(ValueError):
            random_low_rank_state(9, 4, seed=0)


class TestXYChain:
    def test_hamiltonian_is_symmetric(self):
        spec = SpinChainSpec(N=6, J_x=1.0, J_y=0.5, h=0.8, gamma=np.pi / 3, keep=3)
        ham = xy_hamiltonian(spec)
        assert np.abs(ham - ham.T).max() < 1e-12

    def test_translation_invariance(self):
        spec = SpinChainSpec(N=5, J_x=-1.0, J_y=-0.5, h=0.7, gamma=0.4, keep=2)
        ham = xy_hamiltonian(spec)
        d = 2**spec.N
        # cyclic shift permutation: qubit q -> q+1 (mod N)
        perm = np.zeros(d, dtype=int)
        for i in range(d):
            z = format(i, f"0{spec.N}b")
            perm[i] = int(z[-1] + z[:-1], 2)
        shifted = ham[np.ix_(perm, perm)]
        assert np.abs(shifted - ham).max() < 1e-10

    def test_noninteracting_limit_is_polarized_product(self):
        spec = SpinChainSpec(N=6, J_x=0.0, J_y=0.0, h=1.0, gamma=0.0, keep=3)
        red, energy = xy_ground_reduced(spec)
        w = exact_eigs(red)[0]
        assert w[0] == pytest.approx(1.0)
        # all spins aligned with the field: energy -N h / 2
        assert energy == pytest.approx(-3.0)

    def test_reduced_spectrum_matches_schmidt_oracle(self):
        spec = SpinChainSpec(N=8, J_x=1.0, J_y=0.5, h=0.9, gamma=0.0, keep=4)
        red, _ = xy_ground_reduced(spec)
        w, v = np.linalg.eigh(xy_hamiltonian(spec))
        svals = np.linalg.svd(v[:, 0].reshape(2**4, 2**4), compute_uv=False)
        lam = exact_eigs(red)[0]
        assert np.abs(lam - np.sort(svals**2)[::-1]).max() < 1e-10

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            SpinChainSpec(N=13, J_x=1.0, J_y=0.5, h=0.5, gamma=0.0, keep=4)
        with pytest.raises(ValueError):
            SpinChainSpec(N=6, J_x=1.0, J_y=0.5, h=0.5, gamma=0.0, keep=6)


class TestFactorization:
    def test_transverse_analytic_point(self):
        # transverse field: the product point sits at sqrt(Jx Jy) exactly
        spec = SpinChainSpec(N=8, J_x=1.0, J_y=0.5, h=0.5, gamma=0.0, keep=4)
        h_star = locate_factorization(spec, np.arange(0.4, 1.01, 0.05))
        assert abs(h_star - np.sqrt(0.5)) < 1e-3
        red, _ = xy_ground_reduced(
            SpinChainSpec(8, 1.0, 0.5, h_star, 0.0, 4))
        assert 1.0 - exact_eigs(red)[0][0] < 1e-8

    def test_afm_nontransverse_point(self):
        # declared AFM configuration factorizes exactly at h = 1
        spec = SpinChainSpec(N=6, J_x=-1.0, J_y=-0.5, h=0.5, gamma=np.pi / 3, keep=3)
        h_star = locate_factorization(spec, np.arange(0.5, 1.51, 0.1))
        assert abs(h_star - 1.0) < 1e-6
        red, _ = xy_ground_reduced(
            SpinChainSpec(6, -1.0, -0.5, h_star, np.pi / 3, 3))
        assert 1.0 - exact_eigs(red)[0][0] < 1e-8

    def test_noninteracting_everywhere_factorized(self):
        spec = SpinChainSpec(N=4, J_x=0.0, J_y=0.0, h=0.5, gamma=0.0, keep=2)
        h_star = locate_factorization(spec, [0.2, 0.5, 0.8])
        red, _ = xy_ground_reduced(SpinChainSpec(4, 0.0, 0.0, h_star, 0.0, 2))
        assert 1.0 - exact_eigs(red)[0][0] < 1e-8

    def test_not_found_raises(self):
        # in-plane field on the ferromagnet admits no product ground state
        spec = SpinChainSpec(N=6, J_x=1.0, J_y=0.5, h=0.5, gamma=np.pi / 2, keep=3)
        with pytest.raises(FactorizationNotFound):
            locate_factorization(spec, np.arange(0.3, 1.21, 0.1))


class TestWStateCircuit:
    def test_preparation_is_exact(self):
        rho = run_circuit(3, w_preparation_gates(), None)
        assert fidelity_pure(rho, w_state()) == pytest.approx(1.0)

    def test_preparation_uses_three_entanglers(self):
        assert sum(1 for g in w_preparation_gates() if len(g.targets) == 2) == 3

    def test_eigenvector_gates_match_direct_preparation(self):
        for kind in BlockKind:
            a = LayeredAnsatz.random(3, 2, kind, 6)
            for z in ("000", "101"):
                direct = prepare_eigenvector(a, z)
                circuit = run_circuit(3, eigenvector_preparation_gates(a, z), None)
                assert fidelity_pure(circuit, direct) == pytest.approx(1.0)

    def test_single_layer_uses_two_entanglers(self):
        a = LayeredAnsatz.random(3, 1, BlockKind.G_CNOT_G, 3)
        gates = eigenvector_preparation_gates(a, "000")
        assert sum(1 for g in gates if len(g.targets) == 2) == 2

    def test_noise_reduces_fidelity(self):
        noise = NoiseSpec(p_depol_1q=0.002, p_depol_2q=0.02)
        rho = run_circuit(3, w_preparation_gates(), noise)
        assert 0.90 < fidelity_pure(rho, w_state()) < 1.0

    def test_noise_spec_validation(self):
        with pytest.raises(ValueError):
            NoiseSpec(p_depol_1q=1.5)


class TestWStateMitigation:
    def test_noiseless_baseline_is_one(self):
        loop = LoopConfig(layers=1, kind=BlockKind.G_CNOT_G, n_max=20, s=10)
        res = w_state_mitigation_run(NoiseSpec(), loop, seed=0)
        assert res.baseline_fidelity == pytest.approx(1.0)
        assert res.final_fidelity <= 1.0 + 1e-12

    def test_noiseless_training_converges_to_w(self):
        # best of 10: the two-layer circuit can prepare the state exactly,
        # so the cost reaches the lowest level and the fidelity approaches 1
        loop = LoopConfig(layers=2, kind=BlockKind.G_CNOT_G, n_max=150, s=30)
        results = w_state_mitigation_runs(NoiseSpec(), loop, runs=10, seed=0, jobs=2)
        best = max(r.final_fidelity for r in results)
        assert best > 0.99
        e1 = min(loop.cost_config(3, 1).local.energies())
        best_cost = min(r.rows[-1].cost for r in results)
        assert abs(best_cost - e1) < 0.01

    def test_cost_trace_recorded_each_iteration(self):
        loop = LoopConfig(layers=1, kind=BlockKind.G_CNOT_G, n_max=15, s=5)
        res = w_state_mitigation_run(NoiseSpec(p_depol_2q=0.02), loop, seed=1)
        assert [r.iteration for r in res.rows] == list(range(16))
        assert 0 < res.baseline_fidelity < 1


class TestPcaExperiment:
    def test_partial_sum_majorization(self):
        res = pca_experiment(3, 3, FAST_LOOP, runs=2, seed=5, n_ancilla=2)
        lam = res.exact_lambdas
        for r in res.runs:
            for k in range(1, 4):
                assert r.estimate.lambdas[:k].sum() <= lam[:k].sum() + 1e-10

    def test_deterministic_and_jobs_independent(self):
        a = pca_experiment(3, 2, FAST_LOOP, runs=2, seed=9, n_ancilla=1, jobs=1)
        b = pca_experiment(3, 2, FAST_LOOP, runs=2, seed=9, n_ancilla=1, jobs=2)
        assert [r.eps_final for r in a.runs] == [r.eps_final for r in b.runs]
        assert np.array_equal(a.runs[0].result.theta_opt, b.runs[0].result.theta_opt)

    def test_reports_satisfy_bounds(self):
        from vqse.metrics import check_error_report

        res = pca_experiment(3, 3, FAST_LOOP, runs=3, seed=2, n_ancilla=2)
        for r in res.runs:
            assert check_error_report(r.report) == []

    def test_converges_on_easy_low_rank_instance(self):
        # rank-2 state with an expressive circuit: near-exact recovery
        loop = LoopConfig(layers=3, kind=BlockKind.RY_CZ, n_max=300, s=30)
        res = pca_experiment(3, 2, loop, runs=4, seed=7, n_ancilla=1, jobs=2)
        assert min(r.eps_final for r in res.runs) < 1e-8
        rho = random_low_rank_state(3, 1, 7)
        w, v = exact_eigs(rho)
        best = res.best_run
        prep = prepare_eigenvector(best.result.ansatz, best.estimate.bitstrings[0])
        assert abs(np.vdot(v[:, 0], prep.amplitudes)) ** 2 >= 0.99

    def test_rps_table_monotone(self):
        res = pca_experiment(3, 2, FAST_LOOP, runs=3, seed=3, n_ancilla=1)
        # tightening the target can only increase runs-per-success
        finite = [x for x in res.rps_final if np.isfinite(x)]
        assert all(b >= a for a, b in zip(finite, finite[1:]))


class TestXYSweep:
    def test_sweep_rows_are_consistent(self):
        spec = SpinChainSpec(N=6, J_x=-1.0, J_y=-0.5, h=0.7, gamma=np.pi / 3, keep=3)
        points = xy_spectroscopy_sweep(spec, [0.6, 0.8], m=3, loop=FAST_LOOP, runs=2, seed=3)
        assert [p.h for p in points] == [0.6, 0.8]
        for p in points:
            assert len(p.exact_lambdas) == 3 and len(p.est_lambdas) == 3
            assert p.eps_abs >= 0 and p.eps_rel >= 0

    def test_point_determinism(self):
        spec = SpinChainSpec(N=6, J_x=-1.0, J_y=-0.5, h=0.7, gamma=np.pi / 3, keep=3)
        p1 = xy_sweep_point(spec, 3, FAST_LOOP, runs=2, seed=11)
        p2 = xy_sweep_point(spec, 3, FAST_LOOP, runs=2, seed=11)
        assert p1 == p2

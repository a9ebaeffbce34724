"""Tests for gradients, the training loop, readout and the shot planner."""

import numpy as np
import pytest

from vqse.ansatz import BlockKind, LayeredAnsatz, apply_ansatz, rotation_y, shift_parameter
from vqse.hamiltonians import cost_exact, default_local_weights, global_from_local
from vqse.qmath import DensityMatrix, exact_eigs, random_density_matrix
from vqse.solver import (
    CostConfig,
    EigenEstimate,
    OptimizerConfig,
    StepwiseSchedule,
    optimize,
    param_shift_gradient,
    plan_shots,
    readout,
)


def cost_config(n, m, variant="local", shots=0):
    local = default_local_weights(n, m)
    return CostConfig(variant=variant, local=local, global_part=global_from_local(local, m), m=m, shots=shots)


class TestParameterShiftRule:
    def test_single_qubit_closed_form(self):
        # C(theta) = <I - Z> after R_y(theta)|0>: 1 - cos(theta); the +-pi/2
        # shift rule must give the exact derivative sin(theta)
        def c(theta):
            v = rotation_y(theta) @ np.array([1.0, 0.0])
            return 1.0 - (abs(v[0]) ** 2 - abs(v[1]) ** 2)

        for theta in (0.0, np.pi / 2, 1.1, -2.3):
            ps = 0.5 * (c(theta + np.pi / 2) - c(theta - np.pi / 2))
            assert ps == pytest.approx(np.sin(theta), abs=1e-12)
        assert 0.5 * (c(np.pi) - c(0.0)) == pytest.approx(1.0)

    @pytest.mark.parametrize("kind", list(BlockKind))
    def test_matches_finite_differences(self, kind):
        rho = random_density_matrix(3, seed=14)
        a = LayeredAnsatz.random(3, 2, kind, 3)
        h = default_local_weights(3, 3)
        grad = param_shift_gradient(rho, a, h)
        step = 1e-5
        for nu in range(a.theta.size):
            cp = cost_exact(h, apply_ansatz(rho, shift_parameter(a, nu, +step)))
            cm = cost_exact(h, apply_ansatz(rho, shift_parameter(a, nu, -step)))
            assert grad[nu] == pytest.approx((cp - cm) / (2 * step), abs=1e-6)

    def test_flat_at_maximally_mixed_state(self):
        rho = DensityMatrix.maximally_mixed(2)
        a = LayeredAnsatz.random(2, 2, BlockKind.RY_CZ, 9)
        grad = param_shift_gradient(rho, a, default_local_weights(2, 2))
        assert np.abs(grad).max() < 1e-12

    def test_sampled_gradient_is_seeded_and_consistent(self):
        rho = random_density_matrix(2, seed=3)
        a = LayeredAnsatz.random(2, 1, BlockKind.RY_CZ, 4)
        h = default_local_weights(2, 2)
        g1 = param_shift_gradient(rho, a, h, shots=4000, rng=7)
        g2 = param_shift_gradient(rho, a, h, shots=4000, rng=7)
        assert np.array_equal(g1, g2)
        exact = param_shift_gradient(rho, a, h)
        assert np.abs(g1 - exact).max() < 0.1


class TestSchedule:
    def test_divisibility_enforced(self):
        with pytest.raises(ValueError):
            StepwiseSchedule(100, 30)

    def test_stepwise_values(self):
        sched = StepwiseSchedule(100, 20)
        assert sched(0.0) == 0.0
        assert sched(1.0) == 1.0
        assert sched(0.31) == pytest.approx(0.2)  # holds the last update value
        assert sched(0.2) == pytest.approx(0.2)
        assert [sched.is_update(k) for k in (19, 20, 21)] == [False, True, False]


class TestReadout:
    def test_reads_sorted_diagonal(self):
        rho = DensityMatrix(np.diag([0.5, 0.3, 0.2, 0.0]).astype(complex))
        a = LayeredAnsatz(2, 1, BlockKind.RY_CZ, np.zeros(4))  # CZ keeps diagonals
        est = readout(rho, a, m=2)
        assert np.allclose(est.lambdas, [0.5, 0.3])
        assert est.bitstrings == ("00", "01")
        assert est.shots_used == 0

    def test_deterministic_state_sampled_exactly(self):
        rho = DensityMatrix.basis_state(2, "00")
        a = LayeredAnsatz(2, 1, BlockKind.RY_CZ, np.zeros(4))
        est = readout(rho, a, m=1, shots=1000, rng=3)
        assert est.lambdas[0] == pytest.approx(1.0)
        assert not est.padded

    def test_tie_break_is_lexicographic(self):
        rho = DensityMatrix.maximally_mixed(2)
        a = LayeredAnsatz(2, 1, BlockKind.RY_CZ, np.zeros(4))
        est = readout(rho, a, m=3)
        assert est.bitstrings == ("00", "01", "10")

    def test_padding_flagged_when_too_few_outcomes(self):
        rho = DensityMatrix.basis_state(2, "00")
        a = LayeredAnsatz(2, 1, BlockKind.RY_CZ, np.zeros(4))
        est = readout(rho, a, m=3, shots=50, rng=0)
        assert est.padded
        assert est.lambdas[0] == pytest.approx(1.0)
        assert np.allclose(est.lambdas[1:], 0.0)

    def test_partial_sums_majorized_by_spectrum(self):
        for seed in range(8):
            rho = random_density_matrix(3, seed=seed)
            a = LayeredAnsatz.random(3, 2, BlockKind.RY_CZ, seed + 10)
            est = readout(rho, a, m=8)
            lam = exact_eigs(rho)[0]
            for k in range(1, 9):
                assert est.lambdas[:k].sum() <= lam[:k].sum() + 1e-10

    def test_hoeffding_envelope_monte_carlo(self):
        # each per-bitstring frequency must sit inside the concentration
        # envelope |est - p| <= c p with failure probability delta
        rho = random_density_matrix(3, seed=55)
        a = LayeredAnsatz.random(3, 1, BlockKind.RY_CZ, 2)
        rho_t = apply_ansatz(rho, a)
        p = rho_t.diagonal()
        order = np.argsort(-p, kind="stable")[:3]
        shots = 10**5
        delta = 1e-3
        # invert Pr(|est-p| >= c p) <= 2 exp(-2 N c^2 p^2) = delta per entry
        rng = np.random.default_rng(2024)
        failures = 0
        trials = 300
        for _ in range(trials):
            counts = rng.multinomial(shots, p / p.sum())
            for i in order:
                c_i = np.sqrt(np.log(2 / delta) / (2 * shots * p[i] ** 2))
                if abs(counts[i] / shots - p[i]) >= c_i * p[i]:
                    failures += 1
        assert failures <= max(3, int(2 * delta * trials * len(order)))


class TestEstimateValidation:
    def test_rejects_unsorted(self):
        with pytest.raises(ValueError):
            EigenEstimate(np.array([0.2, 0.5]), ("00", "01"))

    def test_rejects_mass_above_one(self):
        with pytest.raises(ValueError):
            EigenEstimate(np.array([0.8, 0.7]), ("00", "01"))

    def test_rejects_duplicate_bitstrings(self):
        with pytest.raises(ValueError):
            EigenEstimate(np.array([0.5, 0.3]), ("00", "00"))


class TestPlanShots:
    def test_reference_value(self):
        assert plan_shots(0.1, 0.01, 0.1).n_runs == 23026

    def test_all_unity(self):
        assert plan_shots(1.0, 1 / np.e, 1.0).n_runs == 1

    def test_inverse_form(self):
        # eigenvalues above sqrt(ln(1/delta) / (2 c^2 N)) are covered by N runs
        n_runs = 10**4
        lam = np.sqrt(np.log(100.0) / (2 * 0.1**2 * n_runs))
        assert plan_shots(0.1, 0.01, lam * 1.0001).n_runs <= n_runs
        assert plan_shots(0.1, 0.01, lam * 0.99).n_runs > n_runs

    def test_input_validation(self):
        with pytest.raises(ValueError):
            plan_shots(0.0, 0.01, 0.1)
        with pytest.raises(ValueError):
            plan_shots(0.1, 1.0, 0.1)
        with pytest.raises(ValueError):
            plan_shots(0.1, 0.01, 0.0)


class TestOptimize:
    def test_stationary_start_stays_put(self):
        # |00><00| with zero angles is a cost minimum of the local Hamiltonian;
        # the gradient vanishes so the trace never increases
        rho = DensityMatrix.basis_state(2, "00")
        a = LayeredAnsatz(2, 1, BlockKind.RY_CZ, np.zeros(4))
        res = optimize(rho, a, cost_config(2, 2), StepwiseSchedule(20, 5),
                       OptimizerConfig(lr=0.01), rng=0)
        costs = [p.cost for p in res.trace]
        assert np.all(np.diff(costs) <= 1e-12)
        assert np.array_equal(res.theta_opt, a.theta)

    def test_converges_on_pure_basis_state(self):
        # landscape with a known global minimum at cost = E(00)
        rho = DensityMatrix.basis_state(2, "00")
        cfg = cost_config(2, 2)
        emin = min(cfg.local.energies())
        rng = np.random.default_rng(1)
        a = LayeredAnsatz.random(2, 1, BlockKind.RY_CZ, rng)
        res = optimize(rho, a, cfg, StepwiseSchedule(200, 20), OptimizerConfig(lr=0.1), rng)
        assert res.trace[-1].cost - emin < 1e-8
        assert len(res.trace) == 201

    def test_majorization_holds_along_fixed_cost_traces(self):
        rho = random_density_matrix(3, seed=8)
        lam = exact_eigs(rho)[0]
        for variant in ("local", "global"):
            cfg = cost_config(3, 3, variant)
            h = cfg.local if variant == "local" else cfg.global_part
            floor = np.sort(h.energies()) @ lam
            rng = np.random.default_rng(5)
            a = LayeredAnsatz.random(3, 1, BlockKind.RY_CZ, rng)
            res = optimize(rho, a, cfg, StepwiseSchedule(40, 10), OptimizerConfig(), rng)
            assert all(p.cost >= floor - 1e-10 for p in res.trace)

    def test_adaptive_final_hamiltonian_is_global(self):
        rho = random_density_matrix(2, seed=2)
        cfg = cost_config(2, 2, "adaptive")
        rng = np.random.default_rng(3)
        a = LayeredAnsatz.random(2, 1, BlockKind.RY_CZ, rng)
        res = optimize(rho, a, cfg, StepwiseSchedule(30, 10), OptimizerConfig(), rng)
        h = res.final_hamiltonian
        assert h.t == 1.0 and h.f == 1.0
        assert np.isclose(max(h.energies()), 1.0)

    def test_deterministic_replay(self):
        rho = random_density_matrix(2, seed=6)
        cfg = cost_config(2, 2, "adaptive")

        def run():
            rng = np.random.default_rng(11)
            a = LayeredAnsatz.random(2, 1, BlockKind.RY_CZ, rng)
            return optimize(rho, a, cfg, StepwiseSchedule(20, 5), OptimizerConfig(), rng)

        r1, r2 = run(), run()
        assert np.array_equal(r1.theta_opt, r2.theta_opt)
        assert all(p1 == p2 for p1, p2 in zip(r1.trace, r2.trace))

    def test_gd_option(self):
        rho = DensityMatrix.basis_state(2, "00")
        rng = np.random.default_rng(4)
        a = LayeredAnsatz.random(2, 1, BlockKind.RY_CZ, rng)
        res = optimize(rho, a, cost_config(2, 2), StepwiseSchedule(150, 15),
                       OptimizerConfig(kind="gd", lr=0.3), rng)
        emin = min(cost_config(2, 2).local.energies())
        assert res.trace[-1].cost - emin < 1e-6

    def test_invalid_optimizer_rejected(self):
        with pytest.raises(ValueError):
            OptimizerConfig(kind="lbfgs")

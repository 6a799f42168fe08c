"""Verification harness: reports, random generators, and failure detection."""

import numpy as np
import pytest

from povmcascade.demos import trine_povm
from povmcascade.optics import PhotonState, build_cascade_network, exit_vector, propagate
from povmcascade.povm import (
    density_from_pure,
    density_matrix,
    kraus_from_povm,
    validate_kraus,
)
from povmcascade.qmath import dagger, eig_hermitian2, max_abs, rotation
from povmcascade.synthesis import CascadePlan, ModuleSettings, synthesize_cascade
from povmcascade.verify import (
    random_povm,
    random_pure_state,
    random_rank_one_povm,
    verify_density,
    verify_plan,
)

I2 = np.eye(2, dtype=complex)


class TestVerifyPlan:
    def test_trine_passes_all_checks(self):
        _, kraus, plan = trine_povm()
        report = verify_plan(kraus, plan, trial_states=100, seed=42)
        assert report.passed
        assert report.case_count == 100
        assert report.seed == 42
        assert report.check("f_roundtrip").max_residual <= 1e-8
        assert report.check("probability").max_residual <= 1e-9

    def test_wrong_exit_unitary_fails_only_gauge_sensitive_checks(self):
        _, kraus, plan = trine_povm()
        tampered = list(plan.modules)
        tampered[1] = ModuleSettings(
            theta=tampered[1].theta,
            phi=tampered[1].phi,
            zeta=tampered[1].zeta,
            xi=tampered[1].xi,
            pre_unitary=tampered[1].pre_unitary,
            exit_unitary=rotation(0.8) @ tampered[1].exit_unitary,
        )
        report = verify_plan(kraus, CascadePlan(tuple(tampered), plan.final_exit_unitary))
        assert not report.passed
        assert not report.check("kraus_roundtrip").passed
        assert report.check("f_roundtrip").passed
        assert report.check("probability").passed
        assert report.check("dark_port").passed

    def test_projective_pair_is_exact(self):
        kraus = validate_kraus([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])
        report = verify_plan(kraus, synthesize_cascade(kraus), trial_states=50, seed=3)
        assert report.passed
        for check in report.checks:
            assert check.max_residual <= 1e-12

    def test_reports_are_deterministic(self):
        _, kraus, plan = trine_povm()
        first = verify_plan(kraus, plan, trial_states=25, seed=7)
        second = verify_plan(kraus, plan, trial_states=25, seed=7)
        assert first.to_dict() == second.to_dict()

    def test_report_dict_schema(self):
        _, kraus, plan = trine_povm()
        payload = verify_plan(kraus, plan, trial_states=5, seed=1).to_dict()
        assert set(payload) == {"checks", "seed", "case_count"}
        for entry in payload["checks"]:
            assert set(entry) == {"name", "pass", "max_residual", "tolerance"}


class TestVerifyDensity:
    def test_maximally_mixed_trine(self):
        _, kraus, plan = trine_povm()
        report = verify_density(density_matrix(I2 / 2.0), kraus, plan)
        assert report.passed
        assert report.case_count == 2
        # cross-check the analytic weights directly: tr(F_i)/2 = 1/3 each
        network = build_cascade_network(plan)
        lam, basis = eig_hermitian2(I2 / 2.0)
        probs = np.zeros(3)
        for k, weight in enumerate(lam):
            out = propagate(PhotonState.pure(network.input, basis[:, k]), network)
            for i, mode in enumerate(network.exits):
                vec = exit_vector(out, mode)
                probs[i] += weight * float(np.vdot(vec, vec).real)
        np.testing.assert_allclose(probs, [1.0 / 3.0] * 3, atol=1e-12)

    def test_pure_state_agrees_with_pure_path(self):
        rng = np.random.default_rng(40)
        _, kraus, plan = trine_povm()
        psi = random_pure_state(rng)
        dense = verify_density(density_from_pure(psi), kraus, plan)
        assert dense.passed
        assert dense.case_count == 1
        pure = verify_plan(kraus, plan, trial_states=50, seed=40)
        assert abs(
            dense.check("probability").max_residual - pure.check("probability").max_residual
        ) <= 1e-10

    def test_random_full_rank_states(self):
        rng = np.random.default_rng(41)
        kraus = kraus_from_povm(random_povm(4, 19))
        plan = synthesize_cascade(kraus)
        for _ in range(10):
            w = rng.uniform(0.1, 0.9)
            psi, chi = random_pure_state(rng), random_pure_state(rng)
            rho = w * np.outer(psi, psi.conj()) + (1 - w) * np.outer(chi, chi.conj())
            report = verify_density(density_matrix(0.5 * (rho + dagger(rho))), kraus, plan)
            assert report.passed
            assert report.check("probability").max_residual <= 1e-9
            assert report.check("post_state").max_residual <= 1e-9


class TestRandomPovm:
    def test_pair_sums_exactly(self):
        for seed in range(10):
            povm = random_povm(2, seed)
            total = povm[0] + povm[1]
            assert max_abs(total - I2) <= 1e-12

    def test_seed_seven_four_outcomes_valid(self):
        povm = random_povm(4, 7)
        assert len(povm) == 4  # construction already passed validate_povm

    def test_deterministic_under_seed(self):
        first = random_povm(3, 123)
        second = random_povm(3, 123)
        for a, b in zip(first, second):
            assert np.array_equal(a, b)

    def test_rejects_single_outcome(self):
        with pytest.raises(ValueError):
            random_povm(1, 0)

    def test_pipeline_over_many_seeds(self):
        for seed in range(15):
            kraus = kraus_from_povm(random_povm(6, seed))
            report = verify_plan(kraus, synthesize_cascade(kraus), trial_states=10, seed=seed)
            assert report.passed, [c.name for c in report.checks if not c.passed]


class TestRandomRankOnePovm:
    def test_elements_are_rank_one(self):
        for seed in range(10):
            povm = random_rank_one_povm(3, seed)
            for f in povm:
                lam, _ = eig_hermitian2(f)
                assert lam[1] <= 1e-10

    def test_deterministic_under_seed(self):
        first = random_rank_one_povm(4, 5)
        second = random_rank_one_povm(4, 5)
        for a, b in zip(first, second):
            assert np.array_equal(a, b)

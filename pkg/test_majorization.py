"""Tests for majorization, substochastic matrices and the majorization theorem."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from gpt_spectra import majorization
from gpt_spectra.configuration import Tolerances
from gpt_spectra.core import Measurement, is_valid_measurement
from gpt_spectra.errors import NegativeEntry, NotFineGrained
from gpt_spectra.majorization import (
    TransitionMatrix,
    fine_grained_split,
    group_average_majorization,
    is_doubly_substochastic,
    majorizes,
    measurement_entropy,
    partial_sum_slack,
    prob_vector,
    sample_finegrained_measurement,
    spectral_measurement,
    substochastic_witness,
    transition_matrix,
    verify_theorem_majorization,
    weak_majorizes,
)
from gpt_spectra.models import make_ball, make_classical, make_quantum
from gpt_spectra.seeding import derive_seed
from gpt_spectra.spectral import decompose, spectral_entropy


class TestMajorizationOrder:
    def test_uniform_is_majorized_by_everything(self):
        assert majorizes([0.7, 0.2, 0.1], [1 / 3, 1 / 3, 1 / 3])
        assert not majorizes([1 / 3, 1 / 3, 1 / 3], [0.7, 0.2, 0.1])

    def test_order_of_entries_is_irrelevant(self):
        assert majorizes([0.1, 0.7, 0.2], [0.3, 0.3, 0.4])

    def test_unequal_lengths_are_padded(self):
        assert majorizes([0.5, 0.5], [0.25, 0.25, 0.25, 0.25])
        assert_allclose(partial_sum_slack([0.5, 0.5], [0.5, 0.5, 0.0]), [0.0, 0.0, 0.0])

    def test_weak_majorization_allows_smaller_total(self):
        assert weak_majorizes([0.6, 0.4], [0.5, 0.3])
        assert not majorizes([0.6, 0.4], [0.5, 0.3])

    def test_weak_majorization_fails_on_larger_partial_sum(self):
        assert not weak_majorizes([0.5, 0.5], [0.6, 0.1])


class TestSubstochastic:
    def test_doubly_stochastic(self):
        assert is_doubly_substochastic(np.array([[0.5, 0.5], [0.5, 0.5]]))

    def test_row_sum_too_large(self):
        assert not is_doubly_substochastic(np.array([[0.7, 0.5], [0.1, 0.2]]))

    def test_negative_entry(self):
        with pytest.raises(NegativeEntry):
            is_doubly_substochastic(np.array([[-0.1, 0.5], [0.5, 0.5]]))

    def test_witness_agrees_with_definition(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            m = rng.uniform(0.0, 0.8, size=(3, 3))
            has_witness = substochastic_witness(m) is not None
            assert has_witness == (not is_doubly_substochastic(m))

    def test_prob_vector_clamps_small_negatives(self):
        assert_allclose(prob_vector([0.5, -1e-14, 0.5]), [0.5, 0.0, 0.5])
        with pytest.raises(NegativeEntry):
            prob_vector([0.5, -0.1])


class TestFineGrained:
    def test_split_of_quantum_basis_measurement(self):
        sys = make_quantum(2)
        m = Measurement.from_matrix(np.array([[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0]]))
        split = fine_grained_split(m, sys)
        assert [c for c, _ in split] == pytest.approx([1.0, 1.0])

    def test_scaled_atoms_are_fine_grained(self):
        sys = make_classical(2)
        m = Measurement.from_matrix(np.array([[0.5, 0.0], [0.5, 0.0], [0.0, 1.0]]))
        assert [c for c, _ in fine_grained_split(m, sys)] == pytest.approx([0.5, 0.5, 1.0])

    def test_coarse_effect_rejected(self):
        sys = make_classical(3)
        m = Measurement.from_matrix(np.array([[1.0, 1.0, 0.0], [0.0, 0.0, 1.0]]))
        with pytest.raises(NotFineGrained):
            fine_grained_split(m, sys)

    @pytest.mark.parametrize("sys", [make_classical(3), make_quantum(2), make_ball(3)])
    def test_sampled_measurements_are_valid_and_fine_grained(self, sys):
        for seed in range(5):
            m = sample_finegrained_measurement(sys, seed=seed)
            assert is_valid_measurement(m, sys).valid
            fine_grained_split(m, sys)

    @pytest.mark.parametrize("sys", [make_quantum(2), make_quantum(3), make_ball(3), make_classical(4)])
    def test_sampled_effects_add_up_to_the_unit_for_many_seeds(self, sys):
        x = sys.sample_state(np.random.default_rng(0))
        for i in range(200):
            m = sample_finegrained_measurement(sys, seed=derive_seed(1, i))
            assert_allclose(m.matrix.sum(axis=0), sys.unit, atol=1e-9)
            assert float(np.sum(m.matrix @ x)) == pytest.approx(1.0, abs=1e-9)

    def test_misreported_nnls_residual_falls_back_to_a_valid_measurement(self, monkeypatch):
        sys = make_quantum(2)
        monkeypatch.setattr(majorization, "nnls", lambda a, b: (np.full(a.shape[1], 0.05), 0.0))
        m = sample_finegrained_measurement(sys, seed=derive_seed(1, 4))
        assert is_valid_measurement(m, sys).valid
        assert_allclose(m.matrix.sum(axis=0), sys.unit, atol=1e-9)
        fine_grained_split(m, sys)

    def test_transition_matrix_is_doubly_substochastic(self):
        sys = make_quantum(2)
        rng = np.random.default_rng(2)
        x = sys.sample_state(rng)
        dec = decompose(x, sys)
        t = transition_matrix(sample_finegrained_measurement(sys, seed=3), dec, sys)
        assert t.row_stochastic
        assert t.column_substochastic
        assert is_doubly_substochastic(t.m, tol=1e-9)

    def test_spectral_measurement_reproduces_the_spectrum(self):
        sys = make_quantum(3)
        x = sys.coords(np.diag([0.5, 0.3, 0.2]))
        outcomes = spectral_measurement(x, sys).matrix @ x
        assert_allclose(np.sort(outcomes)[::-1], [0.5, 0.3, 0.2], atol=1e-12)

    def test_stochastic_tolerance_comes_from_the_configuration(self):
        t = TransitionMatrix(np.eye(2), np.ones(2), np.eye(2), np.eye(2), stochastic_error=1e-9, row_excess=0.0)
        assert not t.row_stochastic
        relaxed = TransitionMatrix(
            np.eye(2), np.ones(2), np.eye(2), np.eye(2), 1e-9, 0.0, Tolerances(majorization=1e-8)
        )
        assert relaxed.row_stochastic

    def test_majorization_tolerance_reaches_the_group_average(self):
        sys = make_classical(3)
        weights = [1 / 6 + 5e-10] + [1 / 6] * 5
        with pytest.raises(ValueError):
            group_average_majorization(sys, [0.6, 0.3, 0.1], weights=weights)
        report = group_average_majorization(sys, [0.6, 0.3, 0.1], weights=weights, tol=Tolerances(majorization=1e-6))
        assert report.holds


class TestMajorizationTheorem:
    @pytest.mark.parametrize("sys", [make_quantum(2), make_quantum(3), make_ball(3), make_classical(4)])
    def test_no_violations(self, sys):
        rng = np.random.default_rng(7)
        for i in range(3):
            report = verify_theorem_majorization(sys, sys.sample_state(rng), n_measurements=20, seed=i)
            assert report.holds, report.witness
            assert report.worst_margin >= -1e-9

    def test_threads_do_not_change_the_report(self):
        sys = make_quantum(2)
        x = sys.sample_state(np.random.default_rng(1))
        single = verify_theorem_majorization(sys, x, n_measurements=10, seed=5, threads=1)
        pooled = verify_theorem_majorization(sys, x, n_measurements=10, seed=5, threads=4)
        assert single.model_dump() == pooled.model_dump()

    @pytest.mark.slow
    @pytest.mark.parametrize("sys", [make_quantum(2), make_quantum(3), make_ball(3), make_classical(4)])
    def test_no_violations_full_budget(self, sys):
        rng = np.random.default_rng(2024)
        for i in range(200):
            assert verify_theorem_majorization(sys, sys.sample_state(rng), n_measurements=200, seed=i).holds


class TestEntropies:
    @pytest.mark.parametrize("sys", [make_quantum(2), make_ball(3), make_classical(3)])
    def test_measurement_entropy_attained_by_spectral_measurement(self, sys):
        rng = np.random.default_rng(4)
        for i in range(3):
            x = sys.sample_state(rng)
            gap = measurement_entropy(x, sys, budget=30, seed=i) - spectral_entropy(x, sys)
            assert -1e-9 <= gap <= 1e-9

    @pytest.mark.parametrize("sys", [make_quantum(3), make_ball(3)])
    def test_no_sampled_measurement_beats_the_spectral_entropy(self, sys):
        rng = np.random.default_rng(11)
        for i in range(3):
            x = sys.sample_state(rng)
            assert measurement_entropy(x, sys, budget=60, seed=i) >= spectral_entropy(x, sys) - 1e-9


class TestGroupAverage:
    @pytest.mark.parametrize("sys", [make_quantum(2), make_ball(3)])
    def test_sampled_group_average(self, sys):
        x = sys.sample_state(np.random.default_rng(8))
        report = group_average_majorization(sys, x, n_group_samples=10, seed=1)
        assert report.holds
        assert report.method == "sampled"

    def test_full_classical_group(self):
        sys = make_classical(3)
        report = group_average_majorization(sys, [0.6, 0.3, 0.1])
        assert report.holds
        assert report.method == "exact"
        assert report.samples == 6

    def test_weights_must_match_the_group(self):
        with pytest.raises(ValueError):
            group_average_majorization(make_classical(3), [0.6, 0.3, 0.1], weights=[0.5, 0.5])

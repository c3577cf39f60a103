"""Tests for separation maps and the membrane work ledger."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from gpt_spectra.errors import FiltersIncomplete
from gpt_spectra.models import make_ball, make_classical, make_quantum
from gpt_spectra.projective import build_filter
from gpt_spectra.spectral import spectral_entropy
from gpt_spectra.thermo import (
    BOLTZMANN,
    CompositeState,
    Branch,
    isothermal_compress,
    membrane_map,
    run_von_neumann,
    separate,
    separation_map,
    spectral_filters,
)

QUBIT_MIXED = np.array([0.75, 0.25, 0.0, 0.0])


def test_spectral_filters_cover_the_unit():
    sys = make_quantum(2)
    filters = spectral_filters(QUBIT_MIXED, sys)
    assert len(filters) == 2
    assert_allclose(sum(f.unit_effect.coords for f in filters), sys.unit, atol=1e-9)


def test_spectral_filters_complete_a_pure_state():
    sys = make_classical(3)
    filters = spectral_filters([1.0, 0.0, 0.0], sys)
    assert len(filters) == 2
    assert_allclose(filters[1].unit_effect.coords, [0.0, 1.0, 1.0])


def test_separation_preserves_normalization():
    sys = make_ball(3)
    filters = spectral_filters(np.array([1.0, 0.0, 0.0, 0.5]), sys)
    t = separation_map(filters, sys, samples=10)
    z = np.concatenate([sys.sample_state(np.random.default_rng(0)), np.zeros(sys.dim)])
    blocks = (t @ z).reshape(2, sys.dim)
    assert float(blocks.sum(axis=0) @ sys.unit) == pytest.approx(1.0)


def test_separate_reads_off_the_spectrum():
    sys = make_quantum(2)
    composite = separate(QUBIT_MIXED, spectral_filters(QUBIT_MIXED, sys), sys)
    assert_allclose(sorted(composite.weights, reverse=True), [0.75, 0.25])
    for branch in composite.branches:
        assert sys.is_pure(branch.state)


def test_incomplete_filters_rejected():
    sys = make_classical(3)
    f = build_filter(sys.face_of(np.array([1.0, 0.0, 0.0])), sys)
    with pytest.raises(FiltersIncomplete):
        separation_map([f], sys)


def test_membrane_map_is_a_two_container_separation():
    sys = make_classical(2)
    f = build_filter(sys.face_of(np.array([1.0, 0.0])), sys)
    t = membrane_map(f, sys)
    assert t.shape == (4, 4)
    assert_allclose(t @ np.array([0.3, 0.7, 0.0, 0.0]), [0.3, 0.0, 0.0, 0.7])


def test_isothermal_compression_costs():
    composite = CompositeState([Branch(0, 0.75, np.array([1.0, 0.0])), Branch(1, 0.25, np.array([1.0, 0.0]))])
    compressed, step = isothermal_compress(composite, temperature=2.0, k=1.0)
    assert_allclose(step.works, [-2.0 * np.log(0.75), -2.0 * np.log(0.25)])
    assert step.expected_work == pytest.approx(2.0 * (-0.75 * np.log(0.75) - 0.25 * np.log(0.25)))
    assert sum(compressed.volumes) == pytest.approx(1.0)


def test_zero_weight_branches_are_dropped():
    composite = CompositeState([Branch(0, 1.0, np.array([1.0, 0.0])), Branch(1, 0.0, None)])
    compressed, step = isothermal_compress(composite, temperature=1.0, k=1.0)
    assert len(compressed.branches) == 1
    assert step.works == [pytest.approx(0.0)]


@pytest.mark.parametrize("sys", [make_quantum(2), make_classical(3), make_ball(3)])
def test_work_to_a_pure_state_is_the_entropy(sys):
    omega = sys.sample_state(np.random.default_rng(3))
    ledger = run_von_neumann(omega, sys.reference_pure_state(), sys, temperature=1.0, k=1.0)
    assert ledger.expected_work_over_kT == pytest.approx(spectral_entropy(omega, sys), abs=1e-9)
    assert ledger.target_entropy == pytest.approx(0.0, abs=1e-12)


def test_ledger_total_is_the_entropy_difference():
    sys = make_quantum(2)
    rng = np.random.default_rng(9)
    omega, sigma = sys.sample_state(rng), sys.sample_state(rng)
    ledger = run_von_neumann(omega, sigma, sys, temperature=300.0)
    expected = BOLTZMANN * 300.0 * (spectral_entropy(omega, sys) - spectral_entropy(sigma, sys))
    assert ledger.total_expected_work == pytest.approx(expected, rel=1e-9, abs=1e-30)
    assert ledger.steps[0].assumption == "costless-separation"
    assert ledger.steps[-1].assumption == "reversal"


def test_ledger_serializes_computed_totals():
    sys = make_classical(2)
    ledger = run_von_neumann([0.5, 0.5], [1.0, 0.0], sys, temperature=1.0, k=1.0)
    dumped = ledger.model_dump()
    assert dumped["expected_work_over_kT"] == pytest.approx(np.log(2))
    assert "expected_work" in dumped["steps"][0]

"""Tests for the order isomorphism phi, self-duality and the orthotracial subspace."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from gpt_spectra.errors import NotABasis
from gpt_spectra.models import make_ball, make_classical, make_quantum, make_square_bit
from gpt_spectra.perfection import (
    build_phi,
    check_basis_independence,
    check_compression_symmetry,
    check_inner_product,
    check_perfection,
    orthotracial_subspace,
    perfection_pipeline,
    phi_for,
    sample_atomic_basis,
)
from gpt_spectra.projective import build_filter


@pytest.mark.parametrize("sys, scale", [(make_classical(3), 1.0), (make_quantum(2), 1.0), (make_ball(3), 2.0)])
def test_phi_is_a_multiple_of_the_identity(sys, scale):
    phi = phi_for(sys, seed=3)
    assert phi.label == "atomic-basis"
    assert_allclose(phi.matrix, scale * np.eye(sys.dim), atol=1e-8)


def test_phi_sends_the_unit_to_the_maximally_mixed_direction():
    sys = make_quantum(3)
    phi = phi_for(sys)
    assert_allclose(phi(sys.unit), sys.unit, atol=1e-8)


def test_build_phi_rejects_short_basis():
    sys = make_classical(3)
    basis = sample_atomic_basis(sys, seed=0)[:2]
    with pytest.raises(NotABasis):
        build_phi(sys, basis)


@pytest.mark.parametrize("sys", [make_classical(3), make_quantum(2), make_ball(3)])
def test_phi_does_not_depend_on_the_basis(sys):
    report = check_basis_independence(sys, n_bases=3, seed=1)
    assert report.holds, report.witness


@pytest.mark.parametrize("sys", [make_classical(3), make_quantum(2), make_ball(3)])
def test_inner_product_is_positive_definite(sys):
    report = check_inner_product(phi_for(sys))
    assert report.holds
    assert report.worst_margin > 0


def test_compression_is_symmetric_under_the_form():
    sys = make_quantum(2)
    phi = phi_for(sys)
    f = build_filter(sys.face_of(np.array([1.0, 0.0, 0.0, 0.0])), sys)
    assert check_compression_symmetry(phi, [f], sys, samples=10, seed=2).holds


@pytest.mark.parametrize("sys", [make_classical(3), make_quantum(2), make_ball(3)])
def test_self_dual_models_are_perfect(sys):
    report = check_perfection(sys, phi_for(sys), samples=16, seed=5)
    assert report.cone_self_dual
    assert report.perfect, report.notes


def test_classical_perfection_is_exact():
    report = perfection_pipeline(make_classical(3), n_bases=2)
    assert report.method == "exact"
    assert report.perfect
    assert len(report.face_reports) == 6


def test_square_bit_form_is_not_an_inner_product():
    sys = make_square_bit()
    report = perfection_pipeline(sys)
    assert not report.perfect
    assert report.gram_min_eigenvalue < 0
    assert report.notes


def test_classical_orthotracial_subspace_is_everything():
    sys = make_classical(3)
    report = orthotracial_subspace(sys, phi_for(sys))
    assert report.dimension == 3
    assert report.contains_unit
    assert report.exploratory


def test_quantum_orthotracial_subspace_contains_the_unit():
    sys = make_quantum(2)
    report = orthotracial_subspace(sys, phi_for(sys), cap=16, seed=1)
    assert report.contains_unit
    assert 1 <= report.dimension <= sys.dim


@pytest.mark.parametrize("sys", [make_classical(3), make_quantum(2), make_ball(3)])
def test_gram_pairs_the_atomic_basis_through_phi(sys):
    phi = build_phi(sys, sample_atomic_basis(sys, seed=2))
    w = phi.basis_atoms
    expected = np.array([[wi @ phi(wj) for wj in w] for wi in w])
    assert_allclose(phi.gram, expected, atol=1e-12)
    assert np.linalg.eigvalsh(0.5 * (phi.gram + phi.gram.T))[0] > 0


def test_classical_gram_is_the_identity():
    phi = phi_for(make_classical(4), seed=1)
    assert_allclose(phi.gram, np.eye(4), atol=1e-12)


def test_forced_form_is_expressed_in_coordinates():
    phi = phi_for(make_square_bit())
    assert_allclose(phi.form_basis, np.eye(3))
    assert_allclose(phi.gram, phi.matrix, atol=1e-12)

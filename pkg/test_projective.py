"""Tests for filters, hat/tilde and the face-lattice checks."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from gpt_spectra.configuration import Tolerances
from gpt_spectra.errors import NotAtomic, NotPure
from gpt_spectra.models import make_ball, make_classical, make_puffed_triangle, make_quantum, make_square_bit
from gpt_spectra.projective import (
    build_filter,
    check_hat_tilde,
    check_lemma_distinguishability,
    check_orthomodular_identities,
    check_projectivity,
    check_STP,
    hat,
    neutrality_check,
    tilde,
    transition_probability,
)

NORTH = np.array([1.0, 0.0, 0.0, 1.0])
EAST = np.array([1.0, 1.0, 0.0, 0.0])


def test_classical_filter_projects_onto_coordinates():
    sys = make_classical(3)
    f = build_filter(sys.face_of(np.array([0.5, 0.5, 0.0])), sys)
    assert_allclose(f(np.array([0.2, 0.3, 0.5])), [0.2, 0.3, 0.0])
    assert_allclose(f.complement.matrix @ np.array([0.2, 0.3, 0.5]), [0.0, 0.0, 0.5])
    assert_allclose(f.unit_effect.coords, [1.0, 1.0, 0.0])


def test_quantum_filter_onto_a_ray():
    sys = make_quantum(2)
    f = build_filter(sys.face_of(np.array([1.0, 0.0, 0.0, 0.0])), sys)
    assert_allclose(f(np.array([0.75, 0.25, 0.0, 0.0])), [0.75, 0.0, 0.0, 0.0], atol=1e-12)
    assert f.complement_face.rank == 1


def test_ball_filter_scales_the_centre_onto_the_pole():
    sys = make_ball(3)
    f = build_filter(sys.face_of(NORTH), sys)
    assert_allclose(f(sys.unit.copy()), [0.5, 0.0, 0.0, 0.5], atol=1e-12)
    assert_allclose(f.complement.matrix @ NORTH, 0.0, atol=1e-12)


def test_filter_is_neutral():
    sys = make_classical(3)
    f = build_filter(sys.face_of(np.array([0.5, 0.5, 0.0])), sys)
    assert neutrality_check(f, sys, samples=20, seed=1).holds


@pytest.mark.parametrize("sys", [make_classical(3), make_quantum(2), make_ball(3)])
def test_projectivity_holds(sys):
    report = check_projectivity(sys, cap=20, net_size=64)
    assert report.holds, report.witness
    assert report.check == "projectivity"


def test_square_bit_is_not_projective():
    report = check_projectivity(make_square_bit(), net_size=64)
    assert not report.holds
    assert report.method == "exact"
    assert report.witness is not None


@pytest.mark.parametrize("sys", [make_classical(3), make_quantum(2), make_quantum(3), make_ball(3)])
def test_transition_probabilities_are_symmetric(sys):
    assert check_STP(sys, n_pairs=20, seed=3).holds


def test_square_bit_fails_symmetry_of_transition_probabilities():
    assert not check_STP(make_square_bit(), n_pairs=20).holds


@pytest.mark.parametrize("sys", [make_classical(3), make_quantum(2), make_ball(3)])
def test_distinguishability_agrees_with_faces(sys):
    report = check_lemma_distinguishability(sys, n_pairs=12, seed=2)
    assert report.holds, report.witness
    assert report.samples > 0


@pytest.mark.parametrize("sys", [make_classical(3), make_quantum(2), make_ball(3)])
def test_orthomodular_identities(sys):
    report = check_orthomodular_identities(sys, cap=32, seed=1)
    assert report.holds, report.witness


def test_tilde_and_hat_on_the_qubit():
    sys = make_quantum(2)
    zero = np.array([1.0, 0.0, 0.0, 0.0])
    pi = tilde(zero, sys)
    assert pi.effect.coords @ zero == pytest.approx(1.0)
    assert_allclose(hat(pi, sys).coords, zero, atol=1e-9)


def test_hat_rejects_non_atomic_effect():
    with pytest.raises(NotAtomic):
        hat(np.array([1.0, 1.0, 0.0]), make_classical(3))


def test_tilde_rejects_mixed_state():
    with pytest.raises(NotPure):
        tilde(np.array([0.5, 0.5, 0.0, 0.0]), make_quantum(2))


def test_transition_probability_between_unbiased_qubit_states():
    sys = make_quantum(2)
    zero = np.array([1.0, 0.0, 0.0, 0.0])
    plus = sys.coords(np.array([[0.5, 0.5], [0.5, 0.5]]))
    assert transition_probability(zero, plus, sys) == pytest.approx(0.5)
    assert transition_probability(plus, zero, sys) == pytest.approx(0.5)


def test_transition_probability_on_the_ball():
    sys = make_ball(3)
    assert transition_probability(NORTH, EAST, sys) == pytest.approx(0.5)
    with pytest.raises(NotPure):
        transition_probability(sys.unit.copy(), NORTH, sys)


@pytest.mark.parametrize("sys", [make_quantum(2), make_ball(3), make_classical(4)])
def test_hat_inverts_tilde(sys):
    assert check_hat_tilde(sys, n_samples=10, seed=6).holds


def test_puffed_triangle_has_asymmetric_transition_probabilities():
    report = check_STP(make_puffed_triangle(0.1, 0.05), n_pairs=20, seed=1)
    assert not report.holds
    assert report.witness is not None


def test_stp_tolerance_comes_from_the_configuration():
    sys = make_puffed_triangle(0.1, 0.05)
    strict = check_STP(sys, n_pairs=20, seed=1)
    relaxed = check_STP(sys, n_pairs=20, seed=1, tol=Tolerances(sampled=1.0))
    assert not strict.holds
    assert relaxed.holds
    assert relaxed.worst_margin == pytest.approx(strict.worst_margin)

"""Tests for the model catalog."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from gpt_spectra.core import ModelKind
from gpt_spectra.errors import ConfigError, InvalidAxis, NotAtomic, NotPure
from gpt_spectra.models import (
    make_ball,
    make_bipyramid,
    make_classical,
    make_ellipse,
    make_polytope,
    make_puffed_triangle,
    make_quantum,
    make_square_bit,
    model_from_spec,
)


@pytest.mark.parametrize(
    "sys, n_max",
    [
        (make_classical(4), 4),
        (make_quantum(3), 3),
        (make_ball(3), 2),
        (make_square_bit(), 2),
        (make_bipyramid(), 3),
        (make_ellipse(2.0, 1.0), 2),
    ],
)
def test_n_max(sys, n_max):
    assert sys.n_max == n_max


@pytest.mark.parametrize(
    "sys, n_facets",
    [
        (make_square_bit(), 4),
        (make_bipyramid(), 6),
        (make_polytope([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]), 3),
    ],
)
def test_facet_counts(sys, n_facets):
    assert len(sys.facets) == n_facets


@pytest.mark.parametrize(
    "sys",
    [make_classical(3), make_quantum(2), make_ball(3), make_ellipse(2.0, 1.0), make_square_bit(), make_bipyramid()],
)
def test_sampled_states_are_normalized_and_in_cone(sys):
    rng = np.random.default_rng(3)
    for _ in range(10):
        x = sys.sample_state(rng)
        assert sys.unit @ x == pytest.approx(1.0)
        assert sys.in_cone(x, tol=1e-9)
        omega = sys.sample_pure(rng)
        assert sys.is_pure(omega)


@pytest.mark.parametrize("sys", [make_classical(3), make_quantum(2), make_ball(3), make_ellipse(2.0, 1.0)])
def test_tilde_is_one_on_its_state(sys):
    rng = np.random.default_rng(11)
    for _ in range(5):
        omega = sys.sample_pure(rng)
        e = sys.tilde(omega)
        assert e @ omega == pytest.approx(1.0, abs=1e-9)
        lo, hi = sys.effect_range(e)
        assert lo == pytest.approx(0.0, abs=1e-8)
        assert hi == pytest.approx(1.0, abs=1e-8)
        assert_allclose(sys.hat(e), omega, atol=1e-7)


def test_quantum_coordinates_round_trip():
    sys = make_quantum(2)
    rho = np.array([[0.6, 0.2 - 0.1j], [0.2 + 0.1j, 0.4]])
    assert_allclose(sys.matrix(sys.coords(rho)), rho, atol=1e-12)


def test_quantum_decomposition_of_diagonal_state():
    sys = make_quantum(2)
    parts = sys.decompose(np.array([0.75, 0.25, 0.0, 0.0]))
    assert [p for p, _ in parts] == pytest.approx([0.75, 0.25])
    assert_allclose(parts[0][1], [1.0, 0.0, 0.0, 0.0], atol=1e-12)


def test_quantum_tilde_rejects_mixed_state():
    with pytest.raises(NotPure):
        make_quantum(2).tilde(np.array([0.5, 0.5, 0.0, 0.0]))


def test_ball_centre_splits_evenly():
    sys = make_ball(3)
    parts = sys.decompose(sys.unit.copy())
    assert [p for p, _ in parts] == pytest.approx([0.5, 0.5])
    assert_allclose(parts[0][1] + parts[1][1], [2.0, 0.0, 0.0, 0.0])


def test_ball_tilde_is_half_sum():
    sys = make_ball(2)
    omega = np.array([1.0, 0.6, 0.8])
    assert_allclose(sys.tilde(omega), [0.5, 0.3, 0.4])


def test_ellipse_boundary_is_on_the_curve():
    sys = make_ellipse(2.0, 1.0)
    for t in np.linspace(0.0, 2 * np.pi, 7):
        _, x, y = sys.boundary(t)
        assert (x / 2.0) ** 2 + y**2 == pytest.approx(1.0)


def test_ellipse_chord_through_off_centre_state_is_unique():
    sys = make_ellipse(2.0, 1.0, chord_resolution=2000)
    found = sys.decompositions(np.array([1.0, 0.6, 0.4]))
    assert len(found) == 1
    assert sum(p for p, _ in found[0]) == pytest.approx(1.0)


def test_puffed_triangle_decomposes_along_a_chord():
    sys = make_puffed_triangle(0.1, 0.05, chord_resolution=2000)
    a, b = sys.boundary(0.3), sys.boundary(0.3 + np.pi)
    x = 0.5 * (a + b)
    probabilities = [sorted(p for p, _ in d) for d in sys.decompositions(x)]
    assert any(np.allclose(p, [0.5, 0.5], atol=1e-6) for p in probabilities)


def test_puffed_triangle_rejects_non_convex_parameters():
    with pytest.raises(InvalidAxis):
        make_puffed_triangle(0.2, 0.1)


def test_puffed_triangle_symmetry_group_is_a_reflection_pair():
    group = make_puffed_triangle(0.1, 0.05).symmetry_group()
    assert len(group) == 2


def test_square_symmetry_group_is_dihedral():
    assert len(make_square_bit().symmetry_group()) == 8


def test_polytope_hat_of_non_atom():
    sys = make_square_bit()
    with pytest.raises(NotAtomic):
        sys.hat(np.array([0.5, 0.1, 0.1]))


def test_bipyramid_barycenter_has_two_decompositions():
    sys = make_bipyramid()
    centre = sys.vertices.mean(axis=0)
    probabilities = sorted(sorted(p for p, _ in d) for d in sys.decompositions(centre))
    assert len(probabilities) == 2
    assert probabilities[0] == pytest.approx([1 / 3, 1 / 3, 1 / 3], abs=1e-12)
    assert probabilities[1] == pytest.approx([0.5, 0.5], abs=1e-12)


def test_model_from_spec_defaults_and_params():
    assert model_from_spec({"model": "quantum", "d": 3}).dim == 9
    assert model_from_spec({"model": "ball"}).dim == 4
    assert model_from_spec({"model": "square_bit"}).kind is ModelKind.SQUARE_BIT


def test_model_from_spec_polyhedral_spec_round_trip():
    sys = model_from_spec({"model": "polyhedral", "vertices": [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]})
    rebuilt = model_from_spec(sys.spec())
    assert_allclose(rebuilt.vertices, sys.vertices)


@pytest.mark.parametrize("spec", [{"model": "torus"}, {"d": 2}, {"model": "quantum", "q": 1}])
def test_model_from_spec_rejects_bad_blocks(spec):
    with pytest.raises(ConfigError):
        model_from_spec(spec)


@pytest.mark.parametrize("build, arg", [(make_quantum, 1), (make_ball, 1), (make_classical, 0)])
def test_invalid_dimensions(build, arg):
    with pytest.raises(InvalidAxis):
        build(arg)

"""Tests for facet enumeration, face lattices and dual cones."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from gpt_spectra import polyhedral
from gpt_spectra.errors import DegenerateInput, LatticeTooLarge, NotInCone, SingularInnerProduct
from gpt_spectra.models.polytope import SQUARE_VERTICES, bipyramid_vertices

SIMPLEX_2D = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]


def _as_row_set(rows: np.ndarray) -> set[tuple[float, ...]]:
    return {tuple(np.round(r, 9) + 0.0) for r in rows}


@pytest.mark.parametrize(
    "vertices, n_facets",
    [(SQUARE_VERTICES, 4), (SIMPLEX_2D, 3), (bipyramid_vertices(), 6)],
)
def test_facet_counts(vertices, n_facets):
    spec = polyhedral.facet_enumerate(vertices)
    assert len(spec.facets) == n_facets
    assert len(spec.tight_sets) == n_facets


def test_square_facets_are_normalized_effects():
    spec = polyhedral.facet_enumerate(SQUARE_VERTICES)
    expected = {(0.5, -0.5, 0.0), (0.5, 0.5, 0.0), (0.5, 0.0, -0.5), (0.5, 0.0, 0.5)}
    assert _as_row_set(spec.facets) == expected
    slack = spec.slack()
    assert slack.min() == pytest.approx(0.0, abs=1e-12)
    assert_allclose(slack.max(axis=1), 1.0)


def test_collinear_points_are_degenerate():
    with pytest.raises(DegenerateInput) as info:
        polyhedral.facet_enumerate([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]])
    assert info.value.facets is not None
    assert len(info.value.facets.facets) == 2


def test_square_face_lattice():
    spec = polyhedral.facet_enumerate(SQUARE_VERTICES)
    faces = polyhedral.face_lattice(spec)
    assert len(faces) == 10
    assert faces[0] == frozenset()
    assert faces[-1] == frozenset(range(4))


def test_face_lattice_cap():
    spec = polyhedral.facet_enumerate(SQUARE_VERTICES)
    with pytest.raises(LatticeTooLarge):
        polyhedral.face_lattice(spec, cap=5)


def test_face_of():
    spec = polyhedral.facet_enumerate(SQUARE_VERTICES)
    assert polyhedral.face_of(np.array([1.0, 0.0, 1.0]), spec) == frozenset({0, 1})
    assert polyhedral.face_of(np.array([1.0, 1.0, 1.0]), spec) == frozenset({0})
    assert polyhedral.face_of(np.array([1.0, 0.2, -0.1]), spec) == frozenset(range(4))
    assert polyhedral.face_of(np.zeros(3), spec) == frozenset()


def test_face_of_outside_point():
    spec = polyhedral.facet_enumerate(SQUARE_VERTICES)
    with pytest.raises(NotInCone):
        polyhedral.face_of(np.array([1.0, 2.0, 0.0]), spec)


def test_face_of_is_monotone_on_mixtures():
    spec = polyhedral.facet_enumerate(bipyramid_vertices())
    rng = np.random.default_rng(5)
    for _ in range(10):
        w = rng.dirichlet(np.ones(len(spec.vertices)))
        sigma = spec.vertices[rng.integers(len(spec.vertices))]
        omega = 0.7 * (w @ spec.vertices) + 0.3 * sigma
        assert polyhedral.face_of(sigma, spec) <= polyhedral.face_of(omega, spec)


def test_orthant_is_self_dual():
    rays = np.eye(3)
    assert polyhedral.rays_equal(polyhedral.dual_cone(rays), rays)


@pytest.mark.parametrize("vertices", [SQUARE_VERTICES, bipyramid_vertices()])
def test_double_duality(vertices):
    rays = polyhedral.homogenize(vertices)
    twice = polyhedral.dual_cone(polyhedral.dual_cone(rays))
    assert polyhedral.rays_equal(twice, rays, tol=1e-9)
    assert polyhedral.ray_mismatch(twice, rays) < 1e-9


def test_square_cone_is_not_self_dual_under_the_standard_form():
    rays = polyhedral.homogenize(SQUARE_VERTICES)
    dual = polyhedral.dual_cone(rays)
    assert not polyhedral.rays_equal(dual, rays)
    assert polyhedral.ray_mismatch(dual, rays) > 0.1


def test_dual_cone_rejects_asymmetric_form():
    with pytest.raises(SingularInnerProduct):
        polyhedral.dual_cone(np.eye(2), np.array([[1.0, 1.0], [0.0, 1.0]]))


def test_dual_cone_needs_spanning_rays():
    with pytest.raises(DegenerateInput):
        polyhedral.dual_cone(np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]))

import numpy as np
import pytest

from ddfem.boundary import (
    BoundaryMap,
    BoundaryTerms,
    DirichletValue,
    FluxC,
    FluxPair,
    FluxV,
    as_condition,
    is_dirichlet,
)
from ddfem.cli.checks import halton_points
from ddfem.errors import BoundaryError
from ddfem.model import PdeModel


def diffusion(boundary):
    return PdeModel(dim_range=1, F_v=lambda t, x, U, DU: DU, boundary=boundary)


def mixed_terms(domain, flux_value=0.0):
    model = diffusion(
        {
            "Ball0": DirichletValue(lambda t, x: 1.0),
            "Ball1": FluxV(lambda t, x, U, DU, n: flux_value),
        }
    )
    return BoundaryTerms(model, domain)


def test_as_condition_pairs_fluxes_in_any_order():
    fc = FluxC(lambda t, x, U, n: 0.0)
    fv = FluxV(lambda t, x, U, DU, n: 0.0)
    pair = as_condition([fv, fc])
    assert isinstance(pair, FluxPair)
    assert pair.flux_c is fc and pair.flux_v is fv


def test_as_condition_rejects_bare_callables():
    with pytest.raises(BoundaryError):
        as_condition(lambda t, x: 0.0)


def test_flux_pair_wraps_plain_callables():
    pair = FluxPair(lambda t, x, U, n: 1.0, lambda t, x, U, DU, n: 2.0)
    assert isinstance(pair.flux_c, FluxC)
    assert isinstance(pair.flux_v, FluxV)
    assert pair.flux_v(0, None, None, None, None) == 2.0


def test_boundary_map_splits_diffuse_and_mesh_entries(unit_ball):
    dirichlet = DirichletValue(lambda t, x: 0.0)
    boundary = BoundaryMap(
        [
            (unit_ball, dirichlet),
            ("Ball", FluxV(lambda t, x, U, DU, n: 0.0)),
            (lambda x: x[:, 0] > 0, dirichlet),
        ]
    )
    assert len(boundary.diffuse) == 2
    assert len(boundary.mesh) == 1
    assert len(boundary) == 3
    assert boundary.has_diffuse_dirichlet
    assert is_dirichlet(next(iter(boundary))[1])


def test_boundary_map_rejects_unknown_keys():
    with pytest.raises(BoundaryError):
        BoundaryMap({3: DirichletValue(lambda t, x: 0.0)})


def test_partition_of_unity(two_ball_domain):
    terms = mixed_terms(two_ball_domain)
    x = halton_points([(-2.0, 2.0), (-1.5, 1.5)], 4096)
    omega = terms.normalized_weights(x)
    assert omega.shape == (4096, 2)
    assert np.all(omega >= 0)
    np.testing.assert_allclose(omega.sum(axis=1), 1.0, atol=1e-12)


def test_weights_select_nearest_segment(two_ball_domain):
    terms = mixed_terms(two_ball_domain)
    # just outside the right arc (Ball0) and the left arc (Ball1)
    x = np.array([[1.6, 0.0], [-1.6, 0.0]])
    omega = terms.normalized_weights(x)
    np.testing.assert_allclose(omega[0], [1.0, 0.0], atol=1e-12)
    np.testing.assert_allclose(omega[1], [0.0, 1.0], atol=1e-12)


def test_dirichlet_aggregates(two_ball_domain):
    terms = mixed_terms(two_ball_domain)
    x = np.array([[1.6, 0.0], [-1.6, 0.0]])
    U = np.full((2, 1), 3.0)
    np.testing.assert_allclose(terms.bnd_value_ext(0.0, x), [[1.0], [0.0]], atol=1e-12)
    np.testing.assert_allclose(terms.jump_v(0.0, x, U), [[2.0], [0.0]], atol=1e-12)


def test_flux_aggregates_scale_with_surface_delta(two_ball_domain):
    terms = mixed_terms(two_ball_domain, flux_value=2.0)
    x = np.array([[-1.5, 0.0], [1.5, 0.0]])
    U = np.zeros((2, 1))
    DU = np.zeros((2, 1, 2))
    delta = two_ball_domain.surface_delta(x)
    np.testing.assert_allclose(terms.bnd_flux_v_ext(0.0, x, U, DU)[:, 0], [2.0 * delta[0], 0.0], atol=1e-9)
    # F_v . n - g_v with F_v = DU = 0
    np.testing.assert_allclose(terms.jump_fv(0.0, x, U, DU)[:, 0], [-2.0 * delta[0], 0.0], atol=1e-9)
    assert terms.bnd_flux_c_ext(0.0, x, U) is None


def test_extend_value_uses_closest_boundary_point(unit_ball_domain):
    model = diffusion({"Ball": DirichletValue(lambda t, x: x[:, :1])})
    terms = BoundaryTerms(model, unit_ball_domain)
    x = np.array([[2.0, 0.0], [0.0, 0.5]])
    np.testing.assert_allclose(terms.extend_value(lambda t, p: p, 0.0, x), [[1.0, 0.0], [0.0, 1.0]], atol=1e-12)


def test_index_of_accepts_labels_nodes_and_positions(two_ball_domain, two_balls):
    terms = mixed_terms(two_ball_domain)
    assert terms.labels == ["Ball0", "Ball1"]
    assert terms.index_of("Ball1") == 1
    assert terms.index_of(two_balls[0]) == 0
    assert terms.index_of(1) == 1
    with pytest.raises(BoundaryError):
        terms.index_of("Ball2")
    assert terms.dirichlet_index == [0]
    assert terms.flux_index == [1]


def test_flux_wrapper_must_match_model(unit_ball_domain):
    model = diffusion({"Ball": FluxC(lambda t, x, U, n: 0.0)})
    with pytest.raises(BoundaryError):
        BoundaryTerms(model, unit_ball_domain)

    both = PdeModel(
        dim_range=1,
        F_c=lambda t, x, U: 0.0,
        F_v=lambda t, x, U, DU: DU,
        boundary={"Ball": FluxV(lambda t, x, U, DU, n: 0.0)},
    )
    with pytest.raises(BoundaryError):
        BoundaryTerms(both, unit_ball_domain)


def test_flux_condition_without_model_flux(unit_ball_domain):
    model = PdeModel(
        dim_range=1,
        S_i=lambda t, x, U, DU: -U,
        boundary={"Ball": FluxV(lambda t, x, U, DU, n: 0.0)},
    )
    with pytest.raises(BoundaryError):
        BoundaryTerms(model, unit_ball_domain)


def test_unknown_segment_name(unit_ball_domain):
    model = diffusion({"Ghost": DirichletValue(lambda t, x: 0.0)})
    with pytest.raises(BoundaryError):
        BoundaryTerms(model, unit_ball_domain)

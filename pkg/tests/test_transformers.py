import itertools

import numpy as np
import pytest

from ddfem.boundary import DirichletValue, FluxC, FluxPair, FluxV
from ddfem.cli.checks import halton_points
from ddfem.errors import ModelError, RegistryError, TransformError
from ddfem.geometry import Ball, Domain
from ddfem.model import (
    PdeModel,
    advection_diffusion,
    evaluate_residual_integrand,
    heat_neumann,
    model_to_weak_form,
    poisson,
)
from ddfem.transformers import (
    SourceComposition,
    TransformedModel,
    default_mesh_condition,
    get_transformer,
    list_transformers,
    outside_region,
    posttransform,
    pretransform,
    transformer,
)


def _model(has_fc: bool, has_fv: bool, has_sources: bool) -> PdeModel:
    return PdeModel(
        dim_range=1,
        F_c=(lambda t, x, U: U[:, :, None] * np.ones(2)) if has_fc else None,
        F_v=(lambda t, x, U, DU: DU) if has_fv else None,
        S_i=(lambda t, x, U, DU: -U) if has_sources else None,
        S_e=(lambda t, x, U, DU: 1.0) if has_sources else None,
        boundary={"Ball": DirichletValue(lambda t, x: 0.0)},
        out_factor_i=1.0,
    )


@pytest.mark.parametrize("has_fc, has_fv, has_sources", list(itertools.product([False, True], repeat=3)))
def test_composition_table(unit_ball_domain, has_fc, has_fv, has_sources):
    if not (has_fc or has_fv or has_sources):
        with pytest.raises(ModelError):
            _model(has_fc, has_fv, has_sources)
        return

    model = _model(has_fc, has_fv, has_sources)
    composition = SourceComposition.from_model(model)
    expected_i = tuple(
        name
        for name, present in (("S_i_source", has_sources), ("S_i_diffusion", has_fv), ("S_outside", True))
        if present
    )
    expected_e = tuple(
        name for name, present in (("S_e_source", has_sources), ("S_e_convection", has_fc)) if present
    )
    assert composition.S_i == expected_i
    assert composition.S_e == expected_e
    assert composition.F_c == has_fc
    assert composition.F_v == has_fv

    exposed = {"S_i"} | ({"S_e"} if expected_e else set())
    exposed |= {name for name, present in (("F_c", has_fc), ("F_v", has_fv)) if present}
    assert composition.exposed() == exposed

    transformed = get_transformer("ddm1")(model, unit_ball_domain)
    assert set(transformed.defined()) == exposed

    x = np.array([[0.0, 0.0], [1.05, 0.0], [0.0, -1.3]])
    U = np.ones((3, 1))
    DU = np.zeros((3, 1, 2))
    for name in transformed.defined():
        fn = getattr(transformed, name)
        value = fn(0.0, x, U) if name == "F_c" else fn(0.0, x, U, DU)
        assert np.all(np.isfinite(value))


def test_posttransform_rebuilds_the_same_composition(unit_ball_domain):
    transformed = get_transformer("ddm1")(_model(True, True, True), unit_ball_domain)
    again = posttransform(transformed)
    assert isinstance(again, TransformedModel)
    assert again.composition == transformed.composition
    assert again.transformer == "ddm1"


def test_dirichlet_needs_an_out_factor(unit_ball):
    domain = Domain(unit_ball, epsilon=0.1)
    with pytest.raises(TransformError):
        get_transformer("ddm1")(poisson(boundary=unit_ball), domain)


def test_registry():
    assert "ddm1" in list_transformers()
    assert get_transformer("DDM1") is get_transformer("ddm1")
    with pytest.raises(RegistryError):
        get_transformer("nddm")
    with pytest.raises(RegistryError):

        @transformer(name="ddm1")
        def duplicate(model, original, domain, bt):
            return {}


def test_custom_transformer_without_registration(unit_ball_domain):
    @transformer(name="identity", register=False)
    def identity(model, original, domain, bt):
        return {
            "S_i_source": model.S_i,
            "S_i_diffusion": lambda t, x, U, DU: None,
            "S_outside": lambda t, x, U, DU: -bt.jump_v(t, x, U),
            "F_v": model.F_v,
        }

    model = poisson(boundary="Ball", out_factor_i=1.0)
    result = identity(model, unit_ball_domain)
    assert result.transformer == "identity"
    assert "identity" not in list_transformers()
    x = np.array([[0.0, 0.0]])
    np.testing.assert_allclose(result.S_i(0.0, x, np.zeros((1, 1)), np.zeros((1, 1, 2))), [[-1.0]])


def test_interior_consistency(rng):
    eps = 0.05
    domain = Domain(Ball(radius=1.0, center=(0.0, 0.0), name="Ball"), epsilon=eps)
    original = model_to_weak_form(advection_diffusion())
    transformed = model_to_weak_form(
        get_transformer("ddm1")(advection_diffusion(boundary="Ball", out_factor_i=1.0), domain)
    )

    n = 1000
    radius = (1.0 - 10 * eps) * np.sqrt(rng.uniform(0, 1, n))
    angle = rng.uniform(0, 2 * np.pi, n)
    x = np.column_stack([radius * np.cos(angle), radius * np.sin(angle)])
    U = rng.normal(size=(n, 1))
    DU = rng.normal(size=(n, 1, 2))
    v = rng.normal(size=(n, 1))
    Dv = rng.normal(size=(n, 1, 2))

    expected = evaluate_residual_integrand(original, 0.0, x, U, DU, v, Dv)
    actual = evaluate_residual_integrand(transformed, 0.0, x, U, DU, v, Dv)
    np.testing.assert_allclose(actual, expected, rtol=1e-12, atol=1e-12 * np.max(np.abs(expected)))


def test_outside_penalty_scales_with_exponent(unit_ball_domain):
    model = poisson(boundary="Ball", out_factor_i=1.0)
    x = np.array([[1.05, 0.0]])
    U = np.ones((1, 1))
    DU = np.zeros((1, 1, 2))
    cubic = get_transformer("ddm1")(model, unit_ball_domain)
    square = get_transformer("ddm1")(model, unit_ball_domain, penalty_exponent=2)
    ratio = cubic.raw.methods["S_outside"](0.0, x, U, DU) / square.raw.methods["S_outside"](0.0, x, U, DU)
    np.testing.assert_allclose(ratio, 1.0 / unit_ball_domain.epsilon)


def test_penalty_vanishes_near_flux_segment(two_ball_domain):
    model = advection_diffusion(
        boundary={
            "Ball0": DirichletValue(lambda t, x: 1.0),
            "Ball1": [
                FluxC(lambda t, x, U, n: 0.0),
                FluxV(lambda t, x, U, DU, n: 0.0),
            ],
        },
        out_factor_i=1.0,
    )
    transformed = get_transformer("ddm1")(model, two_ball_domain)
    # outside the far arc of Ball1
    x = np.array([[-1.54, 0.0], [-1.2, 0.9]])
    U = np.full((2, 1), 5.0)
    penalty = transformed.raw.methods["S_outside"](0.0, x, U, np.zeros((2, 1, 2)))
    assert np.all(np.abs(penalty) < 1e-6)


def test_transformed_model_uses_phase_field_mass(unit_ball_domain):
    transformed = get_transformer("ddm1")(heat_neumann(boundary="Ball"), unit_ball_domain)
    x = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])
    np.testing.assert_allclose(transformed.mass(x), unit_ball_domain.phi(x))
    assert transformed.bt.labels == ["Ball"]

def test_pretransform_extends_coefficients_by_projection(unit_ball_domain):
    model = advection_diffusion(boundary="Ball", out_factor_i=1.0)
    extended, bt = pretransform(model, unit_ball_domain)
    assert bt.labels == ["Ball"]

    U = np.array([[0.7]])
    DU = np.array([[[0.3, -0.2]]])
    far = np.array([[0.0, 3.0]])
    near = np.array([[0.0, 1.0]])
    np.testing.assert_allclose(extended.F_v(0.0, far, U, DU), model.F_v(0.0, near, U, DU), rtol=1e-14)
    np.testing.assert_allclose(extended.S_i(0.0, far, U, DU), model.S_i(0.0, near, U, DU), rtol=1e-14)
    np.testing.assert_allclose(extended.F_c(0.0, far, U), model.F_c(0.0, near, U), rtol=1e-14)

    inside = np.array([[0.0, 0.0], [0.3, -0.4], [-0.5, 0.5]])
    U = np.array([[1.0], [-2.0], [0.5]])
    DU = np.ones((3, 1, 2))
    np.testing.assert_array_equal(extended.F_v(0.0, inside, U, DU), model.F_v(0.0, inside, U, DU))
    np.testing.assert_array_equal(extended.S_i(0.0, inside, U, DU), model.S_i(0.0, inside, U, DU))


def test_outside_region_selects_chi_below_half(unit_ball_domain):
    region = outside_region(unit_ball_domain)
    x = np.array([[0.0, 0.0], [0.9, 0.0], [1.5, 1.5], [-1.2, 0.3]])
    np.testing.assert_array_equal(region(x), [False, False, True, True])


def test_flux_models_get_the_flux_default_outside(unit_ball_domain):
    model = advection_diffusion(
        boundary={"Ball": [FluxC(lambda t, x, U, n: 0.0), FluxV(lambda t, x, U, DU, n: 2.0)]}
    )
    extended, bt = pretransform(model, unit_ball_domain)
    assert extended.boundary.diffuse == []
    ((region, condition),) = extended.boundary.mesh
    assert isinstance(condition, FluxPair)
    assert isinstance(default_mesh_condition(model, bt), FluxPair)

    corner = np.array([[1.5, 0.2]])
    assert region(corner).all()
    U = np.zeros((1, 1))
    DU = np.zeros((1, 1, 2))
    n = unit_ball_domain.normal(corner)
    expected = 2.0 * unit_ball_domain.surface_delta(corner)[:, None]
    np.testing.assert_allclose(condition.flux_v(0.0, corner, U, DU, n), expected)
    np.testing.assert_allclose(condition.flux_c(0.0, corner, U, n), 0.0)

    diffusion_only = heat_neumann(boundary="Ball")
    _, bt = pretransform(diffusion_only, unit_ball_domain)
    assert isinstance(default_mesh_condition(diffusion_only, bt), FluxV)


def test_dirichlet_models_get_the_extended_value_outside(unit_ball_domain):
    model = poisson(boundary={"Ball": DirichletValue(lambda t, x: x[:, :1])}, out_factor_i=1.0)
    extended, _ = pretransform(model, unit_ball_domain)
    ((region, condition),) = extended.boundary.mesh
    assert isinstance(condition, DirichletValue)

    x = np.array([[3.0, 0.0], [0.0, 2.0], [1.5, 1.5]])
    assert region(x).all()
    np.testing.assert_allclose(condition(0.0, x), [[1.0], [0.0], [np.sqrt(0.5)]], atol=1e-12)


def test_outside_penalty_opposes_the_dirichlet_jump(two_ball_domain):
    model = poisson(
        boundary={
            "Ball0": DirichletValue(lambda t, x: 1.0),
            "Ball1": DirichletValue(lambda t, x: x[:, :1]),
        },
        out_factor_i=1.0,
    )
    transformed = get_transformer("ddm1")(model, two_ball_domain)
    penalty = transformed.raw.methods["S_outside"]

    x = halton_points([(-2.0, 2.0), (-1.5, 1.5)], 2048, seed=7)
    G = transformed.bt.bnd_value_ext(0.0, x)
    offsets = halton_points([(0.01, 2.0), (0.0, 1.0)], len(x), seed=11)[:, :1]
    DU = np.zeros((len(x), 1, 2))
    outside = two_ball_domain.sdf(x) > two_ball_domain.epsilon
    assert outside.any()
    for sign in (1.0, -1.0):
        U = G + sign * offsets
        product = penalty(0.0, x, U, DU) * (U - G)
        assert np.all(product <= 0.0)
        assert np.all(product[outside] < 0.0)


def test_zero_flux_data_leaves_phase_field_weighted_sources(unit_ball_domain):
    original = PdeModel(
        dim_range=1,
        F_c=lambda t, x, U: U[:, :, None] * np.array([1.0, -0.5]),
        F_v=lambda t, x, U, DU: DU,
        S_i=lambda t, x, U, DU: np.sin(x[:, :1]) - U,
        S_e=lambda t, x, U, DU: x[:, 1:] * U,
        boundary={"Ball": [FluxC(lambda t, x, U, n: 0.0), FluxV(lambda t, x, U, DU, n: 0.0)]},
    )
    transformed = get_transformer("ddm1")(original, unit_ball_domain)
    assert transformed.composition.S_i == ("S_i_source", "S_i_diffusion")
    assert transformed.composition.S_e == ("S_e_source", "S_e_convection")

    x = halton_points([(-1.5, 1.5), (-1.5, 1.5)], 512, seed=5)
    U = np.cos(x[:, :1])
    DU = np.zeros((len(x), 1, 2))
    phi = unit_ball_domain.phi(x)[:, None]
    projected = unit_ball_domain.external_projection(x)
    np.testing.assert_array_equal(transformed.S_i(0.0, x, U, DU), phi * original.S_i(0.0, projected, U, DU))
    np.testing.assert_array_equal(transformed.S_e(0.0, x, U, DU), phi * original.S_e(0.0, projected, U, DU))

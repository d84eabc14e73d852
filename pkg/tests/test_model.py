import numpy as np
import pytest

from ddfem.arrays import as_state
from ddfem.boundary import DirichletValue, FluxV
from ddfem.errors import ModelError, RegistryError
from ddfem.model import (
    PdeModel,
    advection_diffusion,
    build_problem,
    evaluate_residual_integrand,
    get_problem,
    list_problems,
    mesh_boundary_terms,
    model_to_imex_form,
    model_to_weak_form,
    poisson,
)


def test_model_requires_positive_range():
    with pytest.raises(ModelError):
        PdeModel(dim_range=0, F_v=lambda t, x, U, DU: DU)


def test_model_requires_a_coefficient():
    with pytest.raises(ModelError):
        PdeModel(dim_range=1)


def test_model_rejects_non_callables():
    with pytest.raises(ModelError):
        PdeModel(dim_range=1, S_i=1.0)


def test_defined_lists_present_coefficients():
    model = PdeModel(dim_range=1, F_c=lambda t, x, U: 0.0, S_e=lambda t, x, U, DU: 0.0, out_factor_i=1)
    assert model.defined() == ["F_c", "S_e"]
    assert model.has("F_c") and not model.has("F_v")
    assert model.out_factor_i == 1.0


def test_weak_form_combines_fluxes_and_sources():
    model = PdeModel(
        dim_range=1,
        F_c=lambda t, x, U: U[:, :, None] * np.array([1.0, 0.0]),
        F_v=lambda t, x, U, DU: 2.0 * DU,
        S_i=lambda t, x, U, DU: -U,
        S_e=lambda t, x, U, DU: 1.0,
    )
    form = model_to_weak_form(model)
    x = np.array([[0.1, 0.2], [0.3, 0.4]])
    U = np.array([[1.0], [2.0]])
    DU = np.array([[[1.0, 1.0]], [[0.0, 2.0]]])
    flux, source = form.volume_terms(0.0, x, U, DU)
    np.testing.assert_allclose(flux, [[[1.0, 2.0]], [[-2.0, 4.0]]])
    np.testing.assert_allclose(source, [[0.0], [-1.0]])

    v = np.ones((2, 1))
    Dv = np.array([[[1.0, 0.0]], [[0.0, 1.0]]])
    np.testing.assert_allclose(evaluate_residual_integrand(form, 0.0, x, U, DU, v, Dv), [1.0, 5.0])


def test_weak_form_rejects_diffuse_dirichlet(unit_ball):
    model = poisson(boundary=unit_ball)
    with pytest.raises(ModelError):
        model_to_weak_form(model)


def test_mesh_entries_become_constraints_and_fluxes():
    model = PdeModel(
        dim_range=1,
        F_v=lambda t, x, U, DU: DU,
        boundary=[
            (lambda x: x[:, 0] < 0, DirichletValue(lambda t, x: 1.0)),
            (lambda x: x[:, 0] >= 0, FluxV(lambda t, x, U, DU, n: 0.0)),
        ],
    )
    constraints, fluxes = mesh_boundary_terms(model)
    assert len(constraints) == 1
    assert len(fluxes) == 1
    assert fluxes[0].flux_c is None and fluxes[0].flux_v is not None


def test_imex_form_moves_convection_to_explicit():
    model = PdeModel(
        dim_range=1,
        F_c=lambda t, x, U: U[:, :, None] * np.ones(2),
        F_v=lambda t, x, U, DU: DU,
        mass=lambda x: np.full(len(x), 0.5),
    )
    form = model_to_imex_form(model, t=0.1, dt=0.01)
    assert form.time_dependent
    x = np.zeros((1, 2))
    U = np.array([[2.0]])
    U_prev = np.array([[1.0]])
    DU = np.zeros((1, 1, 2))
    flux, source = form.volume_terms(0.1, x, U, DU, U_prev, DU)
    np.testing.assert_allclose(flux, [[[-1.0, -1.0]]])
    np.testing.assert_allclose(source, [[-0.5 * (2.0 - 1.0) / 0.01]])
    with pytest.raises(ModelError):
        model_to_imex_form(model, t=0.0, dt=0.0)


def test_problem_registry():
    assert list_problems() == ["advection_diffusion", "heat_neumann", "poisson", "reaction3"]
    assert get_problem("poisson") is poisson
    with pytest.raises(RegistryError):
        get_problem("navier_stokes")


def test_poisson_default_exact_solution():
    model = poisson()
    x = np.array([[0.0, 0.0], [1.0, 0.0], [0.6, 0.8]])
    np.testing.assert_allclose(model.exact(0.0, x)[:, 0], [-0.25, 0.0, 0.0], atol=1e-15)
    assert len(model.boundary) == 0


def test_overrides_accept_expressions_and_reject_unknown_names():
    model = advection_diffusion(overrides={"D": "1 - 0.05 * dot(x, x)", "c": 0.0})
    x = np.array([[1.0, 0.0]])
    DU = np.array([[[1.0, 2.0]]])
    np.testing.assert_allclose(model.F_v(0.0, x, np.zeros((1, 1)), DU), [[[0.95, 1.9]]])
    with pytest.raises(ModelError):
        advection_diffusion(overrides={"kappa": 1.0})


def test_build_problem_gives_segment_the_default_condition():
    model = build_problem("heat_neumann", boundary="Ball", out_factor_i=1.0)
    assert len(model.boundary.diffuse) == 1
    key, condition = model.boundary.diffuse[0]
    assert key == "Ball"
    assert isinstance(condition, FluxV)
    assert model.out_factor_i == 1.0
    assert model.initial(np.zeros((1, 2)))[0, 0] == pytest.approx(1.0)


def test_reaction_source_conserves_total():
    model = build_problem("reaction3")
    x = np.array([[0.0, 0.0], [0.3, -0.1]])
    U = np.array([[1.0, 2.0, 0.0], [0.5, 0.5, 1.0]])
    S = model.S_e(0.0, x, U, np.zeros((2, 3, 2)))
    # away from the feeding discs u0 + u1 + u2 is conserved by the reaction
    np.testing.assert_allclose(S.sum(axis=1), 0.0, atol=1e-14)
    np.testing.assert_allclose(S[0], [-20.0, -20.0, 40.0])


def test_state_shape_hint():
    per_point = as_state([1.0, 2.0, 3.0], 3, 3, per_point=True)
    np.testing.assert_array_equal(per_point, [[1.0] * 3, [2.0] * 3, [3.0] * 3])
    per_component = as_state([1.0, 2.0, 3.0], 3, 3, per_point=False)
    np.testing.assert_array_equal(per_component, [[1.0, 2.0, 3.0]] * 3)
    with pytest.raises(ModelError):
        as_state([1.0, 2.0, 3.0], 3, 3)

    # unambiguous lengths need no hint
    np.testing.assert_array_equal(as_state([1.0, 2.0], 2, 1), [[1.0], [2.0]])
    np.testing.assert_array_equal(as_state([1.0, 2.0, 3.0], 2, 3), [[1.0, 2.0, 3.0]] * 2)
    np.testing.assert_array_equal(as_state([1.0, 2.0], 2, 3), [[1.0] * 3, [2.0] * 3])
    assert as_state(4.0, 2, 3).shape == (2, 3)

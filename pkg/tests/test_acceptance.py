"""End to end experiments on the bundled scenes."""

from pathlib import Path

import numpy as np
import pytest

from ddfem.boundary import BoundaryTerms, DirichletValue
from ddfem.cli import cmd_convergence, cmd_validate, sample_fields, solve_scene
from ddfem.config import RunConfig
from ddfem.config.scene import load_scene
from ddfem.fem import build_mesh
from ddfem.model import PdeModel

SCENES = Path(__file__).parent.parent / "scenes"

pytestmark = pytest.mark.slow


def _arc(center, angles):
    return np.column_stack([center[0] + np.cos(angles), center[1] + np.sin(angles)])


@pytest.fixture
def run(tmp_path):
    return RunConfig(out_dir=str(tmp_path), quiet=True)


@pytest.fixture
def two_balls_scene():
    return load_scene(SCENES / "two_balls_mixed.json")


def test_poisson_converges_in_epsilon(run):
    scene = load_scene(SCENES / "poisson_ball.json")
    rows = cmd_convergence(scene, run, [0.2, 0.1, 0.05])
    errors = [row["l2_error_chi"] for row in rows]
    assert all(a > b for a, b in zip(errors, errors[1:]))
    assert errors[-1] <= 0.5 * errors[0]
    assert [row["h"] for row in rows] == pytest.approx([0.1, 0.05, 0.025])
    assert (Path(run.out_dir) / "poisson_ball" / "convergence" / "convergence.csv").exists()


def test_neumann_heat_conserves_mass(run):
    scene = load_scene(SCENES / "heat_three_balls.json")
    assert (scene.epsilon, scene.time.dt, scene.time.steps) == (0.05, 1e-3, 100)
    outcome = solve_scene(scene, run)
    assert max(outcome.stats["mass_drift"]) <= 1e-3
    assert len(outcome.stats["times"]) == 101


def test_partition_of_unity_on_grid(two_balls_scene):
    domain = two_balls_scene.build_domain()
    zero = DirichletValue(lambda t, x: 0.0)
    weights_model = PdeModel(dim_range=1, S_i=lambda t, x, U, DU: 0.0, boundary={"Ball0": zero, "Ball1": zero})
    terms = BoundaryTerms(weights_model, domain)

    grid = build_mesh(two_balls_scene.box, 199).vertices
    assert len(grid) == 200 * 200
    np.testing.assert_allclose(terms.normalized_weights(grid).sum(axis=1), 1.0, rtol=0, atol=1e-12)

    # far arcs, more than 10 epsilon of arc length away from the intersections at angle +-120 degrees
    angles = np.linspace(-np.pi / 2, np.pi / 2, 41)
    for offset in (-domain.epsilon, 0.0, domain.epsilon):
        right = _arc((0.5, 0.0), angles)
        right += offset * (right - [0.5, 0.0])
        left = _arc((-0.5, 0.0), np.pi - angles)
        left += offset * (left - [-0.5, 0.0])
        assert np.all(terms.normalized_weights(right)[:, 1] < 1e-6)
        assert np.all(terms.normalized_weights(left)[:, 0] < 1e-6)


def test_render_weights_split_left_and_right(two_balls_scene):
    domain = two_balls_scene.build_domain()
    angles = np.linspace(-np.pi / 3, np.pi / 3, 9)
    far0 = _arc((0.5, 0.0), angles)
    far1 = _arc((-0.5, 0.0), np.pi - angles)
    data = sample_fields(two_balls_scene, domain, np.concatenate([far0, far1]), ["weight:Ball0", "phi"])
    weight = data["weight:Ball0"]
    assert np.all(weight[: len(far0)] > 0.9)
    assert np.all(weight[len(far0) :] < 0.1)
    np.testing.assert_allclose(data["phi"], 0.5, atol=1e-12)


def test_mixed_conditions_stay_local(two_balls_scene, run):
    outcome = solve_scene(two_balls_scene, run)
    domain = outcome.model.domain
    points = outcome.mesh.active_points()
    U = outcome.field.evaluate_vertices()[:, 0]

    r = domain.sdf(points)
    near_far_arc = (np.abs(r) <= domain.epsilon) & (points[:, 0] >= 1.0)
    assert np.count_nonzero(near_far_arc) > 10
    assert np.max(np.abs(U[near_far_arc] - 1.0)) <= 0.05

    # the Dirichlet penalty does not reach the flux segment
    angles = np.linspace(-np.pi / 3, np.pi / 3, 9)
    x = _arc((-0.5, 0.0), np.pi - angles)
    x += 0.02 * (x - [-0.5, 0.0])
    penalty = outcome.model.raw.methods["S_outside"](0.0, x, np.full((len(x), 1), 5.0), np.zeros((len(x), 1, 2)))
    assert np.all(np.abs(penalty) < 1e-6)


def test_five_ball_contour_has_bites_and_lobes():
    scene = load_scene(SCENES / "five_balls.json")
    domain = scene.build_domain()

    def crossings(points):
        inside = domain.phi(points) > 0.5
        return np.count_nonzero(inside[1:] != inside[:-1])

    line = np.linspace(-2.0, 2.0, 801)
    # the bites split the row above the centre into two pieces
    assert crossings(np.column_stack([line, np.full_like(line, 0.4)])) == 4
    assert crossings(np.column_stack([line, np.full_like(line, -0.4)])) == 4
    # the centre row ends on the cut off circle
    assert crossings(np.column_stack([line, np.zeros_like(line)])) == 2
    # the vertical axis only crosses the neck between the bites
    axis = np.column_stack([np.zeros_like(line), line])
    inside = line[domain.phi(axis) > 0.5]
    assert inside.min() == pytest.approx(-0.3, abs=0.01)
    assert inside.max() == pytest.approx(0.3, abs=0.01)


def test_five_ball_scene_validates(run):
    assert cmd_validate(load_scene(SCENES / "five_balls.json"), run)

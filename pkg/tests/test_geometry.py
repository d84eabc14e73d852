import json

import numpy as np
import pytest

from ddfem.cli.checks import halton_points
from ddfem.errors import BoundaryError, GeometryError
from ddfem.geometry import (
    Ball,
    Box,
    Domain,
    Extrusion,
    HalfPlane,
    Intersection,
    Invert,
    Revolution,
    Rotate,
    Round,
    SDF,
    Scale,
    Subtraction,
    Translate,
    Union,
    Xor,
    finite_difference_gradient,
    sdf_eval,
    sdf_from_dict,
    sdf_to_dict,
    search,
    set_epsilon,
)


def test_ball_distance_and_gradient():
    ball = Ball(radius=1, center=(0, 0))
    x = np.array([[2.0, 0.0], [0.0, 0.0], [0.0, -3.0]])
    np.testing.assert_allclose(ball(x), [1.0, -1.0, 2.0])
    grad = ball.gradient(x)
    np.testing.assert_allclose(grad[0], [1.0, 0.0])
    np.testing.assert_allclose(grad[1], [1.0, 0.0])  # center falls back to the first axis
    np.testing.assert_allclose(grad[2], [0.0, -1.0])


def test_box_distance():
    box = Box(size=(2, 2), center=(0, 0))
    x = np.array([[2.0, 0.0], [0.0, 0.0], [2.0, 2.0], [0.5, 0.0]])
    np.testing.assert_allclose(box(x), [1.0, -1.0, np.sqrt(2.0), -0.5])


def test_box_gradient_matches_finite_differences():
    box = Box(size=(2, 1), center=(0.3, 0.0))
    x = np.array([[2.0, 0.1], [0.3, 0.05], [-1.5, 1.5], [1.0, -0.3]])
    np.testing.assert_allclose(box.gradient(x), finite_difference_gradient(box.sdf, x), atol=1e-6)


def test_half_plane_normalises_normal():
    plane = HalfPlane(normal=(0, 2), offset=1.0)
    np.testing.assert_allclose(plane(np.array([[5.0, 3.0], [0.0, 1.0]])), [2.0, 0.0])
    np.testing.assert_allclose(plane.gradient(np.zeros((1, 2))), [[0.0, 1.0]])


@pytest.mark.parametrize(
    "kwargs",
    [
        {"radius": 0, "center": (0, 0)},
        {"radius": 1, "center": 0.0},
    ],
)
def test_ball_rejects_bad_arguments(kwargs):
    with pytest.raises(GeometryError):
        Ball(**kwargs)


def test_operators_build_nodes(two_balls):
    a, b = two_balls
    assert isinstance(a | b, Union)
    assert isinstance(a & b, Intersection)
    assert isinstance(a - b, Subtraction)
    assert isinstance(a ^ b, Xor)
    assert isinstance(-a, Invert)
    assert isinstance(~a, Invert)


def test_boolean_values(two_balls):
    a, b = two_balls
    x = np.array([[0.0, 0.0], [1.2, 0.0], [-1.2, 0.0], [0.0, 2.0]])
    ra, rb = a(x), b(x)
    np.testing.assert_allclose((a | b)(x), np.minimum(ra, rb))
    np.testing.assert_allclose((a & b)(x), np.maximum(ra, rb))
    np.testing.assert_allclose((a - b)(x), np.maximum(ra, -rb))
    np.testing.assert_allclose((-a)(x), -ra)


def _random_tree(rng):
    """A random composition of 2 to 4 balls together with its membership oracle."""
    count = rng.integers(2, 5)
    balls = [
        (rng.uniform(-0.8, 0.8, size=2), rng.uniform(0.2, 0.9)) for _ in range(count)
    ]

    def member(c, radius):
        return lambda x: np.linalg.norm(x - c, axis=-1) < radius

    node = Ball(radius=balls[0][1], center=balls[0][0])
    inside = member(*balls[0])
    for c, radius in balls[1:]:
        other, other_inside = Ball(radius=radius, center=c), member(c, radius)
        op = rng.integers(3)
        if op == 0:
            node = node | other
            inside = (lambda f, g: lambda x: f(x) | g(x))(inside, other_inside)
        elif op == 1:
            node = node & other
            inside = (lambda f, g: lambda x: f(x) & g(x))(inside, other_inside)
        else:
            node = node - other
            inside = (lambda f, g: lambda x: f(x) & ~g(x))(inside, other_inside)
    return node, inside


def test_composed_sign_matches_membership(rng):
    x = halton_points([(-2.0, 2.0), (-2.0, 2.0)], 10_000, seed=3)
    for _ in range(20):
        node, inside = _random_tree(rng)
        r = node(x)
        clear = np.abs(r) > 1e-12
        np.testing.assert_array_equal((r < 0)[clear], inside(x)[clear])


def test_union_keeps_unit_gradient_away_from_kinks(two_balls):
    a, b = two_balls
    x = np.array([[2.0, 0.3], [-2.0, -0.4], [0.0, 1.5]])
    np.testing.assert_allclose(np.linalg.norm((a | b).gradient(x), axis=1), 1.0)


def test_translate_rotate_scale():
    ball = Ball(radius=0.5, center=(1.0, 0.0))
    moved = Translate(ball, (0.0, 2.0))
    np.testing.assert_allclose(moved(np.array([[1.0, 2.0]])), [-0.5])

    turned = Rotate(ball, angle=np.pi / 2)
    np.testing.assert_allclose(turned(np.array([[0.0, 1.0]])), [-0.5], atol=1e-12)

    scaled = Scale(ball, 2.0)
    # ball of radius 1 around (2, 0)
    np.testing.assert_allclose(scaled(np.array([[2.0, 0.0], [4.0, 0.0]])), [-1.0, 1.0])


def test_rotate_rejects_non_orthogonal_matrix():
    with pytest.raises(GeometryError):
        Rotate(Ball(1, (0, 0)), matrix=[[2.0, 0.0], [0.0, 1.0]])


def test_dimension_mismatch_raises():
    with pytest.raises(GeometryError):
        Ball(1, (0, 0))(np.zeros((3, 3)))


def test_epsilon_propagates_and_operators_report_max(two_balls):
    a, b = two_balls
    a.epsilon = 0.1
    b.epsilon = 0.2
    assert (a | b).epsilon == 0.2
    root = a | b
    root.epsilon = 0.05
    assert a.epsilon == b.epsilon == 0.05
    with pytest.raises(GeometryError):
        Ball(1, (0, 0)).epsilon


def test_domain_can_keep_node_epsilon(two_balls):
    a, b = two_balls
    a.epsilon = 0.02
    root = a | b
    domain = Domain(root, epsilon=0.1, keep_node_epsilon=True)
    assert domain.epsilon == 0.1
    assert (a.epsilon, b.epsilon, root.epsilon) == (0.02, 0.1, 0.1)
    assert domain.segment_epsilon(a) == 0.02

    Domain(root, epsilon=0.05)
    assert a.epsilon == b.epsilon == 0.05
    with pytest.raises(GeometryError):
        root.fill_epsilon(0.0)


def test_phase_field_identities(unit_ball_domain):
    eps = unit_ball_domain.epsilon
    r = np.array([0.0, 0.3 * eps, eps, 2 * eps, -eps, -2 * eps])
    x = np.stack([1.0 + r, np.zeros_like(r)], axis=1)
    mirrored = np.stack([1.0 - r, np.zeros_like(r)], axis=1)
    phi = unit_ball_domain.phi(x)
    assert phi[0] == pytest.approx(0.5)
    np.testing.assert_allclose(phi + unit_ball_domain.phi(mirrored), 1.0, atol=1e-14)
    far = np.abs(r) >= eps
    chi = unit_ball_domain.chi(x)
    assert np.all(np.abs(phi - chi)[far] <= 0.0025)
    assert np.all((phi >= 0) & (phi <= 1))


def test_surface_delta_peak(unit_ball_domain):
    delta = unit_ball_domain.surface_delta(np.array([[0.0, 1.0]]))
    assert delta[0] == pytest.approx(1.5 / unit_ball_domain.epsilon)


def test_normal_is_outward_unit(unit_ball_domain):
    x = np.array([[1.05, 0.0], [0.0, -0.9]])
    n = unit_ball_domain.normal(x)
    np.testing.assert_allclose(n, [[1.0, 0.0], [0.0, -1.0]], atol=1e-12)


def test_boundary_projection_lands_on_zero_level(unit_ball_domain):
    x = np.array([[1.2, 0.3], [-0.4, -0.2], [0.0, 1.5]])
    projected = unit_ball_domain.boundary_projection(x)
    np.testing.assert_allclose(unit_ball_domain.omega(projected), 0.0, atol=1e-12)
    external = unit_ball_domain.external_projection(x)
    np.testing.assert_allclose(external[1], x[1])


def test_point_data_cache_keys_on_array_identity(unit_ball_domain):
    x = np.array([[0.5, 0.0]])
    first = unit_ball_domain.point_data(x)
    assert unit_ball_domain.point_data(x) is first
    assert unit_ball_domain.point_data(x.copy()) is not first


def test_segment_lookup(two_ball_domain, two_balls):
    assert two_ball_domain.segment("Ball1") is two_balls[1]
    assert two_ball_domain.segment(two_balls[0]) is two_balls[0]
    with pytest.raises(BoundaryError):
        two_ball_domain.segment("Nowhere")
    with pytest.raises(BoundaryError):
        two_ball_domain.segment(Ball(1, (0, 0)))


def test_segment_weight_is_one_on_own_segment(two_ball_domain):
    # (1.5, 0) is on the boundary of Ball0 only
    x = np.array([[1.5, 0.0]])
    assert two_ball_domain.segment_weight("Ball0", x)[0] == pytest.approx(1.0)
    assert two_ball_domain.segment_weight("Ball1", x)[0] < 1e-12


def test_duplicate_names_rejected():
    a = Ball(1, (0, 0), name="A")
    b = Ball(1, (1, 0), name="A")
    with pytest.raises(GeometryError):
        Domain(a | b, epsilon=0.1)


def test_serialize_round_trip_preserves_values():
    data = {
        "kind": "subtraction",
        "name": "Shape",
        "epsilon": 0.05,
        "children": [
            {"kind": "union", "children": [
                {"kind": "ball", "radius": 1.0, "center": [0, 0], "name": "Center"},
                {"kind": "box", "size": [1, 0.5], "center": [1, 0]},
            ]},
            {"kind": "translate", "offset": [0, 0.8], "children": [
                {"kind": "ball", "radius": 0.3, "center": [0, 0], "name": "Cut"},
            ]},
        ],
    }
    node = sdf_from_dict(data)
    assert node.name == "Shape"
    assert node.search("Cut").epsilon == 0.05
    again = sdf_from_dict(json.loads(json.dumps(sdf_to_dict(node))))
    x = halton_points([(-2, 2), (-2, 2)], 256)
    np.testing.assert_allclose(again(x), node(x))
    assert again.names() == node.names()


def test_serialize_refs_share_nodes():
    data = {
        "kind": "union",
        "children": [
            {"kind": "ball", "radius": 1, "center": [0, 0], "name": "A"},
            {"kind": "translate", "offset": [1, 0], "children": [{"ref": "A"}]},
        ],
    }
    node = sdf_from_dict(data)
    assert node.children[1].child is node.children[0]


@pytest.mark.parametrize(
    "data",
    [
        {"kind": "triangle"},
        {"kind": "ball", "center": [0, 0]},
        {"kind": "union", "children": [{"kind": "ball", "radius": 1, "center": [0, 0]}]},
        {"kind": "invert", "children": [{"ref": "missing"}]},
    ],
)
def test_serialize_rejects_malformed(data):
    with pytest.raises(GeometryError):
        sdf_from_dict(data)


def test_subtraction_example():
    cut = Ball(1, (0, 0)) - Ball(0.5, (0, 0.8))
    np.testing.assert_allclose(cut(np.array([[0.0, 0.8]])), [0.5])


def test_union_gradient_selects_closer_ball(two_balls):
    a, b = two_balls
    x = np.array([[1.2, 0.4]])
    union = a | b
    np.testing.assert_allclose(union.gradient(x), a.gradient(x))
    np.testing.assert_allclose(union.gradient(x), finite_difference_gradient(union.sdf, x), atol=1e-5)


def test_round_inflates_the_child():
    rounded = Round(Box(size=(2, 2), center=(0, 0)), 0.25)
    np.testing.assert_allclose(rounded(np.array([[1.25, 0.0], [0.0, 0.0]])), [0.0, -1.25])


def test_extrusion_values_and_gradient():
    slab = Extrusion(Ball(1, (0, 0)), height=2.0)
    assert slab.dim == 3
    x = np.array([[0.0, 0.0, 0.0], [0.0, 0.0, 2.0], [2.0, 0.0, 2.0]])
    np.testing.assert_allclose(slab(x), [-1.0, 1.0, np.sqrt(2.0)])
    points = np.array([[0.3, 0.2, 0.4], [1.5, 0.5, 1.7], [0.2, -0.1, -1.4], [1.6, 0.3, 0.2]])
    np.testing.assert_allclose(slab.gradient(points), finite_difference_gradient(slab.sdf, points), atol=1e-6)
    with pytest.raises(GeometryError):
        Extrusion(Ball(1, (0, 0)), height=0.0)
    with pytest.raises(GeometryError):
        Extrusion(Ball(1, (0, 0, 0)), height=1.0)


def test_revolution_builds_a_torus():
    torus = Revolution(Ball(0.5, (1.0, 0.0)))
    x = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.5], [0.0, 0.0, 0.0]])
    np.testing.assert_allclose(torus(x), [-0.5, 0.0, 0.5], atol=1e-15)
    points = np.array([[0.4, 0.9, 0.2], [-1.7, 0.1, -0.3]])
    np.testing.assert_allclose(torus.gradient(points), finite_difference_gradient(torus.sdf, points), atol=1e-6)


def test_functional_interface(two_balls):
    root = two_balls[0] | two_balls[1]
    x = np.array([[1.5, 0.0]])
    np.testing.assert_allclose(sdf_eval(root, x), [0.0])
    assert search(root, "Ball1") is two_balls[1]
    assert search(root, "Nowhere") is None
    set_epsilon(root, 0.02)
    assert two_balls[1].epsilon == 0.02


def test_fluent_transforms_chain():
    shape = Ball(0.5, (0, 0)).translate((1.0, 0.0)).scale(2.0).round(0.1, name="Shape")
    assert isinstance(shape, Round)
    assert shape.name == "Shape"
    np.testing.assert_allclose(shape(np.array([[2.0, 0.0]])), [-1.1])


def test_custom_primitive_uses_finite_difference_gradient():
    class Ring(SDF):
        def sdf(self, x):
            return np.abs(np.linalg.norm(x, axis=-1) - 1.0) - 0.1

    ring = Ring()
    x = np.array([[1.5, 0.0], [0.0, -0.5]])
    np.testing.assert_allclose(ring.gradient(x), [[1.0, 0.0], [0.0, 1.0]], atol=1e-6)

"""Shared fixtures: small domains and meshes used across the test modules."""

import numpy as np
import pytest

from ddfem.geometry import Ball, Domain


@pytest.fixture
def unit_ball():
    return Ball(radius=1.0, center=(0.0, 0.0), name="Ball")


@pytest.fixture
def unit_ball_domain(unit_ball):
    return Domain(unit_ball, epsilon=0.1)


@pytest.fixture
def two_balls():
    ball0 = Ball(radius=1.0, center=(0.5, 0.0), name="Ball0")
    ball1 = Ball(radius=1.0, center=(-0.5, 0.0), name="Ball1")
    return ball0, ball1


@pytest.fixture
def two_ball_domain(two_balls):
    ball0, ball1 = two_balls
    return Domain(ball0 | ball1, epsilon=0.05)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)

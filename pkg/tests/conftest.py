import numpy as np
import pytest

from stratakit.sets import Ball, HPolytope, PointCloud, Sphere, UnionSet, VPolytope


def box_polytope(lows, highs):
    lows = np.asarray(lows, float)
    highs = np.asarray(highs, float)
    n = lows.size
    normals = np.vstack([np.eye(n), -np.eye(n)])
    offsets = np.concatenate([highs, -lows])
    return HPolytope(normals=normals, offsets=offsets)


@pytest.fixture(scope="session")
def unit_square():
    return box_polytope([0, 0], [1, 1])


@pytest.fixture(scope="session")
def unit_cube():
    return box_polytope([0, 0, 0], [1, 1, 1])


@pytest.fixture(scope="session")
def circle():
    return Sphere([0.0, 0.0], 1.0)


@pytest.fixture(scope="session")
def segment():
    return VPolytope([[0.0, 0.0], [1.0, 0.0]])


@pytest.fixture(scope="session")
def two_balls():
    return UnionSet([Ball([-2.0, 0.0], 1.0), Ball([2.0, 0.0], 1.0)])


@pytest.fixture(scope="session")
def tangent_balls():
    return UnionSet([Ball([-1.0, 0.0], 1.0), Ball([1.0, 0.0], 1.0)])


@pytest.fixture(scope="session")
def simplex3():
    return VPolytope([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]])


@pytest.fixture(scope="session")
def convex_scene_list(unit_square, unit_cube, segment, simplex3):
    ball = Ball([0.0, 0.0], 1.0)
    return [unit_square, unit_cube, segment, simplex3, ball]

import numpy as np
import pytest

from stratakit.bundles import (
    is_touching_direction,
    sample_touching,
    touching_dims_batch,
)
from stratakit.errors import PreconditionError
from stratakit.linalg import AffineFlat
from stratakit.sets import Ball, Flat, Sphere, UnionSet

from .oracles import dense_circle_distance


def x_axis_flat():
    return Flat(AffineFlat(np.zeros(2), np.array([[1.0, 0.0]])))


def test_touching_flat_normal():
    assert is_touching_direction(x_axis_flat(), [0, 0], [0, 3], 1e-7)


def test_touching_flat_diagonal_fails():
    assert not is_touching_direction(x_axis_flat(), [0, 0], [1, 1], 1e-7)


def test_touching_sphere_inward_limit():
    # oracle first: the claimed antipodal reach is false because the set is
    # the circle itself; distance from (-1, 0) to the circle is 0, not 2
    circle = Sphere([0, 0], 1.0)
    assert dense_circle_distance([0, 0], 1.0, [-1.0, 0.0]) == pytest.approx(0.0, abs=1e-4)
    assert not is_touching_direction(circle, [1, 0], [-2.0, 0.0], 1e-7)
    # inward touching works exactly up to the center
    assert dense_circle_distance([0, 0], 1.0, [0.0, 0.0]) == pytest.approx(1.0, abs=1e-7)
    assert is_touching_direction(circle, [1, 0], [-1.0, 0.0], 1e-7)
    assert is_touching_direction(circle, [1, 0], [-0.5, 0.0], 1e-7)
    assert not is_touching_direction(circle, [1, 0], [-1.5, 0.0], 1e-7)


def test_touching_requires_on_set():
    with pytest.raises(PreconditionError):
        is_touching_direction(Sphere([0, 0], 1.0), [2, 0], [1, 0], 1e-7)


def test_sample_vertex_normal_cone(unit_square):
    s = sample_touching(unit_square, [0, 0], q=1.0, num_dirs=16, tol_touch=1e-7)
    assert s.est_dim == 2
    # directions that touch at the full radius fill the opposite quadrant
    full = s.directions[s.max_radii >= 1.0 - 1e-5]
    assert np.all(full @ np.array([1.0, 0.0]) <= 1e-9)
    assert np.all(full @ np.array([0.0, 1.0]) <= 1e-9)


def test_sample_edge_interior(unit_square):
    s = sample_touching(unit_square, [0.5, 0.0], q=1.0, num_dirs=16, tol_touch=1e-7)
    assert s.est_dim == 1
    strong = s.strong_directions()
    # only the outward edge normal survives
    assert np.all(np.abs(strong @ np.array([1.0, 0.0])) <= 2e-3)
    assert np.all(strong @ np.array([0.0, 1.0]) < 0)


def test_sample_circle_bisection_vs_closed_form(circle):
    s = sample_touching(circle, [1.0, 0.0], q=0.5, num_dirs=16, tol_touch=1e-7)
    assert s.est_dim == 1
    strong = s.strong_directions()
    assert strong.shape[0] >= 2
    assert np.all(np.abs(strong @ np.array([0.0, 1.0])) <= 2e-3)
    # closed form: dist((1 + t, 0)) = t and dist((1 - t, 0)) = t for t <= 1,
    # so both radial rays run to the probe cap
    outward = s.max_radii[np.argmax(s.directions @ np.array([1.0, 0.0]))]
    inward = s.max_radii[np.argmin(s.directions @ np.array([1.0, 0.0]))]
    assert outward == pytest.approx(0.5, abs=1e-6)
    assert inward == pytest.approx(0.5, abs=1e-6)


def test_sample_records_resolution_and_invariant(circle):
    s = sample_touching(circle, [0.0, 1.0], q=0.4, num_dirs=12, tol_touch=1e-7, seed=5)
    assert s.resolution == pytest.approx(1e-6)
    assert s.q_frac == pytest.approx(0.5)
    for v, t in zip(s.directions, s.max_radii):
        assert 0.0 <= t <= s.q + 1e-12
        if t > 0:
            assert abs(circle.distance(s.base + t * v) - t) <= s.tol_touch


def test_sample_preconditions(unit_square):
    with pytest.raises(PreconditionError):
        sample_touching(unit_square, [5, 5], q=1.0, num_dirs=8, tol_touch=1e-7)
    with pytest.raises(PreconditionError):
        sample_touching(unit_square, [0, 0], q=1.0, num_dirs=2, tol_touch=1e-7)
    with pytest.raises(PreconditionError):
        sample_touching(unit_square, [0, 0], q=-1.0, num_dirs=8, tol_touch=1e-7)


def test_convexity_of_touching_set(unit_square, unit_cube):
    # midpoints of touching directions scaled to the common radius keep
    # touching: the touching set of a convex polytope is convex
    rng = np.random.default_rng(3)
    for A, a in (
        (unit_square, np.array([0.0, 0.0])),
        (unit_square, np.array([0.5, 0.0])),
        (unit_cube, np.array([0.0, 0.0, 0.0])),
        (unit_cube, np.array([0.5, 0.0, 0.0])),
    ):
        s = sample_touching(A, a, q=0.8, num_dirs=24, tol_touch=1e-8, seed=7)
        hits = [(v, t) for v, t in zip(s.directions, s.max_radii) if t >= 0.4]
        for _ in range(40):
            i, j = rng.integers(0, len(hits), size=2)
            (v1, t1), (v2, t2) = hits[i], hits[j]
            mid = v1 + v2
            norm = np.linalg.norm(mid)
            if norm < 1e-9:
                continue
            scale = min(t1, t2) / 2.0
            assert is_touching_direction(A, a, scale * mid / norm, 1e-8)


def test_tangent_balls_pinch_point(tangent_balls):
    # derived via a dense direction sweep: no direction touches at the pinch
    from .oracles import sweep_touch_dims

    dist = lambda p: tangent_balls.distance(p)
    oracle_dim = sweep_touch_dims(dist, [0.0, 0.0], q=0.1, angles=4000, tol=1e-9)
    assert oracle_dim == 0
    s = sample_touching(tangent_balls, [0.0, 0.0], q=0.1, num_dirs=64, tol_touch=1e-8)
    assert s.est_dim == oracle_dim


def test_batch_dims_match_single(unit_cube):
    probes = np.array([
        [0.0, 0.0, 0.0],
        [0.5, 0.0, 0.0],
        [0.5, 0.5, 0.0],
        [1.0, 1.0, 1.0],
    ])
    dims = touching_dims_batch(unit_cube, probes, q=0.3, num_dirs=12, tol_touch=1e-7)
    assert dims.tolist() == [3, 2, 1, 3]


def test_ball_boundary_dimension():
    ball = Ball([0.0, 0.0], 1.0)
    s = sample_touching(ball, [1.0, 0.0], q=0.5, num_dirs=16, tol_touch=1e-7)
    assert s.est_dim == 1
    # inward direction must not touch a solid ball
    assert not is_touching_direction(ball, [1.0, 0.0], [-0.3, 0.0], 1e-7)


def test_union_hints_interplay(two_balls):
    # a regular boundary point of the union behaves like its ball
    s = sample_touching(two_balls, [-1.0, 0.0], q=0.5, num_dirs=16, tol_touch=1e-7)
    assert s.est_dim == 1

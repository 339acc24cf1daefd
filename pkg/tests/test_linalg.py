import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stratakit.linalg import (
    AffineFlat,
    Subspace,
    dist_to_subspace,
    hausdorff_distance,
    orthonormal_columns,
    project_onto_flat,
    rank_of,
)

from .oracles import gram_rank_exact, maximin_hausdorff


def test_rank_identity_basis():
    assert rank_of([[1, 0], [0, 1]], 1e-9) == 2


def test_rank_colinear_pair():
    assert rank_of([[1, 1], [2, 2]], 1e-9) == 1


def test_rank_near_dependent_matches_exact_gram():
    vectors = [[1.0, 0.0, 0.0], [1.0, 1e-12, 0.0]]
    expected = gram_rank_exact(vectors, 1e-9)
    assert expected == 1
    assert rank_of(vectors, 1e-9) == expected


def test_rank_empty_and_zero():
    assert rank_of([], 1e-9) == 0
    assert rank_of([[0.0, 0.0]], 1e-9) == 0


def test_rank_rejects_nonfinite():
    with pytest.raises(ValueError):
        rank_of([[np.nan, 0.0]])
    with pytest.raises(ValueError):
        rank_of([[1.0, 0.0]], tol_rank=0.0)


@given(st.integers(0, 1000))
@settings(max_examples=40, deadline=None)
def test_rank_scale_and_permutation_invariance(seed):
    rng = np.random.default_rng(seed)
    k, n = rng.integers(1, 5), rng.integers(2, 6)
    vecs = rng.standard_normal((k, n))
    base = rank_of(vecs)
    scales = rng.uniform(1e-6, 1e6, size=k) * rng.choice([-1, 1], size=k)
    assert rank_of(vecs * scales[:, None]) == base
    perm = rng.permutation(k)
    assert rank_of(vecs[perm]) == base


def test_projection_examples():
    x_axis = AffineFlat(np.zeros(2), np.array([[1.0, 0.0]]))
    assert np.allclose(project_onto_flat([3, 4], x_axis), [3, 0])
    base = np.array([2.0, -1.0])
    flat = AffineFlat(base, np.array([[0.0, 1.0]]))
    assert np.allclose(project_onto_flat(base, flat), base)
    z_plane = AffineFlat(np.zeros(3), np.array([[1.0, 0, 0], [0, 1.0, 0]]))
    assert np.allclose(project_onto_flat([1, 1, 1], z_plane), [1, 1, 0])


def test_projection_residual_orthogonal():
    rng = np.random.default_rng(7)
    for _ in range(50):
        n = rng.integers(2, 7)
        k = rng.integers(0, n + 1)
        flat = AffineFlat.from_spanning(rng.standard_normal(n),
                                        rng.standard_normal((k, n)))
        x = rng.standard_normal(n) * 3
        p = project_onto_flat(x, flat)
        if flat.dim:
            assert np.max(np.abs(flat.basis @ (x - p))) < 1e-10


@given(st.integers(0, 1000))
@settings(max_examples=40, deadline=None)
def test_projection_idempotent_and_contractive(seed):
    rng = np.random.default_rng(seed)
    n = rng.integers(1, 7)
    k = rng.integers(0, n + 1)
    flat = AffineFlat.from_spanning(rng.standard_normal(n), rng.standard_normal((k, n)))
    x, y = rng.standard_normal(n) * 5, rng.standard_normal(n) * 5
    px, py = flat.project(x), flat.project(y)
    assert np.linalg.norm(flat.project(px) - px) <= 1e-12
    assert np.linalg.norm(px - py) <= np.linalg.norm(x - y) + 1e-10


def test_orthonormal_columns_reorthogonalizes():
    rng = np.random.default_rng(3)
    vecs = rng.standard_normal((5, 5)) * np.logspace(0, 5, 5)[:, None]
    B = orthonormal_columns(vecs)
    assert np.max(np.abs(B @ B.T - np.eye(B.shape[0]))) < 1e-12


def test_dist_to_subspace_examples():
    x_axis = Subspace(np.array([[1.0, 0.0]]))
    assert dist_to_subspace([0, 5], x_axis) == pytest.approx(5.0)
    assert dist_to_subspace([2.5, 0], x_axis) == pytest.approx(0.0)
    diag = Subspace(np.array([[1.0, 1.0]]) / np.sqrt(2))
    assert dist_to_subspace([1, 1], diag) == pytest.approx(0.0, abs=1e-12)


def test_hausdorff_examples():
    assert hausdorff_distance([[0, 0]], [[0, 0], [1, 0]]) == pytest.approx(1.0)
    pts = [[0, 1], [2, 3]]
    assert hausdorff_distance(pts, pts) == 0.0
    small = [[0, 0], [1, 0], [1, 1], [0, 1]]
    big = [[0, 0], [2, 0], [2, 2], [0, 2]]
    expected = maximin_hausdorff(small, big)
    assert expected == pytest.approx(np.sqrt(2))
    assert hausdorff_distance(small, big) == pytest.approx(expected)


def test_hausdorff_rejects_empty():
    with pytest.raises(ValueError):
        hausdorff_distance([], [[0, 0]])


@given(st.integers(0, 500))
@settings(max_examples=30, deadline=None)
def test_hausdorff_symmetry_and_triangle(seed):
    rng = np.random.default_rng(seed)
    n = rng.integers(1, 5)
    A = rng.standard_normal((rng.integers(1, 6), n))
    B = rng.standard_normal((rng.integers(1, 6), n))
    C = rng.standard_normal((rng.integers(1, 6), n))
    hab = hausdorff_distance(A, B)
    assert hab == pytest.approx(hausdorff_distance(B, A))
    assert hab <= hausdorff_distance(A, C) + hausdorff_distance(C, B) + 1e-10

import numpy as np
import pytest

from stratakit.covers import (
    coarea_slab_cover,
    quadratic_patch_cover,
    recheck_inverse_lipschitz,
    recheck_patch_cover,
)
from stratakit.gridio import GridMap


def coordinate_grid(num=65):
    x = np.linspace(0, 1, num)
    X, _ = np.meshgrid(x, x, indexing="ij")
    return GridMap(np.array([[0.0, 1.0], [0.0, 1.0]]), X[..., None], m_hint=1)


def identity_grid(num=33):
    x = np.linspace(0, 1, num)
    X, Y = np.meshgrid(x, x, indexing="ij")
    return GridMap(np.array([[0.0, 1.0], [0.0, 1.0]]), np.stack([X, Y], -1), m_hint=1)


def annulus_grid(num=257, r_in=0.5, r_out=2.0):
    x = np.linspace(-r_out, r_out, num)
    X, Y = np.meshgrid(x, x, indexing="ij")
    radius = np.hypot(X, Y)
    safe = np.where(radius > 0, radius, 1.0)
    vals = np.stack([X / safe, Y / safe], -1)
    vals[(radius < r_in) | (radius > r_out)] = np.nan
    return GridMap(np.array([[-r_out, r_out], [-r_out, r_out]]), vals, m_hint=1)


def test_coordinate_function_full_cover():
    rep = coarea_slab_cover(coordinate_grid(), m=1, z_threshold=20, lip_bound=2.0)
    assert rep.covered_fraction == 1.0
    assert rep.pieces
    for p in rep.pieces:
        assert p.inverse_lipschitz <= 2.0 + 1e-12
        assert recheck_inverse_lipschitz(p, 2.0)
    # one horizontal slice suffices for the whole value range
    assert len(rep.pieces) == 1
    assert rep.pieces[0].inverse_lipschitz == pytest.approx(1.0)


def test_identity_map_empty_z_convention():
    rep = coarea_slab_cover(identity_grid(), m=1, z_threshold=5, lip_bound=4.0)
    assert rep.params["empty_z"] is True
    assert rep.covered_fraction == 1.0
    assert rep.pieces == []


def test_annulus_projection_cover():
    rep = coarea_slab_cover(annulus_grid(), m=1, z_threshold=20, lip_bound=16.0,
                            extra_rotations=16, seed=3)
    assert rep.covered_fraction >= 0.95
    for p in rep.pieces:
        assert recheck_inverse_lipschitz(p, 16.0)


def test_coarea_validates_m():
    with pytest.raises(Exception):
        coarea_slab_cover(coordinate_grid(), m=0, z_threshold=5, lip_bound=2.0)
    with pytest.raises(Exception):
        coarea_slab_cover(coordinate_grid(), m=3, z_threshold=5, lip_bound=2.0)


# -- quadratic patch cover ----------------------------------------------------------


def test_patch_cover_line():
    t = np.linspace(0, 1, 60)
    pts = np.column_stack([t, np.zeros_like(t)])
    cover = quadratic_patch_cover(pts, m=1, tol_fit=1.0, support_radius=2.0)
    assert len(cover.patches) == 1
    assert cover.assigned_fraction() == 1.0
    assert np.max(np.abs(cover.patches[0].quad)) < 1e-9
    assert recheck_patch_cover(pts, cover)


def test_patch_cover_circle_curvature():
    theta = np.linspace(0, 2 * np.pi, 1000, endpoint=False)
    pts = np.column_stack([np.cos(theta), np.sin(theta)])
    cover = quadratic_patch_cover(pts, m=1, tol_fit=1.0, support_radius=0.3)
    assert cover.assigned_fraction() >= 0.99
    for patch in cover.patches:
        coef = abs(float(patch.quad[0, 0, 0]))
        assert coef == pytest.approx(0.5, abs=0.05)
    assert recheck_patch_cover(pts, cover)


def test_patch_cover_cube_skeleton(unit_cube):
    rng = np.random.default_rng(4)
    edges = [fc for fc in unit_cube.faces if fc.dim == 1]
    pts = [unit_cube.vertices[list(fc.vertex_ids)].mean(axis=0) for fc in edges]
    for fc in edges:
        v0, v1 = unit_cube.vertices[list(fc.vertex_ids)]
        for t in rng.uniform(0.05, 0.95, size=12):
            pts.append(v0 + t * (v1 - v0))
    pts.extend(unit_cube.vertices)
    pts = np.array(pts)
    cover = quadratic_patch_cover(pts, m=1, tol_fit=1.0, support_radius=0.6)
    assert cover.assigned_fraction() >= 0.99
    # straight-line patches: quadratic terms vanish
    for patch in cover.patches:
        assert np.max(np.abs(patch.quad)) <= 1e-6
    assert recheck_patch_cover(pts, cover)
    # determinism: reruns produce identical assignments
    again = quadratic_patch_cover(pts, m=1, tol_fit=1.0, support_radius=0.6)
    assert np.array_equal(cover.assignment, again.assignment)


def test_patch_cover_sparse_points_left_unassigned():
    pts = np.array([[0.0, 0.0], [10.0, 0.0], [20.0, 0.0]])
    cover = quadratic_patch_cover(pts, m=1, tol_fit=1.0, support_radius=0.5)
    assert cover.assigned_fraction() < 1.0
    assert np.all(cover.assignment == -1)

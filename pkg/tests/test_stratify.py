import numpy as np
import pytest

from stratakit.errors import PreconditionError, UnsupportedInputError
from stratakit.linalg import AffineFlat
from stratakit.sets import HPolytope, PointCloud, VPolytope
from stratakit.stratify import (
    projection_cover,
    stratify_exact_polytope,
    stratify_sampled,
)


def random_bounded_hpolytope(seed: int, facets: int = 9) -> HPolytope:
    """Random tangent planes of the unit sphere; resample until bounded."""
    rng = np.random.default_rng(seed)
    while True:
        normals = rng.standard_normal((facets, 3))
        normals /= np.linalg.norm(normals, axis=1)[:, None]
        try:
            return HPolytope(normals=normals, offsets=np.ones(facets))
        except UnsupportedInputError:
            continue


def face_probe_points(P: HPolytope, count: int, seed: int):
    """Probes in the relative interiors of faces, with the true face dim."""
    rng = np.random.default_rng(seed)
    faces = [fc for fc in P.faces if fc.dim < P.ambient]
    pts, dims = [], []
    for i in range(count):
        fc = faces[i % len(faces)]
        pts.append(P.relint_face_sample(fc, rng))
        dims.append(fc.dim)
    return np.array(pts), np.array(dims)


def min_face_separation(P: HPolytope) -> float:
    """Least distance between faces sharing no vertex, via the exact distance
    from the origin to the Minkowski difference of their vertex sets."""
    faces = [fc for fc in P.faces if fc.dim < P.ambient]
    best = np.inf
    for i, fa in enumerate(faces):
        va = P.vertices[list(fa.vertex_ids)]
        for fb in faces[i + 1:]:
            if set(fa.vertex_ids) & set(fb.vertex_ids):
                continue
            vb = P.vertices[list(fb.vertex_ids)]
            diff = (va[:, None, :] - vb[None, :, :]).reshape(-1, P.ambient)
            gap = VPolytope(diff).distance(np.zeros(P.ambient))
            best = min(best, gap)
    return best


def test_exact_cube_skeletons(unit_cube):
    rep0 = stratify_exact_polytope(unit_cube, 0)
    assert len(rep0.exact_faces) == 8
    assert all(f.dim == 0 for f in rep0.exact_faces)
    rep2 = stratify_exact_polytope(unit_cube, 2)
    assert len(rep2.exact_faces) == 26  # 8 vertices + 12 edges + 6 facets


def test_exact_rejects_non_polytope(circle):
    with pytest.raises(UnsupportedInputError):
        stratify_exact_polytope(circle, 1)


def test_sampled_square_vertex_vs_edge(unit_square):
    probes = [[0.0, 0.0], [0.5, 0.0]]
    rep = stratify_sampled(unit_square, 0, probes, q_grid=[0.25])
    assert rep.classified[0].in_stratum          # the vertex
    assert not rep.classified[1].in_stratum      # the edge midpoint
    assert rep.classified[0].est_dim == 2
    assert rep.classified[1].est_dim == 1


def test_sampled_circle_all_in_b1(circle):
    probes = circle.boundary_samples(12, seed=3)
    rep1 = stratify_sampled(circle, 1, probes, q_grid=[0.5])
    assert all(c.in_stratum for c in rep1.classified)
    rep0 = stratify_sampled(circle, 0, probes, q_grid=[0.5])
    assert not any(c.in_stratum for c in rep0.classified)


def test_sampled_tangent_balls_pinch(tangent_balls):
    # expected value fixed by the dense sweep oracle in test_bundles: the
    # pinch point has no touching directions at all
    rep = stratify_sampled(tangent_balls, 0, [[0.0, 0.0]], q_grid=[0.1], num_dirs=64)
    assert rep.classified[0].est_dim == 0
    assert not rep.classified[0].in_stratum
    # it still belongs to the top stratum (m = n)
    rep2 = stratify_sampled(tangent_balls, 2, [[0.0, 0.0]], q_grid=[0.1], num_dirs=64)
    assert rep2.classified[0].in_stratum


def test_sampled_rejects_offset_probes(unit_square):
    with pytest.raises(PreconditionError):
        stratify_sampled(unit_square, 0, [[5.0, 5.0]], q_grid=[0.25])


def test_stratum_monotone(unit_cube):
    probes = unit_cube.boundary_samples(32, seed=6)
    members = {}
    for m in range(4):
        rep = stratify_sampled(unit_cube, m, probes, q_grid=[0.25], seed=2)
        members[m] = {i for i, c in enumerate(rep.classified) if c.in_stratum}
    for m in range(3):
        assert members[m] <= members[m + 1]


@pytest.mark.parametrize("seed", [101, 202])
def test_sampled_agrees_with_exact_random_polytope(seed):
    P = random_bounded_hpolytope(seed)
    probes, true_dims = face_probe_points(P, 120, seed + 1)
    q = 0.5 * min_face_separation(P)
    for m in (0, 1, 2):
        sampled = stratify_sampled(P, m, probes, q_grid=[q], seed=seed)
        exact = stratify_exact_polytope(P, m, probes)
        for cs, ce, k in zip(sampled.classified, exact.classified, true_dims):
            assert ce.est_dim == P.ambient - k
            assert cs.est_dim == ce.est_dim
            assert cs.in_stratum == ce.in_stratum


def test_exact_faces_contain_in_stratum_points(unit_cube):
    probes, _ = face_probe_points(unit_cube, 60, seed=5)
    rep = stratify_exact_polytope(unit_cube, 1, probes)
    for c in rep.classified:
        if not c.in_stratum:
            continue
        gap = min(VPolytope(f.vertices).distance(c.point) for f in rep.exact_faces)
        assert gap <= 1e-9


# -- projection cover ------------------------------------------------------------


def test_cover_of_single_point():
    A = PointCloud([[0.0, 0.0]])
    line = AffineFlat(np.array([0.0, 0.1]), np.array([[1.0, 0.0]]))
    pairs = projection_cover(A, 1, 4, [line], 200, seed=1)
    assert pairs
    for _, img in pairs:
        assert np.allclose(img, [0.0, 0.0])


def test_cover_cube_vertices(unit_cube):
    rng = np.random.default_rng(5)
    planes = [AffineFlat(p, np.zeros((0, 3)))
              for p in rng.uniform(-0.3, 1.3, size=(4000, 3))]
    pairs = projection_cover(unit_cube, 0, 4, planes, 1, seed=2)
    assert pairs
    imgs = np.array([img for _, img in pairs])
    gaps = np.linalg.norm(imgs[:, None, :] - unit_cube.vertices[None], axis=-1)
    assert gaps.min(axis=1).max() <= 1e-8       # images are vertices
    assert (gaps.min(axis=0) <= 1e-8).all()     # and every vertex is hit


def test_cover_flat_fills_axis():
    fl_set = __import__("stratakit.sets", fromlist=["Flat"]).Flat(
        AffineFlat(np.zeros(2), np.array([[1.0, 0.0]])), window=3.0)
    line = AffineFlat(np.array([0.0, 0.1]), np.array([[1.0, 0.0]]))
    pairs = projection_cover(fl_set, 1, 5, [line], 400, seed=3, window=3.0)
    imgs = np.array([img for _, img in pairs])
    assert imgs.shape[0] > 300
    assert np.allclose(imgs[:, 1], 0.0, atol=1e-12)
    assert imgs[:, 0].max() - imgs[:, 0].min() > 4.0


def test_cover_soundness(unit_cube, circle):
    rng = np.random.default_rng(7)
    for A, m, planes in (
        (unit_cube, 0, [AffineFlat(p, np.zeros((0, 3)))
                        for p in rng.uniform(-0.3, 1.3, size=(1500, 3))]),
        (circle, 1, [AffineFlat(rng.uniform(-1.5, 1.5, 2),
                                np.array([[1.0, 0.0]])) for _ in range(8)]),
    ):
        pairs = projection_cover(A, m, 4, planes, 64, seed=4)
        assert pairs
        imgs = np.array([img for _, img in pairs])
        rep = stratify_sampled(A, m, imgs, q_grid=[0.25], seed=9)
        assert all(c.in_stratum for c in rep.classified)


def test_cover_validates_plane_dims(unit_square):
    line = AffineFlat(np.zeros(2), np.array([[1.0, 0.0]]))
    with pytest.raises(PreconditionError):
        projection_cover(unit_square, 0, 4, [line], 10)
    with pytest.raises(PreconditionError):
        projection_cover(unit_square, 1, 0, [line], 10)

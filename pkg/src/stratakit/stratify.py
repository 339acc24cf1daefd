"""Classification of set points into the ball-touching strata.

The m-th stratum collects the points where at least n-m linearly independent
directions touch; a convex polytope realizes it exactly as its m-skeleton,
and general sets are classified by sampling touching directions over a grid
of probe radii.  The projection cover realizes the constructive covering
argument at desk scale: shell points on a finite plane family project onto
the stratum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bundles import touching_dims_batch, touching_radii
from .errors import PreconditionError, UnsupportedInputError
from .linalg import AffineFlat, as_points
from .sets import (
    ClosedSet,
    Face,
    HPolytope,
    VPolytope,
    _fibonacci_sphere,
    default_tol_unique,
    nearest_point_batch,
)


@dataclass(frozen=True)
class ClassifiedPoint:
    point: np.ndarray
    est_dim: int
    in_stratum: bool
    q_used: float

    def to_json_dict(self) -> dict:
        return {
            "point": self.point.tolist(),
            "est_dim": int(self.est_dim),
            "in_stratum": bool(self.in_stratum),
            "q_used": float(self.q_used),
        }


@dataclass(frozen=True)
class FaceDescriptor:
    dim: int
    vertices: np.ndarray  # (k, n)

    def to_json_dict(self) -> dict:
        return {"dim": int(self.dim), "vertices": self.vertices.tolist()}


@dataclass
class StratumReport:
    m: int
    classified: list[ClassifiedPoint]
    exact_faces: list[FaceDescriptor] | None = None
    coverage: object | None = None  # PatchCover, attached by callers when requested

    def to_json_dict(self) -> dict:
        out = {
            "m": int(self.m),
            "classified": [c.to_json_dict() for c in self.classified],
        }
        if self.exact_faces is not None:
            out["exact_faces"] = [f.to_json_dict() for f in self.exact_faces]
        if self.coverage is not None:
            out["coverage"] = self.coverage.to_json_dict()
        return out

    def in_stratum_points(self) -> np.ndarray:
        pts = [c.point for c in self.classified if c.in_stratum]
        return np.array(pts) if pts else np.zeros((0, 0))


def _polytope_faces(P: ClosedSet) -> tuple[Face, ...]:
    # The dim <= m filter downstream decides what enters the skeleton, so the
    # full lattice (improper face included) is the right thing to return.
    if isinstance(P, (HPolytope, VPolytope)):
        return P.faces
    raise UnsupportedInputError("exact stratification requires a convex polytope variant")


def exact_face_dim(P: ClosedSet, a, tol: float | None = None) -> int | None:
    """Dimension of the smallest face containing ``a``; None off the polytope."""
    face = P.face_of_point(a, tol)
    return None if face is None else face.dim


def stratify_exact_polytope(P: ClosedSet, m: int,
                            probe_points=None) -> StratumReport:
    """Exact stratum of a convex polytope: the union of its faces of
    dimension <= m (the m-skeleton).

    When probe points are supplied they are classified by exact face lookup,
    so the report can be compared 1:1 against the sampled classifier.
    """
    if not isinstance(P, (HPolytope, VPolytope)):
        raise UnsupportedInputError("stratify_exact_polytope needs an H- or V-polytope")
    if not 0 <= m <= P.ambient:
        raise PreconditionError(f"m must be in 0..{P.ambient}")
    skeleton = [FaceDescriptor(fc.dim, P.vertices[list(fc.vertex_ids)])
                for fc in _polytope_faces(P) if fc.dim <= m]
    classified: list[ClassifiedPoint] = []
    if probe_points is not None:
        for a in as_points(probe_points, P.ambient):
            k = exact_face_dim(P, a)
            if k is None:
                raise PreconditionError(f"probe {a.tolist()} does not lie on the polytope")
            classified.append(ClassifiedPoint(a, P.ambient - k, k <= m, np.inf))
    return StratumReport(m, classified, exact_faces=skeleton)


def classify_probes(
    A: ClosedSet,
    probe_points,
    q_grid,
    tol: float | None = None,
    num_dirs: int | None = None,
    seed: int = 0,
) -> tuple[np.ndarray, np.ndarray]:
    """(est_dim, q_used) per probe: the dimension estimate is the max over the
    probe-radius grid and q_used is the radius where the max first occurred."""
    probes = as_points(probe_points, A.ambient)
    q_grid = [float(q) for q in q_grid]
    if not q_grid or any(q <= 0 for q in q_grid):
        raise PreconditionError("q_grid must contain positive radii")
    tol = 1e-7 * max(1.0, A.nominal_diameter()) if tol is None else tol
    if np.any(A.distance_batch(probes) > tol):
        bad = probes[A.distance_batch(probes) > tol][0]
        raise PreconditionError(f"probe {bad.tolist()} does not lie on the set")
    num_dirs = max(2 * A.ambient, 12) if num_dirs is None else num_dirs
    dims = np.zeros(len(probes), dtype=int)
    q_used = np.full(len(probes), q_grid[0], dtype=float)
    for q in q_grid:
        d = touching_dims_batch(A, probes, q, num_dirs, tol, seed=seed)
        better = d > dims
        dims[better] = d[better]
        q_used[better] = q
    return dims, q_used


def stratify_sampled(
    A: ClosedSet,
    m: int,
    probe_points,
    q_grid,
    tol: float | None = None,
    num_dirs: int | None = None,
    seed: int = 0,
) -> StratumReport:
    """Sampled stratum membership: est_dim >= n - m over the best probe radius.

    Monotone in m by construction (one dimension estimate per probe,
    thresholded), so the strata are nested.
    """
    if not 0 <= m <= A.ambient:
        raise PreconditionError(f"m must be in 0..{A.ambient}")
    probes = as_points(probe_points, A.ambient)
    dims, q_used = classify_probes(A, probes, q_grid, tol, num_dirs, seed)
    classified = [
        ClassifiedPoint(p, int(d), bool(d >= A.ambient - m), float(qu))
        for p, d, qu in zip(probes, dims, q_used)
    ]
    return StratumReport(m, classified)


def plane_samples(plane: AffineFlat, count: int, window: float, seed: int) -> np.ndarray:
    """Deterministic low-discrepancy samples on an m-flat within a window."""
    if plane.dim == 0:
        return plane.base.reshape(1, -1)
    from scipy.stats import qmc

    eng = qmc.Sobol(d=plane.dim, scramble=True, seed=seed)
    mexp = int(np.ceil(np.log2(max(count, 2))))
    u = eng.random(2**mexp)[:count]
    coeff = (2.0 * u - 1.0) * window
    return plane.base + coeff @ plane.basis


def projection_cover(
    A: ClosedSet,
    m: int,
    i: int,
    planes,
    shell_samples: int,
    seed: int = 0,
    tol: float | None = None,
    num_dirs: int | None = None,
    window: float | None = None,
) -> list[tuple[np.ndarray, np.ndarray]]:
    """Project admissible shell points of a finite plane family onto the set.

    A sample x is kept when 0 < dist(x, A) < 1/i, its nearest point is
    unique, the direction back to the set touches with radius 1/i, and the
    projection lands in the m-th stratum (dimension estimate at the nearest
    point >= n - m at probe radius 1/i).  The returned (source, image) pairs
    are the empirical cover of the stratum; an empty result is allowed.
    """
    if i < 1:
        raise PreconditionError("shell index i must be >= 1")
    planes = list(planes)
    if not planes:
        raise PreconditionError("plane family must be nonempty")
    for p in planes:
        if p.dim != m:
            raise PreconditionError(f"plane of dimension {p.dim} in a family for m = {m}")
    radius = 1.0 / i
    tol = 1e-7 * max(1.0, A.nominal_diameter()) if tol is None else tol
    if window is None:
        center, R = A.bounding()
        window = R + 2.0 * radius + float(np.max(np.abs(center)))
    X = np.vstack([
        plane_samples(p, shell_samples, window, seed + 97 * j)
        for j, p in enumerate(planes)
    ])
    d = A.distance_batch(X)
    shell = (d > tol) & (d < radius)
    X, d = X[shell], d[shell]
    if X.shape[0] == 0:
        return []
    P, ok = nearest_point_batch(A, X, default_tol_unique(A))
    X, d, P = X[ok], d[ok], P[ok]
    if X.shape[0] == 0:
        return []
    u = (X - P) / d[:, None]
    touch = touching_radii(A, P, u, radius, tol) >= radius * (1 - 1e-5)
    X, d, P = X[touch], d[touch], P[touch]
    if X.shape[0] == 0:
        return []
    num_dirs = max(2 * A.ambient, 12) if num_dirs is None else num_dirs
    dims = touching_dims_batch(A, P, radius, num_dirs, tol, seed=seed)
    keep = dims >= A.ambient - m
    return [(x, p) for x, p in zip(X[keep], P[keep])]

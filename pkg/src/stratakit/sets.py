"""Closed subsets of R^n with exact distance and nearest-point oracles.

Supported set families: bounded H- and V-polytopes, balls, spheres, affine
flats, finite point clouds, and finite unions of these.  Each family carries
an exact distance oracle; polytope distances are computed by enumerating the
face lattice once at construction and projecting onto each face's affine
hull, so no iterative solver tolerance leaks into downstream second-order
checks.

All sets are immutable after construction and every oracle is pure, so
concurrent readers need no coordination.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import cones
from .errors import PreconditionError, UnsupportedInputError
from .linalg import (
    AffineFlat,
    as_points,
    as_vector,
    complement_basis,
    orthonormal_columns,
    pairwise_distances,
)

DEFAULT_TIE_TOL = 1e-10  # absolute tolerance for "achieves the minimum"


@dataclass(frozen=True)
class ProjectionResult:
    """Outcome of a nearest-point query.

    ``nearest`` lists representative minimizers; ``diameter_bound`` bounds the
    spread of the full nearest set, and ``unique`` records whether that bound
    fell below the caller's uniqueness tolerance.
    """

    distance: float
    nearest: np.ndarray  # (k, n)
    diameter_bound: float
    unique: bool


class ClosedSet:
    """Common interface of all set representations."""

    ambient: int
    convex: bool = False
    bounded: bool = True

    # -- core oracles --------------------------------------------------------

    def distance_batch(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def nearest_batch(self, X: np.ndarray, tol_unique: float) -> tuple[np.ndarray, np.ndarray]:
        """(nearest points, uniqueness mask) for a batch of queries.

        Rows where the nearest point is not unique (within ``tol_unique``)
        carry an arbitrary minimizer and a False mask entry.
        """
        raise NotImplementedError

    def nearest_point_set(self, x, tol_unique: float) -> ProjectionResult:
        raise NotImplementedError

    # -- convenience ----------------------------------------------------------

    def distance(self, x) -> float:
        x = as_vector(x, self.ambient)
        return float(self.distance_batch(x.reshape(1, -1))[0])

    def contains(self, x, tol: float = 1e-9) -> bool:
        return self.distance(x) <= tol

    # -- sampling and scale ----------------------------------------------------

    def bounding(self) -> tuple[np.ndarray, float]:
        """(center, radius) of a bounding ball; flats use a nominal window."""
        raise NotImplementedError

    def nominal_diameter(self) -> float:
        return 2.0 * self.bounding()[1]

    def boundary_samples(self, count: int, seed: int) -> np.ndarray:
        """Deterministic points on the set used as probe locations."""
        raise NotImplementedError

    def boundary_samples_by_step(self, step: float) -> np.ndarray:
        """Boundary points with neighbor gaps on the order of ``step``."""
        raise NotImplementedError

    def normal_hints(self, a, tol: float = 1e-7) -> np.ndarray:
        """Known exact outward-normal directions at a point of the set.

        Unit rows; empty when no closed form is available.  These seed the
        direction sampling so that dimension estimates cannot miss the span
        of the normal cone by bad luck.
        """
        return np.zeros((0, self.ambient))


def _fibonacci_sphere(count: int, n: int, seed: int) -> np.ndarray:
    """Deterministic low-discrepancy unit directions in R^n."""
    from scipy.special import ndtri
    from scipy.stats import qmc

    if n == 1:
        reps = (count + 1) // 2
        return np.array([[1.0], [-1.0]] * reps)[:count]
    if n == 2:
        offset = (seed % 997) / 997.0
        theta = 2.0 * np.pi * ((np.arange(count) * 0.6180339887498949 + offset) % 1.0)
        return np.column_stack([np.cos(theta), np.sin(theta)])
    eng = qmc.Sobol(d=n, scramble=True, seed=seed)
    m = int(np.ceil(np.log2(max(count, 2))))
    u = eng.random(2**m)[:count]
    g = ndtri(np.clip(u, 1e-12, 1 - 1e-12))
    norms = np.linalg.norm(g, axis=1)
    norms[norms == 0] = 1.0
    return g / norms[:, None]


# ---------------------------------------------------------------------------
# H-polytopes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Face:
    """One face of a polytope: its active facet set, vertices, and hull."""

    facet_ids: frozenset
    vertex_ids: tuple
    flat: AffineFlat
    dim: int


class HPolytope(ClosedSet):
    """Bounded intersection of halfspaces {x : normal·x <= offset}.

    Construction enumerates the vertices, rejects unbounded or empty input,
    and builds the full face lattice (closure of vertex active sets under
    intersection).  Distance queries project onto every face's affine hull
    and keep feasible candidates, which is exact.
    """

    convex = True

    def __init__(self, halfspaces=None, *, normals=None, offsets=None, tol: float = 1e-9):
        if halfspaces is not None:
            normals = np.array([as_vector(h[0]) for h in halfspaces], dtype=float)
            offsets = np.array([float(h[1]) for h in halfspaces], dtype=float)
        normals = np.asarray(normals, dtype=float)
        offsets = np.asarray(offsets, dtype=float).reshape(-1)
        if normals.ndim != 2 or normals.shape[0] != offsets.shape[0]:
            raise ValueError("normals and offsets must align")
        if not (np.all(np.isfinite(normals)) and np.all(np.isfinite(offsets))):
            raise ValueError("non-finite halfspace data")
        lens = np.linalg.norm(normals, axis=1)
        if np.any(lens <= tol):
            raise ValueError("zero normal in halfspace list")
        normals = normals / lens[:, None]
        offsets = offsets / lens
        self.ambient = normals.shape[1]
        self.normals = normals
        self.offsets = offsets
        self._tol = tol
        self._build(tol)

    # -- construction ----------------------------------------------------------

    def _build(self, tol: float):
        n = self.ambient
        f = self.normals.shape[0]
        if f < n:
            raise UnsupportedInputError("fewer halfspaces than dimensions: unbounded")
        from math import comb

        if comb(f, n) > 2_000_000:
            raise UnsupportedInputError(
                f"H-representation too large to enumerate ({f} halfspaces in dim {n})"
            )
        combos = np.array(list(itertools.combinations(range(f), n)), dtype=int)
        mats = self.normals[combos]                     # (M, n, n)
        dets = np.abs(np.linalg.det(mats))
        good = dets > 1e-10
        verts = []
        if np.any(good):
            sols = np.linalg.solve(mats[good], self.offsets[combos[good]][..., None])[..., 0]
            scale = max(1.0, float(np.max(np.abs(self.offsets))))
            feas_tol = 1e-9 * scale
            feasible = np.all(self.normals @ sols.T <= self.offsets[:, None] + feas_tol, axis=0)
            verts = sols[feasible]
        if len(verts) == 0:
            raise UnsupportedInputError("H-polytope is empty or degenerate")
        # dedupe
        uniq: list[np.ndarray] = []
        vtol = 1e-8 * max(1.0, float(np.max(np.abs(verts))))
        for v in verts:
            if not any(np.linalg.norm(v - u) <= vtol for u in uniq):
                uniq.append(v)
        vertices = np.array(uniq)
        order = np.lexsort(np.round(vertices, 10).T[::-1])
        self.vertices = vertices[order]

        # boundedness: the recession cone {d : normals @ d <= 0} must be {0}
        lin, rays = cones._halfspace_cone_description(self.normals, None, n)
        if lin.shape[0] or rays.shape[0]:
            raise UnsupportedInputError("H-polytope is unbounded (nonzero recession cone)")

        scale = max(1.0, float(np.max(np.abs(self.vertices))), float(np.max(np.abs(self.offsets))))
        self._active_tol = 1e-7 * scale
        self._feas_tol = 1e-9 * scale
        resid = np.abs(self.normals @ self.vertices.T - self.offsets[:, None])  # (f, v)
        active_sets = [frozenset(np.nonzero(resid[:, i] <= self._active_tol)[0].tolist())
                       for i in range(self.vertices.shape[0])]
        self._vertex_active = active_sets

        ids = set(active_sets)
        frontier = list(ids)
        while frontier:
            fresh = []
            for fid in frontier:
                for act in active_sets:
                    inter = fid & act
                    if inter not in ids:
                        ids.add(inter)
                        fresh.append(inter)
            frontier = fresh

        by_vertex_set: dict[tuple, frozenset] = {}
        for fid in ids:
            members = tuple(i for i, act in enumerate(active_sets) if act >= fid)
            if not members:
                continue
            true_id = frozenset.intersection(*[active_sets[i] for i in members])
            prev = by_vertex_set.get(members)
            if prev is None or len(true_id) > len(prev):
                by_vertex_set[members] = true_id

        faces: list[Face] = []
        for members, fid in by_vertex_set.items():
            pts = self.vertices[list(members)]
            flat = AffineFlat.through_points(pts)
            faces.append(Face(fid, members, flat, flat.dim))
        faces.sort(key=lambda fc: (fc.dim, sorted(fc.facet_ids), fc.vertex_ids))
        self.faces = tuple(faces)
        self._face_by_id = {fc.facet_ids: fc for fc in self.faces}

    # -- oracles ---------------------------------------------------------------

    def member_mask(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, float).reshape(-1, self.ambient)
        return np.all(self.normals @ X.T <= self.offsets[:, None] + self._feas_tol, axis=0)

    def _project(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        X = np.asarray(X, dtype=float).reshape(-1, self.ambient)
        inside = self.member_mask(X)
        best = X.copy()
        best_d2 = np.where(inside, 0.0, np.inf)
        for fc in self.faces:
            if fc.dim >= self.ambient:
                continue
            P = fc.flat.project_batch(X)
            feas = np.all(self.normals @ P.T <= self.offsets[:, None] + self._feas_tol, axis=0)
            d2 = np.einsum("ij,ij->i", X - P, X - P)
            better = feas & (d2 < best_d2)
            best[better] = P[better]
            best_d2[better] = d2[better]
        return best, np.sqrt(np.maximum(best_d2, 0.0))

    def distance_batch(self, X: np.ndarray) -> np.ndarray:
        return self._project(X)[1]

    def nearest_batch(self, X, tol_unique):
        P, _ = self._project(X)
        return P, np.ones(P.shape[0], dtype=bool)

    def nearest_point_set(self, x, tol_unique):
        x = as_vector(x, self.ambient)
        p, d = self._project(x.reshape(1, -1))
        return ProjectionResult(float(d[0]), p, 0.0, True)

    # -- structure ---------------------------------------------------------------

    def face_of_point(self, a, tol: float | None = None) -> Face | None:
        """Smallest face containing ``a``; None off the polytope, and a
        synthetic full-dimensional face for interior points."""
        a = as_vector(a, self.ambient)
        tol = self._active_tol if tol is None else tol
        if not self.member_mask(a.reshape(1, -1))[0]:
            return None
        active = frozenset(np.nonzero(np.abs(self.normals @ a - self.offsets) <= tol)[0].tolist())
        face = self._face_by_id.get(active)
        if face is not None:
            return face
        members = tuple(i for i, act in enumerate(self._vertex_active) if act >= active)
        if not members:
            return None
        pts = self.vertices[list(members)]
        flat = AffineFlat.through_points(pts)
        return Face(active, members, flat, flat.dim)

    def relint_face_sample(self, face: Face, rng: np.random.Generator) -> np.ndarray:
        w = 1.0 + rng.random(len(face.vertex_ids))
        w /= w.sum()
        return w @ self.vertices[list(face.vertex_ids)]

    def normal_hints(self, a, tol: float = 1e-7) -> np.ndarray:
        a = as_vector(a, self.ambient)
        active = np.abs(self.normals @ a - self.offsets) <= max(tol, self._active_tol)
        return self.normals[active]

    def bounding(self):
        center = self.vertices.mean(axis=0)
        radius = float(np.max(np.linalg.norm(self.vertices - center, axis=1)))
        return center, radius

    def boundary_samples(self, count, seed):
        rng = np.random.default_rng(seed)
        pts = [v for v in self.vertices]
        proper = [fc for fc in self.faces if 1 <= fc.dim < self.ambient]
        i = 0
        while len(pts) < count and proper:
            pts.append(self.relint_face_sample(proper[i % len(proper)], rng))
            i += 1
        return np.array(pts[:count])

    def boundary_samples_by_step(self, step):
        center, radius = self.bounding()
        count = max(64, int(np.ceil((8.0 * max(radius, step) / step)) ** (self.ambient - 1)))
        count = min(count, 200_000)
        dirs = _fibonacci_sphere(count, self.ambient, 12345)
        num = self.offsets - self.normals @ center
        den = self.normals @ dirs.T
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(den > 1e-12, num[:, None] / den, np.inf)
        t_hit = t.min(axis=0)
        return center + dirs * t_hit[:, None]


class VPolytope(ClosedSet):
    """Convex hull of finitely many vertices, possibly lower-dimensional.

    Internally the hull is expressed in orthonormal coordinates of its affine
    hull; a full-dimensional H-polytope handles that inner problem, so every
    oracle stays exact.  Distances decompose orthogonally against the hull's
    affine hull.
    """

    convex = True

    def __init__(self, vertices, tol: float = 1e-9):
        pts = as_points(vertices)
        if pts.shape[0] == 0:
            raise ValueError("VPolytope needs at least one vertex")
        self.ambient = pts.shape[1]
        self.input_vertices = pts
        self.hull_flat = AffineFlat.through_points(pts, tol)
        self.k = self.hull_flat.dim
        base, basis = self.hull_flat.base, self.hull_flat.basis
        local = (pts - base) @ basis.T if self.k else np.zeros((pts.shape[0], 0))
        self._inner: HPolytope | None = None
        if self.k == 0:
            self.vertices = pts[:1]
        elif self.k == 1:
            t = local[:, 0]
            lo, hi = float(t.min()), float(t.max())
            self._inner = HPolytope(normals=np.array([[1.0], [-1.0]]),
                                    offsets=np.array([hi, -lo]))
            self.vertices = base + np.array([[lo], [hi]]) @ basis
        else:
            from scipy.spatial import ConvexHull

            hull = ConvexHull(local)
            eqs = hull.equations  # rows (normal, offset) with normal·y + offset <= 0
            seen = set()
            rows = []
            for eq in np.round(eqs, 9):
                key = tuple(eq)
                if key not in seen:
                    seen.add(key)
                    rows.append(eq)
            eqs = np.array(rows)
            self._inner = HPolytope(normals=eqs[:, :-1], offsets=-eqs[:, -1])
            self.vertices = base + self._inner.vertices @ basis

    def _split(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Local hull coordinates and squared distance to the affine hull."""
        X = np.asarray(X, float).reshape(-1, self.ambient)
        rel = X - self.hull_flat.base
        if self.k == 0:
            return np.zeros((X.shape[0], 0)), np.einsum("ij,ij->i", rel, rel)
        z = rel @ self.hull_flat.basis.T
        perp = rel - z @ self.hull_flat.basis
        return z, np.einsum("ij,ij->i", perp, perp)

    def _project(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        z, perp2 = self._split(X)
        if self.k == 0:
            nearest = np.broadcast_to(self.vertices[0], (z.shape[0], self.ambient)).copy()
            return nearest, np.sqrt(perp2)
        nl, _ = self._inner._project(z)
        nearest = self.hull_flat.base + nl @ self.hull_flat.basis
        d2 = perp2 + np.einsum("ij,ij->i", z - nl, z - nl)
        return nearest, np.sqrt(np.maximum(d2, 0.0))

    def distance_batch(self, X):
        return self._project(X)[1]

    def nearest_batch(self, X, tol_unique):
        P, _ = self._project(X)
        return P, np.ones(P.shape[0], dtype=bool)

    def nearest_point_set(self, x, tol_unique):
        x = as_vector(x, self.ambient)
        p, d = self._project(x.reshape(1, -1))
        return ProjectionResult(float(d[0]), p, 0.0, True)

    def member_mask(self, X: np.ndarray) -> np.ndarray:
        z, perp2 = self._split(X)
        on_flat = perp2 <= (1e-9 * max(1.0, self.nominal_diameter())) ** 2
        if self.k == 0:
            return on_flat
        return on_flat & self._inner.member_mask(z)

    def face_of_point(self, a, tol: float | None = None):
        a = as_vector(a, self.ambient)
        if not self.member_mask(a.reshape(1, -1))[0]:
            return None
        if self.k == 0:
            return Face(frozenset(), (0,), AffineFlat(self.vertices[0],
                                                      np.zeros((0, self.ambient))), 0)
        z, _ = self._split(a.reshape(1, -1))
        inner_face = self._inner.face_of_point(z[0], tol)
        if inner_face is None:
            return None
        return self._lift_face(inner_face)

    def _lift_face(self, fc: Face) -> Face:
        base = self.hull_flat.base + fc.flat.base @ self.hull_flat.basis
        dirs = fc.flat.basis @ self.hull_flat.basis
        return Face(fc.facet_ids, fc.vertex_ids, AffineFlat(base, dirs), fc.dim)

    @property
    def faces(self) -> tuple[Face, ...]:
        if self.k == 0:
            return (Face(frozenset(), (0,),
                         AffineFlat(self.vertices[0], np.zeros((0, self.ambient))), 0),)
        return tuple(self._lift_face(fc) for fc in self._inner.faces)

    def normal_hints(self, a, tol: float = 1e-7) -> np.ndarray:
        a = as_vector(a, self.ambient)
        comp = complement_basis(self.hull_flat.basis, self.ambient)
        hints = [comp, -comp] if comp.size else []
        if self.k >= 1:
            z, _ = self._split(a.reshape(1, -1))
            local = self._inner.normal_hints(z[0], tol)
            if local.size:
                hints.append(local @ self.hull_flat.basis)
        if not hints:
            return np.zeros((0, self.ambient))
        return np.vstack(hints)

    def bounding(self):
        center = self.vertices.mean(axis=0)
        radius = float(np.max(np.linalg.norm(self.vertices - center, axis=1)))
        return center, max(radius, 0.0)

    def boundary_samples(self, count, seed):
        if self.k == 0:
            return np.repeat(self.vertices, count, axis=0)[:count]
        rng = np.random.default_rng(seed)
        pts = [v for v in self.vertices]
        # When the hull is lower-dimensional its whole body is ambient
        # boundary, so the top face participates; otherwise proper faces only.
        max_dim = self.k if self.k < self.ambient else self.k - 1
        faces = [fc for fc in self._inner.faces if 1 <= fc.dim <= max_dim]
        i = 0
        while len(pts) < count and faces:
            fc = faces[i % len(faces)]
            z = self._inner.relint_face_sample(fc, rng)
            pts.append(self.hull_flat.base + z @ self.hull_flat.basis)
            i += 1
        return np.array(pts[:count])

    def boundary_samples_by_step(self, step):
        if self.k == 0:
            return self.vertices.copy()
        if self.k == 1:
            lo = self.vertices[0]
            hi = self.vertices[1]
            num = max(2, int(np.ceil(np.linalg.norm(hi - lo) / step)) + 1)
            t = np.linspace(0.0, 1.0, num)
            return lo + t[:, None] * (hi - lo)
        local = self._inner.boundary_samples_by_step(step)
        return self.hull_flat.base + local @ self.hull_flat.basis


class Ball(ClosedSet):
    """Closed solid ball."""

    convex = True

    def __init__(self, center, radius: float):
        self.center = as_vector(center)
        if not np.isfinite(radius) or radius < 0:
            raise ValueError("ball radius must be finite and >= 0")
        self.radius = float(radius)
        self.ambient = self.center.size

    def distance_batch(self, X):
        X = np.asarray(X, float).reshape(-1, self.ambient)
        return np.maximum(np.linalg.norm(X - self.center, axis=1) - self.radius, 0.0)

    def nearest_batch(self, X, tol_unique):
        X = np.asarray(X, float).reshape(-1, self.ambient)
        rel = X - self.center
        d = np.linalg.norm(rel, axis=1)
        outside = d > self.radius
        P = X.copy()
        safe = np.where(d > 0, d, 1.0)
        P[outside] = self.center + rel[outside] * (self.radius / safe[outside])[:, None]
        return P, np.ones(X.shape[0], dtype=bool)

    def nearest_point_set(self, x, tol_unique):
        p, _ = self.nearest_batch(as_vector(x, self.ambient).reshape(1, -1), tol_unique)
        return ProjectionResult(self.distance(x), p, 0.0, True)

    def member_mask(self, X):
        X = np.asarray(X, float).reshape(-1, self.ambient)
        return np.linalg.norm(X - self.center, axis=1) <= self.radius + 1e-12

    def normal_hints(self, a, tol: float = 1e-7):
        a = as_vector(a, self.ambient)
        rel = a - self.center
        d = float(np.linalg.norm(rel))
        if abs(d - self.radius) <= max(tol, 1e-7 * max(1.0, self.radius)) and d > 0:
            return (rel / d).reshape(1, -1)
        return np.zeros((0, self.ambient))

    def bounding(self):
        return self.center, self.radius

    def boundary_samples(self, count, seed):
        return self.center + self.radius * _fibonacci_sphere(count, self.ambient, seed)

    def boundary_samples_by_step(self, step):
        count = _sphere_sample_count(self.radius, step, self.ambient)
        return self.center + self.radius * _fibonacci_sphere(count, self.ambient, 777)


def _sphere_sample_count(radius: float, step: float, n: int) -> int:
    if n == 1:
        return 2
    if n == 2:
        return max(8, int(np.ceil(2 * np.pi * radius / step)) + 1)
    count = int(np.ceil((6.0 * radius / step)) ** (n - 1))
    return int(min(max(count, 64), 200_000))


class Sphere(ClosedSet):
    """The boundary sphere alone (not the solid ball)."""

    convex = False

    def __init__(self, center, radius: float):
        self.center = as_vector(center)
        if not np.isfinite(radius) or radius <= 0:
            raise ValueError("sphere radius must be finite and > 0")
        self.radius = float(radius)
        self.ambient = self.center.size

    def distance_batch(self, X):
        X = np.asarray(X, float).reshape(-1, self.ambient)
        return np.abs(np.linalg.norm(X - self.center, axis=1) - self.radius)

    def nearest_batch(self, X, tol_unique):
        X = np.asarray(X, float).reshape(-1, self.ambient)
        rel = X - self.center
        d = np.linalg.norm(rel, axis=1)
        ok = d > max(tol_unique, 1e-13)
        safe = np.where(d > 0, d, 1.0)
        P = self.center + rel * (self.radius / safe)[:, None]
        P[~ok] = self.center + self.radius * np.eye(self.ambient)[0]
        return P, ok

    def nearest_point_set(self, x, tol_unique):
        x = as_vector(x, self.ambient)
        rel = x - self.center
        d = float(np.linalg.norm(rel))
        if d <= max(tol_unique, 1e-13):
            reps = self.center + self.radius * np.vstack([np.eye(self.ambient),
                                                          -np.eye(self.ambient)])
            return ProjectionResult(self.radius, reps, 2.0 * self.radius, False)
        p = self.center + rel * (self.radius / d)
        return ProjectionResult(abs(d - self.radius), p.reshape(1, -1), 0.0, True)

    def member_mask(self, X):
        return self.distance_batch(X) <= 1e-12

    def normal_hints(self, a, tol: float = 1e-7):
        a = as_vector(a, self.ambient)
        rel = a - self.center
        d = float(np.linalg.norm(rel))
        if d <= tol:
            return np.zeros((0, self.ambient))
        u = rel / d
        return np.vstack([u, -u])

    def bounding(self):
        return self.center, self.radius

    def boundary_samples(self, count, seed):
        return self.center + self.radius * _fibonacci_sphere(count, self.ambient, seed)

    def boundary_samples_by_step(self, step):
        count = _sphere_sample_count(self.radius, step, self.ambient)
        return self.center + self.radius * _fibonacci_sphere(count, self.ambient, 777)


class Flat(ClosedSet):
    """An affine flat as a closed set.  Unbounded whenever its dimension >= 1;
    ``window`` fixes the sampling range and nominal scale."""

    convex = True

    def __init__(self, flat: AffineFlat, window: float = 2.0):
        self.flat = flat
        self.ambient = flat.ambient_dim
        self.window = float(window)
        self.bounded = flat.dim == 0

    def distance_batch(self, X):
        return self.flat.distance_batch(np.asarray(X, float).reshape(-1, self.ambient))

    def nearest_batch(self, X, tol_unique):
        P = self.flat.project_batch(np.asarray(X, float).reshape(-1, self.ambient))
        return P, np.ones(P.shape[0], dtype=bool)

    def nearest_point_set(self, x, tol_unique):
        x = as_vector(x, self.ambient)
        p = self.flat.project(x)
        return ProjectionResult(float(np.linalg.norm(x - p)), p.reshape(1, -1), 0.0, True)

    def member_mask(self, X):
        return self.distance_batch(X) <= 1e-9 * max(1.0, self.window)

    def normal_hints(self, a, tol: float = 1e-7):
        comp = complement_basis(self.flat.basis, self.ambient)
        if comp.size == 0:
            return np.zeros((0, self.ambient))
        return np.vstack([comp, -comp])

    def bounding(self):
        return self.flat.base, self.window

    def boundary_samples(self, count, seed):
        if self.flat.dim == 0:
            return np.repeat(self.flat.base.reshape(1, -1), count, axis=0)
        rng = np.random.default_rng(seed)
        coeff = rng.uniform(-self.window, self.window, size=(count, self.flat.dim))
        return self.flat.base + coeff @ self.flat.basis

    def boundary_samples_by_step(self, step):
        raise UnsupportedInputError("flats of dimension >= 1 are unbounded")


class PointCloud(ClosedSet):
    """A finite set of points."""

    convex = False

    def __init__(self, points):
        self.points = as_points(points)
        if self.points.shape[0] == 0:
            raise ValueError("point cloud must be nonempty")
        self.ambient = self.points.shape[1]

    def distance_batch(self, X):
        X = np.asarray(X, float).reshape(-1, self.ambient)
        return pairwise_distances(X, self.points).min(axis=1)

    def nearest_batch(self, X, tol_unique):
        X = np.asarray(X, float).reshape(-1, self.ambient)
        D = pairwise_distances(X, self.points)
        idx = D.argmin(axis=1)
        dmin = D[np.arange(len(idx)), idx]
        ties = (D <= (dmin + DEFAULT_TIE_TOL)[:, None]).sum(axis=1)
        P = self.points[idx]
        return P, ties == 1

    def nearest_point_set(self, x, tol_unique):
        x = as_vector(x, self.ambient)
        d = np.linalg.norm(self.points - x, axis=1)
        dmin = float(d.min())
        reps = self.points[d <= dmin + DEFAULT_TIE_TOL]
        diam = float(pairwise_distances(reps, reps).max()) if reps.shape[0] > 1 else 0.0
        return ProjectionResult(dmin, reps, diam, diam <= tol_unique)

    def member_mask(self, X):
        return self.distance_batch(X) <= 1e-12

    def normal_hints(self, a, tol: float = 1e-7):
        return np.vstack([np.eye(self.ambient), -np.eye(self.ambient)])

    def bounding(self):
        center = self.points.mean(axis=0)
        radius = float(np.max(np.linalg.norm(self.points - center, axis=1)))
        return center, radius

    def boundary_samples(self, count, seed):
        reps = int(np.ceil(count / self.points.shape[0]))
        return np.tile(self.points, (reps, 1))[:count]

    def boundary_samples_by_step(self, step):
        return self.points.copy()


class UnionSet(ClosedSet):
    """Finite union of closed sets sharing one ambient dimension."""

    convex = False

    def __init__(self, parts):
        parts = tuple(parts)
        if not parts:
            raise ValueError("union must have at least one part")
        dims = {p.ambient for p in parts}
        if len(dims) != 1:
            raise ValueError(f"union parts live in different dimensions: {sorted(dims)}")
        self.parts = parts
        self.ambient = parts[0].ambient
        self.bounded = all(p.bounded for p in parts)

    def distance_batch(self, X):
        X = np.asarray(X, float).reshape(-1, self.ambient)
        return np.min([p.distance_batch(X) for p in self.parts], axis=0)

    def nearest_batch(self, X, tol_unique):
        X = np.asarray(X, float).reshape(-1, self.ambient)
        dists = np.array([p.distance_batch(X) for p in self.parts])  # (parts, B)
        dmin = dists.min(axis=0)
        reps = []
        oks = []
        for p in self.parts:
            P, ok = p.nearest_batch(X, tol_unique)
            reps.append(P)
            oks.append(ok)
        reps = np.array(reps)            # (parts, B, n)
        oks = np.array(oks)              # (parts, B)
        contributing = dists <= dmin[None, :] + DEFAULT_TIE_TOL
        best_part = np.argmax(contributing, axis=0)
        B = X.shape[0]
        P = reps[best_part, np.arange(B)]
        unique = np.ones(B, dtype=bool)
        for i in range(len(self.parts)):
            mask_i = contributing[i]
            unique &= np.where(mask_i, oks[i], True)
            for j in range(i + 1, len(self.parts)):
                both = mask_i & contributing[j]
                if np.any(both):
                    gap = np.linalg.norm(reps[i][both] - reps[j][both], axis=1)
                    sub = unique[both]
                    sub &= gap <= tol_unique
                    unique[both] = sub
        return P, unique

    def nearest_point_set(self, x, tol_unique):
        x = as_vector(x, self.ambient)
        results = [p.nearest_point_set(x, tol_unique) for p in self.parts]
        dmin = min(r.distance for r in results)
        reps = np.vstack([r.nearest for r in results if r.distance <= dmin + DEFAULT_TIE_TOL])
        diam = max((float(pairwise_distances(reps, reps).max()) if reps.shape[0] > 1 else 0.0),
                   max(r.diameter_bound for r in results if r.distance <= dmin + DEFAULT_TIE_TOL))
        return ProjectionResult(dmin, reps, diam, diam <= tol_unique)

    def member_mask(self, X):
        return np.any([getattr(p, "member_mask")(X) for p in self.parts], axis=0)

    def normal_hints(self, a, tol: float = 1e-7):
        hints = [p.normal_hints(a, tol) for p in self.parts if p.distance(a) <= tol]
        hints = [h for h in hints if h.size]
        if not hints:
            return np.zeros((0, self.ambient))
        return np.vstack(hints)

    def bounding(self):
        if not self.bounded:
            centers = np.array([p.bounding()[0] for p in self.parts])
            return centers.mean(axis=0), max(p.bounding()[1] for p in self.parts)
        data = [p.bounding() for p in self.parts]
        center = np.mean([c for c, _ in data], axis=0)
        radius = max(float(np.linalg.norm(c - center)) + r for c, r in data)
        return center, radius

    def boundary_samples(self, count, seed):
        per = max(1, count // len(self.parts))
        chunks = [p.boundary_samples(per, seed + 13 * i) for i, p in enumerate(self.parts)]
        pts = np.vstack(chunks)
        return pts[:count] if pts.shape[0] >= count else pts

    def boundary_samples_by_step(self, step):
        return np.vstack([p.boundary_samples_by_step(step) for p in self.parts])


# ---------------------------------------------------------------------------
# Module-level operations
# ---------------------------------------------------------------------------


def distance(A: ClosedSet, x) -> float:
    """Distance from ``x`` to the set; exact for every primitive variant and
    1-Lipschitz in ``x``."""
    return A.distance(x)


def default_tol_unique(A: ClosedSet) -> float:
    return 1e-8 * max(A.nominal_diameter(), 1e-6)


def nearest_point_set(A: ClosedSet, x, tol_unique: float | None = None) -> ProjectionResult:
    """All minimizers of |x - a| over the set, up to the representation's
    resolution, with a diameter bound and uniqueness verdict."""
    if tol_unique is None:
        tol_unique = default_tol_unique(A)
    if tol_unique <= 0:
        raise ValueError("tol_unique must be positive")
    return A.nearest_point_set(x, tol_unique)


def nearest_point(A: ClosedSet, x, tol_unique: float | None = None) -> np.ndarray | None:
    """The unique nearest point of the set, or None where uniqueness fails.

    The None return is a domain signal, not an error; for convex sets it
    never happens.
    """
    res = nearest_point_set(A, x, tol_unique)
    if not res.unique:
        return None
    return res.nearest[0]


def nearest_point_batch(A: ClosedSet, X: np.ndarray,
                        tol_unique: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """(points, validity mask) version of :func:`nearest_point` for campaigns."""
    if tol_unique is None:
        tol_unique = default_tol_unique(A)
    return A.nearest_batch(np.asarray(X, float).reshape(-1, A.ambient), tol_unique)


@dataclass(frozen=True)
class HausdorffEstimate:
    value: float
    sampling_step: float | None  # None when the value is exact

    @property
    def exact(self) -> bool:
        return self.sampling_step is None


def hausdorff_distance_sets(A: ClosedSet, B: ClosedSet,
                            resolution: float = 1e-3) -> HausdorffEstimate:
    """Hausdorff distance between two bounded sets.

    Exact by vertex maximization when both operands are convex polytopes
    (distance to a convex set is convex, so the supremum over a polytope is
    attained at a vertex); otherwise estimated from boundary samples with the
    sampling step reported alongside.
    """
    if not (A.bounded and B.bounded):
        raise UnsupportedInputError("hausdorff_distance_sets requires bounded sets")
    if isinstance(A, (HPolytope, VPolytope)) and isinstance(B, (HPolytope, VPolytope)):
        d_ab = float(B.distance_batch(A.vertices).max())
        d_ba = float(A.distance_batch(B.vertices).max())
        return HausdorffEstimate(max(d_ab, d_ba), None)
    sa = A.boundary_samples_by_step(resolution)
    sb = B.boundary_samples_by_step(resolution)
    d_ab = float(B.distance_batch(sa).max())
    d_ba = float(A.distance_batch(sb).max())
    return HausdorffEstimate(max(d_ab, d_ba), resolution)

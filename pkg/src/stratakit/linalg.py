"""Dense linear algebra for ambient dimensions up to 8.

Everything here is exact-as-possible small-n numerics: numerical ranks with a
relative singular-value threshold, orthonormal bases by modified Gram-Schmidt
with one re-orthogonalization pass, projections onto affine flats, and
Hausdorff distances between finite point sets.  All tolerances are explicit
parameters; nothing is hidden global state.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MAX_DIM = 8
ORTHO_TOL = 1e-12
DEFAULT_RANK_TOL = 1e-9


def as_vector(x, dim: int | None = None) -> np.ndarray:
    """Coerce ``x`` to a finite 1-D float array of length 1..8.

    ``dim``, when given, pins the expected length.  Raises ``ValueError`` for
    non-finite coordinates or out-of-range dimensions.
    """
    v = np.asarray(x, dtype=float)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got shape {v.shape}")
    if not 1 <= v.size <= MAX_DIM:
        raise ValueError(f"ambient dimension must be in 1..{MAX_DIM}, got {v.size}")
    if not np.all(np.isfinite(v)):
        raise ValueError("non-finite coordinate in vector")
    if dim is not None and v.size != dim:
        raise ValueError(f"expected dimension {dim}, got {v.size}")
    return v


def as_points(xs, dim: int | None = None) -> np.ndarray:
    """Coerce an iterable of points to a finite (k, n) float array."""
    pts = np.asarray(xs, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(1, -1)
    if pts.ndim != 2:
        raise ValueError(f"expected a list of points, got shape {pts.shape}")
    if pts.shape[0] == 0:
        return pts.reshape(0, dim if dim is not None else 0)
    if not 1 <= pts.shape[1] <= MAX_DIM:
        raise ValueError(f"ambient dimension must be in 1..{MAX_DIM}, got {pts.shape[1]}")
    if not np.all(np.isfinite(pts)):
        raise ValueError("non-finite coordinate in point list")
    if dim is not None and pts.shape[1] != dim:
        raise ValueError(f"expected dimension {dim}, got {pts.shape[1]}")
    return pts


def rank_of(vectors, tol_rank: float = DEFAULT_RANK_TOL) -> int:
    """Numerical rank of the stacked matrix of ``vectors``.

    Counts singular values exceeding ``tol_rank`` times the largest singular
    value (or times 1 if all singular values vanish).  The threshold is
    relative so rescaling any input vector by a factor in [1e-6, 1e6] does not
    change the result.
    """
    if tol_rank <= 0:
        raise ValueError("tol_rank must be positive")
    M = np.asarray(vectors, dtype=float)
    if M.size == 0:
        return 0
    if M.ndim == 1:
        M = M.reshape(1, -1)
    if not np.all(np.isfinite(M)):
        raise ValueError("non-finite coordinate in rank computation")
    s = np.linalg.svd(M, compute_uv=False)
    top = s[0] if s.size > 0 and s[0] > 0.0 else 1.0
    return int(np.sum(s > tol_rank * top))


def orthonormal_columns(vectors, tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Orthonormal basis of span(vectors) as a (k, n) row array.

    Modified Gram-Schmidt with one re-orthogonalization pass; vectors whose
    residual after projection is below ``tol`` times their norm are dropped.
    """
    rows = np.asarray(vectors, dtype=float)
    if rows.size == 0:
        return np.zeros((0, 0))
    if rows.ndim == 1:
        rows = rows.reshape(1, -1)
    basis: list[np.ndarray] = []
    for v in rows:
        w = v.astype(float).copy()
        for _ in range(2):  # MGS plus one re-orthogonalization pass
            for b in basis:
                w -= (w @ b) * b
        nw = float(np.linalg.norm(w))
        if nw > tol * max(1.0, float(np.linalg.norm(v))):
            basis.append(w / nw)
    if not basis:
        return np.zeros((0, rows.shape[1]))
    return np.array(basis)


def complement_basis(basis: np.ndarray, n: int) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of span(basis) in R^n."""
    B = np.asarray(basis, dtype=float).reshape(-1, n)
    if B.shape[0] == 0:
        return np.eye(n)
    # SVD rows beyond the rank span the complement exactly.
    _, s, vh = np.linalg.svd(B, full_matrices=True)
    rank = int(np.sum(s > DEFAULT_RANK_TOL * (s[0] if s.size and s[0] > 0 else 1.0)))
    return vh[rank:]


@dataclass(frozen=True)
class AffineFlat:
    """Affine subspace given by a base point and an orthonormal direction basis.

    ``basis`` has shape (k, n) with orthonormal rows (within 1e-12); k may be
    zero, in which case the flat is the single point ``base``.
    """

    base: np.ndarray
    basis: np.ndarray

    def __post_init__(self):
        base = as_vector(self.base)
        basis = np.asarray(self.basis, dtype=float).reshape(-1, base.size)
        if basis.shape[0] > base.size:
            raise ValueError("flat dimension exceeds ambient dimension")
        if basis.size and not np.all(np.isfinite(basis)):
            raise ValueError("non-finite basis entry")
        gram = basis @ basis.T
        if basis.shape[0] and np.max(np.abs(gram - np.eye(basis.shape[0]))) > 1e-10:
            raise ValueError("basis rows are not orthonormal within tolerance")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "basis", basis)

    @classmethod
    def from_spanning(cls, base, directions, tol: float = DEFAULT_RANK_TOL) -> "AffineFlat":
        base = as_vector(base)
        basis = orthonormal_columns(as_points(directions, base.size), tol) \
            if len(directions) else np.zeros((0, base.size))
        return cls(base, basis)

    @classmethod
    def through_points(cls, points, tol: float = DEFAULT_RANK_TOL) -> "AffineFlat":
        pts = as_points(points)
        if pts.shape[0] == 0:
            raise ValueError("need at least one point")
        return cls.from_spanning(pts[0], pts[1:] - pts[0], tol)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def ambient_dim(self) -> int:
        return self.base.size

    def project(self, x) -> np.ndarray:
        return self.project_batch(as_vector(x, self.ambient_dim).reshape(1, -1))[0]

    def project_batch(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if self.dim == 0:
            return np.broadcast_to(self.base, X.shape).copy()
        rel = X - self.base
        return self.base + (rel @ self.basis.T) @ self.basis

    def distance_batch(self, X: np.ndarray) -> np.ndarray:
        return np.linalg.norm(np.asarray(X, float) - self.project_batch(X), axis=-1)

    def contains(self, x, tol: float = 1e-9) -> bool:
        x = as_vector(x, self.ambient_dim)
        return float(np.linalg.norm(x - self.project(x))) <= tol


@dataclass(frozen=True)
class Subspace:
    """Linear subspace of R^n with an orthonormal basis; contains the origin."""

    basis: np.ndarray
    ambient: int = field(default=0)

    def __post_init__(self):
        basis = np.asarray(self.basis, dtype=float)
        if basis.ndim == 1:
            basis = basis.reshape(1, -1)
        ambient = self.ambient or (basis.shape[1] if basis.size else 0)
        if ambient == 0:
            raise ValueError("cannot infer ambient dimension of a trivial subspace")
        basis = basis.reshape(-1, ambient)
        flat = AffineFlat(np.zeros(ambient), basis)  # reuse orthonormality checks
        object.__setattr__(self, "basis", flat.basis)
        object.__setattr__(self, "ambient", ambient)

    @classmethod
    def from_spanning(cls, vectors, ambient: int | None = None) -> "Subspace":
        vs = np.asarray(vectors, dtype=float)
        if vs.ndim == 1:
            vs = vs.reshape(1, -1)
        n = ambient or vs.shape[1]
        return cls(orthonormal_columns(vs), n)

    @classmethod
    def zero(cls, ambient: int) -> "Subspace":
        return cls(np.zeros((0, ambient)), ambient)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def as_flat(self) -> AffineFlat:
        return AffineFlat(np.zeros(self.ambient), self.basis)

    def project_batch(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if self.dim == 0:
            return np.zeros_like(X)
        return (X @ self.basis.T) @ self.basis

    def orthogonal_complement(self) -> "Subspace":
        return Subspace(complement_basis(self.basis, self.ambient), self.ambient)


def project_onto_flat(x, flat: AffineFlat) -> np.ndarray:
    """Nearest point of ``flat`` to ``x``; the residual is orthogonal to the
    flat's basis within 1e-10."""
    return flat.project(x)


def dist_to_subspace(x, subspace: Subspace) -> float:
    """Euclidean distance from ``x`` to the subspace."""
    x = as_vector(x, subspace.ambient)
    return float(np.linalg.norm(x - subspace.project_batch(x.reshape(1, -1))[0]))


def dist_to_subspace_batch(X: np.ndarray, subspace: Subspace) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    return np.linalg.norm(X - subspace.project_batch(X), axis=-1)


def pairwise_distances(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """(len(A), len(B)) matrix of Euclidean distances."""
    A = np.asarray(A, float)
    B = np.asarray(B, float)
    diff = A[:, None, :] - B[None, :, :]
    return np.linalg.norm(diff, axis=-1)


def hausdorff_distance(A_pts, B_pts) -> float:
    """Hausdorff distance between two nonempty finite point sets."""
    A = as_points(A_pts)
    B = as_points(B_pts)
    if A.shape[0] == 0 or B.shape[0] == 0:
        raise ValueError("hausdorff_distance requires nonempty point sets")
    if A.shape[1] != B.shape[1]:
        raise ValueError("point sets live in different ambient dimensions")
    D = pairwise_distances(A, B)
    return float(max(D.min(axis=1).max(), D.min(axis=0).max()))

"""Ball-touching directions of a closed set at one of its points.

A vector v "touches" at a when the open ball of radius |v| centered at a+v
misses the set, equivalently dist(a+v, A) = |v|.  For each probe direction
the largest touching radius within a budget q is found by monotone bisection
(membership along a ray is an interval starting at 0).  The rank of the
directions that touch at a substantial fraction of q estimates the dimension
of the touching set, which is what the stratifier consumes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .linalg import as_vector, rank_of
from .sets import ClosedSet, _fibonacci_sphere

DEFAULT_REL_RESOLUTION = 1e-6
DEFAULT_Q_FRAC = 0.5


def derived_rank_tol(tol_touch: float, q: float, q_frac: float) -> float:
    """Rank threshold matched to the touching tolerance.

    A direction that only passes the touching test spuriously lies within
    angle sqrt(2 * tol_touch / (q_frac * q)) of the true touching span, so
    singular values below a small multiple of that angle must not add a
    dimension.
    """
    theta = np.sqrt(2.0 * tol_touch / max(q_frac * q, 1e-300))
    return max(1e-9, 4.0 * theta)


@dataclass(frozen=True)
class TouchingSample:
    """Per-point record of probed directions and their maximal touching radii.

    Every stored radius t > 0 satisfies |dist(A, base + t*v) - t| <= tol_touch;
    ``est_dim`` is the rank of the directions with radius >= q_frac * q.  The
    bisection resolution is recorded because the sampling, not the theory,
    fixes it.
    """

    base: np.ndarray
    directions: np.ndarray     # (d, n) unit rows
    max_radii: np.ndarray      # (d,) in [0, q]
    q: float
    est_dim: int
    q_frac: float
    resolution: float
    tol_touch: float

    def strong_directions(self) -> np.ndarray:
        return self.directions[self.max_radii >= self.q_frac * self.q]


def is_touching_direction(A: ClosedSet, a, v, tol_touch: float) -> bool:
    """True iff dist(A, a+v) agrees with |v| within tol_touch.

    Requires ``a`` to lie on the set (within tol_touch).
    """
    a = as_vector(a, A.ambient)
    v = as_vector(v, A.ambient) if np.ndim(v) else np.asarray(v, float)
    if A.distance(a) > tol_touch:
        raise PreconditionError("base point does not lie on the set")
    nv = float(np.linalg.norm(v))
    return abs(A.distance(a + v) - nv) <= tol_touch


def touching_radii(
    A: ClosedSet,
    bases: np.ndarray,
    dirs: np.ndarray,
    q: float,
    tol_touch: float,
    resolution: float = DEFAULT_REL_RESOLUTION,
) -> np.ndarray:
    """Largest touching radius t <= q per (base, direction) row pair.

    ``bases`` and ``dirs`` must have equal leading length; the bisection on
    each ray runs to relative resolution ``resolution`` and only evaluates the
    lanes that are still undecided, so large batches stay cheap.
    """
    bases = np.asarray(bases, float).reshape(-1, A.ambient)
    dirs = np.asarray(dirs, float).reshape(-1, A.ambient)
    if bases.shape != dirs.shape:
        raise ValueError("bases and dirs must align")
    m = bases.shape[0]

    def member(t: np.ndarray, mask: np.ndarray) -> np.ndarray:
        out = np.zeros(m, dtype=bool)
        if not np.any(mask):
            return out
        pts = bases[mask] + t[mask, None] * dirs[mask]
        out[mask] = np.abs(A.distance_batch(pts) - t[mask]) <= tol_touch
        return out

    all_mask = np.ones(m, dtype=bool)
    t_hi = np.full(m, q, dtype=float)
    at_q = member(t_hi, all_mask)
    radii = np.where(at_q, q, 0.0)

    open_mask = ~at_q
    t_floor = np.full(m, resolution * q)
    at_floor = member(t_floor, open_mask)
    active = open_mask & at_floor          # touching somewhere in (floor, q)
    radii[open_mask & ~at_floor] = 0.0

    lo = np.where(active, resolution * q, 0.0)
    hi = np.full(m, q, dtype=float)
    steps = int(np.ceil(np.log2(1.0 / resolution))) + 1
    for _ in range(steps):
        if not np.any(active):
            break
        mid = 0.5 * (lo + hi)
        ok = member(mid, active)
        lo = np.where(active & ok, mid, lo)
        hi = np.where(active & ~ok, mid, hi)
        active = active & ((hi - lo) > resolution * q)
    radii = np.where(open_mask & at_floor, lo, radii)
    return radii


def sample_touching(
    A: ClosedSet,
    a,
    q: float,
    num_dirs: int,
    tol_touch: float,
    q_frac: float = DEFAULT_Q_FRAC,
    seed: int = 0,
    resolution: float = DEFAULT_REL_RESOLUTION,
    rank_tol: float | None = None,
) -> TouchingSample:
    """Probe directions at ``a`` and record maximal touching radii.

    Directions combine a low-discrepancy sphere sample with the set's exact
    normal hints (active facet normals of polytopes, radial directions of
    balls and spheres), so convex-polytope dimension estimates are exact.
    """
    a = as_vector(a, A.ambient)
    if q <= 0:
        raise PreconditionError("probe radius q must be positive")
    if num_dirs < 2 * A.ambient:
        raise PreconditionError(f"num_dirs must be at least 2n = {2 * A.ambient}")
    if A.distance(a) > tol_touch:
        raise PreconditionError("probe point does not lie on the set")
    if rank_tol is None:
        rank_tol = derived_rank_tol(tol_touch, q, q_frac)
    dirs = _probe_directions(A, a, num_dirs, seed)
    bases = np.broadcast_to(a, dirs.shape).copy()
    radii = touching_radii(A, bases, dirs, q, tol_touch, resolution)
    strong = dirs[radii >= q_frac * q]
    est_dim = rank_of(strong, rank_tol) if strong.size else 0
    return TouchingSample(a, dirs, radii, q, est_dim, q_frac, resolution, tol_touch)


def _probe_directions(A: ClosedSet, a: np.ndarray, num_dirs: int, seed: int) -> np.ndarray:
    dirs = [_fibonacci_sphere(num_dirs, A.ambient, seed)]
    hints = A.normal_hints(a)
    if hints.size:
        norms = np.linalg.norm(hints, axis=1)
        dirs.append(hints[norms > 0] / norms[norms > 0, None])
    stacked = np.vstack(dirs)
    # dedupe near-identical directions to keep the bisection batch small
    seen: list[np.ndarray] = []
    for d in stacked:
        if not any(np.linalg.norm(d - s) <= 1e-12 for s in seen):
            seen.append(d)
    return np.array(seen)


def touching_dims_batch(
    A: ClosedSet,
    probes: np.ndarray,
    q: float,
    num_dirs: int,
    tol_touch: float,
    q_frac: float = DEFAULT_Q_FRAC,
    seed: int = 0,
    resolution: float = DEFAULT_REL_RESOLUTION,
    rank_tol: float | None = None,
) -> np.ndarray:
    """Dimension estimates for many probe points in one bisection campaign.

    Equivalent to running :func:`sample_touching` per probe with a
    probe-indexed seed, but all rays share the batched membership queries.
    """
    probes = np.asarray(probes, float).reshape(-1, A.ambient)
    if rank_tol is None:
        rank_tol = derived_rank_tol(tol_touch, q, q_frac)
    per_probe_dirs = []
    counts = []
    for i, p in enumerate(probes):
        d = _probe_directions(A, p, num_dirs, seed + 7919 * i)
        per_probe_dirs.append(d)
        counts.append(d.shape[0])
    bases = np.vstack([np.broadcast_to(p, d.shape)
                       for p, d in zip(probes, per_probe_dirs)])
    dirs = np.vstack(per_probe_dirs)
    radii = touching_radii(A, bases, dirs, q, tol_touch, resolution)
    dims = np.zeros(len(probes), dtype=int)
    start = 0
    for i, c in enumerate(counts):
        r = radii[start:start + c]
        d = dirs[start:start + c]
        strong = d[r >= q_frac * q]
        dims[i] = rank_of(strong, rank_tol) if strong.size else 0
        start += c
    return dims

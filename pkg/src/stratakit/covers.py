"""Desk-scale covering constructions: slab covers of a sampled map's
positive-fiber values and quadratic patch covers of point sets.

The slab cover replaces the measure-theoretic selection argument with greedy
choices over a finite plane family, so coverage is reported as a fraction and
never claimed complete; every greedy decision is recorded so runs can be
audited.  The patch cover fits local tangent planes by principal directions
and quadratic normal deviations by least squares, which is what second-order
rectifiability looks like at finitely many points.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError
from .gridio import GridMap
from .linalg import AffineFlat, as_points, orthonormal_columns

# ---------------------------------------------------------------------------
# coarea slab cover
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SlabPiece:
    plane: AffineFlat
    sample_positions: np.ndarray   # (k, n)
    sample_values: np.ndarray      # (k, nu)
    inverse_lipschitz: float
    new_bins: int
    kind: str                      # "axis" or "rotated", for the audit trail

    def to_json_dict(self) -> dict:
        return {
            "plane": {"base": self.plane.base.tolist(),
                      "basis": self.plane.basis.tolist()},
            "samples": self.sample_positions.tolist(),
            "values": self.sample_values.tolist(),
            "inverse_lipschitz": float(self.inverse_lipschitz),
            "new_bins": int(self.new_bins),
            "kind": self.kind,
        }


@dataclass
class SlabCoverReport:
    pieces: list[SlabPiece]
    covered_fraction: float
    z_threshold: int
    params: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "pieces": [p.to_json_dict() for p in self.pieces],
            "covered_fraction": float(self.covered_fraction),
            "z_threshold": int(self.z_threshold),
            "params": self.params,
        }


def _value_bins(values: np.ndarray, width: float) -> np.ndarray:
    return np.floor(values / width).astype(np.int64)


def _greedy_invlip_subset(pos: np.ndarray, val: np.ndarray, lip_bound: float
                          ) -> tuple[np.ndarray, float]:
    """Maximal-by-greedy sample subset on which the map is injective with
    inverse-Lipschitz constant <= lip_bound, checked on all kept pairs."""
    kept: list[int] = []
    for i in range(pos.shape[0]):
        if kept:
            dp = np.linalg.norm(pos[kept] - pos[i], axis=1)
            dv = np.linalg.norm(val[kept] - val[i], axis=1)
            if np.any(dp > lip_bound * dv):
                continue
        kept.append(i)
    idx = np.array(kept, dtype=int)
    L = 0.0
    if idx.size >= 2:
        P, V = pos[idx], val[idx]
        dp = np.linalg.norm(P[:, None, :] - P[None, :, :], axis=-1)
        dv = np.linalg.norm(V[:, None, :] - V[None, :, :], axis=-1)
        off = ~np.eye(idx.size, dtype=bool)
        safe = np.where(dv > 0, dv, np.inf)
        L = float(np.max(dp[off] / safe[off])) if np.any(off) else 0.0
    return idx, L


def recheck_inverse_lipschitz(piece: SlabPiece, lip_bound: float) -> bool:
    """Independent verification of the retained piece's contract."""
    P, V = piece.sample_positions, piece.sample_values
    if P.shape[0] < 2:
        return True
    for i in range(P.shape[0]):
        dp = np.linalg.norm(P[i + 1:] - P[i], axis=1)
        dv = np.linalg.norm(V[i + 1:] - V[i], axis=1)
        if np.any(dp > lip_bound * dv + 1e-12):
            return False
    return True


def coarea_slab_cover(
    grid: GridMap,
    m: int,
    z_threshold: int,
    lip_bound: float,
    value_bin_width: float | None = None,
    axis_stride: int | None = None,
    extra_rotations: int = 16,
    seed: int = 0,
) -> SlabCoverReport:
    """Cover the heavy-fiber values of a sampled map by slab pieces.

    Heavy values are value-space bins whose preimage occupies at least
    ``z_threshold`` grid nodes.  Candidate m-planes are axis-aligned grid
    slices plus randomly rotated planes; each contributes its greedy
    injective, inverse-Lipschitz sample subset and is retained when its image
    covers at least one new heavy bin.  If no bin is heavy the covered
    fraction is 1.0 by convention (logged in params).
    """
    n = grid.n
    if not 1 <= m <= n:
        raise PreconditionError(f"m must be in 1..{n}")
    pos_all = grid.node_positions()
    val_all = grid.flat_values()
    finite = np.all(np.isfinite(val_all), axis=1)
    pos = pos_all[finite]
    val = val_all[finite]
    if pos.shape[0] == 0:
        raise PreconditionError("grid has no finite values")

    if value_bin_width is None:
        spread = float(np.max(val.max(axis=0) - val.min(axis=0)))
        value_bin_width = max(spread / 64.0, 1e-12)
    bins = _value_bins(val, value_bin_width)
    uniq, counts = np.unique(bins, axis=0, return_counts=True)
    heavy = uniq[counts >= z_threshold]
    heavy_set = {tuple(b) for b in heavy}
    params = {
        "value_bin_width": value_bin_width,
        "lip_bound": lip_bound,
        "z_bins": int(len(heavy_set)),
        "empty_z": len(heavy_set) == 0,
        "extra_rotations": extra_rotations,
        "seed": seed,
    }
    if not heavy_set:
        return SlabCoverReport([], 1.0, z_threshold, params)

    steps = grid.steps()
    pieces: list[SlabPiece] = []
    covered: set[tuple] = set()

    def offer(plane: AffineFlat, mask: np.ndarray, kind: str):
        if not np.any(mask):
            return
        p, v = pos[mask], val[mask]
        order = np.lexsort(np.round(p, 10).T[::-1])
        idx, L = _greedy_invlip_subset(p[order], v[order], lip_bound)
        if idx.size == 0:
            return
        kept_vals = v[order][idx]
        kept_bins = {tuple(b) for b in _value_bins(kept_vals, value_bin_width)}
        new = (kept_bins & heavy_set) - covered
        if not new:
            return
        covered.update(new)
        pieces.append(SlabPiece(plane, p[order][idx], kept_vals, L, len(new), kind))

    # axis-aligned slices: span axes S, fix the others at grid levels
    for span_axes in itertools.combinations(range(n), m):
        fixed_axes = [ax for ax in range(n) if ax not in span_axes]
        level_lists = []
        for ax in fixed_axes:
            levels = grid.axis_levels(ax)
            stride = axis_stride or max(1, len(levels) // 16)
            level_lists.append(levels[stride // 2::stride])
        basis = np.eye(n)[list(span_axes)]
        for combo in itertools.product(*level_lists) if fixed_axes else [()]:
            if len(covered) == len(heavy_set):
                break
            base = np.zeros(n)
            mask = np.ones(pos.shape[0], dtype=bool)
            for ax, level in zip(fixed_axes, combo):
                base[ax] = level
                mask &= np.abs(pos[:, ax] - level) <= 0.5 * steps[ax] + 1e-12
            offer(AffineFlat(base, basis), mask, "axis")

    rng = np.random.default_rng(seed)
    thickness = 0.5 * float(steps.max())
    for _ in range(extra_rotations):
        if len(covered) == len(heavy_set):
            break
        frame = orthonormal_columns(rng.standard_normal((m, n)))
        if frame.shape[0] != m:
            continue
        base = pos[rng.integers(pos.shape[0])]
        plane = AffineFlat(base, frame)
        mask = plane.distance_batch(pos) <= thickness
        offer(plane, mask, "rotated")

    covered_fraction = len(covered) / len(heavy_set)
    return SlabCoverReport(pieces, covered_fraction, z_threshold, params)


# ---------------------------------------------------------------------------
# quadratic patch cover
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadraticPatch:
    plane: AffineFlat              # dim m, based at the seed point
    quad: np.ndarray               # (n-m, m, m) symmetric forms per normal direction
    normal_basis: np.ndarray       # (n-m, n)
    support_radius: float

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """Graph points of the quadratic over the plane at the tangential
        coordinates of ``points``."""
        rel = points - self.plane.base
        u = rel @ self.plane.basis.T                      # (k, m)
        out = self.plane.base + u @ self.plane.basis
        for Q, nu in zip(self.quad, self.normal_basis):
            w = np.einsum("ki,ij,kj->k", u, Q, u)
            out = out + w[:, None] * nu
        return out

    def to_json_dict(self) -> dict:
        return {
            "plane": {"base": self.plane.base.tolist(),
                      "basis": self.plane.basis.tolist()},
            "quad": self.quad.tolist(),
            "normal_basis": self.normal_basis.tolist(),
            "support_radius": float(self.support_radius),
        }


@dataclass
class PatchCover:
    patches: list[QuadraticPatch]
    assignment: np.ndarray         # point index -> patch index, -1 unassigned
    residual_bound: float

    def assigned_fraction(self) -> float:
        if self.assignment.size == 0:
            return 1.0
        return float(np.mean(self.assignment >= 0))

    def to_json_dict(self) -> dict:
        return {
            "patches": [p.to_json_dict() for p in self.patches],
            "assignment": self.assignment.tolist(),
            "residual_bound": float(self.residual_bound),
        }


def _fit_patch(points: np.ndarray, seed_idx: int, neighbors: np.ndarray, m: int
               ) -> QuadraticPatch | None:
    n = points.shape[1]
    base = points[seed_idx]
    nb = points[neighbors]
    centered = nb - nb.mean(axis=0)
    cov = centered.T @ centered
    w, vecs = np.linalg.eigh(cov)
    order = np.argsort(w)[::-1]
    tangent = vecs[:, order[:m]].T
    normal = vecs[:, order[m:]].T

    quad_terms = [(i, j) for i in range(m) for j in range(i, m)]
    needed = m + len(quad_terms) + 1
    if nb.shape[0] < needed:
        return None

    for _ in range(2):  # fit, absorb the linear tilt into the plane, refit
        rel = nb - base
        u = rel @ tangent.T
        wcoord = rel @ normal.T
        cols = [u[:, i] for i in range(m)]
        cols += [u[:, i] * u[:, j] for i, j in quad_terms]
        design = np.stack(cols, axis=1)
        coef, *_ = np.linalg.lstsq(design, wcoord, rcond=None)
        lin = coef[:m]                      # (m, n-m)
        if np.max(np.abs(lin)) < 1e-9:
            break
        tilted = tangent + lin @ normal
        frame = orthonormal_columns(np.vstack([tilted, normal]))
        if frame.shape[0] < n:
            return None
        tangent, normal = frame[:m], frame[m:]

    quad = np.zeros((n - m, m, m))
    for t, (i, j) in enumerate(quad_terms):
        for d in range(n - m):
            c = coef[m + t, d]
            if i == j:
                quad[d, i, i] = c
            else:
                quad[d, i, j] = quad[d, j, i] = 0.5 * c
    return QuadraticPatch(AffineFlat(base, tangent), quad, normal, 0.0)


def quadratic_patch_cover(
    points,
    m: int,
    tol_fit: float,
    support_radius: float,
) -> PatchCover:
    """Greedy cover of a point set by graphs of quadratics over m-planes.

    Repeatedly takes the lowest-index uncovered point, fits an m-plane through
    it by the principal directions of its neighbors within ``support_radius``,
    fits the quadratic normal deviation by least squares, and assigns every
    point meeting the residual contract
    ``|y - graph(y)| <= tol_fit * |y - base|^2`` within the support radius.
    Points with too few neighbors for the fit stay unassigned (reported, not
    fatal); assignment ties resolve to the lowest patch index because earlier
    patches claim points first.
    """
    pts = as_points(points)
    n = pts.shape[1]
    if not 1 <= m <= n:
        raise PreconditionError(f"m must be in 1..{n}")
    if tol_fit <= 0 or support_radius <= 0:
        raise PreconditionError("tol_fit and support_radius must be positive")
    count = pts.shape[0]
    assignment = np.full(count, -1, dtype=int)
    unfittable = np.zeros(count, dtype=bool)
    patches: list[QuadraticPatch] = []

    while True:
        open_idx = np.nonzero((assignment < 0) & ~unfittable)[0]
        if open_idx.size == 0:
            break
        seed_idx = int(open_idx[0])
        dist = np.linalg.norm(pts - pts[seed_idx], axis=1)
        neighbors = np.nonzero(dist <= support_radius)[0]
        patch = _fit_patch(pts, seed_idx, neighbors, m)
        # Refit on inliers of the residual contract, then trim gross outliers,
        # so neighborhoods crossing another branch of the set (skeleton
        # vertices, union seams) cannot tilt the patch.
        floor = max(1 + (neighbors.size // 2), 4)
        for _ in range(20):
            if patch is None or neighbors.size <= floor:
                break
            graph = patch.evaluate(pts[neighbors])
            resid = np.linalg.norm(pts[neighbors] - graph, axis=1)
            off2 = np.maximum(np.linalg.norm(pts[neighbors] - pts[seed_idx], axis=1) ** 2,
                              1e-30)
            normalized = resid / off2
            inlier = normalized <= tol_fit + 1e-12
            inlier[neighbors == seed_idx] = True
            if np.all(inlier):
                if float(normalized.max()) <= 0.02 * tol_fit:
                    break
                # contract met but far from clean: peel the worst decile
                cut = np.quantile(normalized, 0.9)
                inlier = normalized < cut
                inlier[neighbors == seed_idx] = True
                if np.all(inlier):
                    break
            refined = neighbors[inlier]
            if refined.size < floor:
                break
            neighbors = refined
            patch = _fit_patch(pts, seed_idx, neighbors, m)
        if patch is None:
            unfittable[seed_idx] = True
            continue
        patch = QuadraticPatch(patch.plane, patch.quad, patch.normal_basis, support_radius)
        cand = np.nonzero((assignment < 0) & (dist <= support_radius))[0]
        graph = patch.evaluate(pts[cand])
        resid = np.linalg.norm(pts[cand] - graph, axis=1)
        offset2 = np.maximum(np.linalg.norm(pts[cand] - patch.plane.base, axis=1) ** 2,
                             1e-300)
        ok = resid <= tol_fit * offset2 + 1e-12
        ok[cand == seed_idx] = True
        if not np.any(ok):
            unfittable[seed_idx] = True
            continue
        assignment[cand[ok]] = len(patches)
        patches.append(patch)

    return PatchCover(patches, assignment, tol_fit)


def recheck_patch_cover(points, cover: PatchCover) -> bool:
    """Independent pass over the stored cover: every assigned point must meet
    the quadratic-graph deviation bound within its patch's support radius."""
    pts = as_points(points)
    for idx, patch_id in enumerate(cover.assignment):
        if patch_id < 0:
            continue
        patch = cover.patches[patch_id]
        offset = float(np.linalg.norm(pts[idx] - patch.plane.base))
        if offset > patch.support_radius + 1e-12:
            return False
        graph = patch.evaluate(pts[idx].reshape(1, -1))[0]
        if np.linalg.norm(pts[idx] - graph) > cover.residual_bound * offset**2 + 1e-9:
            return False
    return True

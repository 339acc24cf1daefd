"""Polyhedral convex cones: polars, relative interiors, exact projection,
and the cone-control constant.

Cones are stored by generating rays.  Conversion between the generator and
inequality descriptions is done by direct enumeration of extremal active
sets, which is exact and needs no LP at desk scale (n <= 8, <= 64
generators).  Two cones are the same set iff their generators are mutually
members, which is what the tests check.
"""

from __future__ import annotations

import itertools

import numpy as np

from .errors import ContradictionError, PreconditionError, UnboundedGammaError
from .linalg import (
    DEFAULT_RANK_TOL,
    Subspace,
    complement_basis,
    orthonormal_columns,
    rank_of,
)

_RAY_TOL = 1e-9
_MAX_ACTIVE_SUBSETS = 2_000_000


def _dedupe_rays(rays: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Unit-normalize rows, drop near-zero ones, dedupe, sort for determinism."""
    if rays.size == 0:
        return rays.reshape(0, rays.shape[-1] if rays.ndim == 2 else 0)
    norms = np.linalg.norm(rays, axis=1)
    keep = rays[norms > tol] / norms[norms > tol, None]
    out: list[np.ndarray] = []
    for r in keep:
        if not any(np.linalg.norm(r - s) <= tol for s in out):
            out.append(r)
    if not out:
        return np.zeros((0, rays.shape[1]))
    arr = np.array(out)
    order = np.lexsort(np.round(arr, 12).T[::-1])
    return arr[order]


def _halfspace_cone_description(
    ineq: np.ndarray,
    eq: np.ndarray | None,
    n: int,
    tol: float = _RAY_TOL,
) -> tuple[np.ndarray, np.ndarray]:
    """Generator description of ``{x : ineq @ x <= 0, eq @ x = 0}``.

    Returns ``(lineality_basis, extreme_rays)``; the cone is
    span(lineality) + cone(extreme_rays) and the rays are extreme in the
    pointed quotient.  All rows unit length, deterministic order.
    """
    ineq = np.asarray(ineq, dtype=float).reshape(-1, n)
    ineq = _dedupe_rays(ineq, tol)
    eq_rows = np.zeros((0, n)) if eq is None else np.asarray(eq, float).reshape(-1, n)

    # Work inside W = {x : eq @ x = 0}.
    W = complement_basis(orthonormal_columns(eq_rows), n) if eq_rows.size else np.eye(n)
    k = W.shape[0]
    if k == 0:
        return np.zeros((0, n)), np.zeros((0, n))
    A = ineq @ W.T if ineq.size else np.zeros((0, k))
    A = _dedupe_rays(A, tol)

    # Lineality inside W, then restrict to its complement to get a pointed cone.
    L_local = complement_basis(orthonormal_columns(A), k) if A.size else np.eye(k)
    lineality = L_local @ W if L_local.size else np.zeros((0, n))
    P = complement_basis(L_local, k)  # pointed-part coordinates inside W
    kp = P.shape[0]
    if kp == 0:
        return _dedupe_keep_pairs(lineality), np.zeros((0, n))
    B = A @ P.T  # inequalities in the pointed coordinates
    B = _dedupe_rays(B, tol)
    m = B.shape[0]

    rays_local: list[np.ndarray] = []
    if kp == 1:
        for cand in (np.array([1.0]), np.array([-1.0])):
            if m == 0 or np.all(B @ cand <= tol):
                rays_local.append(cand)
    else:
        count = _subset_count(m, kp - 1)
        if count > _MAX_ACTIVE_SUBSETS:
            raise PreconditionError(
                f"cone description too large to enumerate ({m} inequalities in dim {kp})"
            )
        for subset in itertools.combinations(range(m), kp - 1):
            sub = B[list(subset)]
            if rank_of(sub, DEFAULT_RANK_TOL) != kp - 1:
                continue
            null = complement_basis(orthonormal_columns(sub), kp)
            if null.shape[0] != 1:
                continue
            d = null[0]
            for cand in (d, -d):
                vals = B @ cand
                if np.all(vals <= tol):
                    # Extremality: active rows must pin exactly a ray.
                    active = B[np.abs(vals) <= tol]
                    if rank_of(active, DEFAULT_RANK_TOL) == kp - 1:
                        rays_local.append(cand)
                    break
    rays = _dedupe_rays(np.asarray(rays_local).reshape(-1, kp) @ P @ W, tol) \
        if rays_local else np.zeros((0, n))
    return _dedupe_keep_pairs(lineality), rays


def _dedupe_keep_pairs(lineality: np.ndarray) -> np.ndarray:
    if lineality.size == 0:
        return lineality.reshape(0, lineality.shape[-1] if lineality.ndim == 2 else 0)
    order = np.lexsort(np.round(lineality, 12).T[::-1])
    return lineality[order]


def _subset_count(m: int, k: int) -> int:
    from math import comb

    return comb(m, k) if 0 <= k <= m else 0


class PolyhedralCone:
    """Convex cone generated by finitely many rays (closed under positive
    scaling by construction; always contains the origin)."""

    def __init__(self, generators, ambient: int | None = None):
        gens = np.asarray(generators, dtype=float)
        if gens.size == 0:
            if ambient is None:
                raise ValueError("ambient dimension required for the zero cone")
            gens = np.zeros((0, ambient))
        if gens.ndim == 1:
            gens = gens.reshape(1, -1)
        if not np.all(np.isfinite(gens)):
            raise ValueError("non-finite cone generator")
        self.ambient = ambient or gens.shape[1]
        if gens.shape[1] != self.ambient:
            raise ValueError("generator dimension mismatch")
        self.generators = _dedupe_rays(gens)
        self._span = orthonormal_columns(self.generators)
        self.dim = self._span.shape[0]
        self._inequalities: np.ndarray | None = None
        self._lineality: np.ndarray | None = None
        self._extreme: np.ndarray | None = None

    # -- cached descriptions -------------------------------------------------

    @property
    def span_basis(self) -> np.ndarray:
        return self._span

    @property
    def inequalities(self) -> np.ndarray:
        """Outer normals h with  C = span(C) ∩ {x : h·x <= 0 for all h}.

        These are the generators of the polar cone; the pairs spanning the
        orthogonal complement of span(C) pin the affine hull.
        """
        if self._inequalities is None:
            lin, rays = _halfspace_cone_description(self.generators, None, self.ambient)
            self._inequalities = np.vstack([lin, -lin, rays]) if lin.size else rays
        return self._inequalities

    def _canonical(self) -> tuple[np.ndarray, np.ndarray]:
        """(lineality basis, extreme rays) of this cone."""
        if self._lineality is None or self._extreme is None:
            ineq = self.inequalities
            lin, rays = _halfspace_cone_description(ineq, None, self.ambient)
            self._lineality, self._extreme = lin, rays
        return self._lineality, self._extreme

    @property
    def lineality_basis(self) -> np.ndarray:
        return self._canonical()[0]

    @property
    def extreme_rays(self) -> np.ndarray:
        return self._canonical()[1]

    # -- predicates ----------------------------------------------------------

    def contains(self, v, tol: float = 1e-9) -> bool:
        v = np.asarray(v, dtype=float).reshape(self.ambient)
        nv = float(np.linalg.norm(v))
        if nv <= tol:
            return True  # the origin is always a member
        in_span = self._span_residual(v) <= tol * max(1.0, nv)
        if not in_span:
            return False
        ineq = self.inequalities
        if ineq.size == 0:
            return True
        return bool(np.all(ineq @ v <= tol * max(1.0, nv)))

    def _span_residual(self, v: np.ndarray) -> float:
        if self.dim == 0:
            return float(np.linalg.norm(v))
        proj = (v @ self._span.T) @ self._span
        return float(np.linalg.norm(v - proj))

    def relint_contains(self, v, tol: float = 1e-9) -> bool:
        """Membership in the relative interior.

        True iff ``v`` lies in the span of the cone (residual <= tol) and every
        cached inequality that is not identically zero on that span is strictly
        negative at ``v`` with margin > tol*|v|.  For ``v = 0`` this is true
        exactly when the cone is {0}.
        """
        if tol <= 0:
            raise ValueError("tol must be positive")
        v = np.asarray(v, dtype=float).reshape(self.ambient)
        nv = float(np.linalg.norm(v))
        if nv <= tol:
            return self.dim == 0
        if self._span_residual(v) > tol:
            return False
        ineq = self.inequalities
        if ineq.size == 0:
            return True
        if self.dim > 0:
            proj = (ineq @ self._span.T) @ self._span
            nonzero_on_span = np.linalg.norm(proj, axis=1) > tol
        else:
            nonzero_on_span = np.zeros(ineq.shape[0], dtype=bool)
        active = ineq[nonzero_on_span]
        if active.size == 0:
            return True
        return bool(np.all(active @ v < -tol * nv))


def polar(cone: PolyhedralCone) -> PolyhedralCone:
    """Polar cone {d : d·c <= 0 for all c in the cone}, as generators.

    For the zero cone this is all of R^n (generators +-e_i).  The polar of the
    polar reproduces the original cone as a set.
    """
    lin, rays = _halfspace_cone_description(cone.generators, None, cone.ambient)
    gens = np.vstack([lin, -lin, rays]) if lin.size else rays
    return PolyhedralCone(gens, ambient=cone.ambient)


def tangent_from_normal(normal_cone: PolyhedralCone) -> PolyhedralCone:
    """Tangent cone as the polar of the normal cone: {u : u·v <= 0 for all v}."""
    return polar(normal_cone)


def cone_hull(directions, ambient: int | None = None) -> PolyhedralCone:
    """Cone generated by the given directions."""
    return PolyhedralCone(directions, ambient=ambient)


def intersect_with_subspace_rays(cone: PolyhedralCone, V: Subspace) -> np.ndarray:
    """Extreme rays of  polar(cone) ∩ V  given V by an orthonormal basis.

    The intersection is described by d·g <= 0 for the cone's generators plus
    d ⟂ V^⊥; the result is the (unit) extreme-ray list.
    """
    eq = complement_basis(V.basis, cone.ambient)
    lin, rays = _halfspace_cone_description(cone.generators, eq, cone.ambient)
    if lin.size:
        # A lineality direction inside the slice means the polar intersection
        # is not pointed; callers treat this as a degenerate configuration.
        rays = np.vstack([rays, lin, -lin]) if rays.size else np.vstack([lin, -lin])
    return rays


def project_onto_cone(cone: PolyhedralCone, b) -> np.ndarray:
    """Exact nearest point of the cone to ``b`` by face enumeration.

    Candidates are projections of ``b`` onto the spans of subsets of the
    cone's canonical generators (extreme rays plus lineality pairs); every
    feasible candidate is a member, and the face containing the true nearest
    point always contributes its exact projection.
    """
    return project_onto_cone_batch(cone, np.asarray(b, float).reshape(1, -1))[0]


def project_onto_cone_batch(cone: PolyhedralCone, B: np.ndarray) -> np.ndarray:
    B = np.asarray(B, dtype=float).reshape(-1, cone.ambient)
    lin, rays = cone._canonical()
    gens = np.vstack([lin, -lin, rays]) if lin.size else rays
    best = np.zeros_like(B)  # the apex is always a candidate
    best_d2 = np.einsum("ij,ij->i", B, B).astype(float)

    ineq = cone.inequalities
    scale = np.maximum(1.0, np.linalg.norm(B, axis=1))

    def consider(P: np.ndarray):
        nonlocal best, best_d2
        if ineq.size:
            feasible = np.all(ineq @ P.T <= 1e-9 * scale[None, :] + 1e-12, axis=0)
        else:
            feasible = np.ones(P.shape[0], dtype=bool)
        # membership also requires lying in the span of the cone
        if cone.dim < cone.ambient:
            proj = (P @ cone.span_basis.T) @ cone.span_basis if cone.dim else np.zeros_like(P)
            feasible &= np.linalg.norm(P - proj, axis=1) <= 1e-9 * np.maximum(1.0, scale)
        d2 = np.einsum("ij,ij->i", B - P, B - P)
        better = feasible & (d2 < best_d2 - 0.0)
        best[better] = P[better]
        best_d2[better] = d2[better]

    g = gens.shape[0]
    max_size = min(cone.dim, g)
    if _subset_count(g, max_size) * max(1, max_size) > _MAX_ACTIVE_SUBSETS:
        raise PreconditionError("cone too large for exact face-enumeration projection")
    seen_spans: list[np.ndarray] = []
    for size in range(1, max_size + 1):
        for subset in itertools.combinations(range(g), size):
            span = orthonormal_columns(gens[list(subset)])
            if span.shape[0] != size:
                continue  # dependent subset; its span is covered by a smaller one
            if any(span.shape == s.shape and np.allclose(span @ s.T, np.eye(size), atol=1e-10)
                   for s in seen_spans):
                continue
            seen_spans.append(span)
            consider((B @ span.T) @ span)
    return best


def dist_to_cone_batch(cone: PolyhedralCone, B: np.ndarray) -> np.ndarray:
    B = np.asarray(B, dtype=float).reshape(-1, cone.ambient)
    return np.linalg.norm(B - project_onto_cone_batch(cone, B), axis=1)


def cone_control_constant(cone: PolyhedralCone, U: Subspace, v) -> float:
    """Least gamma >= 0 with  dist(d, U) <= -gamma * d·v  for all d in the polar.

    Hypotheses checked: every basis vector of ``U`` is a member of the polar
    (within 1e-9), dim(cone) >= n - dim(U) and, after the check, equality is
    asserted; ``v`` must lie in the relative interior of the cone.  A ``v`` on
    the relative boundary makes the constant infinite and raises
    ``UnboundedGammaError``.

    The maximum of dist(d,U)/(-d·v) over the polar is attained on the extreme
    rays of polar ∩ U^⊥, which is what gets evaluated.
    """
    n = cone.ambient
    v = np.asarray(v, dtype=float).reshape(n)
    if U.ambient != n:
        raise PreconditionError("subspace ambient dimension mismatch")
    pol = polar(cone)
    for u in U.basis:
        if not (pol.contains(u, 1e-9) and pol.contains(-u, 1e-9)):
            raise PreconditionError("U is not contained in the polar cone")
    if cone.dim < n - U.dim:
        raise PreconditionError(
            f"dim C = {cone.dim} < n - dim U = {n - U.dim}; hypotheses not met"
        )
    if not cone.relint_contains(v, 1e-9):
        if cone.contains(v, 1e-9):
            raise UnboundedGammaError(
                "direction lies on the relative boundary of the cone; no finite constant"
            )
        raise PreconditionError("direction is not interior to the cone")
    if cone.dim != n - U.dim:
        raise ContradictionError(
            f"hypotheses verified but dim C = {cone.dim} != n - dim U = {n - U.dim}"
        )

    V = U.orthogonal_complement()
    rays = intersect_with_subspace_rays(cone, V)
    gamma = 0.0
    for r in rays:
        denom = -float(r @ v)
        if denom <= 1e-12:
            raise UnboundedGammaError(
                f"polar direction {r.tolist()} is orthogonal to the probe direction"
            )
        num = float(np.linalg.norm(r - U.project_batch(r.reshape(1, -1))[0]))
        gamma = max(gamma, num / denom)
    return gamma

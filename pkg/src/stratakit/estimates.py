"""Residual checks for the quantitative nearest-point projection estimates.

Each check evaluates one inequality on concrete inputs and returns a
structured report instead of a bare boolean: the parameters used, the worst
residual (positive = violation), and the witness inputs achieving it.  Any
genuine violation above tolerance falsifies the implementation, because the
underlying statements are proved; the harness is a correctness oracle for
the oracles.

Campaign drivers sample admissible inputs for a whole scene and reduce by
max residual, which is associative, so chunked or threaded evaluation cannot
change the outcome.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .bundles import is_touching_direction, sample_touching, touching_radii
from .cones import (
    PolyhedralCone,
    cone_control_constant,
    dist_to_cone_batch,
    polar,
    tangent_from_normal,
)
from .errors import InsufficientSampleError, PreconditionError, TheoremViolationError
from .linalg import Subspace, as_vector, complement_basis, dist_to_subspace_batch
from .sets import ClosedSet, _fibonacci_sphere, default_tol_unique, nearest_point_batch

ESTIMATE_IDS = (
    "angle",
    "projection_lipschitz",
    "cone_distance",
    "one_sided",
    "cone_control",
    "corollary_cone_control",
    "quadratic_contact",
)


@dataclass
class EstimateReport:
    estimate_id: str
    params: dict
    samples: int
    worst_residual: float
    worst_witness: dict
    passed: bool
    seed: int | None = None
    scene_id: str | None = None
    extra: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "estimate_id": self.estimate_id,
            "params": self.params,
            "samples": self.samples,
            "worst_residual": self.worst_residual,
            "worst_witness": self.worst_witness,
            "pass": self.passed,
            "seed": self.seed,
            "scene_id": self.scene_id,
        }


def _lst(x) -> list:
    return np.asarray(x, float).ravel().tolist()


def _touch_tol(A: ClosedSet) -> float:
    return 1e-7 * max(1.0, A.nominal_diameter())


def one_sided_curvature(q: float, r: float, s: float) -> float:
    """The constant kappa = (2s)^{-1} (1 + 2q/(q-r))^2 of the one-sided bound."""
    if not 0 < s < r < q:
        raise PreconditionError("need 0 < s < r < q")
    return (1.0 / (2.0 * s)) * (1.0 + 2.0 * q / (q - r)) ** 2


# ---------------------------------------------------------------------------
# single-instance checks
# ---------------------------------------------------------------------------


def check_angle(A: ClosedSet, a, b, v, q: float,
                tol_report: float | None = None,
                tol_touch: float | None = None,
                scene_id: str | None = None) -> EstimateReport:
    """First-order angle bound: (b-a)·v <= (2q)^{-1} |b-a|^2 |v|.

    Requires a and b on the set and either v = 0 or the direction of v to
    touch at a with radius q.
    """
    a = as_vector(a, A.ambient)
    b = as_vector(b, A.ambient)
    v = np.asarray(v, float).reshape(A.ambient)
    if q <= 0:
        raise PreconditionError("q must be positive")
    tol_touch = _touch_tol(A) if tol_touch is None else tol_touch
    if A.distance(a) > tol_touch or A.distance(b) > tol_touch:
        raise PreconditionError("base points must lie on the set")
    nv = float(np.linalg.norm(v))
    if nv > 0 and not is_touching_direction(A, a, q * v / nv, tol_touch):
        raise PreconditionError("direction does not touch at the base point with radius q")
    residual = float((b - a) @ v - (0.5 / q) * np.dot(b - a, b - a) * nv)
    tol = 1e-8 * A.nominal_diameter() ** 2 if tol_report is None else tol_report
    return EstimateReport(
        "angle", {"q": q, "tol_report": tol}, 1, residual,
        {"a": _lst(a), "b": _lst(b), "v": _lst(v)}, residual <= tol, scene_id=scene_id,
    )


def check_projection_lipschitz(A: ClosedSet, x, y, q: float, r: float,
                               tol_report: float | None = None,
                               tol_touch: float | None = None,
                               scene_id: str | None = None) -> EstimateReport:
    """Projection stability: |xi(x) - xi(y)| <= q (q-r)^{-1} |y-x|.

    Both points must project from within distance r with touching radius q
    (the zero-distance branch is accepted verbatim).  If the projections are
    not single-valued under these hypotheses, that contradicts a proved
    statement and raises ``TheoremViolationError``.
    """
    x = as_vector(x, A.ambient)
    y = as_vector(y, A.ambient)
    if not 0 < r < q:
        raise PreconditionError("need 0 < r < q")
    tol_touch = _touch_tol(A) if tol_touch is None else tol_touch
    pts, ok = nearest_point_batch(A, np.vstack([x, y]))
    dists = A.distance_batch(np.vstack([x, y]))
    if np.any(dists > r + 1e-12):
        raise PreconditionError("points must lie within distance r of the set")
    for p, d, xi_ok, label in ((x, dists[0], ok[0], "x"), (y, dists[1], ok[1], "y")):
        if not xi_ok:
            raise TheoremViolationError(
                f"nearest point not unique at {label} = {p.tolist()} despite the hypotheses"
            )
    for p, proj, d in ((x, pts[0], dists[0]), (y, pts[1], dists[1])):
        if d > tol_touch:
            u = (p - proj) / d
            if not is_touching_direction(A, proj, q * u, tol_touch):
                raise PreconditionError(
                    f"touching condition fails at {p.tolist()} with radius {q}"
                )
    lhs = float(np.linalg.norm(pts[0] - pts[1]))
    residual = lhs - q / (q - r) * float(np.linalg.norm(y - x))
    tol = 1e-8 * A.nominal_diameter() if tol_report is None else tol_report
    return EstimateReport(
        "projection_lipschitz", {"q": q, "r": r, "tol_report": tol}, 1, residual,
        {"x": _lst(x), "y": _lst(y), "xi_x": _lst(pts[0]), "xi_y": _lst(pts[1])},
        residual <= tol, scene_id=scene_id,
    )


def check_cone_distance(A: ClosedSet, a, b, C_generators, q: float,
                        tol_report: float | None = None,
                        tol_touch: float | None = None,
                        scene_id: str | None = None) -> EstimateReport:
    """Second-order cone bound: dist(b-a, polar C) <= (2q)^{-1} |b-a|^2 when
    every unit generator of C touches at a with radius q."""
    a = as_vector(a, A.ambient)
    b = as_vector(b, A.ambient)
    C = PolyhedralCone(C_generators, ambient=A.ambient)
    tol_touch = _touch_tol(A) if tol_touch is None else tol_touch
    if A.distance(a) > tol_touch or A.distance(b) > tol_touch:
        raise PreconditionError("base points must lie on the set")
    for g in C.generators:
        if not is_touching_direction(A, a, q * g, tol_touch):
            raise PreconditionError("a cone generator fails the touching condition")
    D = polar(C)
    gap = float(dist_to_cone_batch(D, (b - a).reshape(1, -1))[0])
    residual = gap - (0.5 / q) * float(np.dot(b - a, b - a))
    tol = 1e-8 * A.nominal_diameter() ** 2 if tol_report is None else tol_report
    return EstimateReport(
        "cone_distance", {"q": q, "tol_report": tol}, 1, residual,
        {"a": _lst(a), "b": _lst(b), "generators": [_lst(g) for g in C.generators]},
        residual <= tol, scene_id=scene_id,
    )


def check_one_sided(A: ClosedSet, x, y, q: float, r: float, s: float,
                    tol_report: float | None = None,
                    tol_touch: float | None = None,
                    scene_id: str | None = None) -> EstimateReport:
    """One-sided second-order bound (xi(x) - xi(y))·v <= kappa |y-x|^2 with v
    the unit direction from xi(x) to x and kappa from the stated formula.

    When both distances equal s exactly, the intermediate first-order bound
    (x-y)·v <= (2s)^{-1} |y-x|^2 is asserted as a sub-check.
    """
    x = as_vector(x, A.ambient)
    y = as_vector(y, A.ambient)
    kappa = one_sided_curvature(q, r, s)
    tol_touch = _touch_tol(A) if tol_touch is None else tol_touch
    dists = A.distance_batch(np.vstack([x, y]))
    if np.any(dists < s - 1e-12) or np.any(dists > r + 1e-12):
        raise PreconditionError("points must lie in the shell s <= dist <= r")
    pts, ok = nearest_point_batch(A, np.vstack([x, y]))
    if not np.all(ok):
        raise PreconditionError("nearest point not unique at a sample")
    v = (x - pts[0]) / dists[0]
    w = (y - pts[1]) / dists[1]
    for base, u in ((pts[0], v), (pts[1], w)):
        if not is_touching_direction(A, base, q * u, tol_touch):
            raise PreconditionError("touching condition fails at a projection point")
    residual = float((pts[0] - pts[1]) @ v) - kappa * float(np.dot(y - x, y - x))
    tol = 1e-8 * A.nominal_diameter() ** 2 if tol_report is None else tol_report
    params = {"q": q, "r": r, "s": s, "kappa": kappa, "tol_report": tol}
    extra = {}
    if abs(dists[0] - s) <= 1e-10 and abs(dists[1] - s) <= 1e-10:
        sub = float((x - y) @ v) - (0.5 / s) * float(np.dot(y - x, y - x))
        params["sub_residual"] = sub
        extra["sub_check"] = sub <= tol
        residual = max(residual, sub)
    return EstimateReport(
        "one_sided", params, 1, residual,
        {"x": _lst(x), "y": _lst(y), "xi_x": _lst(pts[0]), "xi_y": _lst(pts[1])},
        residual <= tol, scene_id=scene_id, extra=extra,
    )


def check_quadratic_contact(A: ClosedSet, x, U: Subspace, radius_grid,
                            tol: float | None = None,
                            q: float | None = None,
                            samples_per_radius: int = 64,
                            num_dirs: int | None = None,
                            seed: int = 0,
                            tol_touch: float | None = None,
                            scene_id: str | None = None) -> EstimateReport:
    """Quadratic contact of the projection map near an admissible point.

    Evaluates R(y) = |y-x|^{-2} dist(xi(y) - a, U) over admissible y at the
    radii in ``radius_grid`` and reports max R as the empirical lambda.  The
    limit-superior statement has no finite-sample surrogate, so boundedness is
    judged by a two-scale heuristic: pass iff max R over the two smallest
    radii is at most 4x max R over the two largest.  Both scales appear in the
    report.
    """
    x = as_vector(x, A.ambient)
    radius_grid = sorted(float(t) for t in radius_grid)
    if len(radius_grid) < 2:
        raise PreconditionError("radius_grid needs at least two radii")
    tol_touch = _touch_tol(A) if tol_touch is None else tol_touch
    tol_unique = default_tol_unique(A)
    pts, ok = nearest_point_batch(A, x.reshape(1, -1), tol_unique)
    d0 = float(A.distance_batch(x.reshape(1, -1))[0])
    if not ok[0] or d0 <= 0:
        raise PreconditionError("x must have a unique nearest point at positive distance")
    a = pts[0]
    if q is None:
        q = 2.0 * d0
    if not d0 < q:
        raise PreconditionError("need 0 < dist(x, A) < q")
    num_dirs = max(2 * A.ambient, 16) if num_dirs is None else num_dirs
    bundle = sample_touching(A, a, q, num_dirs, tol_touch, seed=seed)
    hull = PolyhedralCone(bundle.strong_directions(), ambient=A.ambient)
    probe_dir = q * (x - a) / d0
    if not hull.relint_contains(probe_dir, 1e-9):
        raise PreconditionError(
            "probe direction is not in the relative interior of the sampled bundle hull"
        )
    tangent = tangent_from_normal(hull)
    for u in U.basis:
        if not (tangent.contains(u, 1e-7) and tangent.contains(-u, 1e-7)):
            raise PreconditionError("U is not contained in the sampled tangent cone")
    if bundle.est_dim < A.ambient - U.dim:
        raise PreconditionError(
            f"sampled touching dimension {bundle.est_dim} < n - dim U = {A.ambient - U.dim}"
        )

    per_radius: list[float] = []
    witness = {"x": _lst(x), "a": _lst(a)}
    worst_ratio = -np.inf
    for k, rho in enumerate(radius_grid):
        dirs = _fibonacci_sphere(samples_per_radius, A.ambient, seed + 31 * k)
        Y = x + rho * dirs
        dy = A.distance_batch(Y)
        P, oky = nearest_point_batch(A, Y, tol_unique)
        admissible = oky & (dy > 0) & (dy < q)
        if np.any(admissible):
            u = (Y[admissible] - P[admissible]) / dy[admissible][:, None]
            touch_r = touching_radii(A, P[admissible], u, q, tol_touch)
            sub = np.zeros(Y.shape[0], dtype=bool)
            sub[np.nonzero(admissible)[0]] = touch_r >= q * (1 - 1e-5)
            admissible = sub
        if not np.any(admissible):
            raise InsufficientSampleError(
                f"no admissible sample at radius {rho}; refine the grid or seeds"
            )
        ratios = dist_to_subspace_batch(P[admissible] - a, U) / rho**2
        rmax = float(ratios.max())
        per_radius.append(rmax)
        if rmax > worst_ratio:
            worst_ratio = rmax
            i = int(np.argmax(ratios))
            witness["y"] = _lst(Y[admissible][i])
            witness["radius"] = rho

    small = max(per_radius[0], per_radius[1])
    large = max(per_radius[-1], per_radius[-2])
    tol = 1e-9 if tol is None else tol
    residual = small - 4.0 * large
    params = {
        "q": q,
        "radius_grid": radius_grid,
        "lambda_empirical": worst_ratio,
        "ratio_small_scales": small,
        "ratio_large_scales": large,
        "heuristic": "two-scale boundedness, factor 4",
        "tol_report": tol,
    }
    return EstimateReport(
        "quadratic_contact", params, samples_per_radius * len(radius_grid),
        residual, witness, residual <= tol, seed=seed, scene_id=scene_id,
    )


# ---------------------------------------------------------------------------
# scene campaigns
# ---------------------------------------------------------------------------


def thread_count() -> int:
    raw = os.environ.get("STRATAKIT_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _chunked_max(fn, arrays, chunk: int = 4096):
    """max-reduce fn over row chunks; order independent so threads are safe."""
    total = arrays[0].shape[0]
    workers = thread_count()
    spans = [(i, min(i + chunk, total)) for i in range(0, total, chunk)]
    results = []
    if workers > 1 and len(spans) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda sp: fn(*[a[sp[0]:sp[1]] for a in arrays], sp[0]),
                                    spans))
    else:
        results = [fn(*[a[lo:hi] for a in arrays], lo) for lo, hi in spans]
    best = max(results, key=lambda t: t[0])
    return best


def sample_shell_points(A: ClosedSet, count: int, d_lo: float, d_hi: float, q: float,
                        seed: int, tol_touch: float | None = None,
                        require_touch: bool = True,
                        max_batches: int = 200) -> np.ndarray:
    """Points x with d_lo <= dist(x, A) <= d_hi, unique projection, and the
    direction from xi(x) to x touching with radius q (when dist > 0)."""
    tol_touch = _touch_tol(A) if tol_touch is None else tol_touch
    tol_unique = default_tol_unique(A)
    center, R = A.bounding()
    lo = center - (R + d_hi + 0.1 * max(R, 1.0))
    hi = center + (R + d_hi + 0.1 * max(R, 1.0))
    rng = np.random.default_rng(seed)
    out: list[np.ndarray] = []
    got = 0
    for _ in range(max_batches):
        X = rng.uniform(lo, hi, size=(max(4 * count, 256), A.ambient))
        d = A.distance_batch(X)
        mask = (d >= d_lo) & (d <= d_hi)
        if not np.any(mask):
            continue
        X = X[mask]
        d = d[mask]
        P, ok = nearest_point_batch(A, X, tol_unique)
        X, d, P = X[ok], d[ok], P[ok]
        if require_touch and X.shape[0]:
            pos = d > tol_touch
            if np.any(pos):
                u = (X[pos] - P[pos]) / d[pos][:, None]
                tr = touching_radii(A, P[pos], u, q, tol_touch)
                keep = np.ones(X.shape[0], dtype=bool)
                keep[np.nonzero(pos)[0]] = tr >= q * (1 - 1e-5)
                X = X[keep]
        if X.shape[0]:
            out.append(X)
            got += X.shape[0]
        if got >= count:
            break
    if got < count:
        raise InsufficientSampleError(
            f"collected {got}/{count} admissible shell points for {type(A).__name__}"
        )
    return np.vstack(out)[:count]


def campaign_projection_lipschitz(A: ClosedSet, q: float, r: float, pairs: int,
                                  seed: int, tol_report: float | None = None,
                                  scene_id: str | None = None) -> EstimateReport:
    if not 0 < r < q:
        raise PreconditionError("need 0 < r < q")
    X = sample_shell_points(A, 2 * pairs, 0.0, r, q, seed)
    xs, ys = X[:pairs], X[pairs:2 * pairs]
    tol = 1e-8 * A.nominal_diameter() if tol_report is None else tol_report
    px, _ = nearest_point_batch(A, xs)
    py, _ = nearest_point_batch(A, ys)

    def residual_block(xb, yb, pxb, pyb, offset):
        res = np.linalg.norm(pxb - pyb, axis=1) - q / (q - r) * np.linalg.norm(yb - xb, axis=1)
        i = int(np.argmax(res))
        return float(res[i]), offset + i

    worst, idx = _chunked_max(residual_block, (xs, ys, px, py))
    witness = {"x": _lst(xs[idx]), "y": _lst(ys[idx]),
               "xi_x": _lst(px[idx]), "xi_y": _lst(py[idx])}
    return EstimateReport("projection_lipschitz", {"q": q, "r": r, "tol_report": tol},
                          pairs, worst, witness, worst <= tol, seed, scene_id)


def campaign_one_sided(A: ClosedSet, q: float, r: float, s: float, pairs: int,
                       seed: int, tol_report: float | None = None,
                       scene_id: str | None = None) -> EstimateReport:
    kappa = one_sided_curvature(q, r, s)
    X = sample_shell_points(A, 2 * pairs, s, r, q, seed)
    xs, ys = X[:pairs], X[pairs:2 * pairs]
    px, _ = nearest_point_batch(A, xs)
    py, _ = nearest_point_batch(A, ys)
    dx = A.distance_batch(xs)
    v = (xs - px) / dx[:, None]
    res = np.einsum("ij,ij->i", px - py, v) - kappa * np.einsum("ij,ij->i", ys - xs, ys - xs)

    # sub-check of the proof's equal-distance case: slide both points to the
    # exact s-shell along their own projection directions
    dy = A.distance_batch(ys)
    w = (ys - py) / dy[:, None]
    alpha = px + s * v
    beta = py + s * w
    sub = np.einsum("ij,ij->i", alpha - beta, v) \
        - (0.5 / s) * np.einsum("ij,ij->i", beta - alpha, beta - alpha)

    tol = 1e-8 * A.nominal_diameter() ** 2 if tol_report is None else tol_report
    worst_main = float(res.max())
    worst_sub = float(sub.max())
    worst = max(worst_main, worst_sub)
    i = int(np.argmax(res)) if worst_main >= worst_sub else int(np.argmax(sub))
    witness = {"x": _lst(xs[i]), "y": _lst(ys[i]),
               "xi_x": _lst(px[i]), "xi_y": _lst(py[i])}
    params = {"q": q, "r": r, "s": s, "kappa": kappa,
              "sub_residual": worst_sub, "tol_report": tol}
    return EstimateReport("one_sided", params, pairs, worst, witness,
                          worst <= tol, seed, scene_id)


def campaign_angle(A: ClosedSet, q: float, samples: int, seed: int,
                   tol_report: float | None = None,
                   scene_id: str | None = None) -> EstimateReport:
    tol_touch = _touch_tol(A)
    bases = A.boundary_samples(max(8, samples // 64), seed)
    others = A.boundary_samples(64, seed + 1)
    tol = 1e-8 * A.nominal_diameter() ** 2 if tol_report is None else tol_report
    worst = -np.inf
    witness: dict = {}
    n_evald = 0
    for i, a in enumerate(bases):
        if n_evald >= samples:
            break
        bundle = sample_touching(A, a, q, 2 * A.ambient, tol_touch, seed=seed + i)
        dirs = bundle.directions[bundle.max_radii >= q * (1 - 1e-5)]
        if dirs.size == 0:
            continue
        rel = others - a
        prod = rel @ dirs.T                                   # (b, d)
        rhs = (0.5 / q) * np.einsum("ij,ij->i", rel, rel)     # |v| = 1
        res = prod - rhs[:, None]
        n_evald += res.size
        j, k = np.unravel_index(int(np.argmax(res)), res.shape)
        if res[j, k] > worst:
            worst = float(res[j, k])
            witness = {"a": _lst(a), "b": _lst(others[j]), "v": _lst(dirs[k] * q)}
    if not np.isfinite(worst):
        raise InsufficientSampleError("no touching directions found for the angle campaign")
    return EstimateReport("angle", {"q": q, "tol_report": tol}, n_evald,
                          worst, witness, worst <= tol, seed, scene_id)


def campaign_cone_distance(A: ClosedSet, q: float, samples: int, seed: int,
                           tol_report: float | None = None,
                           scene_id: str | None = None) -> EstimateReport:
    tol_touch = _touch_tol(A)
    bases = A.boundary_samples(8, seed)
    base = None
    bundle = None
    for i, a in enumerate(bases):
        cand = sample_touching(A, a, q, 2 * A.ambient, tol_touch, seed=seed + i)
        full = cand.directions[cand.max_radii >= q * (1 - 1e-5)]
        if full.shape[0]:
            base, bundle = a, full
            break
    if base is None:
        raise InsufficientSampleError("no boundary point with touching directions at radius q")
    C = PolyhedralCone(bundle, ambient=A.ambient)
    D = polar(C)
    others = A.boundary_samples(samples, seed + 101)
    rel = others - base
    gaps = dist_to_cone_batch(D, rel)
    res = gaps - (0.5 / q) * np.einsum("ij,ij->i", rel, rel)
    tol = 1e-8 * A.nominal_diameter() ** 2 if tol_report is None else tol_report
    i = int(np.argmax(res))
    witness = {"a": _lst(base), "b": _lst(others[i]),
               "generators": [_lst(g) for g in C.generators]}
    return EstimateReport("cone_distance", {"q": q, "tol_report": tol}, others.shape[0],
                          float(res[i]), witness, float(res[i]) <= tol, seed, scene_id)


def derive_cone_instance(A: ClosedSet, probe, q: float, seed: int = 0,
                         tol_touch: float | None = None
                         ) -> tuple[PolyhedralCone, Subspace, np.ndarray]:
    """(C, U, v) for the cone-control statements, from the sampled bundle at a
    probe point: C is the hull of the touching directions, U the orthogonal
    complement of its span, v an interior direction."""
    tol_touch = _touch_tol(A) if tol_touch is None else tol_touch
    bundle = sample_touching(A, probe, q, max(2 * A.ambient, 12), tol_touch, seed=seed)
    strong = bundle.strong_directions()
    if strong.shape[0] == 0:
        raise InsufficientSampleError("probe point has no touching directions")
    C = PolyhedralCone(strong, ambient=A.ambient)
    U = Subspace(complement_basis(C.span_basis, A.ambient), A.ambient)
    v = strong.mean(axis=0)
    if np.linalg.norm(v) < 1e-9 or not C.relint_contains(v, 1e-9):
        v = strong[0]
    return C, U, v


def sample_polar_directions(C: PolyhedralCone, count: int, seed: int) -> np.ndarray:
    """Unit members of polar(C) as nonnegative combinations of its generators."""
    D = polar(C)
    gens = D.generators
    if gens.shape[0] == 0:
        return np.zeros((0, C.ambient))
    rng = np.random.default_rng(seed)
    coeff = rng.exponential(size=(count, gens.shape[0]))
    d = coeff @ gens
    norms = np.linalg.norm(d, axis=1)
    good = norms > 1e-12
    return d[good] / norms[good, None]


def campaign_cone_control(A: ClosedSet, samples: int, seed: int, q: float,
                          tol_report: float = 1e-9,
                          scene_id: str | None = None) -> EstimateReport:
    """Certificate for the cone-control constant: dist(d, U) <= -gamma d·v on
    sampled members of the polar cone."""
    probe = A.boundary_samples(1, seed)[0]
    C, U, v = derive_cone_instance(A, probe, q, seed)
    gamma = cone_control_constant(C, U, v)
    d = sample_polar_directions(C, samples, seed + 7)
    if d.shape[0] == 0:
        res = np.array([-np.inf])
        d = np.zeros((1, A.ambient))
    else:
        res = dist_to_subspace_batch(d, U) + gamma * (d @ v)
    i = int(np.argmax(res))
    params = {"gamma": gamma, "q": q, "v": _lst(v), "tol_report": tol_report}
    witness = {"d": _lst(d[i]), "probe": _lst(probe)}
    worst = float(res[i])
    return EstimateReport("cone_control", params, int(d.shape[0]), worst, witness,
                          worst <= tol_report, seed, scene_id)


def campaign_corollary_cone_control(A: ClosedSet, samples: int, seed: int, q: float,
                                    tol_report: float = 1e-8,
                                    scene_id: str | None = None) -> EstimateReport:
    """Global form of the cone control bound:
    dist(b, U) <= -gamma b·v + (1 + gamma |v|) dist(b, D) for arbitrary b,
    with dist(b, D) by exact cone projection."""
    probe = A.boundary_samples(1, seed)[0]
    C, U, v = derive_cone_instance(A, probe, q, seed)
    gamma = cone_control_constant(C, U, v)
    D = polar(C)
    rng = np.random.default_rng(seed + 17)
    scale = max(1.0, A.nominal_diameter())
    b = rng.uniform(-scale, scale, size=(samples, A.ambient))
    lhs = dist_to_subspace_batch(b, U)
    rhs = -gamma * (b @ v) + (1.0 + gamma * float(np.linalg.norm(v))) * dist_to_cone_batch(D, b)
    res = lhs - rhs
    i = int(np.argmax(res))
    params = {"gamma": gamma, "q": q, "v": _lst(v), "tol_report": tol_report}
    witness = {"b": _lst(b[i]), "probe": _lst(probe)}
    worst = float(res[i])
    return EstimateReport("corollary_cone_control", params, samples, worst, witness,
                          worst <= tol_report, seed, scene_id)


def campaign_quadratic_contact(A: ClosedSet, q: float, radius_grid, seed: int,
                               samples_per_radius: int = 64,
                               scene_id: str | None = None) -> EstimateReport:
    """Quadratic-contact check at an automatically derived admissible point:
    the probe sits halfway out along a touching direction and U is the
    orthogonal complement of the sampled bundle span."""
    tol_touch = _touch_tol(A)
    bases = A.boundary_samples(8, seed)
    for i, a in enumerate(bases):
        bundle = sample_touching(A, a, q, max(2 * A.ambient, 16), tol_touch, seed=seed + i)
        strong = bundle.strong_directions()
        if strong.shape[0] == 0:
            continue
        hull = PolyhedralCone(strong, ambient=A.ambient)
        v = strong.mean(axis=0)
        if np.linalg.norm(v) < 1e-9 or not hull.relint_contains(v, 1e-9):
            v = strong[0]
        v = v / np.linalg.norm(v)
        x = a + 0.5 * q * v
        U = Subspace(complement_basis(hull.span_basis, A.ambient), A.ambient)
        if U.dim == 0:
            continue
        return check_quadratic_contact(
            A, x, U, radius_grid, q=q, samples_per_radius=samples_per_radius,
            seed=seed, scene_id=scene_id,
        )
    raise InsufficientSampleError("no admissible probe for the quadratic-contact check")


def run_estimate(A: ClosedSet, estimate_id: str, params: dict, seed: int,
                 scene_id: str | None = None) -> EstimateReport:
    """Dispatch a whole-scene campaign for one estimate id."""
    if estimate_id not in ESTIMATE_IDS:
        raise PreconditionError(f"unknown estimate id {estimate_id!r}; "
                                f"expected one of {', '.join(ESTIMATE_IDS)}")
    p = dict(params or {})
    diam = A.nominal_diameter()
    if estimate_id == "angle":
        return campaign_angle(A, p.get("q", 0.25 * diam), int(p.get("samples", 2000)),
                              seed, scene_id=scene_id)
    if estimate_id == "projection_lipschitz":
        return campaign_projection_lipschitz(
            A, p.get("q", 0.25 * diam), p.get("r", 0.125 * diam),
            int(p.get("pairs", 10_000)), seed, scene_id=scene_id)
    if estimate_id == "cone_distance":
        return campaign_cone_distance(A, p.get("q", 0.2 * diam),
                                      int(p.get("samples", 2000)), seed, scene_id=scene_id)
    if estimate_id == "one_sided":
        return campaign_one_sided(
            A, p.get("q", 0.4), p.get("r", 0.2), p.get("s", 0.1),
            int(p.get("pairs", 10_000)), seed, scene_id=scene_id)
    if estimate_id == "cone_control":
        return campaign_cone_control(A, int(p.get("samples", 10_000)), seed,
                                     p.get("q", 0.2 * diam), scene_id=scene_id)
    if estimate_id == "corollary_cone_control":
        return campaign_corollary_cone_control(A, int(p.get("samples", 10_000)), seed,
                                               p.get("q", 0.2 * diam), scene_id=scene_id)
    return campaign_quadratic_contact(
        A, p.get("q", 0.25 * diam), p.get("radius_grid", [1e-2, 1e-3, 1e-4, 1e-5]),
        seed, int(p.get("samples_per_radius", 64)), scene_id=scene_id)

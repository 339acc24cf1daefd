"""Scene files: hand-authored JSON descriptions of a closed set plus probe
and campaign parameters.

The format is versioned (``stratakit.scene.v1``) and validated field by
field so a malformed file is rejected with the offending path in the
message.  Seeds are mandatory: reproducibility is part of the contract, not
an option.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import SceneFormatError
from .linalg import AffineFlat
from .sets import (
    Ball,
    ClosedSet,
    Flat,
    HPolytope,
    PointCloud,
    Sphere,
    UnionSet,
    VPolytope,
)

SCENE_SCHEMA = "stratakit.scene.v1"
SET_TYPES = ("hpolytope", "vpolytope", "ball", "sphere", "flat", "point_cloud", "union")


def _expect(cond: bool, message: str, path: str):
    if not cond:
        raise SceneFormatError(message, path)


def _vector(obj, n: int, path: str) -> list[float]:
    _expect(isinstance(obj, list) and len(obj) == n, f"expected a list of {n} numbers", path)
    out = []
    for i, x in enumerate(obj):
        _expect(isinstance(x, (int, float)) and np.isfinite(x), "expected a finite number",
                f"{path}[{i}]")
        out.append(float(x))
    return out


def _validate_set(desc, n: int, path: str) -> dict:
    _expect(isinstance(desc, dict), "expected an object", path)
    tag = desc.get("type")
    _expect(tag in SET_TYPES, f"unknown set type {tag!r}; expected one of {SET_TYPES}",
            f"{path}.type")
    out: dict = {"type": tag}
    if tag == "hpolytope":
        hs = desc.get("halfspaces")
        _expect(isinstance(hs, list) and hs, "expected a nonempty list", f"{path}.halfspaces")
        out["halfspaces"] = []
        for i, h in enumerate(hs):
            hp = f"{path}.halfspaces[{i}]"
            _expect(isinstance(h, dict), "expected an object", hp)
            normal = _vector(h.get("normal"), n, f"{hp}.normal")
            off = h.get("offset")
            _expect(isinstance(off, (int, float)) and np.isfinite(off),
                    "expected a finite number", f"{hp}.offset")
            out["halfspaces"].append({"normal": normal, "offset": float(off)})
    elif tag == "vpolytope":
        vs = desc.get("vertices")
        _expect(isinstance(vs, list) and vs, "expected a nonempty list", f"{path}.vertices")
        out["vertices"] = [_vector(v, n, f"{path}.vertices[{i}]") for i, v in enumerate(vs)]
    elif tag in ("ball", "sphere"):
        out["center"] = _vector(desc.get("center"), n, f"{path}.center")
        r = desc.get("radius")
        _expect(isinstance(r, (int, float)) and np.isfinite(r) and r >= 0,
                "expected a finite radius >= 0", f"{path}.radius")
        _expect(tag == "ball" or r > 0, "sphere radius must be > 0", f"{path}.radius")
        out["radius"] = float(r)
    elif tag == "flat":
        out["base"] = _vector(desc.get("base"), n, f"{path}.base")
        basis = desc.get("basis", [])
        _expect(isinstance(basis, list), "expected a list", f"{path}.basis")
        out["basis"] = [_vector(b, n, f"{path}.basis[{i}]") for i, b in enumerate(basis)]
        w = desc.get("window", 2.0)
        _expect(isinstance(w, (int, float)) and w > 0, "expected a window > 0",
                f"{path}.window")
        out["window"] = float(w)
    elif tag == "point_cloud":
        ps = desc.get("points")
        _expect(isinstance(ps, list) and ps, "expected a nonempty list", f"{path}.points")
        out["points"] = [_vector(p, n, f"{path}.points[{i}]") for i, p in enumerate(ps)]
    else:  # union
        parts = desc.get("parts")
        _expect(isinstance(parts, list) and parts, "expected a nonempty list", f"{path}.parts")
        out["parts"] = [_validate_set(p, n, f"{path}.parts[{i}]")
                        for i, p in enumerate(parts)]
    return out


@dataclass
class SceneSpec:
    scene_id: str
    ambient_dim: int
    set_desc: dict
    probes: dict
    params: dict = field(default_factory=dict)

    def to_canonical_dict(self) -> dict:
        return {
            "schema": SCENE_SCHEMA,
            "scene_id": self.scene_id,
            "ambient_dim": self.ambient_dim,
            "set": self.set_desc,
            "probes": self.probes,
            "params": self.params,
        }

    def __eq__(self, other) -> bool:
        return isinstance(other, SceneSpec) and \
            self.to_canonical_dict() == other.to_canonical_dict()

    # -- builders -------------------------------------------------------------

    def build_set(self) -> ClosedSet:
        return build_set(self.set_desc)

    def probe_points(self, A: ClosedSet | None = None) -> np.ndarray:
        A = self.build_set() if A is None else A
        mode = self.probes["mode"]
        if mode == "explicit":
            return np.asarray(self.probes["points"], dtype=float)
        return A.boundary_samples(self.probes["count"], self.probes["seed"])

    @property
    def seed(self) -> int:
        return int(self.params["seed"])

    def q_grid(self, default_scale: float) -> list[float]:
        grid = self.params.get("q_grid")
        if grid:
            return [float(q) for q in grid]
        return [0.25 * default_scale]

    def estimate_params(self, estimate_id: str) -> dict:
        return dict(self.params.get("estimates", {}).get(estimate_id, {}))


def build_set(desc: dict) -> ClosedSet:
    tag = desc["type"]
    if tag == "hpolytope":
        return HPolytope([(h["normal"], h["offset"]) for h in desc["halfspaces"]])
    if tag == "vpolytope":
        return VPolytope(desc["vertices"])
    if tag == "ball":
        return Ball(desc["center"], desc["radius"])
    if tag == "sphere":
        return Sphere(desc["center"], desc["radius"])
    if tag == "flat":
        base = np.asarray(desc["base"], dtype=float)
        basis = np.asarray(desc.get("basis", []), dtype=float).reshape(-1, base.size)
        return Flat(AffineFlat.from_spanning(base, basis), desc.get("window", 2.0))
    if tag == "point_cloud":
        return PointCloud(desc["points"])
    return UnionSet([build_set(p) for p in desc["parts"]])


def parse_scene_dict(doc: dict) -> SceneSpec:
    _expect(isinstance(doc, dict), "scene document must be a JSON object", "$")
    schema = doc.get("schema")
    _expect(schema == SCENE_SCHEMA, f"unsupported schema {schema!r}", "schema")
    scene_id = doc.get("scene_id")
    _expect(isinstance(scene_id, str) and scene_id, "expected a nonempty string", "scene_id")
    n = doc.get("ambient_dim")
    _expect(isinstance(n, int) and 1 <= n <= 8, "expected an integer in 1..8", "ambient_dim")
    set_desc = _validate_set(doc.get("set"), n, "set")

    probes = doc.get("probes")
    _expect(isinstance(probes, dict), "expected an object", "probes")
    mode = probes.get("mode")
    _expect(mode in ("explicit", "boundary"), "mode must be 'explicit' or 'boundary'",
            "probes.mode")
    norm_probes: dict = {"mode": mode}
    if mode == "explicit":
        pts = probes.get("points")
        _expect(isinstance(pts, list) and pts, "expected a nonempty list", "probes.points")
        norm_probes["points"] = [_vector(p, n, f"probes.points[{i}]")
                                 for i, p in enumerate(pts)]
    else:
        count = probes.get("count")
        _expect(isinstance(count, int) and count > 0, "expected a positive integer",
                "probes.count")
        seed = probes.get("seed")
        _expect(isinstance(seed, int), "boundary sampling requires an integer seed",
                "probes.seed")
        norm_probes["count"] = count
        norm_probes["seed"] = seed

    params = doc.get("params", {})
    _expect(isinstance(params, dict), "expected an object", "params")
    _expect(isinstance(params.get("seed"), int), "params.seed is mandatory (reproducibility)",
            "params.seed")
    return SceneSpec(scene_id, n, set_desc, norm_probes, params)


def parse_scene_text(text: str) -> SceneSpec:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SceneFormatError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: "
                               f"{exc.msg}", "$") from exc
    return parse_scene_dict(doc)


def load_scene(path) -> SceneSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_scene_text(fh.read())

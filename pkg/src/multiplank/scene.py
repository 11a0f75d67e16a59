"""Scene files: JSON description of generating sets, bodies, fans and a gauge."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .geom import Fan, GeometryError, PolytopeBody
from .tolerance import Tolerance

BODY_KINDS = ("polygon", "points", "box", "halfspaces")


class SceneError(ValueError):
    """Schema or consistency problem in a scene file."""


def _matrix(value, what: str, dim: int | None = None) -> list[list[float]]:
    try:
        A = np.asarray(value, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise SceneError(f"{what}: not numeric") from exc
    if A.ndim != 2 or A.shape[0] == 0:
        raise SceneError(f"{what}: expected a non-empty list of points")
    if not np.all(np.isfinite(A)):
        raise SceneError(f"{what}: non-finite coordinate")
    if dim is not None and A.shape[1] != dim:
        raise SceneError(f"{what}: points must have {dim} coordinates")
    return A.tolist()


def _vector(value, what: str, dim: int) -> list[float]:
    v = np.asarray(value, dtype=np.float64) if isinstance(value, (list, tuple)) else None
    if v is None or v.shape != (dim,) or not np.all(np.isfinite(v)):
        raise SceneError(f"{what}: expected {dim} finite numbers")
    return v.tolist()


@dataclass
class Scene:
    dim: int = 2
    seed: int = 42
    generating_sets: list = field(default_factory=list)
    translations: list = field(default_factory=list)
    bodies: dict = field(default_factory=dict)
    fans: list = field(default_factory=list)
    gauge: dict | None = None
    planks: list = field(default_factory=list)
    tolerance: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)

    # -- parsing -----------------------------------------------------------
    @classmethod
    def from_dict(cls, raw) -> "Scene":
        if not isinstance(raw, dict):
            raise SceneError("scene must be a JSON object")
        known = {"dim", "seed", "generating_sets", "translations", "bodies", "fans",
                 "gauge", "planks", "tolerance", "options"}
        extra = set(raw) - known
        if extra:
            raise SceneError(f"unknown keys: {sorted(extra)}")
        dim = raw.get("dim", 2)
        if dim not in (2, 3) or isinstance(dim, bool):
            raise SceneError("dim must be 2 or 3")
        seed = raw.get("seed", 42)
        if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
            raise SceneError("seed must be a non-negative integer")
        gsets = [_matrix(V, f"generating_sets[{i}]", dim)
                 for i, V in enumerate(_list(raw, "generating_sets"))]
        trans = [_vector(t, f"translations[{i}]", dim) for i, t in enumerate(_list(raw, "translations"))]
        if trans and len(trans) != len(gsets):
            raise SceneError("translations must match generating_sets one to one")
        bodies = raw.get("bodies", {})
        if not isinstance(bodies, dict):
            raise SceneError("bodies must be an object")
        bodies = {str(k): _body_spec(v, k, dim) for k, v in bodies.items()}
        fans = [_fan_spec(f, i) for i, f in enumerate(_list(raw, "fans"))]
        if fans and dim != 2:
            raise SceneError("fans need dim 2")
        gauge = raw.get("gauge")
        if gauge is not None:
            if dim != 2 or not isinstance(gauge, dict) or set(gauge) != {"polygon"}:
                raise SceneError("gauge must be {\"polygon\": [...]} in a 2D scene")
            gauge = {"polygon": _matrix(gauge["polygon"], "gauge.polygon", 2)}
        planks = [_vector(u, f"planks[{i}]", dim) for i, u in enumerate(_list(raw, "planks"))]
        tol = raw.get("tolerance", {})
        if not isinstance(tol, dict) or set(tol) - {"eps_geom", "eps_opt"}:
            raise SceneError("tolerance accepts eps_geom and eps_opt only")
        options = raw.get("options", {})
        if not isinstance(options, dict):
            raise SceneError("options must be an object")
        scene = cls(dim, seed, gsets, trans, bodies, fans, gauge, planks, dict(tol), dict(options))
        scene.tol()  # validates the overrides
        return scene

    @classmethod
    def loads(cls, text: str) -> "Scene":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SceneError(f"invalid JSON: {exc}") from exc
        return cls.from_dict(raw)

    @classmethod
    def load(cls, path) -> "Scene":
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise SceneError(f"cannot read scene: {exc}") from exc
        return cls.loads(text)

    # -- serialisation -----------------------------------------------------
    def to_dict(self) -> dict:
        out = {"dim": self.dim, "seed": self.seed}
        for key in ("generating_sets", "translations", "bodies", "fans", "planks", "tolerance", "options"):
            val = getattr(self, key)
            if val:
                out[key] = val
        if self.gauge is not None:
            out["gauge"] = self.gauge
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def digest(self, extra: dict | None = None) -> str:
        payload = self.dumps() + json.dumps(extra or {}, sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()

    # -- materialisation ---------------------------------------------------
    def tol(self, eps_geom: float | None = None, eps_opt: float | None = None) -> Tolerance:
        base = Tolerance()
        g = eps_geom if eps_geom is not None else self.tolerance.get("eps_geom", base.eps_geom)
        o = eps_opt if eps_opt is not None else self.tolerance.get("eps_opt", base.eps_opt)
        try:
            return Tolerance(float(g), float(o))
        except (TypeError, ValueError) as exc:
            raise SceneError(f"bad tolerance: {exc}") from exc

    def translation(self, i: int) -> np.ndarray:
        if self.translations:
            return np.asarray(self.translations[i])
        return np.zeros(self.dim)

    def body(self, name: str) -> PolytopeBody:
        if name not in self.bodies:
            raise SceneError(f"scene has no body {name!r}")
        return build_body(self.bodies[name])

    def fan_objects(self) -> list[Fan]:
        return [Fan(tuple(f["apex"]), f["m"], f["rotation"]) for f in self.fans]


def _list(raw: dict, key: str) -> list:
    val = raw.get(key, [])
    if not isinstance(val, list):
        raise SceneError(f"{key} must be a list")
    return val


def _body_spec(spec, name, dim: int) -> dict:
    if not isinstance(spec, dict) or len(spec) != 1 or next(iter(spec)) not in BODY_KINDS:
        raise SceneError(f"body {name!r}: expected one of {BODY_KINDS}")
    kind, val = next(iter(spec.items()))
    if kind in ("polygon", "points"):
        if kind == "polygon" and dim != 2:
            raise SceneError(f"body {name!r}: polygon needs dim 2")
        return {kind: _matrix(val, f"body {name}", dim)}
    if kind == "box":
        if not isinstance(val, list) or len(val) != 2:
            raise SceneError(f"body {name!r}: box is [lo, hi]")
        return {"box": [_vector(val[0], f"body {name} lo", dim), _vector(val[1], f"body {name} hi", dim)]}
    if not isinstance(val, dict) or set(val) != {"A", "b"}:
        raise SceneError(f"body {name!r}: halfspaces is {{A, b}}")
    A = _matrix(val["A"], f"body {name} A", dim)
    b = np.asarray(val["b"], dtype=np.float64).ravel().tolist()
    if len(b) != len(A):
        raise SceneError(f"body {name!r}: A and b lengths differ")
    return {"halfspaces": {"A": A, "b": b}}


def build_body(spec: dict) -> PolytopeBody:
    kind, val = next(iter(spec.items()))
    try:
        if kind == "polygon":
            K = PolytopeBody.polygon(val)
        elif kind == "points":
            K = PolytopeBody.from_points(val)
        elif kind == "box":
            K = PolytopeBody.box(*val)
        else:
            K = PolytopeBody.from_halfspaces(val["A"], val["b"])
    except GeometryError as exc:
        raise SceneError(str(exc)) from exc
    if not K.bounded or not K.has_interior():
        raise SceneError("body must be bounded with non-empty interior")
    return K


def _fan_spec(f, i: int) -> dict:
    if not isinstance(f, dict) or set(f) - {"apex", "m", "rotation"}:
        raise SceneError(f"fans[{i}]: keys are apex, m, rotation")
    m = f.get("m", 2)
    if not isinstance(m, int) or isinstance(m, bool) or m < 2:
        raise SceneError(f"fans[{i}]: m must be an integer >= 2")
    rot = f.get("rotation", 0.0)
    if not isinstance(rot, (int, float)) or isinstance(rot, bool):
        raise SceneError(f"fans[{i}]: rotation must be a number")
    return {"apex": _vector(f.get("apex", [0.0, 0.0]), f"fans[{i}].apex", 2), "m": m, "rotation": float(rot)}

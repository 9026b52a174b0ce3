"""
core/fieldlab.py

Analytic electromagnetic field catalog:
- static field configurations (line charges, wires, monopole lines, solenoids, ...)
- their singularity sets (lines, points, cylindrical shells)
- pointwise superposition
- spatial regions used as excluded regions

Heaviside-Lorentz, c = 1. Every evaluator takes points of shape (..., 3).
"""

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from core.errors import FieldCatalogError
from core.rules import (
    ALL_SPACE,
    COMPLEMENT,
    CURRENT_WIRE_B,
    CYLINDER,
    FIELD_PARAMS,
    HALF_SPACE,
    LINE_CHARGE_E,
    LINEAR,
    LINEAR_KEYS,
    MONOPOLE_LINE_B,
    POINT_CHARGE_E,
    POINT_MONOPOLE_B,
    REGION_KINDS,
    SOLENOID_B,
    STRENGTH_PARAM,
    UNIFORM,
)
from core.veccalc import as_points


def _axis(direction):
    d = np.asarray(direction, dtype=float)
    if d.shape != (3,) or not np.all(np.isfinite(d)):
        raise FieldCatalogError(f"axis direction must be 3 finite reals, got {direction}")
    n = np.linalg.norm(d)
    if n == 0.0:
        raise FieldCatalogError("degenerate axis: direction has zero length")
    return d / n


def _perp(pts, point, direction):
    rel = pts - point
    along = rel @ direction
    return rel - along[..., None] * direction


def _point_segment_distance(q, p0, p1):
    seg = p1 - p0
    seg2 = np.sum(seg * seg, axis=-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.where(seg2 > 0.0, np.sum((q - p0) * seg, axis=-1) / seg2, 0.0)
    t = np.clip(t, 0.0, 1.0)
    closest = p0 + t[..., None] * seg
    return np.linalg.norm(q - closest, axis=-1)


def _fmt(v):
    return "(" + ", ".join(f"{float(c):g}" for c in v) + ")"


# =========================================================
# SINGULARITY PRIMITIVES
# =========================================================

@dataclass(frozen=True)
class LineSingularity:
    point: tuple
    direction: tuple

    def distance(self, x):
        d = np.asarray(self.direction)
        return np.linalg.norm(_perp(as_points(x), np.asarray(self.point), d), axis=-1)

    def segment_distance(self, p0, p1):
        """Distance from the infinite line to each segment p0 -> p1."""
        d = np.asarray(self.direction)
        q = np.asarray(self.point)
        a = _perp(p0, q, d)
        b = _perp(p1, q, d)
        return _point_segment_distance(np.zeros(3), a, b)

    def rotated(self, R):
        return LineSingularity(tuple(R @ np.asarray(self.point)), tuple(R @ np.asarray(self.direction)))

    def describe(self):
        return f"line through {_fmt(self.point)} along {_fmt(self.direction)}"


@dataclass(frozen=True)
class PointSingularity:
    point: tuple

    def distance(self, x):
        return np.linalg.norm(as_points(x) - np.asarray(self.point), axis=-1)

    def segment_distance(self, p0, p1):
        return _point_segment_distance(np.asarray(self.point), p0, p1)

    def rotated(self, R):
        return PointSingularity(tuple(R @ np.asarray(self.point)))

    def describe(self):
        return f"point {_fmt(self.point)}"


@dataclass(frozen=True)
class ShellSingularity:
    """Cylindrical shell r = radius around an axis (field discontinuity)."""
    point: tuple
    direction: tuple
    radius: float

    def distance(self, x):
        d = np.asarray(self.direction)
        r = np.linalg.norm(_perp(as_points(x), np.asarray(self.point), d), axis=-1)
        return np.abs(r - self.radius)

    def segment_distance(self, p0, p1):
        d = np.asarray(self.direction)
        q = np.asarray(self.point)
        a = _perp(p0, q, d)
        b = _perp(p1, q, d)
        r_min = _point_segment_distance(np.zeros(3), a, b)
        r_max = np.maximum(np.linalg.norm(a, axis=-1), np.linalg.norm(b, axis=-1))
        crossing = (r_min <= self.radius) & (self.radius <= r_max)
        gap = np.minimum(np.abs(r_min - self.radius), np.abs(r_max - self.radius))
        return np.where(crossing, 0.0, gap)

    def rotated(self, R):
        return ShellSingularity(
            tuple(R @ np.asarray(self.point)), tuple(R @ np.asarray(self.direction)), self.radius
        )

    def describe(self):
        return f"shell r={self.radius:g} around {_fmt(self.point)} along {_fmt(self.direction)}"


# =========================================================
# FIELD DESCRIPTORS
# =========================================================

@dataclass(frozen=True, eq=True)
class FieldDescriptor:
    """Catalog kind + parameter map + axis; the serialisable face of a field."""
    kind: str
    params: dict = field(default_factory=dict)
    axis_point: tuple = (0.0, 0.0, 0.0)
    axis_dir: tuple = (0.0, 0.0, 1.0)

    def to_dict(self):
        return {
            "kind": self.kind,
            "params": {k: float(v) for k, v in self.params.items()},
            "axis_point": [float(c) for c in self.axis_point],
            "axis_dir": [float(c) for c in self.axis_dir],
        }

    def negated(self):
        if self.kind == LINEAR:
            return replace(self, params={k: -float(v) for k, v in self.params.items()})
        key = STRENGTH_PARAM[self.kind]
        params = dict(self.params)
        params[key] = -float(params[key])
        return replace(self, params=params)

    def rotated(self, R):
        R = np.asarray(R, dtype=float)
        params = dict(self.params)
        if self.kind == LINEAR:
            M = R @ _linear_matrix(params) @ R.T
            params = {key: float(M[i // 3, i % 3]) for i, key in enumerate(LINEAR_KEYS)}
        return replace(
            self,
            params=params,
            axis_point=tuple(float(c) for c in R @ np.asarray(self.axis_point, dtype=float)),
            axis_dir=tuple(float(c) for c in R @ np.asarray(self.axis_dir, dtype=float)),
        )


def _linear_matrix(params):
    return np.array([float(params.get(key, 0.0)) for key in LINEAR_KEYS]).reshape(3, 3)


# =========================================================
# VECTOR FIELD
# =========================================================

class VectorField:
    """
    Immutable position -> Vec3 map with a declared singularity set.

    Catalog fields and superpositions of them carry `descriptors` and can
    be written back to a scenario file; fields built from arbitrary
    callables cannot.
    """

    def __init__(self, evaluator, singularities=(), descriptors=None, label=""):
        self._evaluator = evaluator
        self.singularities = tuple(singularities)
        self.descriptors = None if descriptors is None else tuple(descriptors)
        self.label = label

    def __call__(self, x):
        pts = as_points(x)
        flat = pts.reshape(-1, 3)
        with np.errstate(divide="ignore", invalid="ignore"):
            values = np.asarray(self._evaluator(flat), dtype=float)
        return values.reshape(pts.shape)

    def __repr__(self):
        return f"VectorField({self.label or 'custom'}, singularities={len(self.singularities)})"

    @classmethod
    def from_function(cls, fn, singularities=(), label="custom"):
        return cls(fn, singularities=singularities, descriptors=None, label=label)

    @property
    def serializable(self):
        return self.descriptors is not None

    def singularity_distance(self, x):
        pts = as_points(x)
        if not self.singularities:
            return np.full(pts.shape[:-1], np.inf)
        return np.min([s.distance(pts) for s in self.singularities], axis=0)

    def segment_distance(self, p0, p1):
        """Smallest distance from each polyline segment to the singularity set."""
        if not self.singularities:
            return np.full(np.asarray(p0).shape[:-1], np.inf)
        return np.min([s.segment_distance(p0, p1) for s in self.singularities], axis=0)

    def negated(self):
        descriptors = None if self.descriptors is None else [d.negated() for d in self.descriptors]
        evaluator = self._evaluator
        return VectorField(lambda pts: -evaluator(pts), self.singularities, descriptors, f"-{self.label}")

    def rotated(self, R):
        if not self.serializable:
            raise FieldCatalogError("only catalog-backed fields can be rotated")
        return superpose([catalog_field_from(d.rotated(R)) for d in self.descriptors])


# =========================================================
# CATALOG
# =========================================================

def _validate_params(kind, params):
    if kind not in FIELD_PARAMS:
        raise FieldCatalogError(f"unknown field kind '{kind}' (known: {', '.join(FIELD_PARAMS)})")
    allowed = FIELD_PARAMS[kind]
    unknown = sorted(set(params) - set(allowed))
    if unknown:
        raise FieldCatalogError(f"{kind}: unknown parameter(s) {', '.join(unknown)}")
    if kind != LINEAR:
        missing = [k for k in allowed if k not in params]
        if missing:
            raise FieldCatalogError(f"{kind}: missing parameter(s) {', '.join(missing)}")
    values = {k: float(v) for k, v in params.items()}
    for k, v in values.items():
        if not math.isfinite(v):
            raise FieldCatalogError(f"{kind}: parameter '{k}' must be finite")
    if kind == SOLENOID_B and not values["radius"] > 0.0:
        raise FieldCatalogError("solenoid_B: radius must be > 0")
    return values


def catalog_field(kind, params=None, axis_point=(0.0, 0.0, 0.0), axis_dir=(0.0, 0.0, 1.0)):
    """Build a catalog field. Axes default to the z-axis through the origin."""
    params = _validate_params(kind, dict(params or {}))
    p = np.asarray(axis_point, dtype=float)
    if p.shape != (3,) or not np.all(np.isfinite(p)):
        raise FieldCatalogError(f"axis point must be 3 finite reals, got {axis_point}")
    d = _axis(axis_dir)
    descriptor = FieldDescriptor(
        kind=kind,
        params=params,
        axis_point=tuple(float(c) for c in p),
        axis_dir=tuple(float(c) for c in np.asarray(axis_dir, dtype=float)),
    )
    evaluator, singularities = _BUILDERS[kind](params, p, d)
    return VectorField(evaluator, singularities, [descriptor], label=kind)


def catalog_field_from(descriptor):
    return catalog_field(descriptor.kind, descriptor.params, descriptor.axis_point, descriptor.axis_dir)


def _uniform(params, p, d):
    value = params["magnitude"] * d
    return (lambda pts: np.broadcast_to(value, pts.shape).copy()), ()


def _line_source(strength):
    def build(params, p, d):
        k = params[strength] / (2.0 * math.pi)

        def evaluate(pts):
            perp = _perp(pts, p, d)
            r2 = np.sum(perp * perp, axis=-1)
            return k * perp / r2[..., None]

        return evaluate, (LineSingularity(tuple(p), tuple(d)),)
    return build


def _current_wire(params, p, d):
    k = params["current"] / (2.0 * math.pi)

    def evaluate(pts):
        perp = _perp(pts, p, d)
        r2 = np.sum(perp * perp, axis=-1)
        return k * np.cross(d, perp) / r2[..., None]

    return evaluate, (LineSingularity(tuple(p), tuple(d)),)


def _solenoid(params, p, d):
    b0, radius = params["field"], params["radius"]
    inside_value = b0 * d

    def evaluate(pts):
        r = np.linalg.norm(_perp(pts, p, d), axis=-1)
        return np.where((r < radius)[..., None], inside_value, 0.0)

    return evaluate, (ShellSingularity(tuple(p), tuple(d), radius),)


def _point_source(params, p, d):
    k = params["charge"] / (4.0 * math.pi)

    def evaluate(pts):
        rel = pts - p
        r = np.linalg.norm(rel, axis=-1)
        return k * rel / (r ** 3)[..., None]

    return evaluate, (PointSingularity(tuple(p)),)


def _linear(params, p, d):
    M = _linear_matrix(params)
    return (lambda pts: (pts - p) @ M.T), ()


_BUILDERS = {
    UNIFORM: _uniform,
    LINE_CHARGE_E: _line_source("density"),
    MONOPOLE_LINE_B: _line_source("density"),
    CURRENT_WIRE_B: _current_wire,
    SOLENOID_B: _solenoid,
    POINT_CHARGE_E: _point_source,
    POINT_MONOPOLE_B: _point_source,
    LINEAR: _linear,
}


def superpose(fields):
    """Pointwise sum; singularity set is the union."""
    fields = list(fields)
    if len(fields) == 1:
        return fields[0]
    singularities = [s for f in fields for s in f.singularities]
    if all(f.serializable for f in fields):
        descriptors = [d for f in fields for d in f.descriptors]
    else:
        descriptors = None

    def evaluate(pts):
        total = np.zeros(pts.shape)
        for f in fields:
            total = total + f(pts)
        return total

    label = " + ".join(f.label for f in fields) if fields else "zero"
    return VectorField(evaluate, singularities, descriptors, label)


def zero_field():
    return superpose([])


# =========================================================
# REGIONS
# =========================================================

@dataclass(frozen=True)
class Region:
    """
    Spatial region: cylinder around an axis, half-space, all-space or the
    complement of another region. For a half-space `direction` is the
    outward normal of the excluded side.
    """
    kind: str
    point: tuple = (0.0, 0.0, 0.0)
    direction: tuple = (0.0, 0.0, 1.0)
    radius: float = 0.0
    inner: Optional["Region"] = None

    def __post_init__(self):
        if self.kind not in REGION_KINDS:
            raise FieldCatalogError(f"unknown region kind '{self.kind}'")
        if self.kind == COMPLEMENT and self.inner is None:
            raise FieldCatalogError("complement region needs an inner region")
        if self.kind == CYLINDER and not self.radius > 0.0:
            raise FieldCatalogError("cylinder region needs radius > 0")
        if self.kind in (CYLINDER, HALF_SPACE):
            _axis(self.direction)

    def contains(self, x):
        pts = as_points(x)
        if self.kind == ALL_SPACE:
            return np.ones(pts.shape[:-1], dtype=bool)
        if self.kind == COMPLEMENT:
            return ~self.inner.contains(pts)
        d = _axis(self.direction)
        p = np.asarray(self.point, dtype=float)
        if self.kind == CYLINDER:
            return np.linalg.norm(_perp(pts, p, d), axis=-1) < self.radius
        return (pts - p) @ d > 0.0

    def complement(self):
        if self.kind == COMPLEMENT:
            return self.inner
        return Region(COMPLEMENT, inner=self)

    def rotated(self, R):
        R = np.asarray(R, dtype=float)
        inner = None if self.inner is None else self.inner.rotated(R)
        return replace(
            self,
            point=tuple(float(c) for c in R @ np.asarray(self.point, dtype=float)),
            direction=tuple(float(c) for c in R @ np.asarray(self.direction, dtype=float)),
            inner=inner,
        )

    def to_dict(self):
        if self.kind == ALL_SPACE:
            return {"kind": ALL_SPACE}
        if self.kind == COMPLEMENT:
            return {"kind": COMPLEMENT, "inner": self.inner.to_dict()}
        out = {
            "kind": self.kind,
            "point": [float(c) for c in self.point],
            "direction": [float(c) for c in self.direction],
        }
        if self.kind == CYLINDER:
            out["radius"] = float(self.radius)
        return out

    @classmethod
    def empty(cls):
        return cls(ALL_SPACE).complement()


def default_excluded_region(fields, radius):
    """Cylinder around the first declared singular axis, else the empty region."""
    for f in fields:
        for s in f.singularities:
            if isinstance(s, LineSingularity):
                return Region(CYLINDER, s.point, s.direction, radius)
            if isinstance(s, ShellSingularity):
                return Region(CYLINDER, s.point, s.direction, s.radius + radius)
    return Region.empty()

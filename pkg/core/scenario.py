"""
core/scenario.py

The experiment document: particle, fields, paths, excluded region.

parse_scenario() turns UTF-8 JSON text into a validated Scenario,
serialize() writes one back. Schema problems, build failures and broken
invariants are all collected as Diagnostics before anything is raised.
"""

import copy
import json
import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path as FilePath
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from core.errors import Diagnostic, FieldCatalogError, ScenarioError
from core.fieldlab import Region, catalog_field, default_excluded_region, superpose
from core.paths import ArcPath, SplinePath, is_full_turn
from core.rules import (
    DEFAULT_CHECKS,
    DEFAULT_EXCLUDED_RADIUS,
    DEFAULT_PHASE_KIND,
    DOCUMENT_VERSION,
    PATH_SAMPLES,
    PHASE_KINDS,
    SEAM_TOL,
    SINGULARITY_MARGIN,
    SPIN_UNIT_TOL,
    TWO_PI,
    is_electric_kind,
    is_magnetic_kind,
)

logger = logging.getLogger(__name__)

Triple = tuple[float, float, float]


# =========================================================
# DOCUMENT SCHEMA
# =========================================================

class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", allow_inf_nan=False)


class DescriptorModel(_Strict):
    kind: str
    params: dict[str, float] = {}
    axis_point: Triple = (0.0, 0.0, 0.0)
    axis_dir: Triple = (0.0, 0.0, 1.0)


class ParticleModel(_Strict):
    mass: float
    alpha: float = 0.0
    chi: float = 0.0
    d: float = 0.0
    spin: Optional[Triple] = None


class FieldsModel(_Strict):
    E: list[DescriptorModel] = []
    B: list[DescriptorModel] = []


class ArcModel(_Strict):
    center: Triple = (0.0, 0.0, 0.0)
    radius: float
    minor_radius: Optional[float] = None
    normal: Triple = (0.0, 0.0, 1.0)
    major_dir: Triple = (1.0, 0.0, 0.0)
    start_angle: float = 0.0
    sweep: float = TWO_PI


class PathModel(_Strict):
    name: str
    points: Optional[list[Triple]] = None
    arc: Optional[ArcModel] = None
    closed: bool = False
    speed: float = 0.01

    @model_validator(mode="after")
    def _one_geometry(self):
        if (self.points is None) == (self.arc is None):
            raise ValueError("give exactly one of 'points' or 'arc'")
        return self


class RegionModel(_Strict):
    kind: str
    point: Triple = (0.0, 0.0, 0.0)
    direction: Triple = (0.0, 0.0, 1.0)
    radius: float = 0.0
    inner: Optional["RegionModel"] = None


RegionModel.model_rebuild()


class ChecksModel(_Strict):
    orthogonality: Optional[float] = None
    mass_ratio: Optional[float] = None
    curl_relative: Optional[float] = None
    flux: Optional[float] = None
    arm_balance: Optional[float] = None
    n_samples: Optional[int] = None
    tube_radius: Optional[float] = None
    tol: Optional[float] = None


class ScenarioModel(_Strict):
    version: str = DOCUMENT_VERSION
    particle: ParticleModel
    field_sets: FieldsModel = Field(default_factory=FieldsModel, alias="fields")
    paths: list[PathModel]
    excluded_region: Optional[RegionModel] = None
    phase_kind: str = DEFAULT_PHASE_KIND
    checks: ChecksModel = ChecksModel()
    arm_pairs: list[tuple[str, str]] = []


# =========================================================
# DOMAIN OBJECTS
# =========================================================

@dataclass(frozen=True)
class ParticleProperties:
    mass: float
    alpha: float = 0.0
    chi: float = 0.0
    d: float = 0.0
    spin: Optional[tuple] = None

    def dipole_vector(self):
        """Rest-frame intrinsic dipole d * s'."""
        if self.spin is None:
            return np.zeros(3)
        return self.d * np.asarray(self.spin, dtype=float)

    def to_dict(self):
        out = {"mass": self.mass, "alpha": self.alpha, "chi": self.chi, "d": self.d}
        if self.spin is not None:
            out["spin"] = [float(c) for c in self.spin]
        return out


@dataclass(frozen=True, eq=False)
class Scenario:
    particle: ParticleProperties
    E: object
    B: object
    paths: dict
    excluded_region: Region
    phase_kind: str = DEFAULT_PHASE_KIND
    checks: dict = field(default_factory=lambda: dict(DEFAULT_CHECKS))
    arm_pairs: tuple = ()
    version: str = DOCUMENT_VERSION

    def path(self, name):
        if name not in self.paths:
            known = ", ".join(self.paths) or "none"
            raise ScenarioError(
                f"unknown path '{name}' (known: {known})",
                [Diagnostic("UNKNOWN_PATH", f"unknown path '{name}'", name)],
            )
        return self.paths[name]

    def closed_paths(self):
        return [p for p in self.paths.values() if p.closed]

    def with_particle(self, **changes):
        return replace(self, particle=replace(self.particle, **changes))

    def check(self, key):
        return self.checks.get(key, DEFAULT_CHECKS[key])


def make_scenario(particle, E, B, paths, excluded_region=None, phase_kind=DEFAULT_PHASE_KIND,
                  checks=None, arm_pairs=()):
    """Programmatic constructor; applies the same defaults as the file loader."""
    if isinstance(paths, dict):
        paths = dict(paths)
    else:
        paths = {p.name: p for p in paths}
    if excluded_region is None:
        excluded_region = default_excluded_region([E, B], DEFAULT_EXCLUDED_RADIUS)
        logger.debug("default excluded region: %s", excluded_region.to_dict())
    merged = dict(DEFAULT_CHECKS)
    merged.update(checks or {})
    return Scenario(
        particle=particle,
        E=E,
        B=B,
        paths=paths,
        excluded_region=excluded_region,
        phase_kind=phase_kind,
        checks=merged,
        arm_pairs=tuple(tuple(pair) for pair in arm_pairs),
    )


# =========================================================
# PARSE
# =========================================================

def decode_document(text):
    """UTF-8 JSON text (bytes or str) -> raw document; syntax errors carry line and column."""
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ScenarioError(
                f"scenario is not valid UTF-8: {exc}",
                [Diagnostic("ENCODING", "scenario is not valid UTF-8")],
            ) from exc

    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        message = f"syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        raise ScenarioError(message, [Diagnostic("SYNTAX", message)], exc.lineno, exc.colno) from exc


def parse_scenario(text):
    """
    Parse and fully validate a scenario document (bytes or str).

    Raises ScenarioError listing every diagnostic found.
    """
    return scenario_from_document(decode_document(text))


def scenario_from_document(raw):
    try:
        model = ScenarioModel.model_validate(raw)
    except ValidationError as exc:
        raise ScenarioError("scenario does not match the schema", _schema_diagnostics(exc)) from exc

    scenario, diagnostics = _build(model)
    if scenario is not None:
        diagnostics.extend(validate(scenario))
    if diagnostics:
        raise ScenarioError("scenario failed validation", diagnostics)
    return scenario


def read_document(file_path):
    """Raw JSON document from a scenario file, not yet validated."""
    try:
        data = FilePath(file_path).read_bytes()
    except OSError as exc:
        raise ScenarioError(
            f"cannot read scenario file '{file_path}': {exc.strerror}",
            [Diagnostic("UNREADABLE", f"cannot read '{file_path}'", str(file_path))],
        ) from exc
    return decode_document(data)


def load_scenario(file_path):
    return scenario_from_document(read_document(file_path))


def _schema_diagnostics(exc):
    out = []
    for err in exc.errors():
        where = ".".join(str(part) for part in err["loc"]) or "<document>"
        if err["type"] == "extra_forbidden":
            out.append(Diagnostic("UNKNOWN_KEY", f"{where}: unknown key", where))
        elif err["type"] == "missing":
            out.append(Diagnostic("MISSING_KEY", f"{where}: required key missing", where))
        else:
            out.append(Diagnostic("SCHEMA", f"{where}: {err['msg']}", where))
    return out


def _build(model):
    diagnostics = []

    if model.version != DOCUMENT_VERSION:
        diagnostics.append(Diagnostic(
            "UNSUPPORTED_VERSION",
            f"document version '{model.version}' is not supported (expected '{DOCUMENT_VERSION}')",
            "version",
        ))

    p = model.particle
    particle = ParticleProperties(p.mass, p.alpha, p.chi, p.d, None if p.spin is None else tuple(p.spin))

    E = _build_fields("E", model.field_sets.E, diagnostics)
    B = _build_fields("B", model.field_sets.B, diagnostics)

    paths = {}
    for entry in model.paths:
        if entry.name in paths:
            diagnostics.append(Diagnostic("DUPLICATE_PATH", f"path name '{entry.name}' is used twice", entry.name))
            continue
        try:
            paths[entry.name] = _build_path(entry)
        except ScenarioError as exc:
            diagnostics.extend(exc.diagnostics)

    region = None
    if model.excluded_region is not None:
        try:
            region = _build_region(model.excluded_region)
        except FieldCatalogError as exc:
            diagnostics.append(Diagnostic("REGION_INVALID", f"excluded_region: {exc}", "excluded_region"))

    if model.phase_kind not in PHASE_KINDS:
        diagnostics.append(Diagnostic(
            "UNKNOWN_PHASE_KIND",
            f"phase_kind '{model.phase_kind}' is not one of {', '.join(PHASE_KINDS)}",
            "phase_kind",
        ))

    checks = {k: v for k, v in model.checks.model_dump().items() if v is not None}

    if E is None or B is None or diagnostics:
        return None, diagnostics

    scenario = make_scenario(
        particle, E, B, paths,
        excluded_region=region,
        phase_kind=model.phase_kind,
        checks=checks,
        arm_pairs=model.arm_pairs,
    )
    return replace(scenario, version=model.version), diagnostics


def _build_fields(side, descriptors, diagnostics):
    fields = []
    ok = True
    wrong_side = is_magnetic_kind if side == "E" else is_electric_kind
    for i, d in enumerate(descriptors):
        if wrong_side(d.kind):
            ok = False
            diagnostics.append(Diagnostic(
                "WRONG_SIDE", f"fields.{side}.{i}: {d.kind} cannot be listed under {side}", f"fields.{side}.{i}"
            ))
            continue
        try:
            fields.append(catalog_field(d.kind, d.params, d.axis_point, d.axis_dir))
        except FieldCatalogError as exc:
            ok = False
            diagnostics.append(Diagnostic("FIELD_INVALID", f"fields.{side}.{i}: {exc}", f"fields.{side}.{i}"))
    if not ok:
        return None
    return superpose(fields)


def _build_path(entry):
    if entry.points is not None:
        return SplinePath(entry.name, entry.points, entry.closed, entry.speed)
    a = entry.arc
    return ArcPath(entry.name, a.center, a.radius, a.minor_radius, a.normal, a.major_dir,
                   a.start_angle, a.sweep, entry.closed, entry.speed)


def _build_region(model):
    inner = None if model.inner is None else _build_region(model.inner)
    return Region(model.kind, tuple(model.point), tuple(model.direction), model.radius, inner)


# =========================================================
# VALIDATE
# =========================================================

def validate(s):
    """
    Every broken invariant as a Diagnostic; an empty list means the
    scenario is sound. Never raises.
    """
    out = []
    particle = s.particle

    if not particle.mass > 0.0:
        out.append(Diagnostic("MASS_NOT_POSITIVE", f"mass must be > 0 (got {particle.mass})", "particle.mass"))
    for name in ("alpha", "chi", "d"):
        value = getattr(particle, name)
        if value < 0.0:
            out.append(Diagnostic("NEGATIVE_COUPLING", f"{name} must be >= 0 (got {value})", f"particle.{name}"))
    if particle.d > 0.0:
        if particle.spin is None:
            out.append(Diagnostic("SPIN_NOT_UNIT", "spin is required when d > 0", "particle.spin"))
        elif abs(np.linalg.norm(particle.spin) - 1.0) > SPIN_UNIT_TOL:
            out.append(Diagnostic(
                "SPIN_NOT_UNIT",
                f"spin must be a unit vector (|s| = {np.linalg.norm(particle.spin):.6g})",
                "particle.spin",
            ))

    for key in ("orthogonality", "mass_ratio", "curl_relative", "flux", "arm_balance", "tube_radius", "tol"):
        if not s.check(key) > 0.0:
            out.append(Diagnostic("BAD_CHECK", f"checks.{key} must be > 0", f"checks.{key}"))
    if s.check("n_samples") < 2:
        out.append(Diagnostic("BAD_CHECK", "checks.n_samples must be >= 2", "checks.n_samples"))

    for path in s.paths.values():
        out.extend(_path_diagnostics(s, path))

    for a, b in s.arm_pairs:
        for name in (a, b):
            if name not in s.paths:
                out.append(Diagnostic("UNKNOWN_ARM_PATH", f"arm pair names unknown path '{name}'", name))

    return out


def _path_diagnostics(s, path):
    out = []
    name = path.name

    if not 0.0 < path.speed:
        out.append(Diagnostic("SPEED_OUT_OF_RANGE", f"path '{name}': speed must be > 0 (got {path.speed})", name))
    elif not path.speed < 1.0:
        out.append(Diagnostic("SPEED_OUT_OF_RANGE", f"path '{name}': speed must be < 1 (got {path.speed})", name))

    if path.closed:
        if isinstance(path, ArcPath) and not is_full_turn(path.sweep):
            out.append(Diagnostic("PATH_NOT_CLOSED", f"path '{name}': closed arc must sweep a multiple of 2pi", name))
        elif path.seam_gap() > SEAM_TOL or path.seam_tangent_gap() > math.sqrt(SEAM_TOL):
            out.append(Diagnostic("PATH_NOT_CLOSED", f"path '{name}': seam is not continuous", name))

    pts = path.polyline(PATH_SAMPLES)
    p0, p1 = pts[:-1], pts[1:]
    for side, F in (("E", s.E), ("B", s.B)):
        for sing in F.singularities:
            gap = float(np.min(sing.segment_distance(p0, p1)))
            if gap <= SINGULARITY_MARGIN:
                out.append(Diagnostic(
                    "PATH_HITS_SINGULARITY",
                    f"path '{name}' passes through the {side}-field singularity ({sing.describe()})",
                    name,
                ))

    inside = s.excluded_region.contains(pts)
    if np.any(inside):
        where = pts[int(np.argmax(inside))]
        out.append(Diagnostic(
            "PATH_IN_EXCLUDED_REGION",
            f"path '{name}' enters the excluded region near ({where[0]:.6g}, {where[1]:.6g}, {where[2]:.6g})",
            name,
        ))
    return out


# =========================================================
# SERIALIZE / TRANSFORM
# =========================================================

def to_document(s):
    for side, F in (("E", s.E), ("B", s.B)):
        if not F.serializable:
            raise ScenarioError(
                f"{side} field '{F.label}' is not built from catalog kinds and cannot be written",
                [Diagnostic("NOT_SERIALIZABLE", f"{side} field is not serializable", side)],
            )
    return {
        "version": s.version,
        "particle": s.particle.to_dict(),
        "fields": {
            "E": [d.to_dict() for d in s.E.descriptors],
            "B": [d.to_dict() for d in s.B.descriptors],
        },
        "paths": [p.to_dict() for p in s.paths.values()],
        "excluded_region": s.excluded_region.to_dict(),
        "phase_kind": s.phase_kind,
        "checks": dict(s.checks),
        "arm_pairs": [list(pair) for pair in s.arm_pairs],
    }


def serialize(s):
    """Scenario -> JSON text; parse_scenario(serialize(s)) reproduces s."""
    return json.dumps(to_document(s), indent=2) + "\n"


def rotate_scenario(s, R):
    """Rigidly rotate fields, paths, region and spin together."""
    R = np.asarray(R, dtype=float)
    spin = s.particle.spin
    particle = s.particle if spin is None else replace(
        s.particle, spin=tuple(float(c) for c in R @ np.asarray(spin, dtype=float))
    )
    return replace(
        s,
        particle=particle,
        E=s.E.rotated(R),
        B=s.B.rotated(R),
        paths={name: p.rotated(R) for name, p in s.paths.items()},
        excluded_region=s.excluded_region.rotated(R),
    )


# =========================================================
# DOTTED KEYS (sweeps)
# =========================================================

def _walk(document, key):
    parts = key.split(".")
    node = document
    for part in parts[:-1]:
        node = _step(node, part, key)
    return node, parts[-1]


def _step(node, part, key):
    try:
        if isinstance(node, list):
            return node[int(part)]
        if isinstance(node, dict):
            return node[part]
    except (KeyError, IndexError, ValueError):
        pass
    raise ScenarioError(
        f"parameter path '{key}' does not resolve (stuck at '{part}')",
        [Diagnostic("UNRESOLVED_PARAM", f"'{key}' does not resolve", key)],
    )


def resolve_dotted(document, key):
    """Numeric leaf at a dotted key such as 'fields.B.0.params.magnitude'."""
    node, last = _walk(document, key)
    value = _step(node, last, key)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(
            f"parameter path '{key}' is not a numeric leaf",
            [Diagnostic("UNRESOLVED_PARAM", f"'{key}' is not numeric", key)],
        )
    return float(value)


def set_dotted(document, key, value):
    """Copy of `document` with the numeric leaf at `key` replaced."""
    resolve_dotted(document, key)
    out = copy.deepcopy(document)
    node, last = _walk(out, key)
    if isinstance(node, list):
        node[int(last)] = float(value)
    else:
        node[last] = float(value)
    return out

"""
physics/topocheck.py

Certifies whether a scenario's phase is topological.

Conditions checked along every declared path:
- velocity normal to B and to E
- mass condition (alpha B^2 << m, or its dual)
- curl T vanishes in a tube around the path
- dynamical phases of declared arm pairs balance

classify() combines them with the loop phase of the first closed path.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from core.errors import PhaseError, TubeIntersectionError
from core.rules import (
    AC_INDUCED,
    DEFAULT_CHECKS,
    DYNAMICAL_CONTAMINATED,
    HMW_INDUCED,
    NON_TOPOLOGICAL,
    TOPOLOGICAL,
    TRIVIAL,
    TUBE_RING_POINTS,
    VANISHING_FIELD,
)
from core.veccalc import FDParams, dot, fd_curl, perpendicular_basis
from physics.phase import dynamical_phase, line_phase, phase_vector_field

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CheckOutcome:
    passed: bool
    value: float
    threshold: float
    vacuous: bool = False
    path: str = ""

    def to_dict(self):
        return {
            "passed": self.passed,
            "value": self.value,
            "threshold": self.threshold,
            "vacuous": self.vacuous,
            "path": self.path,
        }


@dataclass(frozen=True)
class Orthogonality:
    v_perp_B: CheckOutcome
    v_perp_E: CheckOutcome


@dataclass(frozen=True)
class ArmPhase:
    arm_a: str
    arm_b: str
    phase_a: float
    phase_b: float

    @property
    def difference(self):
        return self.phase_a - self.phase_b

    @property
    def ratio(self):
        return self.phase_a / self.phase_b if self.phase_b != 0.0 else math.inf

    def to_dict(self):
        return {
            "arm_a": self.arm_a,
            "arm_b": self.arm_b,
            "phase_a": self.phase_a,
            "phase_b": self.phase_b,
            "difference": self.difference,
        }


@dataclass(frozen=True)
class TopologyReport:
    phase_kind: str
    v_perp_B: CheckOutcome
    v_perp_E: CheckOutcome
    mass_condition: CheckOutcome
    curl_free: CheckOutcome
    enclosed_flux: float
    enclosed_flux_error: float
    reference_path: str
    arm_balance: CheckOutcome
    classification: str
    arm_phases: tuple = field(default_factory=tuple)

    @property
    def conditions(self):
        return {
            "v_perp_B": self.v_perp_B,
            "v_perp_E": self.v_perp_E,
            "mass_condition": self.mass_condition,
            "curl_free": self.curl_free,
            "arm_balance": self.arm_balance,
        }

    def failed(self):
        return [name for name, outcome in self.conditions.items() if not outcome.passed]

    def to_dict(self):
        out = {"classification": self.classification, "phase_kind": self.phase_kind}
        out.update({name: outcome.to_dict() for name, outcome in self.conditions.items()})
        out["enclosed_flux"] = self.enclosed_flux
        out["enclosed_flux_error"] = self.enclosed_flux_error
        out["reference_path"] = self.reference_path
        out["arm_phases"] = [arm.to_dict() for arm in self.arm_phases]
        return out

    def to_flat_text(self):
        lines = [
            f"classification: {self.classification}",
            f"phase_kind: {self.phase_kind}",
            f"reference_path: {self.reference_path}",
            f"enclosed_flux: {self.enclosed_flux!r}",
            f"enclosed_flux_error: {self.enclosed_flux_error!r}",
        ]
        for name, outcome in self.conditions.items():
            status = "pass" if outcome.passed else "FAIL"
            if outcome.vacuous:
                status += " (vacuous)"
            lines.append(f"{name}: {status}")
            lines.append(f"{name}.value: {outcome.value!r}")
            lines.append(f"{name}.threshold: {outcome.threshold!r}")
            if outcome.path:
                lines.append(f"{name}.path: {outcome.path}")
        for i, arm in enumerate(self.arm_phases):
            lines.append(f"arm.{i}: {arm.arm_a} {arm.phase_a!r} | {arm.arm_b} {arm.phase_b!r}")
        return "\n".join(lines) + "\n"


# =========================================================
# INDIVIDUAL CHECKS
# =========================================================

def _unit_velocity(path, u):
    t = path.tangent(u)
    return t / np.linalg.norm(t, axis=-1)[..., None]


def _max_cosine(vhat, values, threshold, name):
    mag = np.linalg.norm(values, axis=-1)
    scale = float(np.max(mag)) if mag.size else 0.0
    keep = mag > VANISHING_FIELD * scale
    if scale == 0.0 or not np.any(keep):
        return CheckOutcome(True, 0.0, threshold, vacuous=True, path=name)
    cos = np.abs(dot(vhat[keep], values[keep])) / mag[keep]
    worst = float(np.max(cos))
    return CheckOutcome(worst < threshold, worst, threshold, path=name)


def check_orthogonality(s, path, n_samples, threshold=None):
    """max |v.B|/|B| and |v.E|/|E| over equal-time samples; vanishing-field samples are skipped."""
    if n_samples < 2:
        raise ValueError("n_samples must be >= 2")
    threshold = s.check("orthogonality") if threshold is None else threshold
    u = path.uniform_time_samples(n_samples)
    pts = path.point(u)
    vhat = _unit_velocity(path, u)
    return Orthogonality(
        v_perp_B=_max_cosine(vhat, s.B(pts), threshold, path.name),
        v_perp_E=_max_cosine(vhat, s.E(pts), threshold, path.name),
    )


def mass_ratio_density(s):
    p = s.particle
    if s.phase_kind == HMW_INDUCED:
        return lambda pts: p.alpha * dot(s.B(pts), s.B(pts)) / p.mass
    if s.phase_kind == AC_INDUCED:
        return lambda pts: p.chi * dot(s.E(pts), s.E(pts)) / p.mass
    return lambda pts: np.zeros(np.asarray(pts).shape[:-1])


def check_mass_condition(s, path, threshold=None, n_samples=None):
    threshold = s.check("mass_ratio") if threshold is None else threshold
    n = n_samples or s.check("n_samples")
    pts = path.point(path.uniform_time_samples(n))
    ratio = float(np.max(mass_ratio_density(s)(pts)))
    return CheckOutcome(ratio < threshold, ratio, threshold, path=path.name)


def tube_points(path, tube_radius, n_samples):
    """Path samples plus rings of TUBE_RING_POINTS points in each normal plane."""
    u = path.uniform_time_samples(n_samples)
    centers = path.point(u)
    tangents = path.tangent(u)
    angles = np.linspace(0.0, 2.0 * np.pi, TUBE_RING_POINTS, endpoint=False)
    rings = []
    for c, t in zip(centers, tangents):
        e1, e2 = perpendicular_basis(t)
        rings.append(c + tube_radius * (np.cos(angles)[:, None] * e1 + np.sin(angles)[:, None] * e2))
    return centers, np.concatenate([centers[None], np.stack(rings, axis=1)]).reshape(-1, 3)


def check_curl_free_tube(T, path, tube_radius, n_samples, p: Optional[FDParams] = None, curl_relative=None):
    """
    max |curl T| over the tube around the path. Passes when it does not
    exceed curl_relative times the largest |T| on the path.
    """
    if curl_relative is None:
        curl_relative = T.scenario.check("curl_relative") if T.scenario is not None else DEFAULT_CHECKS["curl_relative"]
    centers, pts = tube_points(path, tube_radius, n_samples)
    nearest = float(np.min(T.singularity_distance(centers)))
    if nearest <= tube_radius:
        raise TubeIntersectionError(
            f"tube of radius {tube_radius} around path '{path.name}' reaches a singularity "
            f"(closest approach {nearest:.3e})"
        )
    curl = fd_curl(T.field, pts, p)
    worst = float(np.max(np.linalg.norm(curl, axis=-1)))
    scale = float(np.max(np.linalg.norm(T(centers), axis=-1)))
    threshold = curl_relative * scale
    return CheckOutcome(worst <= threshold, worst, threshold, vacuous=scale == 0.0, path=path.name)


def _fitted_tube_radius(T, path, tube_radius, n_samples):
    """tube_radius, or half the closest approach when the path runs nearer a singularity."""
    centers = path.point(path.uniform_time_samples(n_samples))
    nearest = float(np.min(T.singularity_distance(centers)))
    if nearest > tube_radius:
        return tube_radius
    fitted = 0.5 * nearest
    logger.info(
        "tube around '%s' narrowed from %g to %g (closest singularity %.3e)",
        path.name, tube_radius, fitted, nearest,
    )
    return fitted


def check_arm_balance(s, tol=None):
    tol = s.check("tol") if tol is None else tol
    rel = s.check("arm_balance")
    arms = []
    worst_rel, worst_pair = 0.0, ""
    passed = True
    for a, b in s.arm_pairs:
        pa = dynamical_phase(s, s.path(a), tol).value
        pb = dynamical_phase(s, s.path(b), tol).value
        arm = ArmPhase(a, b, pa, pb)
        arms.append(arm)
        bound = max(abs(pa), abs(pb))
        mismatch = abs(arm.difference)
        if mismatch > rel * bound:
            passed = False
        r = mismatch / bound if bound > 0.0 else 0.0
        if r >= worst_rel:
            worst_rel, worst_pair = r, f"{a}/{b}"
    outcome = CheckOutcome(passed, worst_rel, rel, vacuous=not arms, path=worst_pair)
    return outcome, tuple(arms)


# =========================================================
# CLASSIFY
# =========================================================

def _worst(outcomes):
    """Failing outcome with the largest value, else the largest overall."""
    failing = [o for o in outcomes if not o.passed]
    if failing:
        return max(failing, key=lambda o: o.value)
    return max(outcomes, key=lambda o: o.value)


def classify(s, tol=None, p: Optional[FDParams] = None):
    """
    Run every check over every path and classify:
    trivial (no enclosed flux), non-topological (a local condition fails),
    dynamical-contaminated (arms unbalanced) or topological.
    """
    closed = s.closed_paths()
    if not closed:
        raise PhaseError("classification needs at least one closed path")
    tol = s.check("tol") if tol is None else tol
    n = int(s.check("n_samples"))
    T = phase_vector_field(s)

    ortho = [check_orthogonality(s, path, n) for path in s.paths.values()]
    v_perp_B = _worst([o.v_perp_B for o in ortho])
    v_perp_E = _worst([o.v_perp_E for o in ortho])
    mass = _worst([check_mass_condition(s, path, n_samples=n) for path in s.paths.values()])
    curl = _worst([
        check_curl_free_tube(
            T, path, _fitted_tube_radius(T, path, s.check("tube_radius"), n), n, p, s.check("curl_relative")
        )
        for path in s.paths.values()
    ])

    reference = closed[0]
    enclosed = line_phase(T, reference, tol)
    arm_outcome, arms = check_arm_balance(s, tol)

    if abs(enclosed.value) <= s.check("flux"):
        classification = TRIVIAL
    elif not (v_perp_B.passed and v_perp_E.passed and mass.passed and curl.passed):
        classification = NON_TOPOLOGICAL
    elif not arm_outcome.passed:
        classification = DYNAMICAL_CONTAMINATED
    else:
        classification = TOPOLOGICAL

    logger.info("classification %s (enclosed flux %.12g on '%s')", classification, enclosed.value, reference.name)
    return TopologyReport(
        phase_kind=s.phase_kind,
        v_perp_B=v_perp_B,
        v_perp_E=v_perp_E,
        mass_condition=mass,
        curl_free=curl,
        enclosed_flux=enclosed.value,
        enclosed_flux_error=enclosed.abs_error_estimate,
        reference_path=reference.name,
        arm_balance=arm_outcome,
        classification=classification,
        arm_phases=arms,
    )

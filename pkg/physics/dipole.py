"""
physics/dipole.py

Induced-dipole constitutive relation, lab-frame interaction Lagrangians
and the classical force residual.

    L = 1/2 m v^2 + 1/2 alpha (E + v x B)^2                  (uncorrected)
    L_int = 1/2 alpha {(E + v x B)^2 - (E . v)^2}             (corrected)

Expanded, 1/2 alpha (E + v x B)^2 =
    1/2 alpha E^2 + alpha v.(B x E) + 1/2 alpha v^2 B^2 - 1/2 alpha (v.B)^2
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from core.errors import SingularityProximityError
from core.rules import SINGULARITY_MARGIN
from core.veccalc import FDParams, cross, dot, fd_curl, fd_gradient
from physics.phase import mass_shift_density, phase_vector_field, potential_density


def _check_speed(v):
    speed = np.linalg.norm(v, axis=-1)
    if np.any(speed >= 1.0):
        raise ValueError(f"|v| must be < 1 in natural units, got {np.max(speed)}")


def induced_dipole(E, B, v, alpha):
    """d = alpha (E + v x B): rest-frame polarisation seen through the Roentgen field."""
    v = np.asarray(v, dtype=float)
    _check_speed(v)
    return alpha * (np.asarray(E, dtype=float) + cross(v, B))


@dataclass(frozen=True)
class LagrangianBreakdown:
    kinetic: float
    coupling: float
    potential: float
    mass_shift: float
    vB_term: float
    Ev_term: float

    @property
    def interaction(self):
        return self.coupling + self.potential + self.mass_shift + self.vB_term + self.Ev_term

    @property
    def total(self):
        return self.kinetic + self.interaction

    def as_dict(self):
        return {
            "kinetic": self.kinetic,
            "coupling": self.coupling,
            "potential": self.potential,
            "mass_shift": self.mass_shift,
            "vB_term": self.vB_term,
            "Ev_term": self.Ev_term,
            "interaction": self.interaction,
            "total": self.total,
        }


def _fields_at(s, x):
    x = np.asarray(x, dtype=float)
    for side, F in (("E", s.E), ("B", s.B)):
        if np.any(F.singularity_distance(x) <= SINGULARITY_MARGIN):
            raise SingularityProximityError(f"{side} field is singular at {x}")
    return s.E(x), s.B(x)


def _breakdown(s, x, v, corrected):
    v = np.asarray(v, dtype=float)
    _check_speed(v)
    E, B = _fields_at(s, x)
    a = s.particle.alpha
    vv = dot(v, v)
    return LagrangianBreakdown(
        kinetic=0.5 * s.particle.mass * vv,
        coupling=a * dot(v, cross(B, E)),
        potential=0.5 * a * dot(E, E),
        mass_shift=0.5 * a * vv * dot(B, B),
        vB_term=-0.5 * a * dot(v, B) ** 2,
        Ev_term=-0.5 * a * dot(E, v) ** 2 if corrected else 0.0 * vv,
    )


def whw_lagrangian(s, x, v):
    """Term-by-term 1/2 m v^2 + 1/2 alpha (E + v x B)^2; Ev_term is always 0 here."""
    return _breakdown(s, x, v, corrected=False)


def corrected_lagrangian(s, x, v):
    """As whw_lagrangian plus Ev_term = -1/2 alpha (E . v)^2."""
    return _breakdown(s, x, v, corrected=True)


@dataclass(frozen=True)
class ForceResidual:
    magnus: np.ndarray
    potential_grad: np.ndarray
    mass_shift_grad: np.ndarray

    @property
    def total(self):
        return self.magnus + self.potential_grad


def force_residual(s, x, v, p: Optional[FDParams] = None):
    """
    Force content of L_int = v.T + U for static fields:
    magnus = v x curl T, potential_grad = grad U. Zero total means no
    classical force on the dipole. The grad of the 1/2 alpha v^2 B^2 piece
    is reported as mass_shift_grad and kept out of the total.
    """
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    _check_speed(v)
    T = phase_vector_field(s)
    magnus = cross(v, fd_curl(T.field, x, p))
    potential_grad = fd_gradient(potential_density(s), x, p, guard=T.field)
    speed = float(np.linalg.norm(v)) if v.ndim == 1 else np.linalg.norm(v, axis=-1)[..., None]
    shift = mass_shift_density(s, 1.0)
    mass_shift_grad = fd_gradient(shift, x, p, guard=T.field) * speed ** 2
    return ForceResidual(magnus, potential_grad, mass_shift_grad)

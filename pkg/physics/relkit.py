"""
physics/relkit.py

Relativistic layer: four-vectors, the field and moments tensors, the
covariant interaction Lagrangian, the four-spin route and the
electric/magnetic duality map on scenarios.

Conventions
    metric diag(+1, -1, -1, -1), epsilon_{0123} = +1
    F^{i0} = E_i,  F^{ij} = -epsilon_{ijk} B_k
    dual tensor: (E, B) -> (B, -E)
    E^mu = u_nu F^{mu nu} = gamma (E.v, E + v x B)
    B^mu = u_nu Ft^{mu nu} = gamma (B.v, B - v x E)
    K_{mu nu} = alpha (E_mu u_nu - E_nu u_mu) + chi epsilon_{mu nu k l} B^k u^l
so that K is the field tensor of (P, M) = (alpha E, chi B) at rest and
-1/4 K^{mu nu} F_{mu nu} = -1/2 alpha E_mu E^mu when chi = 0.
"""

import itertools
import logging
from dataclasses import dataclass, replace

import numpy as np

from core.errors import ConsistencyError, DualityError
from core.fieldlab import catalog_field_from, superpose
from core.rules import B_TO_E_KIND, CONSISTENCY_RTOL, DUAL_PHASE_KIND, E_TO_B_KIND
from core.veccalc import cross

logger = logging.getLogger(__name__)

METRIC = np.diag([1.0, -1.0, -1.0, -1.0])


def _levi_civita():
    eps = np.zeros((4, 4, 4, 4))
    for perm in itertools.permutations(range(4)):
        inversions = sum(1 for i in range(4) for j in range(i + 1, 4) if perm[i] > perm[j])
        eps[perm] = -1.0 if inversions % 2 else 1.0
    return eps


EPSILON_LOWER = _levi_civita()     # epsilon_{mu nu k l}, epsilon_{0123} = +1
_EPS3 = EPSILON_LOWER[0, 1:, 1:, 1:]


# =========================================================
# FOUR-VECTORS
# =========================================================

@dataclass(frozen=True)
class FourVector:
    """Contravariant components (t, x, y, z)."""
    t: float
    x: float
    y: float
    z: float

    @classmethod
    def from_array(cls, a):
        a = np.asarray(a, dtype=float)
        if a.shape != (4,) or not np.all(np.isfinite(a)):
            raise ValueError(f"four-vector needs 4 finite components, got {a}")
        return cls(*(float(c) for c in a))

    @classmethod
    def from_parts(cls, t, spatial):
        return cls.from_array(np.concatenate([[t], np.asarray(spatial, dtype=float)]))

    @property
    def array(self):
        return np.array([self.t, self.x, self.y, self.z])

    @property
    def spatial(self):
        return np.array([self.x, self.y, self.z])

    def lowered(self):
        return METRIC @ self.array

    def dot(self, other):
        return float(self.array @ METRIC @ other.array)

    def norm2(self):
        return self.dot(self)

    def boosted(self, L):
        return FourVector.from_array(np.asarray(L) @ self.array)


# =========================================================
# ANTISYMMETRIC TENSORS
# =========================================================

@dataclass(frozen=True)
class AntisymTensor2:
    """
    Antisymmetric rank-2 tensor stored as its six independent slots:
    the electric triple e and magnetic triple b of its contravariant form.
    """
    e: tuple
    b: tuple

    @classmethod
    def from_upper(cls, U):
        U = np.asarray(U, dtype=float)
        e = (U[1, 0], U[2, 0], U[3, 0])
        b = (-U[2, 3], -U[3, 1], -U[1, 2])
        return cls(tuple(float(c) for c in e), tuple(float(c) for c in b))

    @classmethod
    def from_lower(cls, L):
        return cls.from_upper(METRIC @ np.asarray(L, dtype=float) @ METRIC)

    @property
    def upper(self):
        e = np.asarray(self.e)
        b = np.asarray(self.b)
        U = np.zeros((4, 4))
        U[1:, 0] = e
        U[0, 1:] = -e
        U[1:, 1:] = -np.einsum("ijk,k->ij", _EPS3, b)
        return U

    @property
    def lower(self):
        return METRIC @ self.upper @ METRIC

    def dual(self):
        return AntisymTensor2(self.b, tuple(-c for c in self.e))

    def boosted(self, L):
        L = np.asarray(L, dtype=float)
        return AntisymTensor2.from_upper(L @ self.upper @ L.T)

    def contract(self, other):
        """A^{mu nu} B_{mu nu}."""
        return float(np.sum(self.upper * other.lower))


# =========================================================
# KINEMATICS
# =========================================================

@dataclass(frozen=True)
class Kinematics:
    v: tuple
    gamma: float
    u: FourVector

    @classmethod
    def from_velocity(cls, v):
        v = np.asarray(v, dtype=float)
        v2 = float(v @ v)
        if not v2 < 1.0:
            raise ValueError(f"|v| must be < 1 in natural units, got {np.sqrt(v2)}")
        gamma = 1.0 / np.sqrt(1.0 - v2)
        return cls(tuple(float(c) for c in v), float(gamma), FourVector.from_parts(gamma, gamma * v))

    @classmethod
    def from_four_velocity(cls, u):
        arr = u.array
        return cls.from_velocity(arr[1:] / arr[0])

    @property
    def velocity(self):
        return np.asarray(self.v)


def boost_matrix(beta):
    """Pure boost into the frame moving with velocity beta."""
    beta = np.asarray(beta, dtype=float)
    b2 = float(beta @ beta)
    if b2 == 0.0:
        return np.eye(4)
    if b2 >= 1.0:
        raise ValueError("boost velocity must satisfy |beta| < 1")
    g = 1.0 / np.sqrt(1.0 - b2)
    L = np.eye(4)
    L[0, 0] = g
    L[0, 1:] = -g * beta
    L[1:, 0] = -g * beta
    L[1:, 1:] += (g - 1.0) * np.outer(beta, beta) / b2
    return L


# =========================================================
# FIELDS AND MOMENTS
# =========================================================

def field_tensor(E, B):
    return AntisymTensor2(tuple(float(c) for c in E), tuple(float(c) for c in B))


@dataclass(frozen=True)
class FourFields:
    E4: FourVector
    B4: FourVector


def _contract_u(F, k):
    return FourVector.from_array(F.upper @ k.u.lowered())


def four_fields(E, B, k):
    """E^mu = u_nu F^{mu nu}, B^mu = u_nu Ft^{mu nu}."""
    F = field_tensor(E, B)
    return FourFields(_contract_u(F, k), _contract_u(F.dual(), k))


def moments_tensor(E, B, k, alpha, chi):
    fields = four_fields(E, B, k)
    e_low = fields.E4.lowered()
    u_low = k.u.lowered()
    electric = alpha * (np.outer(e_low, u_low) - np.outer(u_low, e_low))
    magnetic = chi * np.einsum("mnkl,k,l->mn", EPSILON_LOWER, fields.B4.array, k.u.array)
    return AntisymTensor2.from_lower(electric + magnetic)


def interaction_from_tensors(F, u, alpha, chi=0.0):
    """-1/4 K^{mu nu} F_{mu nu} from a field tensor and four-velocity in any frame."""
    k = Kinematics.from_four_velocity(u)
    K = moments_tensor(F.e, F.b, k, alpha, chi)
    return -0.25 * K.contract(F)


def _check_agree(label, values, scale):
    spread = max(values) - min(values)
    if spread > CONSISTENCY_RTOL * max(scale, np.finfo(float).tiny):
        raise ConsistencyError(f"{label}: routes disagree ({', '.join(f'{v:.17g}' for v in values)})")


def rel_lagrangian(E, B, k, alpha):
    """
    Covariant induced-dipole interaction (chi = 0), evaluated as the
    tensor contraction, as -1/2 alpha E_mu E^mu and in closed form
    1/2 alpha gamma^2 {(E + v x B)^2 - (E.v)^2}. Returns the closed form.
    """
    E = np.asarray(E, dtype=float)
    B = np.asarray(B, dtype=float)
    v = k.velocity
    g2 = k.gamma ** 2

    F = field_tensor(E, B)
    K = moments_tensor(E, B, k, alpha, 0.0)
    via_contraction = -0.25 * K.contract(F)
    via_four_field = -0.5 * alpha * four_fields(E, B, k).E4.norm2()

    rontgen = E + cross(v, B)
    ev = float(E @ v)
    closed = 0.5 * alpha * g2 * (float(rontgen @ rontgen) - ev ** 2)

    scale = 0.5 * abs(alpha) * g2 * (float(rontgen @ rontgen) + ev ** 2)
    _check_agree("rel_lagrangian", (via_contraction, via_four_field, closed), scale)
    return closed


def corrected_interaction(E, B, v, alpha):
    """1/2 alpha {(E + v x B)^2 - (E.v)^2}: the order-v^2 lab-frame reduction."""
    E = np.asarray(E, dtype=float)
    v = np.asarray(v, dtype=float)
    rontgen = E + cross(v, B)
    return 0.5 * alpha * (float(rontgen @ rontgen) - float(E @ v) ** 2)


def reduction_gap(E, B, k, alpha):
    """
    rel_lagrangian - corrected interaction = (gamma^2 - 1) L_red, returned
    from the product form v^2/(1 - v^2) L_red; the difference form is
    computed as a cross-check.
    """
    v = k.velocity
    v2 = float(v @ v)
    reduced = corrected_interaction(E, B, v, alpha)
    gap = v2 / (1.0 - v2) * reduced

    rontgen = np.asarray(E, dtype=float) + cross(v, B)
    scale = 0.5 * abs(alpha) * k.gamma ** 2 * (float(rontgen @ rontgen) + float(np.asarray(E, dtype=float) @ v) ** 2)
    difference = rel_lagrangian(E, B, k, alpha) - reduced
    if abs(difference - gap) > CONSISTENCY_RTOL * max(scale, np.finfo(float).tiny):
        raise ConsistencyError(f"reduction_gap: {difference!r} vs {gap!r}")
    return gap


# =========================================================
# SPIN
# =========================================================

def boost_spin(s_rest, k):
    """s = (gamma v.s', s' + gamma^2/(1 + gamma) (v.s') v)."""
    s_rest = np.asarray(s_rest, dtype=float)
    v = k.velocity
    g = k.gamma
    vs = float(v @ s_rest)
    return FourVector.from_parts(g * vs, s_rest + g * g / (1.0 + g) * vs * v)


def intrinsic_dipole_lagrangian(d, s_rest, E, B, k):
    """d gamma s.(E + v x B - v (v.E)) with the lab-frame spatial spin s."""
    E = np.asarray(E, dtype=float)
    v = k.velocity
    s4 = boost_spin(s_rest, k)
    value = d * k.gamma * float(s4.spatial @ (E + cross(v, B) - v * float(v @ E)))

    E4 = four_fields(E, B, k).E4
    covariant = -d * s4.dot(E4)
    scale = abs(d) * k.gamma ** 2 * (np.linalg.norm(E) + np.linalg.norm(B)) * (1.0 + np.linalg.norm(s4.array))
    _check_agree("intrinsic_dipole_lagrangian", (value, covariant), scale)
    return value


@dataclass(frozen=True)
class SpinRoute:
    via_spin: float
    via_tensor: float
    ratio: float


def spin_route_check(E, B, k, alpha):
    """
    Insert the induced dipole d s = alpha gamma (E + v x B) into the
    intrinsic-dipole form, with the 1/2 of induced-dipole energy, and
    compare with rel_lagrangian.
    """
    E = np.asarray(E, dtype=float)
    v = k.velocity
    rontgen = E + cross(v, B)
    induced = alpha * k.gamma * rontgen
    via_spin = 0.5 * k.gamma * float(induced @ (rontgen - v * float(v @ E)))
    via_tensor = rel_lagrangian(E, B, k, alpha)
    if via_tensor == 0.0:
        ratio = 1.0 if via_spin == 0.0 else float("inf")
    else:
        ratio = via_spin / via_tensor
    logger.debug(
        "spin route uses the 1/2 induced-dipole energy factor: via_spin=%.17g via_tensor=%.17g ratio=%.17g",
        via_spin, via_tensor, ratio,
    )
    return SpinRoute(via_spin, via_tensor, ratio)


# =========================================================
# DUALITY
# =========================================================

def _retag(F, table, side, other):
    if not F.serializable:
        raise DualityError(f"{side} field '{F.label}' is not catalog-backed; no dual can be formed")
    out = []
    for d in F.descriptors:
        if d.kind not in table:
            raise DualityError(f"{d.kind} has no {other} counterpart")
        out.append(replace(d, kind=table[d.kind]))
    return out


def duality_map(s):
    """
    E' = old B re-tagged as electric, B' = -old E, alpha <-> chi,
    hmw_induced <-> ac_induced. Paths, region and checks are unchanged.
    """
    if s.phase_kind not in DUAL_PHASE_KIND:
        raise DualityError(f"phase kind '{s.phase_kind}' has no dual")
    new_e = _retag(s.B, B_TO_E_KIND, "B", "electric")
    new_b = [d.negated() for d in _retag(s.E, E_TO_B_KIND, "E", "magnetic")]
    particle = replace(s.particle, alpha=s.particle.chi, chi=s.particle.alpha)
    return replace(
        s,
        particle=particle,
        E=superpose([catalog_field_from(d) for d in new_e]),
        B=superpose([catalog_field_from(d) for d in new_b]),
        phase_kind=DUAL_PHASE_KIND[s.phase_kind],
    )

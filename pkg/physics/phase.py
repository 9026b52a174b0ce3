"""
physics/phase.py

The phase vector field T, its line integrals, curl identities, the
Stokes consistency check and the dynamical phase.

T per phase kind:
    hmw_induced         T = alpha B x E
    ac_induced          T = chi   B x E
    permanent_electric  T = B x (d s')
"""

import logging
from dataclasses import dataclass, field as dataclass_field
from typing import Optional

import numpy as np

from core.errors import NonFiniteError, PhaseError, SingularityProximityError
from core.fieldlab import LineSingularity, PointSingularity, ShellSingularity, VectorField
from core.rules import (
    AC_INDUCED,
    ENDPOINT_TOL,
    HMW_INDUCED,
    PATH_SAMPLES,
    PERMANENT_ELECTRIC,
    QUAD_TOL,
    SINGULARITY_MARGIN,
    STOKES_PATCHES,
)
from core.veccalc import FDParams, advect, cross, dot, fd_curl, fd_div
from physics.quadrature import adaptive_simpson, gauss_legendre_2d

logger = logging.getLogger(__name__)

_CROSSING_SAMPLES = 512
_SHELL_GRID = (256, 32)


# =========================================================
# PHASE VECTOR FIELD
# =========================================================

@dataclass(frozen=True)
class PhaseVectorField:
    field: VectorField
    kind: str
    coupling: float
    scenario: Optional[object] = dataclass_field(default=None, repr=False, compare=False)

    def __call__(self, x):
        return self.field(x)

    def singularity_distance(self, x):
        return self.field.singularity_distance(x)

    @property
    def singularities(self):
        return self.field.singularities


def phase_vector_field(s):
    """T composed pointwise from the scenario's E and B per its phase kind."""
    E, B = s.E, s.B
    singularities = E.singularities + B.singularities

    if s.phase_kind in (HMW_INDUCED, AC_INDUCED):
        k = s.particle.alpha if s.phase_kind == HMW_INDUCED else s.particle.chi

        def evaluate(pts):
            return k * np.cross(B(pts), E(pts))

    elif s.phase_kind == PERMANENT_ELECTRIC:
        if not s.particle.d > 0.0 or s.particle.spin is None:
            raise PhaseError("permanent_electric phase needs an intrinsic dipole d > 0 with a spin direction")
        k = s.particle.d
        dvec = s.particle.dipole_vector()

        def evaluate(pts):
            return np.cross(B(pts), dvec)

    else:
        raise PhaseError(f"unknown phase kind '{s.phase_kind}'")

    T = VectorField(evaluate, singularities, label=f"T[{s.phase_kind}]")
    return PhaseVectorField(T, s.phase_kind, float(k), s)


def potential_density(s):
    """
    Scalar U(x) whose time integral is the dynamical phase:
    1/2 alpha E^2, 1/2 chi B^2, or d s'.E for a permanent dipole.
    """
    p = s.particle
    if s.phase_kind == HMW_INDUCED:
        return lambda pts: 0.5 * p.alpha * dot(s.E(pts), s.E(pts))
    if s.phase_kind == AC_INDUCED:
        return lambda pts: 0.5 * p.chi * dot(s.B(pts), s.B(pts))
    dvec = p.dipole_vector()
    return lambda pts: dot(s.E(pts), dvec)


def mass_shift_density(s, speed):
    """Second-order piece 1/2 alpha v^2 B^2 (dual: 1/2 chi v^2 E^2)."""
    p = s.particle
    if s.phase_kind == HMW_INDUCED:
        return lambda pts: 0.5 * p.alpha * speed ** 2 * dot(s.B(pts), s.B(pts))
    if s.phase_kind == AC_INDUCED:
        return lambda pts: 0.5 * p.chi * speed ** 2 * dot(s.E(pts), s.E(pts))
    return lambda pts: np.zeros(np.asarray(pts).shape[:-1])


# =========================================================
# LINE INTEGRALS
# =========================================================

@dataclass(frozen=True)
class PhaseResult:
    value: float
    abs_error_estimate: float
    subdivisions: int
    converged: bool = True


def _check_path_clear(F, path):
    pts = path.polyline(PATH_SAMPLES)
    gap = np.min(F.segment_distance(pts[:-1], pts[1:])) if F.singularities else np.inf
    if gap <= SINGULARITY_MARGIN:
        raise SingularityProximityError(f"path '{path.name}' touches a field singularity")


def _integrate(integrand, path, tol):
    if not tol > 0.0:
        raise PhaseError(f"tolerance must be > 0, got {tol}")
    q = adaptive_simpson(integrand, path.breakpoints, tol)
    if not np.isfinite(q.value):
        raise NonFiniteError(f"non-finite integrand along path '{path.name}'")
    return PhaseResult(q.value, q.abs_error, q.intervals, q.converged)


def line_phase(T, path, tol=QUAD_TOL):
    """Integral of T . dc along the path (the loop phase for closed paths), in radians."""
    _check_path_clear(T.field, path)

    def integrand(u):
        return dot(T(path.point(u)), path.tangent(u))

    return _integrate(integrand, path, tol)


def dynamical_phase(s, path, tol=QUAD_TOL):
    """Integral of U dt = U |c'| du / v0 along the path."""
    if not path.speed > 0.0:
        raise PhaseError(f"path '{path.name}': speed must be > 0 for a dynamical phase")
    _check_path_clear(s.E, path)
    _check_path_clear(s.B, path)
    U = potential_density(s)

    def integrand(u):
        return U(path.point(u)) * np.linalg.norm(path.tangent(u), axis=-1) / path.speed

    return _integrate(integrand, path, tol)


# =========================================================
# CURL IDENTITIES
# =========================================================

@dataclass(frozen=True)
class CurlIdentity:
    identity_value: np.ndarray
    fd_value: np.ndarray
    printed_variant: np.ndarray


def _cross_field(A, C, label):
    """Pointwise A x C with the union singularity set."""
    return VectorField(lambda pts: np.cross(A(pts), C(pts)), A.singularities + C.singularities, label=label)


def curl_cross_identity(E, B, x, p: Optional[FDParams] = None):
    """
    curl(B x E) three ways: the vector identity
        B div E - E div B + (E.grad) B - (B.grad) E
    assembled from stencils, the direct stencil curl, and the variant
    with the advection signs flipped.
    """
    x = np.asarray(x, dtype=float)
    BxE = _cross_field(B, E, "BxE")
    fd_value = fd_curl(BxE, x, p)

    Ex, Bx = E(x), B(x)
    div_e = np.asarray(fd_div(E, x, p))[..., None]
    div_b = np.asarray(fd_div(B, x, p))[..., None]
    e_grad_b = advect(Ex, B, x, p)
    b_grad_e = advect(Bx, E, x, p)

    sources = Bx * div_e - Ex * div_b
    return CurlIdentity(
        identity_value=sources + e_grad_b - b_grad_e,
        fd_value=fd_value,
        printed_variant=sources + b_grad_e - e_grad_b,
    )


def curl_constant_dipole(B, d, x, p: Optional[FDParams] = None):
    """curl(B x d) for constant d: -d div B + (d.grad) B, plus the fully negated grouping."""
    x = np.asarray(x, dtype=float)
    d = np.asarray(d, dtype=float)
    Bxd = VectorField(lambda pts: np.cross(B(pts), d), B.singularities, label="Bxd")
    fd_value = fd_curl(Bxd, x, p)

    div_b = np.asarray(fd_div(B, x, p))[..., None]
    d_grad_b = advect(np.broadcast_to(d, x.shape), B, x, p)
    return CurlIdentity(
        identity_value=-d * div_b + d_grad_b,
        fd_value=fd_value,
        printed_variant=-(d * div_b + d_grad_b),
    )


# =========================================================
# STOKES CHECK
# =========================================================

@dataclass(frozen=True)
class StokesResult:
    phase_diff: float
    surface_flux: float
    singular_crossing: bool
    phase_a: PhaseResult
    phase_b: PhaseResult

    @property
    def flux_reliable(self):
        return not self.singular_crossing and np.isfinite(self.surface_flux)


def stokes_check(T, path_a, path_b, tol=QUAD_TOL, p: Optional[FDParams] = None, patches=STOKES_PATCHES):
    """
    Compare phase(a) - phase(b) with the flux of curl T through the ruled
    surface S(u, w) = (1 - w) a(u) + w b(u). When that surface meets a
    singularity the flux is NaN and only phase_diff is meaningful.
    """
    for label, u in (("start", 0.0), ("end", 1.0)):
        gap = float(np.linalg.norm(path_a.point(u) - path_b.point(u)))
        if gap > ENDPOINT_TOL:
            raise PhaseError(
                f"paths '{path_a.name}' and '{path_b.name}' do not share their {label} point (gap {gap:.3e})"
            )

    phase_a = line_phase(T, path_a, tol)
    phase_b = line_phase(T, path_b, tol)
    diff = phase_a.value - phase_b.value

    crossing = surface_crosses_singularity(T.singularities, path_a, path_b)
    if crossing:
        logger.info(
            "surface between '%s' and '%s' meets a singularity; flux not computed",
            path_a.name, path_b.name,
        )
        flux = float("nan")
    else:
        try:
            flux = ruled_surface_flux(T, path_a, path_b, p, patches)
        except SingularityProximityError as exc:
            logger.info("surface flux skipped: %s", exc)
            flux = float("nan")

    return StokesResult(diff, flux, crossing, phase_a, phase_b)


def ruled_surface_flux(T, path_a, path_b, p: Optional[FDParams] = None, patches=STOKES_PATCHES):
    u_edges = np.unique(np.concatenate([
        np.linspace(0.0, 1.0, patches + 1), path_a.breakpoints, path_b.breakpoints,
    ]))
    w_edges = np.linspace(0.0, 1.0, patches + 1)

    def integrand(U, W):
        a, b = path_a.point(U), path_b.point(U)
        da, db = path_a.tangent(U), path_b.tangent(U)
        w = W[..., None]
        pts = (1.0 - w) * a + w * b
        s_u = (1.0 - w) * da + w * db
        s_w = b - a
        curl = fd_curl(T.field, pts, p)
        return dot(curl, cross(s_u, s_w))

    return gauss_legendre_2d(integrand, u_edges, w_edges)


def surface_crosses_singularity(singularities, path_a, path_b, n=_CROSSING_SAMPLES):
    """Triangulate the ruled surface and test it against each singularity."""
    u = np.linspace(0.0, 1.0, n + 1)
    a, b = path_a.point(u), path_b.point(u)
    # two triangles per strip: (a_i, a_i+1, b_i+1) and (a_i, b_i+1, b_i)
    v0 = np.concatenate([a[:-1], a[:-1]])
    v1 = np.concatenate([a[1:], b[1:]])
    v2 = np.concatenate([b[1:], b[:-1]])

    for sing in singularities:
        if isinstance(sing, LineSingularity):
            if np.any(_line_hits_triangles(np.asarray(sing.point), np.asarray(sing.direction), v0, v1, v2)):
                return True
        elif isinstance(sing, PointSingularity):
            if np.any(_point_on_triangles(np.asarray(sing.point), v0, v1, v2)):
                return True
        elif isinstance(sing, ShellSingularity):
            if _shell_cut(sing, path_a, path_b):
                return True
    return False


def _line_hits_triangles(origin, direction, v0, v1, v2, eps=1e-14, slack=1e-12):
    """Infinite line against triangles (Moller-Trumbore with the line parameter unrestricted)."""
    e1 = v1 - v0
    e2 = v2 - v0
    pvec = np.cross(direction, e2)
    det = dot(e1, pvec)
    usable = np.abs(det) > eps
    inv = np.where(usable, 1.0 / np.where(usable, det, 1.0), 0.0)
    tvec = origin - v0
    bu = dot(tvec, pvec) * inv
    qvec = np.cross(tvec, e1)
    bv = dot(direction, qvec) * inv
    return usable & (bu >= -slack) & (bv >= -slack) & (bu + bv <= 1.0 + slack)


def _point_on_triangles(q, v0, v1, v2, rel=1e-9):
    e1 = v1 - v0
    e2 = v2 - v0
    normal = np.cross(e1, e2)
    area2 = np.linalg.norm(normal, axis=-1)
    usable = area2 > 0.0
    unit_n = normal / np.where(usable, area2, 1.0)[..., None]
    rel_q = q - v0
    height = np.abs(dot(rel_q, unit_n))
    scale = 1.0 + np.linalg.norm(q)
    # barycentric coordinates of the projection
    d00, d01, d11 = dot(e1, e1), dot(e1, e2), dot(e2, e2)
    d20, d21 = dot(rel_q, e1), dot(rel_q, e2)
    denom = d00 * d11 - d01 * d01
    ok = usable & (denom > 0.0)
    denom = np.where(ok, denom, 1.0)
    bv = (d11 * d20 - d01 * d21) / denom
    bw = (d00 * d21 - d01 * d20) / denom
    inside = (bv >= 0.0) & (bw >= 0.0) & (bv + bw <= 1.0)
    return ok & inside & (height <= rel * scale)


def _shell_cut(sing, path_a, path_b):
    nu, nw = _SHELL_GRID
    u = np.linspace(0.0, 1.0, nu)
    w = np.linspace(0.0, 1.0, nw)[:, None, None]
    pts = (1.0 - w) * path_a.point(u)[None] + w * path_b.point(u)[None]
    axis = np.asarray(sing.direction, dtype=float)
    axis = axis / np.linalg.norm(axis)
    rel = pts - np.asarray(sing.point, dtype=float)
    r = np.linalg.norm(rel - (rel @ axis)[..., None] * axis, axis=-1)
    signed = r - sing.radius
    return bool(np.any(np.abs(signed) <= SINGULARITY_MARGIN) or (np.any(signed < 0.0) and np.any(signed > 0.0)))

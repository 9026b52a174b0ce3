"""
core/veccalc.py

3-vector algebra and central-difference differential operators.

The operators are numerical oracles for the rest of the package: every
analytic identity in `physics/` is checked against them. All functions
are vectorised: a point is an array of shape (3,) and a batch of points
has shape (..., 3).
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray

from core.errors import NonFiniteError, SingularityProximityError
from core.rules import FD_DEFAULT_ORDER, FD_ORDERS, FD_REL_STEP

Vec3 = NDArray[np.float64]

# (offset, weight) pairs for the first derivative, in units of h
_STENCILS = {
    2: ((1.0, 0.5), (-1.0, -0.5)),
    4: ((2.0, -1.0 / 12.0), (1.0, 8.0 / 12.0), (-1.0, -8.0 / 12.0), (-2.0, 1.0 / 12.0)),
}


# =========================================================
# VECTORS
# =========================================================

def vec3(x, y=None, z=None) -> Vec3:
    """Build a finite 3-vector from three reals or one length-3 sequence."""
    if y is None and z is None:
        v = np.asarray(x, dtype=float)
    else:
        v = np.array([x, y, z], dtype=float)
    if v.shape != (3,):
        raise ValueError(f"expected 3 components, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise NonFiniteError(f"non-finite vector component in {v}")
    return v


def as_points(x: ArrayLike) -> NDArray[np.float64]:
    pts = np.asarray(x, dtype=float)
    if pts.shape[-1:] != (3,):
        raise ValueError(f"points must have a trailing axis of length 3, got {pts.shape}")
    return pts


def cross(a: ArrayLike, b: ArrayLike) -> Vec3:
    """Right-handed cross product, broadcasting over leading axes."""
    return np.cross(np.asarray(a, dtype=float), np.asarray(b, dtype=float))


def dot(a: ArrayLike, b: ArrayLike) -> NDArray[np.float64]:
    return np.sum(np.asarray(a, dtype=float) * np.asarray(b, dtype=float), axis=-1)


def norm(a: ArrayLike) -> NDArray[np.float64]:
    return np.linalg.norm(np.asarray(a, dtype=float), axis=-1)


def unit(a: ArrayLike) -> Vec3:
    a = np.asarray(a, dtype=float)
    n = np.linalg.norm(a)
    if n == 0.0:
        raise ValueError("cannot normalise a zero vector")
    return a / n


def perpendicular_basis(direction: ArrayLike):
    """Two unit vectors completing `direction` to a right-handed frame."""
    d = unit(direction)
    helper = np.array([1.0, 0.0, 0.0]) if abs(d[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = unit(np.cross(d, helper))
    e2 = np.cross(d, e1)
    return e1, e2


# =========================================================
# FINITE DIFFERENCES
# =========================================================

@dataclass(frozen=True)
class FDParams:
    """
    Stencil settings. `h=None` means h = 1e-4 * (1 + |x|) at each point.
    """
    h: Optional[float] = None
    order: int = FD_DEFAULT_ORDER

    def __post_init__(self):
        if self.order not in FD_ORDERS:
            raise ValueError(f"scheme order must be one of {FD_ORDERS}, got {self.order}")
        if self.h is not None and not self.h > 0.0:
            raise ValueError(f"step h must be > 0, got {self.h}")

    def step(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        if self.h is None:
            return FD_REL_STEP * (1.0 + np.linalg.norm(x, axis=-1))
        return np.full(x.shape[:-1], float(self.h))

    @property
    def reach(self) -> float:
        """Largest stencil offset in units of h."""
        return self.order / 2


def _evaluate(F, pts):
    vals = np.asarray(F(pts), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise NonFiniteError("non-finite value produced inside a finite-difference stencil")
    return vals


def _guard(F, x, reach):
    distance_to = getattr(F, "singularity_distance", None)
    if distance_to is None:
        return
    dist = np.asarray(distance_to(x), dtype=float)
    close = dist <= reach
    if np.any(close):
        idx = np.argwhere(np.atleast_1d(close))[0]
        where = np.atleast_2d(x)[tuple(idx)] if x.ndim > 1 else x
        raise SingularityProximityError(
            f"stencil at {np.array2string(np.asarray(where), precision=6)} reaches within "
            f"{np.min(dist):.3e} of a field singularity"
        )


def fd_jacobian(F, x: ArrayLike, p: Optional[FDParams] = None) -> NDArray[np.float64]:
    """
    J[..., i, j] = dF_i / dx_j by central differences.

    F is any callable on (..., 3) arrays; when it exposes
    `singularity_distance` the stencil is refused near singularities.
    """
    p = p or FDParams()
    x = as_points(x)
    h = p.step(x)
    _guard(F, x, p.reach * h)

    J = np.zeros(x.shape + (3,))
    for j in range(3):
        for offset, weight in _STENCILS[p.order]:
            shifted = x.copy()
            shifted[..., j] += offset * h
            J[..., :, j] += weight * _evaluate(F, shifted)
        J[..., :, j] /= h[..., None]
    return J


def fd_gradient(f, x: ArrayLike, p: Optional[FDParams] = None, guard=None) -> NDArray[np.float64]:
    """Gradient of a scalar field f(points) -> (...,)."""
    p = p or FDParams()
    x = as_points(x)
    h = p.step(x)
    if guard is not None:
        _guard(guard, x, p.reach * h)

    grad = np.zeros(x.shape)
    for j in range(3):
        for offset, weight in _STENCILS[p.order]:
            shifted = x.copy()
            shifted[..., j] += offset * h
            grad[..., j] += weight * _evaluate(f, shifted)
        grad[..., j] /= h
    return grad


def fd_div(F, x: ArrayLike, p: Optional[FDParams] = None):
    J = fd_jacobian(F, x, p)
    return np.trace(J, axis1=-2, axis2=-1)


def curl_from_jacobian(J: NDArray[np.float64]) -> NDArray[np.float64]:
    return np.stack(
        [
            J[..., 2, 1] - J[..., 1, 2],
            J[..., 0, 2] - J[..., 2, 0],
            J[..., 1, 0] - J[..., 0, 1],
        ],
        axis=-1,
    )


def fd_curl(F, x: ArrayLike, p: Optional[FDParams] = None) -> NDArray[np.float64]:
    return curl_from_jacobian(fd_jacobian(F, x, p))


def advect(a: ArrayLike, F, x: ArrayLike, p: Optional[FDParams] = None) -> NDArray[np.float64]:
    """(a . grad) F at x; `a` may vary per point."""
    J = fd_jacobian(F, x, p)
    return np.einsum("...ij,...j->...i", J, np.asarray(a, dtype=float))

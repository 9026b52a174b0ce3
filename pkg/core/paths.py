"""
core/paths.py

Interferometer paths c: [0, 1] -> R^3 traversed at constant speed v0.

Two concrete kinds:
- SplinePath: piecewise-cubic spline through ordered control points
  (chord-length knots, periodic when closed, natural ends otherwise)
- ArcPath: exact elliptic arc, used where tangents must be exact
"""

import math

import numpy as np
from scipy.interpolate import CubicSpline

from core.errors import Diagnostic, ScenarioError
from core.rules import GAUSS_ORDER, TWO_PI
from core.veccalc import unit

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(GAUSS_ORDER)
_LENGTH_SUBPANELS = 16
_INVERSE_GRID = 2049


class Path:
    """Common behaviour; subclasses provide point, tangent and breakpoints."""

    def __init__(self, name, closed, speed):
        self.name = name
        self.closed = bool(closed)
        self.speed = float(speed)

    # ---------------------------------------------------------
    # Geometry (subclass hooks)
    # ---------------------------------------------------------
    def point(self, u):
        raise NotImplementedError

    def tangent(self, u):
        """dc/du (not normalised)."""
        raise NotImplementedError

    @property
    def breakpoints(self):
        """Parameters where the integrand may lose smoothness; includes 0 and 1."""
        return np.array([0.0, 1.0])

    # ---------------------------------------------------------
    # Derived quantities
    # ---------------------------------------------------------
    def velocity(self, u):
        """Lab velocity at constant speed v0 along the path."""
        t = np.asarray(self.tangent(u), dtype=float)
        return self.speed * t / np.linalg.norm(t, axis=-1)[..., None]

    def polyline(self, n):
        u = np.linspace(0.0, 1.0, n)
        return self.point(u)

    def length(self):
        nodes, weights = [], []
        edges = self.breakpoints
        for a, b in zip(edges[:-1], edges[1:]):
            sub = np.linspace(a, b, _LENGTH_SUBPANELS + 1)
            for lo, hi in zip(sub[:-1], sub[1:]):
                half = 0.5 * (hi - lo)
                nodes.append(lo + half * (_GL_NODES + 1.0))
                weights.append(half * _GL_WEIGHTS)
        nodes = np.concatenate(nodes)
        weights = np.concatenate(weights)
        return float(np.sum(weights * np.linalg.norm(self.tangent(nodes), axis=-1)))

    def uniform_time_samples(self, n):
        """
        Parameters at equal time steps (equal arc length, since the speed
        is constant); the seam is not repeated when closed.
        """
        grid = np.linspace(0.0, 1.0, _INVERSE_GRID)
        speed = np.linalg.norm(self.tangent(grid), axis=-1)
        cumulative = np.concatenate([[0.0], np.cumsum(0.5 * (speed[1:] + speed[:-1]) * np.diff(grid))])
        targets = np.linspace(0.0, cumulative[-1], n, endpoint=not self.closed)
        return np.interp(targets, cumulative, grid)

    def seam_gap(self):
        return float(np.linalg.norm(self.point(1.0) - self.point(0.0)))

    def seam_tangent_gap(self):
        t0 = unit(self.tangent(0.0))
        t1 = unit(self.tangent(1.0))
        return float(np.linalg.norm(t1 - t0))

    def start(self):
        return np.asarray(self.point(0.0), dtype=float)

    def end(self):
        return np.asarray(self.point(1.0), dtype=float)


# =========================================================
# SPLINE PATHS
# =========================================================

class SplinePath(Path):

    def __init__(self, name, points, closed=False, speed=0.01):
        super().__init__(name, closed, speed)
        ctrl = np.asarray(points, dtype=float)
        if ctrl.ndim != 2 or ctrl.shape[1] != 3 or len(ctrl) < 2:
            raise ScenarioError(
                f"path '{name}' needs at least two 3-component control points",
                [Diagnostic("PATH_DEGENERATE", f"path '{name}': bad control points", name)],
            )
        if not np.all(np.isfinite(ctrl)):
            raise ScenarioError(
                f"path '{name}' has non-finite control points",
                [Diagnostic("PATH_DEGENERATE", f"path '{name}': non-finite control point", name)],
            )
        self.control_points = ctrl

        knots_pts = ctrl
        if self.closed and not np.array_equal(ctrl[0], ctrl[-1]):
            knots_pts = np.vstack([ctrl, ctrl[:1]])
        chords = np.linalg.norm(np.diff(knots_pts, axis=0), axis=1)
        if np.any(chords == 0.0) or (self.closed and len(knots_pts) < 4):
            raise ScenarioError(
                f"path '{name}' has repeated consecutive control points or too few for a loop",
                [Diagnostic("PATH_DEGENERATE", f"path '{name}': degenerate control polygon", name)],
            )
        knots = np.concatenate([[0.0], np.cumsum(chords)]) / np.sum(chords)
        knots[-1] = 1.0

        self._knots = knots
        self._knot_points = knots_pts
        self._spline = CubicSpline(knots, knots_pts, axis=0, bc_type="periodic" if self.closed else "natural")
        self._derivative = self._spline.derivative()

    @property
    def breakpoints(self):
        return self._knots

    def point(self, u):
        u = np.asarray(u, dtype=float)
        out = np.asarray(self._spline(u), dtype=float)
        # control points are returned exactly at their knots
        idx = np.clip(np.searchsorted(self._knots, u), 0, len(self._knots) - 1)
        on_knot = self._knots[idx] == u
        if np.any(on_knot):
            out = np.where(on_knot[..., None], self._knot_points[idx], out)
        return out

    def tangent(self, u):
        return np.asarray(self._derivative(np.asarray(u, dtype=float)), dtype=float)

    def reversed(self):
        return SplinePath(self.name, self.control_points[::-1].copy(), self.closed, self.speed)

    def rotated(self, R):
        return SplinePath(self.name, self.control_points @ np.asarray(R, dtype=float).T, self.closed, self.speed)

    def to_dict(self):
        return {
            "name": self.name,
            "points": [[float(c) for c in p] for p in self.control_points],
            "closed": self.closed,
            "speed": self.speed,
        }


# =========================================================
# EXACT ARCS
# =========================================================

class ArcPath(Path):
    """
    c(u) = center + a cos(theta) e1 + b sin(theta) e2,
    theta = start_angle + u * sweep, e2 = normal x e1.
    """

    def __init__(self, name, center, radius, minor_radius=None, normal=(0.0, 0.0, 1.0),
                 major_dir=(1.0, 0.0, 0.0), start_angle=0.0, sweep=TWO_PI, closed=None, speed=0.01):
        if closed is None:
            closed = is_full_turn(sweep)
        super().__init__(name, closed, speed)
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)
        self.minor_radius = float(radius if minor_radius is None else minor_radius)
        self.normal = np.asarray(normal, dtype=float)
        self.major_dir = np.asarray(major_dir, dtype=float)
        self.start_angle = float(start_angle)
        self.sweep = float(sweep)

        if not (self.radius > 0.0 and self.minor_radius > 0.0 and self.sweep != 0.0):
            raise ScenarioError(
                f"arc '{name}' needs positive radii and a nonzero sweep",
                [Diagnostic("PATH_DEGENERATE", f"path '{name}': degenerate arc", name)],
            )
        n = unit(self.normal)
        e1 = self.major_dir - (self.major_dir @ n) * n
        if np.linalg.norm(e1) < 1e-12:
            raise ScenarioError(
                f"arc '{name}': major_dir is parallel to the normal",
                [Diagnostic("PATH_DEGENERATE", f"path '{name}': major_dir parallel to normal", name)],
            )
        self._e1 = unit(e1)
        self._e2 = np.cross(n, self._e1)

    def _theta(self, u):
        return self.start_angle + np.asarray(u, dtype=float) * self.sweep

    def point(self, u):
        th = self._theta(u)[..., None]
        return self.center + self.radius * np.cos(th) * self._e1 + self.minor_radius * np.sin(th) * self._e2

    def tangent(self, u):
        th = self._theta(u)[..., None]
        return self.sweep * (-self.radius * np.sin(th) * self._e1 + self.minor_radius * np.cos(th) * self._e2)

    def reversed(self):
        return ArcPath(self.name, self.center, self.radius, self.minor_radius, self.normal, self.major_dir,
                       self.start_angle + self.sweep, -self.sweep, self.closed, self.speed)

    def rotated(self, R):
        R = np.asarray(R, dtype=float)
        return ArcPath(self.name, R @ self.center, self.radius, self.minor_radius, R @ self.normal,
                       R @ self.major_dir, self.start_angle, self.sweep, self.closed, self.speed)

    def to_dict(self):
        return {
            "name": self.name,
            "arc": {
                "center": [float(c) for c in self.center],
                "radius": self.radius,
                "minor_radius": self.minor_radius,
                "normal": [float(c) for c in self.normal],
                "major_dir": [float(c) for c in self.major_dir],
                "start_angle": self.start_angle,
                "sweep": self.sweep,
            },
            "closed": self.closed,
            "speed": self.speed,
        }


def is_full_turn(sweep):
    turns = abs(sweep) / TWO_PI
    return turns >= 1.0 - 1e-12 and abs(turns - round(turns)) < 1e-12


def circle(name, center=(0.0, 0.0, 0.0), radius=1.0, normal=(0.0, 0.0, 1.0), turns=1, speed=0.01):
    """Closed coaxial circle traversed counter-clockwise about `normal`."""
    return ArcPath(name, center, radius, normal=normal, sweep=turns * TWO_PI, closed=True, speed=speed)


def half_circle(name, radius=1.0, upper=True, speed=0.01):
    """Arc from (r, 0, 0) to (-r, 0, 0) through +y (upper) or -y (lower)."""
    sweep = math.pi if upper else -math.pi
    return ArcPath(name, (0.0, 0.0, 0.0), radius, sweep=sweep, closed=False, speed=speed)

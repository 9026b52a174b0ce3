"""
physics/quadrature.py

Quadrature used by the phase engine.

- adaptive_simpson: interval bisection until the Richardson error
  estimate of every interval meets its share of the tolerance. Intervals
  of one level are evaluated in a single vectorised call; the final sum
  runs over intervals sorted by position so the result does not depend
  on refinement order.
- gauss_legendre / gauss_legendre_2d: fixed-order rules on panels, used
  as an independent oracle and for surface fluxes.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from core.rules import GAUSS_ORDER, QUAD_MAX_DEPTH, QUAD_MAX_SUBDIVISIONS, QUAD_MIN_DEPTH, QUAD_MIN_PANELS

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_error: float
    intervals: int
    converged: bool


def initial_panels(edges, min_panels=QUAD_MIN_PANELS):
    """Split [edges[0], edges[-1]] at every edge, then evenly to reach min_panels."""
    edges = np.unique(np.asarray(edges, dtype=float))
    if len(edges) < 2:
        raise ValueError("need at least two distinct edges")
    span = edges[-1] - edges[0]
    lo, hi = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        n = max(1, math.ceil(min_panels * (b - a) / span))
        cuts = np.linspace(a, b, n + 1)
        lo.extend(cuts[:-1])
        hi.extend(cuts[1:])
    return np.array(lo), np.array(hi)


def adaptive_simpson(f, edges, tol, min_depth=QUAD_MIN_DEPTH, max_depth=QUAD_MAX_DEPTH,
                     min_panels=QUAD_MIN_PANELS, max_intervals=QUAD_MAX_SUBDIVISIONS):
    """
    Integrate a vectorised scalar integrand f(u) -> array over the span
    of `edges`. Each interval gets tol * width / span of the budget.

    Non-convergence (depth or interval cap reached) is reported through
    `converged=False` with the best value and error estimate.
    """
    if not tol > 0.0:
        raise ValueError(f"tolerance must be > 0, got {tol}")

    a, b = initial_panels(edges, min_panels)
    span = b[-1] - a[0]
    m = 0.5 * (a + b)
    fa, fm, fb = _batch(f, a, m, b)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    share = tol * (b - a) / span
    depth = np.zeros(len(a), dtype=int)

    done_pos, done_val, done_err = [], [], []
    converged = True
    total = len(a)

    while len(a):
        lm = 0.5 * (a + m)
        rm = 0.5 * (m + b)
        flm, frm = _batch(f, lm, rm)
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        err = (left + right - whole) / 15.0

        ok = (np.abs(err) <= share) & (depth + 1 >= min_depth)
        stuck = ~ok & ((depth + 1 >= max_depth) | (total + np.count_nonzero(~ok) > max_intervals))
        if np.any(stuck):
            converged = False
        accept = ok | stuck

        done_pos.append(a[accept])
        done_val.append((left + right + err)[accept])
        done_err.append(np.abs(err)[accept])

        split = ~accept
        total += np.count_nonzero(split)
        a, m, b = (
            np.concatenate([a[split], m[split]]),
            np.concatenate([lm[split], rm[split]]),
            np.concatenate([m[split], b[split]]),
        )
        fa, fm, fb = (
            np.concatenate([fa[split], fm[split]]),
            np.concatenate([flm[split], frm[split]]),
            np.concatenate([fm[split], fb[split]]),
        )
        whole = np.concatenate([left[split], right[split]])
        share = np.concatenate([share[split], share[split]]) * 0.5
        depth = np.concatenate([depth[split], depth[split]]) + 1

    pos = np.concatenate(done_pos)
    order = np.argsort(pos, kind="stable")
    value = math.fsum(np.concatenate(done_val)[order])
    error = math.fsum(np.concatenate(done_err)[order])

    if not converged:
        logger.warning(
            "adaptive quadrature did not converge: best value %.12g, error estimate %.3g (tol %.3g)",
            value, error, tol,
        )
    return QuadratureResult(value, error, len(pos), converged)


def _batch(f, *grids):
    """Evaluate f once on the concatenation of grids and split the result."""
    sizes = [len(g) for g in grids]
    values = np.asarray(f(np.concatenate(grids)), dtype=float)
    return np.split(values, np.cumsum(sizes)[:-1])


# =========================================================
# GAUSS-LEGENDRE
# =========================================================

def gauss_nodes(lo, hi, order=GAUSS_ORDER):
    """Nodes and weights of an order-point rule on every panel [lo_i, hi_i]."""
    x, w = np.polynomial.legendre.leggauss(order)
    lo = np.asarray(lo, dtype=float)[:, None]
    hi = np.asarray(hi, dtype=float)[:, None]
    half = 0.5 * (hi - lo)
    nodes = lo + half * (x + 1.0)
    weights = half * w
    return nodes.ravel(), weights.ravel()


def gauss_legendre(f, edges, panels=QUAD_MIN_PANELS, order=GAUSS_ORDER):
    """Fixed-order composite rule over the span of `edges`."""
    lo, hi = initial_panels(edges, panels)
    nodes, weights = gauss_nodes(lo, hi, order)
    return math.fsum(weights * np.asarray(f(nodes), dtype=float))


def gauss_legendre_2d(f, u_edges, w_edges, order=GAUSS_ORDER):
    """
    Tensor-product rule on the patches of the (u_edges x w_edges) grid.
    f takes broadcastable arrays (U, W) and returns values of their shape.
    """
    u_edges = np.asarray(u_edges, dtype=float)
    w_edges = np.asarray(w_edges, dtype=float)
    un, uw = gauss_nodes(u_edges[:-1], u_edges[1:], order)
    wn, ww = gauss_nodes(w_edges[:-1], w_edges[1:], order)
    U, W = np.meshgrid(un, wn, indexing="ij")
    values = np.asarray(f(U, W), dtype=float)
    return math.fsum((values * uw[:, None] * ww[None, :]).ravel())

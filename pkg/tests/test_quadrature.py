"""
Adaptive Simpson and Gauss-Legendre rules.
"""

import logging
import math

import numpy as np
import pytest

from physics.quadrature import adaptive_simpson, gauss_legendre, gauss_legendre_2d, initial_panels


class TestAdaptiveSimpson:

    def test_sine(self):
        q = adaptive_simpson(np.sin, [0.0, math.pi], 1e-10)
        assert q.converged
        assert abs(q.value - 2.0) < 1e-10
        assert q.abs_error <= 1e-10

    def test_cubic_is_exact(self):
        q = adaptive_simpson(lambda u: 4.0 * u ** 3 - u, [0.0, 2.0], 1e-12)
        assert q.value == pytest.approx(14.0, abs=1e-12)

    def test_breakpoints_split_the_range(self):
        q = adaptive_simpson(np.abs, [-1.0, 0.0, 3.0], 1e-12)
        assert q.value == pytest.approx(5.0, abs=1e-12)

    def test_deterministic(self):
        f = lambda u: np.exp(np.sin(7.0 * u))
        first = adaptive_simpson(f, [0.0, 1.0], 1e-11)
        second = adaptive_simpson(f, [0.0, 1.0], 1e-11)
        assert first == second

    def test_non_convergence_reports_best_value(self, caplog):
        step = lambda u: np.where(u < 1.0 / 3.0, 0.0, 1.0)
        with caplog.at_level(logging.WARNING, logger="physics.quadrature"):
            q = adaptive_simpson(step, [0.0, 1.0], 1e-14, max_depth=5)
        assert not q.converged
        assert q.value == pytest.approx(2.0 / 3.0, abs=1e-2)
        assert "did not converge" in caplog.text

    def test_tolerance_must_be_positive(self):
        with pytest.raises(ValueError):
            adaptive_simpson(np.sin, [0.0, 1.0], 0.0)

    def test_initial_panels_cover_every_edge(self):
        lo, hi = initial_panels([0.0, 0.1, 1.0], min_panels=10)
        assert lo[0] == 0.0 and hi[-1] == 1.0
        assert 0.1 in hi
        np.testing.assert_array_equal(lo[1:], hi[:-1])


class TestGaussLegendre:

    def test_polynomial_degree_fifteen_is_exact(self):
        f = lambda u: 16.0 * u ** 15
        assert gauss_legendre(f, [0.0, 1.0], panels=1) == pytest.approx(1.0, abs=1e-14)

    def test_agrees_with_adaptive(self):
        f = lambda u: np.exp(u) * np.cos(3.0 * u)
        assert gauss_legendre(f, [0.0, 2.0]) == pytest.approx(adaptive_simpson(f, [0.0, 2.0], 1e-12).value, abs=1e-11)

    def test_product_rule(self):
        value = gauss_legendre_2d(lambda U, W: U * W, np.linspace(0, 1, 3), np.linspace(0, 2, 5))
        assert value == pytest.approx(1.0, abs=1e-14)

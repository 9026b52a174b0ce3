"""
Spline and arc paths.
"""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from core.errors import ScenarioError
from core.paths import ArcPath, SplinePath, circle, half_circle, is_full_turn


def square_loop(side=3.0, name="square"):
    h = side / 2.0
    pts = [(h, 0, 0), (h, h, 0), (0, h, 0), (-h, h, 0), (-h, 0, 0), (-h, -h, 0), (0, -h, 0), (h, -h, 0)]
    return SplinePath(name, pts, closed=True)


class TestSplinePath:

    def test_open_path_hits_control_points_exactly(self, rng):
        pts = rng.normal(size=(7, 3))
        path = SplinePath("p", pts)
        assert_array_equal(path.point(path.breakpoints), pts)

    def test_closed_path_hits_control_points_exactly(self):
        path = square_loop()
        assert_array_equal(path.point(path.breakpoints[:-1]), path.control_points)
        assert_array_equal(path.end(), path.start())

    def test_closed_seam_is_smooth(self):
        path = square_loop()
        assert path.seam_gap() == 0.0
        assert path.seam_tangent_gap() < 1e-9

    def test_circle_through_samples_has_circumference(self):
        phi = np.linspace(0.0, 2.0 * np.pi, 64, endpoint=False)
        path = SplinePath("c", np.stack([np.cos(phi), np.sin(phi), 0 * phi], axis=-1), closed=True)
        assert path.length() == pytest.approx(2.0 * np.pi, rel=1e-4)

    def test_reversed_swaps_endpoints(self, rng):
        path = SplinePath("p", rng.normal(size=(4, 3)))
        back = path.reversed()
        assert_array_equal(back.start(), path.end())
        assert_array_equal(back.end(), path.start())

    @pytest.mark.parametrize("points, closed", [
        ([(0, 0, 0)], False),
        ([(0, 0, 0), (0, 0, 0), (1, 0, 0)], False),
        ([(0, 0, 0), (1, 0, 0)], True),
        ([(0, 0, 0), (1, 0, float("nan"))], False),
        ([(0, 0), (1, 0)], False),
    ])
    def test_degenerate_polygons(self, points, closed):
        with pytest.raises(ScenarioError) as info:
            SplinePath("bad", points, closed=closed)
        assert info.value.diagnostics[0].code == "PATH_DEGENERATE"


class TestArcPath:

    def test_circle_length(self):
        assert circle("c", radius=2.0).length() == pytest.approx(4.0 * np.pi, rel=1e-12)

    def test_ellipse_length(self):
        # circumference of a 2 x 1 ellipse
        arc = ArcPath("e", (0, 0, 0), 2.0, minor_radius=1.0)
        assert arc.length() == pytest.approx(9.688448220547675, rel=1e-10)

    def test_half_circles_share_endpoints(self):
        upper, lower = half_circle("u"), half_circle("l", upper=False)
        assert_allclose(upper.start(), [1, 0, 0])
        assert_allclose(upper.end(), [-1, 0, 0], atol=1e-15)
        assert_allclose(lower.end(), upper.end(), atol=1e-15)
        assert upper.point(0.5)[1] > 0 > lower.point(0.5)[1]

    def test_tangent_matches_difference_quotient(self):
        arc = ArcPath("a", (1, 2, 3), 1.5, minor_radius=0.5, normal=(1, 1, 0), major_dir=(0, 0, 1))
        u, h = 0.3, 1e-6
        assert_allclose(arc.tangent(u), (arc.point(u + h) - arc.point(u - h)) / (2 * h), rtol=1e-8, atol=1e-7)

    def test_velocity_has_path_speed(self):
        arc = ArcPath("a", (0, 0, 0), 2.0, minor_radius=0.5, speed=0.05)
        assert_allclose(np.linalg.norm(arc.velocity(np.linspace(0, 1, 9)), axis=-1), 0.05)

    def test_reversed_arc(self):
        arc = half_circle("u")
        back = arc.reversed()
        assert_allclose(back.start(), arc.end(), atol=1e-15)
        assert_allclose(back.end(), arc.start(), atol=1e-15)

    def test_uniform_time_samples_are_equally_spaced(self):
        arc = ArcPath("e", (0, 0, 0), 2.0, minor_radius=1.0)
        pts = arc.point(arc.uniform_time_samples(256))
        gaps = np.linalg.norm(np.diff(np.vstack([pts, pts[:1]]), axis=0), axis=1)
        assert_allclose(gaps, gaps.mean(), rtol=1e-3)

    def test_rotation(self):
        R = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
        arc = ArcPath("a", (1, 0, 0), 1.0, sweep=math.pi)
        u = np.linspace(0, 1, 5)
        assert_allclose(arc.rotated(R).point(u), arc.point(u) @ R.T, atol=1e-15)

    def test_degenerate_arcs(self):
        with pytest.raises(ScenarioError):
            ArcPath("a", (0, 0, 0), 0.0)
        with pytest.raises(ScenarioError):
            ArcPath("a", (0, 0, 0), 1.0, sweep=0.0)
        with pytest.raises(ScenarioError):
            ArcPath("a", (0, 0, 0), 1.0, normal=(1, 0, 0), major_dir=(2, 0, 0))

    def test_full_turns(self):
        assert is_full_turn(2 * math.pi)
        assert is_full_turn(-4 * math.pi)
        assert not is_full_turn(math.pi)
        assert circle("c", turns=2).closed
        assert not half_circle("h").closed

"""
Field catalog, superposition and regions.
"""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal
from scipy.spatial.transform import Rotation

from core.errors import FieldCatalogError, SingularityProximityError
from core.fieldlab import (
    FieldDescriptor,
    LineSingularity,
    Region,
    ShellSingularity,
    catalog_field,
    default_excluded_region,
    superpose,
)
from core.veccalc import FDParams, fd_curl, fd_div

ORDER4 = FDParams(order=4)


def off_axis_points(rng, n=100, r_min=0.1, r_max=1.5):
    r = rng.uniform(r_min, r_max, n)
    phi = rng.uniform(0.0, 2.0 * np.pi, n)
    z = rng.uniform(-1.0, 1.0, n)
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=-1)


# =============================================================================
# Catalog values
# =============================================================================

class TestCatalogValues:

    def test_line_charge(self):
        E = catalog_field("line_charge_E", {"density": 2.0 * math.pi})
        assert_allclose(E([1.0, 0.0, 0.0]), [1, 0, 0], atol=1e-15)

    def test_current_wire(self):
        B = catalog_field("current_wire_B", {"current": 2.0 * math.pi})
        assert_allclose(B([1.0, 0.0, 0.0]), [0, 1, 0], atol=1e-15)

    def test_uniform(self, rng):
        B = catalog_field("uniform", {"magnitude": 3.0})
        assert_array_equal(B(rng.normal(size=(5, 3))), np.tile([0.0, 0.0, 3.0], (5, 1)))

    def test_monopole_line_is_radial(self):
        B = catalog_field("monopole_line_B", {"density": 2.0 * math.pi})
        assert_allclose(B([0.0, 2.0, 5.0]), [0, 0.5, 0], atol=1e-15)

    def test_point_charge_inverse_square(self):
        E = catalog_field("point_charge_E", {"charge": 4.0 * math.pi}, axis_point=(1.0, 0.0, 0.0))
        assert_allclose(E([1.0, 0.0, 2.0]), [0, 0, 0.25], atol=1e-15)

    def test_solenoid_inside_and_outside(self):
        B = catalog_field("solenoid_B", {"field": 2.0, "radius": 1.0})
        assert_array_equal(B([[0.5, 0.0, 3.0], [1.5, 0.0, 0.0]]), [[0, 0, 2], [0, 0, 0]])
        assert isinstance(B.singularities[0], ShellSingularity)

    def test_axis_off_origin(self):
        E = catalog_field("line_charge_E", {"density": 2.0 * math.pi}, axis_point=(1.0, 1.0, 0.0), axis_dir=(0, 0, 2))
        assert_allclose(E([1.0, 3.0, -4.0]), [0, 0.5, 0], atol=1e-15)

    def test_finite_just_outside_singularity(self):
        E = catalog_field("line_charge_E", {"density": 1.0})
        assert np.all(np.isfinite(E([2e-12, 0.0, 0.0])))


# =============================================================================
# Catalog errors
# =============================================================================

class TestCatalogErrors:

    @pytest.mark.parametrize("kind, params, axis_dir", [
        ("dipole_B", {}, (0, 0, 1)),
        ("line_charge_E", {"density": 1.0}, (0, 0, 0)),
        ("line_charge_E", {}, (0, 0, 1)),
        ("uniform", {"magnitude": 1.0, "spin": 2.0}, (0, 0, 1)),
        ("solenoid_B", {"field": 1.0, "radius": 0.0}, (0, 0, 1)),
        ("uniform", {"magnitude": float("inf")}, (0, 0, 1)),
    ])
    def test_rejected(self, kind, params, axis_dir):
        with pytest.raises(FieldCatalogError):
            catalog_field(kind, params, axis_dir=axis_dir)


# =============================================================================
# Differential identities of the catalog
# =============================================================================

class TestSourceFreeOffAxis:

    @pytest.mark.parametrize("kind, param", [
        ("line_charge_E", "density"),
        ("current_wire_B", "current"),
        ("monopole_line_B", "density"),
    ])
    def test_div_and_curl_vanish(self, rng, kind, param):
        F = catalog_field(kind, {param: 2.0 * math.pi})
        pts = off_axis_points(rng)
        assert_allclose(fd_div(F, pts, ORDER4), 0.0, atol=1e-6)
        assert_allclose(fd_curl(F, pts, ORDER4), 0.0, atol=1e-6)

    def test_stencils_never_straddle_the_solenoid_shell(self):
        B = catalog_field("solenoid_B", {"field": 1.0, "radius": 1.0})
        with pytest.raises(SingularityProximityError):
            fd_curl(B, [1.0 + 1e-5, 0.0, 0.0])
        assert_array_equal(fd_curl(B, [0.5, 0.0, 0.0]), [0, 0, 0])


# =============================================================================
# Superposition
# =============================================================================

class TestSuperpose:

    def test_single_field_is_identity(self, rng):
        F = catalog_field("current_wire_B", {"current": 1.0})
        pts = off_axis_points(rng, 10)
        assert_array_equal(superpose([F])(pts), F(pts))

    def test_uniform_fields_add(self):
        u = catalog_field("uniform", {"magnitude": 1.0}, axis_dir=(1, 0, 0))
        w = catalog_field("uniform", {"magnitude": 2.0}, axis_dir=(0, 1, 0))
        assert_allclose(superpose([u, w])([0.3, 0.1, 0.0]), [1, 2, 0])

    def test_opposite_line_charges_cancel(self, rng):
        plus = catalog_field("line_charge_E", {"density": 1.5})
        minus = catalog_field("line_charge_E", {"density": -1.5})
        assert_allclose(superpose([plus, minus])(off_axis_points(rng, 20)), 0.0, atol=1e-15)

    def test_singularity_set_is_the_union(self):
        a = catalog_field("line_charge_E", {"density": 1.0})
        b = catalog_field("point_charge_E", {"charge": 1.0}, axis_point=(2, 0, 0))
        total = superpose([a, b])
        assert len(total.singularities) == 2
        assert total.serializable
        assert [d.kind for d in total.descriptors] == ["line_charge_E", "point_charge_E"]

    def test_custom_field_is_not_serializable(self):
        a = catalog_field("uniform", {"magnitude": 1.0})
        custom = a.from_function(lambda p: p)
        assert not superpose([a, custom]).serializable


# =============================================================================
# Descriptors and rigid motions
# =============================================================================

class TestDescriptors:

    def test_to_dict(self):
        E = catalog_field("line_charge_E", {"density": 2})
        assert E.descriptors[0].to_dict() == {
            "kind": "line_charge_E",
            "params": {"density": 2.0},
            "axis_point": [0.0, 0.0, 0.0],
            "axis_dir": [0.0, 0.0, 1.0],
        }

    def test_negated_flips_strength(self, rng):
        E = catalog_field("line_charge_E", {"density": 2.0})
        pts = off_axis_points(rng, 10)
        assert_array_equal(E.negated()(pts), -E(pts))
        assert E.negated().descriptors[0].params == {"density": -2.0}

    def test_negated_linear(self):
        d = FieldDescriptor("linear", {"m_xy": 1.0, "m_zz": -2.0})
        assert d.negated().params == {"m_xy": -1.0, "m_zz": 2.0}

    @pytest.mark.parametrize("kind, params", [
        ("line_charge_E", {"density": 1.0}),
        ("current_wire_B", {"current": 1.0}),
        ("uniform", {"magnitude": 2.0}),
        ("point_charge_E", {"charge": 1.0}),
        ("linear", {"m_xy": -1.0, "m_yx": 1.0, "m_zz": 0.5}),
    ])
    def test_rotation_is_covariant(self, rng, kind, params):
        R = Rotation.from_rotvec(rng.normal(size=3)).as_matrix()
        F = catalog_field(kind, params, axis_point=(0.2, -0.1, 0.3))
        pts = off_axis_points(rng, 10, r_min=0.8) + np.array([0.2, -0.1, 0.3])
        assert_allclose(F.rotated(R)(pts @ R.T), F(pts) @ R.T, atol=1e-12)


# =============================================================================
# Regions
# =============================================================================

class TestRegions:

    def test_cylinder(self):
        region = Region("cylinder", (0, 0, 0), (0, 0, 1), 0.5)
        assert_array_equal(region.contains([[0.1, 0.2, 9.0], [0.6, 0.0, 0.0]]), [True, False])

    def test_half_space(self):
        region = Region("half_space", (1, 0, 0), (1, 0, 0))
        assert_array_equal(region.contains([[2.0, 0, 0], [0.5, 0, 0]]), [True, False])

    def test_complement_is_closed(self, rng):
        region = Region("cylinder", (0, 0, 0), (1, 1, 0), 0.3)
        pts = rng.normal(size=(50, 3))
        assert_array_equal(region.complement().contains(pts), ~region.contains(pts))
        assert region.complement().complement() == region

    def test_empty_region(self, rng):
        assert not np.any(Region.empty().contains(rng.normal(size=(20, 3))))

    def test_bad_regions(self):
        with pytest.raises(FieldCatalogError):
            Region("sphere")
        with pytest.raises(FieldCatalogError):
            Region("cylinder", radius=0.0)
        with pytest.raises(FieldCatalogError):
            Region("complement")

    def test_default_region_follows_first_axis(self):
        wire = catalog_field("line_charge_E", {"density": 1.0}, axis_point=(1, 0, 0))
        region = default_excluded_region([catalog_field("uniform", {"magnitude": 1.0}), wire], 0.05)
        assert region.kind == "cylinder"
        assert region.radius == 0.05
        assert region.point == (1.0, 0.0, 0.0)

    def test_default_region_wraps_solenoid_shell(self):
        B = catalog_field("solenoid_B", {"field": 1.0, "radius": 0.5})
        assert default_excluded_region([B], 0.05).radius == pytest.approx(0.55)

    def test_default_region_without_singularities_is_empty(self):
        region = default_excluded_region([catalog_field("uniform", {"magnitude": 1.0})], 0.05)
        assert region.to_dict() == {"kind": "complement", "inner": {"kind": "all_space"}}

    def test_line_singularity_segment_distance(self):
        line = LineSingularity((0.0, 0.0, 0.0), (0.0, 0.0, 1.0))
        gap = line.segment_distance(np.array([[-1.0, 0.5, 0.0]]), np.array([[1.0, 0.5, 3.0]]))
        assert_allclose(gap, [0.5])

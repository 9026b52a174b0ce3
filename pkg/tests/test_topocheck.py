"""
Topological-condition checks and classification.
"""

import json

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from conftest import WIRE_PHASE, uniform, uniform_scenario, wire_scenario
from core.errors import PhaseError, TubeIntersectionError
from core.fieldlab import catalog_field
from core.paths import circle, half_circle
from core.rules import DYNAMICAL_CONTAMINATED, NON_TOPOLOGICAL, TOPOLOGICAL, TRIVIAL
from core.scenario import ParticleProperties, load_scenario, make_scenario, rotate_scenario
from core.veccalc import FDParams
from physics.phase import phase_vector_field, stokes_check
from physics.topocheck import (
    check_arm_balance,
    check_curl_free_tube,
    check_mass_condition,
    check_orthogonality,
    classify,
)


# =============================================================================
# Orthogonality
# =============================================================================

class TestOrthogonality:

    def test_wire_loop_is_orthogonal(self, wire):
        result = check_orthogonality(wire, wire.path("loop"), 64)
        assert result.v_perp_B.passed and result.v_perp_E.passed
        assert result.v_perp_B.value < 1e-12
        assert result.v_perp_E.value < 1e-12

    def test_tilted_loop_has_velocity_along_B(self, scenario_file):
        s = load_scenario(scenario_file("tilted"))
        result = check_orthogonality(s, s.path("loop"), 64)
        assert not result.v_perp_B.passed
        assert result.v_perp_B.value > 0.1

    def test_vanishing_field_is_vacuous(self):
        s = uniform_scenario(E=(0, 0, 0))
        result = check_orthogonality(s, s.path("loop"), 16)
        assert result.v_perp_E.passed and result.v_perp_E.vacuous
        assert not result.v_perp_B.vacuous

    def test_needs_two_samples(self, wire):
        with pytest.raises(ValueError):
            check_orthogonality(wire, wire.path("loop"), 1)


# =============================================================================
# Mass condition
# =============================================================================

class TestMassCondition:

    def test_weak_coupling_passes(self, wire):
        outcome = check_mass_condition(wire, wire.path("loop"))
        assert outcome.passed
        assert outcome.value == pytest.approx(9e-3)

    def test_strong_coupling_fails(self):
        s = wire_scenario(alpha=1.0)
        outcome = check_mass_condition(s, s.path("loop"))
        assert not outcome.passed
        assert outcome.value == pytest.approx(9.0)

    def test_no_magnetic_field(self):
        s = uniform_scenario(B=(0, 0, 0), alpha=1.0)
        assert check_mass_condition(s, s.path("loop")).value == 0.0


# =============================================================================
# Curl-free tube
# =============================================================================

class TestCurlFreeTube:

    def test_wire_tube_is_curl_free(self, wire):
        outcome = check_curl_free_tube(phase_vector_field(wire), wire.path("loop"), 0.2, 32)
        assert outcome.passed
        assert outcome.value < 1e-6

    def test_rotational_phase_field_fails(self):
        # T = (-y, x, 0) has curl (0, 0, 2)
        E = catalog_field("linear", {"m_xx": 1.0, "m_yy": 1.0})
        s = make_scenario(ParticleProperties(mass=1.0, alpha=1.0), E, uniform((0, 0, 1)), [circle("loop")])
        outcome = check_curl_free_tube(phase_vector_field(s), s.path("loop"), 0.2, 16)
        assert not outcome.passed
        assert outcome.value == pytest.approx(2.0, rel=1e-6)

    def test_zero_phase_field(self):
        s = uniform_scenario(E=(0, 0, 0))
        outcome = check_curl_free_tube(phase_vector_field(s), s.path("loop"), 0.2, 16)
        assert outcome.passed and outcome.vacuous

    def test_tube_reaching_the_wire(self, wire):
        with pytest.raises(TubeIntersectionError):
            check_curl_free_tube(phase_vector_field(wire), wire.path("loop"), 1.5, 16)


# =============================================================================
# Arm balance
# =============================================================================

class TestArmBalance:

    def test_mirror_arms_balance(self, wire):
        outcome, arms = check_arm_balance(wire)
        assert outcome.passed
        assert arms[0].difference == pytest.approx(0.0, abs=1e-12)

    def test_unequal_radii(self, scenario_file):
        outcome, arms = check_arm_balance(load_scenario(scenario_file("unequal_arms")))
        assert not outcome.passed
        assert outcome.path == "inner/outer"
        assert arms[0].ratio == pytest.approx(2.0, rel=1e-6)

    def test_no_arms_is_vacuous(self):
        outcome, arms = check_arm_balance(uniform_scenario())
        assert outcome.passed and outcome.vacuous
        assert arms == ()


# =============================================================================
# Classification
# =============================================================================

class TestClassify:

    def test_wire_is_topological(self, wire):
        report = classify(wire)
        assert report.classification == TOPOLOGICAL
        assert report.enclosed_flux == pytest.approx(WIRE_PHASE, abs=1e-9)
        assert report.reference_path == "loop"
        assert report.failed() == []

    @pytest.mark.parametrize("name, expected", [
        ("wire_hmw", TOPOLOGICAL),
        ("uniform", TRIVIAL),
        ("tilted", NON_TOPOLOGICAL),
        ("unequal_arms", DYNAMICAL_CONTAMINATED),
        ("current_wire", TRIVIAL),
    ])
    def test_bundled_scenarios(self, scenario_file, name, expected):
        assert classify(load_scenario(scenario_file(name))).classification == expected

    def test_tilted_names_the_failing_condition(self, scenario_file):
        report = classify(load_scenario(scenario_file("tilted")))
        assert "v_perp_B" in report.failed()

    def test_axial_electric_field_keeps_the_phase_topological(self):
        s = wire_scenario(extra_E=[uniform((0, 0, 0.5))])
        report = classify(s)
        assert report.classification == TOPOLOGICAL
        assert report.enclosed_flux == pytest.approx(WIRE_PHASE, abs=1e-9)

    def test_loop_inside_the_default_tube_radius(self, caplog):
        s = wire_scenario(loop=circle("loop", radius=0.1))
        with caplog.at_level("INFO", logger="physics.topocheck"):
            report = classify(s, p=FDParams(order=4))
        assert report.classification == TOPOLOGICAL
        assert report.enclosed_flux == pytest.approx(WIRE_PHASE, abs=1e-9)
        assert "narrowed from 0.2 to 0.05" in caplog.text

    def test_strong_coupling_is_not_topological(self):
        report = classify(wire_scenario(alpha=1.0))
        assert report.classification == NON_TOPOLOGICAL
        assert report.failed() == ["mass_condition"]

    def test_flux_scales_with_alpha(self):
        report = classify(wire_scenario(alpha=5e-4))
        assert report.classification == TOPOLOGICAL
        assert report.enclosed_flux == pytest.approx(WIRE_PHASE / 2.0, abs=1e-9)

    def test_needs_a_closed_path(self, wire):
        s = make_scenario(wire.particle, wire.E, wire.B, [half_circle("upper"), half_circle("lower", upper=False)])
        with pytest.raises(PhaseError):
            classify(s)

    def test_rotation_invariance(self, wire, rng):
        for _ in range(10):
            R = Rotation.from_rotvec(rng.normal(size=3)).as_matrix()
            report = classify(rotate_scenario(wire, R))
            assert report.classification == TOPOLOGICAL
            assert report.enclosed_flux == pytest.approx(WIRE_PHASE, abs=1e-9)

    def test_arm_difference_is_the_enclosed_flux(self, wire):
        report = classify(wire)
        result = stokes_check(phase_vector_field(wire), wire.path("upper"), wire.path("lower"))
        assert result.phase_diff == pytest.approx(report.enclosed_flux, abs=2e-9)

    def test_reports(self, wire):
        report = classify(wire)
        text = report.to_flat_text()
        assert "classification: topological\n" in text
        assert "v_perp_B: pass\n" in text
        assert "arm.0: upper" in text
        d = json.loads(json.dumps(report.to_dict()))
        assert d["classification"] == "topological"
        assert d["mass_condition"]["passed"] is True
        assert len(d["arm_phases"]) == 1

    def test_deterministic(self, wire):
        assert classify(wire).to_flat_text() == classify(wire).to_flat_text()

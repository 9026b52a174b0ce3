"""
core/rules.py

Shared constants and definitions for topophase.
Used by the field catalog, scenario loader, phase engine and CLI.

Natural units throughout: c = hbar = 1, Heaviside-Lorentz fields.
"""

import math


# ---------------------------------------------------------
# FIELD CATALOG KINDS
# ---------------------------------------------------------

UNIFORM = "uniform"
LINE_CHARGE_E = "line_charge_E"
CURRENT_WIRE_B = "current_wire_B"
MONOPOLE_LINE_B = "monopole_line_B"
SOLENOID_B = "solenoid_B"
POINT_CHARGE_E = "point_charge_E"
POINT_MONOPOLE_B = "point_monopole_B"
LINEAR = "linear"

# Parameter names accepted by each kind (all reals)
LINEAR_KEYS = tuple(f"m_{r}{c}" for r in "xyz" for c in "xyz")

FIELD_PARAMS = {
    UNIFORM:          ("magnitude",),
    LINE_CHARGE_E:    ("density",),
    CURRENT_WIRE_B:   ("current",),
    MONOPOLE_LINE_B:  ("density",),
    SOLENOID_B:       ("field", "radius"),
    POINT_CHARGE_E:   ("charge",),
    POINT_MONOPOLE_B: ("charge",),
    LINEAR:           LINEAR_KEYS,
}

# Strength parameter flipped when a field is negated
STRENGTH_PARAM = {
    UNIFORM:          "magnitude",
    LINE_CHARGE_E:    "density",
    CURRENT_WIRE_B:   "current",
    MONOPOLE_LINE_B:  "density",
    SOLENOID_B:       "field",
    POINT_CHARGE_E:   "charge",
    POINT_MONOPOLE_B: "charge",
}

# Electric <-> magnetic images used by the HMW/AC duality map.
# Kinds missing here have no counterpart on the other side.
E_TO_B_KIND = {
    UNIFORM:        UNIFORM,
    LINEAR:         LINEAR,
    LINE_CHARGE_E:  MONOPOLE_LINE_B,
    POINT_CHARGE_E: POINT_MONOPOLE_B,
}
B_TO_E_KIND = {b: e for e, b in E_TO_B_KIND.items()}


# ---------------------------------------------------------
# PHASE KINDS
# ---------------------------------------------------------

HMW_INDUCED = "hmw_induced"
AC_INDUCED = "ac_induced"
PERMANENT_ELECTRIC = "permanent_electric"

PHASE_KINDS = (HMW_INDUCED, AC_INDUCED, PERMANENT_ELECTRIC)
DEFAULT_PHASE_KIND = HMW_INDUCED

DUAL_PHASE_KIND = {
    HMW_INDUCED: AC_INDUCED,
    AC_INDUCED: HMW_INDUCED,
}


# ---------------------------------------------------------
# REGION KINDS
# ---------------------------------------------------------

CYLINDER = "cylinder"
HALF_SPACE = "half_space"
ALL_SPACE = "all_space"
COMPLEMENT = "complement"

REGION_KINDS = (CYLINDER, HALF_SPACE, ALL_SPACE, COMPLEMENT)

DEFAULT_EXCLUDED_RADIUS = 0.05


# ---------------------------------------------------------
# NUMERICS
# ---------------------------------------------------------

FD_REL_STEP = 1e-4          # h = FD_REL_STEP * (1 + |x|)
FD_DEFAULT_ORDER = 2
FD_ORDERS = (2, 4)

QUAD_TOL = 1e-9             # absolute
QUAD_MAX_DEPTH = 50
QUAD_MIN_DEPTH = 3
QUAD_MAX_SUBDIVISIONS = 200_000
QUAD_MIN_PANELS = 16

GAUSS_ORDER = 8
STOKES_PATCHES = 32

SINGULARITY_MARGIN = 1e-9       # paths closer than this hit a singularity
PATH_SAMPLES = 4096             # polyline resolution for geometric checks
SEAM_TOL = 1e-9
ENDPOINT_TOL = 1e-9
SPIN_UNIT_TOL = 1e-9
CONSISTENCY_RTOL = 1e-10


# ---------------------------------------------------------
# TOPOLOGY THRESHOLDS (overridable under the scenario `checks` key)
# ---------------------------------------------------------

DEFAULT_CHECKS = {
    "orthogonality": 1e-6,    # max |cos| between v and field
    "mass_ratio":    1e-2,    # max alpha B^2 / m
    "curl_relative": 1e-5,    # curl threshold relative to |T| scale
    "flux":          1e-8,    # |enclosed flux| below this is trivial
    "arm_balance":   1e-6,    # relative dynamical-phase mismatch
    "n_samples":     64,
    "tube_radius":   0.2,
    "tol":           QUAD_TOL,
}

VANISHING_FIELD = 1e-12       # relative to the field scale along the path
TUBE_RING_POINTS = 8

# Classifications
TOPOLOGICAL = "topological"
DYNAMICAL_CONTAMINATED = "dynamical-contaminated"
TRIVIAL = "trivial"
NON_TOPOLOGICAL = "non-topological"


# ---------------------------------------------------------
# ACCURACY PRESETS
# ---------------------------------------------------------

ACCURACY_PRESETS = {
    'fast': {
        'fd_order': 2,
        'tol': 1e-7,
        'description': 'Quick look - order-2 stencils, loose quadrature'
    },
    'standard': {
        'fd_order': 2,
        'tol': QUAD_TOL,
        'description': 'Default - order-2 stencils, 1e-9 quadrature'
    },
    'acceptance': {
        'fd_order': 4,
        'tol': 1e-11,
        'description': 'Acceptance runs - order-4 stencils, 1e-11 quadrature'
    }
}

DEFAULT_PRESET = 'standard'


# ---------------------------------------------------------
# DOCUMENT FORMAT
# ---------------------------------------------------------

DOCUMENT_VERSION = "1.0"
TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------
# HELPERS
# ---------------------------------------------------------

def preset(name):
    """Settings dict for an accuracy preset (case-insensitive)."""
    key = name.lower()
    if key not in ACCURACY_PRESETS:
        raise KeyError(f"unknown preset '{name}' (choose from {', '.join(ACCURACY_PRESETS)})")
    return ACCURACY_PRESETS[key]


def is_electric_kind(kind):
    return kind.endswith("_E")


def is_magnetic_kind(kind):
    return kind.endswith("_B")

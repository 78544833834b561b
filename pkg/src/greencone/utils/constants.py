import math
from fractions import Fraction
from pathlib import Path

TOOL_VERSION = "0.1.0"
OUTPUT_FOLDER = Path("greencone_output")

# Catalogued drift values of the second-order problem.
B_ZERO = 0.0
B_GOLDEN_POS = math.log(2.0 + math.sqrt(5.0))
B_GOLDEN_NEG = math.log(math.sqrt(5.0) - 2.0)
B_MINUS_TWO_PI = -2.0 * math.pi
DRIFT_MATCH_RTOL = 1e-12
# |B| above which the second-order kernel switches to the overflow-free form.
STABLE_DRIFT = 30.0
# |B| below which the drift-free formulas are used.
SMALL_DRIFT = 1e-10
# Closed-form envelopes exist for B in this range (plus B = -2*pi).
CLOSED_FORM_DRIFT_RANGE = (-2.0, 2.0)

# B = -2*pi lower-bound envelope.
MINUS_TWO_PI_SCALE = Fraction(250000, 62037)
MINUS_TWO_PI_EXPONENT = Fraction(-451, 500)
MINUS_TWO_PI_B1 = 0.9151

# Quadrature
QUADRATURE_TOL = 1e-13
QUADRATURE_LIMIT = 200

# Envelope
ENVELOPE_S_POINTS = 256
ENVELOPE_T_POINTS = 4096
ENVELOPE_MIN_POINTS = 64
GOLDEN_TOL = 1e-10
T3_TOL = 1e-12

# Spectrum
ROOT_XTOL = 1e-14
LAMBDA1_SCAN_STEP = 1e-2
LAMBDA2_BRACKET_EPS = 1e-6

# Hypotheses
HYPOTHESIS_GRID_POINTS = 512
HYPOTHESIS_REFINE_SWEEPS = 3
# offset off a jump boundary, relative to the boundary value
JUMP_EDGE_RTOL = 1e-12
MARGIN_RTOL = 1e-10
CONTINUITY_RTOL = 1e-9
CONTINUITY_T_SAMPLES = 50
LIMIT_PROBE_COUNT = 40
LIMIT_DIVERGENCE = 1e8
LIMIT_VANISHING = 1e-8
LIMIT_TAIL = 10

# Solver
SOLVER_NODES = 256
SOLVER_PANEL_ORDER = 8
SOLVER_PIECE_ORDER = 8
SOLVER_MIN_NODES = 32
SOLVER_TOL = 1e-9
SOLVER_SEEDS = 24
# extra seeds spread across each threshold band
BAND_SEEDS = 16
# deflated restarts per round, and rounds without a new solution before stopping
DEFLATION_SEEDS = 12
DEFLATION_ROUNDS = 2
DEFLATION_SHIFT = 1.0
NEWTON_MAX_ITER = 100
NEWTON_HALVINGS = 30
PICARD_ITER = 200
JACOBIAN_STEP = 1e-7
DEDUP_RTOL = 1e-4
DIVERGENCE_CAP = 1e12
BRANCH_REFINE_ROUNDS = 3
ODE_STEP_SECOND = 1e-3
ODE_STEP_FOURTH = 5e-3
ODE_SAMPLES = 64
BC_STEP = 1e-4
CONE_TOL = 1e-8

# Certified rational floors, keyed by catalog regime.
CERTIFIED_FLOORS = {
    "golden": {
        "K1": Fraction(1, 2),
        "int_phi_i1": Fraction(957, 10000),
        "int_k1_phi_i1": Fraction(3587, 100000),
    },
    "minus-two-pi": {
        "K1": Fraction(47, 125),
        "int_phi_i1": Fraction(43, 2500),
        "int_k1_phi_i1": Fraction(539, 100000),
    },
}

# Exact values used as oracles.
EXACT_CONSTANTS = {
    "second-order-b0": {
        "int_phi": Fraction(1, 6),
        "int_phi_i1": Fraction(11, 96),
        "int_k1_phi_i1": Fraction(67, 1536),
    },
    "fourth-order": {
        "int_phi": Fraction(1, 30),
        "int_phi_i1": Fraction(47, 2430),
        "int_k1_phi_i1": Fraction(462461, 470292480),
    },
}

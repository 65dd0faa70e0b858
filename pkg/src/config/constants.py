"""
Numeric constants shared by the spline, inversion and solver modules.
"""

# ==================== SPLINES ====================

# Even first gaps covered by the triplet pattern scan.
PATTERN_DELTA1_VALUES = (2, 4, 6, 8)
PATTERN_SCAN_LIMIT = 1000

# Slack allowed for a negative b under the square root of the inverse spline.
INVERSE_B_SLACK = 1e-12

# Number of +-1 steps locate_segment takes from floor(li(x)) before bisecting.
LOCATE_MAX_STEPS = 64

# ==================== ASYMPTOTE SEWING ====================

# Length (index units) over which the slope correction of the sewn asymptote fades.
SEWING_SLOPE_DECAY = 10.0

# ==================== NEWTON INVERSION ====================

NEWTON_EPS0_LADDER = (1e-6, 1e-3, 1e-1, 1.0, 10.0)
NEWTON_TOL_RESID = 1e-10
NEWTON_DIVISION_GUARD = 1e-300

# ==================== DIOPHANTINE SOLVER ====================

RGN_EPS0_TABLE = (1e-4, 1e-2, 1.0, 1e2)
RGN_TOL_F = 1e-10
RGN_TOL_STEP = 1e-12
RGN_MAX_EXTRACTIONS = 20
EXTRACTOR_CAP = 1e12
DEDUP_RADIUS = 1e-6
SVD_RELATIVE_CUTOFF = 1e-12
ROUND_TOLERANCE = 1e-3

# ==================== ANALYSIS ====================

VARIANCE_DEFAULT_EPS_FRACTION = 0.25
PEAK_GRID_STEP = 1e-3

# Index window of the A(x) variance plot covering the primes 907..997.
VARIANCE_A_WINDOW = (154.78, 168.2)

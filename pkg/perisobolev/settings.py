"""
Default settings for perisobolev.

Every tolerance, quadrature depth and line-search constant used by the
numerical modules lives here so that a run can be reproduced from its
configuration file plus this module.
"""

PROJECT_NAME = 'perisobolev'

# Luxemburg bisection
LUXEMBURG_RTOL = 1e-10
LUXEMBURG_MAX_ITER = 200
MODULAR_AT_NORM_TOL = 1e-8

# Singular quadrature
QUAD_LEVELS = 12
QUAD_POINTS_PER_LEVEL = 6
QUAD_FAR_LEVELS = 24
QUAD_ANGLES = 32
QUAD_FLAG_RTOL = 1e-3
TAIL_FLAG_RTOL = 1e-6

# Probe lattice used by exponent validation
PROBE_POINTS_PER_AXIS = 9
PROBE_HALF_WIDTH = 2.0

# Mollifier resolution: eps must cover this many grid spacings
MOLLIFIER_MIN_CELLS = 2.0

# Dirichlet solver
SOLVER_TOL = 1e-9
SOLVER_MAX_ITER = 20000
SOLVER_STAGNATION_RTOL = 1e-12
SOLVER_STAGNATION_WINDOW = 10
SOLVER_MU_FACTOR = 1e-10
SOLVER_GRADIENT_CHECK_EVERY = 50
SOLVER_COMPOSITION = 'inverse_p'

# Armijo backtracking
ARMIJO_C = 1e-4
ARMIJO_TAU = 0.5
ARMIJO_MAX_BACKTRACKS = 60

# Eigen solver
EIGEN_TOL = 1e-6
EIGEN_MAX_ITER = 5000
EIGEN_STEP_MAX = 1.0

# Check thresholds
MONOTONICITY_RTOL = 1e-6
LEMMA_BOUND_RTOL = 1e-6
BBM_RTOL = 0.01
BBM_S_RTOL = 0.03
LIMINF_RTOL = 0.05
GAMMA_RTOL = 0.05
DELTA_STUDY_RTOL = 0.05
DELTA_STUDY_STEP_TOL = 1e-9

# Output
CSV_DIGITS = 17
FLOAT_FORMAT = '.17g'
THREADS = 1

LOG_LEVEL = 'INFO'
LOG_FORMAT = '%(asctime)s [%(name)s] %(levelname)s: %(message)s'
LOG_DATEFORMAT = '%Y-%m-%d %H:%M:%S'

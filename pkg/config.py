import os

# experiment presets and scenario fixtures
EXPERIMENTS_ROOT = "experiments"
SCENARIO_ROOT = os.path.join(EXPERIMENTS_ROOT, "scenarios")

# domain tags for measures
SPACE = "space"
TIME = "time"

# a transported point this close to x=1 has left the factory
POSITION_TOL = 1e-12

# residual maxima below this are reported as exact
RESIDUAL_FLOOR = 1e-10

# fixed-point defects below this are roundoff, not contraction
DEFECT_FLOOR = 1e-13

# the window safety cap is ceil(T / t00) + N1 + N2 + WINDOW_CAP_SLACK
WINDOW_CAP_SLACK = 4

# CSV / JSON float format, 17 significant digits
FLOAT_FMT = "%.17g"

# exit codes of the command line
EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT_ERROR = 2

NORMALIZATION_TOLERANCE = 1e-12
FIXED_POINT_TOLERANCE = 1e-10
RATIO_TOLERANCE = 1e-12

DEFAULT_SUBGROUP_CAP = 24
DEFAULT_SYMMETRIC_CAP = 720
EXHAUSTIVE_SUBGROUP_CAP = 8

DEFAULT_OUTCOME_CAP = 10**5
DEFAULT_MONITOR_OUTCOME_CAP = 10**3
DEFAULT_DISTRIBUTION_CAP = 10**6

DEFAULT_A1_SAMPLES = 10**4
DEFAULT_EXCLUSION_RADIUS = 1e-3
DEFAULT_A2_RADII = (1e-1, 1e-2, 1e-3, 1e-4)
DEFAULT_A2_SAMPLES_PER_RADIUS = 1000
DEFAULT_A2_MARGIN = 1e-3
DEFAULT_A3_HORIZON = 1000

DEFAULT_MONITOR_WINDOW = 200
DEFAULT_MONITOR_CHECKPOINTS = 20
DEFAULT_CONVERGENCE_THRESHOLD = 0.02
DEFAULT_VERDICT_WINDOW = 10
MIN_DRIFT_REPLICATES = 100
SIGMA_BAND = 3.0

RNG_NAME = "PCG64"
SAMPLER_NAME = "numpy.random.Generator.multinomial"

TRAJECTORY_SUFFIX = ".csv"
SUMMARY_FILE = "summary.yml"
DRIFT_SUFFIX = ".drift.csv"

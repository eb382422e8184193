"""Constants used throughout the calculus engine"""

# Report format
SCHEMA_VERSION = 1

# Logging (same layout as every log file the tools write)
LOG_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'
LOG_DATEFMT = '%Y-%m-%d %H:%M:%S'

# Window defaults
DEFAULT_WEIGHT_BOUND = 4      # W: largest stored internal weight
DEFAULT_ARITY_BOUND = 4       # N: largest chain arity for finite algebras
DEFAULT_U_BOUND = 3           # U: largest power of u kept in CC^-
DEFAULT_U_NEG_BOUND = 3       # P: largest power of u^-1 kept in CC^per
DEFAULT_ARITY_K = 4           # K: L-infinity Taylor arity bound

# Polyvector fields and forms on Q^n
DEFAULT_POLY_CUTOFF = 6       # largest coefficient degree kept by the truncated calculus
DEFAULT_SAMPLE_DEGREE = 2     # coefficient degree of sampled polyvectors and forms

# Randomized suites
DEFAULT_SEED = 7
DEFAULT_TRIALS = 100
RANDOM_COEFFICIENTS = (-2, -1, 1, 2, 3)   # nonzero rationals used by samplers
RANDOM_TERMS = 3                          # basis terms per random element

# Built-in test rings: Q[e]/(e^n) for n <= MAX_TRUNCATED_POLY
MAX_TRUNCATED_POLY = 8

# Catalog names
CATALOG_ALGEBRAS = ('Q', 'K2', 'Q[x]', 'Q[x,y]', 'Q[x,y,z]')
CATALOG_CY_DIMENSION = {
    'Q': 0,
    'Q[x]': 1,
    'Q[x,y]': 2,
    'Q[x,y,z]': 3,
}
VARIABLE_NAMES = ('x', 'y', 'z', 'w', 'v', 't')

# Exit codes
EXIT_OK = 0
EXIT_ASSERTION_FAILED = 1
EXIT_CONFIG_ERROR = 2

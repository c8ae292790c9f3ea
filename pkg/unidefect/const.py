"""Define package constants."""
import logging

LOGGER = logging.getLogger(__package__)

# Rank decisions:
DEFAULT_REL_TOL = 1e-11
DEFAULT_GAP_WARNING = 1e3

# Unitarity checks:
DEFAULT_UNITARITY_TOL = 1e-10
DEFAULT_INPUT_UNITARITY_TOL = 1e-8
DEFAULT_FAMILY_TOL = 1e-10

# Entries below this modulus count as zeros of U:
DEFAULT_ZERO_TOL = 1e-12

# Near-zero basis entries are rounded to exact zeros below this:
DEFAULT_BASIS_CHOP = 1e-12

# The SVD of M for F_64 is 4096 x 4032; anything bigger is refused:
MAX_NUMERIC_FOURIER_SIZE = 64

DEFAULT_FD_STEP = 1e-6
DEFAULT_COMPLETENESS_RADIUS = 0.1
DEFAULT_MAX_WORKERS = 4

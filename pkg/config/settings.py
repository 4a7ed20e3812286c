# config/settings.py
"""Configuration settings for the batch-LPN reduction toolkit"""

import os

from dotenv import load_dotenv

load_dotenv()

TOOL_NAME = "batch-lpn"
TOOL_VERSION = "1.0.0"

# Logging Configuration
LOGGING_LEVEL = os.getenv("BATCH_LPN_LOG_LEVEL", "INFO")
LOGGING_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

# Randomness
DEFAULT_SEED = int(os.getenv("BATCH_LPN_SEED", "20240101"))

# Arithmetic modes
RATIONAL_MODE = "rational"
FLOAT_MODE = "float"
FLOAT_TOLERANCE = 1e-12

# Exact-table size guards, expressed as the exponent (n+1)k
TARGET_SIZE_GUARD = 24
ORACLE_SIZE_GUARD = 16
LEMMA2_MAX_K = 12

# Closed-form B^-1 is cross-checked against Gaussian elimination up to this k
ELIMINATION_CROSSCHECK_MAX_K = 5

# Statistical verification
DEFAULT_SIGNIFICANCE = float(os.getenv("BATCH_LPN_SIGNIFICANCE", "1e-3"))
CHI_SQUARE_MIN_EXPECTED = 5
UNIFORMITY_LOW_BITS = 8
DEFAULT_NUM_BATCHES = 1_000_000

# The vectorised sampling path packs u-vectors into uint64 words
MAX_PACKED_DIMENSION = 62

# CLI exit codes
EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_PRECONDITION = 2

MANIFEST_SUFFIX = ".manifest.json"

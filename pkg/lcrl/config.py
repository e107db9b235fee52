import os
from pathlib import Path

import dotenv

dotenv.load_dotenv()

PACKAGE_ROOT = Path(__file__).resolve().parent
DATA_DIR = Path(os.getenv("LCRL_DATA_DIR", PACKAGE_ROOT.parent / "data"))
LOG_DIR = os.getenv("LCRL_LOG_DIR", "logs")
LOG_LEVEL = os.getenv("LCRL_LOG_LEVEL", "INFO")

# learning (the slippery grid experiments run with mu = gamma = 0.9)
DEFAULT_MU = 0.9
DEFAULT_GAMMA = 0.9
DEFAULT_RP = 1.0
DEFAULT_EPISODES = 200
DEFAULT_IT_THRESHOLD = 1000
DEFAULT_EPSILON0 = 1.0

# outer loop stops once the max |dQ| stays below CONVERGENCE_TOL for a window of episodes
CONVERGENCE_WINDOW = 30
CONVERGENCE_TOL = 1e-4

PSP_TOL = 1e-6
ORACLE_TOL = 1e-10
MAX_SWEEPS = 1_000_000

MAX_ENUMERATED_STATES = 200_000
MAX_PRODUCT_STATES = 1_000_000

DEFAULT_SLIP = 0.85
DEFAULT_GHOST_CHASE = 0.9

EVAL_RUNS = 1000
EVAL_HORIZON = 200

CSV_VERSION_LINE = "# lcrl-csv v1"

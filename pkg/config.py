import os

from dotenv import load_dotenv

# Absolute path to project root
# (a stable anchor for all file paths)
basedir = os.path.abspath(os.path.dirname(__file__))

# optional .env next to this file; real environment wins
load_dotenv(os.path.join(basedir, ".env"))


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    return int(float(raw))


def _env_float(name: str, default: float) -> float:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    return float(raw)


class Config:
    # Monte Carlo fan-out. Output never depends on this value.
    WORKERS = _env_int("PACKLAB_WORKERS", os.cpu_count() or 1)

    # Exact DP memo size before giving up (StateSpaceTooLarge)
    DP_STATE_CAP = _env_int("PACKLAB_DP_STATE_CAP", 10**7)

    # Max leaves of an explicit policy tree
    TREE_LEAF_CAP = _env_int("PACKLAB_TREE_LEAF_CAP", 10**6)

    # Brute-force search over budgeted policies only for short sequences
    BUDGETED_MAX_ITEMS = _env_int("PACKLAB_BUDGETED_MAX_ITEMS", 8)

    # Reachable usage values for the single-bin DP
    USAGE_SET_CAP = _env_int("PACKLAB_USAGE_SET_CAP", 10**5)

    # Discounted MDP used for threshold extraction
    MDP_STATE_CAP = _env_int("PACKLAB_MDP_STATE_CAP", 10**5)
    MDP_DISCOUNT = _env_float("PACKLAB_MDP_DISCOUNT", 0.999)
    MDP_TOL = _env_float("PACKLAB_MDP_TOL", 1e-10)

    # Overflow penalty of reduction instances (anything > 2 works)
    REDUCTION_PENALTY = _env_int("PACKLAB_REDUCTION_PENALTY", 10)

    # Above this horizon the single-bin reference runs in floats
    EXACT_SINGLE_BIN_MAX_N = _env_int("PACKLAB_EXACT_SINGLE_BIN_MAX_N", 400)

    LOG_LEVEL = os.getenv("PACKLAB_LOG_LEVEL", "INFO")

    # Where CLI reports go when no explicit path is given
    OUTPUT_DIR = os.getenv("PACKLAB_OUTPUT_DIR", os.path.join(basedir, "runs"))

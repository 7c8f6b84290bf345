import sys
from pathlib import Path

import numpy as np
import pytest

from gbqeval.core import ScoreVector, zscore_l2_normalize, STATE_GROUND_TRUTH

TESTS_DIR = Path(__file__).parent
REPO_ROOT = TESTS_DIR.parent
REPLAY_DIR = REPO_ROOT / "fixtures" / "replay"

sys.path.insert(0, str(TESTS_DIR))  # make tests/oracles.py importable


def make_scores(values, ids=None, state="normalized"):
    values = np.asarray(values, dtype=float)
    if ids is None:
        ids = tuple(f"g{i + 1}" for i in range(len(values)))
    return ScoreVector(tuple(ids), values, state)


def random_normalized(rng, g, state="normalized"):
    """A non-degenerate normalized score vector of size g."""
    while True:
        raw = make_scores(rng.standard_normal(g), state="raw")
        out = zscore_l2_normalize(raw, state=state)
        if not out.degenerate:
            return out


def random_ground_truth(rng, g):
    return random_normalized(rng, g, state=STATE_GROUND_TRUTH)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)

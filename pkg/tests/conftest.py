import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def mean_gap_ratio(levels: np.ndarray) -> float:
    """Mean consecutive-gap-ratio statistic min(s_i, s_i+1)/max(s_i, s_i+1)."""
    s = np.diff(np.sort(levels))
    s = s[s > 0]
    return float(np.mean(np.minimum(s[1:], s[:-1]) / np.maximum(s[1:], s[:-1])))


def l1_histogram_distance(samples, density, lo, hi, bins=20):
    """L1 distance between a sample histogram and a reference density."""
    counts, edges = np.histogram(samples, bins=bins, range=(lo, hi), density=True)
    centers = 0.5 * (edges[1:] + edges[:-1])
    ref = np.array([density(x) for x in centers])
    width = edges[1] - edges[0]
    return float(np.sum(np.abs(counts - ref)) * width)

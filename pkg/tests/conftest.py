"""Shared test helpers: z-score assertions and payload normalization."""

import math

import numpy as np
import pytest


def z_ok(value, expected, stderr, k=3.0):
    """True iff |value - expected| <= k * stderr (stochastic tolerance)."""
    return abs(value - expected) <= k * max(stderr, 1e-300)


def assert_within(value, expected, stderr, k=3.0, label=""):
    z = (value - expected) / max(stderr, 1e-300)
    assert abs(z) <= k, (
        f"{label}: {value!r} vs expected {expected!r} is {z:.2f} stderr away "
        f"(stderr {stderr:.3g}, allowed {k})")


def strip_wall_times(obj):
    """Drop every wall-time field so deterministic payloads compare equal."""
    if isinstance(obj, dict):
        return {k: strip_wall_times(v) for k, v in obj.items()
                if k != "wall_time"}
    if isinstance(obj, list):
        return [strip_wall_times(v) for v in obj]
    return obj


@pytest.fixture
def rng():
    return np.random.default_rng(12345)

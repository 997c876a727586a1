from __future__ import annotations

import numpy as np
import pytest

from steerlab.game import GameInstance


def random_game(rng: np.random.Generator, m: int, n: int,
                low: float = -5.0, high: float = 5.0) -> GameInstance:
    return GameInstance(A=rng.uniform(low, high, size=(m, n)),
                        B=rng.uniform(low, high, size=(m, n)))


def random_simplex_points(rng: np.random.Generator, count: int, dim: int) -> np.ndarray:
    """Uniform samples on the simplex via normalized exponentials."""
    raw = rng.exponential(1.0, size=(count, dim))
    return raw / raw.sum(axis=1, keepdims=True)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260810)

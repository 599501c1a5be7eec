"""Two-Gaussian binary classification split into equal, disjoint client shards."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SyntheticDataset:
    x: np.ndarray
    y: np.ndarray
    x_test: np.ndarray
    y_test: np.ndarray
    shards: list[np.ndarray]  # index arrays into x / y

    def shard(self, k: int) -> tuple[np.ndarray, np.ndarray]:
        idx = self.shards[k]
        return self.x[idx], self.y[idx]


def make_dataset(
    n_clients: int,
    seed: int,
    samples: int = 2048,
    n_features: int = 16,
    separation: float = 1.5,
    test_samples: int = 512,
) -> SyntheticDataset:
    if n_clients < 1 or samples < n_clients:
        raise ValueError("need at least one sample per client")
    rng = np.random.default_rng(seed)
    direction = rng.normal(size=n_features)
    direction *= separation / (2 * np.linalg.norm(direction))

    def draw(m):
        y = rng.integers(0, 2, size=m)
        x = rng.normal(size=(m, n_features)) + np.where(y[:, None] == 1, direction, -direction)
        return x, y

    x, y = draw(samples)
    x_test, y_test = draw(test_samples)
    per_client = samples // n_clients
    perm = rng.permutation(samples)
    shards = [np.sort(perm[k * per_client:(k + 1) * per_client]) for k in range(n_clients)]
    return SyntheticDataset(x, y, x_test, y_test, shards)

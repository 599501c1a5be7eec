"""A 16-32-2 tanh MLP on a flat float64 parameter vector (d = 610)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LAYERS = (16, 32, 2)


@dataclass(frozen=True)
class ToyModel:
    n_in: int = LAYERS[0]
    n_hidden: int = LAYERS[1]
    n_out: int = LAYERS[2]

    @property
    def dim(self) -> int:
        return self.n_in * self.n_hidden + self.n_hidden + self.n_hidden * self.n_out + self.n_out

    def init(self, seed: int) -> np.ndarray:
        rng = np.random.default_rng(seed)
        w1 = rng.normal(0.0, 1.0 / np.sqrt(self.n_in), size=(self.n_in, self.n_hidden))
        w2 = rng.normal(0.0, 1.0 / np.sqrt(self.n_hidden), size=(self.n_hidden, self.n_out))
        return self.flatten(w1, np.zeros(self.n_hidden), w2, np.zeros(self.n_out))

    def flatten(self, w1, b1, w2, b2) -> np.ndarray:
        return np.concatenate([np.ravel(w1), b1, np.ravel(w2), b2]).astype(np.float64)

    def unflatten(self, theta: np.ndarray):
        if theta.shape != (self.dim,):
            raise ValueError(f"expected a flat vector of length {self.dim}")
        i = 0
        w1 = theta[i:i + self.n_in * self.n_hidden].reshape(self.n_in, self.n_hidden)
        i += self.n_in * self.n_hidden
        b1 = theta[i:i + self.n_hidden]
        i += self.n_hidden
        w2 = theta[i:i + self.n_hidden * self.n_out].reshape(self.n_hidden, self.n_out)
        i += self.n_hidden * self.n_out
        b2 = theta[i:i + self.n_out]
        return w1, b1, w2, b2

    def logits(self, theta: np.ndarray, x: np.ndarray) -> np.ndarray:
        w1, b1, w2, b2 = self.unflatten(theta)
        return np.tanh(x @ w1 + b1) @ w2 + b2

    def loss_and_grad(self, theta: np.ndarray, x: np.ndarray, y: np.ndarray):
        """Mean softmax cross-entropy and its gradient."""
        w1, b1, w2, b2 = self.unflatten(theta)
        hidden = np.tanh(x @ w1 + b1)
        z = hidden @ w2 + b2
        z = z - z.max(axis=1, keepdims=True)
        p = np.exp(z)
        p /= p.sum(axis=1, keepdims=True)
        m = len(y)
        loss = -np.log(p[np.arange(m), y] + 1e-12).mean()
        dz = p
        dz[np.arange(m), y] -= 1.0
        dz /= m
        gw2 = hidden.T @ dz
        gb2 = dz.sum(axis=0)
        dh = (dz @ w2.T) * (1.0 - hidden**2)
        gw1 = x.T @ dh
        gb1 = dh.sum(axis=0)
        return loss, self.flatten(gw1, gb1, gw2, gb2)

    def loss(self, theta: np.ndarray, x: np.ndarray, y: np.ndarray) -> float:
        return float(self.loss_and_grad(theta, x, y)[0])

    def accuracy(self, theta: np.ndarray, x: np.ndarray, y: np.ndarray) -> float:
        return float((self.logits(theta, x).argmax(axis=1) == y).mean())


def local_train(
    model: ToyModel,
    theta: np.ndarray,
    shard: tuple[np.ndarray, np.ndarray],
    epochs: int,
    lr: float,
    seed: int,
    batch_size: int = 32,
) -> np.ndarray:
    """Mini-batch SGD from ``theta``; returns the parameter delta."""
    x, y = shard
    if len(y) == 0:
        raise ValueError("empty shard")
    rng = np.random.default_rng(seed)
    cur = theta.copy()
    for _ in range(epochs):
        order = rng.permutation(len(y))
        for start in range(0, len(y), batch_size):
            idx = order[start:start + batch_size]
            _, grad = model.loss_and_grad(cur, x[idx], y[idx])
            cur -= lr * grad
    return cur - theta

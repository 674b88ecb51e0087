"""Test-problem generators.  All return exactly symmetric matrices."""

from __future__ import annotations

import numpy as np

from .linalg import SpdSystem


def laplacian1d(n: int) -> np.ndarray:
    """``tridiag(-1, 2, -1)`` of order ``n``."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    return 2.0 * np.eye(n) - np.eye(n, k=1) - np.eye(n, k=-1)


def laplacian2d(m: int) -> np.ndarray:
    """Five-point Laplacian on an ``m x m`` interior grid (order ``m**2``)."""
    t = laplacian1d(m)
    eye = np.eye(m)
    return np.kron(eye, t) + np.kron(t, eye)


def random_spd(n: int, seed: int = 0, cond: float = 10.0, scale: float = 1.0) -> np.ndarray:
    """Random SPD matrix with eigenvalues uniform in ``scale * [1, cond]``."""
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    q *= np.sign(np.diag(r))
    eigs = scale * rng.uniform(1.0, cond, n)
    a = (q * eigs) @ q.T
    return 0.5 * (a + a.T)


def ones_rhs(a: np.ndarray) -> np.ndarray:
    """Right-hand side whose exact solution is the all-ones vector."""
    return a @ np.ones(a.shape[0])


def random_rhs(n: int, seed: int = 0) -> np.ndarray:
    return np.random.default_rng([seed, 1]).standard_normal(n)


def generate(kind: str, n: int, seed: int = 0, rhs: str = "ones-solution") -> SpdSystem:
    """Build a system by generator name (``laplacian1d``, ``laplacian2d``, ``random-spd``).

    For ``laplacian2d`` the argument ``n`` is the grid side ``m``.
    """
    if kind == "laplacian1d":
        a = laplacian1d(n)
    elif kind == "laplacian2d":
        a = laplacian2d(n)
    elif kind in ("random-spd", "randomSpd"):
        a = random_spd(n, seed)
    else:
        raise ValueError(f"unknown generator {kind!r}")
    if rhs == "ones-solution":
        b = ones_rhs(a)
    elif rhs == "random":
        b = random_rhs(a.shape[0], seed)
    else:
        raise ValueError(f"unknown right-hand side {rhs!r}")
    return SpdSystem(a, b)

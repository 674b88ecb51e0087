"""Quadratic energy ``f(x) = x.A.x/2 - x.b`` and its dissipation diagnostics."""

from __future__ import annotations

import numpy as np

from .errors import InvalidStepsize
from .linalg import SpdSystem, as_vector


def energy(system: SpdSystem, x) -> float:
    x = as_vector(x, system.n)
    return float(0.5 * (x @ (system.a @ x)) - x @ system.b)


def gradient(system: SpdSystem, x) -> np.ndarray:
    x = as_vector(x, system.n)
    return system.a @ x - system.b


def _mixed_state(system: SpdSystem, x_new_prefix, x_old, i: int) -> np.ndarray:
    n = system.n
    new = as_vector(x_new_prefix, n, "x_new_prefix")
    old = as_vector(x_old, n, "x_old")
    if not 0 <= i < n:
        raise IndexError(f"component {i} out of range for n={n}")
    return np.concatenate([new[:i], old[i:]])


def component_decrement(system: SpdSystem, x_new_prefix, x_old, i: int, h: float) -> float:
    """Energy change caused by updating component ``i`` in a Jacobi-scaled
    Itoh-Abe sweep with stepsize ``h``.

    The state before the update takes components ``j < i`` from
    ``x_new_prefix`` and the rest from ``x_old``; indices are 0-based.
    The closed form is ``-(h / (1 + h/2)^2) * r_i^2 / a_ii`` with ``r_i`` the
    i-th residual of that state, so it is never positive and is largest in
    magnitude at ``h = 2`` (the Gauss-Seidel update).
    """
    if not h > 0.0:
        raise InvalidStepsize(f"stepsize must be positive, got {h}")
    state = _mixed_state(system, x_new_prefix, x_old, i)
    a_ii = system.a[i, i]
    r = system.a[i] @ state - system.b[i]
    return float(-(h / (1.0 + 0.5 * h) ** 2) * r * r / a_ii)


def component_update(system: SpdSystem, x_new_prefix, x_old, i: int, h: float) -> np.ndarray:
    """State after updating component ``i`` with the Jacobi-scaled Itoh-Abe rule."""
    if not h > 0.0:
        raise InvalidStepsize(f"stepsize must be positive, got {h}")
    state = _mixed_state(system, x_new_prefix, x_old, i)
    a = system.a
    off = a[i] @ state - a[i, i] * state[i]
    state[i] = ((1.0 - 0.5 * h) * state[i] - h * (off - system.b[i]) / a[i, i]) / (1.0 + 0.5 * h)
    return state


def component_decrement_direct(system: SpdSystem, x_new_prefix, x_old, i: int, h: float) -> float:
    """Same quantity as :func:`component_decrement`, evaluated as a plain
    difference of energies."""
    before = _mixed_state(system, x_new_prefix, x_old, i)
    after = component_update(system, x_new_prefix, x_old, i, h)
    return energy(system, after) - energy(system, before)

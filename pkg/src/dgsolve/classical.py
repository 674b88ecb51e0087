"""Reference SOR-family solvers: SOR, Gauss-Seidel, symmetric SOR, block SOR.

These are written in the textbook relaxation form and share no code with
the discrete-gradient schemes, so comparing the two is a real check.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numba
import numpy as np
import scipy.linalg

from .errors import InvalidSpec
from .linalg import BlockSplitting, SpdSystem, as_vector, split
from .schemes import DEFAULT_MAX_ITERS, IterationTrace, iterate


class ClassicalMethod(enum.Enum):
    SOR = "sor"
    GAUSS_SEIDEL = "gs"
    SSOR = "ssor"
    BLOCK_SOR = "block-sor"


@dataclass(frozen=True, eq=False)
class ClassicalSpec:
    """Relaxation method and parameter.

    ``omega`` outside (0, 2) is accepted so divergence can be demonstrated;
    :attr:`in_convergence_window` flags it.  Gauss-Seidel always uses 1.
    """

    method: ClassicalMethod
    omega: float = 1.0
    blocks: BlockSplitting | None = None

    def __post_init__(self):
        method = ClassicalMethod(self.method)
        object.__setattr__(self, "method", method)
        omega = 1.0 if method is ClassicalMethod.GAUSS_SEIDEL else float(self.omega)
        if not math.isfinite(omega):
            raise InvalidSpec(f"omega must be finite, got {self.omega}")
        object.__setattr__(self, "omega", omega)
        if method is ClassicalMethod.BLOCK_SOR and self.blocks is None:
            raise InvalidSpec("block-sor needs a block splitting")

    @property
    def in_convergence_window(self) -> bool:
        return 0.0 < self.omega < 2.0


@numba.njit(cache=True)
def _sor_sweep(a, b, x, omega, backward):
    n = a.shape[0]
    for k in range(n):
        i = n - 1 - k if backward else k
        sigma = 0.0
        for j in range(n):
            if j != i:
                sigma += a[i, j] * x[j]
        x[i] = (1.0 - omega) * x[i] + omega * (b[i] - sigma) / a[i, i]


def _block_sor_sweep(blocks: BlockSplitting, system: SpdSystem, x: np.ndarray, omega: float):
    a, b = system.a, system.b
    for i, s in enumerate(blocks.slices):
        sigma = a[s, : s.start] @ x[: s.start] + a[s, s.stop :] @ x[s.stop :]
        x[s] = (1.0 - omega) * x[s] + omega * blocks.block_solve(i, b[s] - sigma)


def _check_blocks(blocks: BlockSplitting, system: SpdSystem) -> None:
    if blocks.n != system.n or not np.array_equal(blocks.reconstruct(), system.a):
        raise InvalidSpec("block splitting was built for a different matrix")


def make_sweeper(spec: ClassicalSpec, system: SpdSystem):
    omega = spec.omega
    if spec.method is ClassicalMethod.BLOCK_SOR:
        _check_blocks(spec.blocks, system)

        def block_sweep(x):
            y = np.array(x, dtype=np.float64)
            _block_sor_sweep(spec.blocks, system, y, omega)
            return y

        return block_sweep

    a = np.ascontiguousarray(system.a)
    b = system.b
    passes = (False, True) if spec.method is ClassicalMethod.SSOR else (False,)

    def sweep(x):
        y = np.array(x, dtype=np.float64)
        for backward in passes:
            _sor_sweep(a, b, y, omega, backward)
        return y

    return sweep


def classical_sweep(spec: ClassicalSpec, system: SpdSystem, x) -> np.ndarray:
    """One in-place-style relaxation sweep (forward, plus backward for SSOR)."""
    x = as_vector(x, system.n)
    return make_sweeper(spec, system)(x)


def classical_run(
    spec: ClassicalSpec,
    system: SpdSystem,
    x0=None,
    tol: float = 1e-10,
    max_iters: int = DEFAULT_MAX_ITERS,
) -> IterationTrace:
    x = np.zeros(system.n) if x0 is None else as_vector(x0, system.n, "x0").copy()
    return iterate(make_sweeper(spec, system), system, x, tol, max_iters)


def _block_lower_solve(blocks: BlockSplitting, lower: np.ndarray, omega: float, rhs: np.ndarray):
    # forward substitution for (D_b + omega L_b) y = rhs using the diagonal-block factors
    y = np.zeros_like(rhs)
    for i, s in enumerate(blocks.slices):
        y[s] = blocks.block_solve(i, rhs[s] - omega * (lower[s, : s.start] @ y[: s.start]))
    return y


def classical_iteration_matrix(spec: ClassicalSpec, system: SpdSystem) -> tuple[np.ndarray, np.ndarray]:
    """``G = (D + w L)^{-1} ((1 - w) D - w U)`` and ``c = w (D + w L)^{-1} b``.

    SSOR composes the forward matrix with the backward one (roles of ``L``
    and ``U`` swapped).  The block variant uses the diagonal-block factors.
    """
    w = spec.omega
    if spec.method is ClassicalMethod.BLOCK_SOR:
        blocks = spec.blocks
        _check_blocks(blocks, system)
        rhs = np.column_stack([(1.0 - w) * blocks.db - w * blocks.ub, w * system.b])
        sol = _block_lower_solve(blocks, blocks.lb, w, rhs)
        return sol[:, :-1], sol[:, -1]

    s = split(system)

    def half(lower_part, upper_part, lower):
        m = s.dmat + w * lower_part
        rhs = np.column_stack([(1.0 - w) * s.dmat - w * upper_part, w * system.b])
        sol = scipy.linalg.solve_triangular(m, rhs, lower=lower)
        return sol[:, :-1], sol[:, -1]

    g_f, c_f = half(s.l, s.u, True)
    if spec.method is not ClassicalMethod.SSOR:
        return g_f, c_f
    g_b, c_b = half(s.u, s.l, False)
    return g_b @ g_f, g_b @ c_f + c_b

"""Time-stepping schemes for the gradient system ``x' = -P (A x - b)``.

Every discrete-gradient (DG) scheme solves
``(x_new - x) / h = -P dg(x_new, x)`` and therefore never increases the
energy, whatever ``h > 0``.  With the Itoh-Abe family the implicit
equation is triangular, so one step is a Gauss-Seidel-style sweep over the
components (or blocks), each update using the components already updated.
``ExplicitEuler`` is the classical baseline ``x - h P (A x - b)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numba
import numpy as np
import scipy.linalg

from .energy import energy
from .errors import InvalidSpec, InvalidStepsize, Singular, Unsupported
from .linalg import (
    BlockSplitting,
    Preconditioner,
    PreconditionerKind,
    SpdSystem,
    as_vector,
    lu_factor,
    lu_solve,
    split,
)

DEFAULT_MAX_ITERS = 10_000


class Method(enum.Enum):
    DG_ITOH_ABE = "dg-ia"
    DG_ITOH_ABE_REVERSE = "dg-ia-rev"
    DG_SYMMETRIC = "dg-sym"
    DG_BLOCK = "dg-block"
    DG_MIDPOINT = "dg-midpoint"
    EXPLICIT_EULER = "euler"

    @property
    def is_discrete_gradient(self) -> bool:
        return self is not Method.EXPLICIT_EULER


_SWEEP_METHODS = (Method.DG_ITOH_ABE, Method.DG_ITOH_ABE_REVERSE, Method.DG_SYMMETRIC)


@dataclass(frozen=True, eq=False)
class SchemeSpec:
    """Which iteration to run, with its preconditioner and stepsize ``h``.

    The pointwise Itoh-Abe sweeps accept the identity or Jacobi
    preconditioner; ``DG_BLOCK`` needs ``blocks`` and a block-Jacobi
    preconditioner over the same partition (see :meth:`block`).
    """

    method: Method
    h: float
    preconditioner: Preconditioner = field(default_factory=Preconditioner.identity)
    blocks: BlockSplitting | None = None

    def __post_init__(self):
        object.__setattr__(self, "method", Method(self.method))
        h = float(self.h)
        if not (h > 0.0 and math.isfinite(h)):
            raise InvalidStepsize(f"stepsize must be positive and finite, got {self.h}")
        object.__setattr__(self, "h", h)
        kind = self.preconditioner.kind
        if self.method in _SWEEP_METHODS and not self.preconditioner.is_diagonal:
            raise InvalidSpec(
                f"{self.method.value} needs the identity or Jacobi preconditioner, got {kind.value}"
            )
        if self.method is Method.DG_BLOCK:
            if self.blocks is None:
                raise InvalidSpec("dg-block needs a block splitting")
            if kind is not PreconditionerKind.BLOCK_JACOBI or (
                self.preconditioner.boundaries != self.blocks.boundaries
            ):
                raise InvalidSpec("dg-block needs the block-Jacobi preconditioner of its partition")

    @classmethod
    def block(cls, blocks: BlockSplitting, h: float) -> "SchemeSpec":
        return cls(Method.DG_BLOCK, h, Preconditioner.block_jacobi(blocks.boundaries), blocks)


@dataclass
class IterationTrace:
    """Per-iteration record; entry 0 is the initial state (decrement 0)."""

    iterates: list[np.ndarray] = field(default_factory=list)
    energies: list[float] = field(default_factory=list)
    residual_norms: list[float] = field(default_factory=list)
    decrements: list[float] = field(default_factory=list)
    converged: bool = False

    @property
    def iterations(self) -> int:
        return len(self.energies) - 1

    @property
    def final_residual(self) -> float:
        return self.residual_norms[-1]

    @property
    def solution(self) -> np.ndarray:
        return self.iterates[-1]

    def record(self, x: np.ndarray, e: float, r: float) -> None:
        self.decrements.append(e - self.energies[-1] if self.energies else 0.0)
        self.iterates.append(x)
        self.energies.append(e)
        self.residual_norms.append(r)


@numba.njit(cache=True)
def _component_sweep(a, b, x, keep, push, backward):
    # x_i <- keep_i * x_i - push_i * (sum_{j != i} a_ij x_j - b_i), in place
    n = a.shape[0]
    for k in range(n):
        i = n - 1 - k if backward else k
        s = 0.0
        for j in range(n):
            if j != i:
                s += a[i, j] * x[j]
        x[i] = keep[i] * x[i] - push[i] * (s - b[i])


def _sweep_coefficients(spec: SchemeSpec, system: SpdSystem) -> tuple[np.ndarray, np.ndarray]:
    h = spec.h
    d = np.diag(system.a)
    if spec.preconditioner.kind is PreconditionerKind.JACOBI:
        keep = np.full(system.n, (1.0 - 0.5 * h) / (1.0 + 0.5 * h))
        push = (h / d) / (1.0 + 0.5 * h)
    else:
        q = 0.5 * h * d
        keep = (1.0 - q) / (1.0 + q)
        push = h / (1.0 + q)
    return keep, push


def _check_blocks(blocks: BlockSplitting, system: SpdSystem) -> None:
    if blocks.n != system.n or not np.array_equal(blocks.reconstruct(), system.a):
        raise InvalidSpec("block splitting was built for a different matrix")


def _block_sweep(blocks: BlockSplitting, system: SpdSystem, x: np.ndarray, h: float) -> None:
    a, b = system.a, system.b
    keep = (1.0 - 0.5 * h) / (1.0 + 0.5 * h)
    push = h / (1.0 + 0.5 * h)
    for i, s in enumerate(blocks.slices):
        coupling = a[s, : s.start] @ x[: s.start] + a[s, s.stop :] @ x[s.stop :]
        x[s] = keep * x[s] + push * blocks.block_solve(i, b[s] - coupling)


def make_stepper(spec: SchemeSpec, system: SpdSystem) -> Callable[[np.ndarray], np.ndarray]:
    """Return ``x -> x_new`` for ``spec`` with all per-system setup done once."""
    a, b, h = system.a, system.b, spec.h
    method = spec.method

    if method in _SWEEP_METHODS:
        keep, push = _sweep_coefficients(spec, system)
        a_c = np.ascontiguousarray(a)
        passes = {
            Method.DG_ITOH_ABE: (False,),
            Method.DG_ITOH_ABE_REVERSE: (True,),
            Method.DG_SYMMETRIC: (False, True),
        }[method]

        def sweep(x):
            y = np.array(x, dtype=np.float64)
            for backward in passes:
                _component_sweep(a_c, b, y, keep, push, backward)
            return y

        return sweep

    if method is Method.DG_BLOCK:
        _check_blocks(spec.blocks, system)

        def block_sweep(x):
            y = np.array(x, dtype=np.float64)
            _block_sweep(spec.blocks, system, y, h)
            return y

        return block_sweep

    pa = spec.preconditioner.matrix(system) @ a
    pb = spec.preconditioner.matrix(system) @ b
    if method is Method.EXPLICIT_EULER:
        return lambda x: x - h * (pa @ x - pb)

    # midpoint / AVF: (I + h/2 PA) x_new = (I - h/2 PA) x + h P b
    factor = lu_factor(np.eye(system.n) + 0.5 * h * pa)
    explicit_half = np.eye(system.n) - 0.5 * h * pa
    return lambda x: factor.solve(explicit_half @ x + h * pb)


def step(spec: SchemeSpec, system: SpdSystem, x) -> np.ndarray:
    """One iteration of ``spec`` from ``x``; ``x`` is not modified."""
    x = as_vector(x, system.n)
    return make_stepper(spec, system)(x)


def run(
    spec: SchemeSpec,
    system: SpdSystem,
    x0=None,
    tol: float = 1e-10,
    max_iters: int = DEFAULT_MAX_ITERS,
) -> IterationTrace:
    """Iterate until ``||Ax - b|| <= tol ||b||`` (plain ``tol`` when ``b = 0``).

    Hitting ``max_iters`` or a non-finite residual leaves
    ``trace.converged`` false; nothing is raised for divergence.
    """
    if not tol > 0.0:
        raise ValueError(f"tol must be positive, got {tol}")
    if max_iters < 1:
        raise ValueError(f"max_iters must be at least 1, got {max_iters}")
    x = np.zeros(system.n) if x0 is None else as_vector(x0, system.n, "x0").copy()
    stepper = make_stepper(spec, system)
    return iterate(stepper, system, x, tol, max_iters)


def iterate(stepper, system: SpdSystem, x: np.ndarray, tol: float, max_iters: int) -> IterationTrace:
    """Drive any ``x -> x_new`` map and record the trace (shared with the classical solvers)."""
    bnorm = float(np.linalg.norm(system.b))
    threshold = tol * bnorm if bnorm > 0.0 else tol
    trace = IterationTrace()
    with np.errstate(over="ignore", invalid="ignore"):
        res = float(np.linalg.norm(system.residual(x)))
        trace.record(x, energy(system, x), res)
        if res <= threshold:
            trace.converged = True
            return trace
        for _ in range(max_iters):
            x = stepper(x)
            res = float(np.linalg.norm(system.residual(x)))
            e = float(0.5 * (x @ (system.a @ x)) - x @ system.b)
            trace.record(x, e, res)
            if not math.isfinite(res):
                break
            if res <= threshold:
                trace.converged = True
                break
    return trace


def _triangular_pair(spec: SchemeSpec, system: SpdSystem, backward: bool):
    """Matrices ``M`` (triangular) and ``N`` and vector ``r`` with ``M x_new = N x + r``."""
    h = spec.h
    s = split(system)
    first, second = (s.u, s.l) if backward else (s.l, s.u)
    if spec.preconditioner.kind is PreconditionerKind.JACOBI:
        # D-scaled form: ((1 + h/2) D + h L) x_new = ((1 - h/2) D - h U) x + h b
        m = (1.0 + 0.5 * h) * s.dmat + h * first
        nmat = (1.0 - 0.5 * h) * s.dmat - h * second
        r = h * system.b
    else:
        eye = np.eye(system.n)
        m = eye + 0.5 * h * s.dmat + h * first
        nmat = eye - 0.5 * h * s.dmat - h * second
        r = h * system.b
    return m, nmat, r


def _affine_from(m, nmat, r, solve) -> tuple[np.ndarray, np.ndarray]:
    sol = solve(m, np.column_stack([nmat, r]))
    return sol[:, :-1], sol[:, -1]


def iteration_matrix(spec: SchemeSpec, system: SpdSystem) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(G, c)`` with ``step(spec, system, x) == G @ x + c`` for all ``x``."""
    method, h = spec.method, spec.h

    def tri_solve(lower):
        return lambda m, rhs: scipy.linalg.solve_triangular(m, rhs, lower=lower)

    if method in (Method.DG_ITOH_ABE, Method.DG_ITOH_ABE_REVERSE):
        backward = method is Method.DG_ITOH_ABE_REVERSE
        return _affine_from(*_triangular_pair(spec, system, backward), tri_solve(not backward))
    if method is Method.DG_SYMMETRIC:
        g_f, c_f = _affine_from(*_triangular_pair(spec, system, False), tri_solve(True))
        g_b, c_b = _affine_from(*_triangular_pair(spec, system, True), tri_solve(False))
        return g_b @ g_f, g_b @ c_f + c_b
    if method is Method.DG_BLOCK:
        blocks = spec.blocks
        _check_blocks(blocks, system)
        m = (1.0 + 0.5 * h) * blocks.db + h * blocks.lb
        nmat = (1.0 - 0.5 * h) * blocks.db - h * blocks.ub
        return _affine_from(m, nmat, h * system.b, lu_solve)

    p = spec.preconditioner.matrix(system)
    pa = p @ system.a
    eye = np.eye(system.n)
    if method is Method.EXPLICIT_EULER:
        return eye - h * pa, h * (p @ system.b)
    try:
        return _affine_from(eye + 0.5 * h * pa, eye - 0.5 * h * pa, h * (p @ system.b), lu_solve)
    except Singular as exc:
        raise Unsupported(f"midpoint iteration matrix is singular: {exc}") from None

"""Executable checks that the Itoh-Abe discrete-gradient schemes with
``P = D^{-1}`` (or ``D_b^{-1}``) are the SOR-family methods in disguise.

The stepsize and relaxation parameter are tied by ``h = 2 w / (2 - w)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .classical import (
    ClassicalMethod,
    ClassicalSpec,
    classical_iteration_matrix,
    make_sweeper,
)
from .errors import OutOfRange
from .linalg import BlockSplitting, Preconditioner, SpdSystem, as_vector, block_split
from .schemes import Method, SchemeSpec, iteration_matrix, make_stepper

MATRIX_RTOL = 1e-11
SEQUENCE_RTOL = 1e-9
DEFAULT_K = 200


def omega_to_h(omega: float) -> float:
    """Stepsize matching relaxation parameter ``omega`` in (0, 2)."""
    if not 0.0 < omega < 2.0:
        raise OutOfRange(f"omega must lie in (0, 2), got {omega}")
    return 2.0 * omega / (2.0 - omega)


def h_to_omega(h: float) -> float:
    if not (h > 0.0 and math.isfinite(h)):
        raise OutOfRange(f"stepsize must be positive and finite, got {h}")
    return 2.0 * h / (2.0 + h)


class Pair(enum.Enum):
    SOR = "sor"
    SSOR = "ssor"
    BLOCK_SOR = "block-sor"


@dataclass(frozen=True)
class EquivalenceReport:
    pair: str
    omega: float
    h: float
    matrix_gap: float
    vector_gap: float
    sequence_gap: float
    matrix_tol: float
    vector_tol: float
    sequence_tol: float
    iterations: int

    @property
    def passed(self) -> bool:
        return bool(
            self.matrix_gap <= self.matrix_tol
            and self.vector_gap <= self.vector_tol
            and self.sequence_gap <= self.sequence_tol
        )

    def as_dict(self) -> dict:
        return {
            "pair": self.pair,
            "omega": self.omega,
            "h": self.h,
            "matrix_gap": self.matrix_gap,
            "vector_gap": self.vector_gap,
            "sequence_gap": self.sequence_gap,
            "matrix_tol": self.matrix_tol,
            "vector_tol": self.vector_tol,
            "sequence_tol": self.sequence_tol,
            "iterations": self.iterations,
            "passed": self.passed,
        }


def matched_specs(pair, system: SpdSystem, omega: float, blocks: BlockSplitting | None = None):
    """The discrete-gradient spec and the classical spec compared by ``pair``."""
    pair = Pair(pair)
    h = omega_to_h(omega)
    if pair is Pair.SOR:
        return (
            SchemeSpec(Method.DG_ITOH_ABE, h, Preconditioner.jacobi()),
            ClassicalSpec(ClassicalMethod.SOR, omega),
        )
    if pair is Pair.SSOR:
        return (
            SchemeSpec(Method.DG_SYMMETRIC, h, Preconditioner.jacobi()),
            ClassicalSpec(ClassicalMethod.SSOR, omega),
        )
    if blocks is None:
        blocks = block_split(system, ())
    return SchemeSpec.block(blocks, h), ClassicalSpec(ClassicalMethod.BLOCK_SOR, omega, blocks)


def check_equivalence(
    pair,
    system: SpdSystem,
    omega: float,
    x0=None,
    k: int = DEFAULT_K,
    blocks: BlockSplitting | None = None,
) -> EquivalenceReport:
    """Compare iteration matrices, vectors and ``k`` iterates of both sides.

    Gaps are absolute; tolerances scale with the magnitude of the classical
    side: ``1e-11 (1 + ||G||_max)``, ``1e-11 (1 + ||c||_inf)`` and
    ``1e-9 (1 + max_k ||x_k||_inf)``.
    """
    dg_spec, cl_spec = matched_specs(pair, system, omega, blocks)
    g_dg, c_dg = iteration_matrix(dg_spec, system)
    g_cl, c_cl = classical_iteration_matrix(cl_spec, system)

    x0 = np.zeros(system.n) if x0 is None else as_vector(x0, system.n, "x0")
    dg_step = make_stepper(dg_spec, system)
    cl_step = make_sweeper(cl_spec, system)
    x_dg, x_cl = x0.copy(), x0.copy()
    seq_gap, seq_scale = 0.0, float(np.max(np.abs(x0), initial=0.0))
    for _ in range(k):
        x_dg, x_cl = dg_step(x_dg), cl_step(x_cl)
        seq_gap = max(seq_gap, float(np.max(np.abs(x_dg - x_cl))))
        seq_scale = max(seq_scale, float(np.max(np.abs(x_cl))))

    return EquivalenceReport(
        pair=Pair(pair).value,
        omega=float(omega),
        h=dg_spec.h,
        matrix_gap=float(np.max(np.abs(g_dg - g_cl))),
        vector_gap=float(np.max(np.abs(c_dg - c_cl))),
        sequence_gap=seq_gap,
        matrix_tol=MATRIX_RTOL * (1.0 + float(np.max(np.abs(g_cl)))),
        vector_tol=MATRIX_RTOL * (1.0 + float(np.max(np.abs(c_cl)))),
        sequence_tol=SEQUENCE_RTOL * (1.0 + seq_scale),
        iterations=k,
    )


def euler_connection_matrix(system: SpdSystem, p: Preconditioner) -> np.ndarray:
    """``I - P A``: the iteration matrix of unit-step explicit Euler."""
    return np.eye(system.n) - p.matrix(system) @ system.a


def euler_sor_gap(system: SpdSystem, p: Preconditioner, omega: float = 1.0) -> float:
    """``max |(I - P A) - G_SOR(omega)|``; generally nonzero."""
    g_sor, _ = classical_iteration_matrix(ClassicalSpec(ClassicalMethod.SOR, omega), system)
    return float(np.max(np.abs(euler_connection_matrix(system, p) - g_sor)))
